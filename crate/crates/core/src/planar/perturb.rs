//! Perturbations of 4-regular embedded graphs: smoothing every vertex with
//! one of its two non-crossing pairings, the resulting region structure, and
//! the reduction of a perturbation to a nicely-contained sub-configuration.

use std::collections::BTreeSet;

use super::{Edge, EmbeddedGraph, Face, HalfEdge, PlanarError, UnionFind, Vertex};
use crate::ovals::{nicely_contains, OvalConfig};

/// One of the two non-crossing pairings of the four edge ends at each vertex:
/// choice 0 joins rotation slots (0,1) and (2,3), choice 1 joins (1,2) and
/// (3,0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingAssignment {
    choices: Vec<u8>,
}

impl PairingAssignment {
    pub fn all_zero(n_vertices: usize) -> Self {
        PairingAssignment {
            choices: vec![0; n_vertices],
        }
    }

    pub fn new(choices: Vec<u8>) -> Self {
        debug_assert!(choices.iter().all(|&c| c <= 1));
        PairingAssignment { choices }
    }

    pub fn from_bits(n_vertices: usize, bits: u64) -> Self {
        PairingAssignment {
            choices: (0..n_vertices).map(|v| ((bits >> v) & 1) as u8).collect(),
        }
    }

    pub fn choice(&self, v: Vertex) -> u8 {
        self.choices[v]
    }

    pub fn set(&mut self, v: Vertex, c: u8) {
        self.choices[v] = c;
    }

    pub fn flip(&mut self, v: Vertex) {
        self.choices[v] ^= 1;
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }

    fn partner_slot(&self, v: Vertex, slot: usize) -> usize {
        match self.choices[v] {
            0 => slot ^ 1,
            _ => 3 - slot,
        }
    }
}

/// Regions of the sphere complement of a curve system, with the tree they
/// form (vertices: regions, edges: curves).
#[derive(Debug, Clone)]
pub struct RegionStructure {
    pub region_of_face: Vec<usize>,
    pub n_regions: usize,
    pub root_region: usize,
    /// Parent link in the region tree: `(parent region, separating curve)`.
    pub parent: Vec<Option<(usize, usize)>>,
    /// Regions in breadth-first order from the root.
    pub bfs_order: Vec<usize>,
    /// Curves incident to each region.
    pub incident_curves: Vec<Vec<usize>>,
}

impl RegionStructure {
    pub fn depth(&self, mut r: usize) -> usize {
        let mut d = 0;
        while let Some((p, _)) = self.parent[r] {
            d += 1;
            r = p;
        }
        d
    }
}

/// A curve system on an embedded graph: disjoint closed curves running along
/// its edges, their nesting forest, and the region structure.
#[derive(Debug, Clone)]
pub struct CurveSystem {
    /// Edge lists of the curves, in traversal order.
    pub curves: Vec<Vec<Edge>>,
    /// Curve index of every edge (every edge lies on exactly one curve).
    pub curve_of_edge: Vec<usize>,
    /// Nesting forest; oval labels are `c0, c1, ...` by curve index.
    pub config: OvalConfig,
    pub regions: RegionStructure,
}

impl CurveSystem {
    pub fn n_curves(&self) -> usize {
        self.curves.len()
    }

    pub fn curve_label(i: usize) -> String {
        format!("c{i}")
    }

    /// The sub-configuration spanned by the given curves.
    pub fn sub_config(&self, curves: &BTreeSet<usize>) -> OvalConfig {
        let keep: BTreeSet<String> = curves.iter().map(|&c| Self::curve_label(c)).collect();
        self.config.restrict(&keep).expect("curve labels exist")
    }
}

/// Builds the region structure and nesting forest shared by drawings and
/// perturbations. Edges with no curve do not separate; their side faces are
/// merged. `corner_merges` lists extra face merges arising from vertex
/// smoothings.
pub(crate) fn build_regions(
    g: &EmbeddedGraph,
    curve_of_edge: &[Option<usize>],
    n_curves: usize,
    corner_merges: &[(Face, Face)],
    root_face: Face,
) -> Result<(RegionStructure, OvalConfig), PlanarError> {
    let mut uf = UnionFind::new(g.n_faces());
    for e in 0..g.n_edges() {
        if curve_of_edge[e].is_none() {
            uf.union(g.face_of(2 * e), g.face_of(2 * e + 1));
        }
    }
    for &(a, b) in corner_merges {
        uf.union(a, b);
    }
    // Compact region ids in order of smallest member face.
    let mut region_of_face = vec![usize::MAX; g.n_faces()];
    let mut n_regions = 0;
    for f in 0..g.n_faces() {
        let r = uf.find(f);
        if region_of_face[r] == usize::MAX {
            region_of_face[r] = n_regions;
            n_regions += 1;
        }
    }
    let region_of_face: Vec<usize> = (0..g.n_faces())
        .map(|f| region_of_face[uf.find(f)])
        .collect();

    if n_regions != n_curves + 1 {
        return Err(PlanarError::RegionsNotTree);
    }

    // Each curve separates the two regions beside any of its edges.
    let mut side_of_curve: Vec<Option<(usize, usize)>> = vec![None; n_curves];
    for e in 0..g.n_edges() {
        if let Some(c) = curve_of_edge[e] {
            let s = (
                region_of_face[g.face_of(2 * e)],
                region_of_face[g.face_of(2 * e + 1)],
            );
            if s.0 == s.1 {
                return Err(PlanarError::RegionsNotTree);
            }
            match side_of_curve[c] {
                None => side_of_curve[c] = Some(s),
                Some(prev) => {
                    debug_assert!(
                        prev == s || prev == (s.1, s.0),
                        "curve sides must be consistent along the curve"
                    );
                }
            }
        }
    }

    let mut incident_curves: Vec<Vec<usize>> = vec![Vec::new(); n_regions];
    for (c, s) in side_of_curve.iter().enumerate() {
        let (a, b) = s.ok_or(PlanarError::RegionsNotTree)?;
        incident_curves[a].push(c);
        incident_curves[b].push(c);
    }
    for list in &mut incident_curves {
        list.sort_unstable();
        list.dedup();
    }

    // Breadth-first tree from the root region; any revisit means a cycle.
    let root_region = region_of_face[root_face];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n_regions];
    let mut visited = vec![false; n_regions];
    visited[root_region] = true;
    let mut bfs_order = vec![root_region];
    let mut head = 0;
    while head < bfs_order.len() {
        let r = bfs_order[head];
        head += 1;
        for &c in &incident_curves[r] {
            let (a, b) = side_of_curve[c].unwrap();
            let other = if a == r { b } else { a };
            if visited[other] {
                // The curve back to the parent is fine; anything else is a
                // cycle in the region graph.
                if parent[r].map(|(_, pc)| pc) != Some(c) {
                    return Err(PlanarError::RegionsNotTree);
                }
                continue;
            }
            visited[other] = true;
            parent[other] = Some((r, c));
            bfs_order.push(other);
        }
    }
    if bfs_order.len() != n_regions {
        return Err(PlanarError::RegionsNotTree);
    }

    // Nesting forest: each curve is an oval; its parent oval is the curve
    // above its parent-side region.
    let mut items: Vec<(String, Option<String>)> = Vec::new();
    for &r in &bfs_order {
        if let Some((p, c)) = parent[r] {
            let parent_label = parent[p].map(|(_, pc)| CurveSystem::curve_label(pc));
            items.push((CurveSystem::curve_label(c), parent_label));
        }
    }
    let config = OvalConfig::from_parents(&items).expect("labels are unique");

    Ok((
        RegionStructure {
            region_of_face,
            n_regions,
            root_region,
            parent,
            bfs_order,
            incident_curves,
        },
        config,
    ))
}

/// Smooths every vertex of a connected 4-regular embedded graph according to
/// the pairing assignment and returns the resulting curve system. The
/// nesting forest is rooted at the region containing `root_face`.
pub fn perturb(
    g: &EmbeddedGraph,
    pairing: &PairingAssignment,
    root_face: Face,
) -> Result<CurveSystem, PlanarError> {
    g.check_four_regular()?;

    // Strand successor: enter the head of `h`, leave through the slot paired
    // with the arrival slot.
    let strand_next = |h: HalfEdge| -> HalfEdge {
        let v = g.head_of(h);
        let t = g.twin(h);
        let slot = g.rotation_at(v).iter().position(|&x| x == t).unwrap();
        g.rotation_at(v)[pairing.partner_slot(v, slot)]
    };

    let nh = 2 * g.n_edges();
    let mut orbit_of = vec![usize::MAX; nh];
    let mut orbits: Vec<Vec<HalfEdge>> = Vec::new();
    for start in 0..nh {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut orbit = Vec::new();
        let mut h = start;
        loop {
            orbit_of[h] = id;
            orbit.push(h);
            h = strand_next(h);
            if h == start {
                break;
            }
        }
        orbits.push(orbit);
    }

    // Orbits come in reverse pairs; each pair is one curve.
    let mut curve_of_orbit = vec![usize::MAX; orbits.len()];
    let mut curves: Vec<Vec<Edge>> = Vec::new();
    for (id, orbit) in orbits.iter().enumerate() {
        if curve_of_orbit[id] != usize::MAX {
            continue;
        }
        let rev = orbit_of[g.twin(orbit[0])];
        assert_ne!(rev, id, "strand orbit traverses an edge twice");
        let c = curves.len();
        curve_of_orbit[id] = c;
        curve_of_orbit[rev] = c;
        curves.push(orbit.iter().map(|&h| g.edge_of(h)).collect());
    }
    let curve_of_edge_opt: Vec<Option<usize>> = (0..g.n_edges())
        .map(|e| Some(curve_of_orbit[orbit_of[2 * e]]))
        .collect();

    // Smoothing a vertex connects the two sectors not hugged by the strands.
    let mut corner_merges = Vec::with_capacity(g.n_vertices());
    for v in 0..g.n_vertices() {
        let (i, j) = match pairing.choice(v) {
            0 => (1, 3),
            _ => (0, 2),
        };
        corner_merges.push((g.corner_face(v, i), g.corner_face(v, j)));
    }

    let (regions, config) = build_regions(
        g,
        &curve_of_edge_opt,
        curves.len(),
        &corner_merges,
        root_face,
    )?;
    let curve_of_edge = curve_of_edge_opt.into_iter().map(Option::unwrap).collect();
    Ok(CurveSystem {
        curves,
        curve_of_edge,
        config,
        regions,
    })
}

/// Flips the pairing at `v` so that the edges of `h1` and `h2 = face_next(h1)`
/// become joined. The two half-edges meet at `head(h1)` on consecutive
/// rotation slots.
fn join_corner(g: &EmbeddedGraph, pairing: &mut PairingAssignment, h1: HalfEdge) {
    let v = g.head_of(h1);
    let t = g.twin(h1);
    let s1 = g.rotation_at(v).iter().position(|&x| x == t).unwrap();
    // The face's exit half-edge sits one rotation slot clockwise, so the
    // corner's ends occupy slots s1 - 1 and s1; pairing 0 joins even-started
    // adjacent slot pairs.
    pairing.set(v, ((s1 + 1) % 2) as u8);
}

fn faces_of_regions(g: &EmbeddedGraph, regions: &RegionStructure) -> Vec<Vec<Face>> {
    let mut faces: Vec<Vec<Face>> = vec![Vec::new(); regions.n_regions];
    for f in 0..g.n_faces() {
        faces[regions.region_of_face[f]].push(f);
    }
    faces
}

/// Walks the boundary of face `f` looking for a corner whose two edges lie on
/// curves accepted by `want`; returns the first half-edge of such a corner.
fn find_corner(
    g: &EmbeddedGraph,
    sys: &CurveSystem,
    f: Face,
    mut want: impl FnMut(usize, usize) -> bool,
) -> Option<HalfEdge> {
    let start = (0..2 * g.n_edges()).find(|&h| g.face_of(h) == f)?;
    let mut h = start;
    loop {
        let next = g.face_next(h);
        let c1 = sys.curve_of_edge[g.edge_of(h)];
        let c2 = sys.curve_of_edge[g.edge_of(next)];
        if c1 != c2 && want(c1, c2) {
            return Some(h);
        }
        h = next;
        if h == start {
            break;
        }
    }
    None
}

/// Given a perturbation `x` of `g` whose curve system nicely contains the
/// curves `y`, computes a pairing assignment whose perturbation is equivalent
/// to the sub-configuration spanned by `y`. Each step flips one vertex
/// pairing and removes one oval not in `y`.
pub fn reduce(
    g: &EmbeddedGraph,
    x: &PairingAssignment,
    y: &BTreeSet<usize>,
    root_face: Face,
) -> Result<PairingAssignment, PlanarError> {
    if y.is_empty() {
        // Every perturbation of a connected graph has at least one curve.
        return Err(PlanarError::EmptyTarget);
    }
    let sys0 = perturb(g, x, root_face)?;
    for &c in y {
        if c >= sys0.n_curves() {
            return Err(PlanarError::NotNicelyContained(format!(
                "curve c{c} does not exist"
            )));
        }
    }
    // Track the target curves by their edges; a merge lets the merged curve
    // inherit membership.
    let mut y_edges: BTreeSet<Edge> = y
        .iter()
        .flat_map(|&c| sys0.curves[c].iter().copied())
        .collect();

    let mut current = x.clone();
    let max_iters = sys0.n_curves() + 1;
    for _ in 0..=max_iters {
        let sys = perturb(g, &current, root_face)?;
        let y_curves: BTreeSet<usize> = (0..sys.n_curves())
            .filter(|&c| sys.curves[c].iter().any(|e| y_edges.contains(e)))
            .collect();
        y_edges = y_curves
            .iter()
            .flat_map(|&c| sys.curves[c].iter().copied())
            .collect();

        let y_labels: BTreeSet<String> = y_curves
            .iter()
            .map(|&c| CurveSystem::curve_label(c))
            .collect();
        if !nicely_contains(&sys.config, &y_labels).expect("labels exist") {
            return Err(PlanarError::NotNicelyContained(format!(
                "ovals {{{}}} are not monochromatic after deletion",
                y_labels.iter().cloned().collect::<Vec<_>>().join(" ")
            )));
        }

        if y_curves.len() == sys.n_curves() {
            return Ok(current);
        }

        let region_faces = faces_of_regions(g, &sys.regions);

        // Case 1: a region bounded by at least two ovals, all outside `y`.
        // Join two of them at a corner of a face inside the region.
        let mut flipped = false;
        'case1: for &r in &sys.regions.bfs_order {
            let inc = &sys.regions.incident_curves[r];
            if inc.len() < 2 || inc.iter().any(|c| y_curves.contains(c)) {
                continue;
            }
            for &f in &region_faces[r] {
                if let Some(h) = find_corner(g, &sys, f, |_, _| true) {
                    join_corner(g, &mut current, h);
                    flipped = true;
                    break 'case1;
                }
            }
        }
        if flipped {
            continue;
        }

        // Case 2: join an oval of `y` with a neighbor outside `y` (the merged
        // oval replaces the old member of `y`).
        'case2: for &r in &sys.regions.bfs_order {
            for &f in &region_faces[r] {
                let corner = find_corner(g, &sys, f, |c1, c2| {
                    y_curves.contains(&c1) != y_curves.contains(&c2)
                });
                if let Some(h) = corner {
                    join_corner(g, &mut current, h);
                    flipped = true;
                    break 'case2;
                }
            }
        }
        if !flipped {
            return Err(PlanarError::ReductionStuck);
        }
    }
    Err(PlanarError::ReductionStuck)
}

/// The octahedron map: 6 vertices, 12 edges, 8 faces, 4-regular. Used by the
/// exhaustive reduction checks.
pub fn octahedron() -> EmbeddedGraph {
    // Vertices: 0..4 equatorial square, 4 top, 5 bottom.
    // Rotation orders chosen counterclockwise as seen from outside.
    let edges = vec![
        (0, 1), // 0
        (1, 2), // 1
        (2, 3), // 2
        (3, 0), // 3
        (0, 4), // 4
        (1, 4), // 5
        (2, 4), // 6
        (3, 4), // 7
        (0, 5), // 8
        (1, 5), // 9
        (2, 5), // 10
        (3, 5), // 11
    ];
    // Outgoing half-edge of edge e at its first endpoint is 2e, at its
    // second endpoint 2e+1.
    let rotation = vec![
        // v0: east(0->1), up(0->4), west(0->3), down(0->5)
        vec![0, 8, 7, 16],
        // v1: east(1->2), up, west(1->0), down
        vec![2, 10, 1, 18],
        // v2
        vec![4, 12, 3, 20],
        // v3
        vec![6, 14, 5, 22],
        // v4 (top): sees the square below; counterclockwise from outside
        // the order of meridians reverses the equator orientation.
        vec![9, 11, 13, 15],
        // v5 (bottom)
        vec![17, 23, 21, 19],
    ];
    let positions = vec![
        (0.0, 0.0),
        (1.0, 0.0),
        (1.0, 1.0),
        (0.0, 1.0),
        (0.5, 0.5),
        (-0.5, -0.5),
    ];
    EmbeddedGraph::new(6, &edges, rotation, positions)
}
