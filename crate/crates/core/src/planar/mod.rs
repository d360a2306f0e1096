//! Planar combinatorial maps and the combinatorial algorithms on them:
//! perturbation of 4-regular embedded graphs, reduction to a nicely-contained
//! sub-configuration, chessboard-aligned redrawing in a finer grid, and
//! embedding grids into globe graphs.
//!
//! An embedded graph is stored as half-edges with a twin involution and a
//! counterclockwise rotation order of outgoing half-edges at each vertex.
//! Faces are orbits of `h -> rotation_successor(twin(h))`; with this
//! convention a face lies to the left of each of its half-edges.

mod globe_embed;
mod perturb;
mod redraw;

pub use globe_embed::{choose_pairings_containing, embed_grid_in_globe, GlobeLattice, GridWindow};
pub use perturb::{octahedron, perturb, reduce, CurveSystem, PairingAssignment, RegionStructure};
pub use redraw::{
    chessboard_aligned, chessboard_redraw, draw_config, drawing_to_config, CHESSBOARD_MIN_SCALE,
};

use std::collections::BTreeSet;

use thiserror::Error;

pub type Vertex = usize;
pub type HalfEdge = usize;
pub type Edge = usize;
pub type Face = usize;

#[derive(Debug, Error, PartialEq)]
pub enum PlanarError {
    #[error("grid size must be at least 1")]
    EmptyGrid,
    #[error("vertex {0} has degree {1}, expected 4")]
    NotFourRegular(Vertex, usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("subgraph is not 2-regular at vertex {0}")]
    NotTwoRegular(Vertex),
    #[error("curve system does not partition the sphere into a tree of regions")]
    RegionsNotTree,
    #[error("redraw scale must be at least {CHESSBOARD_MIN_SCALE}, got {0}")]
    ScaleTooSmall(usize),
    #[error("drawing does not realize the requested configuration")]
    DrawingMismatch,
    #[error("cannot reduce to an empty configuration")]
    EmptyTarget,
    #[error("globe graph too small: need at least {need_rows} latitude circles and {need_cols} meridian arcs, have {have_rows} and {have_cols}")]
    GlobeTooSmall {
        need_rows: usize,
        need_cols: usize,
        have_rows: usize,
        have_cols: usize,
    },
    #[error("no valid grid window in the globe graph avoids the polar joins")]
    NoInducedWindow,
    #[error("drawing passes straight through vertex {0}; no pairing keeps its edges together")]
    StraightPass(Vertex),
    #[error("configuration is not nicely contained: {0}")]
    NotNicelyContained(String),
    #[error("reduction failed to converge")]
    ReductionStuck,
    #[error("drawing edge {0:?} is not an edge of the grid")]
    BadDrawingEdge((i64, i64, i64, i64)),
}

/// Planar combinatorial map with a fixed sphere embedding.
#[derive(Debug, Clone)]
pub struct EmbeddedGraph {
    /// Origin vertex of each half-edge. Twins are `2e` and `2e + 1`.
    origin: Vec<Vertex>,
    /// Outgoing half-edges in counterclockwise order at each vertex.
    rotation: Vec<Vec<HalfEdge>>,
    /// Geometric positions, used only for rendering.
    positions: Vec<(f64, f64)>,
    /// Face id of each half-edge (the face on its left), by orbit traversal.
    face_of: Vec<Face>,
    face_count: usize,
}

impl EmbeddedGraph {
    /// Builds a map from edge endpoints plus an explicit rotation order.
    /// `rotation[v]` lists half-edge ids; half-edges of edge `e` are `2e`
    /// (origin `edges[e].0`) and `2e + 1` (origin `edges[e].1`).
    pub fn new(
        n_vertices: usize,
        edges: &[(Vertex, Vertex)],
        rotation: Vec<Vec<HalfEdge>>,
        positions: Vec<(f64, f64)>,
    ) -> Self {
        let mut origin = vec![0; edges.len() * 2];
        for (e, &(a, b)) in edges.iter().enumerate() {
            origin[2 * e] = a;
            origin[2 * e + 1] = b;
        }
        debug_assert_eq!(rotation.len(), n_vertices);
        debug_assert_eq!(
            rotation.iter().map(|r| r.len()).sum::<usize>(),
            origin.len()
        );
        let mut g = EmbeddedGraph {
            origin,
            rotation,
            positions,
            face_of: Vec::new(),
            face_count: 0,
        };
        g.compute_faces();
        g
    }

    pub fn n_vertices(&self) -> usize {
        self.rotation.len()
    }

    pub fn n_edges(&self) -> usize {
        self.origin.len() / 2
    }

    pub fn n_faces(&self) -> usize {
        self.face_count
    }

    pub fn twin(&self, h: HalfEdge) -> HalfEdge {
        h ^ 1
    }

    pub fn edge_of(&self, h: HalfEdge) -> Edge {
        h / 2
    }

    pub fn origin_of(&self, h: HalfEdge) -> Vertex {
        self.origin[h]
    }

    pub fn head_of(&self, h: HalfEdge) -> Vertex {
        self.origin[h ^ 1]
    }

    pub fn endpoints(&self, e: Edge) -> (Vertex, Vertex) {
        (self.origin[2 * e], self.origin[2 * e + 1])
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.rotation[v].len()
    }

    pub fn rotation_at(&self, v: Vertex) -> &[HalfEdge] {
        &self.rotation[v]
    }

    pub fn position(&self, v: Vertex) -> (f64, f64) {
        self.positions[v]
    }

    pub fn face_of(&self, h: HalfEdge) -> Face {
        self.face_of[h]
    }

    /// Slot of `h` in the rotation at its origin.
    pub fn slot_of(&self, h: HalfEdge) -> usize {
        self.rotation[self.origin[h]]
            .iter()
            .position(|&x| x == h)
            .expect("half-edge missing from its rotation")
    }

    /// Next half-edge along the face to the left of `h`: the rotation
    /// predecessor of the twin at the head vertex.
    pub fn face_next(&self, h: HalfEdge) -> HalfEdge {
        let t = h ^ 1;
        let v = self.origin[t];
        let d = self.rotation[v].len();
        let slot = self.rotation[v].iter().position(|&x| x == t).unwrap();
        self.rotation[v][(slot + d - 1) % d]
    }

    /// The face occupying the sector counterclockwise from `rotation[v][i]`
    /// to its successor.
    pub fn corner_face(&self, v: Vertex, i: usize) -> Face {
        self.face_of[self.rotation[v][i]]
    }

    fn compute_faces(&mut self) {
        let n = self.origin.len();
        self.face_of = vec![usize::MAX; n];
        let mut count = 0;
        for start in 0..n {
            if self.face_of[start] != usize::MAX {
                continue;
            }
            let mut h = start;
            loop {
                self.face_of[h] = count;
                h = self.face_next(h);
                if h == start {
                    break;
                }
            }
            count += 1;
        }
        self.face_count = count;
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n_vertices();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for &h in &self.rotation[v] {
                let w = self.head_of(h);
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        reached == n
    }

    /// `V - E + F`, which must be 2 for any connected sphere embedding.
    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices() as i64 - self.n_edges() as i64 + self.n_faces() as i64
    }

    pub fn check_four_regular(&self) -> Result<(), PlanarError> {
        for v in 0..self.n_vertices() {
            if self.degree(v) != 4 {
                return Err(PlanarError::NotFourRegular(v, self.degree(v)));
            }
        }
        if !self.is_connected() {
            return Err(PlanarError::Disconnected);
        }
        Ok(())
    }
}

/// Sphere-embedded grid graph with `n x n` cells and `(n + 1)^2` vertices.
#[derive(Debug, Clone)]
pub struct GridGraph {
    pub graph: EmbeddedGraph,
    pub n: usize,
    pub outer_face: Face,
}

impl GridGraph {
    pub fn vertex(&self, x: usize, y: usize) -> Vertex {
        y * (self.n + 1) + x
    }

    pub fn coords(&self, v: Vertex) -> (usize, usize) {
        (v % (self.n + 1), v / (self.n + 1))
    }

    /// Edge between two lattice neighbors, if present.
    pub fn edge_between(&self, a: Vertex, b: Vertex) -> Option<Edge> {
        self.graph.rotation_at(a).iter().copied().find_map(|h| {
            if self.graph.head_of(h) == b {
                Some(self.graph.edge_of(h))
            } else {
                None
            }
        })
    }
}

/// Builds the sphere-embedded `n x n` grid graph.
pub fn grid_graph(n: usize) -> Result<GridGraph, PlanarError> {
    if n == 0 {
        return Err(PlanarError::EmptyGrid);
    }
    let side = n + 1;
    let vid = |x: usize, y: usize| y * side + x;
    let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
    // East edge index, then north edge index, of each vertex that has one.
    let mut east = vec![usize::MAX; side * side];
    let mut north = vec![usize::MAX; side * side];
    for y in 0..side {
        for x in 0..side {
            if x + 1 < side {
                east[vid(x, y)] = edges.len();
                edges.push((vid(x, y), vid(x + 1, y)));
            }
            if y + 1 < side {
                north[vid(x, y)] = edges.len();
                edges.push((vid(x, y), vid(x, y + 1)));
            }
        }
    }
    let mut rotation: Vec<Vec<HalfEdge>> = vec![Vec::new(); side * side];
    for y in 0..side {
        for x in 0..side {
            let v = vid(x, y);
            let mut rot = Vec::with_capacity(4);
            // Counterclockwise: east, north, west, south.
            if x + 1 < side {
                rot.push(2 * east[v]);
            }
            if y + 1 < side {
                rot.push(2 * north[v]);
            }
            if x > 0 {
                rot.push(2 * east[vid(x - 1, y)] + 1);
            }
            if y > 0 {
                rot.push(2 * north[vid(x, y - 1)] + 1);
            }
            rotation[v] = rot;
        }
    }
    let positions = (0..side * side)
        .map(|v| ((v % side) as f64, (v / side) as f64))
        .collect();
    let graph = EmbeddedGraph::new(side * side, &edges, rotation, positions);
    // At the (0,0) corner the sector from the north half-edge wrapping back
    // to east is the outer face.
    let north_half = 2 * north[vid(0, 0)];
    let outer_face = graph.face_of(north_half);
    Ok(GridGraph {
        graph,
        n,
        outer_face,
    })
}

/// A 2-regular edge subset of an embedded graph, i.e. a disjoint union of
/// cycles drawn along its edges.
#[derive(Debug, Clone)]
pub struct Drawing {
    pub edges: BTreeSet<Edge>,
}

impl Drawing {
    pub fn new(edges: BTreeSet<Edge>) -> Self {
        Drawing { edges }
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Checks 2-regularity and returns the cycles as edge sets.
    pub fn cycles(&self, g: &EmbeddedGraph) -> Result<Vec<Vec<Edge>>, PlanarError> {
        for v in 0..g.n_vertices() {
            let k = g
                .rotation_at(v)
                .iter()
                .filter(|&&h| self.edges.contains(&g.edge_of(h)))
                .count();
            if k != 0 && k != 2 {
                return Err(PlanarError::NotTwoRegular(v));
            }
        }
        let mut seen: BTreeSet<Edge> = BTreeSet::new();
        let mut cycles = Vec::new();
        for &start in &self.edges {
            if seen.contains(&start) {
                continue;
            }
            let mut cycle = Vec::new();
            // Walk half-edges: enter a vertex, leave on its other drawing end.
            let h0 = 2 * start;
            let mut h = h0;
            loop {
                cycle.push(g.edge_of(h));
                seen.insert(g.edge_of(h));
                let v = g.head_of(h);
                let out = g
                    .rotation_at(v)
                    .iter()
                    .copied()
                    .find(|&o| self.edges.contains(&g.edge_of(o)) && o != g.twin(h))
                    .ok_or(PlanarError::NotTwoRegular(v))?;
                h = out;
                if h == h0 {
                    break;
                }
                if cycle.len() > g.n_edges() {
                    return Err(PlanarError::NotTwoRegular(g.origin_of(h)));
                }
            }
            cycles.push(cycle);
        }
        Ok(cycles)
    }
}

/// Union-find over faces.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
            r
        } else {
            x
        }
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller root for determinism.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}
