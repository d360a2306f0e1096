//! Drawing configurations in grid graphs: a naive nested-rectangles layout,
//! and the chessboard-aligned redraw in a scaled-up grid.

use std::collections::{BTreeMap, BTreeSet};

use super::perturb::build_regions;
use super::{grid_graph, Drawing, Edge, Face, GridGraph, PlanarError};
use crate::ovals::{is_equivalent, OvalConfig};

/// Smallest admissible subdivision scale for [`chessboard_redraw`].
pub const CHESSBOARD_MIN_SCALE: usize = 4;

/// Nesting forest of a drawing, rooted at the region containing the grid's
/// outer face. Oval labels are `c0, c1, ...` indexed by cycle.
pub fn drawing_to_config(
    grid: &GridGraph,
    d: &Drawing,
) -> Result<(OvalConfig, Vec<Vec<Edge>>), PlanarError> {
    if d.is_empty() {
        return Ok((OvalConfig::empty(), Vec::new()));
    }
    let cycles = d.cycles(&grid.graph)?;
    let mut curve_of_edge: Vec<Option<usize>> = vec![None; grid.graph.n_edges()];
    for (c, cyc) in cycles.iter().enumerate() {
        for &e in cyc {
            curve_of_edge[e] = Some(c);
        }
    }
    let (_, config) = build_regions(
        &grid.graph,
        &curve_of_edge,
        cycles.len(),
        &[],
        grid.outer_face,
    )?;
    Ok((config, cycles))
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    x0: usize,
    y0: usize,
    x1: usize,
    y1: usize,
}

/// Draws a configuration as nested axis-aligned rectangles with unit gaps.
/// Returns the grid and the drawing; the drawing realizes `config` exactly
/// (same rooted forest up to labels).
pub fn draw_config(config: &OvalConfig) -> Result<(GridGraph, Drawing), PlanarError> {
    if config.is_empty() {
        let grid = grid_graph(1)?;
        return Ok((grid, Drawing::new(BTreeSet::new())));
    }
    // Re-parse through the text form to get a simple recursive structure.
    let text = config.to_string();
    let parsed = OvalConfig::parse(&text).expect("round-trip");
    let labels: Vec<String> = parsed.labels().map(str::to_owned).collect();
    let children: BTreeMap<String, Vec<String>> = labels
        .iter()
        .map(|l| {
            let kids: Vec<String> = labels
                .iter()
                .filter(|k| {
                    parsed.depth(k).unwrap() == parsed.depth(l).unwrap() + 1
                        && is_ancestor(&parsed, l, k)
                })
                .cloned()
                .collect();
            (l.clone(), kids)
        })
        .collect();
    let roots: Vec<String> = labels
        .iter()
        .filter(|l| parsed.depth(l).unwrap() == 0)
        .cloned()
        .collect();

    // Box size of each oval: children in a row with unit padding and gaps.
    fn size(label: &str, children: &BTreeMap<String, Vec<String>>) -> (usize, usize) {
        let kids = &children[label];
        if kids.is_empty() {
            return (1, 1);
        }
        let mut w = 1;
        let mut h = 0;
        for k in kids {
            let (kw, kh) = size(k, children);
            w += kw + 1;
            h = h.max(kh);
        }
        (w, h + 2)
    }

    fn place(
        label: &str,
        x: usize,
        y: usize,
        children: &BTreeMap<String, Vec<String>>,
        rects: &mut Vec<Rect>,
    ) {
        let (w, h) = size(label, children);
        rects.push(Rect {
            x0: x,
            y0: y,
            x1: x + w,
            y1: y + h,
        });
        let mut cx = x + 1;
        for k in &children[label] {
            let (kw, _) = size(k, children);
            place(k, cx, y + 1, children, rects);
            cx += kw + 1;
        }
    }

    let mut rects = Vec::new();
    let mut cx = 0;
    let mut max_h = 0;
    for r in &roots {
        let (w, h) = size(r, &children);
        place(r, cx, 0, &children, &mut rects);
        cx += w + 1;
        max_h = max_h.max(h);
    }
    let n = (cx - 1).max(max_h);
    let grid = grid_graph(n)?;
    let mut edges = BTreeSet::new();
    for r in &rects {
        for x in r.x0..r.x1 {
            edges.insert(grid.edge_between(grid.vertex(x, r.y0), grid.vertex(x + 1, r.y0)));
            edges.insert(grid.edge_between(grid.vertex(x, r.y1), grid.vertex(x + 1, r.y1)));
        }
        for y in r.y0..r.y1 {
            edges.insert(grid.edge_between(grid.vertex(r.x0, y), grid.vertex(r.x0, y + 1)));
            edges.insert(grid.edge_between(grid.vertex(r.x1, y), grid.vertex(r.x1, y + 1)));
        }
    }
    let edges: BTreeSet<Edge> = edges.into_iter().map(Option::unwrap).collect();
    let drawing = Drawing::new(edges);
    let (got, _) = drawing_to_config(&grid, &drawing)?;
    if !is_equivalent(&got, config) {
        return Err(PlanarError::DrawingMismatch);
    }
    Ok((grid, drawing))
}

fn is_ancestor(cfg: &OvalConfig, anc: &str, node: &str) -> bool {
    // Walk the text structure: node's ancestors are all labels on the path.
    // depth() gives distance to root; check containment by restricting.
    let keep: BTreeSet<String> = [anc.to_owned(), node.to_owned()].into();
    match cfg.restrict(&keep) {
        Ok(sub) => sub.depth(node) == Ok(1) && sub.depth(anc) == Ok(0),
        Err(_) => false,
    }
}

/// Faces of a grid graph indexed by cell coordinates.
pub(crate) struct CellIndex {
    pub face_of_cell: Vec<Face>,
    pub cell_of_face: Vec<Option<(usize, usize)>>,
    n: usize,
}

impl CellIndex {
    pub fn new(grid: &GridGraph) -> Self {
        let n = grid.n;
        let mut face_of_cell = vec![usize::MAX; n * n];
        let mut cell_of_face = vec![None; grid.graph.n_faces()];
        for y in 0..n {
            for x in 0..n {
                // The cell above the east-pointing half-edge at (x, y).
                let e = grid
                    .edge_between(grid.vertex(x, y), grid.vertex(x + 1, y))
                    .unwrap();
                let f = grid.graph.face_of(2 * e);
                face_of_cell[y * n + x] = f;
                cell_of_face[f] = Some((x, y));
            }
        }
        CellIndex {
            face_of_cell,
            cell_of_face,
            n,
        }
    }

    pub fn face(&self, x: usize, y: usize) -> Face {
        self.face_of_cell[y * self.n + x]
    }
}

fn chessboard_black(x: usize, y: usize) -> bool {
    (x + y) % 2 == 0
}

/// Region color of every face: the canonical two-coloring of the drawing's
/// complement with the outer region white. Returns `black[face]`.
fn region_black_of_faces(grid: &GridGraph, d: &Drawing) -> Result<Vec<bool>, PlanarError> {
    let cycles = d.cycles(&grid.graph)?;
    let mut curve_of_edge: Vec<Option<usize>> = vec![None; grid.graph.n_edges()];
    for (c, cyc) in cycles.iter().enumerate() {
        for &e in cyc {
            curve_of_edge[e] = Some(c);
        }
    }
    let (regions, _) = build_regions(
        &grid.graph,
        &curve_of_edge,
        cycles.len(),
        &[],
        grid.outer_face,
    )?;
    let black: Vec<bool> = (0..grid.graph.n_faces())
        .map(|f| regions.depth(regions.region_of_face[f]) % 2 == 1)
        .collect();
    Ok(black)
}

/// Redraws `src_drawing` (realizing `config` in `src_grid`) inside the
/// `scale * n + 2` grid so that along every edge of the result, the black
/// side of the canonical two-coloring is the chessboard-black cell.
pub fn chessboard_redraw(
    config: &OvalConfig,
    src_grid: &GridGraph,
    src_drawing: &Drawing,
    scale: usize,
) -> Result<(GridGraph, Drawing), PlanarError> {
    if scale < CHESSBOARD_MIN_SCALE {
        return Err(PlanarError::ScaleTooSmall(scale));
    }
    let (src_config, _) = drawing_to_config(src_grid, src_drawing)?;
    if !is_equivalent(&src_config, config) {
        return Err(PlanarError::DrawingMismatch);
    }
    let big_n = scale * src_grid.n + 2;
    let big = grid_graph(big_n)?;
    if config.is_empty() {
        return Ok((big, Drawing::new(BTreeSet::new())));
    }

    // Subdivide: src vertex (x, y) lands on (scale*x + 1, scale*y + 1); each
    // unit edge becomes a path of `scale` unit edges.
    let mut sub_edges: BTreeSet<Edge> = BTreeSet::new();
    for &e in &src_drawing.edges {
        let (a, b) = src_grid.graph.endpoints(e);
        let (ax, ay) = src_grid.coords(a);
        let (bx, by) = src_grid.coords(b);
        if ay == by {
            let (x0, x1) = (ax.min(bx), ax.max(bx));
            let yy = scale * ay + 1;
            for i in 0..scale {
                let xx = scale * x0 + 1 + i;
                sub_edges.insert(
                    big.edge_between(big.vertex(xx, yy), big.vertex(xx + 1, yy))
                        .unwrap(),
                );
            }
            debug_assert_eq!(x1, x0 + 1);
        } else {
            let (y0, y1) = (ay.min(by), ay.max(by));
            let xx = scale * ax + 1;
            for i in 0..scale {
                let yy = scale * y0 + 1 + i;
                sub_edges.insert(
                    big.edge_between(big.vertex(xx, yy), big.vertex(xx, yy + 1))
                        .unwrap(),
                );
            }
            debug_assert_eq!(y1, y0 + 1);
        }
    }
    let subdivided = Drawing::new(sub_edges);

    // B0: cells lying in black regions of the subdivided drawing.
    let black_faces = region_black_of_faces(&big, &subdivided)?;
    let cells = CellIndex::new(&big);
    let k = big_n;
    let idx = |x: usize, y: usize| y * k + x;
    let mut b0 = vec![false; k * k];
    for y in 0..k {
        for x in 0..k {
            b0[idx(x, y)] = black_faces[cells.face(x, y)];
        }
    }
    // B1: chessboard-black cells adjacent to B0.
    let neighbors = |x: usize, y: usize| {
        let mut v: Vec<(usize, usize)> = Vec::with_capacity(4);
        if x > 0 {
            v.push((x - 1, y));
        }
        if x + 1 < k {
            v.push((x + 1, y));
        }
        if y > 0 {
            v.push((x, y - 1));
        }
        if y + 1 < k {
            v.push((x, y + 1));
        }
        v
    };
    let mut b1 = vec![false; k * k];
    for y in 0..k {
        for x in 0..k {
            if chessboard_black(x, y) && !b0[idx(x, y)] {
                b1[idx(x, y)] = neighbors(x, y).iter().any(|&(nx, ny)| b0[idx(nx, ny)]);
            }
        }
    }
    // B2: chessboard-white interior cells all of whose neighbors (including
    // the implicit outer side, which is never inside) already belong.
    let mut b2 = vec![false; k * k];
    for y in 1..k.saturating_sub(1) {
        for x in 1..k - 1 {
            if !chessboard_black(x, y) && !b0[idx(x, y)] {
                b2[idx(x, y)] = neighbors(x, y)
                    .iter()
                    .all(|&(nx, ny)| b0[idx(nx, ny)] || b1[idx(nx, ny)]);
            }
        }
    }
    let b: Vec<bool> = (0..k * k).map(|i| b0[i] || b1[i] || b2[i]).collect();

    // The drawing is the boundary of B.
    let mut out = BTreeSet::new();
    for e in 0..big.graph.n_edges() {
        let (a, bb) = big.graph.endpoints(e);
        let (ax, ay) = big.coords(a);
        let (bx, by) = big.coords(bb);
        let (lo_x, lo_y) = (ax.min(bx), ay.min(by));
        let (side1, side2) = if ay == by {
            // Horizontal edge at height lo_y: cells below and above.
            (
                if lo_y > 0 {
                    Some((lo_x, lo_y - 1))
                } else {
                    None
                },
                if lo_y < k { Some((lo_x, lo_y)) } else { None },
            )
        } else {
            (
                if lo_x > 0 {
                    Some((lo_x - 1, lo_y))
                } else {
                    None
                },
                if lo_x < k { Some((lo_x, lo_y)) } else { None },
            )
        };
        let in1 = side1.is_some_and(|(x, y)| b[idx(x, y)]);
        let in2 = side2.is_some_and(|(x, y)| b[idx(x, y)]);
        if in1 != in2 {
            out.insert(e);
        }
    }
    let result = Drawing::new(out);
    let (got, _) = drawing_to_config(&big, &result)?;
    if !is_equivalent(&got, config) {
        return Err(PlanarError::DrawingMismatch);
    }
    Ok((big, result))
}

/// Checks the chessboard alignment postcondition: for every edge of the
/// drawing, the side lying in a black region (canonical coloring, outer
/// white) is the chessboard-black cell.
pub fn chessboard_aligned(grid: &GridGraph, d: &Drawing) -> Result<bool, PlanarError> {
    let black_faces = region_black_of_faces(grid, d)?;
    let cells = CellIndex::new(grid);
    for &e in &d.edges {
        for h in [2 * e, 2 * e + 1] {
            let f = grid.graph.face_of(h);
            if !black_faces[f] {
                continue;
            }
            // The black side must be a finite cell colored chessboard-black.
            match cells.cell_of_face[f] {
                Some((x, y)) => {
                    if !chessboard_black(x, y) {
                        return Ok(false);
                    }
                }
                None => return Ok(false),
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ovals::enumerate_distinct_configs;

    fn cfg(text: &str) -> OvalConfig {
        OvalConfig::parse(text).unwrap()
    }

    #[test]
    fn draw_simple_configs() {
        for text in ["A", "A(B)", "A B", "A(B C) D E", "A(B(C))"] {
            let c = cfg(text);
            let (grid, d) = draw_config(&c).unwrap();
            let (got, cycles) = drawing_to_config(&grid, &d).unwrap();
            assert_eq!(cycles.len(), c.len());
            assert!(is_equivalent(&got, &c), "{text}");
        }
    }

    #[test]
    fn drawing_to_config_empty_and_unit() {
        let grid = grid_graph(1).unwrap();
        let (c, cy) = drawing_to_config(&grid, &Drawing::new(BTreeSet::new())).unwrap();
        assert!(c.is_empty());
        assert!(cy.is_empty());
        let all: BTreeSet<Edge> = (0..grid.graph.n_edges()).collect();
        let (c, cy) = drawing_to_config(&grid, &Drawing::new(all)).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(cy.len(), 1);
    }

    #[test]
    fn figure_one_drawing_yields_figure_one_config() {
        let grid = grid_graph(5).unwrap();
        let mut edges = BTreeSet::new();
        let mut path = |x0: usize, y0: usize, x1: usize, y1: usize| {
            // Axis-aligned segment of unit steps.
            if x0 == x1 {
                for y in y0.min(y1)..y0.max(y1) {
                    edges.insert(
                        grid.edge_between(grid.vertex(x0, y), grid.vertex(x0, y + 1))
                            .unwrap(),
                    );
                }
            } else {
                for x in x0.min(x1)..x0.max(x1) {
                    edges.insert(
                        grid.edge_between(grid.vertex(x, y0), grid.vertex(x + 1, y0))
                            .unwrap(),
                    );
                }
            }
        };
        // The drawing of the five-oval configuration in the 5x5 grid:
        // a 3x5 rectangle containing two unit squares, and two rectangles
        // beside it.
        for (x0, y0, x1, y1) in [
            (0, 0, 3, 0),
            (3, 0, 3, 5),
            (3, 5, 0, 5),
            (0, 5, 0, 0),
            (1, 1, 2, 1),
            (2, 1, 2, 2),
            (2, 2, 1, 2),
            (1, 2, 1, 1),
            (1, 3, 2, 3),
            (2, 3, 2, 4),
            (2, 4, 1, 4),
            (1, 4, 1, 3),
            (4, 0, 5, 0),
            (5, 0, 5, 1),
            (5, 1, 4, 1),
            (4, 1, 4, 0),
            (4, 2, 5, 2),
            (5, 2, 5, 4),
            (5, 4, 4, 4),
            (4, 4, 4, 2),
        ] {
            path(x0, y0, x1, y1);
        }
        let d = Drawing::new(edges);
        let (got, cycles) = drawing_to_config(&grid, &d).unwrap();
        assert_eq!(cycles.len(), 5);
        assert!(is_equivalent(&got, &cfg("A(B C) D E")));
    }

    #[test]
    fn redraw_unit_square() {
        let c = cfg("A");
        let (grid, d) = draw_config(&c).unwrap();
        assert_eq!(grid.n, 1);
        let (big, rd) = chessboard_redraw(&c, &grid, &d, 4).unwrap();
        assert_eq!(big.n, 6);
        assert!(chessboard_aligned(&big, &rd).unwrap());
        let (got, _) = drawing_to_config(&big, &rd).unwrap();
        assert!(is_equivalent(&got, &c));
    }

    #[test]
    fn redraw_scale_too_small() {
        let c = cfg("A");
        let (grid, d) = draw_config(&c).unwrap();
        assert!(matches!(
            chessboard_redraw(&c, &grid, &d, 3),
            Err(PlanarError::ScaleTooSmall(3))
        ));
    }

    #[test]
    fn redraw_empty_config() {
        let c = cfg("");
        let grid = grid_graph(1).unwrap();
        let (_, rd) = chessboard_redraw(&c, &grid, &Drawing::new(BTreeSet::new()), 4).unwrap();
        assert!(rd.is_empty());
    }

    #[test]
    fn redraw_all_configs_up_to_four_ovals() {
        for n in 1..=4 {
            for c in enumerate_distinct_configs(n) {
                let (grid, d) = draw_config(&c).unwrap();
                let (big, rd) = chessboard_redraw(&c, &grid, &d, 4).unwrap();
                assert!(chessboard_aligned(&big, &rd).unwrap(), "misaligned for {c}");
                let (got, _) = drawing_to_config(&big, &rd).unwrap();
                assert!(is_equivalent(&got, &c), "wrong config for {c}");
            }
        }
    }

    #[test]
    fn redrawn_drawings_turn_at_every_vertex() {
        // Alignment forces the drawing to zigzag; choose_pairings relies on
        // this downstream.
        let c = cfg("A(B)");
        let (grid, d) = draw_config(&c).unwrap();
        let (big, rd) = chessboard_redraw(&c, &grid, &d, 4).unwrap();
        for v in 0..big.graph.n_vertices() {
            let ends: Vec<_> = big
                .graph
                .rotation_at(v)
                .iter()
                .filter(|&&h| rd.edges.contains(&big.graph.edge_of(h)))
                .collect();
            if ends.len() == 2 {
                let (px, py) = big.graph.position(v);
                let dir = |h: crate::planar::HalfEdge| {
                    let (qx, qy) = big.graph.position(big.graph.head_of(h));
                    (qx - px, qy - py)
                };
                let (d1, d2) = (dir(*ends[0]), dir(*ends[1]));
                assert!(
                    (d1.0 + d2.0).abs() + (d1.1 + d2.1).abs() > 0.5,
                    "straight pass at vertex {v}"
                );
            }
        }
    }
}
