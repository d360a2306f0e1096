//! Embedding grid graphs into pole-resolved globe graphs as induced
//! subgraphs, and choosing pairings that keep a drawing together.

use std::collections::BTreeSet;

use super::{Drawing, Edge, EmbeddedGraph, GridGraph, PairingAssignment, PlanarError, Vertex};

/// Lattice structure of a pole-resolved globe graph: `rows` latitude circles
/// crossed by `cols` meridian arcs. Row 0 is nearest the north pole. Edges
/// created by joining meridian ends over a pole are listed separately; they
/// run outside the lattice window and are tolerated by the embedding check.
#[derive(Debug, Clone)]
pub struct GlobeLattice {
    pub rows: usize,
    pub cols: usize,
    vertex: Vec<Vertex>,
    pub pole_arc_edges: BTreeSet<Edge>,
}

impl GlobeLattice {
    pub fn new(
        rows: usize,
        cols: usize,
        vertex: Vec<Vertex>,
        pole_arc_edges: BTreeSet<Edge>,
    ) -> Self {
        debug_assert_eq!(vertex.len(), rows * cols);
        GlobeLattice {
            rows,
            cols,
            vertex,
            pole_arc_edges,
        }
    }

    pub fn vertex(&self, row: usize, col: usize) -> Vertex {
        self.vertex[row * self.cols + col % self.cols]
    }
}

/// A grid window inside a globe graph: grid vertex `(x, y)` maps to lattice
/// position `(row0 + y, (col0 + x) mod cols)`.
#[derive(Debug, Clone)]
pub struct GridWindow {
    pub grid_n: usize,
    pub row0: usize,
    pub col0: usize,
    vertex_map: Vec<Vertex>,
}

impl GridWindow {
    pub fn vertex(&self, x: usize, y: usize) -> Vertex {
        self.vertex_map[y * (self.grid_n + 1) + x]
    }

    /// Transfers a drawing from the grid into the host graph.
    pub fn transfer_drawing(
        &self,
        grid: &GridGraph,
        host: &EmbeddedGraph,
        d: &Drawing,
    ) -> Result<Drawing, PlanarError> {
        let mut edges = BTreeSet::new();
        for &e in &d.edges {
            let (a, b) = grid.graph.endpoints(e);
            let (ax, ay) = grid.coords(a);
            let (bx, by) = grid.coords(b);
            let va = self.vertex(ax, ay);
            let vb = self.vertex(bx, by);
            let he = host
                .rotation_at(va)
                .iter()
                .copied()
                .find(|&h| host.head_of(h) == vb)
                .ok_or(PlanarError::BadDrawingEdge((
                    ax as i64, ay as i64, bx as i64, by as i64,
                )))?;
            edges.insert(host.edge_of(he));
        }
        Ok(Drawing::new(edges))
    }
}

/// Finds a `(k+1) x (k+1)` vertex window realizing the `k x k` grid graph as
/// an induced subgraph of the pole-resolved globe graph, up to polar joins:
/// edges joined over a pole run outside the window disk and are tolerated.
/// Windows away from the first and last latitude rows are preferred.
pub fn embed_grid_in_globe(
    k: usize,
    g: &EmbeddedGraph,
    lattice: &GlobeLattice,
) -> Result<GridWindow, PlanarError> {
    let need = k + 1;
    if lattice.rows < need || lattice.cols < need + 1 {
        return Err(PlanarError::GlobeTooSmall {
            need_rows: need,
            need_cols: need + 1,
            have_rows: lattice.rows,
            have_cols: lattice.cols,
        });
    }
    let mut candidates: Vec<(usize, usize)> = Vec::new();
    let interior_rows = lattice.rows >= need + 2;
    let row_range: Vec<usize> = if interior_rows {
        (1..=lattice.rows - need - 1).collect()
    } else {
        (0..=lattice.rows - need).collect()
    };
    for &a in &row_range {
        for b in 0..lattice.cols {
            candidates.push((a, b));
        }
    }
    if interior_rows {
        // Fall back to pole-touching windows after the interior ones.
        for a in 0..=lattice.rows - need {
            if !row_range.contains(&a) {
                for b in 0..lattice.cols {
                    candidates.push((a, b));
                }
            }
        }
    }

    'cand: for (a, b) in candidates {
        let mut window = vec![0; need * need];
        let mut inside = vec![false; g.n_vertices()];
        for y in 0..need {
            for x in 0..need {
                let v = lattice.vertex(a + y, b + x);
                window[y * need + x] = v;
                inside[v] = true;
            }
        }
        // Each window vertex must see exactly its lattice neighbors among the
        // window, up to pole arcs (tolerated only when leaving the window).
        for y in 0..need {
            for x in 0..need {
                let v = window[y * need + x];
                let mut expected: BTreeSet<Vertex> = BTreeSet::new();
                if x > 0 {
                    expected.insert(window[y * need + x - 1]);
                }
                if x + 1 < need {
                    expected.insert(window[y * need + x + 1]);
                }
                if y > 0 {
                    expected.insert(window[(y - 1) * need + x]);
                }
                if y + 1 < need {
                    expected.insert(window[(y + 1) * need + x]);
                }
                let mut found: BTreeSet<Vertex> = BTreeSet::new();
                for &h in g.rotation_at(v) {
                    let w = g.head_of(h);
                    if !inside[w] {
                        continue;
                    }
                    if lattice.pole_arc_edges.contains(&g.edge_of(h)) {
                        // Polar joins run outside the window disk; they do
                        // not interfere with a drawing inside it.
                        continue;
                    }
                    found.insert(w);
                }
                if found != expected {
                    continue 'cand;
                }
            }
        }
        return Ok(GridWindow {
            grid_n: k,
            row0: a,
            col0: b,
            vertex_map: window,
        });
    }
    Err(PlanarError::NoInducedWindow)
}

/// Chooses a pairing assignment whose perturbation keeps the drawing's edges
/// joined at every vertex the drawing passes through; all other vertices get
/// pairing 0. Errors if the drawing runs straight through a vertex (its two
/// ends on opposite rotation slots), which no pairing can keep together.
pub fn choose_pairings_containing(
    g: &EmbeddedGraph,
    d: &Drawing,
) -> Result<PairingAssignment, PlanarError> {
    g.check_four_regular()?;
    d.cycles(g)?;
    let mut pairing = PairingAssignment::all_zero(g.n_vertices());
    for v in 0..g.n_vertices() {
        let slots: Vec<usize> = (0..4)
            .filter(|&i| d.edges.contains(&g.edge_of(g.rotation_at(v)[i])))
            .collect();
        match slots.len() {
            0 => {}
            2 => {
                let (s1, s2) = (slots[0], slots[1]);
                if (s1 + 2) % 4 == s2 {
                    return Err(PlanarError::StraightPass(v));
                }
                // Joined pairs are (s, s+1): even s means pairing 0.
                let s = if (s1 + 1) % 4 == s2 { s1 } else { s2 };
                pairing.set(v, (s % 2) as u8);
            }
            _ => return Err(PlanarError::NotTwoRegular(v)),
        }
    }
    Ok(pairing)
}
