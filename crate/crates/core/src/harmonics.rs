//! Spherical harmonics of the form `sin^m(theta) * F(cos theta) * sin(m phi)`
//! with `F = d^m P_n / dx^m`, their zero sets as embedded globe graphs, and
//! pole resolution into 4-regular maps.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::planar::{EmbeddedGraph, GlobeLattice, Vertex};

#[derive(Debug, Error, PartialEq)]
pub enum HarmonicsError {
    #[error("argument {0} outside [-1, 1]")]
    OutOfDomain(f64),
    #[error("order must satisfy 1 <= m <= n, got n={n} m={m}")]
    BadIndex { n: usize, m: usize },
    #[error("degree n = m = {0} leaves no latitude circles")]
    NoLatitudeCircles(usize),
    #[error("expected {expected} roots, isolated {found}")]
    RootCount { expected: usize, found: usize },
    #[error("poles already resolved")]
    NoPolesRemain,
}

/// Index of the harmonic `Y_n^m`; the normalization constant is fixed to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct HarmonicIndex {
    pub n: usize,
    pub m: usize,
}

impl HarmonicIndex {
    pub fn new(n: usize, m: usize) -> Result<Self, HarmonicsError> {
        if m < 1 || m > n {
            return Err(HarmonicsError::BadIndex { n, m });
        }
        Ok(HarmonicIndex { n, m })
    }
}

/// Eigenvalue of the minus Laplacian on the round sphere for degree `n`.
pub fn eigenvalue(n: usize) -> f64 {
    (n * (n + 1)) as f64
}

/// Legendre polynomial `P_n(x)` by the three-term recurrence.
pub fn legendre_p(n: usize, x: f64) -> Result<f64, HarmonicsError> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(HarmonicsError::OutOfDomain(x));
    }
    Ok(legendre_derivatives(n, 0, x)[0])
}

/// Values `P_n^{(j)}(x)` for `j = 0..=jmax`, from the differentiated
/// three-term recurrence
/// `(k+1) P_{k+1}^{(j)} = (2k+1)(x P_k^{(j)} + j P_k^{(j-1)}) - k P_{k-1}^{(j)}`.
pub fn legendre_derivatives(n: usize, jmax: usize, x: f64) -> Vec<f64> {
    let w = jmax + 1;
    let mut prev = vec![0.0; w]; // P_{k-1}
    let mut cur = vec![0.0; w]; // P_k
    prev[0] = 1.0;
    if n == 0 {
        return prev;
    }
    cur[0] = x;
    if w > 1 {
        cur[1] = 1.0;
    }
    for k in 1..n {
        let mut next = vec![0.0; w];
        for j in 0..w {
            let lower = if j > 0 { j as f64 * cur[j - 1] } else { 0.0 };
            next[j] =
                ((2 * k + 1) as f64 * (x * cur[j] + lower) - k as f64 * prev[j]) / (k + 1) as f64;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// `d^m P_n / dx^m` at `x`.
pub fn legendre_derivative(n: usize, m: usize, x: f64) -> f64 {
    legendre_derivatives(n, m, x)[m]
}

/// The `n - m` roots of `d^m P_n / dx^m` in (-1, 1), ascending. Roots are
/// isolated by sign changes over a Chebyshev point scan and then bisected.
pub fn f_nm_roots(n: usize, m: usize) -> Result<Vec<f64>, HarmonicsError> {
    if m > n || m < 1 {
        return Err(HarmonicsError::BadIndex { n, m });
    }
    let expected = n - m;
    if expected == 0 {
        return Ok(Vec::new());
    }
    let f = |x: f64| legendre_derivative(n, m, x);
    let scan = 8 * (n + 1);
    let xs: Vec<f64> = (0..=scan)
        .map(|i| -(std::f64::consts::PI * i as f64 / scan as f64).cos())
        .collect();
    let mut roots = Vec::new();
    for w in xs.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let mut fa = f(a);
        let fb = f(b);
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fa.signum() * fb.signum() >= 0.0 {
            continue;
        }
        while b - a > 1e-13 {
            let mid = 0.5 * (a + b);
            let fm = f(mid);
            if fm == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if fa.signum() * fm.signum() < 0.0 {
                b = mid;
            } else {
                a = mid;
                fa = fm;
            }
        }
        roots.push(0.5 * (a + b));
    }
    if roots.len() != expected {
        return Err(HarmonicsError::RootCount {
            expected,
            found: roots.len(),
        });
    }
    Ok(roots)
}

/// `Y_n^m(theta, phi) = sin^m(theta) F_n^m(cos theta) sin(m phi)` with
/// `F_n^m = d^m P_n / dx^m`.
pub fn eval_ynm(idx: HarmonicIndex, theta: f64, phi: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    s.powi(idx.m as i32) * legendre_derivative(idx.n, idx.m, c) * (idx.m as f64 * phi).sin()
}

/// Gradient of `Y_n^m` in coordinate components `(d/dtheta, d/dphi)`.
pub fn ynm_gradient(idx: HarmonicIndex, theta: f64, phi: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    let m = idx.m;
    let table = legendre_derivatives(idx.n, m + 1, c);
    let (f, fp) = (table[m], table[m + 1]);
    let sm1 = s.powi(m as i32 - 1);
    let sm = sm1 * s;
    let ang = (m as f64 * phi).sin();
    let dtheta = (m as f64 * sm1 * c * f - sm * s * fp) * ang;
    let dphi = m as f64 * sm * f * (m as f64 * phi).cos();
    (dtheta, dphi)
}

/// The zero set of `Y_n^m` as an embedded graph: `n - m` latitude circles
/// crossed by `2m` meridian arcs, plus the two poles (until resolved).
/// Vertex positions store `(phi, theta)`.
#[derive(Debug, Clone)]
pub struct GlobeGraph {
    pub graph: EmbeddedGraph,
    pub idx: HarmonicIndex,
    /// Colatitudes of the latitude rows, ascending (row 0 nearest north).
    pub theta: Vec<f64>,
    pub cols: usize,
    /// North and south pole vertices; `None` once resolved.
    pub poles: Option<(Vertex, Vertex)>,
    /// Lattice index of the crossings, populated by pole resolution.
    pub lattice: Option<GlobeLattice>,
}

impl GlobeGraph {
    pub fn rows(&self) -> usize {
        self.theta.len()
    }

    pub fn crossing(&self, row: usize, col: usize) -> Vertex {
        row * self.cols + col % self.cols
    }

    pub fn phi(&self, col: usize) -> f64 {
        2.0 * std::f64::consts::PI * (col % self.cols) as f64 / self.cols as f64
    }
}

/// Builds the globe graph of `Y_n^m`; requires `n > m` so that at least one
/// latitude circle exists.
pub fn globe_graph(idx: HarmonicIndex) -> Result<GlobeGraph, HarmonicsError> {
    let (n, m) = (idx.n, idx.m);
    if n == m {
        return Err(HarmonicsError::NoLatitudeCircles(n));
    }
    let roots = f_nm_roots(n, m)?;
    // x = cos(theta) descending <-> theta ascending.
    let theta: Vec<f64> = roots.iter().rev().map(|x| x.acos()).collect();
    let rows = theta.len();
    let cols = 2 * m;
    let north = rows * cols;
    let south = rows * cols + 1;

    let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
    let mut lat = vec![usize::MAX; rows * cols];
    for r in 0..rows {
        for k in 0..cols {
            lat[r * cols + k] = edges.len();
            edges.push((r * cols + k, r * cols + (k + 1) % cols));
        }
    }
    // Meridian segments per column, oriented southward; segment r of column k
    // (index r * cols + k) ends at row r, the last one at the south pole.
    let mut mer = vec![usize::MAX; (rows + 1) * cols];
    for k in 0..cols {
        mer[k] = edges.len();
        edges.push((north, k));
        for r in 0..rows - 1 {
            mer[(r + 1) * cols + k] = edges.len();
            edges.push((r * cols + k, (r + 1) * cols + k));
        }
        mer[rows * cols + k] = edges.len();
        edges.push(((rows - 1) * cols + k, south));
    }

    let mut rotation: Vec<Vec<usize>> = vec![Vec::new(); rows * cols + 2];
    for r in 0..rows {
        for k in 0..cols {
            let east = 2 * lat[r * cols + k];
            let west = 2 * lat[r * cols + (k + cols - 1) % cols] + 1;
            let north_h = 2 * mer[r * cols + k] + 1;
            let south_h = 2 * mer[(r + 1) * cols + k];
            rotation[r * cols + k] = vec![east, north_h, west, south_h];
        }
    }
    // North pole: counterclockwise from outside = increasing phi.
    rotation[north] = (0..cols).map(|k| 2 * mer[k]).collect();
    // South pole: counterclockwise from outside = decreasing phi.
    rotation[south] = std::iter::once(0)
        .chain((1..cols).rev())
        .map(|k| 2 * mer[rows * cols + k] + 1)
        .collect();

    let two_pi = 2.0 * std::f64::consts::PI;
    let mut positions: Vec<(f64, f64)> = Vec::new();
    for r in 0..rows {
        for k in 0..cols {
            positions.push((two_pi * k as f64 / cols as f64, theta[r]));
        }
    }
    positions.push((0.0, 0.0));
    positions.push((0.0, std::f64::consts::PI));

    let graph = EmbeddedGraph::new(rows * cols + 2, &edges, rotation, positions);
    Ok(GlobeGraph {
        graph,
        idx,
        theta,
        cols,
        poles: Some((north, south)),
        lattice: None,
    })
}

/// Removes both poles, joining the meridian ends around each pole pairwise in
/// cyclic order starting from the arc at `phi = 0+`; the result is 4-regular.
pub fn resolve_poles(globe: &GlobeGraph) -> Result<GlobeGraph, HarmonicsError> {
    if globe.poles.is_none() {
        return Err(HarmonicsError::NoPolesRemain);
    }
    let rows = globe.rows();
    let cols = globe.cols;
    let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
    let mut lat = vec![usize::MAX; rows * cols];
    for r in 0..rows {
        for k in 0..cols {
            lat[r * cols + k] = edges.len();
            edges.push((r * cols + k, r * cols + (k + 1) % cols));
        }
    }
    // Interior meridian segments between rows r and r + 1.
    let mut mer = vec![usize::MAX; rows.saturating_sub(1) * cols];
    for k in 0..cols {
        for r in 0..rows.saturating_sub(1) {
            mer[r * cols + k] = edges.len();
            edges.push((r * cols + k, (r + 1) * cols + k));
        }
    }
    // Polar joins: columns (2t, 2t+1) at each pole.
    let mut pole_arc_edges = BTreeSet::new();
    let mut north_arc = vec![usize::MAX; cols];
    let mut south_arc = vec![usize::MAX; cols];
    for t in 0..cols / 2 {
        let (a, b) = (2 * t, 2 * t + 1);
        north_arc[a] = edges.len();
        north_arc[b] = edges.len();
        pole_arc_edges.insert(edges.len());
        edges.push((a, b));
        south_arc[a] = edges.len();
        south_arc[b] = edges.len();
        pole_arc_edges.insert(edges.len());
        edges.push(((rows - 1) * cols + a, (rows - 1) * cols + b));
    }

    let mut rotation: Vec<Vec<usize>> = vec![Vec::new(); rows * cols];
    for r in 0..rows {
        for k in 0..cols {
            let east = 2 * lat[r * cols + k];
            let west = 2 * lat[r * cols + (k + cols - 1) % cols] + 1;
            let north_h = if r == 0 {
                // Join edges were stored (even column, odd column).
                2 * north_arc[k] + (k % 2)
            } else {
                2 * mer[(r - 1) * cols + k] + 1
            };
            let south_h = if r == rows - 1 {
                2 * south_arc[k] + (k % 2)
            } else {
                2 * mer[r * cols + k]
            };
            rotation[r * cols + k] = vec![east, north_h, west, south_h];
        }
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let positions: Vec<(f64, f64)> = (0..rows * cols)
        .map(|v| {
            (
                two_pi * (v % cols) as f64 / cols as f64,
                globe.theta[v / cols],
            )
        })
        .collect();
    let graph = EmbeddedGraph::new(rows * cols, &edges, rotation, positions);
    let lattice = GlobeLattice::new(rows, cols, (0..rows * cols).collect(), pole_arc_edges);
    Ok(GlobeGraph {
        graph,
        idx: globe.idx,
        theta: globe.theta.clone(),
        cols,
        poles: None,
        lattice: Some(lattice),
    })
}

/// Geometric arc of an edge of a resolved globe graph as `(theta, phi)`
/// samples. Polar joins detour around the pole at half the colatitude margin.
pub fn edge_polyline(globe: &GlobeGraph, e: usize, samples: usize) -> Vec<(f64, f64)> {
    let g = &globe.graph;
    let (a, b) = g.endpoints(e);
    let (phi_a, th_a) = g.position(a);
    let (phi_b, th_b) = g.position(b);
    let k = samples.max(2);
    let lerp = |t: f64, x: f64, y: f64| x + t * (y - x);
    let is_pole_arc = globe
        .lattice
        .as_ref()
        .is_some_and(|l| l.pole_arc_edges.contains(&e));
    if is_pole_arc {
        let north = th_a < std::f64::consts::FRAC_PI_2;
        let detour = if north {
            0.5 * th_a
        } else {
            std::f64::consts::PI - 0.5 * (std::f64::consts::PI - th_a)
        };
        let mut pts = Vec::new();
        let third = k / 3 + 1;
        for i in 0..=third {
            pts.push((lerp(i as f64 / third as f64, th_a, detour), phi_a));
        }
        for i in 1..=third {
            pts.push((detour, lerp(i as f64 / third as f64, phi_a, phi_b)));
        }
        for i in 1..=third {
            pts.push((lerp(i as f64 / third as f64, detour, th_b), phi_b));
        }
        pts
    } else if (th_a - th_b).abs() < 1e-12 {
        // Latitude arc, eastward with wraparound.
        let mut dphi = phi_b - phi_a;
        if dphi <= 0.0 {
            dphi += 2.0 * std::f64::consts::PI;
        }
        (0..=k)
            .map(|i| (th_a, phi_a + dphi * i as f64 / k as f64))
            .collect()
    } else {
        (0..=k)
            .map(|i| (lerp(i as f64 / k as f64, th_a, th_b), phi_a))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_basics() {
        for x in [-1.0, -0.3, 0.0, 0.5, 1.0] {
            assert_eq!(legendre_p(0, x).unwrap(), 1.0);
        }
        // P3(x) = (5x^3 - 3x)/2.
        let p3 = legendre_p(3, 0.5).unwrap();
        assert!((p3 - (-0.4375)).abs() < 1e-14, "{p3}");
        for n in 0..=20 {
            assert!((legendre_p(n, 1.0).unwrap() - 1.0).abs() < 1e-10, "n={n}");
        }
        assert!(legendre_p(2, 1.5).is_err());
    }

    #[test]
    fn legendre_derivative_closed_forms() {
        // dP2/dx = 3x, dP3/dx = (15x^2 - 3)/2, d2P3/dx2 = 15x.
        for x in [-0.9, -0.2, 0.0, 0.4, 0.8] {
            assert!((legendre_derivative(2, 1, x) - 3.0 * x).abs() < 1e-12);
            assert!((legendre_derivative(3, 1, x) - (15.0 * x * x - 3.0) / 2.0).abs() < 1e-12);
            assert!((legendre_derivative(3, 2, x) - 15.0 * x).abs() < 1e-12);
        }
    }

    #[test]
    fn root_examples() {
        let r = f_nm_roots(2, 1).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].abs() < 1e-13);

        let r = f_nm_roots(3, 1).unwrap();
        assert_eq!(r.len(), 2);
        let expect = (1.0f64 / 5.0).sqrt();
        assert!((r[0] + expect).abs() < 1e-12);
        assert!((r[1] - expect).abs() < 1e-12);

        assert!(f_nm_roots(4, 4).unwrap().is_empty());
        assert!(f_nm_roots(2, 3).is_err());
    }

    #[test]
    fn root_counts_up_to_fifteen() {
        for n in 1..=15usize {
            for m in 1..=n {
                let r = f_nm_roots(n, m).unwrap();
                assert_eq!(r.len(), n - m, "n={n} m={m}");
                for w in r.windows(2) {
                    assert!(w[0] < w[1]);
                }
                for &x in &r {
                    // The polynomial's scale grows fast with n; check the
                    // root by sign bracketing instead of a raw residual.
                    let lo = legendre_derivative(n, m, x - 5e-13);
                    let hi = legendre_derivative(n, m, x + 5e-13);
                    assert!(lo * hi <= 0.0, "n={n} m={m} x={x}");
                }
            }
        }
    }

    #[test]
    fn ynm_values() {
        let idx = HarmonicIndex::new(3, 2).unwrap();
        for phi in [0.1, 1.2, 4.0] {
            assert_eq!(eval_ynm(idx, 0.0, phi), 0.0);
        }
        // (1,1) is sin(theta) sin(phi) exactly (P_1' = 1).
        let idx = HarmonicIndex::new(1, 1).unwrap();
        for (t, p) in [(0.3, 0.7), (1.1, 2.0), (2.4, 5.5)] {
            let got = eval_ynm(idx, t, p);
            assert!((got - t.sin() * p.sin()).abs() < 1e-14);
        }
        // (2,1) vanishes on the equator.
        let idx = HarmonicIndex::new(2, 1).unwrap();
        assert!(eval_ynm(idx, std::f64::consts::FRAC_PI_2, 0.9).abs() < 1e-14);
    }

    #[test]
    fn eigenvalues() {
        assert_eq!(eigenvalue(0), 0.0);
        assert_eq!(eigenvalue(3), 12.0);
        assert_eq!(eigenvalue(10), 110.0);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let idx = HarmonicIndex::new(5, 2).unwrap();
        let h = 1e-6;
        for (t, p) in [(0.4, 0.3), (1.3, 2.2), (2.0, 4.4)] {
            let (gt, gp) = ynm_gradient(idx, t, p);
            let fd_t = (eval_ynm(idx, t + h, p) - eval_ynm(idx, t - h, p)) / (2.0 * h);
            let fd_p = (eval_ynm(idx, t, p + h) - eval_ynm(idx, t, p - h)) / (2.0 * h);
            assert!((gt - fd_t).abs() < 1e-5 * (1.0 + gt.abs()), "{gt} vs {fd_t}");
            assert!((gp - fd_p).abs() < 1e-5 * (1.0 + gp.abs()), "{gp} vs {fd_p}");
        }
    }

    #[test]
    fn globe_structure() {
        let g = globe_graph(HarmonicIndex::new(2, 1).unwrap()).unwrap();
        assert_eq!(g.rows(), 1);
        assert_eq!(g.cols, 2);
        assert_eq!(g.graph.n_vertices(), 4); // 2 crossings + 2 poles
        assert_eq!(g.graph.euler_characteristic(), 2);

        let g = globe_graph(HarmonicIndex::new(4, 2).unwrap()).unwrap();
        assert_eq!(g.rows(), 2);
        assert_eq!(g.cols, 4);
        assert_eq!(g.graph.n_vertices(), 10);
        assert_eq!(g.graph.euler_characteristic(), 2);

        let g = globe_graph(HarmonicIndex::new(6, 3).unwrap()).unwrap();
        assert_eq!(g.rows() * g.cols, 18);
        assert_eq!(g.graph.euler_characteristic(), 2);

        assert!(matches!(
            globe_graph(HarmonicIndex::new(3, 3).unwrap()),
            Err(HarmonicsError::NoLatitudeCircles(3))
        ));
    }

    #[test]
    fn globe_vertices_lie_on_the_zero_set() {
        for (n, m) in [(2, 1), (4, 2), (6, 3), (7, 2)] {
            let idx = HarmonicIndex::new(n, m).unwrap();
            let g = globe_graph(idx).unwrap();
            for v in 0..g.graph.n_vertices() {
                let (phi, theta) = g.graph.position(v);
                assert!(
                    eval_ynm(idx, theta, phi).abs() < 1e-12,
                    "({n},{m}) vertex {v}"
                );
            }
        }
    }

    #[test]
    fn pole_resolution() {
        let g = globe_graph(HarmonicIndex::new(4, 2).unwrap()).unwrap();
        let r = resolve_poles(&g).unwrap();
        assert_eq!(r.graph.n_vertices(), 8);
        r.graph.check_four_regular().unwrap();
        assert_eq!(r.graph.euler_characteristic(), 2);
        assert!(matches!(
            resolve_poles(&r),
            Err(HarmonicsError::NoPolesRemain)
        ));

        let g = globe_graph(HarmonicIndex::new(2, 1).unwrap()).unwrap();
        let r = resolve_poles(&g).unwrap();
        r.graph.check_four_regular().unwrap();
        assert_eq!(r.graph.n_vertices(), 2);
        assert_eq!(r.graph.n_edges(), 4);
        assert_eq!(r.graph.euler_characteristic(), 2);
    }

    #[test]
    fn resolved_globe_hosts_grid_windows() {
        use crate::planar::embed_grid_in_globe;
        // A 1x1 grid fits in globe(4,2) on the pole rows; the polar joins
        // run outside the window disk.
        let g = resolve_poles(&globe_graph(HarmonicIndex::new(4, 2).unwrap()).unwrap()).unwrap();
        embed_grid_in_globe(1, &g.graph, g.lattice.as_ref().unwrap()).unwrap();
        // 2x2 into globe(8,4).
        let g = resolve_poles(&globe_graph(HarmonicIndex::new(8, 4).unwrap()).unwrap()).unwrap();
        embed_grid_in_globe(2, &g.graph, g.lattice.as_ref().unwrap()).unwrap();
        // Pigeonhole: a k x k grid needs k + 1 latitude circles.
        let g = resolve_poles(&globe_graph(HarmonicIndex::new(5, 2).unwrap()).unwrap()).unwrap();
        assert!(matches!(
            embed_grid_in_globe(3, &g.graph, g.lattice.as_ref().unwrap()),
            Err(crate::planar::PlanarError::GlobeTooSmall { .. })
        ));
    }

    #[test]
    fn perturbing_the_globe_after_single_oval_drawing() {
        use crate::planar::{choose_pairings_containing, perturb, Drawing};
        // A single cell of the 1x1 window in globe(4,2): its perturbation
        // nicely contains one oval.
        let g = resolve_poles(&globe_graph(HarmonicIndex::new(4, 2).unwrap()).unwrap()).unwrap();
        let lat = g.lattice.as_ref().unwrap();
        let w = crate::planar::embed_grid_in_globe(1, &g.graph, lat).unwrap();
        let grid = crate::planar::grid_graph(1).unwrap();
        let all: std::collections::BTreeSet<usize> = (0..grid.graph.n_edges()).collect();
        let d = w
            .transfer_drawing(&grid, &g.graph, &Drawing::new(all))
            .unwrap();
        let p = choose_pairings_containing(&g.graph, &d).unwrap();
        let sys = perturb(&g.graph, &p, 0).unwrap();
        // The drawn cell survives as a curve.
        let dset: std::collections::BTreeSet<usize> = d.edges.clone();
        let target: Vec<usize> = (0..sys.n_curves())
            .filter(|&c| sys.curves[c].iter().any(|e| dset.contains(e)))
            .collect();
        assert_eq!(target.len(), 1);
        let tset: std::collections::BTreeSet<usize> =
            sys.curves[target[0]].iter().copied().collect();
        assert_eq!(tset, dset);
    }
}
