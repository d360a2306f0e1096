//! Core library for building Laplacian eigenfunctions on the sphere whose
//! nodal sets realize a prescribed configuration of disjoint ovals, together
//! with the supporting combinatorial and numerical machinery: nesting
//! forests of ovals, planar combinatorial maps with their perturbation
//! calculus, spherical harmonics and their globe graphs, blueprints
//! (level-set quotients of surfaces) with an exact feasibility solver,
//! pointwise metric reconstruction on latitude-longitude grids, and the
//! simple-block decomposition of the sphere.

pub mod blocks;
pub mod blueprint;
pub mod harmonics;
pub mod metric;
pub mod ovals;
pub mod planar;
