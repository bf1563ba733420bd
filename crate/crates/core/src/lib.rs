//! Finite approximations of k-direction sets of sets of positive integers.
//!
//! For sets `U_1, ..., U_k` of positive integers the (generalized) direction
//! set is the image of `U_1 x ... x U_k` under `x -> x / |x|`, a subset of the
//! non-negative part of the unit sphere. This crate enumerates truncations of
//! those sets exactly, and provides the diagnostics used to gather evidence
//! about their denseness: epsilon-coverage of probe grids, exact ratio gaps,
//! natural density checkpoints, consecutive-ratio profiles, accumulation-point
//! persistence with closure checks, and 3-term progression search.
//!
//! Module map:
//!
//! * [`geometry`]: points of the sphere octant, `rho`, projections, permutations, probes.
//! * [`arith`]: prime / omega / totient sieves and the `k * f(k)` counting function.
//! * [`intsets`]: declarative integer-set families with enumeration and membership.
//! * [`engine`]: direction-set truncations, the brute-force oracle and witness search.
//! * [`diagnostics`]: density, ratio profiles, coverage, gaps, accumulation, 3-APs.
//! * [`scenarios`]: the reproducible experiment suite behind `dirset reproduce`.

pub mod arith;
pub mod diagnostics;
pub mod engine;
mod error;
pub mod geometry;
pub mod intsets;
mod parallel;
pub mod poly;
pub mod report;
pub mod scenarios;

pub use error::{Error, Result};
