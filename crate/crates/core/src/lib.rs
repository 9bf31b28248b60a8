//! Noncommutative Fourier analysis on finite groups.
//!
//! The crate builds finite groups from Cayley tables, computes their unitary
//! duals numerically, and provides the Fourier transform together with the
//! family of Fourier-algebra norms, the twisted convolution maps `Γ` and `Γ̌`
//! with their adjoints, and solvers for completely bounded norms of
//! elementary operators and for quotient norms through `A(G×G)`.
//!
//! ```
//! use ncfourier::{group::FiniteGroup, rep::compute_dual, fourier};
//!
//! let g = FiniteGroup::symmetric(3).unwrap();
//! let dual = compute_dual(&g, 0).unwrap();
//! let dims: Vec<usize> = dual.irreps().iter().map(|p| p.dim).collect();
//! assert_eq!(dims, vec![1, 1, 2]);
//!
//! let chi = fourier::ScalarFunction::character(&dual.irreps()[2]);
//! assert!((fourier::norm_a(&dual, &chi) - 2.0).abs() < 1e-10);
//! ```

pub mod cli;
pub mod convolution;
pub mod error;
pub mod fourier;
pub mod group;
pub mod linalg;
pub mod normcalc;
pub mod rep;
pub mod serial;
pub mod verify;

pub use error::{Error, Result};
