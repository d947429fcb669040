//! Greedy sparse recovery and subset selection built on an updatable QR
//! factorization.
//!
//! The central algorithm is Backward Regression: start from every atom of a
//! full-column-rank dictionary and repeatedly delete the atom whose removal
//! increases the least-squares residual the least. [`greedy`] implements it
//! together with LACE (magnitude pruning), Forward Regression and OMP;
//! [`two_stage`] holds Stepwise Regression with Replacement (SRR), Subspace
//! Pursuit and OMPR; [`certs`] computes recovery certificates; [`synth`] and
//! [`bench`] generate problems and run recovery experiments.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below name the double-precision instantiations.

// `!(x > 0)` is used on purpose so that NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod certs;
pub mod error;
pub mod greedy;
pub mod linalg;
pub mod model;
pub mod scalar;
pub mod synth;
pub mod textio;
pub mod two_stage;

pub use error::{Error, Result};
pub use linalg::{Matrix, UpdatableQR};
pub use model::{ActiveSet, Certificate, Dictionary, RecoveryOutcome, SparseSignal};
pub use scalar::Real;

pub type Matrix64 = Matrix<f64>;
pub type Dictionary64 = Dictionary<f64>;
pub type UpdatableQR64 = UpdatableQR<f64>;
pub type RecoveryOutcome64 = RecoveryOutcome<f64>;
pub type SparseSignal64 = SparseSignal<f64>;
pub type Instance64 = synth::Instance<f64>;

pub type Matrix32 = Matrix<f32>;
pub type Dictionary32 = Dictionary<f32>;
pub type UpdatableQR32 = UpdatableQR<f32>;
