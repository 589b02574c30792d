//! Generalized-inverse based decoding over prime fields.
//!
//! A matrix `X` is a generalized inverse (GI) of `A` when `A·X·A = A`. For a
//! full-row-rank `A` brought into the shape `P·A·Q = [V I_r]`, every GI is
//! `X = Q·[X1; I_r - V·X1]·P`, and `{X·b}` sweeps the whole solution set of
//! `A·x = b`. The crate builds on that parameterization:
//!
//! - [`field`], [`matrix`]: F_q arithmetic, bit-packed F_2 vectors, Gaussian
//!   elimination into canonical block forms.
//! - [`geninv`]: construction, enumeration and steering of GIs.
//! - [`solvers`]: Prange, Lee-Brickell, Leon, Stern, Finiasz-Sendrier,
//!   multi-block and random-GI search for syndrome decoding and low-weight
//!   codewords.
//! - [`minsat`]: reduction of binary minimum-weight problems to MIN-SAT over
//!   XOR constraints.
//! - [`oracle`]: brute-force ground truth and Gilbert-Varshamov thresholds.
//! - [`instance`], [`experiment`]: file formats, instance generation and the
//!   easy-weight coverage experiment.

pub mod error;
pub mod experiment;
pub mod field;
pub mod geninv;
pub mod instance;
pub mod matrix;
pub mod minsat;
pub mod oracle;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
pub use field::{FieldVector, PrimeField};
pub use matrix::{
    decompose, decompose_multi, decompose_partial, Form, Matrix, Permutation, Transformation,
};
