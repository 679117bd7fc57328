//! One-bit hidden Markov models and one-qubit hidden quantum Markov models.
//!
//! * [`classical`]: Mealy HMMs given by substochastic matrices `T_0`, `T_1`.
//! * [`quantum`]: HQMMs given by per-symbol Kraus operators, plus the ancilla
//!   dilation and projective-generator constructions.
//! * [`embedding`]: exact simulation of any HMM by an HQMM of the same size.
//! * [`optimize`]: multi-start simplex maximization of word probabilities
//!   over both families, and the `1 0^k 1` comparison sweep.
//! * [`document`]: JSON model/result documents and the curve CSV.

pub mod classical;
pub mod document;
pub mod embedding;
pub mod error;
pub mod format;
pub mod linalg;
pub mod optimize;
pub mod quantum;
pub mod rng;
pub mod validation;
pub mod word;

pub use classical::HmmModel;
pub use embedding::{classical_point_in_quantum_space, embed_hmm};
pub use error::{Error, Result};
pub use quantum::{DensityMatrix, HqmmModel, KrausSet, PureState};
pub use validation::{ValidationReport, Violation};
pub use word::{Symbol, Word, WordTemplate};
