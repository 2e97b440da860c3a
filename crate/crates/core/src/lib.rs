//! Quantum CSS codes with transversal CCZ, built from classical codes over
//! GF(2^m) whose star-square lies in their dual.
//!
//! The pipeline runs bottom-up through the modules:
//!
//! * [`field`] – GF(2^m) arithmetic, trace, basis expansions.
//! * [`linalg`] – exact matrices over GF(2^m) and bit-packed GF(2).
//! * [`codes`] – linear codes, star products, Reed–Solomon and one-point
//!   Hermitian families, distance search.
//! * [`css`] – the pivot construction turning a code into a qudit CSS code.
//! * [`transversal`] – low-degree phase gates and transversality checks.
//! * [`embed`] – self-dual bases, multiplication-friendly embeddings.
//! * [`qubitize`] – qudit-to-qubit conversion with an explicit CCZ schedule.
//! * [`msd`] – distillation resource estimates and Monte Carlo.
//! * [`io`] – text and JSON formats shared with the CLI.

pub mod codes;
pub mod css;
pub mod embed;
pub mod error;
pub mod exec;
pub mod field;
pub mod io;
pub mod linalg;
pub mod msd;
pub mod qubitize;
pub(crate) mod search;
pub mod transversal;

pub use error::{Error, Result};
pub use exec::Exec;
pub use field::{make_field, BasisKind, Field, FieldBasis, FieldElem, FieldSpec};

/// Default work budget for exhaustive enumerations.
pub const DEFAULT_BUDGET: u64 = 1 << 24;
