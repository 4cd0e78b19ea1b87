//! Exact-arithmetic cellular algebras: cell data and their axioms, cell
//! modules with Gram forms and radicals, finite-coideal quotients, and the
//! procellular completion with its smooth-module classification.
//!
//! Everything is computed over an exact field (arbitrary-precision rationals
//! or F_p); there is no floating point anywhere.

pub mod cell;
pub mod completion;
pub mod datum_json;
pub mod field;
pub mod instances;
pub mod matrix;
pub mod poset;
pub mod rep;
pub mod report;

pub use cell::{AxiomReport, BasisIndex, CellDatum, CellError, CheckOutcome, Element};
pub use field::{Field, FieldError, Scalar};
pub use matrix::{span_dimension, Matrix, MatrixError};
pub use poset::{Coideal, Label, Poset, PosetError, ProfiniteReport, UpsetOutcome, UpsetStatus};
