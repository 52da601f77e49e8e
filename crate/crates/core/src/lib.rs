//! Exact computation of the Hochschild cohomology ring of the
//! preprojective algebra of type L_n.

pub mod algebra;
pub mod certificate;
pub mod cochain;
pub mod exactla;
pub mod nakayama;
pub mod oracle;
pub mod presentation;
pub mod resolution;
pub mod yoneda;

pub use algebra::{build_algebra, AlgebraElement, AlgebraTable, BasisMonomial, Quiver};
pub use exactla::{ExactMatrix, FieldSpec, Scalar};
