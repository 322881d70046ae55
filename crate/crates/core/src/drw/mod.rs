//! The de Rham-Witt complex of truncated polynomial algebras over `F_p`, Cartier complexes
//! and their `(V + dV)`-completion.

mod build;
mod complex;
mod lattice;
mod random;
mod vdv;
mod weight;

pub use build::{build_drw, DRWConfig, DrwComplex, DrwLevel, WeightBlock};
pub use complex::{check_complex_axioms, check_drw_axioms, CartierComplex, ComplexMode, ComplexReport, VComplex};
pub use random::random_cartier_complex;
pub use vdv::{v_dv_completeness_test, v_dv_quotient, CompletenessReport, DegreeVerdict, VdvQuotient};
pub use weight::Weight;

pub(crate) use crate::cartier::vec_string;
