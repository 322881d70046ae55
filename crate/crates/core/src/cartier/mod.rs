//! Cartier modules, the tensor product `⊠`, derived V-completion and the `M/V` table.

mod bilinear;
mod catalog;
mod completion;
mod homotopy;
mod module;
mod random;
mod tensor;

pub use bilinear::{dieudonne_check, validate_bilinear, BilinearMapSpec, BilinearReport, DieudonneReport};
pub use catalog::{catalog, finite_catalog, lookup, CatalogEntry};
pub use completion::{derived_v_completion, is_derived_v_complete, Completion, CompletenessVerdict};
pub use homotopy::{homotopy_mod_v, HomotopyTable};
pub use random::random_finite_module;
pub(crate) use module::vec_string;
pub use module::{check_axioms, AxiomReport, CartierModule, CatalogModule, Repr, Structure};
pub use tensor::{
    completed_tensor, mod_v_compatibility, tensor_trunc, unit_law_check, witt_tensor_theorem_check, CompletedTensor,
    TruncatedTensor, WittTensorReport,
};
