//! Exact linear algebra over Z: presentations, Smith form, kernels, limits.

pub mod group;
pub mod hom;
pub mod matrix;
pub mod snf;
pub mod tower;

pub use group::{split_prime_power, tensor_ab, FinAbPres, Invariants};
pub use hom::GroupHom;
pub use matrix::{big, Matrix};
pub use snf::{left_kernel, smith, smith_normal_form, solve_left, Smith};
pub use tower::{lim_lim1, DerivedLimitResult, Extrapolation, Tower};
