//! Brute-force verifiers on tiny instances, sharing no algorithms with the main path
//! above integer arithmetic.

mod cache;
mod drw;
mod mod_v_table;
mod naive;
mod search;
mod small;

pub use cache::{witt_cache_spotcheck, SpotcheckReport};
pub use drw::{basic_witt_count, basic_witt_vdv_h0, BasicWittCount};
pub use mod_v_table::figure1_oracle;
pub use search::{
    corepresentability_check, corepresentability_check_with, enumerate_bilinear, enumerate_cartier_homs, BilinearTable, CorepVerdict,
};
pub use small::small_cartier_modules;
