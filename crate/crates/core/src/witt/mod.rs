mod additive;
mod cache;
mod poly;
mod ring;
mod vector;

pub use additive::{var_name, witt_of_monoid_ring, witt_of_monoid_ring_over, MonoidRingWitt, WittAdditive};
pub use cache::{
    default_cache_dir, generate_universal_polys, resolve_cache_dir, CacheStatus, CacheStore, WittPolyCache,
    CACHE_ENV, CACHE_VERSION, TERM_BUDGET,
};
pub use poly::Poly;
pub use ring::{is_prime, prime_power, Arith, BaseRing, Elem};
pub use vector::WittVector;
