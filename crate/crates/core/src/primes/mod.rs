//! Prime generation, primality, factorization and divisors.

mod factor;
mod primality;
mod sieve;

pub use factor::{
    divisors, divisors_capped, factorize, Factorization, DEFAULT_DIVISOR_CAP, TRIAL_DIVISION_BOUND,
};
pub use primality::{
    certainty, is_prime, is_prime_bpsw, is_prime_u64, strong_probable_prime, Certainty,
};
pub use sieve::{prime_sieve, prime_sieve_segmented, DEFAULT_SEGMENT_BYTES};
