//! Carmichael numbers: exact arithmetic, primality, Korselt's criterion,
//! exhaustive enumeration below a bound, smallest-with-d-factors searches,
//! catalogs on disk, and the statistics computed from them.
//!
//! Arithmetic is generic over [`Word`], implemented for `u64` and `u128`.
//! [`NarrowUint`] covers every enumeration below `2^64`; [`WideUint`]
//! covers the targeted searches, whose values reach 36 digits.
//!
//! ```
//! use carmichael::{enumerate, EnumerationConfig};
//!
//! let catalog = enumerate(&EnumerationConfig::new(10_000u64)).unwrap();
//! let values: Vec<u64> = catalog.values().collect();
//! assert_eq!(values, [561, 1105, 1729, 2465, 2821, 6601, 8911]);
//! ```

pub mod arith;
pub mod catalog;
pub mod enumerator;
pub mod error;
pub mod extremal;
pub mod korselt;
pub mod primes;
pub mod stats;

pub use arith::{gcd, invmod, iroot, isqrt, lcm, mulmod, powmod, Word};
pub use catalog::{
    merge, open_catalog, read_catalog, read_catalog_file, write_catalog, write_catalog_file,
    CarmichaelEntry, Catalog, CatalogReader, Provenance,
};
pub use enumerator::{
    default_factor_range, enumerate, enumerate_with_progress, max_factor_count, CompletionMode,
    EnumerationConfig,
};
pub use error::{Error, Result};
pub use extremal::{kform_check, scan_records, smallest_with_factors, RecordSet, SmallestResult};
pub use korselt::{
    carmichael_violation, fermat_scan, is_carmichael, korselt_check, oracle_enumerate, BaseBudget,
    KorseltViolation,
};
pub use primes::{factorize, is_prime, prime_sieve, Certainty, Factorization};
pub use stats::{compute_report, k_of, CheckpointList, StatsReport, StatsSpec};

/// Word used by enumerations; all bounds up to `2^64`.
pub type NarrowUint = u64;
/// Word used where values exceed `2^64`; exact up to `2^126`.
pub type WideUint = u128;
pub type NarrowCatalog = Catalog<NarrowUint>;
pub type WideCatalog = Catalog<WideUint>;
pub type NarrowEntry = CarmichaelEntry<NarrowUint>;
pub type WideEntry = CarmichaelEntry<WideUint>;
