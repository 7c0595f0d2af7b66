//! Randomized median lattice rules for high-dimensional integration.
//!
//! [`median::integrate_median`] draws an odd number of rank-1 lattice rules
//! with random prime modulus and random generating vector and returns the
//! componentwise median of their estimates. No smoothness or weight parameter
//! enters the algorithm. The [`korobov`] and [`wce`] modules compute the
//! weighted Korobov quantities used to check its guarantees, and
//! [`experiment`] reproduces error-versus-n studies.

pub mod error;
pub mod experiment;
pub mod integrands;
pub mod korobov;
pub mod lattice;
pub mod median;
pub mod par;
pub mod primes;
pub mod quad;
pub mod rng;
pub mod sum;
pub mod wce;

pub use error::{Error, Result};
pub use par::is_parallel;
pub use integrands::{make_integrand, FunctionKind, TestFunction, TestFunctionSpec};
pub use korobov::{det_error_bound, KorobovParams, TrigPolynomial, WeightScheme};
pub use lattice::{apply_rule, dual_indicator, lattice_nodes, Integrand, LatticeRule};
pub use median::{complex_median, integrate_median, integrate_median_tent, HChoice, MedianRuleConfig, MedianRunTrace};
pub use num_complex::Complex64;
pub use primes::{primes_in_range, PrimePool};
pub use rng::SeededRng;
