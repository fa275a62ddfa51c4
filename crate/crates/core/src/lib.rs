//! Exact heights, slopes and minima of adelic hermitian vector bundles over
//! number fields, and the lcm of multinomial coefficients.

pub mod bundle;
pub mod config;
pub mod error;
pub mod exact;
pub mod gallery;
pub mod linalg;
pub mod multinomial;
pub mod primes;
pub mod rational;
pub mod suite;

pub use config::{Config, OutputFormat};
pub use error::{Error, Result};
pub use exact::{CompareOutcome, ExactPosReal, PrecisionPolicy};
pub use rational::Rat;
pub use bundle::{Bundle, Gram, HeightResult, LocalTwist, SlopeValue};
