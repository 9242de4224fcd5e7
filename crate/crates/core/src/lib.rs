//! Spectrum-sensing performance of a secondary cognitive-radio node when the
//! primary user transmits through a reconfigurable intelligent surface, either
//! used as the transmitter's access point or as a passive relay.
//!
//! * [`specfun`]: `erf`, `erfc`, `inv_erfc` and the Gaussian tail.
//! * [`model`]: parameter types, channel models and seeded samplers.
//! * [`analytic`]: closed-form false-alarm, detection, transmission and
//!   throughput expressions.
//! * [`montecarlo`]: plain Monte Carlo estimators used as the oracle.
//! * [`sweep`]: ROC, throughput and transmission-probability datasets.
//! * [`cli`]: configuration, output writers and the `riscr` subcommands.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod specfun;
pub mod sweep;

pub use error::{Error, Result};
