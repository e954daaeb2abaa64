//! Sensor-group outbreak detection on social networks.
//!
//! Friends of randomly chosen people are, on average, more central than the
//! people themselves. Monitoring such a sensor group alongside a random
//! control group lets contagious items be detected before they peak. The
//! crate covers the degree mathematics behind the effect, SIR cascade
//! simulation, event-stream ingestion, lead-time statistics with a shuffle
//! null, a day-by-day detector and hypergeometric detection probabilities.

pub mod cascade;
pub mod error;
pub mod events;
pub mod graph;
pub mod harness;
pub mod leadtime;
pub mod paradox;
pub mod powerlaw;
pub mod rng;
pub mod samplestats;
pub mod sampling;
pub mod stats;

pub use error::{Error, Result, Side};
