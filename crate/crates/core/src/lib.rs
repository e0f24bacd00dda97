//! Schottky surfaces at desk scale: word-tree partitions, transfer
//! operators and their Fredholm determinants, resonance search, limit-set
//! dimension, and numerical fractal uncertainty measurements.

pub mod error;
pub mod export;
pub mod fup;
pub mod linalg;
pub mod mobius;
pub mod partition;
pub mod schottky;
pub mod transfer;
pub mod words;

pub use error::{Error, Result};
pub use mobius::{sphere_distance, ExtendedPoint, MobiusMap};
pub use partition::{enumerate_partition, limit_set_cover, IntervalCover, Partition};
pub use schottky::{
    elementary_schottky, symmetric_schottky, Disk, Interval, SchottkyData, ValidationReport,
};
pub use words::{word_interval, word_interval_prime, Word};
