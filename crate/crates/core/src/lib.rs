//! Footstep-induced floor vibration: physics-based simulation of foot-floor
//! contact on a beam walkway, signal-processing pipeline for footstep event
//! detection, spectral features, and kernel-SVM gait assessment.

pub mod dynamics;
pub mod error;
pub mod features;
pub mod io;
pub mod learning;
pub mod pipeline;
pub mod signal;
pub mod types;

pub use error::{Error, Result};
pub use signal::{Signal, Units};
pub use types::{Abnormality, ContactType, EventLabel, Foot};
