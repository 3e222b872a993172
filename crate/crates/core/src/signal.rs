//! Uniformly sampled multi-channel time series.
//!
//! `Signal` is the currency between the simulator and the detection
//! pipeline: every recording, filtered intermediate, and synthetic walk
//! is one of these.

use crate::error::{Error, Result};

/// Physical units of the samples in a [`Signal`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    DisplacementM,
    VelocityMps,
    AccelerationMps2,
    Dimensionless,
}

impl Units {
    /// Canonical name used in file headers.
    pub fn as_str(&self) -> &'static str {
        match self {
            Units::DisplacementM => "Displacement_m",
            Units::VelocityMps => "Velocity_mps",
            Units::AccelerationMps2 => "Acceleration_mps2",
            Units::Dimensionless => "Dimensionless",
        }
    }

    pub fn parse(s: &str) -> Result<Units> {
        match s.trim() {
            "Displacement_m" => Ok(Units::DisplacementM),
            "Velocity_mps" => Ok(Units::VelocityMps),
            "Acceleration_mps2" => Ok(Units::AccelerationMps2),
            "Dimensionless" => Ok(Units::Dimensionless),
            other => Err(Error::validation(format!("unknown units `{other}`"))),
        }
    }
}

/// Uniformly sampled multi-channel signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    pub sample_rate: f64,
    pub channels: Vec<Vec<f64>>,
    pub units: Units,
    pub start_time: f64,
}

impl Signal {
    /// Build a signal, checking the type invariants: positive rate,
    /// equal-length channels, finite samples.
    pub fn new(
        sample_rate: f64,
        channels: Vec<Vec<f64>>,
        units: Units,
        start_time: f64,
    ) -> Result<Signal> {
        if !(sample_rate > 0.0) || !sample_rate.is_finite() {
            return Err(Error::validation("signal.sample_rate must be > 0"));
        }
        if channels.is_empty() {
            return Err(Error::validation("signal must have at least one channel"));
        }
        let len = channels[0].len();
        for (i, ch) in channels.iter().enumerate() {
            if ch.len() != len {
                return Err(Error::validation(format!(
                    "signal channel {} has length {} but channel 0 has {}",
                    i,
                    ch.len(),
                    len
                )));
            }
            if ch.iter().any(|v| !v.is_finite()) {
                return Err(Error::validation(format!(
                    "signal channel {i} contains non-finite samples"
                )));
            }
        }
        Ok(Signal {
            sample_rate,
            channels,
            units,
            start_time,
        })
    }

    /// Number of samples per channel.
    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    /// Time of sample `i`.
    pub fn time_at(&self, i: usize) -> f64 {
        self.start_time + i as f64 / self.sample_rate
    }

    /// Index of the sample nearest to time `t`, clamped to the signal.
    pub fn index_at(&self, t: f64) -> usize {
        let i = ((t - self.start_time) * self.sample_rate).round();
        (i.max(0.0) as usize).min(self.len().saturating_sub(1))
    }

    /// Extract one channel over `[t0, t1)` as a new single-channel signal.
    pub fn slice(&self, channel: usize, t0: f64, t1: f64) -> Result<Signal> {
        if channel >= self.channels.len() {
            return Err(Error::validation(format!(
                "channel {channel} out of range (signal has {})",
                self.channels.len()
            )));
        }
        if !(t1 > t0) {
            return Err(Error::validation("slice requires t1 > t0"));
        }
        let i0 = self.index_at(t0);
        let i1 = self.index_at(t1).max(i0 + 1);
        Signal::new(
            self.sample_rate,
            vec![self.channels[channel][i0..=i1.min(self.len() - 1)].to_vec()],
            self.units,
            self.time_at(i0),
        )
    }

    /// RMS of one channel.
    pub fn rms(&self, channel: usize) -> f64 {
        let ch = &self.channels[channel];
        if ch.is_empty() {
            return 0.0;
        }
        (ch.iter().map(|v| v * v).sum::<f64>() / ch.len() as f64).sqrt()
    }

    /// RMS over all channels pooled.
    pub fn rms_all(&self) -> f64 {
        let n: usize = self.channels.iter().map(|c| c.len()).sum();
        if n == 0 {
            return 0.0;
        }
        let e: f64 = self
            .channels
            .iter()
            .flat_map(|c| c.iter())
            .map(|v| v * v)
            .sum();
        (e / n as f64).sqrt()
    }

    /// Differentiate a displacement signal to geophone-like velocity using
    /// central differences (one-sided at the ends). Length is preserved.
    pub fn differentiate(&self) -> Signal {
        let dt = 1.0 / self.sample_rate;
        let channels = self
            .channels
            .iter()
            .map(|ch| {
                let n = ch.len();
                let mut out = vec![0.0; n];
                if n >= 2 {
                    out[0] = (ch[1] - ch[0]) / dt;
                    out[n - 1] = (ch[n - 1] - ch[n - 2]) / dt;
                    for i in 1..n - 1 {
                        out[i] = (ch[i + 1] - ch[i - 1]) / (2.0 * dt);
                    }
                }
                out
            })
            .collect();
        let units = match self.units {
            Units::DisplacementM => Units::VelocityMps,
            Units::VelocityMps => Units::AccelerationMps2,
            other => other,
        };
        Signal {
            sample_rate: self.sample_rate,
            channels,
            units,
            start_time: self.start_time,
        }
    }
}

/// Relative RMS difference ||a - b|| / ||a|| over all channels pooled.
/// Returns the absolute RMS of the difference when `a` is all zero.
pub fn relative_rms_diff(a: &Signal, b: &Signal) -> f64 {
    assert_eq!(a.channel_count(), b.channel_count(), "channel count mismatch");
    assert_eq!(a.len(), b.len(), "length mismatch");
    let mut num = 0.0;
    let mut den = 0.0;
    for (ca, cb) in a.channels.iter().zip(&b.channels) {
        for (x, y) in ca.iter().zip(cb) {
            num += (x - y) * (x - y);
            den += x * x;
        }
    }
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_channels() {
        let err = Signal::new(100.0, vec![vec![0.0; 4], vec![0.0; 3]], Units::Dimensionless, 0.0);
        assert!(err.is_err());
    }

    #[test]
    fn rejects_non_finite() {
        let err = Signal::new(100.0, vec![vec![0.0, f64::NAN]], Units::Dimensionless, 0.0);
        assert!(err.is_err());
    }

    #[test]
    fn differentiates_a_ramp_to_a_constant() {
        let fs = 50.0;
        let ramp: Vec<f64> = (0..100).map(|i| 3.0 * i as f64 / fs).collect();
        let sig = Signal::new(fs, vec![ramp], Units::DisplacementM, 0.0).unwrap();
        let vel = sig.differentiate();
        assert_eq!(vel.units, Units::VelocityMps);
        for v in &vel.channels[0] {
            assert!((v - 3.0).abs() < 1e-9, "ramp derivative should be 3, got {v}");
        }
    }

    #[test]
    fn index_and_time_round_trip() {
        let sig = Signal::new(200.0, vec![vec![0.0; 400]], Units::Dimensionless, 1.0).unwrap();
        assert_eq!(sig.index_at(1.0), 0);
        assert_eq!(sig.index_at(2.0), 200);
        assert!((sig.time_at(200) - 2.0).abs() < 1e-12);
    }
}
