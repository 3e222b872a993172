//! Continuous wavelet transform with an analytic Morlet wavelet.
//!
//! The transform runs in the frequency domain: one FFT of the (zero padded)
//! channel, a Gaussian weight per analysis frequency, one inverse FFT per
//! frequency row. The weight peaks at 1 for the row's center frequency, so a
//! unit-amplitude tone produces a unit-magnitude ridge at every scale and
//! rows are directly comparable when summed into band aggregates.

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::signal::Signal;

/// Morlet center frequency parameter (dimensionless).
pub const MORLET_OMEGA0: f64 = 6.0;

/// Time-frequency magnitude map of one channel.
#[derive(Debug, Clone)]
pub struct Scalogram {
    /// Analysis frequencies in Hz, ascending, log-spaced.
    pub frequencies: Vec<f64>,
    pub sample_rate: f64,
    pub start_time: f64,
    /// Channel of the source signal this scalogram was computed from.
    pub channel: usize,
    /// `magnitudes[row][k]` is |W| at `frequencies[row]`, sample `k`.
    pub magnitudes: Vec<Vec<f64>>,
}

impl Scalogram {
    /// Number of time samples.
    pub fn len(&self) -> usize {
        self.magnitudes.first().map_or(0, |row| row.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn time_at(&self, i: usize) -> f64 {
        self.start_time + i as f64 / self.sample_rate
    }

    pub fn index_at(&self, t: f64) -> usize {
        let i = ((t - self.start_time) * self.sample_rate).round();
        (i.max(0.0) as usize).min(self.len().saturating_sub(1))
    }

    /// Row index whose frequency is nearest to `f`.
    pub fn nearest_row(&self, f: f64) -> usize {
        let mut best = 0;
        let mut err = f64::INFINITY;
        for (i, fi) in self.frequencies.iter().enumerate() {
            if (fi - f).abs() < err {
                err = (fi - f).abs();
                best = i;
            }
        }
        best
    }

    /// Sum of magnitudes over rows with frequency in `[lo, hi]`, per sample.
    pub fn band_aggregate(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for (row, &f) in self.magnitudes.iter().zip(&self.frequencies) {
            if f >= lo && f <= hi {
                for (o, m) in out.iter_mut().zip(row) {
                    *o += m;
                }
            }
        }
        out
    }

    /// Sum over every row, per sample.
    pub fn aggregate(&self) -> Vec<f64> {
        self.band_aggregate(f64::NEG_INFINITY, f64::INFINITY)
    }
}

/// Log-spaced analysis grid from `f_min` up to at most `f_max` with
/// `voices_per_octave` rows per frequency doubling.
fn frequency_grid(f_min: f64, f_max: f64, voices_per_octave: usize) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut j = 0usize;
    loop {
        let f = f_min * 2f64.powf(j as f64 / voices_per_octave as f64);
        if f > f_max * (1.0 + 1e-12) {
            break;
        }
        grid.push(f);
        j += 1;
    }
    grid
}

/// Morlet CWT of one channel.
pub fn cwt_channel(
    signal: &Signal,
    channel: usize,
    f_min: f64,
    f_max: f64,
    voices_per_octave: usize,
) -> Result<Scalogram> {
    if channel >= signal.channel_count() {
        return Err(Error::validation(format!(
            "cwt channel {channel} out of range ({} channels)",
            signal.channel_count()
        )));
    }
    let nyquist = signal.sample_rate / 2.0;
    if !(f_min > 0.0 && f_min < f_max) {
        return Err(Error::config("cwt requires 0 < f_min < f_max"));
    }
    if f_max > nyquist {
        return Err(Error::config(format!(
            "cwt f_max {f_max} Hz exceeds the Nyquist frequency {nyquist} Hz"
        )));
    }
    if voices_per_octave == 0 {
        return Err(Error::config("cwt voices_per_octave must be >= 1"));
    }
    let n = signal.len();
    if n < 2 {
        return Err(Error::validation("cwt needs at least two samples"));
    }

    let frequencies = frequency_grid(f_min, f_max, voices_per_octave);
    // The widest wavelet sets how much zero padding keeps the circular
    // convolution from wrapping signal tails into the front.
    let s_max = MORLET_OMEGA0 / (2.0 * std::f64::consts::PI * f_min);
    let pad = (4.0 * s_max * signal.sample_rate).ceil() as usize;
    let m = (n + 2 * pad).next_power_of_two();

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    let ifft = planner.plan_fft_inverse(m);

    let mut spectrum: Vec<Complex<f64>> = signal.channels[channel]
        .iter()
        .map(|&x| Complex::new(x, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(m)
        .collect();
    fft.process(&mut spectrum);

    let bin_hz = signal.sample_rate / m as f64;
    let magnitudes: Vec<Vec<f64>> = frequencies
        .par_iter()
        .map(|&f| {
            let s = MORLET_OMEGA0 / (2.0 * std::f64::consts::PI * f);
            let mut buf = vec![Complex::new(0.0, 0.0); m];
            // Analytic wavelet: positive frequencies only, factor 2 restores
            // the tone amplitude lost to the discarded negative half.
            for k in 1..m / 2 {
                let omega = 2.0 * std::f64::consts::PI * (k as f64 * bin_hz);
                let arg = s * omega - MORLET_OMEGA0;
                let weight = 2.0 * (-0.5 * arg * arg).exp();
                buf[k] = spectrum[k] * weight;
            }
            ifft.process(&mut buf);
            buf[..n].iter().map(|v| v.norm() / m as f64).collect()
        })
        .collect();

    Ok(Scalogram {
        frequencies,
        sample_rate: signal.sample_rate,
        start_time: signal.start_time,
        channel,
        magnitudes,
    })
}

/// Morlet CWT of every channel.
pub fn cwt(
    signal: &Signal,
    f_min: f64,
    f_max: f64,
    voices_per_octave: usize,
) -> Result<Vec<Scalogram>> {
    (0..signal.channel_count())
        .map(|c| cwt_channel(signal, c, f_min, f_max, voices_per_octave))
        .collect()
}
