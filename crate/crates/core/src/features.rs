//! Spectral features for contact-type classification: windowed amplitude
//! spectra of segmented footsteps, selection of the dominant-frequency
//! basis, and extraction of the fixed-length feature vector.
//!
//! The basis is the union of the strongest spectral peaks each contact
//! type induces in the floor; a feature vector holds the segment's
//! amplitude near each basis frequency, normalized to unit maximum so the
//! classifier keys on spectral shape rather than body weight.

use std::f64::consts::{PI, SQRT_2};

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Signal;
use crate::types::ContactType;

/// Shortest segment the spectrum estimator accepts, seconds.
pub const MIN_SEGMENT_SECONDS: f64 = 0.25;

/// Minimum spacing between selected peaks, and the merge radius for
/// near-duplicate frequencies when the per-type peak sets are unioned.
pub const PEAK_MIN_SEPARATION_HZ: f64 = 2.0;

/// A local maximum only counts as a peak when it exceeds this multiple of
/// the median spectrum level. Noise-only spectra are ragged but flat, so
/// none of their local maxima clear the bar and the selection reports an
/// underpopulated basis instead of inventing one.
pub const PEAK_PROMINENCE: f64 = 3.0;

/// Relative bandwidth of the smoothing applied to the mean spectrum before
/// peaks are picked, as a fraction of each frequency. Matched to light
/// structural damping, it averages out the raggedness that broadband
/// forcing leaves on a resonance without widening the resonance itself.
pub const SMOOTHING_FRACTION: f64 = 0.03;

/// Peaks below this frequency are ignored. The region under the floor's
/// fundamental carries the quasi-static weight transfer and its window
/// ripple, not modal content.
pub const MIN_PEAK_HZ: f64 = 8.0;

/// Single-sided amplitude spectrum of a Hann-windowed segment.
///
/// Amplitudes are scaled so that the sum of their squares equals the
/// energy of the windowed segment (Parseval-consistent).
#[derive(Debug, Clone)]
pub struct AmplitudeSpectrum {
    /// Bin center frequencies, 0 Hz through Nyquist.
    pub frequencies: Vec<f64>,
    pub amplitudes: Vec<f64>,
    /// Bin spacing in Hz.
    pub resolution: f64,
}

impl AmplitudeSpectrum {
    /// Largest amplitude over bins whose center lies in `[lo, hi]`. Falls
    /// back to the bin nearest the band center when the band is narrower
    /// than the resolution.
    pub fn band_max(&self, lo: f64, hi: f64) -> f64 {
        let mut best: Option<f64> = None;
        for (f, a) in self.frequencies.iter().zip(&self.amplitudes) {
            if *f >= lo && *f <= hi {
                best = Some(best.map_or(*a, |b: f64| b.max(*a)));
            }
        }
        best.unwrap_or_else(|| {
            let center = 0.5 * (lo + hi);
            let k = (center / self.resolution).round().max(0.0) as usize;
            self.amplitudes[k.min(self.amplitudes.len() - 1)]
        })
    }
}

/// Hann-windowed single-sided amplitude spectrum of a single-channel
/// segment at the segment's own length (no zero padding).
pub fn power_spectrum(segment: &Signal) -> Result<AmplitudeSpectrum> {
    if segment.channel_count() != 1 {
        return Err(Error::validation(format!(
            "power_spectrum expects a single-channel segment, got {} channels",
            segment.channel_count()
        )));
    }
    let n = segment.len();
    if (n as f64) < MIN_SEGMENT_SECONDS * segment.sample_rate {
        return Err(Error::validation(format!(
            "segment is {:.3} s but the spectrum needs at least {MIN_SEGMENT_SECONDS} s",
            n as f64 / segment.sample_rate
        )));
    }
    Ok(amplitude_spectrum(
        &segment.channels[0],
        segment.sample_rate,
        n,
    ))
}

/// Spectrum of `samples` zero-padded to `n_fft`. Padding refines the
/// frequency grid without changing the windowed energy, so Parseval still
/// holds and spectra of unequal-length segments share one grid.
fn amplitude_spectrum(samples: &[f64], rate: f64, n_fft: usize) -> AmplitudeSpectrum {
    let n = samples.len();
    let mut buf: Vec<Complex<f64>> = (0..n_fft)
        .map(|k| {
            if k < n {
                let w = 0.5 * (1.0 - (2.0 * PI * k as f64 / n as f64).cos());
                Complex::new(samples[k] * w, 0.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n_fft).process(&mut buf);

    let half = n_fft / 2;
    let scale = 1.0 / (n_fft as f64).sqrt();
    let resolution = rate / n_fft as f64;
    let mut frequencies = Vec::with_capacity(half + 1);
    let mut amplitudes = Vec::with_capacity(half + 1);
    for (k, value) in buf.iter().enumerate().take(half + 1) {
        let shared_with_mirror = k != 0 && !(n_fft % 2 == 0 && k == half);
        let a = value.norm() * scale * if shared_with_mirror { SQRT_2 } else { 1.0 };
        frequencies.push(k as f64 * resolution);
        amplitudes.push(a);
    }
    AmplitudeSpectrum {
        frequencies,
        amplitudes,
        resolution,
    }
}

/// The ordered frequency grid features are pooled on, persisted with any
/// trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyBasis {
    /// Strictly increasing Hz values.
    pub frequencies: Vec<f64>,
    /// Pooling half-bandwidth around each frequency, Hz. Bands never
    /// overlap: adjacent frequencies are at least two half-bandwidths
    /// apart.
    pub half_bandwidth: f64,
}

impl FrequencyBasis {
    /// Validate the basis invariants and return it.
    pub fn new(frequencies: Vec<f64>, half_bandwidth: f64) -> Result<FrequencyBasis> {
        if !(half_bandwidth > 0.0) || !half_bandwidth.is_finite() {
            return Err(Error::validation("basis.half_bandwidth must be > 0"));
        }
        if frequencies.iter().any(|f| !(*f > 0.0) || !f.is_finite()) {
            return Err(Error::validation("basis frequencies must be finite and > 0"));
        }
        if frequencies.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::validation(
                "basis frequencies must be strictly increasing",
            ));
        }
        let non_overlap = 2.0 * half_bandwidth;
        if frequencies.windows(2).any(|w| w[1] - w[0] < non_overlap) {
            return Err(Error::validation(format!(
                "basis pooling bands overlap: adjacent frequencies must be at least {non_overlap} Hz apart"
            )));
        }
        Ok(FrequencyBasis {
            frequencies,
            half_bandwidth,
        })
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }
}

/// Result of [`select_dominant_frequencies`].
#[derive(Debug, Clone)]
pub struct BasisSelection {
    pub basis: FrequencyBasis,
    /// True when some contact type yielded fewer qualifying peaks than
    /// requested (for example on noise-only training input).
    pub underpopulated: bool,
}

/// Pick the per-type dominant spectral peaks from training segments and
/// union them into a [`FrequencyBasis`].
///
/// Every type's segments are Hann-windowed, zero-padded onto a common
/// grid, and averaged; the `k_per_type` highest qualifying local maxima
/// (separated by at least [`PEAK_MIN_SEPARATION_HZ`]) are kept per type.
/// The union is sorted and near-duplicates closer than that same spacing
/// are merged to their mean. When the merged set is tighter than the
/// requested pooling bands, the half-bandwidth shrinks to keep the bands
/// non-overlapping.
pub fn select_dominant_frequencies(
    groups: &[(ContactType, Vec<Signal>)],
    k_per_type: usize,
    half_bandwidth: f64,
) -> Result<BasisSelection> {
    if k_per_type == 0 {
        return Err(Error::config("features.k_per_type must be >= 1"));
    }
    if !(half_bandwidth > 0.0) {
        return Err(Error::config("features.half_bandwidth must be > 0"));
    }
    if groups.is_empty() {
        return Err(Error::validation(
            "basis selection needs at least one contact-type group",
        ));
    }

    let rate = groups[0].1.first().map_or(0.0, |s| s.sample_rate);
    let mut n_fft = 0usize;
    for (ty, segments) in groups {
        if segments.len() < 5 {
            return Err(Error::validation(format!(
                "basis selection needs at least 5 segments per contact type, {} has {}",
                ty.as_str(),
                segments.len()
            )));
        }
        for s in segments {
            if s.channel_count() != 1 {
                return Err(Error::validation(
                    "basis selection expects single-channel segments",
                ));
            }
            if s.sample_rate != rate {
                return Err(Error::validation(
                    "all training segments must share one sample rate",
                ));
            }
            if (s.len() as f64) < MIN_SEGMENT_SECONDS * rate {
                return Err(Error::validation(format!(
                    "a {} segment is shorter than {MIN_SEGMENT_SECONDS} s",
                    ty.as_str()
                )));
            }
            n_fft = n_fft.max(s.len());
        }
    }
    // Padding to the next power of two and doubling once keeps the FFT
    // fast and the grid finer than the peak-merge radius.
    n_fft = n_fft.next_power_of_two() * 2;

    let mut union: Vec<f64> = Vec::new();
    let mut underpopulated = false;
    for (_, segments) in groups {
        let mut mean: Vec<f64> = Vec::new();
        let mut grid: Vec<f64> = Vec::new();
        for s in segments {
            let spec = amplitude_spectrum(&s.channels[0], rate, n_fft);
            if mean.is_empty() {
                mean = spec.amplitudes;
                grid = spec.frequencies;
            } else {
                for (m, a) in mean.iter_mut().zip(&spec.amplitudes) {
                    *m += a;
                }
            }
        }
        for m in &mut mean {
            *m /= segments.len() as f64;
        }
        let smoothed = smooth_constant_q(&grid, &mean);
        let peaks = top_peaks(&grid, &smoothed, k_per_type);
        if peaks.len() < k_per_type {
            underpopulated = true;
        }
        union.extend(peaks);
    }

    union.sort_by(f64::total_cmp);
    let merged = merge_close(&union, PEAK_MIN_SEPARATION_HZ);
    let min_gap = merged
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let hb = if min_gap < 2.0 * half_bandwidth {
        min_gap / 2.0
    } else {
        half_bandwidth
    };
    Ok(BasisSelection {
        basis: FrequencyBasis::new(merged, hb)?,
        underpopulated,
    })
}

/// Gaussian smoothing whose width grows with frequency
/// ([`SMOOTHING_FRACTION`] of each bin's frequency, floored at half a
/// hertz). One resonance then carries one local maximum instead of a
/// cluster of ragged ones.
fn smooth_constant_q(grid: &[f64], amps: &[f64]) -> Vec<f64> {
    let df = grid[1] - grid[0];
    grid.iter()
        .enumerate()
        .map(|(k, &f)| {
            let sigma = (SMOOTHING_FRACTION * f).max(0.5);
            let reach = (3.0 * sigma / df).ceil() as usize;
            let lo = k.saturating_sub(reach);
            let hi = (k + reach).min(amps.len() - 1);
            let mut num = 0.0;
            let mut den = 0.0;
            for j in lo..=hi {
                let z = (grid[j] - f) / sigma;
                let w = (-0.5 * z * z).exp();
                num += w * amps[j];
                den += w;
            }
            num / den
        })
        .collect()
}

/// Local maxima of `amps`, highest first, greedily thinned to a minimum
/// spacing of [`PEAK_MIN_SEPARATION_HZ`], at most `k` of them.
fn top_peaks(grid: &[f64], amps: &[f64], k: usize) -> Vec<f64> {
    let mut in_band: Vec<f64> = grid
        .iter()
        .zip(amps)
        .filter(|(f, _)| **f >= MIN_PEAK_HZ)
        .map(|(_, a)| *a)
        .collect();
    if in_band.is_empty() {
        return Vec::new();
    }
    in_band.sort_by(f64::total_cmp);
    let floor = PEAK_PROMINENCE * in_band[in_band.len() / 2];

    let mut candidates: Vec<usize> = (1..amps.len() - 1)
        .filter(|&i| {
            grid[i] >= MIN_PEAK_HZ
                && amps[i] > amps[i - 1]
                && amps[i] > amps[i + 1]
                && amps[i] > floor
        })
        .collect();
    candidates.sort_by(|&a, &b| {
        amps[b]
            .total_cmp(&amps[a])
            .then(grid[a].total_cmp(&grid[b]))
    });

    let mut picked: Vec<f64> = Vec::new();
    for i in candidates {
        if picked.len() == k {
            break;
        }
        if picked
            .iter()
            .all(|p| (grid[i] - p).abs() >= PEAK_MIN_SEPARATION_HZ)
        {
            picked.push(grid[i]);
        }
    }
    picked.sort_by(f64::total_cmp);
    picked
}

/// Replace runs of sorted values closer than `radius` by their mean.
fn merge_close(sorted: &[f64], radius: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] - sorted[j - 1] < radius {
            j += 1;
        }
        out.push(sorted[i..j].iter().sum::<f64>() / (j - i) as f64);
        i = j;
    }
    out
}

/// Fixed-length spectral feature vector of one segmented footstep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    /// One non-negative amplitude per basis frequency, unit maximum.
    pub values: Vec<f64>,
    /// Index of the source event within its recording.
    pub event_index: usize,
}

/// Pool the segment's spectrum onto the basis: per basis frequency, the
/// largest amplitude within the half-bandwidth, the vector then scaled to
/// unit maximum. Scaling the segment by any positive factor leaves the
/// result unchanged.
pub fn extract_features(segment: &Signal, basis: &FrequencyBasis) -> Result<FeatureVector> {
    if basis.is_empty() {
        return Err(Error::validation(
            "frequency basis is empty; select or load a basis first",
        ));
    }
    if segment
        .channels
        .iter()
        .all(|ch| ch.iter().all(|&v| v == 0.0))
    {
        return Err(Error::validation(
            "segment is identically zero; no spectral content to featurize",
        ));
    }
    let spectrum = power_spectrum(segment)?;
    let mut values: Vec<f64> = basis
        .frequencies
        .iter()
        .map(|&f| spectrum.band_max(f - basis.half_bandwidth, f + basis.half_bandwidth))
        .collect();
    let max = values.iter().fold(0.0_f64, |a, &b| a.max(b));
    if !(max > 0.0) {
        return Err(Error::validation(
            "segment has no energy at any basis frequency",
        ));
    }
    for v in &mut values {
        *v /= max;
    }
    Ok(FeatureVector {
        values,
        event_index: 0,
    })
}

impl FeatureVector {
    pub fn with_event_index(mut self, event_index: usize) -> FeatureVector {
        self.event_index = event_index;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{simulate_response, BeamModel, TemplateConfig};
    use crate::signal::Units;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tone(freq: f64, rate: f64, seconds: f64, amp: f64) -> Signal {
        let n = (rate * seconds) as usize;
        let samples = (0..n)
            .map(|i| amp * (2.0 * PI * freq * i as f64 / rate).sin())
            .collect();
        Signal::new(rate, vec![samples], Units::VelocityMps, 0.0).unwrap()
    }

    /// Beam with one off-grid measurement point where none of the six
    /// modes has a node, forced at the same spot.
    fn visible_modes_beam() -> BeamModel {
        BeamModel {
            sensor_positions: vec![0.9],
            ..BeamModel::default()
        }
    }

    fn step_velocity(beam: &BeamModel, ty: ContactType, weight: f64, position: f64) -> Signal {
        let profile = TemplateConfig::default()
            .build(ty, weight, position, 1000.0)
            .unwrap();
        let seconds = profile.contact_duration + 0.8;
        simulate_response(beam, &profile, seconds, 1000.0)
            .unwrap()
            .differentiate()
    }

    /// One [initial contact, foot off] segment with the duration jitter a
    /// real training set would carry. Classification spectra are taken on
    /// the acceleration view: differentiating the geophone velocity once
    /// more restores the weight of the high modes that tell hard strikes
    /// apart from soft ones.
    fn step_segment(
        beam: &BeamModel,
        ty: ContactType,
        weight: f64,
        position: f64,
        duration_scale: f64,
    ) -> Signal {
        let profile = TemplateConfig::default()
            .build_scaled(ty, weight, position, 1000.0, duration_scale, 1.0)
            .unwrap();
        let seconds = profile.contact_duration + 0.8;
        let acc = simulate_response(beam, &profile, seconds, 1000.0)
            .unwrap()
            .differentiate()
            .differentiate();
        acc.slice(0, 0.0, profile.contact_duration).unwrap()
    }

    const DURATION_JITTER: [f64; 6] = [1.0, 0.93, 1.07, 0.97, 1.04, 0.9];

    #[test]
    fn tone_spectrum_peaks_at_its_frequency() {
        let spec = power_spectrum(&tone(11.0, 1000.0, 2.0, 1.0)).unwrap();
        let peak = spec
            .amplitudes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert!(
            (spec.frequencies[peak] - 11.0).abs() < spec.resolution,
            "peak at {} Hz, expected 11",
            spec.frequencies[peak]
        );
        assert!((spec.resolution - 0.5).abs() < 1e-12);
    }

    #[test]
    fn spectrum_energy_matches_windowed_signal_energy() {
        let rate = 500.0;
        let samples: Vec<f64> = (0..600)
            .map(|i| {
                let t = i as f64 / rate;
                (2.0 * PI * 7.3 * t).sin() + 0.4 * (2.0 * PI * 61.0 * t).cos() + 0.05 * t
            })
            .collect();
        let n = samples.len();
        let windowed_energy: f64 = samples
            .iter()
            .enumerate()
            .map(|(k, x)| {
                let w = 0.5 * (1.0 - (2.0 * PI * k as f64 / n as f64).cos());
                (w * x) * (w * x)
            })
            .sum();
        let sig = Signal::new(rate, vec![samples], Units::VelocityMps, 0.0).unwrap();
        let spec = power_spectrum(&sig).unwrap();
        let spectral_energy: f64 = spec.amplitudes.iter().map(|a| a * a).sum();
        assert!(
            (spectral_energy - windowed_energy).abs() <= 1e-6 * windowed_energy,
            "Parseval mismatch: {spectral_energy} vs {windowed_energy}"
        );
    }

    #[test]
    fn rejects_short_and_multichannel_segments() {
        let short = tone(11.0, 1000.0, 0.2, 1.0);
        assert!(power_spectrum(&short).is_err());
        let two = Signal::new(
            1000.0,
            vec![vec![0.1; 500], vec![0.1; 500]],
            Units::VelocityMps,
            0.0,
        )
        .unwrap();
        assert!(power_spectrum(&two).is_err());
    }

    #[test]
    fn toe_step_spectrum_peaks_at_the_pinned_modes() {
        let beam = visible_modes_beam();
        let vel = step_velocity(&beam, ContactType::Toe, 700.0, 0.9);
        let spec = power_spectrum(&vel).unwrap();
        for target in [11.0, 53.0, 80.0, 112.0, 165.0, 200.0] {
            let near = spec.band_max(target - 3.0, target + 3.0);
            let below = spec.band_max(target - 9.0, target - 6.0);
            let above = spec.band_max(target + 6.0, target + 9.0);
            assert!(
                near > below && near > above,
                "no spectral peak near {target} Hz (band {near:.3e}, sides {below:.3e}/{above:.3e})"
            );
        }
    }

    #[test]
    fn basis_invariants_are_enforced() {
        assert!(FrequencyBasis::new(vec![11.0, 53.0], 3.0).is_ok());
        assert!(FrequencyBasis::new(vec![53.0, 11.0], 3.0).is_err());
        assert!(FrequencyBasis::new(vec![11.0, 11.0], 3.0).is_err());
        assert!(FrequencyBasis::new(vec![11.0, 15.0], 3.0).is_err());
        assert!(FrequencyBasis::new(vec![11.0], 0.0).is_err());
        assert!(FrequencyBasis::new(vec![-4.0], 3.0).is_err());
    }

    #[test]
    fn identical_groups_reduce_to_one_types_peaks() {
        let beam = visible_modes_beam();
        let segments: Vec<Signal> = (0..5)
            .map(|k| {
                step_segment(
                    &beam,
                    ContactType::Heel,
                    600.0 + 50.0 * k as f64,
                    0.9,
                    DURATION_JITTER[k],
                )
            })
            .collect();
        let single = select_dominant_frequencies(
            &[(ContactType::Heel, segments.clone())],
            4,
            3.0,
        )
        .unwrap();
        let triple = select_dominant_frequencies(
            &[
                (ContactType::Heel, segments.clone()),
                (ContactType::Midfoot, segments.clone()),
                (ContactType::Toe, segments),
            ],
            4,
            3.0,
        )
        .unwrap();
        assert_eq!(
            single.basis, triple.basis,
            "the union of identical peak sets should equal the single set"
        );
    }

    #[test]
    fn pinned_beam_basis_covers_the_low_modes() {
        let beam = visible_modes_beam();
        let groups: Vec<(ContactType, Vec<Signal>)> = ContactType::ALL
            .iter()
            .map(|&ty| {
                let segs = (0..5)
                    .map(|k| {
                        step_segment(
                            &beam,
                            ty,
                            550.0 + 70.0 * k as f64,
                            0.9,
                            DURATION_JITTER[k],
                        )
                    })
                    .collect();
                (ty, segs)
            })
            .collect();
        let selection = select_dominant_frequencies(&groups, 4, 3.0).unwrap();
        let pinned = [11.0, 53.0, 80.0, 112.0, 165.0, 200.0];
        for must in [11.0, 53.0] {
            assert!(
                selection
                    .basis
                    .frequencies
                    .iter()
                    .any(|f| (f - must).abs() < 2.0),
                "basis {:?} should contain {must} Hz",
                selection.basis.frequencies
            );
        }
        for f in &selection.basis.frequencies {
            assert!(
                pinned.iter().any(|p| (f - p).abs() < 2.0),
                "basis frequency {f} is not one of the beam modes"
            );
        }
    }

    #[test]
    fn noise_only_training_raises_the_warning_flag() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut noise_group = |ty: ContactType| {
            let segs: Vec<Signal> = (0..5)
                .map(|_| {
                    let samples: Vec<f64> =
                        (0..800).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect();
                    Signal::new(1000.0, vec![samples], Units::VelocityMps, 0.0).unwrap()
                })
                .collect();
            (ty, segs)
        };
        let groups = vec![
            noise_group(ContactType::Heel),
            noise_group(ContactType::Midfoot),
            noise_group(ContactType::Toe),
        ];
        let selection = select_dominant_frequencies(&groups, 6, 3.0).unwrap();
        assert!(
            selection.underpopulated,
            "flat noise spectra should not yield a full peak set, got {:?}",
            selection.basis.frequencies
        );
    }

    #[test]
    fn basis_selection_ignores_segment_order() {
        let beam = visible_modes_beam();
        let groups: Vec<(ContactType, Vec<Signal>)> = ContactType::ALL
            .iter()
            .map(|&ty| {
                let segs: Vec<Signal> = (0..5)
                    .map(|k| {
                        step_segment(
                            &beam,
                            ty,
                            550.0 + 70.0 * k as f64,
                            0.9,
                            DURATION_JITTER[k],
                        )
                    })
                    .collect();
                (ty, segs)
            })
            .collect();
        let forward = select_dominant_frequencies(&groups, 6, 3.0).unwrap();
        let shuffled: Vec<(ContactType, Vec<Signal>)> = groups
            .iter()
            .rev()
            .map(|(ty, segs)| {
                let mut r = segs.clone();
                r.reverse();
                (*ty, r)
            })
            .collect();
        let backward = select_dominant_frequencies(&shuffled, 6, 3.0).unwrap();
        assert_eq!(forward.basis.frequencies, backward.basis.frequencies);
    }

    #[test]
    fn tone_feature_vector_is_one_hot() {
        let basis =
            FrequencyBasis::new(vec![11.0, 53.0, 80.0, 112.0, 165.0, 200.0], 3.0).unwrap();
        let features = extract_features(&tone(53.0, 1000.0, 2.0, 0.7), &basis).unwrap();
        assert_eq!(features.values.len(), 6);
        assert_eq!(features.values[1], 1.0, "the 53 Hz component should be the maximum");
        for (i, v) in features.values.iter().enumerate() {
            if i != 1 {
                assert!(*v < 0.05, "leakage at {} Hz is {v}", basis.frequencies[i]);
            }
        }
    }

    #[test]
    fn features_are_scale_invariant() {
        let beam = visible_modes_beam();
        let basis =
            FrequencyBasis::new(vec![11.0, 53.0, 80.0, 112.0, 165.0, 200.0], 3.0).unwrap();
        let segment = step_segment(&beam, ContactType::Heel, 700.0, 0.9, 1.0);
        let mut tripled = segment.clone();
        for v in &mut tripled.channels[0] {
            *v *= 3.0;
        }
        let a = extract_features(&segment, &basis).unwrap();
        let b = extract_features(&tripled, &basis).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() <= 1e-12, "scale changed a feature: {x} vs {y}");
        }
    }

    #[test]
    fn zero_segment_and_empty_basis_are_rejected() {
        let basis = FrequencyBasis::new(vec![11.0, 53.0], 3.0).unwrap();
        let zeros = Signal::new(1000.0, vec![vec![0.0; 500]], Units::VelocityMps, 0.0).unwrap();
        assert!(extract_features(&zeros, &basis).is_err());
        let empty = FrequencyBasis {
            frequencies: vec![],
            half_bandwidth: 3.0,
        };
        assert!(extract_features(&tone(11.0, 1000.0, 1.0, 1.0), &empty).is_err());
    }

    #[test]
    fn midfoot_puts_less_mass_on_the_high_modes_than_heel() {
        let beam = visible_modes_beam();
        let basis =
            FrequencyBasis::new(vec![11.0, 53.0, 80.0, 112.0, 165.0, 200.0], 3.0).unwrap();
        let heel = extract_features(
            &step_segment(&beam, ContactType::Heel, 700.0, 0.9, 1.0),
            &basis,
        )
        .unwrap();
        let midfoot = extract_features(
            &step_segment(&beam, ContactType::Midfoot, 700.0, 0.9, 1.0),
            &basis,
        )
        .unwrap();
        let high_mass = |v: &FeatureVector| -> f64 { v.values[2..].iter().sum() };
        assert!(
            high_mass(&midfoot) < high_mass(&heel),
            "midfoot high-mode mass {:.3} should be below heel's {:.3}",
            high_mass(&midfoot),
            high_mass(&heel)
        );
    }

    #[test]
    fn contact_types_form_separated_clusters() {
        // Repeated trials at one marked spot: the subject varies, the
        // geometry stays comparable, and the contact types must still
        // land in distinct regions of feature space.
        let beam = visible_modes_beam();
        let positions = [0.85, 0.9, 0.95, 0.88, 0.92, 0.9];
        let weights = [500.0, 580.0, 660.0, 740.0, 820.0, 900.0];
        let groups: Vec<(ContactType, Vec<Signal>)> = ContactType::ALL
            .iter()
            .map(|&ty| {
                let segs = positions
                    .iter()
                    .zip(&weights)
                    .zip(&DURATION_JITTER)
                    .map(|((&x, &w), &d)| step_segment(&beam, ty, w, x, d))
                    .collect();
                (ty, segs)
            })
            .collect();
        let basis = select_dominant_frequencies(&groups, 6, 3.0).unwrap().basis;

        let clouds: Vec<Vec<Vec<f64>>> = groups
            .iter()
            .map(|(_, segs)| {
                segs.iter()
                    .map(|s| extract_features(s, &basis).unwrap().values)
                    .collect()
            })
            .collect();
        let centroid = |cloud: &[Vec<f64>]| -> Vec<f64> {
            let d = cloud[0].len();
            let mut c = vec![0.0; d];
            for v in cloud {
                for (ci, vi) in c.iter_mut().zip(v) {
                    *ci += vi;
                }
            }
            c.iter().map(|x| x / cloud.len() as f64).collect()
        };
        let dist = |a: &[f64], b: &[f64]| -> f64 {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt()
        };
        let centroids: Vec<Vec<f64>> = clouds.iter().map(|c| centroid(c)).collect();
        let dispersions: Vec<f64> = clouds
            .iter()
            .zip(&centroids)
            .map(|(cloud, c)| {
                cloud.iter().map(|v| dist(v, c)).sum::<f64>() / cloud.len() as f64
            })
            .collect();
        for i in 0..3 {
            for j in i + 1..3 {
                let separation = dist(&centroids[i], &centroids[j]);
                let spread = 0.5 * (dispersions[i] + dispersions[j]);
                assert!(
                    separation >= 2.0 * spread,
                    "types {i} and {j}: centroid distance {separation:.3} under 2x spread {spread:.3}"
                );
            }
        }
    }
}
