//! Signal-to-events pipeline: preprocessing filters, wavelet transform,
//! event detection, and contact timing, composed into one segmentation
//! pass over a recording.

pub mod cwt;
pub mod detect;
pub mod filter;

pub use cwt::{cwt, cwt_channel, Scalogram, MORLET_OMEGA0};
pub use detect::{
    detect_contact_times, detect_footsteps, fuse_event_windows, ContactTiming, DetectionConfig,
    EventWindow, MIN_CALIBRATION,
};
pub use filter::{estimate_noise_psd, lowpass, wiener_denoise, NoisePsd};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{Signal, Units};

/// End-to-end segmentation settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Lowpass cutoff in Hz; `None` skips the filter.
    pub lowpass_cutoff: Option<f64>,
    /// Apply the short-time Wiener denoiser after the lowpass.
    pub use_wiener: bool,
    /// Noise-only interval used for the Wiener noise spectrum and the
    /// detector calibration, seconds.
    pub calibration: (f64, f64),
    pub cwt_f_min: f64,
    pub cwt_f_max: f64,
    pub voices_per_octave: usize,
    pub threshold_sigma: f64,
    pub threshold_floor_ratio: f64,
    pub onset_floor_ratio: f64,
    pub merge_gap: f64,
    pub sustain_ratio: f64,
    pub pad_before: f64,
    pub pad_after: f64,
    pub high_band_hz: f64,
    pub fundamental_band: (f64, f64),
    pub foot_off_ratio: f64,
    pub foot_off_hold: f64,
    pub foot_off_level: f64,
    pub fusion_window: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let d = DetectionConfig::default();
        PipelineConfig {
            lowpass_cutoff: Some(250.0),
            use_wiener: true,
            calibration: (0.0, 0.7),
            cwt_f_min: 5.0,
            cwt_f_max: 250.0,
            voices_per_octave: 12,
            threshold_sigma: d.threshold_sigma,
            threshold_floor_ratio: d.threshold_floor_ratio,
            onset_floor_ratio: d.onset_floor_ratio,
            merge_gap: d.merge_gap,
            sustain_ratio: d.sustain_ratio,
            pad_before: d.pad_before,
            pad_after: d.pad_after,
            high_band_hz: d.high_band_hz,
            fundamental_band: d.fundamental_band,
            foot_off_ratio: d.foot_off_ratio,
            foot_off_hold: d.foot_off_hold,
            foot_off_level: d.foot_off_level,
            fusion_window: d.fusion_window,
        }
    }
}

impl PipelineConfig {
    pub fn detection(&self) -> DetectionConfig {
        DetectionConfig {
            threshold_sigma: self.threshold_sigma,
            threshold_floor_ratio: self.threshold_floor_ratio,
            onset_floor_ratio: self.onset_floor_ratio,
            merge_gap: self.merge_gap,
            sustain_ratio: self.sustain_ratio,
            pad_before: self.pad_before,
            pad_after: self.pad_after,
            high_band_hz: self.high_band_hz,
            fundamental_band: self.fundamental_band,
            foot_off_ratio: self.foot_off_ratio,
            foot_off_hold: self.foot_off_hold,
            foot_off_level: self.foot_off_level,
            fusion_window: self.fusion_window,
        }
    }
}

/// One segmented footstep: the fused window and its contact timing.
#[derive(Debug, Clone)]
pub struct SegmentedEvent {
    pub window: EventWindow,
    pub timing: ContactTiming,
}

/// Output of [`segment_recording`].
#[derive(Debug)]
pub struct SegmentedRecording {
    /// The preprocessed (filtered, denoised) velocity signal.
    pub preprocessed: Signal,
    /// One scalogram per channel of the preprocessed signal.
    pub scalograms: Vec<Scalogram>,
    /// Accepted events, ordered by window start.
    pub events: Vec<SegmentedEvent>,
    /// Human-readable notes for windows that were detected and then
    /// rejected by contact timing.
    pub rejections: Vec<String>,
}

/// Run the full detection pipeline on a velocity recording.
///
/// Displacement recordings are differentiated first, matching a geophone
/// front end. The preprocessed signal is transformed per channel, events
/// are detected per channel and fused across channels, and contact times
/// come from each event's anchor channel.
pub fn segment_recording(signal: &Signal, config: &PipelineConfig) -> Result<SegmentedRecording> {
    let velocity = match signal.units {
        Units::DisplacementM => signal.differentiate(),
        Units::VelocityMps => signal.clone(),
        other => {
            return Err(Error::validation(format!(
                "pipeline expects displacement or velocity input, got {}",
                other.as_str()
            )))
        }
    };
    let mut preprocessed = velocity;
    if let Some(cutoff) = config.lowpass_cutoff {
        preprocessed = lowpass(&preprocessed, cutoff)?;
    }
    if config.use_wiener {
        let noise = estimate_noise_psd(&preprocessed, config.calibration)?;
        preprocessed = wiener_denoise(&preprocessed, &noise)?;
    }

    let scalograms = cwt(
        &preprocessed,
        config.cwt_f_min,
        config.cwt_f_max,
        config.voices_per_octave,
    )?;
    let detection = config.detection();
    let per_channel: Vec<Vec<EventWindow>> = scalograms
        .iter()
        .map(|s| detect_footsteps(s, config.calibration, &detection))
        .collect::<Result<_>>()?;
    let fused = fuse_event_windows(&per_channel, &detection);

    let mut events = Vec::new();
    let mut rejections = Vec::new();
    for window in fused {
        match detect_contact_times(
            &scalograms[window.channel],
            &window,
            config.calibration,
            &detection,
        ) {
            Ok(timing) => events.push(SegmentedEvent { window, timing }),
            Err(e) => rejections.push(e.to_string()),
        }
    }

    Ok(SegmentedRecording {
        preprocessed,
        scalograms,
        events,
        rejections,
    })
}
