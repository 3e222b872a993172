//! Footstep contact-force profiles and the built-in force templates.
//!
//! A profile stores the foot acceleration history together with the spatial
//! footprint and the vertical/horizontal split of the contact force. The
//! templates encode the three contact types as normalized force shapes:
//! the macro shape (bumps, plateau, or a single sharp peak), a short strike
//! transient at onset, and a train of small stance taps that keeps the
//! high-frequency modes engaged for the whole contact.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dynamics::beam::BeamModel;
use crate::error::{Error, Result};
use crate::types::ContactType;

/// Standard gravity in m/s².
pub const STANDARD_GRAVITY: f64 = 9.80665;

/// Footstep force description: spatial footprint, directional split, and the
/// foot acceleration time history sampled at `force_sample_rate`.
///
/// The acceleration samples cover `[0, contact_duration]`; the force is zero
/// outside that interval. Sample `k` holds the acceleration at time
/// `k / force_sample_rate`, in m/s², negative while the foot loads the floor.
#[derive(Debug, Clone)]
pub struct ContactForceProfile {
    pub contact_type: ContactType,
    pub body_weight: f64,
    pub footprint_center: f64,
    pub footprint_halfwidth: f64,
    pub foot_acceleration: Vec<f64>,
    pub force_sample_rate: f64,
    pub vertical_fraction: f64,
    pub horizontal_fraction: f64,
    pub contact_duration: f64,
}

impl ContactForceProfile {
    /// Validate the invariants and return the profile.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        contact_type: ContactType,
        body_weight: f64,
        footprint_center: f64,
        footprint_halfwidth: f64,
        foot_acceleration: Vec<f64>,
        force_sample_rate: f64,
        vertical_fraction: f64,
        horizontal_fraction: f64,
        contact_duration: f64,
    ) -> Result<ContactForceProfile> {
        if !(body_weight >= 0.0) || !body_weight.is_finite() {
            return Err(Error::validation("force.body_weight must be finite and >= 0"));
        }
        if footprint_halfwidth < 0.0 {
            return Err(Error::validation("force.footprint_halfwidth must be >= 0"));
        }
        if !(contact_duration > 0.0) {
            return Err(Error::validation("force.contact_duration must be > 0"));
        }
        if !(force_sample_rate > 0.0) {
            return Err(Error::validation("force.force_sample_rate must be > 0"));
        }
        if (vertical_fraction + horizontal_fraction - 1.0).abs() > 1e-9 {
            return Err(Error::validation(
                "force.vertical_fraction + force.horizontal_fraction must equal 1",
            ));
        }
        if !(0.0..=1.0).contains(&vertical_fraction) || !(0.0..=1.0).contains(&horizontal_fraction)
        {
            return Err(Error::validation(
                "force fractions must lie in [0, 1]",
            ));
        }
        if foot_acceleration.iter().any(|a| !a.is_finite()) {
            return Err(Error::validation(
                "force.foot_acceleration samples must be finite",
            ));
        }
        if foot_acceleration.len() < 2 {
            return Err(Error::validation(
                "force.foot_acceleration needs at least two samples",
            ));
        }
        Ok(ContactForceProfile {
            contact_type,
            body_weight,
            footprint_center,
            footprint_halfwidth,
            foot_acceleration,
            force_sample_rate,
            vertical_fraction,
            horizontal_fraction,
            contact_duration,
        })
    }

    /// Build a profile of the given contact type from the default templates.
    pub fn template(
        contact_type: ContactType,
        body_weight: f64,
        footprint_center: f64,
        sample_rate: f64,
    ) -> Result<ContactForceProfile> {
        TemplateConfig::default().build(contact_type, body_weight, footprint_center, sample_rate)
    }

    /// Foot acceleration at time `t`, linearly interpolated; zero outside
    /// `[0, contact_duration]`.
    pub fn acceleration_at(&self, t: f64) -> f64 {
        if t < 0.0 || t > self.contact_duration {
            return 0.0;
        }
        let x = t * self.force_sample_rate;
        let k = x.floor() as usize;
        if k + 1 >= self.foot_acceleration.len() {
            return *self.foot_acceleration.last().unwrap();
        }
        let frac = x - k as f64;
        self.foot_acceleration[k] * (1.0 - frac) + self.foot_acceleration[k + 1] * frac
    }

    /// Check that the footprint lies strictly inside the beam span.
    pub fn validate_against(&self, beam: &BeamModel) -> Result<()> {
        let lo = self.footprint_center - self.footprint_halfwidth;
        let hi = self.footprint_center + self.footprint_halfwidth;
        if !(lo > 0.0 && hi < beam.length) {
            return Err(Error::validation(format!(
                "footprint [{lo:.3}, {hi:.3}] m must lie inside (0, {}) m",
                beam.length
            )));
        }
        Ok(())
    }

    /// Scale the force amplitude in place (body weight and acceleration
    /// history together), preserving the shape.
    pub fn scale_amplitude(&mut self, factor: f64) {
        self.body_weight *= factor;
    }
}

/// Modal participation factor P_i: the patch-averaged mode shape weighted by
/// the contact mass over the modal mass. Reduces to the point-load value
/// `(M_bw / m*) * phi_i(center)` as the halfwidth shrinks to zero.
pub fn modal_participation(
    beam: &BeamModel,
    i: usize,
    profile: &ContactForceProfile,
) -> Result<f64> {
    if i == 0 || i > beam.mode_count {
        return Err(Error::validation(format!(
            "mode index {i} out of range 1..={}",
            beam.mode_count
        )));
    }
    if profile.footprint_halfwidth < 0.0 {
        return Err(Error::validation("force.footprint_halfwidth must be >= 0"));
    }
    profile.validate_against(beam)?;
    let contact_mass = profile.body_weight / STANDARD_GRAVITY;
    let shape = beam.mode_shape_patch_average(
        i,
        profile.footprint_center,
        profile.footprint_halfwidth,
    );
    Ok(contact_mass / beam.modal_mass() * shape)
}

/// Shape parameters for one contact-type template. Amplitudes are multiples
/// of body weight; times are seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemplateShape {
    pub duration: f64,
    pub peak_scale: f64,
    pub footprint_halfwidth: f64,
    pub horizontal_fraction: f64,
    pub strike_frequency: f64,
    pub strike_amplitude: f64,
    pub strike_duration: f64,
    pub tap_amplitude: f64,
}

/// Template parameters for all three contact types plus the shared stance-tap
/// pattern. Every field can be overridden through the run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemplateConfig {
    pub heel: TemplateShape,
    pub midfoot: TemplateShape,
    pub toe: TemplateShape,
    pub tap_spacing: f64,
    pub tap_width: f64,
    pub tap_frequency: f64,
}

impl Default for TemplateConfig {
    /// Heel and toe land hard: a short impulsive strike whose spectral
    /// lobe spans everything above the low modes, centered lower for the
    /// heel than for the toe so the two color the high modes differently.
    /// A flat-foot landing spreads the load across the whole sole at
    /// once, so its strike is a longer, gentler ring that stays below the
    /// high-mode band. Stance taps model friction micro-slips; they are
    /// kept small so the deterministic strike, not the tap noise, decides
    /// how much of each mode a step excites.
    fn default() -> Self {
        TemplateConfig {
            heel: TemplateShape {
                duration: 0.7,
                peak_scale: 1.0,
                footprint_halfwidth: 0.06,
                horizontal_fraction: 0.2,
                strike_frequency: 140.0,
                strike_amplitude: 0.35,
                strike_duration: 0.025,
                tap_amplitude: 0.015,
            },
            midfoot: TemplateShape {
                duration: 0.9,
                peak_scale: 1.0,
                footprint_halfwidth: 0.14,
                horizontal_fraction: 0.05,
                strike_frequency: 55.0,
                strike_amplitude: 0.30,
                strike_duration: 0.06,
                tap_amplitude: 0.008,
            },
            toe: TemplateShape {
                duration: 0.5,
                peak_scale: 1.0,
                footprint_halfwidth: 0.03,
                horizontal_fraction: 0.1,
                strike_frequency: 180.0,
                strike_amplitude: 0.45,
                strike_duration: 0.025,
                tap_amplitude: 0.015,
            },
            tap_spacing: 0.036,
            tap_width: 0.018,
            tap_frequency: 175.0,
        }
    }
}

impl TemplateConfig {
    /// Shape parameters for one contact type.
    pub fn shape(&self, contact_type: ContactType) -> &TemplateShape {
        match contact_type {
            ContactType::Heel => &self.heel,
            ContactType::Midfoot => &self.midfoot,
            ContactType::Toe => &self.toe,
        }
    }

    /// Mutable shape parameters for one contact type.
    pub fn shape_mut(&mut self, contact_type: ContactType) -> &mut TemplateShape {
        match contact_type {
            ContactType::Heel => &mut self.heel,
            ContactType::Midfoot => &mut self.midfoot,
            ContactType::Toe => &mut self.toe,
        }
    }

    /// Build a contact profile from the template for `contact_type`.
    pub fn build(
        &self,
        contact_type: ContactType,
        body_weight: f64,
        footprint_center: f64,
        sample_rate: f64,
    ) -> Result<ContactForceProfile> {
        self.build_scaled(contact_type, body_weight, footprint_center, sample_rate, 1.0, 1.0)
    }

    /// Build a profile with per-step multipliers on duration and peak force,
    /// used by the gait synthesizer to vary steps around the template.
    pub fn build_scaled(
        &self,
        contact_type: ContactType,
        body_weight: f64,
        footprint_center: f64,
        sample_rate: f64,
        duration_scale: f64,
        peak_scale: f64,
    ) -> Result<ContactForceProfile> {
        if !(duration_scale > 0.0) || !(peak_scale > 0.0) {
            return Err(Error::validation("template scale factors must be > 0"));
        }
        let shape = self.shape(contact_type);
        let duration = shape.duration * duration_scale;
        let amp = shape.peak_scale * peak_scale;
        let n = (duration * sample_rate).round() as usize + 1;
        if n < 8 {
            return Err(Error::validation(
                "template duration too short for the sample rate",
            ));
        }
        let dt = 1.0 / sample_rate;
        let tap_offset = tap_sequence_offset(body_weight, footprint_center, duration);
        let mut a = vec![0.0; n];
        for (k, slot) in a.iter_mut().enumerate() {
            let t = k as f64 * dt;
            let macro_part = match contact_type {
                ContactType::Heel => heel_macro(t, duration),
                ContactType::Midfoot => midfoot_macro(t, duration),
                ContactType::Toe => toe_macro(t, duration),
            };
            *slot = amp
                * (macro_part
                    + strike_transient(t, shape)
                    + tap_train(t, duration, shape.tap_amplitude, tap_offset, self));
        }
        ContactForceProfile::new(
            contact_type,
            body_weight,
            footprint_center,
            shape.footprint_halfwidth,
            a.iter().map(|f| -f * STANDARD_GRAVITY).collect(),
            sample_rate,
            1.0 - shape.horizontal_fraction,
            shape.horizontal_fraction,
            duration,
        )
    }
}

/// Raised-cosine fade from 1 to 0 over the final `ramp` seconds before
/// `end`. A gentle force release keeps push-off from kicking the low modes
/// harder than the loaded phase drives them.
fn release_envelope(t: f64, end: f64, ramp: f64) -> f64 {
    if t <= end - ramp {
        1.0
    } else if t >= end {
        0.0
    } else {
        0.5 * (1.0 - (PI * (end - t) / ramp).cos())
    }
}

/// Two overlapping half-sine bumps: heel strike load transfer then push-off.
fn heel_macro(t: f64, duration: f64) -> f64 {
    if t < 0.0 || t > duration {
        return 0.0;
    }
    let mut f = 0.0;
    let w1 = 0.55 * duration;
    if t < w1 {
        f += 1.1 * (PI * t / w1).sin();
    }
    let start2 = 0.45 * duration;
    let w2 = duration - start2;
    if t >= start2 {
        f += 1.05 * (PI * (t - start2) / w2).sin();
    }
    f
}

/// Flat-foot stance: the same double hump, but shallow, riding on a plateau,
/// with a quick landing ramp and a long soft release.
fn midfoot_macro(t: f64, duration: f64) -> f64 {
    if t < 0.0 || t > duration {
        return 0.0;
    }
    let w1 = 0.55 * duration;
    let bump1 = if t < w1 { 1.06 * (PI * t / w1).sin() } else { 0.0 };
    let start2 = 0.45 * duration;
    let bump2 = if t >= start2 {
        1.03 * (PI * (t - start2) / (duration - start2)).sin()
    } else {
        0.0
    };
    let hump = bump1.max(bump2).max(0.82);
    let ramp_in = 0.03_f64.min(duration / 8.0);
    let attack = if t < ramp_in {
        0.5 * (1.0 - (PI * t / ramp_in).cos())
    } else {
        1.0
    };
    hump * attack * release_envelope(t, duration, 0.12_f64.min(duration / 4.0))
}

/// Single sharp half-sine peak reaching 1.5x body weight.
fn toe_macro(t: f64, duration: f64) -> f64 {
    let w = 0.8 * duration;
    if t >= 0.0 && t <= w {
        1.5 * (PI * t / w).sin()
    } else {
        0.0
    }
}

/// Hann-windowed tone burst at onset modelling the initial strike.
fn strike_transient(t: f64, shape: &TemplateShape) -> f64 {
    if t < 0.0 || t >= shape.strike_duration || shape.strike_amplitude == 0.0 {
        return 0.0;
    }
    let env = 0.5 * (1.0 - (2.0 * PI * t / shape.strike_duration).cos());
    shape.strike_amplitude * env * (2.0 * PI * shape.strike_frequency * t).sin()
}

/// Golden angle in radians; an irrational rotation that never settles into
/// a repeating cycle.
const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

/// Starting index into the tap-jitter sequence, derived from the step's
/// own parameters so that no two steps of a walk (or of a training set)
/// share a micro-slip pattern.
fn tap_sequence_offset(body_weight: f64, footprint_center: f64, duration: f64) -> u64 {
    let mixed = body_weight.to_bits()
        ^ footprint_center.to_bits().rotate_left(17)
        ^ duration.to_bits().rotate_left(34);
    mixed % 997
}

/// Low-amplitude tone bursts repeated through stance. They model the
/// micro-slips and load shifts of a loaded foot and keep the high-frequency
/// modes engaged until foot-off, which the contact-time detector relies on.
///
/// Spacing and carrier phase are modulated by a golden-angle sequence so
/// the train stays aperiodic: a fixed repetition rate would imprint a
/// Fourier comb on the response spectrum and bury the structure's own
/// modal peaks under forcing lines.
fn tap_train(t: f64, duration: f64, amplitude: f64, offset: u64, cfg: &TemplateConfig) -> f64 {
    if amplitude == 0.0 {
        return 0.0;
    }
    let mut f = 0.0;
    let mut centers: Vec<(f64, f64)> = Vec::new();
    let mut c = 0.012;
    let mut k = offset;
    while c + cfg.tap_width / 2.0 < duration - 0.024 {
        let phase = GOLDEN_ANGLE * ((k % 4096) * (k % 4096)) as f64;
        centers.push((c, phase));
        c += cfg.tap_spacing * (1.0 + 0.3 * (GOLDEN_ANGLE * k as f64).sin());
        k += 1;
    }
    let last = duration - 0.006 - cfg.tap_width / 2.0;
    if centers.last().map_or(true, |p| last - p.0 > cfg.tap_spacing / 2.0) {
        centers.push((last, GOLDEN_ANGLE * ((k % 4096) * (k % 4096)) as f64));
    }
    for (center, phase) in centers {
        let local = t - (center - cfg.tap_width / 2.0);
        if local >= 0.0 && local < cfg.tap_width {
            let env = 0.5 * (1.0 - (2.0 * PI * local / cfg.tap_width).cos());
            f += amplitude * env * (2.0 * PI * cfg.tap_frequency * local + phase).sin();
        }
    }
    f
}
