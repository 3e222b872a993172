//! Modal time-domain simulation of the beam response to a footstep.
//!
//! Two independent integrators cover the same contract. `simulate_response`
//! integrates each mode with the exact recurrence for piecewise-linear
//! excitation, which is the reference path used everywhere. `simulate_direct`
//! assembles the coupled modal system as a matrix ODE and integrates it with
//! Newmark-beta average acceleration; it exists to cross-validate the first
//! path and shares the same sampled load so any disagreement is integration
//! error, not input error.

use nalgebra::{DMatrix, DVector};

use crate::dynamics::beam::BeamModel;
use crate::dynamics::force::{modal_participation, ContactForceProfile};
use crate::error::{Error, Result};
use crate::signal::{Signal, Units};

/// Minimum ratio of sample rate to the highest retained modal frequency.
pub const NYQUIST_GUARD: f64 = 2.5;

/// Routing of the horizontal force component into the modal loads: only
/// modes at or above `threshold_hz` receive it, scaled by `kappa`.
///
/// `kappa` is well above 1 because stick-slip friction is an efficient
/// high-frequency exciter per unit force: contact types that differ in
/// horizontal share must differ visibly in their high-mode proportion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingRule {
    pub threshold_hz: f64,
    pub kappa: f64,
}

impl Default for CouplingRule {
    fn default() -> Self {
        CouplingRule {
            threshold_hz: 100.0,
            kappa: 3.0,
        }
    }
}

/// Per-mode displacement and velocity histories produced by the simulator.
#[derive(Debug, Clone)]
pub struct ModalTrajectories {
    pub displacement: Vec<Vec<f64>>,
    pub velocity: Vec<Vec<f64>>,
    pub sample_rate: f64,
}

impl ModalTrajectories {
    /// Total mechanical energy per sample, summed over modes, with unit
    /// modal mass: E = 1/2 (v^2 + omega^2 q^2).
    pub fn mechanical_energy(&self, beam: &BeamModel) -> Result<Vec<f64>> {
        let n = self.displacement.first().map_or(0, Vec::len);
        let mut energy = vec![0.0; n];
        for (i, (q, v)) in self.displacement.iter().zip(&self.velocity).enumerate() {
            let omega = beam.omega(i + 1)?;
            for k in 0..n {
                energy[k] += 0.5 * (v[k] * v[k] + omega * omega * q[k] * q[k]);
            }
        }
        Ok(energy)
    }

    /// Response energy per mode: sum of squared modal displacement weighted
    /// by the mode shape at `x`, the per-mode share of the sensor response.
    pub fn response_energy_at(&self, beam: &BeamModel, x: f64) -> Vec<f64> {
        self.displacement
            .iter()
            .enumerate()
            .map(|(i, q)| {
                let phi = beam.mode_shape(i + 1, x);
                q.iter().map(|qi| (phi * qi) * (phi * qi)).sum()
            })
            .collect()
    }
}

fn validate_run(
    beam: &BeamModel,
    profile: &ContactForceProfile,
    duration: f64,
    sample_rate: f64,
) -> Result<()> {
    profile.validate_against(beam)?;
    if duration < profile.contact_duration {
        return Err(Error::validation(format!(
            "simulation duration {duration} s shorter than contact_duration {} s",
            profile.contact_duration
        )));
    }
    let f_max = beam.max_frequency()?;
    if sample_rate < NYQUIST_GUARD * f_max {
        return Err(Error::config(format!(
            "sample_rate {sample_rate} Hz below the {NYQUIST_GUARD}x guard over the top mode at {f_max} Hz"
        )));
    }
    Ok(())
}

/// Per-mode load series on the output grid: p_i[k] = -P_i c_i uf''(t_k),
/// with c_i the vertical/horizontal coupling factor for mode i. Both
/// integrators treat this series as piecewise linear between samples.
fn modal_load_series(
    beam: &BeamModel,
    profile: &ContactForceProfile,
    n: usize,
    sample_rate: f64,
    coupling: &CouplingRule,
) -> Result<Vec<Vec<f64>>> {
    let mut loads = Vec::with_capacity(beam.mode_count);
    for i in 1..=beam.mode_count {
        let participation = modal_participation(beam, i, profile)?;
        let f_i = beam.natural_frequency(i)?;
        let c_i = profile.vertical_fraction
            + if f_i >= coupling.threshold_hz {
                coupling.kappa * profile.horizontal_fraction
            } else {
                0.0
            };
        let mut p = vec![0.0; n];
        for (k, slot) in p.iter_mut().enumerate() {
            let t = k as f64 / sample_rate;
            *slot = -participation * c_i * profile.acceleration_at(t);
        }
        loads.push(p);
    }
    Ok(loads)
}

/// Coefficients of the exact SDOF recurrence for linearly interpolated
/// excitation (unit mass): q_{k+1} = A q_k + B v_k + C p_k + D p_{k+1} and
/// v_{k+1} = A' q_k + B' v_k + C' p_k + D' p_{k+1}.
struct SdofCoeffs {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    a1: f64,
    b1: f64,
    c1: f64,
    d1: f64,
}

fn sdof_coeffs(omega: f64, zeta: f64, dt: f64) -> SdofCoeffs {
    let wd = omega * (1.0 - zeta * zeta).sqrt();
    let e = (-zeta * omega * dt).exp();
    let s = (wd * dt).sin();
    let c = (wd * dt).cos();
    let zq = zeta / (1.0 - zeta * zeta).sqrt();
    let k = omega * omega;
    let two_zw = 2.0 * zeta / (omega * dt);

    SdofCoeffs {
        a: e * (zq * s + c),
        b: e * s / wd,
        c: (two_zw + e * (((1.0 - 2.0 * zeta * zeta) / (wd * dt) - zq) * s - (1.0 + two_zw) * c))
            / k,
        d: (1.0 - two_zw
            + e * ((2.0 * zeta * zeta - 1.0) / (wd * dt) * s + two_zw * c))
            / k,
        a1: -e * (omega / (1.0 - zeta * zeta).sqrt()) * s,
        b1: e * (c - zq * s),
        c1: (-1.0 / dt + e * ((omega / (1.0 - zeta * zeta).sqrt() + zq / dt) * s + c / dt)) / k,
        d1: (1.0 - e * (zq * s + c)) / (k * dt),
    }
}

/// Integrate every mode with the exact piecewise-linear-load recurrence and
/// return the per-mode trajectories.
pub fn simulate_modal_trajectories(
    beam: &BeamModel,
    profile: &ContactForceProfile,
    duration: f64,
    sample_rate: f64,
    coupling: &CouplingRule,
) -> Result<ModalTrajectories> {
    validate_run(beam, profile, duration, sample_rate)?;
    let n = (duration * sample_rate).round() as usize + 1;
    let dt = 1.0 / sample_rate;
    let loads = modal_load_series(beam, profile, n, sample_rate, coupling)?;

    let mut displacement = Vec::with_capacity(beam.mode_count);
    let mut velocity = Vec::with_capacity(beam.mode_count);
    for i in 1..=beam.mode_count {
        let omega = beam.omega(i)?;
        let zeta = beam.damping_ratios[i - 1];
        let co = sdof_coeffs(omega, zeta, dt);
        let p = &loads[i - 1];
        let mut q = vec![0.0; n];
        let mut v = vec![0.0; n];
        for k in 0..n - 1 {
            q[k + 1] = co.a * q[k] + co.b * v[k] + co.c * p[k] + co.d * p[k + 1];
            v[k + 1] = co.a1 * q[k] + co.b1 * v[k] + co.c1 * p[k] + co.d1 * p[k + 1];
        }
        displacement.push(q);
        velocity.push(v);
    }
    Ok(ModalTrajectories {
        displacement,
        velocity,
        sample_rate,
    })
}

fn assemble_channels(
    beam: &BeamModel,
    displacement: &[Vec<f64>],
    sample_rate: f64,
) -> Result<Signal> {
    let n = displacement.first().map_or(0, Vec::len);
    let mut channels = Vec::with_capacity(beam.sensor_positions.len());
    for &x in &beam.sensor_positions {
        let mut ch = vec![0.0; n];
        for (i, q) in displacement.iter().enumerate() {
            let phi = beam.mode_shape(i + 1, x);
            for k in 0..n {
                ch[k] += phi * q[k];
            }
        }
        channels.push(ch);
    }
    Signal::new(sample_rate, channels, Units::DisplacementM, 0.0)
}

/// Beam displacement response at the sensor positions, one channel per
/// sensor. Use [`Signal::differentiate`] on the result for the geophone-like
/// velocity view.
pub fn simulate_response(
    beam: &BeamModel,
    profile: &ContactForceProfile,
    duration: f64,
    sample_rate: f64,
) -> Result<Signal> {
    simulate_response_with_coupling(beam, profile, duration, sample_rate, &CouplingRule::default())
}

/// [`simulate_response`] with an explicit horizontal-coupling rule.
pub fn simulate_response_with_coupling(
    beam: &BeamModel,
    profile: &ContactForceProfile,
    duration: f64,
    sample_rate: f64,
    coupling: &CouplingRule,
) -> Result<Signal> {
    let traj = simulate_modal_trajectories(beam, profile, duration, sample_rate, coupling)?;
    assemble_channels(beam, &traj.displacement, sample_rate)
}

/// Default number of Newmark substeps per output sample.
pub const DIRECT_SUBSTEPS: usize = 128;

/// Brute-force cross-check: the coupled modal system integrated as a matrix
/// ODE with Newmark-beta average acceleration (gamma = 1/2, beta = 1/4).
pub fn simulate_direct(
    beam: &BeamModel,
    profile: &ContactForceProfile,
    duration: f64,
    sample_rate: f64,
) -> Result<Signal> {
    simulate_direct_with_substeps(beam, profile, duration, sample_rate, DIRECT_SUBSTEPS)
}

/// [`simulate_direct`] with an explicit substep count per output sample.
pub fn simulate_direct_with_substeps(
    beam: &BeamModel,
    profile: &ContactForceProfile,
    duration: f64,
    sample_rate: f64,
    substeps: usize,
) -> Result<Signal> {
    validate_run(beam, profile, duration, sample_rate)?;
    if substeps == 0 {
        return Err(Error::config("direct integration needs substeps >= 1"));
    }
    let n = (duration * sample_rate).round() as usize + 1;
    let loads = modal_load_series(beam, profile, n, sample_rate, &CouplingRule::default())?;
    let m = beam.mode_count;

    let mass = DMatrix::<f64>::identity(m, m);
    let mut damping = DMatrix::<f64>::zeros(m, m);
    let mut stiffness = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        let omega = beam.omega(i + 1)?;
        damping[(i, i)] = 2.0 * beam.damping_ratios[i] * omega;
        stiffness[(i, i)] = omega * omega;
    }

    let dt = 1.0 / (sample_rate * substeps as f64);
    let (gamma, beta) = (0.5, 0.25);
    let a0 = 1.0 / (beta * dt * dt);
    let a1 = gamma / (beta * dt);
    let a2 = 1.0 / (beta * dt);
    let a3 = 1.0 / (2.0 * beta) - 1.0;
    let a4 = gamma / beta - 1.0;
    let a5 = dt / 2.0 * (gamma / beta - 2.0);

    let k_eff = &stiffness + &mass * a0 + &damping * a1;
    let lu = k_eff.lu();

    let load_at = |step: usize| -> DVector<f64> {
        // The load is piecewise linear between output-grid samples, so the
        // substep values interpolate the same chords the recurrence sees.
        let pos = step as f64 / substeps as f64;
        let k = (pos.floor() as usize).min(n - 1);
        let frac = pos - k as f64;
        DVector::from_fn(m, |i, _| {
            if k + 1 < n {
                loads[i][k] * (1.0 - frac) + loads[i][k + 1] * frac
            } else {
                loads[i][k]
            }
        })
    };

    let mut u = DVector::<f64>::zeros(m);
    let mut v = DVector::<f64>::zeros(m);
    let mut acc = load_at(0);
    let mut displacement = vec![vec![0.0; n]; m];

    let total_steps = (n - 1) * substeps;
    for step in 1..=total_steps {
        let p_next = load_at(step);
        let rhs = &p_next
            + &mass * (&u * a0 + &v * a2 + &acc * a3)
            + &damping * (&u * a1 + &v * a4 + &acc * a5);
        let u_next = lu
            .solve(&rhs)
            .ok_or_else(|| Error::config("Newmark effective stiffness is singular"))?;
        let acc_next = (&u_next - &u) * a0 - &v * a2 - &acc * a3;
        let v_next = &v + (&acc * (1.0 - gamma) + &acc_next * gamma) * dt;
        u = u_next;
        v = v_next;
        acc = acc_next;
        if step % substeps == 0 {
            let k = step / substeps;
            for i in 0..m {
                displacement[i][k] = u[i];
            }
        }
    }
    assemble_channels(beam, &displacement, sample_rate)
}
