//! Platt scaling: a logistic map from decision margins to probabilities,
//! `P(abnormal | f) = 1 / (1 + exp(w f + b))`, fitted by regularized maximum
//! likelihood with Platt's smoothed targets. For abnormal-positive margins
//! the likelihood settles on w < 0, so larger margins give larger
//! probabilities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gradient infinity-norm at which the Newton fit is converged.
pub const PLATT_GRADIENT_TOL: f64 = 1e-8;

const MAX_NEWTON_ITERATIONS: usize = 200;

/// Logistic argument clamp. Keeps every emitted probability strictly inside
/// (0, 1) in f64 arithmetic.
const Z_CLAMP: f64 = 30.0;

/// Fitted calibration parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlattModel {
    pub w: f64,
    pub b: f64,
}

impl PlattModel {
    /// Probability of the positive (abnormal) class given a margin.
    pub fn probability(&self, margin: f64) -> f64 {
        let z = (self.w * margin + self.b).clamp(-Z_CLAMP, Z_CLAMP);
        1.0 / (1.0 + z.exp())
    }
}

fn log1p_exp(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Fit (w, b) on held-out margins and their binary labels; `true` marks the
/// positive (abnormal) class.
pub fn platt_fit(margins: &[f64], labels: &[bool]) -> Result<PlattModel> {
    if margins.len() != labels.len() {
        return Err(Error::validation(format!(
            "margin/label length mismatch: {} vs {}",
            margins.len(),
            labels.len()
        )));
    }
    if margins.iter().any(|m| !m.is_finite()) {
        return Err(Error::validation("margins must be finite"));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::training(
            "Platt calibration needs margins from both classes",
        ));
    }
    let spread = margins.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - margins.iter().cloned().fold(f64::INFINITY, f64::min);
    if spread < 1e-9 {
        return Err(Error::training(
            "all margins are equal, the logistic slope is unidentifiable",
        ));
    }

    let t_pos = (n_pos as f64 + 1.0) / (n_pos as f64 + 2.0);
    let t_neg = 1.0 / (n_neg as f64 + 2.0);
    let targets: Vec<f64> = labels
        .iter()
        .map(|&l| if l { t_pos } else { t_neg })
        .collect();

    let loss = |w: f64, b: f64| -> f64 {
        margins
            .iter()
            .zip(&targets)
            .map(|(&f, &t)| {
                let z = w * f + b;
                log1p_exp(z) - (1.0 - t) * z
            })
            .sum()
    };

    let mut w = 0.0;
    let mut b = ((n_neg as f64 + 1.0) / (n_pos as f64 + 1.0)).ln();
    let mut value = loss(w, b);

    for _ in 0..MAX_NEWTON_ITERATIONS {
        let mut gw = 0.0;
        let mut gb = 0.0;
        let mut hww = 1e-12;
        let mut hwb = 0.0;
        let mut hbb = 1e-12;
        for (&f, &t) in margins.iter().zip(&targets) {
            let z = w * f + b;
            let p = 1.0 / (1.0 + z.exp());
            let r = t - p;
            let curv = (p * (1.0 - p)).max(1e-12);
            gw += r * f;
            gb += r;
            hww += curv * f * f;
            hwb += curv * f;
            hbb += curv;
        }
        if gw.abs().max(gb.abs()) < PLATT_GRADIENT_TOL {
            return Ok(PlattModel { w, b });
        }

        let det = hww * hbb - hwb * hwb;
        let dw = (hbb * gw - hwb * gb) / det;
        let db = (hww * gb - hwb * gw) / det;
        let decrement = gw * dw + gb * db;

        let mut step = 1.0;
        loop {
            let candidate = loss(w - step * dw, b - step * db);
            if candidate <= value - 1e-4 * step * decrement {
                w -= step * dw;
                b -= step * db;
                value = candidate;
                break;
            }
            step *= 0.5;
            if step < 1e-12 {
                return Err(Error::training(
                    "Platt line search stalled before convergence",
                ));
            }
        }
    }
    Err(Error::training(
        "Platt fit did not converge within the iteration budget",
    ))
}
