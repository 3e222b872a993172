//! Simply supported beam described by its modal quantities.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Simply supported uniform beam with `mode_count` retained modes.
///
/// Mode shapes are `sin(i*pi*x/length)`. Natural frequencies come from the
/// analytic uniform-beam formula unless `frequency_overrides` pins them to
/// measured values (the shapes and modal masses stay analytic in that case).
#[derive(Debug, Clone, PartialEq)]
pub struct BeamModel {
    pub length: f64,
    pub mass_per_length: f64,
    pub flexural_rigidity: f64,
    pub mode_count: usize,
    pub damping_ratios: Vec<f64>,
    pub sensor_positions: Vec<f64>,
    pub frequency_overrides: Option<Vec<f64>>,
}

impl BeamModel {
    /// Validate the invariants and return the model.
    pub fn new(
        length: f64,
        mass_per_length: f64,
        flexural_rigidity: f64,
        mode_count: usize,
        damping_ratios: Vec<f64>,
        sensor_positions: Vec<f64>,
        frequency_overrides: Option<Vec<f64>>,
    ) -> Result<BeamModel> {
        if !(length > 0.0) {
            return Err(Error::validation("beam.length must be > 0"));
        }
        if !(mass_per_length > 0.0) {
            return Err(Error::validation("beam.mass_per_length must be > 0"));
        }
        if !(flexural_rigidity > 0.0) {
            return Err(Error::validation("beam.flexural_rigidity must be > 0"));
        }
        if mode_count == 0 {
            return Err(Error::validation("beam.mode_count must be >= 1"));
        }
        if damping_ratios.len() != mode_count {
            return Err(Error::validation(format!(
                "beam.damping_ratios must have mode_count={mode_count} entries, got {}",
                damping_ratios.len()
            )));
        }
        if damping_ratios.iter().any(|z| !(*z > 0.0 && *z < 1.0)) {
            return Err(Error::validation(
                "beam.damping_ratios entries must lie in (0, 1)",
            ));
        }
        if sensor_positions.is_empty() {
            return Err(Error::validation("beam.sensor_positions must not be empty"));
        }
        if sensor_positions.iter().any(|x| !(*x > 0.0 && *x < length)) {
            return Err(Error::validation(
                "beam.sensor_positions must lie strictly inside (0, length)",
            ));
        }
        if let Some(overrides) = &frequency_overrides {
            if overrides.len() != mode_count {
                return Err(Error::validation(format!(
                    "beam.frequency_overrides must have mode_count={mode_count} entries, got {}",
                    overrides.len()
                )));
            }
            if overrides.iter().any(|f| !(*f > 0.0)) {
                return Err(Error::validation(
                    "beam.frequency_overrides entries must be > 0",
                ));
            }
            if overrides.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::validation(
                    "beam.frequency_overrides must be strictly increasing",
                ));
            }
        }
        Ok(BeamModel {
            length,
            mass_per_length,
            flexural_rigidity,
            mode_count,
            damping_ratios,
            sensor_positions,
            frequency_overrides,
        })
    }

    /// Natural frequency of mode `i` in Hz (1-based mode index).
    /// Overrides take precedence over the analytic formula.
    pub fn natural_frequency(&self, i: usize) -> Result<f64> {
        self.check_mode_index(i)?;
        if let Some(overrides) = &self.frequency_overrides {
            return Ok(overrides[i - 1]);
        }
        let n = i as f64;
        let omega = (n * PI / self.length).powi(2)
            * (self.flexural_rigidity / self.mass_per_length).sqrt();
        Ok(omega / (2.0 * PI))
    }

    /// Angular natural frequency of mode `i` in rad/s.
    pub fn omega(&self, i: usize) -> Result<f64> {
        Ok(2.0 * PI * self.natural_frequency(i)?)
    }

    /// Mode shape `sin(i*pi*x/length)` evaluated at `x`.
    pub fn mode_shape(&self, i: usize, x: f64) -> f64 {
        (i as f64 * PI * x / self.length).sin()
    }

    /// Modal mass; equal for all modes on a uniform beam.
    pub fn modal_mass(&self) -> f64 {
        self.mass_per_length * self.length / 2.0
    }

    /// Highest retained natural frequency in Hz.
    pub fn max_frequency(&self) -> Result<f64> {
        self.natural_frequency(self.mode_count)
    }

    /// Average of the mode shape over the patch `[center-halfwidth, center+halfwidth]`,
    /// i.e. `(1/2h) * integral of sin(i*pi*x/L) dx`. Degenerates to the point
    /// value at `center` when `halfwidth` is zero.
    pub fn mode_shape_patch_average(&self, i: usize, center: f64, halfwidth: f64) -> f64 {
        if halfwidth == 0.0 {
            return self.mode_shape(i, center);
        }
        let k = i as f64 * PI / self.length;
        let a = center - halfwidth;
        let b = center + halfwidth;
        ((k * a).cos() - (k * b).cos()) / (k * (b - a))
    }

    fn check_mode_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.mode_count {
            return Err(Error::validation(format!(
                "mode index {i} out of range 1..={}",
                self.mode_count
            )));
        }
        Ok(())
    }
}

impl Default for BeamModel {
    /// Wooden-walkway default: 8 m span, four side-mounted sensors, and the
    /// six observed modal frequencies pinned as overrides.
    fn default() -> Self {
        BeamModel::new(
            8.0,
            120.0,
            2.4e7,
            6,
            vec![0.03; 6],
            vec![1.6, 3.2, 4.8, 6.4],
            Some(vec![11.0, 53.0, 80.0, 112.0, 165.0, 200.0]),
        )
        .expect("default beam is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn analytic_beam() -> BeamModel {
        BeamModel::new(10.0, 500.0, 1.0e7, 6, vec![0.02; 6], vec![5.0], None).unwrap()
    }

    #[test]
    fn override_frequencies_returned_exactly() {
        let beam = BeamModel::default();
        assert_eq!(beam.natural_frequency(2).unwrap(), 53.0);
        assert_eq!(beam.natural_frequency(6).unwrap(), 200.0);
    }

    #[test]
    fn analytic_frequency_matches_closed_form() {
        // Independent closed form: f_i = (i^2 * pi / 2) * sqrt(EI / rho) / L^2.
        let beam = analytic_beam();
        let expected = (PI / 2.0) * (1.0e7_f64 / 500.0).sqrt() / 100.0;
        let got = beam.natural_frequency(1).unwrap();
        assert!(
            (got - expected).abs() / expected < 1e-12,
            "f1 = {got}, closed form = {expected}"
        );
        assert!((got - 2.221441469079183).abs() < 1e-12);
    }

    #[test]
    fn frequencies_follow_square_law() {
        let beam = analytic_beam();
        let f1 = beam.natural_frequency(1).unwrap();
        let f2 = beam.natural_frequency(2).unwrap();
        assert!((f2 - 4.0 * f1).abs() / f2 < 1e-12, "f2 should be 4*f1");
    }

    #[test]
    fn frequencies_strictly_increasing() {
        for beam in [analytic_beam(), BeamModel::default()] {
            let mut prev = 0.0;
            for i in 1..=beam.mode_count {
                let f = beam.natural_frequency(i).unwrap();
                assert!(f > prev, "mode {i}: {f} not increasing past {prev}");
                prev = f;
            }
        }
    }

    #[test]
    fn mode_shapes_vanish_at_supports() {
        let beam = analytic_beam();
        for i in 1..=6 {
            assert!(beam.mode_shape(i, 0.0).abs() < 1e-12);
            assert!(beam.mode_shape(i, beam.length).abs() < 1e-9);
        }
    }

    #[test]
    fn modal_mass_is_half_total() {
        let beam = analytic_beam();
        assert_eq!(beam.modal_mass(), 2500.0);
    }

    #[test]
    fn mode_index_out_of_range_rejected() {
        let beam = analytic_beam();
        assert!(beam.natural_frequency(0).is_err());
        assert!(beam.natural_frequency(7).is_err());
    }

    #[test]
    fn patch_average_converges_to_point_value() {
        let beam = analytic_beam();
        let c = 0.37 * beam.length;
        let point = beam.mode_shape(3, c);
        let mut prev_err = f64::INFINITY;
        for h in [0.1, 0.01, 0.001] {
            let avg = beam.mode_shape_patch_average(3, c, h);
            let err = (avg - point).abs();
            assert!(err < prev_err, "patch average should converge as h shrinks");
            prev_err = err;
        }
        assert!(prev_err < 1e-5);
    }
}
