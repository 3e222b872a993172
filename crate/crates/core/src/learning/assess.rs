//! Gait assessment: contact-type prediction per footstep, calibrated
//! abnormality probabilities per footstep, and per-walk summaries.

use crate::error::{Error, Result};
use crate::learning::trainer::{AbnormalityModel, GaitModels};
use crate::types::{Abnormality, ContactType};

/// One detected footstep ready for assessment.
#[derive(Debug, Clone)]
pub struct EventObservation {
    pub event_index: usize,
    /// Spectral feature vector on the bundle's frequency basis.
    pub values: Vec<f64>,
    /// Estimated contact duration, seconds.
    pub duration: f64,
}

/// Per-event assessment output.
#[derive(Debug, Clone)]
pub struct AssessedEvent {
    pub event_index: usize,
    pub contact_type: ContactType,
    /// Probabilities indexed like `Abnormality::ALL`.
    pub probabilities: Vec<f64>,
    pub duration: f64,
}

/// Whole-walk assessment.
#[derive(Debug, Clone)]
pub struct GaitAssessment {
    pub events: Vec<AssessedEvent>,
    /// Median per-event probability, indexed like `Abnormality::ALL`.
    pub median_probabilities: Vec<f64>,
    /// `None` when fewer than two events were observed.
    pub asymmetry_index: Option<f64>,
    pub event_count: usize,
}

/// Deterministic argmax over per-type margins: the largest margin wins,
/// ties resolve to the earliest contact type in enum order.
pub fn argmax_contact(margins: [f64; 3]) -> ContactType {
    let mut best = ContactType::Heel;
    let mut best_margin = margins[0];
    for (ty, &m) in ContactType::ALL.iter().zip(&margins).skip(1) {
        if m > best_margin {
            best = *ty;
            best_margin = m;
        }
    }
    best
}

/// Predict the contact type of one feature vector.
pub fn classify_contact_type(models: &GaitModels, values: &[f64]) -> Result<ContactType> {
    if models.contact.len() != 3 {
        return Err(Error::config(format!(
            "expected one model per contact type, found {}",
            models.contact.len()
        )));
    }
    let mut margins = [0.0; 3];
    for (slot, model) in margins.iter_mut().zip(&models.contact) {
        *slot = model.decision_margin(values)?;
    }
    Ok(argmax_contact(margins))
}

/// Calibrated probability that one footstep shows the detector's
/// abnormality. The duration is appended when the detector was trained
/// with it.
pub fn abnormal_probability(
    model: &AbnormalityModel,
    values: &[f64],
    duration: f64,
) -> Result<f64> {
    let margin = if model.uses_duration {
        let mut augmented = values.to_vec();
        augmented.push(duration);
        model.svm.decision_margin(&augmented)?
    } else {
        model.svm.decision_margin(values)?
    };
    Ok(model.platt.probability(margin))
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Asymmetry under the alternating-feet assumption: each foot claims every
/// other step, so a limp shows up as a gap between the two alternating
/// duration means, normalized by the overall mean.
pub fn asymmetry_index(durations: &[f64]) -> Option<f64> {
    if durations.len() < 2 {
        return None;
    }
    let (mut odd, mut even) = (Vec::new(), Vec::new());
    for (k, &d) in durations.iter().enumerate() {
        if k % 2 == 0 {
            even.push(d);
        } else {
            odd.push(d);
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let all =
        durations.iter().sum::<f64>() / durations.len() as f64;
    if all <= 0.0 {
        return None;
    }
    Some((mean(&odd) - mean(&even)).abs() / all)
}

/// Assess an ordered walk of detected footsteps.
pub fn assess_gait(
    observations: &[EventObservation],
    models: &GaitModels,
) -> Result<GaitAssessment> {
    if observations.is_empty() {
        return Err(Error::validation("no events to assess"));
    }
    if models.abnormality.len() != Abnormality::ALL.len() {
        return Err(Error::config(format!(
            "expected one detector per abnormality, found {}",
            models.abnormality.len()
        )));
    }

    let mut events = Vec::with_capacity(observations.len());
    for obs in observations {
        let contact_type = classify_contact_type(models, &obs.values)?;
        let probabilities = models
            .abnormality
            .iter()
            .map(|m| abnormal_probability(m, &obs.values, obs.duration))
            .collect::<Result<Vec<f64>>>()?;
        events.push(AssessedEvent {
            event_index: obs.event_index,
            contact_type,
            probabilities,
            duration: obs.duration,
        });
    }

    let median_probabilities: Vec<f64> = (0..Abnormality::ALL.len())
        .map(|k| median(events.iter().map(|e| e.probabilities[k]).collect()))
        .collect();
    let durations: Vec<f64> = events.iter().map(|e| e.duration).collect();

    Ok(GaitAssessment {
        event_count: events.len(),
        median_probabilities,
        asymmetry_index: asymmetry_index(&durations),
        events,
    })
}

impl GaitAssessment {
    pub fn median_probability(&self, ab: Abnormality) -> f64 {
        let idx = Abnormality::ALL.iter().position(|&a| a == ab).unwrap();
        self.median_probabilities[idx]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learning::svm::SvmModel;
    use crate::learning::testutil::toy_samples;
    use crate::learning::trainer::{train_gait_models, LearningConfig};

    fn toy_models() -> GaitModels {
        train_gait_models(&toy_samples(), &LearningConfig::default()).unwrap()
    }

    #[test]
    fn argmax_ties_break_toward_heel_and_survive_monotone_transforms() {
        assert_eq!(argmax_contact([0.3, 0.3, 0.3]), ContactType::Heel);
        assert_eq!(argmax_contact([0.1, 0.4, 0.4]), ContactType::Midfoot);
        let cases = [
            [0.9, -0.2, 0.1],
            [-1.0, 2.0, 1.9],
            [0.0, 0.0, 0.5],
            [-3.0, -2.0, -1.0],
        ];
        for margins in cases {
            let base = argmax_contact(margins);
            for (a, b) in [(2.0, 0.0), (0.5, 1.0), (10.0, -3.0)] {
                let scaled = margins.map(|m| a * m + b);
                assert_eq!(
                    argmax_contact(scaled),
                    base,
                    "positive affine transform must not change the argmax"
                );
            }
        }
    }

    #[test]
    fn equal_margin_models_classify_as_heel() {
        let shared = SvmModel {
            support_vectors: vec![vec![0.0, 0.0]],
            dual_coefficients: vec![1.0],
            bias: 0.0,
            kernel_gamma: 1.0,
            regularization_c: 10.0,
        };
        let models = GaitModels {
            contact: vec![shared.clone(), shared.clone(), shared],
            abnormality: vec![],
        };
        assert_eq!(
            classify_contact_type(&models, &[0.3, -0.4]).unwrap(),
            ContactType::Heel,
            "identical models tie on every input and must fall back to Heel"
        );
    }

    #[test]
    fn toy_steps_classify_as_their_contact_type() {
        let models = toy_models();
        for s in toy_samples() {
            assert_eq!(
                classify_contact_type(&models, &s.values).unwrap(),
                s.contact_type,
                "toy sample should classify as {:?}",
                s.contact_type
            );
        }
    }

    #[test]
    fn alternating_durations_give_the_expected_index() {
        let idx = asymmetry_index(&[0.6, 0.9, 0.6, 0.9]).unwrap();
        assert!(
            (idx - 0.4).abs() < 1e-12,
            "0.3 gap over 0.75 mean should give 0.4, got {idx}"
        );
        assert!(asymmetry_index(&[0.7]).is_none(), "one step has no asymmetry");
        let sym = asymmetry_index(&[0.7, 0.7, 0.7, 0.7]).unwrap();
        assert!(sym.abs() < 1e-12, "equal durations mean zero asymmetry");
    }

    #[test]
    fn normal_walk_scores_low_on_every_abnormality() {
        let models = toy_models();
        let observations: Vec<EventObservation> = (0..6)
            .map(|k| EventObservation {
                event_index: k,
                values: vec![1.0, 0.1, 0.6, 0.2],
                duration: 0.7,
            })
            .collect();
        let assessment = assess_gait(&observations, &models).unwrap();
        assert_eq!(assessment.event_count, 6);
        assert_eq!(assessment.asymmetry_index, Some(0.0));
        for (&ab, &p) in Abnormality::ALL.iter().zip(&assessment.median_probabilities) {
            assert!(p > 0.0 && p < 1.0, "{}: probability {p} out of range", ab.as_str());
            assert!(
                p < 0.5,
                "normal walk scored {p} on {}, expected < 0.5",
                ab.as_str()
            );
        }
    }

    #[test]
    fn toe_walking_sequence_trips_the_toe_walking_detector() {
        let models = toy_models();
        let observations: Vec<EventObservation> = (0..5)
            .map(|k| EventObservation {
                event_index: k,
                values: vec![0.4, 0.1, 0.9, 0.7],
                duration: 0.5,
            })
            .collect();
        let assessment = assess_gait(&observations, &models).unwrap();
        let toe = assessment.median_probability(Abnormality::ToeWalking);
        let midfoot = assessment.median_probability(Abnormality::MidfootStrike);
        assert!(toe > 0.5, "toe-walking median {toe} should exceed 0.5");
        assert!(
            midfoot < 0.5,
            "midfoot-strike median {midfoot} should stay below 0.5 on toe steps"
        );
        for &ab in &Abnormality::ALL {
            let p = assessment.median_probability(ab);
            assert!(p > 0.0 && p < 1.0, "{}: median {p} out of range", ab.as_str());
        }
    }

    #[test]
    fn single_event_still_assesses_without_asymmetry() {
        let models = toy_models();
        let assessment = assess_gait(
            &[EventObservation {
                event_index: 0,
                values: vec![1.0, 0.1, 0.6, 0.2],
                duration: 0.7,
            }],
            &models,
        )
        .unwrap();
        assert_eq!(assessment.event_count, 1);
        assert!(assessment.asymmetry_index.is_none());
        assert_eq!(assessment.events[0].probabilities.len(), 4);
        assert!(assess_gait(&[], &models).is_err(), "empty walks are rejected");
    }
}
