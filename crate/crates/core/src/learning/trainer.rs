//! Assembles the full model set for gait assessment: three one-vs-rest
//! contact-type machines and four normal-vs-abnormality machines, each of
//! the latter calibrated with Platt scaling on cross-validated margins.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learning::platt::{platt_fit, PlattModel};
use crate::learning::svm::{default_gamma, train_svm, SvmModel, DEFAULT_C};
use crate::types::{Abnormality, ContactType};

/// Hyperparameters for one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningConfig {
    pub regularization_c: f64,
    /// Kernel width; `None` selects `1 / (d * Var)` from the training data.
    pub gamma: Option<f64>,
    /// Folds for the Platt calibration margins.
    pub calibration_folds: usize,
}

impl Default for LearningConfig {
    fn default() -> Self {
        LearningConfig {
            regularization_c: DEFAULT_C,
            gamma: None,
            calibration_folds: 3,
        }
    }
}

/// One labeled footstep ready for training.
#[derive(Debug, Clone)]
pub struct TrainingSample {
    /// Spectral feature vector on the shared frequency basis.
    pub values: Vec<f64>,
    /// Estimated contact duration, seconds.
    pub duration: f64,
    pub contact_type: ContactType,
    pub tags: Vec<Abnormality>,
}

impl TrainingSample {
    fn is_normal(&self) -> bool {
        self.tags.is_empty()
    }
}

/// One abnormality detector: the margin machine, its calibration, and
/// whether the feature vector carries the contact duration as a trailing
/// component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbnormalityModel {
    pub svm: SvmModel,
    pub platt: PlattModel,
    pub uses_duration: bool,
}

/// The full trained model set, in fixed enum order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaitModels {
    /// One-vs-rest machine per contact type, indexed like `ContactType::ALL`.
    pub contact: Vec<SvmModel>,
    /// Detector per abnormality, indexed like `Abnormality::ALL`.
    pub abnormality: Vec<AbnormalityModel>,
}

/// Duration is informative exactly for the gait patterns the spectrum alone
/// cannot separate: dragging lengthens contact, limping alternates it.
pub fn duration_feature(ab: Abnormality) -> bool {
    matches!(ab, Abnormality::Dragging | Abnormality::Asymmetry)
}

fn assemble(sample: &TrainingSample, with_duration: bool) -> Vec<f64> {
    let mut v = sample.values.clone();
    if with_duration {
        v.push(sample.duration);
    }
    v
}

/// Decision margins for every sample, each produced by a model that did not
/// see that sample: stratified round-robin folds, one hold-out per fold.
pub fn cross_validated_margins(
    features: &[Vec<f64>],
    labels: &[bool],
    c: f64,
    gamma: f64,
    folds: usize,
) -> Result<Vec<f64>> {
    if folds < 2 {
        return Err(Error::config(format!(
            "calibration needs at least 2 folds, got {folds}"
        )));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos < folds || n_neg < folds {
        return Err(Error::training(format!(
            "calibration needs at least {folds} samples per class, got {n_pos} positive and {n_neg} negative"
        )));
    }

    // Round-robin within each class so every fold keeps both classes.
    let mut fold_of = vec![0usize; labels.len()];
    let mut next_pos = 0usize;
    let mut next_neg = 0usize;
    for (i, &l) in labels.iter().enumerate() {
        let counter = if l { &mut next_pos } else { &mut next_neg };
        fold_of[i] = *counter % folds;
        *counter += 1;
    }

    let per_fold: Vec<Vec<(usize, f64)>> = (0..folds)
        .into_par_iter()
        .map(|fold| -> Result<Vec<(usize, f64)>> {
            let mut train_x = Vec::new();
            let mut train_y = Vec::new();
            for (i, f) in features.iter().enumerate() {
                if fold_of[i] != fold {
                    train_x.push(f.clone());
                    train_y.push(labels[i]);
                }
            }
            let model = train_svm(&train_x, &train_y, c, gamma)?;
            (0..features.len())
                .filter(|&i| fold_of[i] == fold)
                .map(|i| Ok((i, model.decision_margin(&features[i])?)))
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut margins = vec![0.0; labels.len()];
    for (i, m) in per_fold.into_iter().flatten() {
        margins[i] = m;
    }
    Ok(margins)
}

fn train_abnormality(
    samples: &[TrainingSample],
    ab: Abnormality,
    config: &LearningConfig,
) -> Result<AbnormalityModel> {
    let with_duration = duration_feature(ab);
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for s in samples {
        if s.is_normal() {
            features.push(assemble(s, with_duration));
            labels.push(false);
        } else if s.tags.contains(&ab) {
            features.push(assemble(s, with_duration));
            labels.push(true);
        }
    }
    if !labels.contains(&true) {
        return Err(Error::training(format!(
            "no training steps tagged {}",
            ab.as_str()
        )));
    }
    if !labels.contains(&false) {
        return Err(Error::training("no normal training steps present"));
    }
    let gamma = match config.gamma {
        Some(g) => g,
        None => default_gamma(&features)?,
    };
    let svm = train_svm(&features, &labels, config.regularization_c, gamma)?;
    let margins = cross_validated_margins(
        &features,
        &labels,
        config.regularization_c,
        gamma,
        config.calibration_folds,
    )?;
    let platt = platt_fit(&margins, &labels)?;
    Ok(AbnormalityModel {
        svm,
        platt,
        uses_duration: with_duration,
    })
}

/// Train the complete model set.
pub fn train_gait_models(samples: &[TrainingSample], config: &LearningConfig) -> Result<GaitModels> {
    if samples.is_empty() {
        return Err(Error::training("empty training set"));
    }
    let dim = samples[0].values.len();
    if samples.iter().any(|s| s.values.len() != dim) {
        return Err(Error::validation(
            "training samples disagree on feature dimension",
        ));
    }

    let contact_features: Vec<Vec<f64>> = samples.iter().map(|s| s.values.clone()).collect();
    let contact_gamma = match config.gamma {
        Some(g) => g,
        None => default_gamma(&contact_features)?,
    };
    let contact: Vec<SvmModel> = ContactType::ALL
        .par_iter()
        .map(|&ty| {
            let labels: Vec<bool> = samples.iter().map(|s| s.contact_type == ty).collect();
            if !labels.contains(&true) {
                return Err(Error::training(format!(
                    "no training steps with contact type {}",
                    ty.as_str()
                )));
            }
            train_svm(
                &contact_features,
                &labels,
                config.regularization_c,
                contact_gamma,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let abnormality: Vec<AbnormalityModel> = Abnormality::ALL
        .par_iter()
        .map(|&ab| train_abnormality(samples, ab, config))
        .collect::<Result<Vec<_>>>()?;

    Ok(GaitModels {
        contact,
        abnormality,
    })
}

impl GaitModels {
    pub fn contact_model(&self, ty: ContactType) -> &SvmModel {
        let idx = ContactType::ALL.iter().position(|&t| t == ty).unwrap();
        &self.contact[idx]
    }

    pub fn abnormality_model(&self, ab: Abnormality) -> &AbnormalityModel {
        let idx = Abnormality::ALL.iter().position(|&a| a == ab).unwrap();
        &self.abnormality[idx]
    }
}
