//! Versioned persistence for the trained model set. A bundle is one JSON
//! document carrying the frequency basis the features were pooled on, every
//! margin machine, every calibration, and an echo of the configuration the
//! models were trained under.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FrequencyBasis;
use crate::learning::platt::PlattModel;
use crate::learning::svm::SvmModel;
use crate::learning::trainer::{duration_feature, AbnormalityModel, GaitModels};
use crate::types::{Abnormality, ContactType};

/// Current on-disk schema version. Loading rejects any other value rather
/// than guessing at field meanings.
pub const BUNDLE_VERSION: u32 = 1;

/// On-disk form of a trained model set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub version: u32,
    pub frequency_basis: FrequencyBasis,
    /// Keyed `contact_<type>` and `abnormality_<tag>`.
    pub svm_models: BTreeMap<String, SvmModel>,
    /// Keyed by abnormality tag.
    pub platt_models: BTreeMap<String, PlattModel>,
    /// Resolved configuration the models were trained with, kept verbatim
    /// for provenance.
    pub config_echo: serde_json::Value,
}

fn contact_key(ty: ContactType) -> String {
    format!("contact_{}", ty.as_str().to_ascii_lowercase())
}

fn abnormality_key(ab: Abnormality) -> String {
    format!("abnormality_{}", ab.as_str())
}

impl ModelBundle {
    /// Package a trained model set for persistence.
    pub fn new(
        basis: FrequencyBasis,
        models: &GaitModels,
        config_echo: serde_json::Value,
    ) -> Result<ModelBundle> {
        if models.contact.len() != ContactType::ALL.len()
            || models.abnormality.len() != Abnormality::ALL.len()
        {
            return Err(Error::config(
                "model set is incomplete: expected one model per contact type and abnormality",
            ));
        }
        let mut svm_models = BTreeMap::new();
        for (&ty, model) in ContactType::ALL.iter().zip(&models.contact) {
            svm_models.insert(contact_key(ty), model.clone());
        }
        let mut platt_models = BTreeMap::new();
        for (&ab, model) in Abnormality::ALL.iter().zip(&models.abnormality) {
            svm_models.insert(abnormality_key(ab), model.svm.clone());
            platt_models.insert(ab.as_str().to_string(), model.platt.clone());
        }
        let bundle = ModelBundle {
            version: BUNDLE_VERSION,
            frequency_basis: basis,
            svm_models,
            platt_models,
            config_echo,
        };
        bundle.models()?;
        Ok(bundle)
    }

    /// Reassemble the model set, validating completeness and that every
    /// machine's dimension matches the stored basis.
    pub fn models(&self) -> Result<GaitModels> {
        let spectral_dim = self.frequency_basis.len();
        let take_svm = |key: &str, want_dim: usize| -> Result<SvmModel> {
            let model = self
                .svm_models
                .get(key)
                .ok_or_else(|| Error::validation(format!("bundle is missing model {key}")))?;
            if model.dimension() != want_dim {
                return Err(Error::validation(format!(
                    "model {key} expects {} features but the bundle basis implies {want_dim}",
                    model.dimension()
                )));
            }
            Ok(model.clone())
        };

        let contact = ContactType::ALL
            .iter()
            .map(|&ty| take_svm(&contact_key(ty), spectral_dim))
            .collect::<Result<Vec<_>>>()?;

        let abnormality = Abnormality::ALL
            .iter()
            .map(|&ab| {
                let uses_duration = duration_feature(ab);
                let dim = spectral_dim + usize::from(uses_duration);
                let svm = take_svm(&abnormality_key(ab), dim)?;
                let platt = self
                    .platt_models
                    .get(ab.as_str())
                    .ok_or_else(|| {
                        Error::validation(format!(
                            "bundle is missing calibration for {}",
                            ab.as_str()
                        ))
                    })?
                    .clone();
                Ok(AbnormalityModel {
                    svm,
                    platt,
                    uses_duration,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(GaitModels {
            contact,
            abnormality,
        })
    }

    /// Write the bundle as pretty-printed JSON.
    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::file(path.display().to_string(), format!("could not serialize bundle: {e}")))?;
        fs::write(path, json.as_bytes())
            .map_err(|e| Error::file(path.display().to_string(), format!("could not write bundle: {e}")))
    }

    /// Read a bundle back, rejecting unknown schema versions.
    pub fn load(path: &Path) -> Result<ModelBundle> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::file(path.display().to_string(), format!("could not read bundle: {e}")))?;
        let bundle: ModelBundle = serde_json::from_str(&text)
            .map_err(|e| Error::file(path.display().to_string(), format!("could not parse bundle: {e}")))?;
        if bundle.version != BUNDLE_VERSION {
            return Err(Error::file(
                path.display().to_string(),
                format!(
                    "bundle version {} is not supported, expected {BUNDLE_VERSION}",
                    bundle.version
                ),
            ));
        }
        Ok(bundle)
    }
}
