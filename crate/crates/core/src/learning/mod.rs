//! Learning stage: kernel SVM training, probability calibration, model
//! bundling, and gait assessment built on top of the spectral features.

pub mod assess;
pub mod bundle;
pub mod platt;
pub mod svm;
pub mod trainer;

pub use assess::{
    abnormal_probability, assess_gait, asymmetry_index, classify_contact_type, AssessedEvent,
    EventObservation, GaitAssessment,
};
pub use bundle::{ModelBundle, BUNDLE_VERSION};
pub use platt::{platt_fit, PlattModel, PLATT_GRADIENT_TOL};
pub use svm::{
    default_gamma, train_svm, train_svm_report, SvmModel, TrainReport, DEFAULT_C, SMO_TOLERANCE,
};
pub use trainer::{
    cross_validated_margins, duration_feature, train_gait_models, AbnormalityModel, GaitModels,
    LearningConfig, TrainingSample,
};
