//! Forward physics: beam model, footstep force profiles, modal simulation,
//! and whole-walk synthesis with ground-truth labels.

pub mod beam;
pub mod force;
pub mod gait;
pub mod simulate;

pub use beam::BeamModel;
pub use force::{modal_participation, ContactForceProfile, TemplateConfig, TemplateShape};
pub use gait::{synth_gait_dataset, synth_gait_dataset_with, GaitSequenceSpec, StepPlan, WalkLayout, WalkParams};
pub use simulate::{
    simulate_direct, simulate_modal_trajectories, simulate_response, CouplingRule,
    ModalTrajectories,
};
