//! Shared gait domain types: contact taxonomy, foot side, abnormality tags,
//! and ground-truth event labels.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// The three foot-floor contact types.
///
/// The enum order is also the deterministic tie-break order used by the
/// contact-type classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ContactType {
    Heel,
    Midfoot,
    Toe,
}

impl ContactType {
    pub const ALL: [ContactType; 3] = [ContactType::Heel, ContactType::Midfoot, ContactType::Toe];

    pub fn as_str(&self) -> &'static str {
        match self {
            ContactType::Heel => "Heel",
            ContactType::Midfoot => "Midfoot",
            ContactType::Toe => "Toe",
        }
    }

    pub fn parse(s: &str) -> Result<ContactType> {
        match s.trim().to_ascii_lowercase().as_str() {
            "heel" => Ok(ContactType::Heel),
            "midfoot" => Ok(ContactType::Midfoot),
            "toe" => Ok(ContactType::Toe),
            other => Err(Error::validation(format!(
                "unknown contact_type `{other}` (expected Heel, Midfoot, or Toe)"
            ))),
        }
    }
}

/// Which foot produced a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Foot {
    Left,
    Right,
}

impl Foot {
    pub fn as_str(&self) -> &'static str {
        match self {
            Foot::Left => "Left",
            Foot::Right => "Right",
        }
    }

    pub fn parse(s: &str) -> Result<Foot> {
        match s.trim().to_ascii_lowercase().as_str() {
            "left" | "l" => Ok(Foot::Left),
            "right" | "r" => Ok(Foot::Right),
            other => Err(Error::validation(format!(
                "unknown foot `{other}` (expected Left or Right)"
            ))),
        }
    }

    pub fn other(&self) -> Foot {
        match self {
            Foot::Left => Foot::Right,
            Foot::Right => Foot::Left,
        }
    }
}

/// Gait abnormality categories detected by the assessment stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Abnormality {
    MidfootStrike,
    ToeWalking,
    Dragging,
    Asymmetry,
}

impl Abnormality {
    pub const ALL: [Abnormality; 4] = [
        Abnormality::MidfootStrike,
        Abnormality::ToeWalking,
        Abnormality::Dragging,
        Abnormality::Asymmetry,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Abnormality::MidfootStrike => "midfoot_strike",
            Abnormality::ToeWalking => "toe_walking",
            Abnormality::Dragging => "dragging",
            Abnormality::Asymmetry => "asymmetry",
        }
    }

    pub fn parse(s: &str) -> Result<Abnormality> {
        match s.trim() {
            "midfoot_strike" => Ok(Abnormality::MidfootStrike),
            "toe_walking" => Ok(Abnormality::ToeWalking),
            "dragging" => Ok(Abnormality::Dragging),
            "asymmetry" => Ok(Abnormality::Asymmetry),
            other => Err(Error::validation(format!("unknown abnormality tag `{other}`"))),
        }
    }
}

/// Ground-truth record for one footstep in a synthetic walk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventLabel {
    pub event_index: usize,
    /// Initial-contact time in seconds.
    pub t_contact: f64,
    /// Foot-off time in seconds.
    pub t_off: f64,
    pub contact_type: ContactType,
    pub foot: Foot,
    /// Empty for a normal step.
    pub abnormality_tags: Vec<Abnormality>,
}

impl EventLabel {
    pub fn duration(&self) -> f64 {
        self.t_off - self.t_contact
    }

    pub fn has_tag(&self, tag: Abnormality) -> bool {
        self.abnormality_tags.contains(&tag)
    }
}
