//! Fuzzy directional hints and the structured instruction prompt.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::RelativeBearing;
use crate::scalar::Scalar;

/// Placeholder token standing in for the visual input.
pub const IMAGE_PLACEHOLDER: &str = "<image>";

/// Upper (inclusive) edges of the |theta| buckets, degrees.
pub const STRAIGHT_MAX_DEG: f64 = 15.0;
pub const FORWARD_MAX_DEG: f64 = 60.0;
pub const SIDE_MAX_DEG: f64 = 120.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FuzzyHint {
    StraightAhead,
    ForwardRight,
    ForwardLeft,
    Right,
    Left,
    RightRear,
    LeftRear,
}

impl FuzzyHint {
    pub const ALL: [FuzzyHint; 7] = [
        FuzzyHint::StraightAhead,
        FuzzyHint::ForwardRight,
        FuzzyHint::ForwardLeft,
        FuzzyHint::Right,
        FuzzyHint::Left,
        FuzzyHint::RightRear,
        FuzzyHint::LeftRear,
    ];

    pub fn phrase(self) -> &'static str {
        match self {
            FuzzyHint::StraightAhead => "straight ahead",
            FuzzyHint::ForwardRight => "forward-right",
            FuzzyHint::ForwardLeft => "forward-left",
            FuzzyHint::Right => "to your right",
            FuzzyHint::Left => "to your left",
            FuzzyHint::RightRear => "to your right rear",
            FuzzyHint::LeftRear => "to your left rear",
        }
    }

    pub fn from_phrase(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|h| h.phrase() == s)
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Left/right mirror image; `StraightAhead` maps to itself.
    pub fn mirror(self) -> Self {
        match self {
            FuzzyHint::StraightAhead => FuzzyHint::StraightAhead,
            FuzzyHint::ForwardRight => FuzzyHint::ForwardLeft,
            FuzzyHint::ForwardLeft => FuzzyHint::ForwardRight,
            FuzzyHint::Right => FuzzyHint::Left,
            FuzzyHint::Left => FuzzyHint::Right,
            FuzzyHint::RightRear => FuzzyHint::LeftRear,
            FuzzyHint::LeftRear => FuzzyHint::RightRear,
        }
    }

    /// Whether the hint is in a side or rear bucket (|theta| > 60 deg).
    pub fn is_lateral(self) -> bool {
        matches!(
            self,
            FuzzyHint::Right | FuzzyHint::Left | FuzzyHint::RightRear | FuzzyHint::LeftRear
        )
    }
}

impl fmt::Display for FuzzyHint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.phrase())
    }
}

/// Maps a relative bearing onto its hint bucket. Bucket edges are closed
/// on the upper side; |theta| = 180 deg resolves to the right rear.
pub fn fuzzy_hint<T: Scalar>(theta: RelativeBearing<T>) -> FuzzyHint {
    let deg = theta.degrees().to_f64().unwrap_or(0.0);
    let mag = deg.abs();
    let right = deg > 0.0 || mag >= 180.0;
    if mag <= STRAIGHT_MAX_DEG {
        FuzzyHint::StraightAhead
    } else if mag <= FORWARD_MAX_DEG {
        if right {
            FuzzyHint::ForwardRight
        } else {
            FuzzyHint::ForwardLeft
        }
    } else if mag <= SIDE_MAX_DEG {
        if right {
            FuzzyHint::Right
        } else {
            FuzzyHint::Left
        }
    } else if right {
        FuzzyHint::RightRear
    } else {
        FuzzyHint::LeftRear
    }
}

/// Sentence wrapping the hint. `{hint}` is substituted verbatim.
pub const PROMPT_TEMPLATE: &str = "The target is {hint}. Fly to and land near";

/// Structured prompt: placeholder, hint sentence, then the description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prompt {
    pub hint: FuzzyHint,
    pub target_description: String,
}

impl Prompt {
    pub fn new(hint: FuzzyHint, description: &str) -> Result<Self> {
        if description.trim().is_empty() {
            return Err(Error::EmptyDescription);
        }
        Ok(Self {
            hint,
            target_description: description.to_owned(),
        })
    }

    pub fn text(&self) -> String {
        format!(
            "{} {} {}.",
            IMAGE_PLACEHOLDER,
            PROMPT_TEMPLATE.replace("{hint}", self.hint.phrase()),
            self.target_description
        )
    }
}

pub fn build_prompt(hint: FuzzyHint, description: &str) -> Result<String> {
    Prompt::new(hint, description).map(|p| p.text())
}
