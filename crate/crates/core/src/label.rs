use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Binary sprawl label. Ordering puts `N` first; ties resolve toward `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    N,
    Y,
}

impl Label {
    pub fn other(self) -> Label {
        match self {
            Label::N => Label::Y,
            Label::Y => Label::N,
        }
    }

    /// Mining token for the label (`Target_Sprawl` / `Target_NoSprawl`).
    pub fn target_token(self) -> &'static str {
        match self {
            Label::Y => TARGET_SPRAWL,
            Label::N => TARGET_NO_SPRAWL,
        }
    }
}

pub const TARGET_SPRAWL: &str = "Target_Sprawl";
pub const TARGET_NO_SPRAWL: &str = "Target_NoSprawl";
/// Attribute name carried by the target tokens.
pub const TARGET_ATTRIBUTE: &str = "Target";

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::N => "N",
            Label::Y => "Y",
        })
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "Y" | "y" | "Yes" | "YES" => Ok(Label::Y),
            "N" | "n" | "No" | "NO" => Ok(Label::N),
            other => Err(other.to_string()),
        }
    }
}
