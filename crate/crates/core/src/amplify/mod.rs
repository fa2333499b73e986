//! Input amplification (new test inputs) and assertion amplification (new
//! oracles from observed state).

mod assertions;
mod edit;
mod input;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::syntax::TestMethod;

pub use assertions::{generate_assertions, serialize_expected, Discarded, Unserializable};
pub use edit::{strip_assertions, Edit};
pub use input::{
    amplify_boolean, amplify_calls, amplify_numeric, amplify_string, apply_all, apply_kind, synthesize_object,
    Unconstructible, PRINTABLE,
};
pub(crate) use input::body_key;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AmplifierKind {
    NumericLiteral,
    StringLiteral,
    BooleanLiteral,
    CallDuplication,
    CallRemoval,
    CallAddition,
    /// Lets call addition build object arguments; produces no candidates of
    /// its own.
    ObjectSynthesis,
}

impl AmplifierKind {
    pub const ALL: [AmplifierKind; 7] = [
        AmplifierKind::NumericLiteral,
        AmplifierKind::StringLiteral,
        AmplifierKind::BooleanLiteral,
        AmplifierKind::CallDuplication,
        AmplifierKind::CallRemoval,
        AmplifierKind::CallAddition,
        AmplifierKind::ObjectSynthesis,
    ];
}

impl fmt::Display for AmplifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown amplifier `{0}`")]
pub struct UnknownAmplifier(pub String);

impl FromStr for AmplifierKind {
    type Err = UnknownAmplifier;

    /// Accepts the variant name in any case, with or without underscores.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let wanted: String = s.chars().filter(|c| *c != '_' && *c != '-').collect::<String>().to_lowercase();
        Self::ALL
            .into_iter()
            .find(|k| k.to_string().to_lowercase() == wanted)
            .ok_or_else(|| UnknownAmplifier(s.to_string()))
    }
}

/// An input-amplified test. Its body has no assertions yet.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub test: TestMethod,
    /// The change relative to the parent with its assertions stripped.
    pub edit: Edit,
    /// Iteration that produced the candidate, starting at 1.
    pub generation: usize,
}
