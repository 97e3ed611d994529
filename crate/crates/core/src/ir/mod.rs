//! First-order program representation.
//!
//! A program is a flat list of [`Statement`]s. Qubits and measurement results
//! are bound to [`Name`]s instead of host-language variables, which keeps the
//! representation serializable and comparable. Gate sequences are
//! [`Unitary`] values: an invertible monoid of [`GateStep`]s.

mod program;
mod unitary;
mod validate;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sim::QubitId;

pub use program::{ProgramBuilder, QProgram, ResultValue, Statement};
pub use unitary::{GateStep, Unitary};
pub use validate::{ValidationReport, Violation, ViolationKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IrError {
    #[error("invalid identifier {0:?}")]
    InvalidName(String),
    #[error("binder `{0}` is shadowed by an inner ulet")]
    ShadowedBinder(Name),
}

/// An identifier matching `[A-Za-z_][A-Za-z0-9_]*`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Name(String);

impl TryFrom<String> for Name {
    type Error = IrError;

    fn try_from(s: String) -> Result<Self, IrError> {
        Self::new(s)
    }
}

impl From<Name> for String {
    fn from(n: Name) -> String {
        n.0
    }
}

impl Name {
    pub fn new(text: impl Into<String>) -> Result<Self, IrError> {
        let text = text.into();
        let mut chars = text.chars();
        let head_ok = chars
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
        if head_ok && chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
            Ok(Self(text))
        } else {
            Err(IrError::InvalidName(text))
        }
    }

    /// Builds a name from a literal.
    ///
    /// # Panics
    /// If `text` is not a valid identifier.
    pub fn lit(text: &str) -> Self {
        Self::new(text).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}⟩", self.0)
    }
}

/// A gate operand: either a name bound by the program (or an enclosing
/// `ulet`) or a concrete simulator qubit. The text form of an id is `#n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum QubitRef {
    Name(Name),
    Id(QubitId),
}

impl QubitRef {
    pub fn name(text: &str) -> Self {
        Self::Name(Name::lit(text))
    }

    pub fn as_name(&self) -> Option<&Name> {
        match self {
            Self::Name(n) => Some(n),
            Self::Id(_) => None,
        }
    }
}

impl TryFrom<String> for QubitRef {
    type Error = IrError;

    fn try_from(s: String) -> Result<Self, IrError> {
        match s.strip_prefix('#').map(str::parse::<u64>) {
            Some(Ok(i)) => Ok(Self::Id(QubitId(i))),
            Some(Err(_)) => Err(IrError::InvalidName(s)),
            None => Name::new(s).map(Self::Name),
        }
    }
}

impl From<QubitRef> for String {
    fn from(q: QubitRef) -> String {
        q.to_string()
    }
}

impl From<Name> for QubitRef {
    fn from(n: Name) -> Self {
        Self::Name(n)
    }
}

impl From<&Name> for QubitRef {
    fn from(n: &Name) -> Self {
        Self::Name(n.clone())
    }
}

impl From<QubitId> for QubitRef {
    fn from(id: QubitId) -> Self {
        Self::Id(id)
    }
}

impl fmt::Display for QubitRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Name(n) => write!(f, "{n}"),
            Self::Id(id) => write!(f, "{id}"),
        }
    }
}

impl fmt::Debug for QubitRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Name(n) => write!(f, "{n:?}"),
            Self::Id(id) => write!(f, "{id}"),
        }
    }
}

/// Generates identifiers that collide neither with each other nor with a
/// reserved set (typically every name of the program being rewritten).
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    used: std::collections::HashSet<Name>,
    counters: std::collections::HashMap<String, usize>,
}

impl NameSupply {
    pub fn new(reserved: impl IntoIterator<Item = Name>) -> Self {
        Self {
            used: reserved.into_iter().collect(),
            counters: Default::default(),
        }
    }

    /// Reserves `name` so that [`NameSupply::fresh`] never returns it.
    pub fn reserve(&mut self, name: &Name) {
        self.used.insert(name.clone());
    }

    /// A new name of the form `{stem}_{k}`.
    ///
    /// # Panics
    /// If `stem` is not a valid identifier.
    pub fn fresh(&mut self, stem: &str) -> Name {
        let counter = self.counters.entry(stem.to_owned()).or_insert(0);
        loop {
            let candidate = Name::lit(&format!("{stem}_{counter}"));
            *counter += 1;
            if self.used.insert(candidate.clone()) {
                return candidate;
            }
        }
    }
}
