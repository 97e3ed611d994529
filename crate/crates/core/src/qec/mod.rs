//! Encoded qubits and the code catalog.
//!
//! A [`QecCode`] supplies an encoding circuit and a syndrome-and-correct
//! circuit over its `n` physical qubits. Everything else an encoded qubit
//! needs (decoding, encoded measurement, lifted rotations, swaps and scoped
//! ancillas) is derived generically from those two pieces, with an optional
//! per-code transversal override for rotations.

mod codes;
mod fragment;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ir::{Name, NameSupply, QubitRef, Statement, Unitary};
use crate::sim::{GateClass, Pauli, Rotation};

pub use codes::{BitFlip3, PhaseFlip3, Steane7};
pub use fragment::Fragment;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QecError {
    #[error("unknown code `{0}` (expected one of bitflip3, phaseflip3, steane7)")]
    UnknownCode(String),
    #[error("encoded qubits use different codes ({0} vs {1})")]
    CodeMismatch(&'static str, &'static str),
    #[error("encoded qubits share physical qubits")]
    OverlappingTuples,
}

/// A quantum error-correcting code that protects one logical qubit.
pub trait QecCode: Send + Sync + fmt::Debug {
    /// Stable identifier, also used by the CLI.
    fn name(&self) -> &'static str;

    /// Physical qubits per logical qubit.
    fn n(&self) -> usize;

    /// Maps `α|0⟩ + β|1⟩` on `qubits[0]` (others at `|0⟩`) to the codeword.
    fn encode(&self, qubits: &[QubitRef]) -> Unitary;

    /// Syndrome ancillas used by one correction round.
    fn syndrome_qubits(&self) -> usize;

    /// Extracts the syndrome of `data` into `ancillas` (all starting at
    /// `|0⟩`) and applies the matching Pauli fix, conditioned coherently on
    /// the ancillas.
    fn extract_and_correct(&self, data: &[QubitRef], ancillas: &[QubitRef]) -> Unitary;

    /// Transversal implementation of a logical rotation of the given class,
    /// if the code has one.
    fn transversal(&self, _class: GateClass, _qubits: &[QubitRef]) -> Option<Unitary> {
        None
    }

    /// Single-qubit errors `(tuple position, Pauli)` the code corrects.
    fn correctable(&self) -> Vec<(usize, Pauli)>;
}

/// Shared handle to a catalog entry.
pub type CodeScheme = Arc<dyn QecCode>;

pub const CATALOG: [&str; 3] = ["bitflip3", "phaseflip3", "steane7"];

pub fn get_code(name: &str) -> Result<CodeScheme, QecError> {
    match name {
        "bitflip3" => Ok(Arc::new(BitFlip3)),
        "phaseflip3" => Ok(Arc::new(PhaseFlip3)),
        "steane7" => Ok(Arc::new(Steane7)),
        other => Err(QecError::UnknownCode(other.to_owned())),
    }
}

/// How a correction round disposes of its syndrome ancillas.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CorrectionMode {
    /// Measure every syndrome ancilla and release it.
    #[default]
    MeasureAndReset,
    /// Leave syndrome ancillas allocated and unmeasured; the round is a
    /// pure unitary on fresh qubits.
    Unitary,
}

/// One logical qubit stored across `code.n()` physical qubits. The first
/// qubit is the parent: it carries the logical state whenever the tuple is
/// decoded.
#[derive(Clone)]
pub struct EncodedQubit {
    code: CodeScheme,
    qubits: Vec<QubitRef>,
}

impl fmt::Debug for EncodedQubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.code.name(), self.qubits)
    }
}

impl PartialEq for EncodedQubit {
    fn eq(&self, other: &Self) -> bool {
        self.code.name() == other.code.name() && self.qubits == other.qubits
    }
}

impl EncodedQubit {
    /// # Panics
    /// If the tuple length differs from the code's `n` or repeats a qubit.
    pub fn new(code: CodeScheme, qubits: Vec<QubitRef>) -> Self {
        assert_eq!(qubits.len(), code.n(), "tuple length must match the code");
        for (i, q) in qubits.iter().enumerate() {
            assert!(!qubits[..i].contains(q), "qubit {q} repeated in tuple");
        }
        Self { code, qubits }
    }

    pub fn code(&self) -> &CodeScheme {
        &self.code
    }

    pub fn qubits(&self) -> &[QubitRef] {
        &self.qubits
    }

    pub fn parent(&self) -> &QubitRef {
        &self.qubits[0]
    }

    pub fn encode_unitary(&self) -> Unitary {
        self.code.encode(&self.qubits)
    }

    pub fn decode_unitary(&self) -> Unitary {
        self.encode_unitary().invert()
    }

    /// Syndrome extraction, correction, and ancilla disposal for this tuple.
    pub fn correction_fragment(&self, names: &mut NameSupply, mode: CorrectionMode) -> Fragment {
        let ancillas: Vec<Name> = (0..self.code.syndrome_qubits())
            .map(|_| names.fresh("syn"))
            .collect();
        let refs: Vec<QubitRef> = ancillas.iter().map(QubitRef::from).collect();
        let mut frag = Fragment::new();
        frag.extend(ancillas.iter().map(|a| Statement::MkQbit {
            init: false,
            binder: a.clone(),
        }));
        frag.apply(self.code.extract_and_correct(&self.qubits, &refs));
        if mode == CorrectionMode::MeasureAndReset {
            for a in &refs {
                frag.push(Statement::MeasQbit {
                    target: a.clone(),
                    binder: names.fresh("sbit"),
                });
            }
            frag.extend(refs.iter().map(|a| Statement::Release { target: a.clone() }));
        }
        frag
    }

    /// Decode, measure the parent into `binder`, re-encode.
    pub fn measure_encoded(&self, binder: Name) -> Fragment {
        let mut frag = Fragment::new();
        frag.apply(self.decode_unitary());
        frag.push(Statement::MeasQbit {
            target: self.parent().clone(),
            binder,
        });
        frag.apply(self.encode_unitary());
        frag
    }

    /// Logical rotation: the code's transversal circuit when it has one for
    /// this gate class, otherwise decode, rotate the parent, encode.
    pub fn lifted_rot(&self, r: &Rotation) -> Unitary {
        r.class()
            .and_then(|class| self.code.transversal(class, &self.qubits))
            .unwrap_or_else(|| self.lifted_rot_by_decoding(r))
    }

    /// The generic decode/rotate/encode form of [`EncodedQubit::lifted_rot`].
    pub fn lifted_rot_by_decoding(&self, r: &Rotation) -> Unitary {
        self.decode_unitary()
            .then(Unitary::rot(self.parent().clone(), *r))
            .then(self.encode_unitary())
    }

    /// Qubit-wise swap of two tuples under the same code.
    pub fn lifted_swap(&self, other: &EncodedQubit) -> Result<Unitary, QecError> {
        if self.code.name() != other.code.name() {
            return Err(QecError::CodeMismatch(self.code.name(), other.code.name()));
        }
        if self.qubits.iter().any(|q| other.qubits.contains(q)) {
            return Err(QecError::OverlappingTuples);
        }
        Ok(self
            .qubits
            .iter()
            .zip(&other.qubits)
            .map(|(a, b)| Unitary::swap(a.clone(), b.clone()))
            .collect())
    }
}

/// Allocates a fresh encoded qubit at logical `|init⟩`, with the parent
/// bound to `parent` and the remaining members drawn from `names`.
pub fn mk_encoded(
    code: &CodeScheme,
    init: bool,
    parent: Name,
    names: &mut NameSupply,
) -> (EncodedQubit, Fragment) {
    let stem = format!("{parent}_e");
    let mut members = vec![parent];
    members.extend((1..code.n()).map(|_| names.fresh(&stem)));
    let mut frag = Fragment::new();
    for (i, m) in members.iter().enumerate() {
        frag.push(Statement::MkQbit {
            init: i == 0 && init,
            binder: m.clone(),
        });
    }
    let eq = EncodedQubit::new(code.clone(), members.into_iter().map(QubitRef::Name).collect());
    frag.apply(eq.encode_unitary());
    (eq, frag)
}

/// A scoped encoded ancilla: `n` nested `ulet`s whose body encodes the
/// temporary tuple at logical `|init⟩`, runs `body`, and decodes again. Each
/// physical ancilla must be back at its initial value when released.
pub fn lifted_ulet<E>(
    code: &CodeScheme,
    init: bool,
    binder: Name,
    names: &mut NameSupply,
    body: impl FnOnce(&EncodedQubit, &mut NameSupply) -> Result<Unitary, E>,
) -> Result<Unitary, E> {
    let stem = format!("{binder}_e");
    let mut members = vec![binder];
    members.extend((1..code.n()).map(|_| names.fresh(&stem)));
    let tmp = EncodedQubit::new(code.clone(), members.iter().cloned().map(QubitRef::Name).collect());
    let inner = tmp
        .encode_unitary()
        .then(body(&tmp, names)?)
        .then(tmp.decode_unitary());
    Ok(members
        .into_iter()
        .enumerate()
        .rev()
        .fold(inner, |acc, (i, m)| Unitary::ulet(i == 0 && init, m, acc)))
}

/// Nested conditionals on `controls` that apply `table(pattern)` on the
/// branch where the controls read `pattern`. Empty subtrees are omitted.
pub(crate) fn cond_table(controls: &[QubitRef], table: &dyn Fn(&[bool]) -> Unitary) -> Unitary {
    fn go(controls: &[QubitRef], prefix: &mut Vec<bool>, table: &dyn Fn(&[bool]) -> Unitary) -> Unitary {
        let Some((head, rest)) = controls.split_first() else {
            return table(prefix);
        };
        let mut branch = |v| {
            prefix.push(v);
            let u = go(rest, prefix, table);
            prefix.pop();
            u
        };
        let (f, t) = (branch(false), branch(true));
        if f.is_empty() && t.is_empty() {
            Unitary::empty()
        } else {
            Unitary::cond(head.clone(), f, t)
        }
    }
    go(controls, &mut Vec::new(), table)
}
