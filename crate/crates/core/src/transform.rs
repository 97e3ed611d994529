//! The rewrite pass from logical programs to encoded programs.
//!
//! Statements are rewritten one at a time while a register of the encoded
//! qubits created so far is threaded through. Every logical gate becomes its
//! lifted counterpart followed, according to the [`CorrectionPolicy`], by a
//! correction round over the whole register.

use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;

use thiserror::Error;

use crate::ir::{GateStep, NameSupply, QProgram, QubitRef, Statement, Unitary, ValidationReport};
use crate::qec::{self, CodeScheme, CorrectionMode, EncodedQubit, Fragment, QecError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("qubit `{0}` has no encoded counterpart")]
    UnknownQubit(QubitRef),
    #[error("input program is invalid: {0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Qec(#[from] QecError),
}

/// How often correction rounds are inserted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CorrectionPolicy {
    /// After every top-level gate step.
    #[default]
    AfterEachOp,
    /// After every `k`-th top-level gate step.
    EveryK(NonZeroUsize),
    Never,
}

impl fmt::Display for CorrectionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::AfterEachOp => f.write_str("after-each-op"),
            Self::EveryK(k) => write!(f, "every-k:{k}"),
            Self::Never => f.write_str("never"),
        }
    }
}

impl FromStr for CorrectionPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "after-each-op" => Ok(Self::AfterEachOp),
            "never" => Ok(Self::Never),
            _ => s
                .strip_prefix("every-k:")
                .and_then(|k| k.parse().ok())
                .map(Self::EveryK)
                .ok_or_else(|| format!("invalid policy `{s}` (after-each-op, every-k:K with K >= 1, never)")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TransformOptions {
    pub policy: CorrectionPolicy,
    pub correction_mode: CorrectionMode,
}

/// Encoded qubits created so far, most recent first.
#[derive(Clone, Debug, Default)]
pub struct EncodedRegister {
    entries: Vec<EncodedQubit>,
}

impl EncodedRegister {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, eq: EncodedQubit) {
        self.entries.insert(0, eq);
    }

    pub fn entries(&self) -> &[EncodedQubit] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Every physical data qubit, in register order.
    pub fn data_qubits(&self) -> Vec<QubitRef> {
        self.entries.iter().flat_map(|e| e.qubits().iter().cloned()).collect()
    }

    fn remove(&mut self, parent: &QubitRef) -> Option<EncodedQubit> {
        let i = self.entries.iter().position(|e| e.parent() == parent)?;
        Some(self.entries.remove(i))
    }
}

/// The entry whose parent is `q`. Non-parent members do not match.
pub fn lookup_encoded<'a>(q: &QubitRef, reg: &'a EncodedRegister) -> Result<&'a EncodedQubit, TransformError> {
    reg.entries
        .iter()
        .find(|e| e.parent() == q)
        .ok_or_else(|| TransformError::UnknownQubit(q.clone()))
}

/// One correction round per register entry, in register order.
pub fn correct_all(reg: &EncodedRegister, names: &mut NameSupply, mode: CorrectionMode) -> Fragment {
    let mut frag = Fragment::new();
    for eq in &reg.entries {
        frag.append(eq.correction_fragment(names, mode));
    }
    frag
}

/// Where a correction round starts in the transformed program, and the data
/// qubits it protects. These are the points where boundary noise acts.
#[derive(Clone, Debug, PartialEq)]
pub struct Boundary {
    pub index: usize,
    pub data_qubits: Vec<QubitRef>,
}

#[derive(Clone, Debug)]
pub struct Transformed {
    pub program: QProgram,
    pub register: EncodedRegister,
    pub boundaries: Vec<Boundary>,
}

pub fn transform(p: &QProgram, code: &CodeScheme) -> Result<QProgram, TransformError> {
    transform_with(p, code, &TransformOptions::default()).map(|t| t.program)
}

pub fn transform_with(
    p: &QProgram,
    code: &CodeScheme,
    opts: &TransformOptions,
) -> Result<Transformed, TransformError> {
    let report = p.validate();
    if !report.is_valid() {
        return Err(TransformError::Invalid(report));
    }
    let mut pass = Pass {
        code,
        opts,
        names: NameSupply::new(p.bound_names()),
        reg: EncodedRegister::new(),
        out: Vec::new(),
        boundaries: Vec::new(),
        ops: 0,
    };
    for stmt in p.statements() {
        pass.statement(stmt)?;
    }
    Ok(Transformed {
        program: QProgram::new(pass.out),
        register: pass.reg,
        boundaries: pass.boundaries,
    })
}

/// Lifts `u` over encoded qubits without inserting corrections, as done
/// inside conditional branches and scoped-ancilla bodies.
pub fn extend_unitary_pure(
    u: &Unitary,
    reg: &EncodedRegister,
    code: &CodeScheme,
    names: &mut NameSupply,
) -> Result<Unitary, TransformError> {
    Scope { reg, locals: Vec::new(), code }.extend(u, names)
}

struct Scope<'a> {
    reg: &'a EncodedRegister,
    /// Temporaries of enclosing scoped ancillas, innermost last.
    locals: Vec<EncodedQubit>,
    code: &'a CodeScheme,
}

impl Scope<'_> {
    fn lookup(&self, q: &QubitRef) -> Result<&EncodedQubit, TransformError> {
        match self.locals.iter().rev().find(|e| e.parent() == q) {
            Some(e) => Ok(e),
            None => lookup_encoded(q, self.reg),
        }
    }

    fn extend(&mut self, u: &Unitary, names: &mut NameSupply) -> Result<Unitary, TransformError> {
        u.steps().iter().map(|s| self.extend_step(s, names)).collect()
    }

    fn extend_step(&mut self, step: &GateStep, names: &mut NameSupply) -> Result<Unitary, TransformError> {
        Ok(match step {
            GateStep::Rot { target, rotation } => self.lookup(target)?.lifted_rot(rotation),
            GateStep::Swap { a, b } => self.lookup(a)?.lifted_swap(self.lookup(b)?)?,
            GateStep::Cond {
                control,
                when_false,
                when_true,
            } => {
                let c = self.lookup(control)?.clone();
                let f = self.extend(when_false, names)?;
                let t = self.extend(when_true, names)?;
                c.decode_unitary()
                    .then(Unitary::cond(c.parent().clone(), f, t))
                    .then(c.encode_unitary())
            }
            GateStep::Ulet { init, binder, body } => {
                let code = self.code.clone();
                qec::lifted_ulet(&code, *init, binder.clone(), names, |tmp, names| {
                    self.locals.push(tmp.clone());
                    let r = self.extend(body, names);
                    self.locals.pop();
                    r
                })?
            }
        })
    }
}

struct Pass<'a> {
    code: &'a CodeScheme,
    opts: &'a TransformOptions,
    names: NameSupply,
    reg: EncodedRegister,
    out: Vec<Statement>,
    boundaries: Vec<Boundary>,
    ops: usize,
}

impl Pass<'_> {
    fn splice(&mut self, frag: Fragment) {
        self.out.extend(frag.into_statements());
    }

    fn lookup(&self, target: &QubitRef) -> Result<EncodedQubit, TransformError> {
        lookup_encoded(target, &self.reg).cloned()
    }

    fn statement(&mut self, stmt: &Statement) -> Result<(), TransformError> {
        match stmt {
            Statement::MkQbit { init, binder } => {
                let (eq, frag) = qec::mk_encoded(self.code, *init, binder.clone(), &mut self.names);
                self.splice(frag);
                self.reg.push(eq);
            }
            Statement::ApplyU(u) => {
                for step in u.steps() {
                    let lifted = Scope {
                        reg: &self.reg,
                        locals: Vec::new(),
                        code: self.code,
                    }
                    .extend_step(step, &mut self.names)?;
                    if !lifted.is_empty() {
                        self.out.push(Statement::ApplyU(lifted));
                    }
                    self.after_op();
                }
            }
            Statement::MeasQbit { target, binder } => {
                let frag = self.lookup(target)?.measure_encoded(binder.clone());
                self.splice(frag);
            }
            Statement::Release { target } => {
                let eq = self
                    .reg
                    .remove(target)
                    .ok_or_else(|| TransformError::UnknownQubit(target.clone()))?;
                let mut frag = Fragment::new();
                frag.apply(eq.decode_unitary());
                frag.extend(eq.qubits().iter().map(|q| Statement::Release { target: q.clone() }));
                self.splice(frag);
            }
            Statement::Noise { qubits } => {
                let data = qubits
                    .iter()
                    .map(|q| self.lookup(q).map(|e| e.qubits().to_vec()))
                    .collect::<Result<Vec<_>, _>>()?;
                self.out.push(Statement::Noise {
                    qubits: data.concat(),
                });
            }
            Statement::Return { names } => self.out.push(Statement::Return { names: names.clone() }),
        }
        Ok(())
    }

    fn after_op(&mut self) {
        self.ops += 1;
        let due = match self.opts.policy {
            CorrectionPolicy::AfterEachOp => true,
            CorrectionPolicy::EveryK(k) => self.ops.is_multiple_of(k.get()),
            CorrectionPolicy::Never => false,
        };
        if due && !self.reg.is_empty() {
            self.boundaries.push(Boundary {
                index: self.out.len(),
                data_qubits: self.reg.data_qubits(),
            });
            let frag = correct_all(&self.reg, &mut self.names, self.opts.correction_mode);
            self.splice(frag);
        }
    }
}
