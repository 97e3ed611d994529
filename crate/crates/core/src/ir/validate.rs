use std::collections::HashSet;
use std::fmt;

use super::{GateStep, Name, QProgram, QubitRef, Statement, Unitary};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// A qubit or result name is used without being bound.
    UnboundName(Name),
    /// A statement binder reuses a name that is already bound.
    Rebound(Name),
    /// A `ulet` binder coincides with a name already in scope.
    ShadowedBinder(Name),
    /// A conditional branch acts on its own control qubit.
    ControlTouchedByBranch(QubitRef),
    SwapSameQubit(QubitRef),
    UseAfterRelease(Name),
    MissingReturn,
    ReturnNotLast,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Statement index; `MissingReturn` uses the program length.
    pub index: usize,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "statement {}: {:?}", v.index, v.kind)?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Scope {
    live: HashSet<Name>,
    released: HashSet<Name>,
    bits: HashSet<Name>,
    locals: Vec<Name>,
}

impl Scope {
    fn is_bound(&self, n: &Name) -> bool {
        self.live.contains(n)
            || self.released.contains(n)
            || self.bits.contains(n)
            || self.locals.contains(n)
    }

    fn check_qubit(&self, r: &QubitRef) -> Option<ViolationKind> {
        let QubitRef::Name(n) = r else { return None };
        if self.locals.contains(n) || self.live.contains(n) {
            None
        } else if self.released.contains(n) {
            Some(ViolationKind::UseAfterRelease(n.clone()))
        } else {
            Some(ViolationKind::UnboundName(n.clone()))
        }
    }
}

pub(super) fn validate(p: &QProgram) -> ValidationReport {
    let mut scope = Scope::default();
    let mut out = Vec::new();
    let stmts = p.statements();
    let mut push = |index, kind| out.push(Violation { index, kind });
    let mut returns = 0usize;

    for (i, s) in stmts.iter().enumerate() {
        match s {
            Statement::MkQbit { binder, .. } => {
                if scope.is_bound(binder) {
                    push(i, ViolationKind::Rebound(binder.clone()));
                }
                scope.live.insert(binder.clone());
            }
            Statement::ApplyU(u) => {
                check_unitary(u, &mut scope, &mut |k| push(i, k));
            }
            Statement::MeasQbit { target, binder } => {
                if let Some(k) = scope.check_qubit(target) {
                    push(i, k);
                }
                if scope.is_bound(binder) {
                    push(i, ViolationKind::Rebound(binder.clone()));
                }
                scope.bits.insert(binder.clone());
            }
            Statement::Release { target } => {
                if let Some(k) = scope.check_qubit(target) {
                    push(i, k);
                }
                if let QubitRef::Name(n) = target {
                    if scope.live.remove(n) {
                        scope.released.insert(n.clone());
                    }
                }
            }
            Statement::Noise { qubits } => {
                for q in qubits {
                    if let Some(k) = scope.check_qubit(q) {
                        push(i, k);
                    }
                }
            }
            Statement::Return { names } => {
                returns += 1;
                if i + 1 != stmts.len() {
                    push(i, ViolationKind::ReturnNotLast);
                }
                for n in names {
                    if !scope.bits.contains(n) {
                        push(i, ViolationKind::UnboundName(n.clone()));
                    }
                }
            }
        }
    }
    if returns == 0 {
        push(stmts.len(), ViolationKind::MissingReturn);
    }
    ValidationReport { violations: out }
}

fn check_unitary(u: &Unitary, scope: &mut Scope, push: &mut dyn FnMut(ViolationKind)) {
    for step in u.steps() {
        match step {
            GateStep::Rot { target, .. } => {
                if let Some(k) = scope.check_qubit(target) {
                    push(k);
                }
            }
            GateStep::Swap { a, b } => {
                for r in [a, b] {
                    if let Some(k) = scope.check_qubit(r) {
                        push(k);
                    }
                }
                if a == b {
                    push(ViolationKind::SwapSameQubit(a.clone()));
                }
            }
            GateStep::Cond {
                control,
                when_false,
                when_true,
            } => {
                if let Some(k) = scope.check_qubit(control) {
                    push(k);
                }
                for branch in [when_false, when_true] {
                    if branch.free_qubits().contains(control) {
                        push(ViolationKind::ControlTouchedByBranch(control.clone()));
                    }
                    check_unitary(branch, scope, push);
                }
            }
            GateStep::Ulet { binder, body, .. } => {
                if scope.is_bound(binder) {
                    push(ViolationKind::ShadowedBinder(binder.clone()));
                }
                scope.locals.push(binder.clone());
                check_unitary(body, scope, push);
                scope.locals.pop();
            }
        }
    }
}
