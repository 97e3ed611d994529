use std::collections::HashMap;

use super::{QubitId, SimError, StateVector};
use crate::ir::{GateStep, Name, QubitRef, Unitary};

/// Applies `u` to `state`. Operands must be concrete [`QubitId`]s or names
/// bound by an enclosing `ulet` inside `u`.
pub fn apply_unitary(state: &mut StateVector, u: &Unitary) -> Result<(), SimError> {
    let env = HashMap::new();
    Applier {
        env: &env,
        locals: Vec::new(),
        controls: Vec::new(),
        after_gate: &mut |_: &mut StateVector, _: &[QubitId]| {},
    }
    .apply(state, u)
}

pub(super) type GateCallback<'a> = &'a mut dyn FnMut(&mut StateVector, &[QubitId]);

/// Walks a unitary, resolving names and tracking the active controls.
///
/// `after_gate` fires after every step that runs uncontrolled (rotations and
/// swaps at any ulet depth, and whole conditionals), with the program qubits
/// the step touched. Ulet temporaries are never reported.
pub(super) struct Applier<'a> {
    pub env: &'a HashMap<Name, QubitId>,
    pub locals: Vec<(Name, QubitId)>,
    pub controls: Vec<(QubitId, bool)>,
    pub after_gate: GateCallback<'a>,
}

impl Applier<'_> {
    fn resolve(&self, r: &QubitRef) -> Result<QubitId, SimError> {
        match r {
            QubitRef::Id(id) => Ok(*id),
            QubitRef::Name(n) => self
                .locals
                .iter()
                .rev()
                .find(|(b, _)| b == n)
                .map(|(_, id)| *id)
                .or_else(|| self.env.get(n).copied())
                .ok_or_else(|| SimError::UnboundName(n.clone())),
        }
    }

    fn is_local(&self, id: QubitId) -> bool {
        self.locals.iter().any(|(_, l)| *l == id)
    }

    fn notify(&mut self, state: &mut StateVector, touched: &[QubitId]) {
        if !self.controls.is_empty() {
            return;
        }
        let visible: Vec<QubitId> = touched
            .iter()
            .copied()
            .filter(|&q| !self.is_local(q) && state.is_allocated(q))
            .collect();
        if !visible.is_empty() {
            (self.after_gate)(state, &visible);
        }
    }

    pub fn apply(&mut self, state: &mut StateVector, u: &Unitary) -> Result<(), SimError> {
        for step in u.steps() {
            match step {
                GateStep::Rot { target, rotation } => {
                    let q = self.resolve(target)?;
                    state.apply_rotation(q, rotation, &self.controls)?;
                    self.notify(state, &[q]);
                }
                GateStep::Swap { a, b } => {
                    let (qa, qb) = (self.resolve(a)?, self.resolve(b)?);
                    state.apply_swap(qa, qb, &self.controls)?;
                    self.notify(state, &[qa, qb]);
                }
                GateStep::Cond {
                    control,
                    when_false,
                    when_true,
                } => {
                    let c = self.resolve(control)?;
                    if !state.is_allocated(c) {
                        return Err(SimError::UnallocatedQubit(c));
                    }
                    for (value, branch) in [(false, when_false), (true, when_true)] {
                        self.controls.push((c, value));
                        let r = self.apply(state, branch);
                        self.controls.pop();
                        r?;
                    }
                    if self.controls.is_empty() {
                        let mut touched = vec![c];
                        for r in when_false.free_qubits().iter().chain(&when_true.free_qubits()) {
                            touched.push(self.resolve(r)?);
                        }
                        touched.sort();
                        touched.dedup();
                        self.notify(state, &touched);
                    }
                }
                GateStep::Ulet { init, binder, body } => {
                    let tmp = state.alloc(*init)?;
                    self.locals.push((binder.clone(), tmp));
                    let r = self.apply(state, body);
                    self.locals.pop();
                    r?;
                    state.release(tmp, Some(*init))?;
                }
            }
        }
        Ok(())
    }
}
