use std::collections::BTreeSet;

use super::{IrError, Name, QubitRef};
use crate::sim::Rotation;

/// One step of a [`Unitary`].
#[derive(Clone, Debug, PartialEq)]
pub enum GateStep {
    /// Single-qubit rotation of `target`.
    Rot { target: QubitRef, rotation: Rotation },
    Swap { a: QubitRef, b: QubitRef },
    /// Quantum conditional: `when_false` acts on the component where
    /// `control` is 0, `when_true` where it is 1. Neither branch may touch
    /// `control`.
    Cond {
        control: QubitRef,
        when_false: Unitary,
        when_true: Unitary,
    },
    /// Scoped ancilla: allocate `binder` at `init`, run `body`, and require
    /// the ancilla to be back at `init` (and unentangled) before release.
    Ulet {
        init: bool,
        binder: Name,
        body: Unitary,
    },
}

/// An invertible gate sequence. Composition is concatenation, with the
/// empty sequence as identity.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Unitary {
    steps: Vec<GateStep>,
}

impl Unitary {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_steps(steps: Vec<GateStep>) -> Self {
        Self { steps }
    }

    pub fn steps(&self) -> &[GateStep] {
        &self.steps
    }

    pub fn into_steps(self) -> Vec<GateStep> {
        self.steps
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn push(&mut self, step: GateStep) {
        self.steps.push(step);
    }

    /// Sequential composition: `self` first, then `next`.
    pub fn then(mut self, next: Unitary) -> Unitary {
        self.steps.extend(next.steps);
        self
    }

    pub fn rot(target: impl Into<QubitRef>, rotation: Rotation) -> Self {
        Self::from_steps(vec![GateStep::Rot {
            target: target.into(),
            rotation,
        }])
    }

    pub fn x(target: impl Into<QubitRef>) -> Self {
        Self::rot(target, Rotation::x())
    }

    pub fn z(target: impl Into<QubitRef>) -> Self {
        Self::rot(target, Rotation::z())
    }

    pub fn h(target: impl Into<QubitRef>) -> Self {
        Self::rot(target, Rotation::h())
    }

    pub fn swap(a: impl Into<QubitRef>, b: impl Into<QubitRef>) -> Self {
        Self::from_steps(vec![GateStep::Swap {
            a: a.into(),
            b: b.into(),
        }])
    }

    pub fn cond(control: impl Into<QubitRef>, when_false: Unitary, when_true: Unitary) -> Self {
        Self::from_steps(vec![GateStep::Cond {
            control: control.into(),
            when_false,
            when_true,
        }])
    }

    /// Controlled-X.
    pub fn cnot(control: impl Into<QubitRef>, target: impl Into<QubitRef>) -> Self {
        Self::cond(control, Unitary::empty(), Unitary::x(target))
    }

    pub fn ulet(init: bool, binder: Name, body: Unitary) -> Self {
        Self::from_steps(vec![GateStep::Ulet { init, binder, body }])
    }

    /// The same rotation applied to every qubit of `targets`.
    pub fn layer<'a>(targets: impl IntoIterator<Item = &'a QubitRef>, rotation: Rotation) -> Self {
        targets
            .into_iter()
            .map(|q| GateStep::Rot {
                target: q.clone(),
                rotation,
            })
            .collect()
    }

    /// The inverse circuit: steps reversed, rotations replaced by their
    /// adjoints, conditional branches and ulet bodies inverted in place.
    pub fn invert(&self) -> Unitary {
        self.steps
            .iter()
            .rev()
            .map(|step| match step {
                GateStep::Rot { target, rotation } => GateStep::Rot {
                    target: target.clone(),
                    rotation: rotation.adjoint(),
                },
                GateStep::Swap { .. } => step.clone(),
                GateStep::Cond {
                    control,
                    when_false,
                    when_true,
                } => GateStep::Cond {
                    control: control.clone(),
                    when_false: when_false.invert(),
                    when_true: when_true.invert(),
                },
                GateStep::Ulet { init, binder, body } => GateStep::Ulet {
                    init: *init,
                    binder: binder.clone(),
                    body: body.invert(),
                },
            })
            .collect()
    }

    /// Replaces every free occurrence of `binder` by `q`.
    ///
    /// Fails if some `ulet` inside `self` rebinds `binder`.
    pub fn substitute(&self, binder: &Name, q: &QubitRef) -> Result<Unitary, IrError> {
        let sub = |r: &QubitRef| match r {
            QubitRef::Name(n) if n == binder => q.clone(),
            _ => r.clone(),
        };
        self.steps
            .iter()
            .map(|step| {
                Ok(match step {
                    GateStep::Rot { target, rotation } => GateStep::Rot {
                        target: sub(target),
                        rotation: *rotation,
                    },
                    GateStep::Swap { a, b } => GateStep::Swap { a: sub(a), b: sub(b) },
                    GateStep::Cond {
                        control,
                        when_false,
                        when_true,
                    } => GateStep::Cond {
                        control: sub(control),
                        when_false: when_false.substitute(binder, q)?,
                        when_true: when_true.substitute(binder, q)?,
                    },
                    GateStep::Ulet {
                        init,
                        binder: inner,
                        body,
                    } => {
                        if inner == binder {
                            return Err(IrError::ShadowedBinder(binder.clone()));
                        }
                        GateStep::Ulet {
                            init: *init,
                            binder: inner.clone(),
                            body: body.substitute(binder, q)?,
                        }
                    }
                })
            })
            .collect()
    }

    /// Qubits referenced by the circuit, excluding ulet-local binders.
    pub fn free_qubits(&self) -> BTreeSet<QubitRef> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a Name>, out: &mut BTreeSet<QubitRef>) {
        fn add(r: &QubitRef, bound: &[&Name], out: &mut BTreeSet<QubitRef>) {
            if !matches!(r, QubitRef::Name(n) if bound.contains(&n)) {
                out.insert(r.clone());
            }
        }
        for step in &self.steps {
            match step {
                GateStep::Rot { target, .. } => add(target, bound, out),
                GateStep::Swap { a, b } => {
                    add(a, bound, out);
                    add(b, bound, out);
                }
                GateStep::Cond {
                    control,
                    when_false,
                    when_true,
                } => {
                    add(control, bound, out);
                    when_false.collect_free(bound, out);
                    when_true.collect_free(bound, out);
                }
                GateStep::Ulet { binder, body, .. } => {
                    bound.push(binder);
                    body.collect_free(bound, out);
                    bound.pop();
                }
            }
        }
    }

    /// Total number of rotations and swaps, counting nested steps.
    pub fn gate_count(&self) -> usize {
        self.steps
            .iter()
            .map(|s| match s {
                GateStep::Rot { .. } | GateStep::Swap { .. } => 1,
                GateStep::Cond {
                    when_false,
                    when_true,
                    ..
                } => when_false.gate_count() + when_true.gate_count(),
                GateStep::Ulet { body, .. } => body.gate_count(),
            })
            .sum()
    }
}

impl FromIterator<GateStep> for Unitary {
    fn from_iter<I: IntoIterator<Item = GateStep>>(iter: I) -> Self {
        Self::from_steps(iter.into_iter().collect())
    }
}

impl FromIterator<Unitary> for Unitary {
    fn from_iter<I: IntoIterator<Item = Unitary>>(iter: I) -> Self {
        iter.into_iter().fold(Unitary::empty(), Unitary::then)
    }
}

impl Extend<GateStep> for Unitary {
    fn extend<I: IntoIterator<Item = GateStep>>(&mut self, iter: I) {
        self.steps.extend(iter);
    }
}
