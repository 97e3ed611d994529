use std::fmt;

use serde::{Deserialize, Serialize};

use super::{validate, GateStep, Name, QubitRef, Unitary, ValidationReport};

/// One statement of a [`QProgram`].
#[derive(Clone, Debug, PartialEq)]
pub enum Statement {
    /// Allocate a qubit in the basis state given by `init` and bind it.
    MkQbit { init: bool, binder: Name },
    ApplyU(Unitary),
    /// Measure `target`, collapsing it, and bind the outcome.
    MeasQbit { target: QubitRef, binder: Name },
    /// Deallocate a qubit that is in a definite basis state (typically right
    /// after it was measured). Releasing a measured qubit is equivalent to
    /// resetting it and returning it to the pool.
    Release { target: QubitRef },
    /// Stochastic noise site. Inert in noiseless sampling, rejected by exact
    /// evaluation, and fed to the channel by the noise harness.
    Noise { qubits: Vec<QubitRef> },
    /// Final statement: the measured bits forming the result.
    Return { names: Vec<Name> },
}

/// A program: statements executed in order, ending in `Return`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct QProgram {
    stmts: Vec<Statement>,
}

impl QProgram {
    pub fn new(stmts: Vec<Statement>) -> Self {
        Self { stmts }
    }

    pub fn builder() -> ProgramBuilder {
        ProgramBuilder::default()
    }

    pub fn statements(&self) -> &[Statement] {
        &self.stmts
    }

    pub fn into_statements(self) -> Vec<Statement> {
        self.stmts
    }

    pub fn len(&self) -> usize {
        self.stmts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stmts.is_empty()
    }

    pub fn validate(&self) -> ValidationReport {
        validate::validate(self)
    }

    /// Names listed by the final `Return`, if there is one.
    pub fn return_names(&self) -> Option<&[Name]> {
        match self.stmts.last() {
            Some(Statement::Return { names }) => Some(names),
            _ => None,
        }
    }

    pub fn has_noise_sites(&self) -> bool {
        self.stmts.iter().any(|s| matches!(s, Statement::Noise { .. }))
    }

    /// Splits every `ApplyU` into one `ApplyU` per top-level gate step.
    /// Semantics are unchanged.
    pub fn split_steps(&self) -> QProgram {
        let stmts = self
            .stmts
            .iter()
            .flat_map(|s| match s {
                Statement::ApplyU(u) => u
                    .steps()
                    .iter()
                    .map(|g| Statement::ApplyU(Unitary::from_steps(vec![g.clone()])))
                    .collect(),
                other => vec![other.clone()],
            })
            .collect();
        QProgram::new(stmts)
    }

    /// Every name bound anywhere in the program, including ulet binders.
    pub fn bound_names(&self) -> Vec<Name> {
        fn walk(u: &Unitary, out: &mut Vec<Name>) {
            for step in u.steps() {
                match step {
                    GateStep::Cond {
                        when_false,
                        when_true,
                        ..
                    } => {
                        walk(when_false, out);
                        walk(when_true, out);
                    }
                    GateStep::Ulet { binder, body, .. } => {
                        out.push(binder.clone());
                        walk(body, out);
                    }
                    _ => {}
                }
            }
        }
        let mut out = Vec::new();
        for s in &self.stmts {
            match s {
                Statement::MkQbit { binder, .. } | Statement::MeasQbit { binder, .. } => {
                    out.push(binder.clone())
                }
                Statement::ApplyU(u) => walk(u, &mut out),
                _ => {}
            }
        }
        out
    }
}

/// Measurement results selected by `Return`, in its order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ResultValue(pub Vec<bool>);

impl fmt::Display for ResultValue {
    /// `True` / `False` joined by commas.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(if *b { "True" } else { "False" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for ResultValue {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Ok(Self(Vec::new()));
        }
        s.split(',')
            .map(|t| match t.trim() {
                "True" => Ok(true),
                "False" => Ok(false),
                other => Err(format!("bad outcome {other:?}")),
            })
            .collect::<Result<_, _>>()
            .map(Self)
    }
}

/// Fluent construction of programs from literal names.
///
/// Methods panic on invalid identifiers; use [`QProgram::new`] with
/// [`Name::new`] for untrusted input.
#[derive(Default)]
pub struct ProgramBuilder {
    stmts: Vec<Statement>,
}

impl ProgramBuilder {
    pub fn mk(mut self, binder: &str, init: bool) -> Self {
        self.stmts.push(Statement::MkQbit {
            init,
            binder: Name::lit(binder),
        });
        self
    }

    pub fn apply(mut self, u: Unitary) -> Self {
        self.stmts.push(Statement::ApplyU(u));
        self
    }

    pub fn meas(mut self, target: &str, binder: &str) -> Self {
        self.stmts.push(Statement::MeasQbit {
            target: QubitRef::name(target),
            binder: Name::lit(binder),
        });
        self
    }

    pub fn stmt(mut self, s: Statement) -> Self {
        self.stmts.push(s);
        self
    }

    pub fn ret(mut self, names: &[&str]) -> QProgram {
        self.stmts.push(Statement::Return {
            names: names.iter().map(|n| Name::lit(n)).collect(),
        });
        QProgram::new(self.stmts)
    }
}
