use crate::ir::{QubitRef, Statement, Unitary};

/// A statement sequence spliced into a program. Unlike a full program it
/// has no `Return`; any qubit it allocates internally is measured and
/// released before it ends (or, in unitary correction mode, left allocated).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Fragment {
    stmts: Vec<Statement>,
}

impl Fragment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_statements(stmts: Vec<Statement>) -> Self {
        Self { stmts }
    }

    pub fn statements(&self) -> &[Statement] {
        &self.stmts
    }

    pub fn into_statements(self) -> Vec<Statement> {
        self.stmts
    }

    pub fn is_empty(&self) -> bool {
        self.stmts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.stmts.len()
    }

    pub fn push(&mut self, s: Statement) {
        self.stmts.push(s);
    }

    /// Appends `ApplyU(u)`, skipping empty unitaries.
    pub fn apply(&mut self, u: Unitary) {
        if !u.is_empty() {
            self.stmts.push(Statement::ApplyU(u));
        }
    }

    pub fn append(&mut self, other: Fragment) {
        self.stmts.extend(other.stmts);
    }

    /// Number of `MkQbit` statements.
    pub fn allocations(&self) -> usize {
        self.stmts
            .iter()
            .filter(|s| matches!(s, Statement::MkQbit { .. }))
            .count()
    }

    /// Number of `Release` statements.
    pub fn releases(&self) -> usize {
        self.stmts
            .iter()
            .filter(|s| matches!(s, Statement::Release { .. }))
            .count()
    }

    /// Qubits the fragment measures.
    pub fn measured(&self) -> Vec<&QubitRef> {
        self.stmts
            .iter()
            .filter_map(|s| match s {
                Statement::MeasQbit { target, .. } => Some(target),
                _ => None,
            })
            .collect()
    }
}

impl Extend<Statement> for Fragment {
    fn extend<I: IntoIterator<Item = Statement>>(&mut self, iter: I) {
        self.stmts.extend(iter);
    }
}
