use std::collections::{BTreeMap, HashMap};

use super::apply::Applier;
use super::{QubitId, SimError, SimRng, StateVector};
use crate::ir::{Name, QProgram, QubitRef, ResultValue, Statement, Unitary};
use crate::report::format_float;

/// Measurement branches lighter than this are dropped by exact evaluation.
const BRANCH_PRUNE: f64 = 1e-12;

/// Receives control at the points where noise may act during sampling.
pub trait NoiseHook {
    /// After every uncontrolled gate step, with the program qubits it touched.
    fn after_gate(&mut self, _state: &mut StateVector, _touched: &[QubitId], _rng: &mut SimRng) {}

    /// At every `Noise` statement, with its resolved qubits.
    fn at_site(&mut self, _state: &mut StateVector, _qubits: &[QubitId], _rng: &mut SimRng) {}
}

/// Ignores every noise site.
#[derive(Clone, Copy, Debug, Default)]
pub struct Noiseless;

impl NoiseHook for Noiseless {}

/// Interpreter state for one evaluation: the quantum state plus the name
/// bindings made so far.
#[derive(Clone, Debug, Default)]
pub struct Machine {
    state: StateVector,
    qubits: HashMap<Name, QubitId>,
    bits: HashMap<Name, bool>,
}

impl Machine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut StateVector {
        &mut self.state
    }

    pub fn qubit(&self, n: &Name) -> Option<QubitId> {
        self.qubits.get(n).copied()
    }

    pub fn bit(&self, n: &Name) -> Option<bool> {
        self.bits.get(n).copied()
    }

    pub fn resolve(&self, r: &QubitRef) -> Result<QubitId, SimError> {
        let id = match r {
            QubitRef::Id(id) => *id,
            QubitRef::Name(n) => self.qubit(n).ok_or_else(|| SimError::UnboundName(n.clone()))?,
        };
        if self.state.is_allocated(id) {
            Ok(id)
        } else {
            Err(SimError::UnallocatedQubit(id))
        }
    }

    pub fn apply(&mut self, u: &Unitary) -> Result<(), SimError> {
        self.apply_with(u, &mut |_, _| {})
    }

    fn apply_with(
        &mut self,
        u: &Unitary,
        after_gate: &mut dyn FnMut(&mut StateVector, &[QubitId]),
    ) -> Result<(), SimError> {
        Applier {
            env: &self.qubits,
            locals: Vec::new(),
            controls: Vec::new(),
            after_gate,
        }
        .apply(&mut self.state, u)
    }

    /// Executes every statement except that measurement outcomes are
    /// drawn from `rng`. Returns the result value on `Return`.
    pub fn exec(
        &mut self,
        stmt: &Statement,
        rng: &mut SimRng,
        hook: &mut dyn NoiseHook,
    ) -> Result<Option<ResultValue>, SimError> {
        match stmt {
            Statement::MeasQbit { target, binder } => {
                let q = self.resolve(target)?;
                let b = self.state.measure(q, rng.uniform())?;
                self.bits.insert(binder.clone(), b);
            }
            Statement::ApplyU(u) => {
                self.apply_with(u, &mut |s, touched| hook.after_gate(s, touched, rng))?;
            }
            Statement::Noise { qubits } => {
                let ids = qubits
                    .iter()
                    .map(|r| self.resolve(r))
                    .collect::<Result<Vec<_>, _>>()?;
                hook.at_site(&mut self.state, &ids, rng);
            }
            other => return self.exec_deterministic(other),
        }
        Ok(None)
    }

    /// Statements that never consult randomness.
    fn exec_deterministic(&mut self, stmt: &Statement) -> Result<Option<ResultValue>, SimError> {
        match stmt {
            Statement::MkQbit { init, binder } => {
                let q = self.state.alloc(*init)?;
                self.qubits.insert(binder.clone(), q);
            }
            Statement::ApplyU(u) => self.apply(u)?,
            Statement::Release { target } => {
                let q = self.resolve(target)?;
                self.state.release(q, None)?;
            }
            Statement::Return { names } => {
                let values = names
                    .iter()
                    .map(|n| self.bit(n).ok_or_else(|| SimError::UnboundName(n.clone())))
                    .collect::<Result<_, _>>()?;
                return Ok(Some(ResultValue(values)));
            }
            Statement::MeasQbit { .. } | Statement::Noise { .. } => {
                unreachable!("handled by the caller")
            }
        }
        Ok(None)
    }

    /// Runs a fragment (statements without `Return`) with noiseless sampling.
    pub fn run_fragment(&mut self, stmts: &[Statement], rng: &mut SimRng) -> Result<(), SimError> {
        for s in stmts {
            self.exec(s, rng, &mut Noiseless)?;
        }
        Ok(())
    }
}

/// Runs `p` without validating it first.
pub fn run_program(
    p: &QProgram,
    rng: &mut SimRng,
    hook: &mut dyn NoiseHook,
) -> Result<ResultValue, SimError> {
    let mut m = Machine::new();
    for stmt in p.statements() {
        if let Some(r) = m.exec(stmt, rng, hook)? {
            return Ok(r);
        }
    }
    Err(SimError::Invalid(p.validate()))
}

fn check_valid(p: &QProgram) -> Result<(), SimError> {
    let report = p.validate();
    if report.is_valid() {
        Ok(())
    } else {
        Err(SimError::Invalid(report))
    }
}

/// One sampled evaluation. A pure function of `(p, seed)`.
pub fn evaluate_run(p: &QProgram, seed: u64) -> Result<ResultValue, SimError> {
    check_valid(p)?;
    run_program(p, &mut SimRng::from_seed(seed), &mut Noiseless)
}

/// Exact outcome distribution, obtained by following both outcomes of every
/// measurement weighted by their probabilities.
pub fn evaluate_exact(p: &QProgram) -> Result<OutcomeDistribution, SimError> {
    check_valid(p)?;
    if p.has_noise_sites() {
        return Err(SimError::StochasticNoisePresent);
    }
    let stmts = p.statements();
    let mut dist = BTreeMap::new();
    let mut stack = vec![(0usize, Machine::new(), 1.0f64)];
    while let Some((mut pc, mut m, weight)) = stack.pop() {
        loop {
            match &stmts[pc] {
                Statement::MeasQbit { target, binder } => {
                    let q = m.resolve(target)?;
                    let p1 = m.state.probability(q, true)?.clamp(0.0, 1.0);
                    let branches: Vec<(bool, f64)> = [(false, 1.0 - p1), (true, p1)]
                        .into_iter()
                        .filter(|&(_, pb)| weight * pb >= BRANCH_PRUNE)
                        .collect();
                    let Some((&(last, p_last), rest)) = branches.split_last() else {
                        break;
                    };
                    for &(b, pb) in rest {
                        let mut fork = m.clone();
                        fork.state.collapse(q, b)?;
                        fork.bits.insert(binder.clone(), b);
                        stack.push((pc + 1, fork, weight * pb));
                    }
                    m.state.collapse(q, last)?;
                    m.bits.insert(binder.clone(), last);
                    stack.push((pc + 1, m, weight * p_last));
                    break;
                }
                stmt => {
                    if let Some(r) = m.exec_deterministic(stmt)? {
                        *dist.entry(r).or_insert(0.0) += weight;
                        break;
                    }
                }
            }
            pc += 1;
        }
    }
    Ok(OutcomeDistribution(dist))
}

/// Probability of every result value.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OutcomeDistribution(pub BTreeMap<ResultValue, f64>);

impl OutcomeDistribution {
    pub fn get(&self, r: &ResultValue) -> f64 {
        self.0.get(r).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.0.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ResultValue, f64)> {
        self.0.iter().map(|(r, p)| (r, *p))
    }

    /// Empirical distribution of a tally.
    pub fn from_counts(counts: &BTreeMap<ResultValue, u64>) -> Self {
        let n: u64 = counts.values().sum();
        Self(
            counts
                .iter()
                .map(|(r, &c)| (r.clone(), c as f64 / n.max(1) as f64))
                .collect(),
        )
    }

    /// Largest per-outcome probability difference over the union of supports.
    pub fn max_abs_diff(&self, other: &OutcomeDistribution) -> f64 {
        self.0
            .keys()
            .chain(other.0.keys())
            .map(|r| (self.get(r) - other.get(r)).abs())
            .fold(0.0, f64::max)
    }

    pub fn total_variation(&self, other: &OutcomeDistribution) -> f64 {
        let mut keys: Vec<&ResultValue> = self.0.keys().chain(other.0.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|r| (self.get(r) - other.get(r)).abs())
            .sum::<f64>()
            / 2.0
    }

    /// Most likely outcome; ties go to the smallest value.
    pub fn modal(&self) -> Option<(&ResultValue, f64)> {
        self.iter()
            .fold(None, |best: Option<(&ResultValue, f64)>, (r, p)| match best {
                Some((_, bp)) if bp >= p => best,
                _ => Some((r, p)),
            })
    }

    /// `{"True": 1.0}` style JSON with 12 significant digits.
    pub fn to_json(&self) -> String {
        let body: Vec<String> = self
            .iter()
            .map(|(r, p)| {
                format!(
                    "{}: {}",
                    serde_json::to_string(&r.to_string()).expect("string serializes"),
                    format_float(p)
                )
            })
            .collect();
        format!("{{{}}}", body.join(", "))
    }

    /// Parses the output of [`OutcomeDistribution::to_json`].
    pub fn from_json(text: &str) -> Result<Self, String> {
        let raw: BTreeMap<String, f64> = serde_json::from_str(text).map_err(|e| e.to_string())?;
        raw.into_iter()
            .map(|(k, p)| Ok((k.parse::<ResultValue>()?, p)))
            .collect::<Result<_, String>>()
            .map(Self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QubitRef {
        QubitRef::name(s)
    }

    fn example() -> QProgram {
        QProgram::builder()
            .mk("q1", false)
            .apply(Unitary::x(q("q1")))
            .meas("q1", "b")
            .ret(&["b"])
    }

    fn coin() -> QProgram {
        QProgram::builder()
            .mk("q", false)
            .apply(Unitary::h(q("q")))
            .meas("q", "b")
            .ret(&["b"])
    }

    #[test]
    fn example_program_is_deterministic() {
        for seed in 0..20 {
            assert_eq!(evaluate_run(&example(), seed).unwrap(), ResultValue(vec![true]));
        }
        let d = evaluate_exact(&example()).unwrap();
        assert_eq!(d.to_json(), r#"{"True": 1.0}"#);
    }

    #[test]
    fn alloc_true_measures_true() {
        let p = QProgram::builder().mk("q", true).meas("q", "b").ret(&["b"]);
        assert_eq!(evaluate_run(&p, 3).unwrap(), ResultValue(vec![true]));
    }

    #[test]
    fn coin_is_fair() {
        let d = evaluate_exact(&coin()).unwrap();
        assert!((d.get(&ResultValue(vec![true])) - 0.5).abs() < 1e-12);
        assert!((d.get(&ResultValue(vec![false])) - 0.5).abs() < 1e-12);
        let heads = (0..1000u64)
            .filter(|&s| evaluate_run(&coin(), s).unwrap().0[0])
            .count() as f64
            / 1000.0;
        assert!((heads - 0.5).abs() <= 0.05, "{heads}");
    }

    #[test]
    fn bell_pair_distribution() {
        let p = QProgram::builder()
            .mk("a", false)
            .apply(Unitary::h(q("a")))
            .mk("b", false)
            .apply(Unitary::cnot(q("a"), q("b")))
            .meas("a", "ma")
            .meas("b", "mb")
            .ret(&["ma", "mb"]);
        let d = evaluate_exact(&p).unwrap();
        assert_eq!(d.0.len(), 2);
        assert!((d.get(&ResultValue(vec![false, false])) - 0.5).abs() < 1e-12);
        assert!((d.get(&ResultValue(vec![true, true])) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exact_rejects_noise_sites() {
        let p = QProgram::builder()
            .mk("q", false)
            .stmt(Statement::Noise { qubits: vec![q("q")] })
            .meas("q", "b")
            .ret(&["b"]);
        assert_eq!(evaluate_exact(&p), Err(SimError::StochasticNoisePresent));
        // Sampling treats the site as inert.
        assert_eq!(evaluate_run(&p, 0).unwrap(), ResultValue(vec![false]));
    }

    #[test]
    fn invalid_programs_are_rejected() {
        let p = QProgram::builder().mk("q", false).ret(&["b"]);
        assert!(matches!(evaluate_run(&p, 0), Err(SimError::Invalid(_))));
        assert!(matches!(evaluate_exact(&p), Err(SimError::Invalid(_))));
    }

    #[test]
    fn distribution_json_roundtrip() {
        let d = evaluate_exact(&coin()).unwrap();
        let back = OutcomeDistribution::from_json(&d.to_json()).unwrap();
        assert!(back.max_abs_diff(&d) < 1e-11);
        assert_eq!(back.0.len(), 2);
        assert!((d.modal().unwrap().1 - 0.5).abs() < 1e-12);
    }
}
