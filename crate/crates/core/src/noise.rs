//! Pauli noise channels, deterministic fault injection, and the Monte Carlo
//! harness comparing a program against its encoded form.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};
use thiserror::Error;

use crate::ir::{Name, QProgram, QubitRef, ResultValue, Statement, Unitary};
use crate::qec::CodeScheme;
use crate::report::round_sig;
use crate::sim::{
    evaluate_exact, run_program, NoiseHook, OutcomeDistribution, Pauli, QubitId, SimError, SimRng,
    StateVector,
};
use crate::transform::{transform_with, TransformError, TransformOptions, Transformed};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoiseError {
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("unknown channel `{0}` (none, bit_flip, phase_flip, depolarizing)")]
    UnknownChannel(String),
    #[error("unknown location `{0}` (per_gate, per_fragment_boundary)")]
    UnknownLocation(String),
    #[error("bad injection site {site}: {reason}")]
    BadSite { site: usize, reason: String },
    #[error("at least one trial is required")]
    NoTrials,
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Independent single-qubit Pauli channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Channel {
    None,
    BitFlip(f64),
    PhaseFlip(f64),
    /// X, Y, Z each with probability `p / 3`.
    Depolarizing(f64),
}

impl Channel {
    pub fn new(name: &str, p: f64) -> Result<Self, NoiseError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(NoiseError::InvalidProbability(p));
        }
        match name {
            "none" => Ok(Self::None),
            "bit_flip" => Ok(Self::BitFlip(p)),
            "phase_flip" => Ok(Self::PhaseFlip(p)),
            "depolarizing" => Ok(Self::Depolarizing(p)),
            other => Err(NoiseError::UnknownChannel(other.to_owned())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::None => "none",
            Self::BitFlip(_) => "bit_flip",
            Self::PhaseFlip(_) => "phase_flip",
            Self::Depolarizing(_) => "depolarizing",
        }
    }

    pub fn p(&self) -> f64 {
        match *self {
            Self::None => 0.0,
            Self::BitFlip(p) | Self::PhaseFlip(p) | Self::Depolarizing(p) => p,
        }
    }

    /// The Pauli, if any, selected by a uniform draw `u`.
    fn pick(&self, u: f64) -> Option<Pauli> {
        match *self {
            Self::None => None,
            Self::BitFlip(p) => (u < p).then_some(Pauli::X),
            Self::PhaseFlip(p) => (u < p).then_some(Pauli::Z),
            Self::Depolarizing(p) => {
                let third = p / 3.0;
                if u < third {
                    Some(Pauli::X)
                } else if u < 2.0 * third {
                    Some(Pauli::Y)
                } else if u < p {
                    Some(Pauli::Z)
                } else {
                    None
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Location {
    /// After every physical gate step.
    PerGate,
    /// Once per correction round, on the data qubits, just before the
    /// round. For an unencoded program: after every logical gate step.
    #[default]
    PerFragmentBoundary,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PerGate => "per_gate",
            Self::PerFragmentBoundary => "per_fragment_boundary",
        })
    }
}

impl FromStr for Location {
    type Err = NoiseError;

    fn from_str(s: &str) -> Result<Self, NoiseError> {
        match s {
            "per_gate" => Ok(Self::PerGate),
            "per_fragment_boundary" => Ok(Self::PerFragmentBoundary),
            other => Err(NoiseError::UnknownLocation(other.to_owned())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    pub channel: Channel,
    pub location: Location,
}

impl NoiseSpec {
    pub fn boundary(channel: Channel) -> Self {
        Self {
            channel,
            location: Location::PerFragmentBoundary,
        }
    }
}

/// Applies `channel` independently to each of `qubits`. Returns the Pauli
/// applied to each, in order. One uniform is drawn per qubit.
pub fn apply_channel(
    state: &mut StateVector,
    channel: &Channel,
    qubits: &[QubitId],
    rng: &mut SimRng,
) -> Result<Vec<Option<Pauli>>, SimError> {
    if *channel == Channel::None {
        return Ok(vec![None; qubits.len()]);
    }
    qubits
        .iter()
        .map(|&q| {
            let pick = channel.pick(rng.uniform());
            if let Some(pauli) = pick {
                state.apply_rotation(q, &pauli.rotation(), &[])?;
            }
            Ok(pick)
        })
        .collect()
}

/// Sampling hook that feeds noise sites (and, for [`Location::PerGate`],
/// every gate) to a channel.
#[derive(Clone, Debug)]
pub struct ChannelHook {
    channel: Channel,
    per_gate: bool,
    failure: Option<SimError>,
}

impl ChannelHook {
    pub fn new(spec: &NoiseSpec) -> Self {
        Self {
            channel: spec.channel,
            per_gate: spec.location == Location::PerGate,
            failure: None,
        }
    }

    fn hit(&mut self, state: &mut StateVector, qubits: &[QubitId], rng: &mut SimRng) {
        if let Err(e) = apply_channel(state, &self.channel, qubits, rng) {
            self.failure.get_or_insert(e);
        }
    }
}

impl NoiseHook for ChannelHook {
    fn after_gate(&mut self, state: &mut StateVector, touched: &[QubitId], rng: &mut SimRng) {
        if self.per_gate {
            self.hit(state, touched, rng);
        }
    }

    fn at_site(&mut self, state: &mut StateVector, qubits: &[QubitId], rng: &mut SimRng) {
        self.hit(state, qubits, rng);
    }
}

/// A deterministic Pauli inserted before statement `site`.
#[derive(Clone, Debug, PartialEq)]
pub struct FaultInjection {
    pub site: usize,
    pub qubit: QubitRef,
    pub pauli: Pauli,
}

/// Inserts `ApplyU(pauli on qubit)` before statement `f.site`. The qubit
/// must be a name that is allocated at that point.
pub fn inject(p: &QProgram, f: &FaultInjection) -> Result<QProgram, NoiseError> {
    let stmts = p.statements();
    let bad = |reason: String| NoiseError::BadSite {
        site: f.site,
        reason,
    };
    if f.site >= stmts.len() {
        return Err(bad(format!("program has {} statements", stmts.len())));
    }
    let QubitRef::Name(target) = &f.qubit else {
        return Err(bad(format!("{} is not a program name", f.qubit)));
    };
    if !live_before(stmts, f.site).contains(target) {
        return Err(bad(format!("`{target}` is not allocated there")));
    }
    let mut out = stmts.to_vec();
    out.insert(
        f.site,
        Statement::ApplyU(Unitary::rot(f.qubit.clone(), f.pauli.rotation())),
    );
    Ok(QProgram::new(out))
}

/// Names allocated and not yet released before statement `site`.
fn live_before(stmts: &[Statement], site: usize) -> HashSet<Name> {
    let mut live = HashSet::new();
    for s in &stmts[..site] {
        match s {
            Statement::MkQbit { binder, .. } => {
                live.insert(binder.clone());
            }
            Statement::Release {
                target: QubitRef::Name(n),
            } => {
                live.remove(n);
            }
            _ => {}
        }
    }
    live
}

/// Probability that at least two of three independent flips occur:
/// `3p² − 2p³`.
pub fn analytic_majority_rate(p: f64) -> f64 {
    3.0 * p * p - 2.0 * p * p * p
}

/// The unencoded program with a noise site after every gate step, covering
/// every qubit allocated at that point.
pub fn plain_with_step_noise(p: &QProgram) -> QProgram {
    let mut live: Vec<Name> = Vec::new();
    let mut out = Vec::new();
    for s in p.split_steps().into_statements() {
        match &s {
            Statement::MkQbit { binder, .. } => live.push(binder.clone()),
            Statement::Release {
                target: QubitRef::Name(n),
            } => live.retain(|l| l != n),
            _ => {}
        }
        let site = matches!(s, Statement::ApplyU(_)) && !live.is_empty();
        out.push(s);
        if site {
            out.push(Statement::Noise {
                qubits: live.iter().map(QubitRef::from).collect(),
            });
        }
    }
    QProgram::new(out)
}

/// The transformed program with a noise site at the start of every
/// correction round, covering the round's data qubits.
pub fn encoded_with_boundary_noise(t: &Transformed) -> QProgram {
    let mut out = t.program.statements().to_vec();
    for b in t.boundaries.iter().rev() {
        out.insert(
            b.index,
            Statement::Noise {
                qubits: b.data_qubits.clone(),
            },
        );
    }
    QProgram::new(out)
}

/// Above this total-variation distance a random-outcome arm is flagged.
pub const TVD_FLAG: f64 = 0.05;

/// Noiseless probability below which an outcome counts as impossible.
const IMPOSSIBLE: f64 = 1e-9;

const DOMAIN_PLAIN: u64 = 1;
const DOMAIN_ENCODED: u64 = 2;

/// One side of the comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmSummary {
    pub errors: u64,
    pub rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Trials that ended in a simulation error (counted as errors).
    pub aborted: u64,
    /// Outcome counts keyed by result value, e.g. `"True,False"`.
    pub tallies: BTreeMap<String, u64>,
    /// Distance between the empirical and the noiseless distribution; only
    /// reported for programs whose noiseless outcome is random.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tvd: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tvd_flagged: Option<bool>,
}

/// Wall-clock information, kept apart from the deterministic payload.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub code: String,
    pub channel: String,
    pub p: f64,
    pub location: String,
    pub policy: String,
    pub trials: u64,
    pub seed: u64,
    pub rng: String,
    /// Noiseless modal outcome. A trial is an error when it differs, or,
    /// when `random_outcome` is set, when the noiseless program could not
    /// have produced it.
    pub reference: String,
    pub random_outcome: bool,
    pub plain: ArmSummary,
    pub encoded: ArmSummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<ReportMeta>,
}

pub const CSV_HEADER: [&str; 13] = [
    "code",
    "channel",
    "p",
    "location",
    "policy",
    "trials",
    "plain_rate",
    "plain_ci_lo",
    "plain_ci_hi",
    "encoded_rate",
    "encoded_ci_lo",
    "encoded_ci_hi",
    "seed",
];

impl TrialReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn csv_record(&self) -> [String; 13] {
        let f = crate::report::format_float;
        [
            self.code.clone(),
            self.channel.clone(),
            f(self.p),
            self.location.clone(),
            self.policy.clone(),
            self.trials.to_string(),
            f(self.plain.rate),
            f(self.plain.ci_lo),
            f(self.plain.ci_hi),
            f(self.encoded.rate),
            f(self.encoded.ci_lo),
            f(self.encoded.ci_hi),
            self.seed.to_string(),
        ]
    }

    /// Header plus one row per report.
    pub fn to_csv(reports: &[TrialReport]) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for r in reports {
            w.write_record(r.csv_record()).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

/// Exact two-sided 95% binomial interval for `k` successes in `n` trials.
pub fn clopper_pearson(k: u64, n: u64) -> (f64, f64) {
    let (kf, nf) = (k as f64, n as f64);
    let lo = if k == 0 {
        0.0
    } else {
        Beta::new(kf, nf - kf + 1.0).expect("positive shape").inverse_cdf(0.025)
    };
    let hi = if k == n {
        1.0
    } else {
        Beta::new(kf + 1.0, nf - kf).expect("positive shape").inverse_cdf(0.975)
    };
    (lo, hi)
}

/// Runs `trials` noisy evaluations of `p` and of its encoding under `code`,
/// and reports how often each goes wrong (see [`TrialReport::reference`]).
/// Trial `i` of each side uses its own generator derived from `(seed, i)`,
/// so the report does not depend on how trials are scheduled.
pub fn estimate_logical_error_rate(
    p: &QProgram,
    code: &CodeScheme,
    spec: &NoiseSpec,
    opts: &TransformOptions,
    trials: u64,
    seed: u64,
) -> Result<TrialReport, NoiseError> {
    if trials == 0 {
        return Err(NoiseError::NoTrials);
    }
    let reference = evaluate_exact(p)?;
    let (modal, modal_p) = reference.modal().map(|(r, q)| (r.clone(), q)).unwrap_or_default();
    let random_outcome = modal_p < 1.0 - 1e-9;

    let transformed = transform_with(p, code, opts)?;
    let (plain, encoded) = match spec.location {
        Location::PerFragmentBoundary => (
            plain_with_step_noise(p),
            encoded_with_boundary_noise(&transformed),
        ),
        Location::PerGate => (p.clone(), transformed.program),
    };
    let summarize = |prog: &QProgram, domain| {
        let outcomes = run_trials(prog, spec, trials, seed, domain);
        summarize(&outcomes, &modal, random_outcome.then_some(&reference))
    };
    Ok(TrialReport {
        code: code.name().to_owned(),
        channel: spec.channel.name().to_owned(),
        p: round_sig(spec.channel.p()),
        location: spec.location.to_string(),
        policy: opts.policy.to_string(),
        trials,
        seed,
        rng: SimRng::ALGORITHM.to_owned(),
        reference: modal.to_string(),
        random_outcome,
        plain: summarize(&plain, DOMAIN_PLAIN),
        encoded: summarize(&encoded, DOMAIN_ENCODED),
        note: (spec.location == Location::PerGate).then(|| {
            "per_gate noise also strikes encode, decode and correction circuits; \
             the encoded rate can exceed the plain rate"
                .to_owned()
        }),
        meta: None,
    })
}

fn run_one(p: &QProgram, spec: &NoiseSpec, seed: u64, domain: u64, i: u64) -> Option<ResultValue> {
    let mut rng = SimRng::derive(seed, domain, i);
    let mut hook = ChannelHook::new(spec);
    let r = run_program(p, &mut rng, &mut hook).ok()?;
    hook.failure.is_none().then_some(r)
}

#[cfg(feature = "parallel")]
fn run_trials(p: &QProgram, spec: &NoiseSpec, trials: u64, seed: u64, domain: u64) -> Vec<Option<ResultValue>> {
    use rayon::prelude::*;
    (0..trials)
        .into_par_iter()
        .map(|i| run_one(p, spec, seed, domain, i))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn run_trials(p: &QProgram, spec: &NoiseSpec, trials: u64, seed: u64, domain: u64) -> Vec<Option<ResultValue>> {
    (0..trials).map(|i| run_one(p, spec, seed, domain, i)).collect()
}

fn summarize(
    outcomes: &[Option<ResultValue>],
    modal: &ResultValue,
    reference: Option<&OutcomeDistribution>,
) -> ArmSummary {
    let n = outcomes.len() as u64;
    let mut counts: BTreeMap<ResultValue, u64> = BTreeMap::new();
    let mut aborted = 0;
    for o in outcomes {
        match o {
            Some(r) => *counts.entry(r.clone()).or_default() += 1,
            None => aborted += 1,
        }
    }
    // a coin-flip program has no single right answer; there an error is an
    // outcome the noiseless program can never produce
    let correct: u64 = match reference {
        None => counts.get(modal).copied().unwrap_or(0),
        Some(reference) => counts
            .iter()
            .filter(|(r, _)| reference.get(r) > IMPOSSIBLE)
            .map(|(_, c)| c)
            .sum(),
    };
    let errors = n - correct;
    let (lo, hi) = clopper_pearson(errors, n);
    let tvd = reference.map(|reference| {
        let emp = |r: &ResultValue| counts.get(r).copied().unwrap_or(0) as f64 / n as f64;
        let mut keys: Vec<&ResultValue> = counts.keys().collect();
        keys.extend(reference.0.keys().filter(|k| !counts.contains_key(*k)));
        let spread: f64 = keys.iter().map(|k| (emp(k) - reference.get(k)).abs()).sum();
        round_sig((spread + aborted as f64 / n as f64) / 2.0)
    });
    ArmSummary {
        errors,
        rate: round_sig(errors as f64 / n as f64),
        ci_lo: round_sig(lo),
        ci_hi: round_sig(hi),
        aborted,
        tallies: counts.into_iter().map(|(r, c)| (r.to_string(), c)).collect(),
        tvd,
        tvd_flagged: tvd.map(|d| d > TVD_FLAG),
    }
}
