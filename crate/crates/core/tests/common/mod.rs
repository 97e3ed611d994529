//! Test oracles independent of the sparse simulator: a dense state vector
//! over named qubits, an exact program evaluator built on it, and random
//! circuit generators.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_complex::Complex64;
use qecw::ir::{GateStep, Name, NameSupply, QProgram, QubitRef, Statement, Unitary};
use qecw::qec::{self, CodeScheme, CorrectionMode, EncodedQubit};
use qecw::sim::{Machine, Noiseless, Pauli, Rotation, SimRng};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Dense vector over `2^n` amplitudes; qubit `i` is bit `i` of the index.
#[derive(Clone, Debug)]
pub struct Dense {
    pub labels: Vec<String>,
    pub amps: Vec<C>,
}

impl Default for Dense {
    fn default() -> Self {
        Self::new()
    }
}

impl Dense {
    pub fn new() -> Self {
        Self {
            labels: Vec::new(),
            amps: vec![c(1.0, 0.0)],
        }
    }

    pub fn pos(&self, label: &str) -> usize {
        self.labels
            .iter()
            .rposition(|l| l == label)
            .unwrap_or_else(|| panic!("no qubit {label}"))
    }

    pub fn alloc(&mut self, label: &str, init: bool) {
        let n = self.amps.len();
        let mut out = vec![c(0.0, 0.0); 2 * n];
        let off = if init { n } else { 0 };
        out[off..off + n].copy_from_slice(&self.amps);
        self.amps = out;
        self.labels.push(label.to_owned());
    }

    /// Removes the last qubit, which must be in basis state `value`
    /// (stray mass below 1e-9 is discarded). Panics otherwise.
    pub fn pop(&mut self, value: bool) {
        let n = self.amps.len() / 2;
        let (keep, drop) = if value { (n, 0) } else { (0, n) };
        let stray: f64 = self.amps[drop..drop + n].iter().map(|a| a.norm_sqr()).sum();
        assert!(stray < 1e-9, "ancilla not returned (stray mass {stray})");
        self.amps = self.amps[keep..keep + n].to_vec();
        self.labels.pop();
        self.normalize();
    }

    pub fn normalize(&mut self) {
        let norm = self.norm().sqrt();
        for a in &mut self.amps {
            *a /= norm;
        }
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn controls_hold(idx: usize, controls: &[(usize, bool)]) -> bool {
        controls.iter().all(|&(q, v)| (idx >> q & 1 == 1) == v)
    }

    pub fn rot(&mut self, q: usize, m: &[[C; 2]; 2], controls: &[(usize, bool)]) {
        let bit = 1 << q;
        for i in 0..self.amps.len() {
            if i & bit != 0 || !Self::controls_hold(i, controls) {
                continue;
            }
            let (a0, a1) = (self.amps[i], self.amps[i | bit]);
            self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    pub fn swap(&mut self, a: usize, b: usize, controls: &[(usize, bool)]) {
        for i in 0..self.amps.len() {
            let (ba, bb) = (i >> a & 1, i >> b & 1);
            if ba == 1 && bb == 0 && Self::controls_hold(i, controls) {
                let j = i ^ (1 << a) ^ (1 << b);
                self.amps.swap(i, j);
            }
        }
    }

    pub fn apply(&mut self, u: &Unitary) {
        self.apply_in(u, &mut Vec::new(), &mut Vec::new());
    }

    fn resolve(&self, r: &QubitRef, locals: &[(Name, String)]) -> usize {
        match r {
            QubitRef::Name(n) => match locals.iter().rev().find(|(b, _)| b == n) {
                Some((_, label)) => self.pos(label),
                None => self.pos(n.as_str()),
            },
            QubitRef::Id(id) => self.pos(&id.to_string()),
        }
    }

    fn apply_in(&mut self, u: &Unitary, controls: &mut Vec<(usize, bool)>, locals: &mut Vec<(Name, String)>) {
        for step in u.steps() {
            match step {
                GateStep::Rot { target, rotation } => {
                    let q = self.resolve(target, locals);
                    self.rot(q, rotation.matrix(), controls);
                }
                GateStep::Swap { a, b } => {
                    let (a, b) = (self.resolve(a, locals), self.resolve(b, locals));
                    self.swap(a, b, controls);
                }
                GateStep::Cond {
                    control,
                    when_false,
                    when_true,
                } => {
                    let q = self.resolve(control, locals);
                    for (v, branch) in [(false, when_false), (true, when_true)] {
                        controls.push((q, v));
                        self.apply_in(branch, controls, locals);
                        controls.pop();
                    }
                }
                GateStep::Ulet { init, binder, body } => {
                    let label = format!("{}@{}", binder, self.labels.len());
                    self.alloc(&label, *init);
                    locals.push((binder.clone(), label.clone()));
                    self.apply_in(body, controls, locals);
                    locals.pop();
                    assert_eq!(self.labels.last(), Some(&label));
                    self.pop(*init);
                }
            }
        }
    }

    pub fn prob(&self, q: usize, v: bool) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> q & 1 == 1) == v)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    pub fn project(&mut self, q: usize, v: bool) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i >> q & 1 == 1) != v {
                *a = c(0.0, 0.0);
            }
        }
        self.normalize();
    }

    /// Removes qubit `q`, which must be in a basis state.
    pub fn remove(&mut self, q: usize) {
        let v = self.prob(q, true) > 0.5;
        let last = self.labels.len() - 1;
        if q != last {
            self.swap(q, last, &[]);
            self.labels.swap(q, last);
        }
        self.pop(v);
    }

    /// Amplitude of the basis state given as (label, bit) pairs covering
    /// every qubit.
    pub fn amplitude(&self, bits: &[(String, bool)]) -> C {
        let idx = bits
            .iter()
            .fold(0, |acc, (l, b)| acc | (usize::from(*b) << self.pos(l)));
        self.amps[idx]
    }

    /// `|⟨self|other⟩|²` after aligning qubits by label.
    pub fn fidelity(&self, other: &Dense) -> f64 {
        assert_eq!(self.labels.len(), other.labels.len());
        let perm: Vec<usize> = self.labels.iter().map(|l| other.pos(l)).collect();
        let mut inner = c(0.0, 0.0);
        for (i, a) in self.amps.iter().enumerate() {
            let j = perm
                .iter()
                .enumerate()
                .fold(0, |acc, (k, &p)| acc | ((i >> k & 1) << p));
            inner += a.conj() * other.amps[j];
        }
        inner.norm_sqr()
    }
}

/// Exact outcome distribution computed on the dense oracle.
pub fn dense_exact(p: &QProgram) -> BTreeMap<Vec<bool>, f64> {
    let mut out = BTreeMap::new();
    branch(p.statements(), Dense::new(), BTreeMap::new(), 1.0, &mut out);
    out
}

fn branch(
    stmts: &[Statement],
    mut d: Dense,
    bits: BTreeMap<Name, bool>,
    w: f64,
    out: &mut BTreeMap<Vec<bool>, f64>,
) {
    for (i, s) in stmts.iter().enumerate() {
        match s {
            Statement::MkQbit { init, binder } => d.alloc(binder.as_str(), *init),
            Statement::ApplyU(u) => d.apply(u),
            Statement::Release { target } => {
                let q = d.resolve(target, &[]);
                d.remove(q);
            }
            Statement::Noise { .. } => panic!("noise in exact oracle"),
            Statement::MeasQbit { target, binder } => {
                let q = d.resolve(target, &[]);
                for v in [false, true] {
                    let pv = d.prob(q, v);
                    if w * pv < 1e-12 {
                        continue;
                    }
                    let mut fork = d.clone();
                    fork.project(q, v);
                    let mut b = bits.clone();
                    b.insert(binder.clone(), v);
                    branch(&stmts[i + 1..], fork, b, w * pv, out);
                }
                return;
            }
            Statement::Return { names } => {
                let key = names.iter().map(|n| bits[n]).collect();
                *out.entry(key).or_insert(0.0) += w;
                return;
            }
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A single-qubit unitary with first column `(α, β)`.
pub fn state_prep(alpha: C, beta: C) -> Rotation {
    Rotation::new([[alpha, -beta.conj()], [beta, alpha.conj()]]).expect("normalized column")
}

/// Uniformly random point on the Bloch sphere, as `(α, β)`.
pub fn random_qubit(r: &mut impl Rng) -> (C, C) {
    let z: f64 = r.random_range(-1.0..=1.0);
    let phi: f64 = r.random_range(0.0..std::f64::consts::TAU);
    let theta = z.acos() / 2.0;
    (c(theta.cos(), 0.0), C::from_polar(theta.sin(), phi))
}

pub fn random_rotation(r: &mut impl Rng) -> Rotation {
    match r.random_range(0..7) {
        0 => Rotation::x(),
        1 => Rotation::y(),
        2 => Rotation::z(),
        3 => Rotation::h(),
        4 => Rotation::s(),
        5 => Rotation::phase(r.random_range(-3.0..3.0)),
        _ => {
            let (a, b) = random_qubit(r);
            let g = C::from_polar(1.0, r.random_range(0.0..6.0));
            let m = *state_prep(a, b).matrix();
            Rotation::new([[m[0][0], m[0][1] * g], [m[1][0], m[1][1] * g]]).unwrap()
        }
    }
}

/// Random circuit over `qubits` with `depth` top-level steps. Conditionals
/// never touch their control and scoped ancillas follow the
/// compute / use / uncompute pattern, so every generated circuit is valid.
pub fn random_unitary(r: &mut impl Rng, qubits: &[QubitRef], depth: usize, fresh: &mut usize) -> Unitary {
    (0..depth).map(|_| random_step(r, qubits, 2, fresh)).collect()
}

fn random_step(r: &mut impl Rng, qubits: &[QubitRef], nest: u32, fresh: &mut usize) -> Unitary {
    let pick = |r: &mut dyn rand::RngCore| qubits[r.random_range(0..qubits.len())].clone();
    let kind = if nest == 0 || qubits.len() < 2 {
        0
    } else {
        r.random_range(0..10)
    };
    match kind {
        0..=4 => Unitary::rot(pick(r), random_rotation(r)),
        5 | 6 => {
            let a = r.random_range(0..qubits.len());
            let b = (a + r.random_range(1..qubits.len())) % qubits.len();
            Unitary::swap(qubits[a].clone(), qubits[b].clone())
        }
        7 | 8 => {
            let ci = r.random_range(0..qubits.len());
            let rest: Vec<QubitRef> = qubits.iter().enumerate().filter(|&(i, _)| i != ci).map(|(_, q)| q.clone()).collect();
            let f_len = r.random_range(0..3);
            let t_len = r.random_range(0..3);
            let f = (0..f_len).map(|_| random_step(r, &rest, nest - 1, fresh)).collect();
            let t = (0..t_len).map(|_| random_step(r, &rest, nest - 1, fresh)).collect();
            Unitary::cond(qubits[ci].clone(), f, t)
        }
        _ => {
            let w = Name::lit(&format!("w{}", *fresh));
            *fresh += 1;
            let wr = QubitRef::Name(w.clone());
            // compute the parity of a subset into w, act on the complement
            // conditioned on w, uncompute
            let split = r.random_range(1..qubits.len());
            let (srcs, targets) = qubits.split_at(split);
            let compute: Unitary = srcs.iter().map(|s| Unitary::cnot(s.clone(), wr.clone())).collect();
            let use_len = r.random_range(0..3);
            let body: Unitary = (0..use_len).map(|_| random_step(r, targets, nest - 1, fresh)).collect();
            let middle = Unitary::cond(wr, Unitary::empty(), body);
            Unitary::ulet(
                r.random_bool(0.5),
                w,
                compute.clone().then(middle).then(compute.invert()),
            )
        }
    }
}

/// Runs statements on a fresh machine with noiseless sampling.
pub fn machine_after(stmts: &[Statement]) -> Machine {
    let mut m = Machine::new();
    m.run_fragment(stmts, &mut SimRng::from_seed(0)).expect("fragment runs");
    m
}

pub fn qn(s: &str) -> QubitRef {
    QubitRef::name(s)
}

/// Dense copy of the machine state with qubits ordered as `names`, which
/// must cover every allocated qubit.
pub fn dense_of(m: &Machine, names: &[QubitRef]) -> Dense {
    let ids: Vec<_> = names.iter().map(|n| m.resolve(n).expect("allocated")).collect();
    assert_eq!(m.state().allocated().len(), ids.len(), "unlisted qubits are allocated");
    let mut d = Dense {
        labels: names.iter().map(|n| n.to_string()).collect(),
        amps: vec![c(0.0, 0.0); 1 << ids.len()],
    };
    for (basis, a) in m.state().terms() {
        let idx = ids
            .iter()
            .enumerate()
            .fold(0, |acc, (k, id)| acc | (usize::from(basis.get(*id).unwrap()) << k));
        d.amps[idx] = a;
    }
    d
}

/// Applies `Π (I + S)/2` for every stabilizer, with `x_type` choosing
/// between X-type (bit flips on the support) and Z-type (sign by parity).
pub fn project_stabilizer(d: &mut Dense, support: &[usize], x_type: bool) {
    let mask: usize = support.iter().map(|&q| 1 << q).sum();
    let old = d.amps.clone();
    for (i, a) in d.amps.iter_mut().enumerate() {
        let s = if x_type {
            old[i ^ mask]
        } else if (i & mask).count_ones() % 2 == 1 {
            -old[i]
        } else {
            old[i]
        };
        *a = (old[i] + s) / 2.0;
    }
}

pub fn run_stmts(m: &mut Machine, stmts: &[Statement]) -> Result<(), qecw::sim::SimError> {
    let mut rng = SimRng::from_seed(0);
    for s in stmts {
        m.exec(s, &mut rng, &mut Noiseless)?;
    }
    Ok(())
}

/// An encoded qubit holding `α|0⟩ + β|1⟩`, plus the statements that made it.
pub fn prepared(code: &CodeScheme, name: &str, (a, b): (C, C), names: &mut NameSupply) -> (EncodedQubit, Vec<Statement>) {
    let (eq, frag) = qec::mk_encoded(code, false, Name::lit(name), names);
    let mut stmts = frag.into_statements();
    stmts.insert(
        code.n(),
        Statement::ApplyU(Unitary::rot(eq.parent().clone(), state_prep(a, b))),
    );
    (eq, stmts)
}

pub fn logical_states(seed: u64) -> Vec<(C, C)> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut r = rng(seed);
    let mut v = vec![(c(1.0, 0.0), c(0.0, 0.0)), (c(0.0, 0.0), c(1.0, 0.0)), (c(h, 0.0), c(h, 0.0))];
    v.extend((0..10).map(|_| random_qubit(&mut r)));
    v
}

/// Fidelity with the clean codeword after applying `errors` and one
/// correction round.
pub fn corrected_fidelity(code: &CodeScheme, s: (C, C), errors: &[(usize, Pauli)]) -> f64 {
    let mut names = NameSupply::default();
    let (eq, stmts) = prepared(code, "p", s, &mut names);
    let reference = machine_after(&stmts);
    let mut m = reference.clone();
    for &(i, p) in errors {
        m.apply(&Unitary::rot(eq.qubits()[i].clone(), p.rotation())).unwrap();
    }
    let fix = eq.correction_fragment(&mut names, CorrectionMode::MeasureAndReset);
    run_stmts(&mut m, fix.statements()).unwrap();
    assert_eq!(m.state().allocated().len(), code.n(), "syndrome qubits leaked");
    reference.state().fidelity(m.state()).unwrap()
}
