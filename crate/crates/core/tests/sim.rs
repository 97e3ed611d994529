mod common;

use std::f64::consts::FRAC_1_SQRT_2;

use common::*;
use qecw::corpus;
use qecw::ir::{QProgram, QubitRef, ResultValue, Unitary};
use qecw::sim::{
    apply_unitary, evaluate_exact, evaluate_run, BasisState, QubitId, Rotation, StateVector,
};

fn id(q: QubitId) -> QubitRef {
    QubitRef::Id(q)
}

fn amp(s: &StateVector, bits: &[(QubitId, bool)]) -> C {
    s.amplitude(&bits.iter().copied().collect::<BasisState>())
}

/// Dense copy with qubit `i` of `order` at bit `i`.
fn dense_from(s: &StateVector, order: &[QubitId]) -> Vec<C> {
    let mut out = vec![c(0.0, 0.0); 1 << order.len()];
    for (basis, a) in s.terms() {
        let idx = order
            .iter()
            .enumerate()
            .fold(0, |acc, (k, q)| acc | (usize::from(basis.get(*q).unwrap()) << k));
        out[idx] = a;
    }
    out
}

fn close(a: &[C], b: &[C]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-12)
}

#[test]
fn alloc_on_superposition_appends_new_bit() {
    let mut s = StateVector::new();
    let q0 = s.alloc(false).unwrap();
    apply_unitary(&mut s, &Unitary::h(id(q0))).unwrap();
    let q1 = s.alloc(true).unwrap();
    // tensor-product oracle: (|0⟩+|1⟩)/√2 ⊗ |1⟩
    let plus = [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)];
    let one = [c(0.0, 0.0), c(1.0, 0.0)];
    let mut want = vec![c(0.0, 0.0); 4];
    for (i, a) in plus.iter().enumerate() {
        for (j, b) in one.iter().enumerate() {
            want[i | (j << 1)] = a * b;
        }
    }
    assert!(close(&dense_from(&s, &[q0, q1]), &want));
    assert_eq!(s.allocated(), vec![q0, q1]);
}

#[test]
fn cond_acts_as_cnot() {
    let mut s = StateVector::new();
    let (q0, q1) = (s.alloc(false).unwrap(), s.alloc(false).unwrap());
    apply_unitary(&mut s, &Unitary::h(id(q0))).unwrap();
    apply_unitary(
        &mut s,
        &Unitary::cond(id(q0), Unitary::empty(), Unitary::x(id(q1))),
    )
    .unwrap();
    // 4x4 CNOT matrix with q0 as the high-order control
    let cnot = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0], [0.0, 0.0, 1.0, 0.0]];
    let input = [FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, 0.0]; // index = 2*q0 + q1
    let out: Vec<f64> = cnot
        .iter()
        .map(|row| row.iter().zip(&input).map(|(m, v)| m * v).sum())
        .collect();
    for (i, want) in out.iter().enumerate() {
        let bits = [(q0, i & 2 != 0), (q1, i & 1 != 0)];
        assert!((amp(&s, &bits) - c(*want, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn measuring_bell_half_collapses_partner() {
    let mut s = StateVector::new();
    let (q0, q1) = (s.alloc(false).unwrap(), s.alloc(false).unwrap());
    apply_unitary(&mut s, &Unitary::h(id(q0)).then(Unitary::cnot(id(q0), id(q1)))).unwrap();
    assert!((s.probability(q0, true).unwrap() - 0.5).abs() < 1e-12);
    assert!(s.measure(q0, 0.25).unwrap());
    // projector-and-renormalize oracle on the dense vector
    let mut d = dense_from(&s, &[q0, q1]);
    let norm: f64 = d.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    d.iter_mut().for_each(|a| *a /= norm);
    assert!(close(&d, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]));
}

#[test]
fn hadamard_coin_frequency() {
    let p = QProgram::builder()
        .mk("q", false)
        .apply(Unitary::h(qn("q")))
        .meas("q", "b")
        .ret(&["b"]);
    let trues = (0..1000u64)
        .filter(|&seed| evaluate_run(&p, seed).unwrap() == ResultValue(vec![true]))
        .count();
    let f = trues as f64 / 1000.0;
    assert!((f - 0.5).abs() <= 0.05, "{f}");
}

#[test]
fn example_program_is_true_for_every_seed() {
    let p = corpus::flip();
    for seed in 0..50 {
        assert_eq!(evaluate_run(&p, seed).unwrap(), ResultValue(vec![true]));
    }
    assert_eq!(evaluate_exact(&p).unwrap().to_json(), r#"{"True": 1.0}"#);
}

#[test]
fn sparse_matches_dense_on_random_circuits() {
    let mut r = rng(11);
    for trial in 0..40 {
        let n = 1 + trial % 5;
        let names: Vec<QubitRef> = (0..n).map(|i| qn(&format!("q{i}"))).collect();
        let mut fresh = 0;
        let u = random_unitary(&mut r, &names, 12, &mut fresh);
        let mut b = QProgram::builder();
        for q in &names {
            b = b.mk(&q.to_string(), false);
        }
        let prep: Unitary = names.iter().map(|q| Unitary::rot(q.clone(), random_rotation(&mut r))).collect();
        let stmts = b.apply(prep.clone()).apply(u.clone()).ret(&[]).into_statements();
        let m = machine_after(&stmts[..stmts.len() - 1]);
        let mut d = Dense::new();
        for q in &names {
            d.alloc(&q.to_string(), false);
        }
        d.apply(&prep);
        d.apply(&u);
        let sparse = dense_of(&m, &names);
        assert!(sparse.fidelity(&d) > 1.0 - 1e-9, "trial {trial}");
        assert!((m.state().norm() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn phase_rotation_preserves_populations() {
    let mut s = StateVector::new();
    let q = s.alloc(false).unwrap();
    apply_unitary(&mut s, &Unitary::h(id(q))).unwrap();
    apply_unitary(&mut s, &Unitary::rot(id(q), Rotation::phase(1.1))).unwrap();
    assert!((s.probability(q, true).unwrap() - 0.5).abs() < 1e-12);
    let a1 = amp(&s, &[(q, true)]);
    assert!((a1 - C::from_polar(FRAC_1_SQRT_2, 1.1)).norm() < 1e-12);
}
