//! Built-in example programs.

use crate::ir::{QProgram, QubitRef, Unitary};

pub const NAMES: [&str; 4] = ["flip", "bell", "interference", "conditional"];

fn q(s: &str) -> QubitRef {
    QubitRef::name(s)
}

/// Allocate `|0⟩`, negate, measure. Always `True`.
pub fn flip() -> QProgram {
    QProgram::builder()
        .mk("q1", false)
        .apply(Unitary::x(q("q1")))
        .meas("q1", "b")
        .ret(&["b"])
}

/// Bell pair, both halves measured: `(F,F)` or `(T,T)` with equal odds.
pub fn bell() -> QProgram {
    QProgram::builder()
        .mk("a", false)
        .apply(Unitary::h(q("a")))
        .mk("b", false)
        .apply(Unitary::cnot(q("a"), q("b")))
        .meas("a", "ma")
        .meas("b", "mb")
        .ret(&["ma", "mb"])
}

/// `H; Z; H` on `|0⟩` is X up to phase, so the result is always `True`.
pub fn interference() -> QProgram {
    QProgram::builder()
        .mk("q", false)
        .apply(Unitary::h(q("q")).then(Unitary::z(q("q"))).then(Unitary::h(q("q"))))
        .meas("q", "b")
        .ret(&["b"])
}

/// Two logical qubits exercising every gate-step kind: a conditional with
/// two non-empty branches, a scoped ancilla used as a parity workspace, and
/// a swap.
pub fn conditional() -> QProgram {
    let (c, t, w) = (q("c"), q("t"), q("w"));
    let scratch = Unitary::cnot(c.clone(), w.clone())
        .then(Unitary::cnot(w.clone(), t.clone()))
        .then(Unitary::cnot(c.clone(), w));
    QProgram::builder()
        .mk("c", false)
        .mk("t", false)
        .apply(Unitary::h(c.clone()))
        .apply(Unitary::cond(c.clone(), Unitary::h(t.clone()), Unitary::x(t.clone())))
        .apply(Unitary::ulet(false, crate::ir::Name::lit("w"), scratch))
        .apply(Unitary::swap(c, t))
        .meas("c", "mc")
        .meas("t", "mt")
        .ret(&["mc", "mt"])
}

pub fn program(name: &str) -> Option<QProgram> {
    match name {
        "flip" => Some(flip()),
        "bell" => Some(bell()),
        "interference" => Some(interference()),
        "conditional" => Some(conditional()),
        _ => None,
    }
}

pub fn all() -> Vec<(&'static str, QProgram)> {
    NAMES.iter().map(|&n| (n, program(n).expect("listed"))).collect()
}
