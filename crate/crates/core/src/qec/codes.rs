use super::{cond_table, QecCode};
use crate::ir::{QubitRef, Unitary};
use crate::sim::{GateClass, Pauli, Rotation};

/// Three-qubit repetition code against bit flips: `|0⟩ ↦ |000⟩`,
/// `|1⟩ ↦ |111⟩`.
#[derive(Clone, Copy, Debug, Default)]
pub struct BitFlip3;

/// Parity checks `q1⊕q2` and `q1⊕q3` and the majority-vote fix.
fn repetition_round(q: &[QubitRef], a: &[QubitRef]) -> Unitary {
    let extract = Unitary::cnot(q[0].clone(), a[0].clone())
        .then(Unitary::cnot(q[1].clone(), a[0].clone()))
        .then(Unitary::cnot(q[0].clone(), a[1].clone()))
        .then(Unitary::cnot(q[2].clone(), a[1].clone()));
    let fix = cond_table(a, &|s| match s {
        [true, true] => Unitary::x(q[0].clone()),
        [true, false] => Unitary::x(q[1].clone()),
        [false, true] => Unitary::x(q[2].clone()),
        _ => Unitary::empty(),
    });
    extract.then(fix)
}

fn repetition_encode(q: &[QubitRef]) -> Unitary {
    Unitary::cnot(q[0].clone(), q[1].clone()).then(Unitary::cnot(q[0].clone(), q[2].clone()))
}

impl QecCode for BitFlip3 {
    fn name(&self) -> &'static str {
        "bitflip3"
    }

    fn n(&self) -> usize {
        3
    }

    fn encode(&self, q: &[QubitRef]) -> Unitary {
        repetition_encode(q)
    }

    fn syndrome_qubits(&self) -> usize {
        2
    }

    fn extract_and_correct(&self, data: &[QubitRef], ancillas: &[QubitRef]) -> Unitary {
        repetition_round(data, ancillas)
    }

    fn transversal(&self, class: GateClass, q: &[QubitRef]) -> Option<Unitary> {
        (class == GateClass::X).then(|| Unitary::layer(q, Rotation::x()))
    }

    fn correctable(&self) -> Vec<(usize, Pauli)> {
        (0..3).map(|i| (i, Pauli::X)).collect()
    }
}

/// The repetition code in the Hadamard basis: `|0⟩ ↦ |+++⟩`,
/// `|1⟩ ↦ |−−−⟩`. Corrects single phase flips.
#[derive(Clone, Copy, Debug, Default)]
pub struct PhaseFlip3;

impl QecCode for PhaseFlip3 {
    fn name(&self) -> &'static str {
        "phaseflip3"
    }

    fn n(&self) -> usize {
        3
    }

    fn encode(&self, q: &[QubitRef]) -> Unitary {
        repetition_encode(q).then(Unitary::layer(q, Rotation::h()))
    }

    fn syndrome_qubits(&self) -> usize {
        2
    }

    fn extract_and_correct(&self, data: &[QubitRef], ancillas: &[QubitRef]) -> Unitary {
        let h = Unitary::layer(data, Rotation::h());
        h.clone().then(repetition_round(data, ancillas)).then(h)
    }

    /// `X⊗3` fixes `|+++⟩` and negates `|−−−⟩`, so it is the logical Z.
    fn transversal(&self, class: GateClass, q: &[QubitRef]) -> Option<Unitary> {
        (class == GateClass::Z).then(|| Unitary::layer(q, Rotation::x()))
    }

    fn correctable(&self) -> Vec<(usize, Pauli)> {
        (0..3).map(|i| (i, Pauli::Z)).collect()
    }
}

/// Steane's [[7,1,3]] CSS code.
///
/// Tuple position `t` corresponds to column `STEANE_COLUMN[t]` of the
/// Hamming parity-check matrix, so the syndrome of an error on `t`, read as
/// a binary number, is that column. The parent sits at column 3, which lets
/// the logical operator `X` on columns {3, 5, 6} be copied out of it before
/// the stabilizer pivots (columns 1, 2, 4) are prepared.
#[derive(Clone, Copy, Debug, Default)]
pub struct Steane7;

/// Hamming column of each tuple position.
pub(crate) const STEANE_COLUMN: [usize; 7] = [3, 1, 2, 4, 5, 6, 7];

/// Stabilizer generator supports (tuple positions). The same supports give
/// both the X-type and the Z-type generators.
pub(crate) const STEANE_GENERATORS: [[usize; 4]; 3] = [[3, 4, 5, 6], [0, 2, 5, 6], [0, 1, 4, 6]];

/// Pivot of each generator: in its support and in no other generator's.
const STEANE_PIVOTS: [usize; 3] = [3, 2, 1];

/// Tuple position whose Hamming column equals the syndrome `s` (bit 2 from
/// generator 0, bit 0 from generator 2).
fn steane_position(s: &[bool]) -> Option<usize> {
    let col = s.iter().fold(0, |acc, &b| acc * 2 + usize::from(b));
    STEANE_COLUMN.iter().position(|&c| c == col)
}

impl QecCode for Steane7 {
    fn name(&self) -> &'static str {
        "steane7"
    }

    fn n(&self) -> usize {
        7
    }

    fn encode(&self, q: &[QubitRef]) -> Unitary {
        let mut u = Unitary::cnot(q[0].clone(), q[4].clone()).then(Unitary::cnot(q[0].clone(), q[5].clone()));
        for &p in &STEANE_PIVOTS {
            u = u.then(Unitary::h(q[p].clone()));
        }
        for (gen, &pivot) in STEANE_GENERATORS.iter().zip(&STEANE_PIVOTS) {
            for &t in gen.iter().filter(|&&t| t != pivot) {
                u = u.then(Unitary::cnot(q[pivot].clone(), q[t].clone()));
            }
        }
        u
    }

    fn syndrome_qubits(&self) -> usize {
        6
    }

    fn extract_and_correct(&self, q: &[QubitRef], a: &[QubitRef]) -> Unitary {
        let (z_checks, x_checks) = a.split_at(3);
        let mut u = Unitary::empty();
        for (gen, anc) in STEANE_GENERATORS.iter().zip(z_checks) {
            for &t in gen {
                u = u.then(Unitary::cnot(q[t].clone(), anc.clone()));
            }
        }
        for (gen, anc) in STEANE_GENERATORS.iter().zip(x_checks) {
            u = u.then(Unitary::h(anc.clone()));
            for &t in gen {
                u = u.then(Unitary::cnot(anc.clone(), q[t].clone()));
            }
            u = u.then(Unitary::h(anc.clone()));
        }
        let fix = |checks: &[QubitRef], r: Rotation| {
            cond_table(checks, &|s| match steane_position(s) {
                Some(t) => Unitary::rot(q[t].clone(), r),
                None => Unitary::empty(),
            })
        };
        u.then(fix(z_checks, Rotation::x())).then(fix(x_checks, Rotation::z()))
    }

    fn transversal(&self, class: GateClass, q: &[QubitRef]) -> Option<Unitary> {
        match class {
            GateClass::X => Some(Unitary::layer(q, Rotation::x())),
            GateClass::Z => Some(Unitary::layer(q, Rotation::z())),
            GateClass::H => Some(Unitary::layer(q, Rotation::h())),
            _ => None,
        }
    }

    fn correctable(&self) -> Vec<(usize, Pauli)> {
        (0..7)
            .flat_map(|i| Pauli::ALL.into_iter().map(move |p| (i, p)))
            .collect()
    }
}
