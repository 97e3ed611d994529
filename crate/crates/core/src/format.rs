//! The JSON program file format.
//!
//! ```json
//! {"version": 1, "statements": [
//!   {"op": "mkqbit", "name": "q", "init": false},
//!   {"op": "apply", "gates": [{"gate": "x", "target": "q"}]},
//!   {"op": "measure", "qubit": "q", "name": "b"},
//!   {"op": "return", "names": ["b"]}
//! ]}
//! ```
//!
//! Besides the four core statements the format accepts `release` and
//! `noise`, which the transformer and the noise harness emit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ir::{GateStep, Name, QProgram, QubitRef, Statement, Unitary, ValidationReport};
use crate::sim::{GateClass, Rotation};

pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    SyntaxError {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported format version {0} (expected 1)")]
    UnsupportedVersion(u64),
    #[error("program is invalid: {0}")]
    ValidationFailed(ValidationReport),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends " at line L column C"; keep the message bare
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_owned(),
            None => message,
        };
        Self::SyntaxError {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    version: u32,
    statements: Vec<StmtDoc>,
}

#[derive(Deserialize)]
struct Header {
    version: Option<u64>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
enum StmtDoc {
    Mkqbit { name: Name, init: bool },
    Apply { gates: Vec<GateDoc> },
    Measure { qubit: QubitRef, name: Name },
    Release { qubit: QubitRef },
    Noise { qubits: Vec<QubitRef> },
    Return { names: Vec<Name> },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "lowercase", deny_unknown_fields)]
enum GateDoc {
    Rot {
        target: QubitRef,
        #[serde(with = "matrix")]
        matrix: Rotation,
    },
    X { target: QubitRef },
    Y { target: QubitRef },
    Z { target: QubitRef },
    H { target: QubitRef },
    S { target: QubitRef },
    Phase { target: QubitRef, theta: f64 },
    Swap { a: QubitRef, b: QubitRef },
    Cond {
        control: QubitRef,
        #[serde(rename = "else")]
        when_false: Vec<GateDoc>,
        #[serde(rename = "then")]
        when_true: Vec<GateDoc>,
    },
    Ulet { init: bool, name: Name, body: Vec<GateDoc> },
}

/// `[[re, im], ...]` row-major, four entries, checked for unitarity.
mod matrix {
    use super::*;
    use serde::{de::Error, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rotation, s: S) -> Result<S::Ok, S::Error> {
        let flat: Vec<[f64; 2]> = r.matrix().iter().flatten().map(|a| [a.re, a.im]).collect();
        flat.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rotation, D::Error> {
        let flat = <[[f64; 2]; 4]>::deserialize(d)?;
        let c = |i: usize| Complex64::new(flat[i][0], flat[i][1]);
        Rotation::new([[c(0), c(1)], [c(2), c(3)]]).map_err(D::Error::custom)
    }
}

fn gate_to_doc(step: &GateStep) -> GateDoc {
    match step {
        GateStep::Rot { target, rotation } => {
            let target = target.clone();
            let named = [GateClass::X, GateClass::Y, GateClass::Z, GateClass::H, GateClass::S]
                .into_iter()
                .find(|&g| *rotation == Rotation::of_class(g));
            match named {
                Some(GateClass::X) => GateDoc::X { target },
                Some(GateClass::Y) => GateDoc::Y { target },
                Some(GateClass::Z) => GateDoc::Z { target },
                Some(GateClass::H) => GateDoc::H { target },
                Some(GateClass::S) => GateDoc::S { target },
                _ => GateDoc::Rot {
                    target,
                    matrix: *rotation,
                },
            }
        }
        GateStep::Swap { a, b } => GateDoc::Swap {
            a: a.clone(),
            b: b.clone(),
        },
        GateStep::Cond {
            control,
            when_false,
            when_true,
        } => GateDoc::Cond {
            control: control.clone(),
            when_false: unitary_to_doc(when_false),
            when_true: unitary_to_doc(when_true),
        },
        GateStep::Ulet { init, binder, body } => GateDoc::Ulet {
            init: *init,
            name: binder.clone(),
            body: unitary_to_doc(body),
        },
    }
}

fn unitary_to_doc(u: &Unitary) -> Vec<GateDoc> {
    u.steps().iter().map(gate_to_doc).collect()
}

fn doc_to_unitary(gates: Vec<GateDoc>) -> Unitary {
    gates
        .into_iter()
        .map(|g| match g {
            GateDoc::Rot { target, matrix } => Unitary::rot(target, matrix),
            GateDoc::X { target } => Unitary::rot(target, Rotation::x()),
            GateDoc::Y { target } => Unitary::rot(target, Rotation::y()),
            GateDoc::Z { target } => Unitary::rot(target, Rotation::z()),
            GateDoc::H { target } => Unitary::rot(target, Rotation::h()),
            GateDoc::S { target } => Unitary::rot(target, Rotation::s()),
            GateDoc::Phase { target, theta } => Unitary::rot(target, Rotation::phase(theta)),
            GateDoc::Swap { a, b } => Unitary::swap(a, b),
            GateDoc::Cond {
                control,
                when_false,
                when_true,
            } => Unitary::cond(control, doc_to_unitary(when_false), doc_to_unitary(when_true)),
            GateDoc::Ulet { init, name, body } => Unitary::ulet(init, name, doc_to_unitary(body)),
        })
        .collect()
}

/// Parses and validates a program document.
pub fn parse_program(text: &str) -> Result<QProgram, FormatError> {
    let header: Header = serde_json::from_str(text)?;
    match header.version {
        Some(v) if v != u64::from(VERSION) => return Err(FormatError::UnsupportedVersion(v)),
        _ => {}
    }
    let doc: Document = serde_json::from_str(text)?;
    let stmts = doc
        .statements
        .into_iter()
        .map(|s| match s {
            StmtDoc::Mkqbit { name, init } => Statement::MkQbit { init, binder: name },
            StmtDoc::Apply { gates } => Statement::ApplyU(doc_to_unitary(gates)),
            StmtDoc::Measure { qubit, name } => Statement::MeasQbit {
                target: qubit,
                binder: name,
            },
            StmtDoc::Release { qubit } => Statement::Release { target: qubit },
            StmtDoc::Noise { qubits } => Statement::Noise { qubits },
            StmtDoc::Return { names } => Statement::Return { names },
        })
        .collect();
    let p = QProgram::new(stmts);
    let report = p.validate();
    if report.is_valid() {
        Ok(p)
    } else {
        Err(FormatError::ValidationFailed(report))
    }
}

/// Pretty-printed document. Named gates are written with their short
/// form; everything else as an explicit matrix.
pub fn serialize_program(p: &QProgram) -> String {
    let statements = p
        .statements()
        .iter()
        .map(|s| match s {
            Statement::MkQbit { init, binder } => StmtDoc::Mkqbit {
                name: binder.clone(),
                init: *init,
            },
            Statement::ApplyU(u) => StmtDoc::Apply {
                gates: unitary_to_doc(u),
            },
            Statement::MeasQbit { target, binder } => StmtDoc::Measure {
                qubit: target.clone(),
                name: binder.clone(),
            },
            Statement::Release { target } => StmtDoc::Release {
                qubit: target.clone(),
            },
            Statement::Noise { qubits } => StmtDoc::Noise {
                qubits: qubits.clone(),
            },
            Statement::Return { names } => StmtDoc::Return { names: names.clone() },
        })
        .collect();
    let doc = Document {
        version: VERSION,
        statements,
    };
    serde_json::to_string_pretty(&doc).expect("document serializes")
}
