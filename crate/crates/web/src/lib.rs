//! WebAssembly bindings behind the static page in `www/`.
//!
//! Each export takes and returns JSON text. The plain Rust functions in
//! [`api`] do the work and are what the native tests exercise.

use wasm_bindgen::prelude::*;

pub mod api {
    use qecw::format::{parse_program, serialize_program};
    use qecw::ir::{QProgram, Statement};
    use qecw::noise::{estimate_logical_error_rate, Channel, NoiseSpec};
    use qecw::qec::get_code;
    use qecw::sim::evaluate_exact;
    use qecw::transform::{transform_with, CorrectionPolicy, TransformOptions};
    use qecw::corpus;
    use serde::Serialize;

    /// Probabilities swept by [`error_rate_curve`].
    pub const CURVE_POINTS: [f64; 9] = [0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5];

    /// Largest trial count a curve may request.
    pub const MAX_TRIALS: u64 = 20_000;

    fn parse(program: &str) -> Result<QProgram, String> {
        parse_program(program).map_err(|e| e.to_string())
    }

    pub fn corpus_names() -> String {
        serde_json::to_string(&corpus::NAMES).expect("strings serialize")
    }

    pub fn corpus_program(name: &str) -> Result<String, String> {
        corpus::program(name)
            .map(|p| serialize_program(&p))
            .ok_or_else(|| format!("no built-in program `{name}`"))
    }

    /// Exact outcome distribution, e.g. `{"True": 1.0}`.
    pub fn simulate(program: &str) -> Result<String, String> {
        let p = parse(program)?;
        evaluate_exact(&p).map(|d| d.to_json()).map_err(|e| e.to_string())
    }

    #[derive(Serialize)]
    struct Transformed {
        program: String,
        logical_qubits: usize,
        physical_qubits: usize,
        statements: usize,
        correction_rounds: usize,
        original: serde_json::Value,
        encoded: serde_json::Value,
    }

    /// Encodes `program` and reports both exact distributions alongside the
    /// rewritten document.
    pub fn transform(program: &str, code: &str, policy: &str) -> Result<String, String> {
        let p = parse(program)?;
        let code = get_code(code).map_err(|e| e.to_string())?;
        let opts = TransformOptions {
            policy: policy.parse::<CorrectionPolicy>()?,
            ..TransformOptions::default()
        };
        let t = transform_with(&p, &code, &opts).map_err(|e| e.to_string())?;
        let dist = |q: &QProgram| -> Result<serde_json::Value, String> {
            let d = evaluate_exact(q).map_err(|e| e.to_string())?;
            serde_json::from_str(&d.to_json()).map_err(|e| e.to_string())
        };
        let count_mk = |q: &QProgram| {
            q.statements()
                .iter()
                .filter(|s| matches!(s, Statement::MkQbit { .. }))
                .count()
        };
        let out = Transformed {
            program: serialize_program(&t.program),
            logical_qubits: t.register.len(),
            physical_qubits: count_mk(&t.program),
            statements: t.program.len(),
            correction_rounds: t.boundaries.len(),
            original: dist(&p)?,
            encoded: dist(&t.program)?,
        };
        serde_json::to_string(&out).map_err(|e| e.to_string())
    }

    #[derive(Serialize)]
    struct CurvePoint {
        p: f64,
        plain: f64,
        plain_ci: [f64; 2],
        encoded: f64,
        encoded_ci: [f64; 2],
    }

    /// Plain and encoded logical error rates over [`CURVE_POINTS`] with noise
    /// at correction-round boundaries.
    pub fn error_rate_curve(program: &str, code: &str, channel: &str, trials: u64, seed: u64) -> Result<String, String> {
        if trials == 0 || trials > MAX_TRIALS {
            return Err(format!("trials must be between 1 and {MAX_TRIALS}"));
        }
        let p = parse(program)?;
        let code = get_code(code).map_err(|e| e.to_string())?;
        let points = CURVE_POINTS
            .iter()
            .map(|&x| {
                let spec = NoiseSpec::boundary(Channel::new(channel, x).map_err(|e| e.to_string())?);
                let r = estimate_logical_error_rate(&p, &code, &spec, &TransformOptions::default(), trials, seed)
                    .map_err(|e| e.to_string())?;
                Ok(CurvePoint {
                    p: x,
                    plain: r.plain.rate,
                    plain_ci: [r.plain.ci_lo, r.plain.ci_hi],
                    encoded: r.encoded.rate,
                    encoded_ci: [r.encoded.ci_lo, r.encoded.ci_hi],
                })
            })
            .collect::<Result<Vec<_>, String>>()?;
        serde_json::to_string(&points).map_err(|e| e.to_string())
    }
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = corpusNames)]
pub fn corpus_names() -> String {
    api::corpus_names()
}

#[wasm_bindgen(js_name = corpusProgram)]
pub fn corpus_program(name: &str) -> Result<String, JsError> {
    js(api::corpus_program(name))
}

#[wasm_bindgen]
pub fn simulate(program: &str) -> Result<String, JsError> {
    js(api::simulate(program))
}

#[wasm_bindgen]
pub fn transform(program: &str, code: &str, policy: &str) -> Result<String, JsError> {
    js(api::transform(program, code, policy))
}

#[wasm_bindgen(js_name = errorRateCurve)]
pub fn error_rate_curve(program: &str, code: &str, channel: &str, trials: u32, seed: u32) -> Result<String, JsError> {
    js(api::error_rate_curve(program, code, channel, trials.into(), seed.into()))
}
