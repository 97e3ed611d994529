//! Deterministic number formatting shared by every machine-readable output.

/// Significant digits kept in reports.
pub const SIG_DIGITS: usize = 12;

/// Rounds `x` to [`SIG_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// Shortest JSON rendering of `x` after rounding to 12 significant digits.
pub fn format_float(x: f64) -> String {
    serde_json::to_string(&round_sig(x)).expect("finite float")
}
