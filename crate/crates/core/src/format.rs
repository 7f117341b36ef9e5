//! Deterministic number formatting shared by reports and tables.

/// Rounds `x` to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let s = format!("{:.*e}", digits.saturating_sub(1), x);
    s.parse().unwrap_or(x)
}

/// Formats `x` with at most 12 significant digits and no trailing zeros.
pub fn sig12(x: f64) -> String {
    let r = round_sig(x, 12);
    // avoid "-0"
    if r == 0.0 {
        return "0".to_string();
    }
    format!("{r}")
}
