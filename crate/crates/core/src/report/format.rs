/// Formats `x` with six significant digits in fixed notation, trailing zeros removed.
///
/// `0.034740` prints as `0.03474`, `-3.19770` as `-3.1977`, `1234567.0` as `1234570`.
pub fn sig6(x: f64) -> String {
    sig(x, 6)
}

/// Formats `x` with `digits` significant digits (at least 1) in fixed notation.
pub fn sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.*e}", digits - 1);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let rounded: f64 = format!("{mantissa}e{exp}").parse().expect("round trip");
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let mut out = format!("{rounded:.decimals$}");
    if out.contains('.') {
        out.truncate(out.trim_end_matches('0').trim_end_matches('.').len());
    }
    if out == "-0" {
        out = "0".into();
    }
    out
}

/// Fixed notation with `decimals` places; a rounded negative zero prints unsigned.
pub fn fixed(x: f64, decimals: usize) -> String {
    let out = format!("{x:.decimals$}");
    if out.starts_with('-') && out[1..].chars().all(|c| c == '0' || c == '.') {
        out[1..].to_string()
    } else {
        out
    }
}

pub fn fixed_opt(x: Option<f64>, decimals: usize) -> String {
    x.map(|v| fixed(v, decimals)).unwrap_or_default()
}

/// [`sig6`] for optional values; missing values become an empty cell.
pub fn sig6_opt(x: Option<f64>) -> String {
    x.map(sig6).unwrap_or_default()
}
