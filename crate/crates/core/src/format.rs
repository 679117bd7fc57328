//! Locale-independent number formatting for printed probabilities.

/// Formats `x` with 15 significant digits: positional notation when the
/// decimal exponent is within `[-6, 6]`, otherwise scientific with a
/// lowercase `e` (`1.23456789012345e-7`).
pub fn format_sig15(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return format!("{:.14}", 0.0);
    }
    let sci = format!("{x:.14e}");
    let exp: i32 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .expect("scientific formatting always has an exponent");
    if (-6..=6).contains(&exp) {
        let decimals = (14 - exp) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}
