//! Exact fixed-point rendering of non-negative rationals.

use num_rational::Ratio;

/// Renders `r` with exactly `digits` fractional digits, rounding half up.
pub fn render(r: &Ratio<u64>, digits: u32) -> String {
    let scale = 10u128.pow(digits);
    let num = u128::from(*r.numer());
    let den = u128::from(*r.denom());
    let scaled = (2 * num * scale + den) / (2 * den);
    let int = scaled / scale;
    let frac = scaled % scale;
    if digits == 0 {
        int.to_string()
    } else {
        format!("{int}.{frac:0width$}", width = digits as usize)
    }
}

/// Parses a plain non-negative decimal such as `12`, `0.5` or `1.333333`.
pub fn parse(s: &str) -> Option<Ratio<u64>> {
    let s = s.trim();
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) || frac.len() > 18 {
        return None;
    }
    let den = 10u64.pow(frac.len() as u32);
    let int: u64 = if int.is_empty() { 0 } else { int.parse().ok()? };
    let frac: u64 = if frac.is_empty() {
        0
    } else {
        frac.parse().ok()?
    };
    let num = int.checked_mul(den)?.checked_add(frac)?;
    Some(Ratio::new(num, den))
}
