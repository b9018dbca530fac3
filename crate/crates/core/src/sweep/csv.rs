//! Locale-free CSV rendering.

use super::SweepRecord;

pub const HEADER: &str = "delta_over_lambda,n,berry_over_pi,entropy_nats,concurrence,paper_cn";

/// Nine significant digits in the style of C's `%.9g`: fixed notation for
/// decimal exponents in `[-4, 9)`, scientific otherwise, trailing zeros
/// dropped, negative zero printed as `0`.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if x < 0.0 { "-" } else { "" };
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();

    if (-4..9).contains(&exp) {
        let body = if exp >= 0 {
            let (int, frac) = digits.split_at(exp as usize + 1);
            with_fraction(int, frac)
        } else {
            let zeros = "0".repeat((-exp - 1) as usize);
            with_fraction("0", &format!("{zeros}{digits}"))
        };
        format!("{sign}{body}")
    } else {
        let (lead, frac) = digits.split_at(1);
        let exp_sign = if exp < 0 { '-' } else { '+' };
        format!(
            "{sign}{}e{exp_sign}{:02}",
            with_fraction(lead, frac),
            exp.abs()
        )
    }
}

fn with_fraction(int: &str, frac: &str) -> String {
    let frac = frac.trim_end_matches('0');
    if frac.is_empty() {
        int.to_string()
    } else {
        format!("{int}.{frac}")
    }
}

fn optional(x: Option<f64>) -> String {
    x.map(format_sig9).unwrap_or_default()
}

pub fn format_row(r: &SweepRecord) -> String {
    format!(
        "{},{},{},{},{},{}",
        format_sig9(r.delta_over_lambda),
        r.n,
        format_sig9(r.berry_over_pi),
        format_sig9(r.entropy_nats),
        optional(r.concurrence),
        optional(r.paper_cn),
    )
}

/// Header, one line per record, then `#` footer lines; LF endings throughout.
pub fn render(records: &[SweepRecord], footer: &[String]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format_row(r));
        out.push('\n');
    }
    for line in footer {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out
}
