//! Deterministic text formatting shared by every emitted file.
//!
//! All floating-point values in CSV/JSON outputs are rendered with C's
//! `%.8g` semantics so that identical runs produce byte-identical files.

use std::io;

/// Formats `v` like C's `%.8g`.
pub fn g8(v: f64) -> String {
    format_g(v, 8)
}

/// Formats `v` like C's `%.*g` with `sig` significant digits.
///
/// Style selection follows printf: scientific when the decimal exponent is
/// below −4 or at least `sig`, fixed otherwise; trailing fractional zeros
/// (and a bare decimal point) are stripped; exponents carry a sign and at
/// least two digits.
pub fn format_g(v: f64, sig: usize) -> String {
    assert!(sig >= 1, "significant digits must be positive");
    if v.is_nan() {
        return "nan".to_string();
    }
    if v.is_infinite() {
        return if v < 0.0 { "-inf" } else { "inf" }.to_string();
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0" } else { "0" }.to_string();
    }

    // `{:.*e}` rounds to sig-1 mantissa decimals and absorbs any carry into
    // the exponent (9.99999995e8 becomes 1.0000000e9), so the exponent below
    // is the one %g bases its style decision on.
    let sci = format!("{:.*e}", sig - 1, v.abs());
    let (mantissa, exp) = sci.split_once('e').expect("{:e} always has an exponent");
    let exp: i32 = exp.parse().expect("exponent is a small integer");
    let digits: Vec<u8> = mantissa.bytes().filter(u8::is_ascii_digit).collect();
    debug_assert_eq!(digits.len(), sig);

    let body = if exp < -4 || exp >= sig as i32 {
        let trimmed = trim_zeros(&digits);
        let mantissa = if trimmed.len() == 1 {
            String::from_utf8_lossy(trimmed).into_owned()
        } else {
            format!(
                "{}.{}",
                trimmed[0] as char,
                String::from_utf8_lossy(&trimmed[1..])
            )
        };
        format!(
            "{}e{}{:02}",
            mantissa,
            if exp < 0 { '-' } else { '+' },
            exp.unsigned_abs()
        )
    } else if exp >= 0 {
        let int_len = exp as usize + 1;
        let int_part = String::from_utf8_lossy(&digits[..int_len]).into_owned();
        let frac = trim_zeros(&digits[int_len..]);
        if frac.is_empty() {
            int_part
        } else {
            format!("{int_part}.{}", String::from_utf8_lossy(frac))
        }
    } else {
        let leading_zeros = (-exp - 1) as usize;
        let frac = trim_zeros(&digits);
        format!(
            "0.{}{}",
            "0".repeat(leading_zeros),
            String::from_utf8_lossy(frac)
        )
    };
    if v < 0.0 {
        format!("-{body}")
    } else {
        body
    }
}

fn trim_zeros(digits: &[u8]) -> &[u8] {
    let end = digits
        .iter()
        .rposition(|&d| d != b'0')
        .map_or(0, |p| p + 1);
    &digits[..end]
}

/// serde_json formatter rendering every float with `%.8g` (compact layout).
pub struct G8JsonFormatter;

impl serde_json::ser::Formatter for G8JsonFormatter {
    fn write_f64<W: io::Write + ?Sized>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(g8(value).as_bytes())
    }

    fn write_f32<W: io::Write + ?Sized>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        writer.write_all(g8(f64::from(value)).as_bytes())
    }
}

/// Serializes a value to a JSON string with `%.8g` floats.
pub fn to_json_g8<S: serde::Serialize>(value: &S) -> crate::error::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, G8JsonFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| crate::error::Error::ParseError(format!("json serialization: {e}")))?;
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

/// FNV-1a 64-bit hash; pinned here because the toolkit's seed derivations
/// must stay stable across toolchain upgrades (std's hashers are not).
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Quotes a CSV field only when it contains a delimiter, quote, or newline.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
