use rug::{Integer, Rational};

/// Parses a decimal literal such as `-12.5`, `3e-4` or `1.25E+21` into an
/// exact rational.
pub fn parse_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (neg, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exp) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i64>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from(digits.parse::<Integer>().ok()?);
    let shift = exp.checked_sub(frac_part.len() as i64)?;
    if shift.unsigned_abs() > 1_000_000 {
        return None;
    }
    let scale = Integer::from(Integer::u_pow_u(10, shift.unsigned_abs() as u32));
    if shift >= 0 {
        value *= scale;
    } else {
        value /= scale;
    }
    if neg {
        value = -value;
    }
    Some(value)
}
