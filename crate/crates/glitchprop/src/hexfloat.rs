//! C99 hexadecimal float literals (`%a` style), bit-exact in both directions.

use crate::error::{Error, Result};
use crate::float_kernel::MachineFloat;

/// Render `x` as a hex-float literal such as `0x1.4ac55cp+21`.
pub fn format<F: MachineFloat>(x: F) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    let fmt = F::FORMAT;
    let bits = x.to_bits64();
    let neg = bits & fmt.sign_mask() != 0;
    let sign = if neg { "-" } else { "" };
    if !x.is_finite() {
        return format!("{sign}inf");
    }
    let mbits = fmt.mantissa_bits();
    let mag = bits & !fmt.sign_mask();
    let frac = mag & ((1u64 << mbits) - 1);
    let biased = (mag >> mbits) as i32;
    if mag == 0 {
        return format!("{sign}0x0p+0");
    }
    let ndig = mbits.div_ceil(4);
    let padded = frac << (ndig * 4 - mbits);
    let mut digits = format!("{:0width$x}", padded, width = ndig as usize);
    while digits.ends_with('0') {
        digits.pop();
    }
    let (lead, e) = if biased == 0 {
        (0, fmt.min_exponent)
    } else {
        (1, biased - fmt.exponent_bias())
    };
    let esign = if e < 0 { '-' } else { '+' };
    if digits.is_empty() {
        format!("{sign}0x{lead}p{esign}{}", e.abs())
    } else {
        format!("{sign}0x{lead}.{digits}p{esign}{}", e.abs())
    }
}

/// Parse a hex-float literal (also `inf` and plain decimals) into `F`,
/// rounding to nearest-even when the literal carries more digits than `F`.
pub fn parse<F: MachineFloat>(text: &str) -> Result<F> {
    let err = |msg: &str| Error::Parse {
        line: 0,
        msg: format!("{msg}: {text:?}"),
    };
    let s = text.trim();
    let (neg, body) = match s.as_bytes().first() {
        Some(b'-') => (true, &s[1..]),
        Some(b'+') => (false, &s[1..]),
        _ => (false, s),
    };
    let lower = body.to_ascii_lowercase();
    if lower == "inf" || lower == "infinity" {
        let v = F::from_bits64(F::FORMAT.inf_bits());
        return Ok(if neg { v.neg() } else { v });
    }
    if lower == "nan" {
        return Err(err("NaN is not an admissible float"));
    }
    let Some(hex) = lower.strip_prefix("0x") else {
        return parse_decimal::<F>(s).ok_or_else(|| err("not a float literal"));
    };
    let (mantissa_part, exp_part) = match hex.split_once('p') {
        Some((m, e)) => (m, Some(e)),
        None => (hex, None),
    };
    let (int_part, frac_part) = match mantissa_part.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa_part, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err("missing hex digits"));
    }
    let mut mant: u128 = 0;
    let mut exp2: i64 = 0;
    let mut sticky = false;
    for (i, c) in int_part.chars().chain(frac_part.chars()).enumerate() {
        let d = c.to_digit(16).ok_or_else(|| err("bad hex digit"))? as u128;
        let in_frac = i >= int_part.len();
        if mant >> 120 == 0 {
            mant = (mant << 4) | d;
            if in_frac {
                exp2 -= 4;
            }
        } else {
            sticky |= d != 0;
            if !in_frac {
                exp2 += 4;
            }
        }
    }
    if let Some(e) = exp_part {
        let e: i64 = e.parse().map_err(|_| err("bad binary exponent"))?;
        exp2 = exp2.saturating_add(e.clamp(-1 << 40, 1 << 40));
    }
    let bits = round_to_format::<F>(neg, mant, exp2, sticky);
    Ok(F::from_bits64(bits))
}

fn parse_decimal<F: MachineFloat>(s: &str) -> Option<F> {
    if F::FORMAT.precision_bits == 24 {
        s.parse::<f32>().ok().map(|v| F::from_bits64(v.to_bits() as u64))
    } else {
        s.parse::<f64>().ok().map(|v| F::from_bits64(v.to_bits()))
    }
    .filter(|v| !v.is_nan())
}

/// Round `mant * 2^exp2` (plus a sticky tail) to the bits of `F`.
pub(crate) fn round_to_format<F: MachineFloat>(neg: bool, mant: u128, exp2: i64, sticky: bool) -> u64 {
    let fmt = F::FORMAT;
    let sign = if neg { fmt.sign_mask() } else { 0 };
    if mant == 0 {
        return sign;
    }
    let p = fmt.precision_bits as i64;
    let nbits = 128 - mant.leading_zeros() as i64;
    let e = exp2 + nbits - 1;
    let q_min = fmt.min_exponent as i64 - p + 1;
    let q = (e - p + 1).max(q_min);
    let shift = q - exp2;
    let mut rounded: u128;
    let mut q = q;
    if shift > 0 {
        if shift >= 128 {
            rounded = 0;
        } else {
            rounded = mant >> shift;
            let rem = mant & ((1u128 << shift) - 1);
            let half = 1u128 << (shift - 1);
            let up = rem > half || (rem == half && (sticky || rounded & 1 == 1));
            if up {
                rounded += 1;
            }
        }
    } else {
        rounded = mant << (-shift);
    }
    if rounded == 1u128 << p {
        rounded >>= 1;
        q += 1;
    }
    if rounded >= 1u128 << (p - 1) {
        let e = q + p - 1;
        if e > fmt.max_exponent as i64 {
            return sign | fmt.inf_bits();
        }
        let biased = (e + fmt.exponent_bias() as i64) as u64;
        sign | (biased << fmt.mantissa_bits()) | (rounded as u64 & ((1u64 << fmt.mantissa_bits()) - 1))
    } else {
        sign | rounded as u64
    }
}
