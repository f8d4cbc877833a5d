/// Formats `value` with `precision` decimals, rounding half away from zero.
///
/// The value is first snapped to 15 significant digits so binary noise
/// (0.65149999999999997 for 0.6515) does not decide ties. Zero is never
/// shown with a minus sign.
pub fn format_fixed(value: f64, precision: usize) -> String {
    if !value.is_finite() {
        return value.to_string();
    }
    let sci = format!("{:.14e}", value.abs());
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i64 = exp.parse().expect("integer exponent");
    let digits: Vec<u8> = mantissa
        .bytes()
        .filter(u8::is_ascii_digit)
        .map(|b| b - b'0')
        .collect();

    // digits read as 0.d1d2d3... times 10^point
    let point = exp + 1;
    let (mut int, frac): (Vec<u8>, Vec<u8>) = if point <= 0 {
        let mut frac = vec![0; (-point) as usize];
        frac.extend(&digits);
        (vec![0], frac)
    } else if point as usize >= digits.len() {
        let mut int = digits.clone();
        int.resize(point as usize, 0);
        (int, Vec::new())
    } else {
        let (i, f) = digits.split_at(point as usize);
        (i.to_vec(), f.to_vec())
    };

    let mut kept: Vec<u8> = (0..precision).map(|i| *frac.get(i).unwrap_or(&0)).collect();
    if frac.get(precision).copied().unwrap_or(0) >= 5 {
        let mut carry = true;
        for d in kept.iter_mut().rev().chain(int.iter_mut().rev()) {
            if !carry {
                break;
            }
            if *d == 9 {
                *d = 0;
            } else {
                *d += 1;
                carry = false;
            }
        }
        if carry {
            int.insert(0, 1);
        }
    }

    let is_zero = int.iter().chain(&kept).all(|&d| d == 0);
    let mut out = String::new();
    if value < 0.0 && !is_zero {
        out.push('-');
    }
    out.extend(int.iter().map(|d| char::from(b'0' + d)));
    if precision > 0 {
        out.push('.');
        out.extend(kept.iter().map(|d| char::from(b'0' + d)));
    }
    out
}
