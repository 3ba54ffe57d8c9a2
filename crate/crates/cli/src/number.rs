//! Plain decimal formatting with a fixed number of significant digits.
//!
//! Output never uses exponent notation, so every printed number is also a
//! valid literal in the expression grammar.

pub fn format_significant(v: f64, digits: usize) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v.abs());
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let ds: String = mantissa.chars().filter(|c| *c != '.').collect();
    let (int_part, frac_part) = if exp >= 0 {
        let split = exp as usize + 1;
        if ds.len() <= split {
            (format!("{ds}{}", "0".repeat(split - ds.len())), String::new())
        } else {
            (ds[..split].to_string(), ds[split..].to_string())
        }
    } else {
        ("0".to_string(), format!("{}{ds}", "0".repeat((-exp - 1) as usize)))
    };
    let frac = frac_part.trim_end_matches('0');
    let body = if frac.is_empty() { int_part } else { format!("{int_part}.{frac}") };
    if v < 0.0 {
        format!("-{body}")
    } else {
        body
    }
}
