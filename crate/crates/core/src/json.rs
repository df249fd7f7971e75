//! Canonical JSON emission and parsing helpers.
//!
//! Output must be byte-identical for identical inputs, so floats are
//! written with a fixed 17-significant-digit scientific format and every
//! object is emitted with a fixed field order by hand. Parsing goes
//! through `serde_json` for robustness.

use num_complex::Complex64;
use serde_json::Value;

/// Fixed 17-significant-digit scientific formatting.
pub fn fmt_f64(x: f64) -> String {
    format!("{:.16e}", x)
}

/// `{"re":…,"im":…}` with canonical float formatting.
pub fn fmt_complex(z: Complex64) -> String {
    format!("{{\"re\":{},\"im\":{}}}", fmt_f64(z.re), fmt_f64(z.im))
}

pub fn fmt_complex_list(zs: &[Complex64]) -> String {
    let items: Vec<String> = zs.iter().map(|&z| fmt_complex(z)).collect();
    format!("[{}]", items.join(","))
}

pub fn fmt_f64_list(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|&x| fmt_f64(x)).collect();
    format!("[{}]", items.join(","))
}

pub fn fmt_usize_list(xs: &[usize]) -> String {
    let items: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(","))
}

pub fn fmt_str(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization cannot fail")
}

// --- parsing helpers -----------------------------------------------------

pub fn parse_value(text: &str) -> Result<Value, String> {
    serde_json::from_str(text).map_err(|e| e.to_string())
}

pub fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value, String> {
    v.get(key).ok_or_else(|| format!("missing field \"{key}\""))
}

pub fn as_usize(v: &Value, what: &str) -> Result<usize, String> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| format!("{what} must be a non-negative integer"))
}

pub fn as_f64(v: &Value, what: &str) -> Result<f64, String> {
    v.as_f64().ok_or_else(|| format!("{what} must be a number"))
}

pub fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, String> {
    v.as_array().ok_or_else(|| format!("{what} must be an array"))
}

pub fn as_complex(v: &Value, what: &str) -> Result<Complex64, String> {
    let re = as_f64(get(v, "re").map_err(|e| format!("{what}: {e}"))?, "re")?;
    let im = as_f64(get(v, "im").map_err(|e| format!("{what}: {e}"))?, "im")?;
    Ok(Complex64::new(re, im))
}

pub fn as_usize_list(v: &Value, what: &str) -> Result<Vec<usize>, String> {
    as_array(v, what)?
        .iter()
        .map(|x| as_usize(x, what))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_is_fixed_width_17_digits() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(-0.5), "-5.0000000000000000e-1");
        assert_eq!(fmt_f64(std::f64::consts::PI), "3.1415926535897931e0");
    }

    #[test]
    fn emitted_floats_reparse_exactly() {
        for &x in &[1.0, -0.5, 1e-300, 123456.789, std::f64::consts::PI] {
            let s = fmt_f64(x);
            let v: Value = serde_json::from_str(&s).unwrap();
            assert_eq!(v.as_f64().unwrap(), x);
        }
    }
}
