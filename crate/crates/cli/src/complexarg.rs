//! Complex coefficient literals: `a`, `a+bi`, `a-bi`, or `bi`, with no
//! spaces, where a and b are decimal floats (scientific notation allowed).

use num_complex::Complex64;

pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    if s.is_empty() {
        return Err("empty coefficient".into());
    }
    let bad = |s: &str| format!("cannot parse complex literal \"{s}\"");
    if let Some(body) = s.strip_suffix(['i', 'I']) {
        // find the sign splitting real and imaginary parts; skip a leading
        // sign and exponent signs
        let bytes = body.as_bytes();
        let mut split = None;
        for idx in (1..bytes.len()).rev() {
            let c = bytes[idx] as char;
            if (c == '+' || c == '-') && !matches!(bytes[idx - 1] as char, 'e' | 'E') {
                split = Some(idx);
                break;
            }
        }
        match split {
            Some(idx) => {
                let re: f64 = body[..idx].parse().map_err(|_| bad(s))?;
                let im_str = &body[idx..];
                let im: f64 = if im_str == "+" {
                    1.0
                } else if im_str == "-" {
                    -1.0
                } else {
                    im_str.parse().map_err(|_| bad(s))?
                };
                Ok(Complex64::new(re, im))
            }
            None => {
                // pure imaginary: "bi" or bare "i"
                let im: f64 = if body.is_empty() {
                    1.0
                } else {
                    body.parse().map_err(|_| bad(s))?
                };
                Ok(Complex64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = s.parse().map_err(|_| bad(s))?;
        Ok(Complex64::new(re, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_literal_grammar() {
        assert_eq!(parse_complex("-1").unwrap(), Complex64::new(-1.0, 0.0));
        assert_eq!(parse_complex("0").unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(
            parse_complex("0.5+0.3i").unwrap(),
            Complex64::new(0.5, 0.3)
        );
        assert_eq!(
            parse_complex("-2.5e-1-1e0i").unwrap(),
            Complex64::new(-0.25, -1.0)
        );
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert!(parse_complex("1+2").is_err());
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }
}
