//! Number formatting and small-grammar parsing shared by all commands.
//!
//! JSON and CSV both print floats with 17 significant digits so that every
//! double round-trips and identical inputs produce byte-identical output.

use std::io;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::Serialize;
use serde_json::ser::Formatter;

use torsion_core::complexes::Word;

use crate::CliError;

/// 17 significant digits in scientific notation: 1 leading + 16 fractional.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

struct SigFigFormatter;

impl Formatter for SigFigFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        writer.write_all(fmt_f64(value).as_bytes())
    }
}

/// Serializes any report through the fixed-precision formatter.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigFigFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| CliError::validation(format!("serialization failed: {e}")))?;
    String::from_utf8(out).map_err(|e| CliError::validation(format!("non-UTF-8 output: {e}")))
}

/// Parses complex literals: "2", "-1.5", "i", "-2i", "0.5+0.5i", "1e-3-2e-2i".
pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let t: String = s.trim().chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::validation(format!("cannot parse complex number '{s}'"));
    if t.is_empty() {
        return Err(bad());
    }
    if !t.ends_with('i') {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    }
    let body = &t[..t.len() - 1];
    // Last sign that starts the imaginary part (not a leading sign, not an
    // exponent sign).
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-')
            && bytes[i - 1] != b'e'
            && bytes[i - 1] != b'E'
        {
            split = Some(i);
            break;
        }
    }
    let part = |s: &str| -> Result<f64, CliError> {
        match s {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => s.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        None => Ok(Complex64::new(0.0, part(body)?)),
        Some(i) => {
            let re = body[..i].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, part(&body[i..])?))
        }
    }
}

/// Parses rationals written as "a/b" or "a".
pub fn parse_ratio(s: &str) -> Result<Ratio<i64>, CliError> {
    let bad = || CliError::validation(format!("cannot parse rational '{s}'"));
    let t = s.trim();
    match t.split_once('/') {
        None => t.parse::<i64>().map(Ratio::from_integer).map_err(|_| bad()),
        Some((num, den)) => {
            let n = num.trim().parse::<i64>().map_err(|_| bad())?;
            let d = den.trim().parse::<i64>().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Ratio::new(n, d))
        }
    }
}

/// Parses group words written as "1", "t", "t^-2", or "t^2 s^-1".
pub fn parse_word(s: &str) -> Result<Word, CliError> {
    let bad = |tok: &str| CliError::validation(format!("cannot parse group word token '{tok}'"));
    let mut factors = Vec::new();
    for tok in s.split_whitespace() {
        if tok == "1" {
            continue;
        }
        let (sym, exp) = match tok.split_once('^') {
            None => (tok, 1i64),
            Some((sym, e)) => (sym, e.parse::<i64>().map_err(|_| bad(tok))?),
        };
        let valid = !sym.is_empty()
            && sym.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && sym.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid {
            return Err(bad(tok));
        }
        factors.push((sym.to_string(), exp));
    }
    Ok(Word::from_factors(factors))
}

/// Inverse of `parse_word`; the identity prints as "1".
pub fn format_word(w: &Word) -> String {
    if w.is_identity() {
        return "1".to_string();
    }
    w.factors()
        .iter()
        .map(|(sym, exp)| {
            if *exp == 1 {
                sym.clone()
            } else {
                format!("{sym}^{exp}")
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals_cover_all_forms() {
        assert_eq!(parse_complex("2").unwrap(), Complex64::new(2.0, 0.0));
        assert_eq!(parse_complex("-1.5").unwrap(), Complex64::new(-1.5, 0.0));
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("0.5+0.5i").unwrap(), Complex64::new(0.5, 0.5));
        assert_eq!(parse_complex("1-2i").unwrap(), Complex64::new(1.0, -2.0));
        assert_eq!(
            parse_complex("1e-3-2.5e-2i").unwrap(),
            Complex64::new(1e-3, -2.5e-2)
        );
        assert_eq!(parse_complex("-1-i").unwrap(), Complex64::new(-1.0, -1.0));
        assert!(parse_complex("").is_err());
        assert!(parse_complex("2+2").is_err());
        assert!(parse_complex("x+yi").is_err());
    }

    #[test]
    fn words_round_trip() {
        for s in ["1", "t", "t^-2", "t^2 s^-1"] {
            let w = parse_word(s).unwrap();
            assert_eq!(format_word(&w), s);
        }
        assert!(parse_word("t^").is_err());
        assert!(parse_word("3t").is_err());
    }

    #[test]
    fn floats_print_17_significant_digits() {
        assert_eq!(fmt_f64(2.0), "2.0000000000000000e0");
        let x = 0.1 + 0.2;
        let back: f64 = fmt_f64(x).parse().unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn rationals_parse_and_reject_zero_denominators() {
        assert_eq!(parse_ratio("3/4").unwrap(), Ratio::new(3, 4));
        assert_eq!(parse_ratio("-2").unwrap(), Ratio::from_integer(-2));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("a/b").is_err());
    }
}
