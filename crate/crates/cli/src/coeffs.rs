use std::path::Path;
use std::str::FromStr;

use heckeval::ball::parse_decimal;
use heckeval::qexp::{CoefficientSource, EigenformHandle};
use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Exact q-expansion coefficients of a normalized eigenform, as stored on
/// disk. Coefficients are decimal integer or rational strings, `a_1` first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientFile {
    pub level: u64,
    pub weight: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atkin_lehner_sign: Option<i8>,
    pub coefficients: Vec<String>,
}

/// Parses `"n"`, `"n/d"` or a terminating decimal.
pub fn parse_exact(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.contains('/') {
        Rational::from_str(s).ok()
    } else {
        parse_decimal(s)
    }
}

impl CoefficientFile {
    /// Checks the file invariants and returns `a_1, a_2, ...`.
    pub fn rationals(&self) -> CliResult<Vec<Rational>> {
        if self.level == 0 || self.weight == 0 {
            return Err(CliError::Parse("level and weight must be positive".into()));
        }
        if self.coefficients.is_empty() {
            return Err(CliError::Parse("no coefficients".into()));
        }
        if let Some(s) = self.atkin_lehner_sign {
            if s != 1 && s != -1 {
                return Err(CliError::Parse(format!("Atkin-Lehner sign {s} is not ±1")));
            }
        }
        let out = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| parse_exact(c).ok_or_else(|| CliError::Parse(format!("a_{} = {c:?} is not a rational number", i + 1))))
            .collect::<CliResult<Vec<_>>>()?;
        if out[0] != 1 {
            return Err(CliError::NotNormalized(self.coefficients[0].clone()));
        }
        Ok(out)
    }

    pub fn to_handle(&self, source: CoefficientSource) -> CliResult<EigenformHandle> {
        let coeffs = self.rationals()?;
        Ok(EigenformHandle::from_coefficients(self.level, self.weight, &coeffs, self.atkin_lehner_sign, source)?)
    }

    /// JSON text with one coefficient per line.
    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let file: CoefficientFile = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        file.rationals()?;
        Ok(file)
    }
}

/// Reads and validates a coefficient file.
pub fn ingest_coefficients(path: &Path) -> CliResult<CoefficientFile> {
    let text = std::fs::read_to_string(path)?;
    CoefficientFile::parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn text(coeffs: &str) -> String {
        format!(r#"{{"level": 1, "weight": 12, "coefficients": [{coeffs}]}}"#)
    }

    #[test]
    fn valid_file() {
        let f = CoefficientFile::parse(&text(r#""1", "-24", "252""#)).unwrap();
        assert_eq!(f.coefficients.len(), 3);
        assert_eq!(f.rationals().unwrap()[1], -24);
        assert_eq!(CoefficientFile::parse(&f.to_text()).unwrap(), f);
    }

    #[test]
    fn rationals_and_decimals() {
        let f = CoefficientFile::parse(&text(r#""1", "-3/2", "0.25""#)).unwrap();
        assert_eq!(f.rationals().unwrap()[1], Rational::from((-3, 2)));
        assert_eq!(f.rationals().unwrap()[2], Rational::from((1, 4)));
    }

    #[test]
    fn not_normalized() {
        assert!(matches!(CoefficientFile::parse(&text(r#""2", "-24""#)), Err(CliError::NotNormalized(a)) if a == "2"));
    }

    #[test]
    fn malformed() {
        assert!(matches!(CoefficientFile::parse("{"), Err(CliError::Parse(_))));
        assert!(matches!(CoefficientFile::parse(&text(r#""1", "x""#)), Err(CliError::Parse(_))));
        assert!(matches!(CoefficientFile::parse(&text("")), Err(CliError::Parse(_))));
        let bad_sign = r#"{"level": 2, "weight": 8, "atkin_lehner_sign": 3, "coefficients": ["1"]}"#;
        assert!(matches!(CoefficientFile::parse(bad_sign), Err(CliError::Parse(_))));
    }
}
