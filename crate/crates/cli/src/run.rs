use std::path::PathBuf;

use heckeval::eval::EvalPoint;
use heckeval::hecke::{eigenvalue_numerical, HeckeEigenvalue, Method};
use heckeval::qexp::{is_prime, CoefficientSource, EigenformHandle};
use heckeval::BallReal;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::coeffs::{ingest_coefficients, parse_exact};
use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Text,
    Structured,
}

impl std::str::FromStr for OutputFormat {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "structured" => Ok(OutputFormat::Structured),
            other => Err(CliError::Config(format!("unknown format `{other}`"))),
        }
    }
}

/// One eigenvalue request.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub level: u64,
    pub weight: u32,
    pub prime: u64,
    /// The accuracy target is `10^-digits`.
    pub digits: u32,
    pub method: Method,
    pub z0: Option<String>,
    pub h: Option<f64>,
    pub embedding: Option<usize>,
    pub coeffs_path: Option<PathBuf>,
    pub output_format: OutputFormat,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(level: u64, weight: u32, prime: u64, digits: u32) -> Self {
        RunConfig {
            level,
            weight,
            prime,
            digits,
            method: Method::Direct,
            z0: None,
            h: None,
            embedding: None,
            coeffs_path: None,
            output_format: OutputFormat::Text,
            threads: None,
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.digits < 1 {
            return Err(CliError::Config("--digits must be at least 1".into()));
        }
        if !is_prime(self.prime) {
            return Err(heckeval::Error::CompositeIndex(self.prime).into());
        }
        if self.method == Method::Eisenstein && self.level != 1 {
            return Err(CliError::Config("the eisenstein method requires level 1".into()));
        }
        if let Some(h) = self.h {
            if !(h > 0.0 && h < 1.0) {
                return Err(CliError::Config("--h must lie strictly between 0 and 1".into()));
            }
        }
        if self.threads == Some(0) {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        Ok(())
    }

    pub fn eps(&self) -> Float {
        Float::with_val(64, Float::i_pow_u(10, self.digits)).recip()
    }
}

/// Parses `RE+IMi`, `RE-IMi` or `IMi` with decimal or `a/b` parts.
pub fn parse_z0(s: &str) -> CliResult<EvalPoint> {
    let bad = || CliError::Config(format!("cannot parse point {s:?}; expected RE+IMi"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let body = t.strip_suffix('i').ok_or_else(bad)?;
    let split = body
        .char_indices()
        .skip(1)
        .filter(|&(i, c)| (c == '+' || c == '-') && !matches!(body.as_bytes()[i - 1], b'e' | b'E'))
        .map(|(i, _)| i)
        .last();
    let (re, im) = match split {
        Some(i) => (parse_exact(&body[..i]).ok_or_else(bad)?, parse_exact(&body[i..]).ok_or_else(bad)?),
        None => (Rational::new(), parse_exact(body).ok_or_else(bad)?),
    };
    Ok(EvalPoint::exact(re, im)?)
}

/// The eigenform a configuration refers to.
pub fn build_form(config: &RunConfig) -> CliResult<EigenformHandle> {
    if let Some(path) = &config.coeffs_path {
        let file = ingest_coefficients(path)?;
        if file.level != config.level || file.weight != config.weight {
            return Err(CliError::Config(format!(
                "coefficient file is for level {} weight {}, not level {} weight {}",
                file.level, file.weight, config.level, config.weight
            )));
        }
        return file.to_handle(CoefficientSource::File);
    }
    if config.level != 1 {
        return Err(heckeval::Error::UnsupportedLevel(config.level).into());
    }
    Ok(EigenformHandle::level1(config.weight, config.embedding.unwrap_or(0))?)
}

/// Runs `f` on a pool of `threads` workers, or the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// The full pipeline for one configuration. Fails unless the radius is
/// below `10^-digits`.
pub fn run_eigenvalue(config: &RunConfig) -> CliResult<HeckeEigenvalue> {
    config.validate()?;
    let z0 = config.z0.as_deref().map(parse_z0).transpose()?;
    let eps = config.eps();
    let ev = with_threads(config.threads, || -> CliResult<HeckeEigenvalue> {
        let form = build_form(config)?;
        Ok(eigenvalue_numerical(&form, config.prime, &eps, z0.as_ref(), config.h, config.method)?)
    })??;
    if !(ev.value.is_finite() && ev.value.rad() < eps) {
        return Err(CliError::Inaccurate { radius: ev.value.rad().to_string(), digits: config.digits });
    }
    Ok(ev)
}

/// Midpoint and radius strings with `digits` decimals past the accuracy
/// target plus a few guard digits. The radius covers the decimal rounding.
pub fn decimal_parts(value: &BallReal, digits: u32) -> (String, String) {
    let mid = value.mid();
    let int_digits = if mid.is_zero() {
        1
    } else {
        let e = Float::with_val(64, mid.abs_ref()).log10().to_f64().floor() as i64;
        e + 1
    };
    let sig = (int_digits + digits as i64 + 5).max(1) as usize;
    let s = value.to_decimal(sig);
    let (m, r) = s.split_once(" ± ").expect("finite balls render as mid ± rad");
    (m.to_string(), r.to_string())
}

/// The machine-readable form of a result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructuredRecord {
    pub p: u64,
    pub midpoint: String,
    pub radius: String,
    pub exact: Option<String>,
    pub method: String,
    pub z0: String,
    pub truncation: u64,
    pub term_count: usize,
    pub wall_time_ms: f64,
}

impl StructuredRecord {
    pub fn new(ev: &HeckeEigenvalue, digits: u32) -> Self {
        let (midpoint, radius) = decimal_parts(&ev.value, digits);
        StructuredRecord {
            p: ev.p,
            midpoint,
            radius,
            exact: ev.exact.as_ref().map(|n| n.to_string()),
            method: ev.method.to_string(),
            z0: ev.z0.to_string(),
            truncation: ev.truncation,
            term_count: ev.term_count,
            wall_time_ms: ev.wall_time.as_secs_f64() * 1e3,
        }
    }

    pub fn render(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    pub fn parse(s: &str) -> CliResult<Self> {
        serde_json::from_str(s).map_err(|e| CliError::Parse(e.to_string()))
    }
}

pub fn render_text(ev: &HeckeEigenvalue, digits: u32) -> String {
    let (m, r) = decimal_parts(&ev.value, digits);
    let mut out = format!("lambda_{} = {m} ± {r}\n", ev.p);
    if let Some(n) = &ev.exact {
        out.push_str(&format!("exact: {n}\n"));
    }
    out.push_str(&format!(
        "method: {}  z0: {}  truncation: {}  evaluations: {}  time: {:.3} ms\n",
        ev.method,
        ev.z0,
        ev.truncation,
        ev.term_count,
        ev.wall_time.as_secs_f64() * 1e3
    ));
    out
}

pub fn render(ev: &HeckeEigenvalue, config: &RunConfig) -> String {
    match config.output_format {
        OutputFormat::Text => render_text(ev, config.digits),
        OutputFormat::Structured => StructuredRecord::new(ev, config.digits).render() + "\n",
    }
}

/// `a_1 ..= a_terms` of a level-one eigenform: exact integers when the
/// space is one-dimensional, balls otherwise.
pub fn run_qexp(level: u64, weight: u32, terms: usize, embedding: usize) -> CliResult<Vec<String>> {
    if level != 1 {
        return Err(heckeval::Error::UnsupportedLevel(level).into());
    }
    let f = EigenformHandle::level1(weight, embedding)?;
    if let Some(exact) = f.exact_coefficients(terms)? {
        if f.dimension() == 1 {
            return Ok(exact[1..].iter().map(|n| n.to_string()).collect());
        }
    }
    let balls = f.coefficients(terms, 128)?;
    Ok(balls[1..].iter().map(|b| b.to_decimal(30)).collect())
}
