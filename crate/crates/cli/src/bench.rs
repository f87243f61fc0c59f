use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use heckeval::hecke::{FormRoute, Method};
use heckeval::qexp::{primes, EigenformHandle};
use rug::Float;

use crate::error::{CliError, CliResult};
use crate::run::{run_eigenvalue, RunConfig};

/// One benchmark row: `level,weight,prime,method`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchSpec {
    pub level: u64,
    pub weight: u32,
    pub prime: u64,
    pub method: Method,
}

impl FromStr for BenchSpec {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let bad = || CliError::Config(format!("bench row {s:?} is not level,weight,prime,method"));
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [level, weight, prime, method] = parts[..] else {
            return Err(bad());
        };
        Ok(BenchSpec {
            level: level.parse().map_err(|_| bad())?,
            weight: weight.parse().map_err(|_| bad())?,
            prime: prime.parse().map_err(|_| bad())?,
            method: method.parse().map_err(|_| bad())?,
        })
    }
}

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub spec: BenchSpec,
    pub times: Vec<Duration>,
    pub median: Option<Duration>,
    pub truncation: Option<u64>,
    pub term_count: Option<usize>,
    pub error: Option<String>,
}

pub fn median(times: &[Duration]) -> Option<Duration> {
    let mut t = times.to_vec();
    t.sort();
    match t.len() {
        0 => None,
        n if n % 2 == 1 => Some(t[n / 2]),
        n => Some((t[n / 2 - 1] + t[n / 2]) / 2),
    }
}

/// Times each row `repeats` times from scratch (form construction
/// included). Failing rows record their error and the run continues.
pub fn run_bench(specs: &[BenchSpec], repeats: usize, digits: u32) -> Vec<BenchRow> {
    specs
        .iter()
        .map(|spec| {
            let mut config = RunConfig::new(spec.level, spec.weight, spec.prime, digits);
            config.method = spec.method;
            let mut row = BenchRow {
                spec: spec.clone(),
                times: Vec::new(),
                median: None,
                truncation: None,
                term_count: None,
                error: None,
            };
            for _ in 0..repeats.max(1) {
                let start = Instant::now();
                match run_eigenvalue(&config) {
                    Ok(ev) => {
                        row.times.push(start.elapsed());
                        row.truncation = Some(ev.truncation);
                        row.term_count = Some(ev.term_count);
                    }
                    Err(e) => {
                        row.error = Some(e.to_string());
                        break;
                    }
                }
            }
            row.median = if row.error.is_none() { median(&row.times) } else { None };
            row
        })
        .collect()
}

pub fn write_bench_csv<W: Write>(rows: &[BenchRow], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
    w.write_record(["level", "weight", "prime", "method", "runs", "median_seconds", "truncation", "term_count", "error"])
        .map_err(io)?;
    for r in rows {
        w.write_record([
            r.spec.level.to_string(),
            r.spec.weight.to_string(),
            r.spec.prime.to_string(),
            r.spec.method.to_string(),
            r.times.len().to_string(),
            r.median.map(|m| format!("{:.6}", m.as_secs_f64())).unwrap_or_default(),
            r.truncation.map(|t| t.to_string()).unwrap_or_default(),
            r.term_count.map(|t| t.to_string()).unwrap_or_default(),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn render_table(rows: &[BenchRow]) -> String {
    let mut s = format!("{:>5} {:>6} {:>8} {:>10} {:>12}\n", "level", "weight", "p", "method", "median (s)");
    for r in rows {
        let m = match (&r.median, &r.error) {
            (Some(m), _) => format!("{:.4}", m.as_secs_f64()),
            (None, Some(e)) => format!("error: {e}"),
            (None, None) => "-".into(),
        };
        s.push_str(&format!("{:>5} {:>6} {:>8} {:>10} {:>12}\n", r.spec.level, r.spec.weight, r.spec.prime, r.spec.method, m));
    }
    s
}

/// Per-prime data for one level-one eigenform: the truncation length
/// and the distance between the analytic value and `a_p`.
#[derive(Clone, Debug)]
pub struct PrimeSample {
    pub p: u64,
    pub truncation: u64,
    pub term_count: usize,
    /// `log10 |λ_p - a_p|` between midpoints; `None` when they coincide.
    pub log10_residual: Option<f64>,
    pub log10_radius: f64,
}

fn log10(x: &Float) -> Option<f64> {
    (!x.is_zero()).then(|| Float::with_val(64, x.abs_ref()).log10().to_f64())
}

pub fn prime_samples(weight: u32, embedding: usize, max_prime: u64, digits: u32, method: Method) -> CliResult<Vec<PrimeSample>> {
    let f = EigenformHandle::level1(weight, embedding)?;
    let route = FormRoute::new(&f, method)?;
    let eps = Float::with_val(64, Float::i_pow_u(10, digits)).recip();
    let ps: Vec<u64> = primes().take_while(|&p| p <= max_prime).collect();
    let bits = digits * 4 + 128;
    let coeffs = f.coefficients(*ps.last().unwrap_or(&1) as usize, bits)?;
    ps.iter()
        .map(|&p| {
            let ev = route.eigenvalue(p, &eps, None, None)?;
            let diff = Float::with_val(ev.value.prec().max(bits), ev.value.mid() - coeffs[p as usize].mid());
            Ok(PrimeSample {
                p,
                truncation: ev.truncation,
                term_count: ev.term_count,
                log10_residual: log10(&diff),
                log10_radius: ev.value.rad_log2() * std::f64::consts::LOG10_2,
            })
        })
        .collect()
}

pub fn write_truncation_csv<W: Write>(samples: &[PrimeSample], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
    w.write_record(["p", "truncation", "term_count"]).map_err(io)?;
    for s in samples {
        w.write_record([s.p.to_string(), s.truncation.to_string(), s.term_count.to_string()]).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_residual_csv<W: Write>(samples: &[PrimeSample], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
    w.write_record(["p", "log10_residual", "log10_radius"]).map_err(io)?;
    for s in samples {
        w.write_record([
            s.p.to_string(),
            s.log10_residual.map(|r| format!("{r:.3}")).unwrap_or_else(|| "-inf".into()),
            format!("{:.3}", s.log10_radius),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
