use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;

use crate::coeffs::{ingest_coefficients, CoefficientFile};
use crate::error::{CliError, CliResult};

pub const DEFAULT_ENDPOINT: &str = "https://www.lmfdb.org/api";

/// Environment variable overriding the fetch cache directory.
pub const CACHE_ENV: &str = "HECKEVAL_CACHE_DIR";

pub fn default_cache_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os(CACHE_ENV) {
        return PathBuf::from(dir);
    }
    if let Some(dir) = std::env::var_os("XDG_CACHE_HOME") {
        return PathBuf::from(dir).join("heckeval");
    }
    match std::env::var_os("HOME") {
        Some(home) => PathBuf::from(home).join(".cache").join("heckeval"),
        None => std::env::temp_dir().join("heckeval"),
    }
}

/// Cache file for a newform label such as `2.8.a.a`.
pub fn cache_path(cache_dir: &Path, label: &str) -> CliResult<PathBuf> {
    if label.is_empty() || !label.chars().all(|c| c.is_ascii_alphanumeric() || c == '.' || c == '-' || c == '_') {
        return Err(CliError::Parse(format!("bad newform label {label:?}")));
    }
    Ok(cache_dir.join(format!("{label}.json")))
}

#[derive(Deserialize)]
struct Response {
    data: Vec<Record>,
}

#[derive(Deserialize)]
struct Record {
    level: u64,
    weight: u32,
    #[serde(default)]
    dim: Option<u64>,
    traces: Vec<serde_json::Value>,
    #[serde(default)]
    fricke_eigenval: Option<i8>,
}

fn number_string(v: &serde_json::Value) -> CliResult<String> {
    match v {
        serde_json::Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string()),
        serde_json::Value::String(s) => Ok(s.clone()),
        other => Err(CliError::Parse(format!("coefficient {other} is not an integer"))),
    }
}

fn check(file: &CoefficientFile, level: u64, weight: u32) -> CliResult<()> {
    if file.level != level || file.weight != weight {
        return Err(CliError::Parse(format!(
            "requested level {level} weight {weight}, got level {} weight {}",
            file.level, file.weight
        )));
    }
    Ok(())
}

/// Parses one `mf_newforms` response body into a coefficient file.
pub fn parse_response(body: &str, label: &str) -> CliResult<CoefficientFile> {
    let response: Response = serde_json::from_str(body).map_err(|e| CliError::Parse(e.to_string()))?;
    let record = response.data.into_iter().next().ok_or_else(|| CliError::NotFound(label.to_string()))?;
    if record.dim.is_some_and(|d| d != 1) {
        return Err(CliError::Parse(format!("{label} has a coefficient field of degree {}", record.dim.unwrap_or(0))));
    }
    let file = CoefficientFile {
        level: record.level,
        weight: record.weight,
        atkin_lehner_sign: record.fricke_eigenval,
        coefficients: record.traces.iter().map(number_string).collect::<CliResult<_>>()?,
    };
    file.rationals()?;
    Ok(file)
}

/// Coefficients of the newform `label` from an LMFDB-compatible endpoint,
/// served from `cache_dir` when present.
pub fn fetch_remote_coefficients(
    level: u64,
    weight: u32,
    label: &str,
    endpoint_url: &str,
    cache_dir: &Path,
) -> CliResult<CoefficientFile> {
    let path = cache_path(cache_dir, label)?;
    if path.exists() {
        let file = ingest_coefficients(&path)?;
        check(&file, level, weight)?;
        return Ok(file);
    }
    let url = format!("{}/mf_newforms/", endpoint_url.trim_end_matches('/'));
    let agent = ureq::AgentBuilder::new().timeout(Duration::from_secs(60)).build();
    let body = match agent.get(&url).query("label", label).query("_format", "json").call() {
        Ok(resp) => resp.into_string().map_err(|e| CliError::Network(e.to_string()))?,
        Err(ureq::Error::Status(404, _)) => return Err(CliError::NotFound(label.to_string())),
        Err(ureq::Error::Status(code, _)) => return Err(CliError::Network(format!("HTTP status {code}"))),
        Err(e) => return Err(CliError::Network(e.to_string())),
    };
    let file = parse_response(&body, label)?;
    check(&file, level, weight)?;
    std::fs::create_dir_all(cache_dir)?;
    let tmp = path.with_extension("json.tmp");
    file.write(&tmp)?;
    std::fs::rename(&tmp, &path)?;
    Ok(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_are_sanitized() {
        let dir = Path::new("/tmp");
        assert!(cache_path(dir, "2.8.a.a").is_ok());
        assert!(cache_path(dir, "../x").is_err());
        assert!(cache_path(dir, "").is_err());
    }

    #[test]
    fn response_parsing() {
        let body = r#"{"data": [{"label": "2.8.a.a", "level": 2, "weight": 8, "dim": 1, "traces": [1, -8, 12], "fricke_eigenval": 1}]}"#;
        let f = parse_response(body, "2.8.a.a").unwrap();
        assert_eq!(f.coefficients, ["1", "-8", "12"]);
        assert_eq!(f.atkin_lehner_sign, Some(1));
        assert!(matches!(parse_response(r#"{"data": []}"#, "9.9.a.z"), Err(CliError::NotFound(_))));
        let wide = r#"{"data": [{"level": 1, "weight": 24, "dim": 2, "traces": [2, 1080]}]}"#;
        assert!(matches!(parse_response(wide, "1.24.a.a"), Err(CliError::Parse(_))));
    }
}
