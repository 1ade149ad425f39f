//! Best-effort cross-check of newform coefficients against the LMFDB REST
//! interface. Responses are cached on disk by newform label.

use crate::config::Config;
use mahlercm::beilinson::newform_coefficients;
use mahlercm::lvalues::coefficients;
use mahlercm::paperdata::{case_dossiers, CaseDossier, CaseLData};
use mahlercm::{Error, Result};
use serde::Serialize;
use serde_json::Value;
use std::path::PathBuf;
use std::time::Duration;

pub const API: &str = "https://www.lmfdb.org/api/mf_newforms/";
/// Coefficients a_1..a_N compared.
pub const COMPARE_TO: usize = 25;

/// "48.2.c.a.47.1" → "48.2.c.a"; newform labels pass through.
pub fn newform_part(label: &str) -> String {
    label.split('.').take(4).collect::<Vec<_>>().join(".")
}

/// The dossier and slot (0 or 1) a newform label belongs to.
fn locate(label: &str) -> Result<(CaseDossier, usize)> {
    let nf = newform_part(label);
    for case in case_dossiers() {
        for (slot, l) in case.labels.newforms.iter().enumerate() {
            if *l == label || newform_part(l) == nf {
                return Ok((case, slot));
            }
        }
    }
    Err(Error::NotFound(format!("label {label:?} is not one of the embedded newform labels")))
}

/// Expected traces Tr(a_1)..Tr(a_N) of the newform.
pub fn expected_traces(label: &str, n: usize) -> Result<Vec<i64>> {
    let (case, slot) = locate(label)?;
    match &case.ldata {
        CaseLData::Product { f, g } => {
            let c = coefficients(if slot == 0 { f } else { g }, n)?;
            c[1..=n]
                .iter()
                .map(|v| v.numer().to_i64().filter(|_| *v.denom() == 1))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::NonIntegralCoefficients(label.to_string()))
        }
        CaseLData::ConjugatePair { .. } => {
            let c = newform_coefficients(&case, n)?;
            c[1..=n]
                .iter()
                .map(|&(re, _)| {
                    let t = 2.0 * re;
                    if (t - t.round()).abs() > 1e-6 {
                        Err(Error::NotNearInteger(format!("trace {t} for {label}")))
                    } else {
                        Ok(t.round() as i64)
                    }
                })
                .collect()
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossCheck {
    pub label: String,
    pub newform: String,
    /// "cache", "network" or "skipped".
    pub source: String,
    pub warning: Option<String>,
    pub expected: Vec<i64>,
    pub fetched: Option<Vec<i64>>,
    pub first_mismatch: Option<usize>,
    pub matches: Option<bool>,
}

fn cache_path(cfg: &Config, newform: &str) -> PathBuf {
    cfg.cache_dir.join("lmfdb").join(format!("{newform}.json"))
}

fn download(newform: &str) -> std::result::Result<String, String> {
    let agent = ureq::AgentBuilder::new().timeout(Duration::from_secs(30)).build();
    agent
        .get(API)
        .query("label", newform)
        .query("_format", "json")
        .query("_fields", "label,dim,traces")
        .call()
        .map_err(|e| e.to_string())?
        .into_string()
        .map_err(|e| e.to_string())
}

/// Traces starting at a_1 from an API response body.
pub fn parse_traces(body: &str, newform: &str) -> Result<Vec<i64>> {
    let v: Value = serde_json::from_str(body).map_err(|e| Error::Parse(format!("LMFDB response: {e}")))?;
    let rec = v["data"]
        .as_array()
        .and_then(|d| d.first())
        .ok_or_else(|| Error::NotFound(format!("LMFDB has no newform {newform}")))?;
    let traces: Vec<i64> = rec["traces"]
        .as_array()
        .ok_or_else(|| Error::Parse(format!("LMFDB record for {newform} has no traces")))?
        .iter()
        .map(|t| t.as_i64().ok_or_else(|| Error::Parse("non-integer trace".into())))
        .collect::<Result<_>>()?;
    // a_1 = dim; tolerate a leading a_0 = 0
    let dim = rec["dim"].as_i64().unwrap_or(1);
    if traces.first() == Some(&0) && traces.get(1) == Some(&dim) {
        return Ok(traces[1..].to_vec());
    }
    Ok(traces)
}

pub fn lmfdb_fetch(label: &str, cfg: &Config) -> Result<CrossCheck> {
    let expected = expected_traces(label, COMPARE_TO)?;
    let newform = newform_part(label);
    let path = cache_path(cfg, &newform);
    let mut check = CrossCheck {
        label: label.to_string(),
        newform: newform.clone(),
        source: "skipped".into(),
        warning: None,
        expected,
        fetched: None,
        first_mismatch: None,
        matches: None,
    };
    let body = if let Ok(b) = std::fs::read_to_string(&path) {
        check.source = "cache".into();
        b
    } else if !cfg.online {
        check.warning = Some(format!("offline and no cached response at {}; cross-check skipped", path.display()));
        return Ok(check);
    } else {
        match download(&newform) {
            Ok(b) => {
                check.source = "network".into();
                // only cache responses that name the form
                if parse_traces(&b, &newform).is_ok() {
                    if let Some(dir) = path.parent() {
                        let _ = std::fs::create_dir_all(dir);
                    }
                    if let Err(e) = std::fs::write(&path, &b) {
                        check.warning = Some(format!("could not cache response: {e}"));
                    }
                }
                b
            }
            Err(e) => {
                check.warning = Some(format!("NetworkError: {e}; cross-check skipped"));
                return Ok(check);
            }
        }
    };
    let fetched = parse_traces(&body, &newform)?;
    if fetched.len() < COMPARE_TO {
        return Err(Error::TruncationTooShort { needed: COMPARE_TO, have: fetched.len() });
    }
    let fetched: Vec<i64> = fetched[..COMPARE_TO].to_vec();
    check.first_mismatch = (0..COMPARE_TO).find(|&i| fetched[i] != check.expected[i]).map(|i| i + 1);
    check.matches = Some(check.first_mismatch.is_none());
    check.fetched = Some(fetched);
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        assert_eq!(newform_part("48.2.c.a.47.1"), "48.2.c.a");
        assert_eq!(newform_part("64.2.a.a"), "64.2.a.a");
        assert!(matches!(expected_traces("11.2.a.a", 5), Err(Error::NotFound(_))));
    }

    #[test]
    fn rational_traces() {
        // f32 has CM by Q(i): a_p = 0 for p ≡ 3 mod 4
        let t = expected_traces("32.2.a.a", 25).unwrap();
        assert_eq!(t[0], 1);
        for p in [3usize, 7, 11, 19, 23] {
            assert_eq!(t[p - 1], 0);
        }
        assert_eq!(t[4], -2);
    }

    #[test]
    fn conjugate_pair_traces_are_even_at_one() {
        for label in ["48.2.c.a", "192.2.c.a", "28.2.d.a", "448.2.f.b"] {
            let t = expected_traces(label, 25).unwrap();
            assert_eq!(t[0], 2, "{label}");
        }
    }

    #[test]
    fn parse_response_shapes() {
        let b = r#"{"data":[{"label":"32.2.a.a","dim":1,"traces":[1,0,0,0,-2]}]}"#;
        assert_eq!(parse_traces(b, "32.2.a.a").unwrap(), vec![1, 0, 0, 0, -2]);
        let b0 = r#"{"data":[{"dim":2,"traces":[0,2,0,-2]}]}"#;
        assert_eq!(parse_traces(b0, "x").unwrap(), vec![2, 0, -2]);
        assert!(matches!(parse_traces(r#"{"data":[]}"#, "x"), Err(Error::NotFound(_))));
    }
}
