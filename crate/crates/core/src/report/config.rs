//! TOML experiment files.
//!
//! A file holds either one experiment at the top level or an array of
//! `[[experiment]]` tables:
//!
//! ```toml
//! [[experiment]]
//! theorem_id = "T1"
//! dist = "complex_gaussian"
//! degrees = [5000]
//! trials = 1
//! seed = 7
//!
//! [[experiment]]
//! theorem_id = "T2"
//! dist = { kind = "uniform_symmetric", half_width = 1.7320508075688772 }
//! degrees = [100, 400, 1600]
//! trials = 200
//! seed = 1
//! norm = { p = 4.0, radius = 0.5 }
//! tolerances = { stabilization = 0.02 }
//! ```
//!
//! A run manifest (a `[manifest]` table followed by the resolved
//! experiments) is also a valid config file.
//!
//! `norm.p` may be the string `"inf"`. Custom discrete laws are written as
//! `{ kind = "custom_discrete", atoms = [{ re = 1.0, im = 0.0, prob = 0.5 }, ...] }`.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::ensembles::{DistributionKind, DistributionSpec};
use crate::error::{Error, Result};
use crate::experiments::{ExperimentConfig, TheoremId, Tolerances};
use crate::norms::NormSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawExperiment {
    theorem_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    dist: toml::Value,
    degrees: Vec<i64>,
    trials: i64,
    seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    norm: Option<RawNorm>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNorm {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<toml::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    quad_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sup_eps: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    #[serde(default)]
    experiment: Vec<Spanned<RawExperiment>>,
    /// Run metadata when the file is a run manifest; not part of any config.
    #[serde(default, rename = "manifest")]
    _manifest: Option<toml::Table>,
}

#[derive(Debug, Serialize)]
struct EmitFile<'a> {
    experiment: &'a [RawExperiment],
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn toml_error(text: &str, e: toml::de::Error) -> Error {
    let line = e.span().map(|s| line_of(text, s.start)).unwrap_or(0);
    Error::Config {
        line,
        message: e.message().trim().to_string(),
    }
}

/// Parses and validates every experiment in a config file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<Vec<ExperimentConfig>> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)
}

/// As [`parse_config`], from text. Errors carry the 1-based line of the
/// offending key or experiment.
pub fn parse_config_str(text: &str) -> Result<Vec<ExperimentConfig>> {
    let table: toml::Table = toml::from_str(text).map_err(|e| toml_error(text, e))?;
    let raws: Vec<Spanned<RawExperiment>> = if table.is_empty() || table.contains_key("experiment") {
        toml::from_str::<RawFile>(text).map_err(|e| toml_error(text, e))?.experiment
    } else {
        let raw: RawExperiment = toml::from_str(text).map_err(|e| toml_error(text, e))?;
        vec![Spanned::new(0..0, raw)]
    };
    raws.iter()
        .map(|s| {
            resolve(s.get_ref()).map_err(|e| Error::Config {
                line: line_of(text, s.span().start),
                message: e.to_string(),
            })
        })
        .collect()
}

fn number(v: &toml::Value, what: &str) -> Result<f64> {
    match v {
        toml::Value::Float(x) => Ok(*x),
        toml::Value::Integer(i) => Ok(*i as f64),
        _ => Err(Error::InvalidArgument(format!("{what} must be a number, got {v}"))),
    }
}

fn parse_dist(v: &toml::Value) -> Result<DistributionSpec> {
    let bad = |m: String| Error::InvalidDistribution(m);
    let (kind, table) = match v {
        toml::Value::String(s) => (s.as_str(), None),
        toml::Value::Table(t) => {
            let kind = t
                .get("kind")
                .and_then(|k| k.as_str())
                .ok_or_else(|| bad("dist table needs a string `kind`".into()))?;
            (kind, Some(t))
        }
        _ => return Err(bad(format!("dist must be a name or a table, got {v}"))),
    };
    let allowed: &[&str] = match kind {
        "uniform_symmetric" => &["kind", "half_width"],
        "custom_discrete" => &["kind", "atoms"],
        _ => &["kind"],
    };
    if let Some(t) = table {
        if let Some(k) = t.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(bad(format!("unknown key {k:?} for dist kind {kind:?}")));
        }
    }
    let field = |name: &str| {
        table
            .and_then(|t| t.get(name))
            .ok_or_else(|| bad(format!("dist kind {kind:?} needs `{name}`")))
    };
    match kind {
        "complex_gaussian" => Ok(DistributionSpec::complex_gaussian()),
        "real_gaussian" => Ok(DistributionSpec::real_gaussian()),
        "rademacher" => Ok(DistributionSpec::rademacher()),
        "uniform_symmetric" => DistributionSpec::uniform_symmetric(number(field("half_width")?, "half_width")?),
        "custom_discrete" => {
            let atoms = field("atoms")?
                .as_array()
                .ok_or_else(|| bad("atoms must be an array of tables".into()))?;
            let atoms = atoms
                .iter()
                .map(|a| {
                    let t = a.as_table().ok_or_else(|| bad("each atom must be a table".into()))?;
                    if let Some(k) = t.keys().find(|k| !["re", "im", "prob"].contains(&k.as_str())) {
                        return Err(bad(format!("unknown atom key {k:?}")));
                    }
                    let get = |k: &str| t.get(k).map(|v| number(v, k)).transpose();
                    let prob = get("prob")?.ok_or_else(|| bad("atom needs `prob`".into()))?;
                    Ok((Complex64::new(get("re")?.unwrap_or(0.0), get("im")?.unwrap_or(0.0)), prob))
                })
                .collect::<Result<Vec<_>>>()?;
            DistributionSpec::custom_discrete(atoms)
        }
        other => Err(bad(format!(
            "unknown dist kind {other:?} (expected complex_gaussian, real_gaussian, rademacher, uniform_symmetric, custom_discrete)"
        ))),
    }
}

fn parse_p(v: &toml::Value) -> Result<f64> {
    match v {
        toml::Value::String(s) if s.eq_ignore_ascii_case("inf") => Ok(f64::INFINITY),
        toml::Value::String(s) => Err(Error::InvalidArgument(format!("norm.p must be a number or \"inf\", got {s:?}"))),
        _ => number(v, "norm.p"),
    }
}

fn resolve(raw: &RawExperiment) -> Result<ExperimentConfig> {
    let theorem_id: TheoremId = raw.theorem_id.parse()?;
    let dist = parse_dist(&raw.dist)?;
    let default = theorem_id.default_norm();
    let norm = match &raw.norm {
        None => default,
        Some(n) => NormSpec {
            p: n.p.as_ref().map(parse_p).transpose()?.unwrap_or(default.p),
            radius: n.radius.unwrap_or(default.radius),
            quad_tol: n.quad_tol.unwrap_or(default.quad_tol),
            sup_eps: n.sup_eps.unwrap_or(default.sup_eps),
        }
        .validated()?,
    };
    if raw.trials < 1 {
        return Err(Error::InvalidArgument(format!("trials must be at least 1, got {}", raw.trials)));
    }
    let degrees = raw
        .degrees
        .iter()
        .map(|&d| usize::try_from(d).map_err(|_| Error::InvalidArgument(format!("degree {d} is negative"))))
        .collect::<Result<Vec<_>>>()?;
    let cfg = ExperimentConfig {
        theorem_id,
        label: raw.label.clone(),
        dist,
        norm,
        degrees,
        trials: raw.trials as usize,
        seed: raw.seed,
        tolerances: Tolerances::with_overrides(theorem_id, &raw.tolerances)?,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn float_value(x: f64) -> toml::Value {
    if x.is_infinite() && x > 0.0 {
        toml::Value::String("inf".into())
    } else {
        toml::Value::Float(x)
    }
}

pub(crate) fn to_raw(cfg: &ExperimentConfig) -> RawExperiment {
    let dist = match cfg.dist.kind() {
        DistributionKind::ComplexGaussian => toml::Value::String("complex_gaussian".into()),
        DistributionKind::RealGaussian => toml::Value::String("real_gaussian".into()),
        DistributionKind::Rademacher => toml::Value::String("rademacher".into()),
        DistributionKind::UniformSymmetric { half_width } => {
            let mut t = toml::Table::new();
            t.insert("kind".into(), "uniform_symmetric".into());
            t.insert("half_width".into(), toml::Value::Float(*half_width));
            toml::Value::Table(t)
        }
        DistributionKind::CustomDiscrete { atoms } => {
            let atoms = atoms
                .iter()
                .map(|(z, prob)| {
                    let mut a = toml::Table::new();
                    a.insert("re".into(), toml::Value::Float(z.re));
                    a.insert("im".into(), toml::Value::Float(z.im));
                    a.insert("prob".into(), toml::Value::Float(*prob));
                    toml::Value::Table(a)
                })
                .collect();
            let mut t = toml::Table::new();
            t.insert("kind".into(), "custom_discrete".into());
            t.insert("atoms".into(), toml::Value::Array(atoms));
            toml::Value::Table(t)
        }
    };
    RawExperiment {
        theorem_id: cfg.theorem_id.as_str().to_string(),
        label: cfg.label.clone(),
        dist,
        degrees: cfg.degrees.iter().map(|&d| d as i64).collect(),
        trials: cfg.trials as i64,
        seed: cfg.seed,
        norm: Some(RawNorm {
            p: Some(float_value(cfg.norm.p)),
            radius: Some(cfg.norm.radius),
            quad_tol: Some(cfg.norm.quad_tol),
            sup_eps: Some(cfg.norm.sup_eps),
        }),
        tolerances: cfg.tolerances.iter().map(|(k, v)| (k.to_string(), v)).collect(),
    }
}

/// Fully resolved TOML for `configs`; parses back to equal configs.
pub fn emit_config(configs: &[ExperimentConfig]) -> String {
    let raws: Vec<RawExperiment> = configs.iter().map(to_raw).collect();
    toml::to_string(&EmitFile { experiment: &raws }).expect("config tables serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "theorem_id = \"T1\"\ndist = \"complex_gaussian\"\ndegrees = [5000]\ntrials = 1\nseed = 7\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let cfgs = parse_config_str(MINIMAL).unwrap();
        assert_eq!(cfgs.len(), 1);
        let c = &cfgs[0];
        assert_eq!(c.theorem_id, TheoremId::T1);
        assert_eq!(c.degrees, vec![5000]);
        assert_eq!(c.tolerances, Tolerances::defaults(TheoremId::T1));
        assert_eq!(c.norm, NormSpec::l2(1.0).unwrap());
    }

    #[test]
    fn round_trip() {
        let text = r#"
[[experiment]]
theorem_id = "T4"
dist = "rademacher"
degrees = [10, 50]
trials = 20
seed = 3
norm = { p = "inf", sup_eps = 0.005 }

[[experiment]]
theorem_id = "t2"
label = "uniform"
dist = { kind = "uniform_symmetric", half_width = 1.7320508075688772 }
degrees = [100, 400]
trials = 5
seed = 1
norm = { p = 4, radius = 0.3 }
tolerances = { stabilization = 0.02 }

[[experiment]]
theorem_id = "T1"
dist = { kind = "custom_discrete", atoms = [{ re = 1.0, prob = 0.25 }, { re = -1.0, im = 0.5, prob = 0.75 }] }
degrees = [8]
trials = 1
seed = 0
"#;
        let cfgs = parse_config_str(text).unwrap();
        assert_eq!(cfgs.len(), 3);
        assert_eq!(cfgs[1].tolerances.get("stabilization"), 0.02);
        let emitted = emit_config(&cfgs);
        assert_eq!(parse_config_str(&emitted).unwrap(), cfgs);
    }

    #[test]
    fn empty_file_is_empty_list() {
        assert!(parse_config_str("").unwrap().is_empty());
        assert!(parse_config_str("# nothing\n").unwrap().is_empty());
    }

    #[test]
    fn errors_carry_lines() {
        let text = format!("{MINIMAL}bogus = 1\n");
        match parse_config_str(&text) {
            Err(Error::Config { line, message }) => {
                assert_eq!(line, 6, "{message}");
                assert!(message.contains("bogus"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        let text = "[[experiment]]\ntheorem_id = \"T1\"\ndist = \"rademacher\"\ndegrees = [5]\ntrials = 1\nseed = 1\n\n[[experiment]]\ntheorem_id = \"T9\"\ndist = \"rademacher\"\ndegrees = [5]\ntrials = 1\nseed = 1\n";
        match parse_config_str(text) {
            Err(Error::Config { line, message }) => {
                assert!(line >= 8, "{line}");
                assert!(message.contains("T9"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn semantic_errors() {
        let bad = [
            MINIMAL.replace("trials = 1", "trials = 0"),
            MINIMAL.replace("[5000]", "[]"),
            MINIMAL.replace("[5000]", "[50, 10]"),
            MINIMAL.replace("complex_gaussian", "cauchy"),
            format!("{MINIMAL}tolerances = {{ nope = 1.0 }}\n"),
            format!("{MINIMAL}norm = {{ radius = 2.0 }}\n"),
            MINIMAL.replace("\"complex_gaussian\"", "{ kind = \"uniform_symmetric\" }"),
        ];
        for text in &bad {
            assert!(parse_config_str(text).is_err(), "{text}");
        }
    }
}
