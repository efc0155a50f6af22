//! File formats, run configuration and result records.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::cocycle::{ClassId, EvalOptions, Evaluation};
use crate::curve::{Curve, CurveKind, ParamCurve};
use crate::error::{Error, Result};
use crate::family::{FrameLoop, KnotCycle, SingleKnot};
use crate::scenarios::scenario;
use crate::MAX_DIM;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub eval: EvalOptions,
    /// Seed for randomized perturbation checks.
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            eval: EvalOptions::default(),
            seed: 1,
            out_dir: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let e = &self.eval;
        let positive = [
            ("tol.newton_tol", e.tol.newton_tol),
            ("tol.dedup_radius", e.tol.dedup_radius),
            ("tol.margin_tol", e.tol.margin_tol),
            ("tol.cond_threshold", e.tol.cond_threshold),
            ("tol.fd_step", e.tol.fd_step),
            ("tol.step_tol", e.tol.step_tol),
            ("track.min_dt", e.track.min_dt),
            ("track.quiet", e.track.quiet),
            ("track.match_tol", e.track.match_tol),
            ("prune", e.prune),
            ("merge_tol", e.merge_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Input(format!("config: {name} must be positive, got {v}")));
            }
        }
        let counts = [
            ("tol.max_iter", e.tol.max_iter),
            ("track.frames", e.track.frames),
            ("track.max_depth", e.track.max_depth),
            ("grid", e.grid),
            ("config_grid", e.config_grid),
            ("genericity_res", e.genericity_res),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::Input(format!("config: {name} must be at least 1")));
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindJson {
    Long,
    Compact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveJson {
    pub kind: KindJson,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    /// Rows [t, x₁, …, xₙ].
    pub samples: Vec<Vec<f64>>,
}

impl CurveJson {
    pub fn from_curve(c: &ParamCurve) -> Self {
        let n = c.dim();
        let samples: Vec<Vec<f64>> = c
            .samples()
            .into_iter()
            .map(|(t, x)| std::iter::once(t).chain(x[..n].iter().copied()).collect())
            .collect();
        let window = match c.kind() {
            CurveKind::Long => Some([samples[0][0], samples[samples.len() - 1][0]]),
            CurveKind::Compact => None,
        };
        CurveJson {
            kind: match c.kind() {
                CurveKind::Long => KindJson::Long,
                CurveKind::Compact => KindJson::Compact,
            },
            n,
            window,
            samples,
        }
    }

    pub fn to_curve(&self) -> Result<ParamCurve> {
        let n = self.n;
        if !(2..=MAX_DIM).contains(&n) {
            return Err(Error::Input(format!("curve: n = {n} outside 2..={MAX_DIM}")));
        }
        let mut pts = Vec::with_capacity(self.samples.len());
        for (i, row) in self.samples.iter().enumerate() {
            if row.len() != n + 1 {
                return Err(Error::Input(format!(
                    "curve: sample {i} has {} numbers, expected {}",
                    row.len(),
                    n + 1
                )));
            }
            let mut x = [0.0; MAX_DIM];
            x[..n].copy_from_slice(&row[1..]);
            pts.push((row[0], x));
        }
        match self.kind {
            KindJson::Long => {
                if let (Some([a, b]), Some(first), Some(last)) =
                    (self.window, pts.first(), pts.last())
                {
                    if (first.0 - a).abs() > 1e-12 || (last.0 - b).abs() > 1e-12 {
                        return Err(Error::Input(format!(
                            "curve: window [{a}, {b}] does not match the sample range [{}, {}]",
                            first.0, last.0
                        )));
                    }
                }
                ParamCurve::long(n, pts, None)
            }
            KindJson::Compact => {
                if self.window.is_some() {
                    return Err(Error::Input("curve: `window` is for long knots only".into()));
                }
                ParamCurve::compact(n, pts)
            }
        }
    }
}

pub fn read_curve(path: &Path) -> Result<ParamCurve> {
    let c: CurveJson = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    c.to_curve()
}

pub fn write_curve(curve: &ParamCurve, path: &Path) -> Result<()> {
    std::fs::write(path, serde_json::to_string(&CurveJson::from_curve(curve))? + "\n")?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FamilyJson {
    Scenario {
        scenario: String,
        #[serde(default)]
        params: serde_json::Value,
    },
    Frames {
        domain: String,
        #[serde(default)]
        grid: Vec<f64>,
        frames: Vec<CurveJson>,
    },
}

/// A family ready for evaluation.
pub struct Family {
    pub spec: FamilyJson,
    pub cycle: Arc<dyn KnotCycle>,
    /// The class a named scenario is built for.
    pub class: Option<ClassId>,
}

impl FamilyJson {
    pub fn describe(&self) -> String {
        match self {
            FamilyJson::Scenario { scenario, .. } => format!("scenario:{scenario}"),
            FamilyJson::Frames { domain, frames, .. } => {
                format!("frames:{domain}:{}", frames.len())
            }
        }
    }

    pub fn build(&self) -> Result<Family> {
        let (cycle, class): (Arc<dyn KnotCycle>, Option<ClassId>) = match self {
            FamilyJson::Scenario { scenario: name, params } => {
                let s = scenario(name, params)?;
                (s.cycle, Some(s.class))
            }
            FamilyJson::Frames { domain, grid, frames } => {
                let curves = frames.iter().map(CurveJson::to_curve).collect::<Result<Vec<_>>>()?;
                match domain.as_str() {
                    "point" => {
                        let [c]: [ParamCurve; 1] = curves.try_into().map_err(|v: Vec<_>| {
                            Error::Input(format!("a point family has one frame, got {}", v.len()))
                        })?;
                        (Arc::new(SingleKnot(c)), None)
                    }
                    "circle" => {
                        let m = curves.len();
                        let uniform = grid.is_empty()
                            || (grid.len() == m
                                && grid
                                    .iter()
                                    .enumerate()
                                    .all(|(i, g)| (g - i as f64 / m as f64).abs() < 1e-12));
                        if !uniform {
                            return Err(Error::Input(
                                "circle frames must sit at the uniform grid τ = i/N".into(),
                            ));
                        }
                        (Arc::new(FrameLoop::new(curves)?), None)
                    }
                    "so3" | "s3" | "box" => {
                        return Err(Error::Unsupported(format!(
                            "frame families over `{domain}`; use a named scenario"
                        )))
                    }
                    other => return Err(Error::Input(format!("unknown domain `{other}`"))),
                }
            }
        };
        Ok(Family {
            spec: self.clone(),
            cycle,
            class,
        })
    }
}

pub fn parse_family(text: &str) -> Result<FamilyJson> {
    Ok(serde_json::from_str(text)?)
}

pub fn read_family(path: &Path) -> Result<Family> {
    parse_family(&std::fs::read_to_string(path)?)?.build()
}

pub fn write_family(spec: &FamilyJson, path: &Path) -> Result<()> {
    std::fs::write(path, serde_json::to_string(spec)? + "\n")?;
    Ok(())
}

/// Hex SHA-256 of `bytes`.
pub fn content_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Everything needed to reproduce one evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub version: String,
    pub input: String,
    /// Hash of the canonical input JSON followed by the config JSON.
    pub input_hash: String,
    pub config: RunConfig,
    pub evaluation: Evaluation,
}

impl RunRecord {
    pub fn new(spec: &FamilyJson, config: &RunConfig, evaluation: Evaluation) -> Result<Self> {
        let mut bytes = serde_json::to_vec(spec)?;
        bytes.extend(serde_json::to_vec(config)?);
        Ok(RunRecord {
            version: env!("CARGO_PKG_VERSION").into(),
            input: spec.describe(),
            input_hash: content_hash(&bytes),
            config: config.clone(),
            evaluation,
        })
    }
}

pub fn events_jsonl(ev: &Evaluation) -> Result<String> {
    let mut out = String::new();
    for s in &ev.strata {
        for e in &s.events {
            out += &serde_json::to_string(e)?;
            out.push('\n');
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    stratum: &'a str,
    count_mod2: i64,
    count_signed: i64,
    n_events: usize,
    multiplicity: i64,
}

pub fn summary_csv(ev: &Evaluation) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Input(format!("csv: {e}"));
    for s in &ev.strata {
        w.serialize(SummaryRow {
            stratum: &s.name,
            count_mod2: s.count_mod2,
            count_signed: s.count_signed,
            n_events: s.events.len(),
            multiplicity: s.total(),
        })
        .map_err(csv_err)?;
    }
    w.serialize(SummaryRow {
        stratum: "total",
        count_mod2: ev.total_mod2,
        count_signed: ev.total_signed,
        n_events: ev.strata.iter().map(|s| s.events.len()).sum(),
        multiplicity: ev.strata.iter().map(|s| s.total()).sum(),
    })
    .map_err(csv_err)?;
    let bytes = w.into_inner().map_err(|e| Error::Input(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Input(format!("csv: {e}")))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultPaths {
    pub record: PathBuf,
    pub events: PathBuf,
    pub summary: PathBuf,
}

/// Write `result.json`, `events.jsonl` and `summary.csv` under `dir`.
pub fn write_results(rec: &RunRecord, dir: &Path) -> Result<ResultPaths> {
    std::fs::create_dir_all(dir)?;
    let paths = ResultPaths {
        record: dir.join("result.json"),
        events: dir.join("events.jsonl"),
        summary: dir.join("summary.csv"),
    };
    std::fs::write(&paths.record, serde_json::to_string_pretty(rec)? + "\n")?;
    std::fs::write(&paths.events, events_jsonl(&rec.evaluation)?)?;
    std::fs::write(&paths.summary, summary_csv(&rec.evaluation)?)?;
    Ok(paths)
}

pub fn read_record(path: &Path) -> Result<RunRecord> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}
