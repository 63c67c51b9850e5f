use std::io::Write;
use std::path::{Path, PathBuf};

use freewalk_core::bounds::{
    build_profile, kac_window_lower, kac_window_upper, l2_window, mixed_lower, mixed_upper,
    transposition_lower, transposition_upper, BoundValue,
};
use freewalk_core::kernel::{is_admissible, threshold_k1};
use freewalk_core::oracle::exact_tv;
use freewalk_core::verify::{run_check, GridSpec, CHECK_NAMES};
use freewalk_core::{
    CentralState, Error as CoreError, ExactCell, ExactTv, GroupKind, NumericContext, StateKind,
};
use serde_json::{json, Map, Value};

use crate::config::{combination_stem, expand_axes, OutputFormat, RawConfig, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{format_float, json_float, profile_json, write_profile_csv, ProfileRecord};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_NUMERIC: u8 = 3;

fn emit(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => {
            std::fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn json_bytes(value: &Value) -> CliResult<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn header(cfg: &RunConfig, state: &CentralState) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("group".into(), json!(cfg.group.kind().short_name()));
    m.insert("N".into(), json!(cfg.group.size()));
    m.insert("state".into(), json!(cfg.state.as_ref().map(|s| s.to_string())));
    m.insert("k0".into(), json!(state.boundedness_threshold()));
    m
}

/// Profile table bytes and the number of rows whose exact value failed.
fn profile_bytes(cfg: &RunConfig, format: OutputFormat) -> CliResult<(Vec<u8>, usize)> {
    let state = cfg.require_state()?;
    let profile = build_profile(&state, cfg.ks.clone(), &cfg.ctx, cfg.with_exact)?;
    let mut failures = 0;
    for row in &profile.rows {
        if let ExactCell::Failed { message } = &row.exact {
            eprintln!("k = {}: exact distance failed: {message}", row.k);
            failures += 1;
        }
    }
    let records: Vec<ProfileRecord> = profile.rows.iter().map(ProfileRecord::from).collect();
    let bytes = match format {
        OutputFormat::Json => json_bytes(&profile_json(&records, header(cfg, &state)))?,
        _ => {
            let mut buf = Vec::new();
            write_profile_csv(&records, &mut buf)?;
            buf
        }
    };
    Ok((bytes, failures))
}

pub fn cmd_profile(cfg: &RunConfig) -> CliResult<u8> {
    let format = cfg.format.unwrap_or(OutputFormat::Csv);
    let (bytes, failures) = profile_bytes(cfg, format)?;
    emit(cfg.out.as_deref(), &bytes)?;
    Ok(if failures > 0 { EXIT_NUMERIC } else { EXIT_OK })
}

fn bound_json(b: BoundValue) -> Value {
    json!({ "value": json_float(b.value), "status": b.status, "formula": b.formula })
}

/// Window bound that is simply absent when the size is inadmissible.
fn optional(r: freewalk_core::Result<BoundValue>) -> CliResult<Value> {
    match r {
        Ok(b) => Ok(bound_json(b)),
        Err(CoreError::Inadmissible(_)) => Ok(Value::Null),
        Err(e) => Err(e.into()),
    }
}

pub fn cmd_cutoff(cfg: &RunConfig) -> CliResult<u8> {
    let state = cfg.require_state()?;
    let g = cfg.group;
    let size = g.size();
    let n = size as f64;
    let mut summary = header(cfg, &state);
    let (mut k1, mut admissible, mut upper, mut lower) = (Value::Null, Value::Null, Value::Null, Value::Null);
    match (g.kind(), state.kind()) {
        (GroupKind::FreeOrthogonal, StateKind::Rotation { tau }) => {
            k1 = json_float(threshold_k1(size, *tau)?);
            admissible = json!(is_admissible(size, *tau)?);
            if let Some(c) = cfg.c {
                upper = optional(kac_window_upper(size, *tau, c, cfg.c0.unwrap_or(c)))?;
                lower = optional(kac_window_lower(size, *tau, c))?;
            }
        }
        (_, StateKind::Mixture(m)) => {
            k1 = json_float(n * n.ln() / m.mean_tau());
            admissible = json!(n >= m.required_size().max(3.0));
            if let Some(c) = cfg.c {
                upper = optional(mixed_upper(size, m, c))?;
                lower = optional(mixed_lower(size, m, c))?;
            }
        }
        (GroupKind::FreeSymmetric, StateKind::Pure { t }) if *t == n - 2.0 => {
            k1 = json_float(n * n.ln() / 2.0);
            admissible = json!(size >= 16);
            if let Some(c) = cfg.c {
                upper = optional(transposition_upper(size, c).map(|(_, b)| b))?;
                lower = optional(transposition_lower(size, c).map(|(_, b)| b))?;
            }
        }
        (GroupKind::FreeSymmetric, StateKind::RandomTransposition) => {
            k1 = json_float(n / 2.0);
            admissible = json!(true);
            if let Some(c) = cfg.c {
                let w = l2_window(size, c, &cfg.ctx)?;
                upper = json!({ "value": json_float(w.upper), "step": w.upper_step, "exact": json_float(w.exact_at_upper) });
                if let Some(l) = w.lower {
                    lower =
                        json!({ "value": json_float(l.value), "step": l.step, "exact": json_float(l.exact) });
                }
            }
        }
        _ => {}
    }
    summary.insert("k1".into(), k1);
    summary.insert("admissible".into(), admissible);
    summary.insert("c".into(), cfg.c.map(json_float).unwrap_or(Value::Null));
    summary.insert("c0".into(), cfg.c0.or(cfg.c).map(json_float).unwrap_or(Value::Null));
    summary.insert("upper_at_c".into(), upper);
    summary.insert("lower_at_c".into(), lower);
    emit(cfg.out.as_deref(), &json_bytes(&Value::Object(summary))?)?;
    Ok(EXIT_OK)
}

pub fn cmd_oracle(cfg: &RunConfig, json_out: bool) -> CliResult<u8> {
    let state = cfg.require_state()?;
    let json_out = json_out || cfg.format == Some(OutputFormat::Json);
    let mut entries = Vec::new();
    let mut text = String::new();
    for k in cfg.ks.clone() {
        let result = exact_tv(&state, k, &cfg.ctx)?;
        match result {
            ExactTv::Converged(est) => {
                entries.push(json!({ "k": k, "tv": json_float(est.value), "err": json_float(est.error_bar), "status": "ok" }));
                text.push_str(&format!(
                    "k={k} {} ± {}\n",
                    format_float(est.value),
                    format_float(est.error_bar)
                ));
            }
            ExactTv::Divergent => {
                entries.push(json!({ "k": k, "tv": null, "err": null, "status": "divergent" }));
                text.push_str(&format!("k={k} DIVERGENT\n"));
            }
        }
    }
    let bytes = if json_out {
        let value = if entries.len() == 1 { entries.remove(0) } else { Value::Array(entries) };
        json_bytes(&value)?
    } else {
        text.into_bytes()
    };
    emit(cfg.out.as_deref(), &bytes)?;
    Ok(EXIT_OK)
}

/// Settings for the verification harness.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub only: Option<Vec<String>>,
    pub grid: GridSpec,
    pub ctx: NumericContext,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl VerifyConfig {
    pub fn from_raw(raw: &RawConfig) -> CliResult<Self> {
        let only = raw.get("only").map(|s| s.split(',').map(|n| n.trim().to_string()).collect::<Vec<_>>());
        if let Some(names) = &only {
            if let Some(bad) = names.iter().find(|n| !CHECK_NAMES.contains(&n.as_str())) {
                return Err(CliError::Config(format!(
                    "unknown check `{bad}`; known: {}",
                    CHECK_NAMES.join(", ")
                )));
            }
        }
        let mut grid = GridSpec::default();
        if let Some(p) = raw.get("points") {
            grid.points =
                p.parse().ok().filter(|&p| p >= 2).ok_or_else(|| {
                    CliError::Config(format!("--points expects an integer >= 2, got `{p}`"))
                })?;
        }
        let format = match raw.get("format").map(String::as_str) {
            None | Some("text") => OutputFormat::Text,
            Some("json") => OutputFormat::Json,
            Some(other) => {
                return Err(CliError::Config(format!("verify supports text or json, got `{other}`")))
            }
        };
        Ok(VerifyConfig {
            only,
            grid,
            ctx: NumericContext::default(),
            format,
            out: raw.get("out").map(PathBuf::from),
        })
    }
}

pub fn cmd_verify(cfg: &VerifyConfig) -> CliResult<u8> {
    let names: Vec<String> =
        cfg.only.clone().unwrap_or_else(|| CHECK_NAMES.iter().map(|s| s.to_string()).collect());
    let mut reports = Vec::new();
    for name in &names {
        reports.push(run_check(name, &cfg.grid, &cfg.ctx)?);
    }
    let bytes = match cfg.format {
        OutputFormat::Json => {
            json_bytes(&serde_json::to_value(&reports).map_err(|e| CliError::Output(e.to_string()))?)?
        }
        _ => {
            let mut text = String::new();
            for r in &reports {
                text.push_str(&r.summary_line());
                text.push('\n');
                for p in &r.parts {
                    text.push_str("  ");
                    text.push_str(&p.summary_line());
                    text.push('\n');
                }
            }
            text.into_bytes()
        }
    };
    emit(cfg.out.as_deref(), &bytes)?;
    Ok(if reports.iter().all(|r| r.pass) { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

/// Runs a profile for every combination of the comma-separated axes and
/// writes one file per combination into the `out` directory.
pub fn cmd_sweep(raw: &RawConfig) -> CliResult<u8> {
    let dir = PathBuf::from(raw.get("out").ok_or_else(|| CliError::Config("sweep needs --out DIR".into()))?);
    let combos = expand_axes(raw);
    let configs = combos
        .iter()
        .map(|c| {
            let mut single = c.clone();
            single.remove("out");
            RunConfig::from_raw(&single).map(|cfg| (combination_stem(c), cfg))
        })
        .collect::<CliResult<Vec<_>>>()?;
    std::fs::create_dir_all(&dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
    let mut code = EXIT_OK;
    for (stem, cfg) in configs {
        let format = cfg.format.unwrap_or(OutputFormat::Csv);
        let (bytes, failures) = profile_bytes(&cfg, format)?;
        let path = dir.join(format!("{stem}.{}", format.extension()));
        emit(Some(&path), &bytes)?;
        println!("{}", path.display());
        if failures > 0 {
            code = EXIT_NUMERIC;
        }
    }
    Ok(code)
}
