//! Run configuration assembled from an optional `key = value` file and
//! command-line flags, which take precedence.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use freewalk_core::{AngleMixture, CentralState, GroupFamily, GroupKind, NumericContext};

use crate::error::{CliError, CliResult};

/// Keys accepted in config files, identical to the long flag names.
pub const KEYS: &[&str] = &[
    "group",
    "N",
    "state",
    "tau",
    "theta",
    "k",
    "c",
    "c0",
    "format",
    "out",
    "tol",
    "max-terms",
    "quad-order",
    "only",
    "points",
    "no-exact",
];

pub type RawConfig = BTreeMap<String, String>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn parse_config_text(text: &str) -> CliResult<RawConfig> {
    let mut raw = RawConfig::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| invalid(format!("line {}: expected `key = value`", i + 1)))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(invalid(format!("line {}: unknown key `{key}`", i + 1)));
        }
        raw.insert(key.to_string(), value.trim().to_string());
    }
    Ok(raw)
}

pub fn load_config_file(path: &Path) -> CliResult<RawConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    parse_config_text(&text)
}

/// `pi`, `pi/2`, `2pi/3`, `3*pi/4` or a decimal number of radians.
pub fn parse_angle(text: &str) -> CliResult<f64> {
    let s = text.trim().to_ascii_lowercase();
    let bad = || invalid(format!("cannot parse angle `{text}`"));
    if let Some(pos) = s.find("pi") {
        let coef = s[..pos].trim_end_matches('*').trim();
        let coef: f64 = if coef.is_empty() { 1.0 } else { coef.parse().map_err(|_| bad())? };
        let rest = s[pos + 2..].trim();
        let den: f64 = match rest.strip_prefix('/') {
            Some(d) => d.trim().parse().map_err(|_| bad())?,
            None if rest.is_empty() => 1.0,
            None => return Err(bad()),
        };
        if den == 0.0 {
            return Err(bad());
        }
        Ok(coef * PI / den)
    } else {
        s.parse().map_err(|_| bad())
    }
}

/// `a..b` (inclusive), `a..=b` or a single step count.
pub fn parse_k_range(text: &str) -> CliResult<RangeInclusive<u32>> {
    let t = text.trim();
    let bad = || invalid(format!("cannot parse k range `{text}`"));
    let (lo, hi) = match t.split_once("..") {
        Some((a, b)) => (a.trim(), b.trim_start_matches('=').trim()),
        None => (t, t),
    };
    let lo: u32 = lo.parse().map_err(|_| bad())?;
    let hi: u32 = hi.parse().map_err(|_| bad())?;
    if lo == 0 {
        return Err(invalid("k range must start at 1 or later"));
    }
    if hi < lo {
        return Err(invalid(format!("empty k range `{text}`")));
    }
    Ok(lo..=hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Text,
}

impl OutputFormat {
    fn parse(s: &str) -> CliResult<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "text" => Ok(OutputFormat::Text),
            other => Err(invalid(format!("unknown format `{other}`"))),
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::Text => "txt",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Pure(f64),
    Rotation(f64),
    RotationTau(f64),
    Mixture(AngleMixture),
    RandomTransposition,
    Haar,
    Counit,
}

impl StateSpec {
    pub fn parse(text: &str) -> CliResult<Self> {
        let t = text.trim();
        let (head, arg) = match t.split_once(':') {
            Some((h, a)) => (h.trim(), Some(a.trim())),
            None => (t, None),
        };
        let need = |what: &str| arg.ok_or_else(|| invalid(format!("state `{head}` needs `{head}:{what}`")));
        match head {
            "pure" => {
                let v = need("T")?;
                Ok(StateSpec::Pure(v.parse().map_err(|_| invalid(format!("bad pure parameter `{v}`")))?))
            }
            "rotation" => Ok(StateSpec::Rotation(parse_angle(need("THETA")?)?)),
            "mixture" => {
                let path = PathBuf::from(need("FILE")?);
                let text = std::fs::read_to_string(&path)
                    .map_err(|source| CliError::Io { path: path.clone(), source })?;
                Ok(StateSpec::Mixture(text.parse()?))
            }
            "randtrans" => Ok(StateSpec::RandomTransposition),
            "haar" => Ok(StateSpec::Haar),
            "counit" => Ok(StateSpec::Counit),
            other => Err(invalid(format!("unknown state `{other}`"))),
        }
    }

    pub fn build(&self, group: GroupFamily) -> CliResult<CentralState> {
        Ok(match self {
            StateSpec::Pure(t) => CentralState::pure(group, *t)?,
            StateSpec::Rotation(theta) => CentralState::rotation(group, *theta)?,
            StateSpec::RotationTau(tau) => CentralState::rotation_tau(group, *tau)?,
            StateSpec::Mixture(m) => CentralState::mixture(group, m.clone())?,
            StateSpec::RandomTransposition => CentralState::random_transposition(group)?,
            StateSpec::Haar => CentralState::haar(group),
            StateSpec::Counit => CentralState::counit(group),
        })
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Pure(t) => write!(f, "pure:{t}"),
            StateSpec::Rotation(theta) => write!(f, "rotation:{theta}"),
            StateSpec::RotationTau(tau) => write!(f, "tau:{tau}"),
            StateSpec::Mixture(m) => write!(f, "mixture:{}-atoms", m.atoms().len()),
            StateSpec::RandomTransposition => f.write_str("randtrans"),
            StateSpec::Haar => f.write_str("haar"),
            StateSpec::Counit => f.write_str("counit"),
        }
    }
}

/// Validated configuration for one computation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub group: GroupFamily,
    pub state: Option<StateSpec>,
    pub ks: RangeInclusive<u32>,
    pub c: Option<f64>,
    pub c0: Option<f64>,
    pub ctx: NumericContext,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
    pub with_exact: bool,
}

fn parse_num<T: std::str::FromStr>(raw: &RawConfig, key: &str) -> CliResult<Option<T>> {
    raw.get(key)
        .map(|v| v.parse::<T>().map_err(|_| invalid(format!("cannot parse --{key} `{v}`"))))
        .transpose()
}

fn parse_flag(raw: &RawConfig, key: &str) -> CliResult<bool> {
    match raw.get(key).map(String::as_str) {
        None | Some("false") => Ok(false),
        Some("true") | Some("") => Ok(true),
        Some(other) => Err(invalid(format!("--{key} expects true or false, got `{other}`"))),
    }
}

impl RunConfig {
    pub fn from_raw(raw: &RawConfig) -> CliResult<Self> {
        let kind: GroupKind = raw.get("group").map(String::as_str).unwrap_or("oplus").parse()?;
        let size: u32 = parse_num(raw, "N")?.ok_or_else(|| invalid("missing --N"))?;
        let group = GroupFamily::new(kind, size)?;
        let explicit = raw.get("state").map(|s| StateSpec::parse(s)).transpose()?;
        let theta = raw.get("theta").map(|s| parse_angle(s)).transpose()?;
        let tau: Option<f64> = parse_num(raw, "tau")?;
        let state = match (explicit, theta, tau) {
            (Some(s), None, None) => Some(s),
            (None, Some(theta), None) => Some(StateSpec::Rotation(theta)),
            (None, None, Some(tau)) => Some(StateSpec::RotationTau(tau)),
            (None, None, None) => None,
            _ => return Err(invalid("give exactly one of --state, --theta, --tau")),
        };
        let ks = raw.get("k").map(|s| parse_k_range(s)).transpose()?.unwrap_or(1..=30);
        let mut ctx = NumericContext::default();
        if let Some(tol) = parse_num(raw, "tol")? {
            ctx = ctx.with_rel_tol(tol)?;
        }
        if let Some(m) = parse_num(raw, "max-terms")? {
            ctx = ctx.with_max_terms(m)?;
        }
        if let Some(q) = parse_num(raw, "quad-order")? {
            ctx = ctx.with_quad_order(q)?;
        }
        let c: Option<f64> = parse_num(raw, "c")?;
        let c0: Option<f64> = parse_num(raw, "c0")?;
        Ok(RunConfig {
            group,
            state,
            ks,
            c,
            c0,
            ctx,
            format: raw.get("format").map(|f| OutputFormat::parse(f)).transpose()?,
            out: raw.get("out").map(PathBuf::from),
            with_exact: !parse_flag(raw, "no-exact")?,
        })
    }

    pub fn require_state(&self) -> CliResult<CentralState> {
        self.state.as_ref().ok_or_else(|| invalid("missing --state (or --theta / --tau)"))?.build(self.group)
    }
}

/// Splits comma-separated `group`, `N`, `state`, `theta` and `tau` values
/// into the cartesian product of single-valued configurations.
pub fn expand_axes(raw: &RawConfig) -> Vec<RawConfig> {
    const AXES: [&str; 5] = ["group", "N", "state", "theta", "tau"];
    let mut combos = vec![raw.clone()];
    for axis in AXES {
        let Some(values) = raw.get(axis) else { continue };
        let values: Vec<&str> = values.split(',').map(str::trim).filter(|v| !v.is_empty()).collect();
        combos = combos
            .into_iter()
            .flat_map(|base| {
                values.iter().map(move |v| {
                    let mut next = base.clone();
                    next.insert(axis.to_string(), v.to_string());
                    next
                })
            })
            .collect();
    }
    combos
}

/// File stem for one sweep combination, e.g. `oplus_N10_rotation-pi`.
pub fn combination_stem(raw: &RawConfig) -> String {
    let mut parts = vec![
        raw.get("group").cloned().unwrap_or_else(|| "oplus".into()),
        format!("N{}", raw.get("N").map(String::as_str).unwrap_or("")),
    ];
    for key in ["state", "theta", "tau"] {
        if let Some(v) = raw.get(key) {
            parts.push(format!("{key}-{v}"));
        }
    }
    parts
        .join("_")
        .chars()
        .map(|ch| if ch.is_ascii_alphanumeric() || matches!(ch, '_' | '-' | '.') { ch } else { '-' })
        .collect()
}
