//! Closed-form and series bounds on the total variation distance, and the
//! cut-off profiles assembled from them.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::envelope::Envelope;
use crate::error::{domain, Error, Result};
use crate::kernel::{
    is_admissible, log_q_param, threshold_for_arguments, threshold_k0, threshold_k1, GroupFamily, GroupKind,
    NumericContext, StepThreshold,
};
use crate::numeric::log_add_exp;
use crate::oracle::{exact_tv_with_table, ExactTv};
use crate::states::{AngleMixture, CentralState, CharacterTable, StateKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundStatus {
    Valid,
    Vacuous,
    Divergent,
}

impl BoundStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundStatus::Valid => "valid",
            BoundStatus::Vacuous => "vacuous",
            BoundStatus::Divergent => "divergent",
        }
    }
}

impl fmt::Display for BoundStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "valid" => Ok(BoundStatus::Valid),
            "vacuous" => Ok(BoundStatus::Vacuous),
            "divergent" => Ok(BoundStatus::Divergent),
            other => Err(domain(format!("unknown bound status `{other}`"))),
        }
    }
}

/// A bound with its status and the label of the formula that produced it.
/// Vacuous values are reported raw, not clamped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundValue {
    pub value: f64,
    pub status: BoundStatus,
    pub formula: &'static str,
}

impl BoundValue {
    pub fn upper(value: f64, formula: &'static str) -> Self {
        let status = if value >= 1.0 { BoundStatus::Vacuous } else { BoundStatus::Valid };
        BoundValue { value, status, formula }
    }

    pub fn lower(value: f64, formula: &'static str) -> Self {
        let status = if value <= 0.0 { BoundStatus::Vacuous } else { BoundStatus::Valid };
        BoundValue { value, status, formula }
    }

    pub fn divergent(formula: &'static str) -> Self {
        BoundValue { value: f64::INFINITY, status: BoundStatus::Divergent, formula }
    }

    pub fn is_valid(&self) -> bool {
        self.status == BoundStatus::Valid
    }

    pub fn is_divergent(&self) -> bool {
        self.status == BoundStatus::Divergent
    }
}

/// A geometric bound together with whether its rate is below one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateBound {
    pub bound: BoundValue,
    pub decays: bool,
}

fn need_steps(k: u32, min: u32) -> Result<()> {
    if k < min {
        Err(domain(format!("k must be >= {min}, got {k}")))
    } else {
        Ok(())
    }
}

// --- Series bound --------------------------------------------------------

/// `(1/2) sqrt(sum_{n>=1} d_n^2 phi(n)^{2k})`, truncated with a certified
/// tail.
pub fn dsh_upper(s: &CentralState, k: u32, ctx: &NumericContext) -> BoundValue {
    let table = s.character_table(ctx.max_terms() + 1);
    dsh_with_table(s, &table, k, ctx)
}

pub(crate) fn dsh_with_table(
    s: &CentralState,
    table: &CharacterTable,
    k: u32,
    ctx: &NumericContext,
) -> BoundValue {
    const LABEL: &str = "dsh-series";
    if s.is_haar() {
        return BoundValue::upper(0.0, LABEL);
    }
    if k == 0 || !s.boundedness_threshold().is_reached_by(k) {
        return BoundValue::divergent(LABEL);
    }
    let form = s.form();
    let kk = k as f64;
    let env =
        s.numerator_envelope().pow(2.0 * kk) * Envelope::inverse_chebyshev(form.dim_arg).pow(2.0 * kk - 2.0);
    if !env.is_summable() {
        return BoundValue::divergent(LABEL);
    }
    let step = form.step;
    let mut log_sum = f64::NEG_INFINITY;
    let mut log_tail = f64::INFINITY;
    for n in 1..table.len() {
        let term = 2.0 * table.log_dim[n] + table.power(n, 2 * k).log;
        log_sum = log_add_exp(log_sum, term);
        log_tail = env.log_tail(step * (n + 1), step);
        let target = (log_sum + ctx.rel_tol().ln()).max(2.0 * ctx.abs_tol().ln());
        if log_tail <= target {
            break;
        }
    }
    if !log_tail.is_finite() && log_tail > 0.0 {
        return BoundValue::divergent(LABEL);
    }
    BoundValue::upper(0.5 * (0.5 * log_add_exp(log_sum, log_tail)).exp(), LABEL)
}

// --- Free orthogonal closed forms ----------------------------------------

/// Pure state with `|t| < 2`:
/// `(N / (2 sqrt(1 - q(N)^2))) (1 / (N sqrt(1 - t^2/4)))^k`.
pub fn small_t_upper(size: u32, t: f64, k: u32) -> Result<RateBound> {
    if !(t.abs() < 2.0) {
        return Err(domain(format!("small-t bound needs |t| < 2, got {t}")));
    }
    need_steps(k, 2)?;
    let n = size as f64;
    let lq = log_q_param(n)?;
    let log_pref = n.ln() - 2f64.ln() - 0.5 * (-(2.0 * lq).exp_m1()).ln();
    let log_rate = -n.ln() - 0.5 * (1.0 - 0.25 * t * t).ln();
    let value = (log_pref + k as f64 * log_rate).exp();
    let decays = t.abs() < 2.0 * (1.0 - 1.0 / (n * n)).sqrt();
    Ok(RateBound { bound: BoundValue::upper(value, "small-t"), decays })
}

/// Pure state with `2 < t < N`:
/// `(1/2) N q(t)^{k0} / sqrt(q(t)^{2k0} - q(N)^{2k0-2}) (1 / (N q(t) (1 - q(t)^2)))^k`,
/// divergent below `k0`.
pub fn large_t_upper(size: u32, t: f64, k: u32) -> Result<BoundValue> {
    const LABEL: &str = "large-t";
    let n = size as f64;
    if !(t > 2.0 && t < n) {
        return Err(domain(format!("large-t bound needs 2 < t < N, got t = {t}, N = {size}")));
    }
    need_steps(k, 1)?;
    let group = GroupFamily::free_orthogonal(size)?;
    let k0 = match threshold_k0(&group, t)? {
        StepThreshold::Finite(k0) => k0,
        StepThreshold::Infinite => return Ok(BoundValue::divergent(LABEL)),
    };
    if k < k0 {
        return Ok(BoundValue::divergent(LABEL));
    }
    let (lqt, lqn) = (log_q_param(t)?, log_q_param(n)?);
    let k0f = k0 as f64;
    let log_den = 2.0 * k0f * lqt + (-((2.0 * k0f - 2.0) * lqn - 2.0 * k0f * lqt).exp_m1()).ln();
    let log_pref = n.ln() - 2f64.ln() + k0f * lqt - 0.5 * log_den;
    let log_rate = -(n.ln() + lqt + (-(2.0 * lqt).exp_m1()).ln());
    Ok(BoundValue::upper((log_pref + k as f64 * log_rate).exp(), LABEL))
}

/// `sup_n (1/2) d_n |phi(n)|^k / ||chi_n||`. The scan stops at the first
/// candidate of size at least one, which is already vacuous.
pub fn char_lower(s: &CentralState, k: u32, ctx: &NumericContext) -> BoundValue {
    let table = s.character_table(ctx.max_terms() + 1);
    char_lower_with_table(s, &table, k)
}

pub(crate) fn char_lower_with_table(s: &CentralState, table: &CharacterTable, k: u32) -> BoundValue {
    const LABEL: &str = "character";
    let g = s.group();
    let mut best = f64::NEG_INFINITY;
    for n in 1..table.len() {
        let cand = table.log_dim[n] + table.power(n, k).log - 2f64.ln() - g.character_norm(n).ln();
        if cand > best {
            best = cand;
        }
        if best >= 0.0 {
            break;
        }
    }
    let value = best.exp();
    let status = if value <= 0.0 || value >= 1.0 { BoundStatus::Vacuous } else { BoundStatus::Valid };
    BoundValue { value, status, formula: LABEL }
}

// --- Kac walk and mixtures -----------------------------------------------

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau <= 4.0 {
        Ok(())
    } else {
        Err(domain(format!("tau must lie in (0, 4], got {tau}")))
    }
}

/// `(1 / (2 sqrt(1 - e^{-2 c0 tau}))) e^{-c tau}` at `k = k1 + cN`.
pub fn kac_window_upper(size: u32, tau: f64, c: f64, c0: f64) -> Result<BoundValue> {
    check_tau(tau)?;
    if !(c0 > 0.0) {
        return Err(domain(format!("c0 must be positive, got {c0}")));
    }
    if !(c >= c0) {
        return Err(domain(format!("need c >= c0, got c = {c}, c0 = {c0}")));
    }
    if !is_admissible(size, tau)? {
        return Err(Error::Inadmissible(format!("N = {size} is below tau + C(tau) for tau = {tau}")));
    }
    let value = (-c * tau).exp() / (2.0 * (-(-2.0 * c0 * tau).exp_m1()).sqrt());
    Ok(BoundValue::upper(value, "kac-window"))
}

/// `1 - 200 e^{-2 c tau}` at `k = k1 - cN`.
pub fn kac_window_lower(size: u32, tau: f64, c: f64) -> Result<BoundValue> {
    check_tau(tau)?;
    if size < 5 {
        return Err(Error::Inadmissible(format!("lower window needs N >= 5, got {size}")));
    }
    if !(c > 0.0) {
        return Err(domain(format!("c must be positive, got {c}")));
    }
    Ok(BoundValue::lower(1.0 - 200.0 * (-2.0 * c * tau).exp(), "kac-window"))
}

/// `3^{1/8} e^{-eta c/32} + e^{-c eta/4} / (2 sqrt(1 - e^{-c eta/2}))` at
/// `k = N ln N / eta + cN`.
pub fn mixed_upper(size: u32, mixture: &AngleMixture, c: f64) -> Result<BoundValue> {
    if !(c > 0.0) {
        return Err(domain(format!("c must be positive, got {c}")));
    }
    let need = mixture.required_size().max(3.0);
    if (size as f64) < need {
        return Err(Error::Inadmissible(format!("N = {size} below required {need:.4}")));
    }
    let eta = mixture.mean_tau();
    let value = 3f64.powf(0.125) * (-eta * c / 32.0).exp()
        + (-c * eta / 4.0).exp() / (2.0 * (-(-c * eta / 2.0).exp_m1()).sqrt());
    Ok(BoundValue::upper(value, "mixed-rotation"))
}

/// `1 - 500 e^{-2 eta c}` at `k = N ln N / eta - cN`.
pub fn mixed_lower(size: u32, mixture: &AngleMixture, c: f64) -> Result<BoundValue> {
    if size < 5 {
        return Err(Error::Inadmissible(format!("lower window needs N >= 5, got {size}")));
    }
    if !(c > 0.0) {
        return Err(domain(format!("c must be positive, got {c}")));
    }
    Ok(BoundValue::lower(1.0 - 500.0 * (-2.0 * mixture.mean_tau() * c).exp(), "mixed-rotation"))
}

// --- Even families ---------------------------------------------------------

/// Free symmetric pure state, small parameter, in the displayed form
/// `(1/2) sqrt(N / (q^2 (1 - q^4))) (q / (N sqrt(1 - t^2/4)))^k`, `q = q(sqrt N)`.
///
/// This expression falls below the exact distance in places (for example
/// `N = 9, t = 0, k = 2`); [`s_small_upper_rederived`] is the form used in
/// profiles.
pub fn s_small_upper(size: u32, t: f64, k: u32) -> Result<RateBound> {
    if size < 5 {
        return Err(domain(format!("needs N >= 5, got {size}")));
    }
    if !(t.abs() < 2.0) {
        return Err(domain(format!("the displayed rate needs |t| < 2, got {t}")));
    }
    need_steps(k, 2)?;
    let n = size as f64;
    let lq = log_q_param(n.sqrt())?;
    let log_pref = -2f64.ln() + 0.5 * (n.ln() - 2.0 * lq - (-(4.0 * lq).exp_m1()).ln());
    let log_rate = lq - n.ln() - 0.5 * (1.0 - 0.25 * t * t).ln();
    let value = (log_pref + k as f64 * log_rate).exp();
    let q_over_n = lq.exp() / n;
    let decays = t.abs() < 2.0 * (1.0 - q_over_n * q_over_n).sqrt();
    Ok(RateBound { bound: BoundValue::upper(value, "s-small-t"), decays })
}

/// Even family pure state with `0 <= t < 4`:
/// `(1/2) sqrt(c / (q^2 (1 - q^4))) (q / (sqrt c sqrt(1 - t/4)))^k`, where
/// `c` is the carrier and `q = q(sqrt c)`.
pub fn s_small_upper_rederived(carrier: f64, t: f64, k: u32) -> Result<RateBound> {
    if !(carrier > 4.0) {
        return Err(domain(format!("needs carrier > 4, got {carrier}")));
    }
    if !(0.0..4.0).contains(&t) {
        return Err(domain(format!("needs 0 <= t < 4, got {t}")));
    }
    need_steps(k, 2)?;
    let lq = log_q_param(carrier.sqrt())?;
    let log_pref = -2f64.ln() + 0.5 * (carrier.ln() - 2.0 * lq - (-(4.0 * lq).exp_m1()).ln());
    let log_rate = lq - 0.5 * carrier.ln() - 0.5 * (1.0 - 0.25 * t).ln();
    let value = (log_pref + k as f64 * log_rate).exp();
    Ok(RateBound { bound: BoundValue::upper(value, "s-small-t-rederived"), decays: log_rate < 0.0 })
}

/// Even family pure state with `4 < t < c` (`c` the carrier):
/// `(1/2) sqrt(c^2 q_t^{4k0} / (q_t^{4k0} - q_c^{4k0-4})) (q_c / (sqrt c q_t^2 (1 - q_t^2)))^k`
/// with `q_t = q(sqrt t)`, `q_c = q(sqrt c)`; divergent below `k0`.
pub fn s_large_upper(carrier: f64, t: f64, k: u32) -> Result<BoundValue> {
    const LABEL: &str = "s-large-t";
    if !(t > 4.0 && t < carrier) {
        return Err(domain(format!("needs 4 < t < carrier, got t = {t}, carrier = {carrier}")));
    }
    need_steps(k, 1)?;
    let k0 = match threshold_for_arguments(t.sqrt(), carrier.sqrt()) {
        StepThreshold::Finite(k0) => k0,
        StepThreshold::Infinite => return Ok(BoundValue::divergent(LABEL)),
    };
    if k < k0 {
        return Ok(BoundValue::divergent(LABEL));
    }
    let (lqt, lqc) = (log_q_param(t.sqrt())?, log_q_param(carrier.sqrt())?);
    let k0f = k0 as f64;
    let log_den = 4.0 * k0f * lqt + (-((4.0 * k0f - 4.0) * lqc - 4.0 * k0f * lqt).exp_m1()).ln();
    let log_pref = -2f64.ln() + 0.5 * (2.0 * carrier.ln() + 4.0 * k0f * lqt - log_den);
    let log_rate = lqc - 0.5 * carrier.ln() - 2.0 * lqt - (-(2.0 * lqt).exp_m1()).ln();
    Ok(BoundValue::upper((log_pref + k as f64 * log_rate).exp(), LABEL))
}

/// Window around `N ln N / 2` for the free symmetric walk driven by
/// `phi_{N-2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TranspositionWindow {
    pub upper_step: u32,
    pub upper: BoundValue,
    pub lower_step: i64,
    pub lower: BoundValue,
}

/// Upper side: the large-parameter bound at `t = N - 2` and
/// `k = ceil(N ln N / 2 + cN)`.
pub fn transposition_upper(size: u32, c: f64) -> Result<(u32, BoundValue)> {
    if size < 16 {
        return Err(Error::Inadmissible(format!("upper window needs N >= 16, got {size}")));
    }
    let n = size as f64;
    let k = (n * n.ln() / 2.0 + c * n).ceil();
    if k < 1.0 {
        return Err(domain(format!("c = {c} gives no positive step count")));
    }
    let k = k as u32;
    Ok((k, s_large_upper(n, n - 2.0, k)?))
}

/// Lower side: `1 - 500 e^{-4c}` at `k = floor(N ln N / 2 - cN)`.
pub fn transposition_lower(size: u32, c: f64) -> Result<(i64, BoundValue)> {
    if size < 5 {
        return Err(Error::Inadmissible(format!("lower window needs N >= 5, got {size}")));
    }
    let n = size as f64;
    let k = (n * n.ln() / 2.0 - c * n).floor() as i64;
    Ok((k, BoundValue::lower(1.0 - 500.0 * (-4.0 * c).exp(), "transposition-window")))
}

pub fn transposition_window(size: u32, c: f64) -> Result<TranspositionWindow> {
    let (upper_step, upper) = transposition_upper(size, c)?;
    let (lower_step, lower) = transposition_lower(size, c)?;
    Ok(TranspositionWindow { upper_step, upper, lower_step, lower })
}

/// Operator-norm window around `N/2` for the random transposition walk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct L2Window {
    pub upper_step: u32,
    pub upper: f64,
    pub exact_at_upper: f64,
    pub lower: Option<L2Lower>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct L2Lower {
    pub step: u32,
    pub value: f64,
    pub exact: f64,
}

/// Upper value `e^{-1} e^{-2c}` at `k = ceil(N/2 + cN)` and, for `N >= 5`,
/// lower value `e^{2c-2}` at `k = floor(N/2 - cN)` (clamped at zero), each
/// with the exact distance `(1 - 2/N)^k`.
pub fn l2_window(size: u32, c: f64, ctx: &NumericContext) -> Result<L2Window> {
    if !(c > 0.0 && c < 1.0) {
        return Err(domain(format!("c must lie in (0, 1), got {c}")));
    }
    let state = CentralState::random_transposition(GroupFamily::free_symmetric(size)?)?;
    let sup = state.l2_sup(ctx)?.sup_abs;
    let n = size as f64;
    let upper_step = (n / 2.0 + c * n).ceil() as u32;
    let upper = (-1.0 - 2.0 * c).exp();
    let exact_at_upper = sup.powi(upper_step as i32);
    let lower = (size >= 5).then(|| {
        let step = (n / 2.0 - c * n).floor().max(0.0) as u32;
        L2Lower { step, value: (2.0 * c - 2.0).exp(), exact: sup.powi(step as i32) }
    });
    Ok(L2Window { upper_step, upper, exact_at_upper, lower })
}

// --- Profiles ----------------------------------------------------------------

/// Exact distance attached to a profile row.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ExactCell {
    Skipped,
    Divergent,
    Value { value: f64, error_bar: f64 },
    Failed { message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileRow {
    pub k: u32,
    pub reaches_threshold: bool,
    pub dsh_upper: BoundValue,
    pub closed_upper: BoundValue,
    pub char_lower: BoundValue,
    pub window_lower: BoundValue,
    pub exact: ExactCell,
    pub l2_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutoffProfile {
    pub group: GroupFamily,
    pub threshold: StepThreshold,
    pub rows: Vec<ProfileRow>,
}

fn best_upper(candidates: impl IntoIterator<Item = BoundValue>) -> Option<BoundValue> {
    candidates.into_iter().reduce(|a, b| if b.value < a.value { b } else { a })
}

/// Smallest applicable closed-form upper bound for `s` after `k` steps.
pub fn closed_upper(s: &CentralState, k: u32) -> BoundValue {
    let g = s.group();
    let n = g.size() as f64;
    if s.is_haar() {
        return BoundValue::upper(0.0, "haar");
    }
    if !s.boundedness_threshold().is_reached_by(k) {
        return BoundValue::divergent("closed-form");
    }
    let mut candidates: Vec<BoundValue> = Vec::new();
    let pure_bounds = |t: f64, candidates: &mut Vec<BoundValue>| {
        if g.has_even_characters() {
            let carrier = g.carrier();
            if t < 4.0 {
                if let Ok(b) = s_small_upper_rederived(carrier, t, k) {
                    candidates.push(b.bound);
                }
            } else if t > 4.0 && t < carrier {
                if let Ok(b) = s_large_upper(carrier, t, k) {
                    candidates.push(b);
                }
            }
        } else {
            let a = t.abs();
            if a < 2.0 {
                if let Ok(b) = small_t_upper(g.size(), a, k) {
                    candidates.push(b.bound);
                }
            } else if a > 2.0 && a < n {
                if let Ok(b) = large_t_upper(g.size(), a, k) {
                    candidates.push(b);
                }
            }
        }
    };
    match s.kind() {
        StateKind::Pure { t } => pure_bounds(*t, &mut candidates),
        StateKind::Rotation { tau } => {
            let t = n - tau;
            match g.kind() {
                GroupKind::QuantumAutomorphism => pure_bounds(t * t, &mut candidates),
                _ => {
                    pure_bounds(t, &mut candidates);
                    if let Ok(k1) = threshold_k1(g.size(), *tau) {
                        let c = (k as f64 - k1) / n;
                        if c > 0.0 {
                            if let Ok(b) = kac_window_upper(g.size(), *tau, c, c) {
                                candidates.push(b);
                            }
                        }
                    }
                }
            }
        }
        StateKind::Mixture(m) => {
            let c = (k as f64 - n * n.ln() / m.mean_tau()) / n;
            if c > 0.0 {
                if let Ok(b) = mixed_upper(g.size(), m, c) {
                    candidates.push(b);
                }
            }
        }
        StateKind::RandomTransposition | StateKind::Haar => {}
    }
    best_upper(candidates).unwrap_or_else(|| BoundValue::upper(1.0, "trivial"))
}

/// Lower window bound at `k` steps when one exists for this state.
pub fn window_lower(s: &CentralState, k: u32) -> BoundValue {
    let g = s.group();
    let n = g.size() as f64;
    let none = BoundValue::lower(0.0, "none");
    match (g.kind(), s.kind()) {
        (GroupKind::FreeOrthogonal, StateKind::Rotation { tau }) => {
            let Ok(k1) = threshold_k1(g.size(), *tau) else { return none };
            let c = (k1 - k as f64) / n;
            if c > 0.0 {
                kac_window_lower(g.size(), *tau, c).unwrap_or(none)
            } else {
                none
            }
        }
        (GroupKind::FreeOrthogonal, StateKind::Mixture(m)) => {
            let c = (n * n.ln() / m.mean_tau() - k as f64) / n;
            if c > 0.0 {
                mixed_lower(g.size(), m, c).unwrap_or(none)
            } else {
                none
            }
        }
        (GroupKind::FreeSymmetric, StateKind::Pure { t }) if *t == n - 2.0 => {
            let c = (n * n.ln() / 2.0 - k as f64) / n;
            if c > 0.0 {
                transposition_lower(g.size(), c).map(|(_, b)| b).unwrap_or(none)
            } else {
                none
            }
        }
        _ => none,
    }
}

/// One row per `k` with every applicable bound, the `L^2` operator distance
/// and optionally the exact distance. Rows are evaluated in parallel and
/// returned in increasing `k`.
pub fn build_profile(
    s: &CentralState,
    ks: RangeInclusive<u32>,
    ctx: &NumericContext,
    with_exact: bool,
) -> Result<CutoffProfile> {
    if ks.is_empty() {
        return Err(domain("empty k range"));
    }
    if *ks.start() == 0 {
        return Err(domain("k range must start at 1 or later"));
    }
    let table = s.character_table(ctx.max_terms() + 1);
    let sup = s.l2_sup(ctx).map(|c| c.sup_abs);
    let threshold = s.boundedness_threshold();
    let ks: Vec<u32> = ks.collect();
    let rows = ks
        .par_iter()
        .map(|&k| {
            let exact = if with_exact {
                match exact_tv_with_table(s, &table, k, ctx) {
                    Ok(ExactTv::Converged(est)) => {
                        ExactCell::Value { value: est.value, error_bar: est.error_bar }
                    }
                    Ok(ExactTv::Divergent) => ExactCell::Divergent,
                    Err(e) => ExactCell::Failed { message: e.to_string() },
                }
            } else {
                ExactCell::Skipped
            };
            ProfileRow {
                k,
                reaches_threshold: threshold.is_reached_by(k),
                dsh_upper: dsh_with_table(s, &table, k, ctx),
                closed_upper: closed_upper(s, k),
                char_lower: char_lower_with_table(s, &table, k),
                window_lower: window_lower(s, k),
                exact,
                l2_norm: sup.as_ref().map(|v| v.powi(k as i32)).unwrap_or(f64::NAN),
            }
        })
        .collect();
    Ok(CutoffProfile { group: s.group(), threshold, rows })
}
