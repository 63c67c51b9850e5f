//! Grid verification of the inequalities behind the bounds.
//!
//! Every check reports the smallest signed margin over its grid; a point
//! passes when its margin is at least `-margin_tolerance`.

use rayon::prelude::*;
use serde::Serialize;

use crate::envelope::Envelope;
use crate::error::{domain, Result};
use crate::kernel::{cap_c, log_abs_cheb_u, log_encadrement_bounds, q_param, GroupFamily, NumericContext};
use crate::numeric::{log_add_exp, log_grid, open_left_grid};
use crate::oracle::orthonormality_check;

pub const DEFAULT_MARGIN_TOLERANCE: f64 = 1e-12;

/// Outcome of one grid check, possibly aggregated from sub-checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub grid_size: usize,
    pub worst_margin: f64,
    pub worst_point: Vec<(String, f64)>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<CheckReport>,
}

impl CheckReport {
    pub fn leaf(
        name: impl Into<String>,
        grid_size: usize,
        worst_margin: f64,
        worst_point: Vec<(String, f64)>,
    ) -> Self {
        Self::with_tolerance(name, grid_size, worst_margin, worst_point, DEFAULT_MARGIN_TOLERANCE)
    }

    pub fn with_tolerance(
        name: impl Into<String>,
        grid_size: usize,
        worst_margin: f64,
        worst_point: Vec<(String, f64)>,
        tolerance: f64,
    ) -> Self {
        CheckReport {
            name: name.into(),
            grid_size,
            worst_margin,
            worst_point,
            pass: worst_margin >= -tolerance,
            parts: Vec::new(),
        }
    }

    /// Passes only if every part passes; the worst margin is the smallest
    /// among the parts.
    pub fn combine(name: impl Into<String>, parts: Vec<CheckReport>) -> Self {
        let worst =
            parts.iter().reduce(|a, b| if is_worse(b.worst_margin, a.worst_margin) { b } else { a }).cloned();
        let (worst_margin, worst_point) =
            worst.map(|w| (w.worst_margin, w.worst_point)).unwrap_or((f64::INFINITY, Vec::new()));
        CheckReport {
            name: name.into(),
            grid_size: parts.iter().map(|p| p.grid_size).sum(),
            worst_margin,
            worst_point,
            pass: parts.iter().all(|p| p.pass),
            parts,
        }
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{:<24} grid={:<8} worst_margin={:+.6e} {}",
            self.name,
            self.grid_size,
            self.worst_margin,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

fn is_worse(candidate: f64, current: f64) -> bool {
    candidate.is_nan() && !current.is_nan() || candidate < current
}

/// Grid resolution shared by all checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub points: usize,
    pub max_n: usize,
    pub max_size: u32,
    pub margin_tolerance: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { points: 64, max_n: 200, max_size: 200, margin_tolerance: DEFAULT_MARGIN_TOLERANCE }
    }
}

type Point = Vec<(&'static str, f64)>;

/// Evaluates `margin` at every point in parallel and keeps the first worst
/// one in grid order.
fn sweep<P, F>(name: &str, grid: &GridSpec, points: &[P], margin: F) -> CheckReport
where
    P: Sync,
    F: Fn(&P) -> (f64, Point) + Sync,
{
    let evaluated: Vec<(f64, Point)> = points.par_iter().map(&margin).collect();
    let mut worst = (f64::INFINITY, Vec::new());
    for (m, p) in evaluated {
        if is_worse(m, worst.0) {
            worst = (m, p);
        }
    }
    let point = worst.1.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    CheckReport::with_tolerance(name, points.len(), worst.0, point, grid.margin_tolerance)
}

fn sizes(lo: u32, hi: u32) -> Vec<u32> {
    (lo..=hi).collect()
}

fn tau_grid(grid: &GridSpec) -> Vec<f64> {
    open_left_grid(0.0, 4.0, grid.points)
}

// --- Two-sided estimate of u_n ---------------------------------------------

/// `ln u_n(t)` for `t > 2` as a sum of logs of successive ratios
/// `a_j = t - 1/a_{j-1}`, `a_0 = t`.
fn log_u_by_ratios(n: usize, t: f64) -> f64 {
    let mut a = t;
    let mut log_u = 0.0;
    for _ in 0..n {
        log_u += a.ln();
        a = t - 1.0 / a;
    }
    log_u
}

/// `min(u_n - t q^{-(n-1)}, q^{-n}/(1-q^2) - u_n)`.
pub fn encadrement_margin(n: usize, t: f64) -> Result<f64> {
    let (lo, hi) = log_encadrement_bounds(n, t)?;
    let u = log_u_by_ratios(n, t).exp();
    Ok((u - lo.exp()).min(hi.exp() - u))
}

/// Relative margins `min(1 - lower/u_n, upper/u_n - 1)` over `n <= max_n`
/// and a log grid of `t` in `[2.001, 50]`.
///
/// With `u_n = a_0 ... a_{n-1}` the two ratios are
/// `lower/u_n = prod_{j=1}^{n-1} 1/(q a_j)` and
/// `upper/u_n = lower/u_n / (q t (1 - q^2))`; each factor is close to one,
/// so the products are accumulated as sums of `ln1p`.
pub fn verify_encadrement(grid: &GridSpec) -> CheckReport {
    let ts = log_grid(2.001, 50.0, grid.points);
    let points: Vec<(usize, f64)> = (1..=grid.max_n).flat_map(|n| ts.iter().map(move |&t| (n, t))).collect();
    sweep("encadrement", grid, &points, |&(n, t)| {
        let q = q_param(t).expect("grid inside domain");
        let mut a = t;
        let mut log_lower_ratio = 0.0;
        for _ in 1..n {
            a = t - 1.0 / a;
            log_lower_ratio -= (q * a - 1.0).ln_1p();
        }
        let log_upper_ratio = log_lower_ratio - (q * t).ln() - (-q * q).ln_1p();
        let margin = (-log_lower_ratio.exp_m1()).min(log_upper_ratio.exp_m1());
        (margin, vec![("n", n as f64), ("t", t)])
    })
}

// --- q-inequalities for the Kac walk ----------------------------------------

/// Margins of `q(N)/q(N-tau) <= (N-tau)/N`, `q(N) > 1/N` and
/// `N ln(1 - tau/N) <= -tau`.
pub fn various_bounds_margins(size: u32, tau: f64) -> Result<[f64; 3]> {
    let n = size as f64;
    let ratio = (n - tau) / n - q_param(n)? / q_param(n - tau)?;
    let inverse = q_param(n)? - 1.0 / n;
    let log = -tau - n * (-tau / n).ln_1p();
    Ok([ratio, inverse, log])
}

pub fn verify_various_bounds(grid: &GridSpec) -> CheckReport {
    let taus = tau_grid(grid);
    let pairs: Vec<(u32, f64)> = sizes(4, grid.max_size)
        .into_iter()
        .flat_map(|n| taus.iter().map(move |&tau| (n, tau)))
        .filter(|&(n, tau)| n as f64 - tau > 2.0)
        .collect();
    let ratio = sweep("q-ratio", grid, &pairs, |&(n, tau)| {
        let m = various_bounds_margins(n, tau).expect("grid inside domain")[0];
        (m, vec![("N", n as f64), ("tau", tau)])
    });
    let ns = sizes(4, grid.max_size);
    let inverse = sweep("q-inverse", grid, &ns, |&n| {
        (q_param(n as f64).expect("N >= 4") - 1.0 / n as f64, vec![("N", n as f64)])
    });
    let log = sweep("log-linear", grid, &pairs, |&(n, tau)| {
        let m = various_bounds_margins(n, tau).expect("grid inside domain")[2];
        (m, vec![("N", n as f64), ("tau", tau)])
    });
    CheckReport::combine("various-bounds", vec![ratio, inverse, log])
}

/// `(q(N-tau)(1 - q(N-tau)^2), e^{tau/N}/N)`.
pub fn hard_lower_sides(size: u32, tau: f64) -> Result<(f64, f64)> {
    let n = size as f64;
    let q = q_param(n - tau)?;
    Ok((q * (1.0 - q * q), (tau / n).exp() / n))
}

pub fn verify_hard_lower(grid: &GridSpec) -> CheckReport {
    let points: Vec<(u32, f64)> = tau_grid(grid)
        .into_iter()
        .flat_map(|tau| {
            let first = (tau + cap_c(tau).expect("tau in (0, 4]")).ceil().max(4.0) as u32;
            sizes(first, grid.max_size).into_iter().map(move |n| (n, tau))
        })
        .collect();
    sweep("hard-lower", grid, &points, |&(n, tau)| {
        let (lhs, rhs) = hard_lower_sides(n, tau).expect("grid inside domain");
        (lhs - rhs, vec![("N", n as f64), ("tau", tau)])
    })
}

/// `f(t) = tau^2 / (2t(t+tau)^2)` and `g(t) = (16/5) / (t^3 (t^2 - 4))`.
pub fn three_functions_sides(tau: f64, t: f64) -> (f64, f64) {
    let f = tau * tau / (2.0 * t * (t + tau).powi(2));
    let g = 3.2 / (t.powi(3) * (t * t - 4.0));
    (f, g)
}

/// `f - g` on `t` in `[C(tau), 1000 C(tau)]`.
pub fn verify_three_functions(grid: &GridSpec) -> CheckReport {
    let points: Vec<(f64, f64)> = tau_grid(grid)
        .into_iter()
        .flat_map(|tau| {
            let c = cap_c(tau).expect("tau in (0, 4]");
            log_grid(c, 1000.0 * c, grid.points).into_iter().map(move |t| (tau, t))
        })
        .collect();
    sweep("three-functions", grid, &points, |&(tau, t)| {
        let (f, g) = three_functions_sides(tau, t);
        (f - g, vec![("tau", tau), ("t", t)])
    })
}

// --- Mixed rotations ----------------------------------------------------------

/// `(|phi_{N-tau}(n)|^{N ln N / tau}, 1/d_n)` for the free orthogonal family.
pub fn mixed_lemma_sides(size: u32, tau: f64, n: usize) -> (f64, f64) {
    let (lhs, rhs) = mixed_lemma_log_sides(size, tau, n);
    (lhs.exp(), rhs.exp())
}

fn mixed_lemma_log_sides(size: u32, tau: f64, n: usize) -> (f64, f64) {
    let big = size as f64;
    let log_d = log_abs_cheb_u(n, big);
    let log_phi = log_abs_cheb_u(n, big - tau) - log_d;
    (big * big.ln() / tau * log_phi, -log_d)
}

/// `(sum_{n>=1} d_n^{-lambda/ln N}` with certified tail, `e^{-lambda/2}/(1 - e^{-lambda/2}))`.
pub fn geometric_sum_sides(size: u32, lambda: f64) -> (f64, f64) {
    let big = size as f64;
    let exponent = lambda / big.ln();
    let env = Envelope::inverse_chebyshev(big).pow(exponent);
    let mut log_sum = f64::NEG_INFINITY;
    let mut log_tail = f64::INFINITY;
    for n in 1..=20_000 {
        log_sum = log_add_exp(log_sum, -exponent * log_abs_cheb_u(n, big));
        log_tail = env.log_tail(n + 1, 1);
        if log_tail < log_sum - 40.0 {
            break;
        }
    }
    let half = -0.5 * lambda;
    (log_add_exp(log_sum, log_tail).exp(), half.exp() / -half.exp_m1())
}

pub fn verify_mixed_lemma(grid: &GridSpec) -> CheckReport {
    let taus = tau_grid(grid);
    let per_character: Vec<(u32, f64, usize)> = sizes(3, grid.max_size)
        .into_iter()
        .flat_map(|size| taus.iter().map(move |&tau| (size, tau)))
        .filter(|&(size, tau)| size as f64 >= tau + cap_c(tau).expect("tau in (0, 4]"))
        .flat_map(|(size, tau)| (1..=50).map(move |n| (size, tau, n)))
        .collect();
    let power = sweep("character-power", grid, &per_character, |&(size, tau, n)| {
        let (lhs, rhs) = mixed_lemma_log_sides(size, tau, n);
        // Relative margin 1 - lhs/rhs.
        (-(lhs - rhs).exp_m1(), vec![("N", size as f64), ("tau", tau), ("n", n as f64)])
    });
    let lambdas = log_grid(0.1, 20.0, grid.points);
    let per_lambda: Vec<(u32, f64)> = sizes(3, grid.max_size)
        .into_iter()
        .flat_map(|size| lambdas.iter().map(move |&l| (size, l)))
        .collect();
    let sum = sweep("dimension-sum", grid, &per_lambda, |&(size, lambda)| {
        let (lhs, rhs) = geometric_sum_sides(size, lambda);
        (rhs - lhs, vec![("N", size as f64), ("lambda", lambda)])
    });
    CheckReport::combine("mixed-lemma", vec![power, sum])
}

// --- Identities and spot values ---------------------------------------------

/// `(q(1 - q^2), 2q - t^2 q + t)` at `q = q(t)`.
pub fn q_identity_sides(t: f64) -> Result<(f64, f64)> {
    let q = q_param(t)?;
    Ok((q * (1.0 - q * q), 2.0 * q - t * t * q + t))
}

/// `f(t) = (t + 1)(t - sqrt(t^2 - 4))`.
pub fn transposition_f(t: f64) -> f64 {
    (t + 1.0) * (t - ((t - 2.0) * (t + 2.0)).sqrt())
}

fn ratio_sequence(t: f64, len: usize) -> Vec<f64> {
    let mut a = t;
    (0..len)
        .map(|_| {
            let out = a;
            a = t - 1.0 / a;
            out
        })
        .collect()
}

/// The stated range `t - 1/t <= a_n(t) <= t` of `a_n = u_{n+1}/u_n`.
fn literal_ratio_check(grid: &GridSpec) -> CheckReport {
    let ts = log_grid(2.01, 10.0, grid.points);
    let points: Vec<(f64, usize)> = ts.iter().flat_map(|&t| (0..=grid.max_n).map(move |n| (t, n))).collect();
    sweep("ratio-range-literal", grid, &points, |&(t, n)| {
        let a = ratio_sequence(t, n + 1)[n];
        ((a - (t - 1.0 / t)).min(t - a), vec![("t", t), ("n", n as f64)])
    })
}

/// `t - q(t) < a_n(t) <= t`, the range that holds for every `n`.
pub fn verify_chebyshev_ratio_range(grid: &GridSpec) -> CheckReport {
    let ts = log_grid(2.01, 10.0, grid.points);
    let points: Vec<(f64, usize)> = ts.iter().flat_map(|&t| (0..=grid.max_n).map(move |n| (t, n))).collect();
    sweep("ratio-range", grid, &points, |&(t, n)| {
        let a = ratio_sequence(t, n + 1)[n];
        let q = q_param(t).expect("t > 2");
        ((a - (t - q)).min(t - a), vec![("t", t), ("n", n as f64)])
    })
}

/// `|v_n(N-2)/v_n(N)|` is non-increasing in `n <= 500` for each `N`.
fn ratio_monotonicity_check(grid: &GridSpec) -> CheckReport {
    let points: Vec<(u32, usize)> =
        sizes(4, grid.max_size).into_iter().flat_map(|size| (1..500).map(move |n| (size, n))).collect();
    sweep("transposition-ratio", grid, &points, |&(size, n)| {
        let big = size as f64;
        let (s, d) = ((big - 2.0).sqrt(), big.sqrt());
        let log_ratio = |m: usize| log_abs_cheb_u(2 * m, s) - log_abs_cheb_u(2 * m, d);
        (log_ratio(n) - log_ratio(n + 1), vec![("N", big), ("n", n as f64)])
    })
}

pub fn verify_misc_identities(grid: &GridSpec) -> CheckReport {
    let ts = log_grid(2.001, 50.0, grid.points);
    let identity = sweep("q-identity", grid, &ts, |&t| {
        let (lhs, rhs) = q_identity_sides(t).expect("t > 2");
        (1e-10 - (lhs - rhs).abs(), vec![("t", t)])
    });
    let spot = CheckReport::with_tolerance(
        "f(14)",
        1,
        2.5 - transposition_f(14.0),
        vec![("t".into(), 14.0), ("f".into(), transposition_f(14.0))],
        grid.margin_tolerance,
    );
    CheckReport::combine(
        "misc-identities",
        vec![identity, literal_ratio_check(grid), ratio_monotonicity_check(grid), spot],
    )
}

/// Orthonormality of the first 31 characters on both spectral measures.
pub fn verify_orthonormality(ctx: &NumericContext) -> CheckReport {
    let parts =
        [GroupFamily::free_orthogonal(10).expect("valid"), GroupFamily::free_symmetric(10).expect("valid")]
            .iter()
            .map(|g| orthonormality_check(g, 30, ctx))
            .collect();
    CheckReport::combine("orthonormality", parts)
}

/// Names accepted by [`run_check`], in report order.
pub const CHECK_NAMES: [&str; 8] = [
    "encadrement",
    "various-bounds",
    "hard-lower",
    "three-functions",
    "mixed-lemma",
    "misc-identities",
    "ratio-range",
    "orthonormality",
];

pub fn run_check(name: &str, grid: &GridSpec, ctx: &NumericContext) -> Result<CheckReport> {
    Ok(match name {
        "encadrement" => verify_encadrement(grid),
        "various-bounds" => verify_various_bounds(grid),
        "hard-lower" => verify_hard_lower(grid),
        "three-functions" => verify_three_functions(grid),
        "mixed-lemma" => verify_mixed_lemma(grid),
        "misc-identities" => verify_misc_identities(grid),
        "ratio-range" => verify_chebyshev_ratio_range(grid),
        "orthonormality" => verify_orthonormality(ctx),
        other => return Err(domain(format!("unknown check `{other}`"))),
    })
}

pub fn run_all(grid: &GridSpec, ctx: &NumericContext) -> Vec<CheckReport> {
    CHECK_NAMES.iter().map(|name| run_check(name, grid, ctx).expect("known name")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small() -> GridSpec {
        GridSpec { points: 8, max_n: 30, max_size: 30, ..GridSpec::default() }
    }

    #[test]
    fn encadrement_spots() {
        assert_eq!(encadrement_margin(1, 3.7).unwrap(), 0.0);
        assert_relative_eq!(encadrement_margin(2, 3.0).unwrap(), 0.0249, epsilon = 1e-4);
        assert!(verify_encadrement(&small()).pass);
    }

    #[test]
    fn various_bounds_spots() {
        let m = various_bounds_margins(10, 4.0).unwrap();
        assert_relative_eq!(m[0], 0.0112, epsilon = 1e-4);
        assert_relative_eq!(m[1], 0.00102, epsilon = 1e-5);
        assert!(various_bounds_margins(10, 1e-6).unwrap()[2] < 1e-12);
        assert!(verify_various_bounds(&small()).pass);
    }

    #[test]
    fn hard_lower_spots() {
        let (lhs, rhs) = hard_lower_sides(8, 4.0).unwrap();
        assert_relative_eq!(lhs - rhs, 0.042_621, epsilon = 1e-6);
        let (a, b) = hard_lower_sides(1000, 4.0).unwrap();
        assert!(a > b && a - b < lhs - rhs);
    }

    #[test]
    fn three_functions_at_threshold() {
        let c = cap_c(4.0).unwrap();
        let (f, g) = three_functions_sides(4.0, c);
        assert!(f >= g);
    }

    #[test]
    fn mixed_lemma_spots() {
        let (lhs, rhs) = mixed_lemma_sides(8, 4.0, 1);
        assert_relative_eq!(lhs, 0.0559, epsilon = 1e-4);
        assert_relative_eq!(rhs, 0.125, epsilon = 1e-15);
        let (sum, bound) = geometric_sum_sides(10, 2.0);
        assert_relative_eq!(bound, 0.58198, epsilon = 1e-5);
        assert!(sum <= bound);
    }

    #[test]
    fn misc_spots() {
        let (lhs, rhs) = q_identity_sides(5.0).unwrap();
        assert_relative_eq!(lhs, 0.19962, epsilon = 1e-5);
        assert!((lhs - rhs).abs() < 1e-10);
        assert_relative_eq!(transposition_f(14.0), 2.1539, epsilon = 1e-4);
        assert!(verify_chebyshev_ratio_range(&small()).pass);
    }

    #[test]
    fn literal_ratio_range_fails_at_second_index() {
        let a = ratio_sequence(3.0, 3);
        assert_relative_eq!(a[2], 21.0 / 8.0, epsilon = 1e-15);
        assert!(a[2] < 3.0 - 1.0 / 3.0);
        assert!(!literal_ratio_check(&small()).pass);
    }

    #[test]
    fn combine_keeps_worst_part() {
        let a = CheckReport::leaf("a", 2, 0.5, vec![]);
        let b = CheckReport::leaf("b", 3, -1.0, vec![("x".into(), 1.0)]);
        let c = CheckReport::combine("c", vec![a, b]);
        assert_eq!(c.grid_size, 5);
        assert_eq!(c.worst_margin, -1.0);
        assert!(!c.pass);
        assert!(CheckReport::leaf("t", 1, -1e-13, vec![]).pass);
    }

    #[test]
    fn unknown_check_is_rejected() {
        assert!(run_check("nope", &small(), &NumericContext::default()).is_err());
    }
}
