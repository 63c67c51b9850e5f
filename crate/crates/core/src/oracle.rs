//! Reference values computed independently of the bounds: spectral measures
//! of the fundamental character and the exact total variation distance,
//! obtained by integrating the density of `phi^{*k}` against the Haar state.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use serde::Serialize;

use crate::envelope::Envelope;
use crate::error::{Error, Result};
use crate::kernel::{cheb_u_table, GroupFamily, NumericContext};
use crate::numeric::CompensatedSum;
use crate::states::{CentralState, CharacterTable};
use crate::verify::CheckReport;

const ORTHONORMALITY_TOLERANCE: f64 = 1e-10;
const BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureKind {
    /// Semicircle law on `[-2, 2]`, spectrum of the free orthogonal character.
    Semicircle,
    /// Free Poisson law on `[0, 4]`, the pushforward of the semicircle by `y^2`.
    FreePoisson,
}

impl MeasureKind {
    pub fn for_group(g: &GroupFamily) -> Self {
        if g.has_even_characters() {
            MeasureKind::FreePoisson
        } else {
            MeasureKind::Semicircle
        }
    }
}

/// A Gauss rule for a spectral measure.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    kind: MeasureKind,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl SpectralMeasure {
    /// `order`-point rule with nodes `2 cos(j pi / (order + 1))`, exact up
    /// to degree `2 order - 1`.
    pub fn semicircle(order: usize) -> Self {
        let m = (order + 1) as f64;
        let (nodes, weights) = (1..=order)
            .map(|j| {
                let a = j as f64 * PI / m;
                (2.0 * a.cos(), 2.0 / m * a.sin().powi(2))
            })
            .unzip();
        SpectralMeasure { kind: MeasureKind::Semicircle, nodes, weights }
    }

    /// `order`-point rule folded from the `2 order`-point semicircle rule,
    /// exact up to degree `2 order - 1` in `x`.
    pub fn free_poisson(order: usize) -> Self {
        let base = Self::semicircle(2 * order);
        let nodes = base.nodes[..order].iter().map(|y| y * y).collect();
        let weights = base.weights[..order].iter().map(|w| 2.0 * w).collect();
        SpectralMeasure { kind: MeasureKind::FreePoisson, nodes, weights }
    }

    pub fn for_group(g: &GroupFamily, order: usize) -> Self {
        match MeasureKind::for_group(g) {
            MeasureKind::Semicircle => Self::semicircle(order),
            MeasureKind::FreePoisson => Self::free_poisson(order),
        }
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).collect::<CompensatedSum>().total()
    }

    pub fn moment(&self, p: u32) -> f64 {
        self.integrate(|x| x.powi(p as i32))
    }

    /// Values of the first `len` orthonormal polynomials at `x`.
    fn orthonormal_values(&self, x: f64, len: usize) -> Vec<f64> {
        match self.kind {
            MeasureKind::Semicircle => cheb_u_table(x, len),
            MeasureKind::FreePoisson => {
                let mut out = Vec::with_capacity(len);
                let (mut prev, mut cur) = (0.0, 1.0);
                for n in 0..len {
                    out.push(cur);
                    let next = if n == 0 { x - 1.0 } else { (x - 2.0) * cur - prev };
                    prev = cur;
                    cur = next;
                }
                out
            }
        }
    }
}

/// Gauss rule for the spectral measure of `g` at the context's order.
pub fn spectral_measure(g: &GroupFamily, ctx: &NumericContext) -> SpectralMeasure {
    SpectralMeasure::for_group(g, ctx.quad_order())
}

/// Largest entry of `|G - I|` for the Gram matrix of the first `max_n + 1`
/// character polynomials.
pub fn orthonormality_deviation(g: &GroupFamily, max_n: usize, ctx: &NumericContext) -> f64 {
    let len = max_n + 1;
    let rule = SpectralMeasure::for_group(g, ctx.quad_order().max(len));
    let values: Vec<Vec<f64>> = rule.nodes.iter().map(|&x| rule.orthonormal_values(x, len)).collect();
    let mut worst: f64 = 0.0;
    for m in 0..len {
        for n in m..len {
            let gram: CompensatedSum =
                values.iter().zip(&rule.weights).map(|(v, &w)| w * v[m] * v[n]).collect();
            let target = if m == n { 1.0 } else { 0.0 };
            worst = worst.max((gram.total() - target).abs());
        }
    }
    worst
}

pub fn orthonormality_check(g: &GroupFamily, max_n: usize, ctx: &NumericContext) -> CheckReport {
    let deviation = orthonormality_deviation(g, max_n, ctx);
    CheckReport::leaf(
        format!("orthonormality {g}"),
        (max_n + 1) * (max_n + 2) / 2,
        ORTHONORMALITY_TOLERANCE - deviation,
        vec![("max_n".into(), max_n as f64), ("deviation".into(), deviation)],
    )
}

/// `density(x) = sum_n c_n P_n(x)` of `phi^{*k}` against the Haar state,
/// truncated where the remainder is certified small.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityExpansion {
    /// `c_0 = 1` followed by `c_n = d_n phi(n)^k`.
    pub coefficients: Vec<f64>,
    /// Bound on the `L^1` norm of the dropped remainder.
    pub tail_bound: f64,
    pub convergent: bool,
    pub step: usize,
}

impl DensityExpansion {
    /// Number of retained terms beyond `c_0`.
    pub fn terms(&self) -> usize {
        self.coefficients.len() - 1
    }
}

pub fn density_coeffs(s: &CentralState, k: u32, ctx: &NumericContext) -> DensityExpansion {
    let table = s.character_table(ctx.max_terms() + 1);
    density_with_table(s, &table, k, ctx)
}

fn density_with_table(
    s: &CentralState,
    table: &CharacterTable,
    k: u32,
    ctx: &NumericContext,
) -> DensityExpansion {
    let step = s.group().degree_step();
    if s.is_haar() {
        return DensityExpansion { coefficients: vec![1.0], tail_bound: 0.0, convergent: true, step };
    }
    let coefficient = |n: usize| {
        let p = table.power(n, k);
        if p.is_zero() {
            0.0
        } else {
            p.sign * (table.log_dim[n] + p.log).exp()
        }
    };
    if k == 0 || !s.boundedness_threshold().is_reached_by(k) {
        let shown = table.len().min(16);
        let mut coefficients = vec![1.0];
        coefficients.extend((1..shown).map(coefficient));
        return DensityExpansion { coefficients, tail_bound: f64::INFINITY, convergent: false, step };
    }
    let kk = k as f64;
    let numerator = s.numerator_envelope();
    let inverse = Envelope::inverse_chebyshev(s.group().dimension_argument());
    let sup_env = numerator.pow(kk) * inverse.pow(kk - 1.0) * Envelope::polynomial(1.0);
    let l2_env = numerator.pow(2.0 * kk) * inverse.pow(2.0 * kk - 2.0);

    let mut coefficients = vec![1.0];
    let mut square_sum = CompensatedSum::new();
    let mut tail = f64::INFINITY;
    for n in 1..table.len() {
        let c = coefficient(n);
        coefficients.push(c);
        square_sum.add(c * c);
        let first = step * (n + 1);
        let sup_tail = sup_env.log_tail(first, step).exp();
        let l2_tail = (0.5 * l2_env.log_tail(first, step)).exp();
        tail = sup_tail.min(l2_tail);
        let scale = square_sum.total().sqrt();
        if tail <= 0.1 * ctx.abs_tol().max(ctx.rel_tol() * scale) {
            break;
        }
    }
    DensityExpansion { coefficients, tail_bound: tail, convergent: tail.is_finite(), step }
}

/// Value of the exact distance with a bound on its total numerical error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TvEstimate {
    pub value: f64,
    pub error_bar: f64,
    pub terms: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ExactTv {
    Converged(TvEstimate),
    /// `phi^{*k}` has no square-integrable density.
    Divergent,
}

impl ExactTv {
    pub fn estimate(&self) -> Option<TvEstimate> {
        match self {
            ExactTv::Converged(e) => Some(*e),
            ExactTv::Divergent => None,
        }
    }
}

/// `||phi^{*k} - h||_TV = (1/2) int |density - 1| dh`.
pub fn exact_tv(s: &CentralState, k: u32, ctx: &NumericContext) -> Result<ExactTv> {
    let table = s.character_table(ctx.max_terms() + 1);
    exact_tv_with_table(s, &table, k, ctx)
}

pub(crate) fn exact_tv_with_table(
    s: &CentralState,
    table: &CharacterTable,
    k: u32,
    ctx: &NumericContext,
) -> Result<ExactTv> {
    if k == 0 {
        return Err(Error::Domain("k must be >= 1".into()));
    }
    let expansion = density_with_table(s, table, k, ctx);
    if !s.boundedness_threshold().is_reached_by(k) {
        return Ok(ExactTv::Divergent);
    }
    if !expansion.convergent {
        return Err(Error::NonConvergence(ctx.max_terms()));
    }
    if expansion.terms() == 0 {
        return Ok(ExactTv::Converged(TvEstimate { value: 0.0, error_bar: 0.0, terms: 0 }));
    }
    let integral = integrate_abs(&expansion, ctx.quad_order());
    let norm_sum: f64 = expansion.coefficients[1..]
        .iter()
        .enumerate()
        .map(|(i, c)| c.abs() * (expansion.step * (i + 1) + 1) as f64)
        .sum();
    let degree = expansion.step * expansion.terms();
    let rounding = 4.0 * f64::EPSILON * (degree + 1) as f64 * norm_sum;
    let value = integral.value / PI;
    let error_bar = 0.5 * expansion.tail_bound + integral.discrepancy / PI + rounding;
    let tol = error_bar + 1e-12;
    if !(value >= -tol && value <= 1.0 + tol) {
        return Err(Error::NumericFailure(format!(
            "total variation {value} outside [0, 1] beyond error bar {error_bar}"
        )));
    }
    Ok(ExactTv::Converged(TvEstimate { value, error_bar, terms: expansion.terms() }))
}

/// Truncated density minus one, as a function of `theta` with `y = 2 cos theta`.
struct Remainder<'a> {
    coefficients: &'a [f64],
    even: bool,
}

impl Remainder<'_> {
    fn at(&self, theta: f64) -> f64 {
        let y = 2.0 * theta.cos();
        let (alpha, first) = if self.even { (y * y - 2.0, y * y - 1.0) } else { (y, y) };
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coefficients[1..].iter().rev() {
            let b0 = c + alpha * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        first * b1 - b2
    }
}

struct AbsIntegral {
    value: f64,
    discrepancy: f64,
}

/// `int_0^pi |F(2 cos theta)| sin^2 theta d theta`, split at sign changes of
/// `F` and integrated piecewise at two Gauss-Legendre orders.
fn integrate_abs(expansion: &DensityExpansion, order: usize) -> AbsIntegral {
    let remainder = Remainder { coefficients: &expansion.coefficients, even: expansion.step == 2 };
    let degree = expansion.step * expansion.terms();
    // The even family is symmetric under theta -> pi - theta.
    let (end, fold) = if remainder.even { (0.5 * PI, 2.0) } else { (PI, 1.0) };
    let cells = (4 * (degree + 2)).max(64);
    let h = end / cells as f64;
    let mut breaks = vec![0.0];
    let mut prev = remainder.at(0.0);
    for i in 1..=cells {
        let x = if i == cells { end } else { i as f64 * h };
        let v = remainder.at(x);
        if prev != 0.0 && v != 0.0 && prev.signum() != v.signum() {
            breaks.push(bisect(&remainder, x - h, x, prev));
        }
        if v != 0.0 {
            prev = v;
        }
    }
    breaks.push(end);

    let quad = |n: usize| GaussLegendre::new(NonZeroUsize::new(n.max(2)).expect("nonzero"));
    let fine = quad(order);
    let coarse = quad(order / 2);
    let max_width = PI / (degree + 2) as f64;
    let mut total = CompensatedSum::new();
    let mut discrepancy = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let pieces = ((b - a) / max_width).ceil().max(1.0) as usize;
        let width = (b - a) / pieces as f64;
        let sign = remainder.at(0.5 * (a + b)).signum();
        let integrand = |t: f64| sign * remainder.at(t) * t.sin().powi(2);
        for p in 0..pieces {
            let lo = a + p as f64 * width;
            let hi = if p + 1 == pieces { b } else { lo + width };
            let f = fine.integrate(lo, hi, integrand);
            let c = coarse.integrate(lo, hi, integrand);
            total.add(fold * f);
            discrepancy += fold * (f - c).abs();
        }
    }
    AbsIntegral { value: total.total(), discrepancy }
}

fn bisect(f: &Remainder<'_>, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let lo_sign = f_lo.signum();
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f.at(mid);
        if v == 0.0 {
            return mid;
        }
        if v.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
