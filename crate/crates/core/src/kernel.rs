//! Dilated Chebyshev polynomials, the `q` parametrisation, representation
//! dimensions and the scalar thresholds.
//!
//! `u_n(x) = U_n(x/2)` obeys `u_{n+1} = x u_n - u_{n-1}` with `u_0 = 1`,
//! `u_1 = x`. The even family `v_n(x) = u_{2n}(sqrt x)` obeys
//! `v_{n+1} = (x - 2) v_n - v_{n-1}` with `v_0 = 1`, `v_1 = x - 1`.
//! For `t > 2`, writing `t = q + 1/q` with `0 < q < 1`,
//! `u_n(t) = (q^{-n-1} - q^{n+1}) / (q^{-1} - q)`.

use std::f64::consts::LN_10;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::numeric::SignedLog;

/// Above this log-magnitude `cheb_u` switches from the recursion to the
/// closed form.
const LOG_OVERFLOW: f64 = 300.0 * LN_10;

/// Threshold quotients within this distance of an integer round upward.
const TIE_WINDOW: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupKind {
    FreeOrthogonal,
    FreeSymmetric,
    QuantumAutomorphism,
}

impl GroupKind {
    pub const ALL: [GroupKind; 3] =
        [GroupKind::FreeOrthogonal, GroupKind::FreeSymmetric, GroupKind::QuantumAutomorphism];

    pub fn min_size(self) -> u32 {
        match self {
            GroupKind::FreeOrthogonal => 3,
            GroupKind::FreeSymmetric => 4,
            GroupKind::QuantumAutomorphism => 2,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            GroupKind::FreeOrthogonal => "oplus",
            GroupKind::FreeSymmetric => "splus",
            GroupKind::QuantumAutomorphism => "aut",
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for GroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "oplus" | "o+" | "free-orthogonal" => Ok(GroupKind::FreeOrthogonal),
            "splus" | "s+" | "free-symmetric" => Ok(GroupKind::FreeSymmetric),
            "aut" | "quantum-automorphism" => Ok(GroupKind::QuantumAutomorphism),
            other => Err(Error::InvalidGroup(format!("unknown group family `{other}`"))),
        }
    }
}

/// A quantum group family together with its size `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GroupFamily {
    kind: GroupKind,
    size: u32,
}

impl GroupFamily {
    pub fn new(kind: GroupKind, size: u32) -> Result<Self> {
        if size < kind.min_size() {
            return Err(Error::InvalidGroup(format!("{kind} requires N >= {}, got {size}", kind.min_size())));
        }
        Ok(GroupFamily { kind, size })
    }

    pub fn free_orthogonal(size: u32) -> Result<Self> {
        Self::new(GroupKind::FreeOrthogonal, size)
    }

    pub fn free_symmetric(size: u32) -> Result<Self> {
        Self::new(GroupKind::FreeSymmetric, size)
    }

    pub fn quantum_automorphism(size: u32) -> Result<Self> {
        Self::new(GroupKind::QuantumAutomorphism, size)
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    /// `N` for the free orthogonal and free symmetric families, `N^2` for
    /// quantum automorphisms.
    pub fn carrier(&self) -> f64 {
        let n = self.size as f64;
        match self.kind {
            GroupKind::QuantumAutomorphism => n * n,
            _ => n,
        }
    }

    /// True when characters are the even family `v_n`.
    pub fn has_even_characters(&self) -> bool {
        self.kind != GroupKind::FreeOrthogonal
    }

    /// Degree of the `u` polynomial carrying the `n`-th character: `n` or `2n`.
    pub fn degree_step(&self) -> usize {
        if self.has_even_characters() {
            2
        } else {
            1
        }
    }

    /// The `D` with `d_n = u_{step n}(D)`.
    pub fn dimension_argument(&self) -> f64 {
        match self.kind {
            GroupKind::FreeSymmetric => (self.size as f64).sqrt(),
            _ => self.size as f64,
        }
    }

    pub fn dim(&self, n: usize) -> f64 {
        dim(self, n)
    }

    pub fn log_dim(&self, n: usize) -> f64 {
        log_abs_cheb_u(self.degree_step() * n, self.dimension_argument())
    }

    /// Sup norm of the `n`-th character on the spectrum of the fundamental
    /// character: `n + 1`, or `2n + 1` for the even family.
    pub fn character_norm(&self, n: usize) -> f64 {
        (self.degree_step() * n + 1) as f64
    }
}

impl fmt::Display for GroupFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(N={})", self.kind, self.size)
    }
}

/// Tolerances and series limits used by every numerical routine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumericContext {
    rel_tol: f64,
    abs_tol: f64,
    max_terms: usize,
    quad_order: usize,
}

impl Default for NumericContext {
    fn default() -> Self {
        NumericContext { rel_tol: 1e-10, abs_tol: 1e-14, max_terms: 4000, quad_order: 32 }
    }
}

impl NumericContext {
    pub fn new(rel_tol: f64, abs_tol: f64, max_terms: usize, quad_order: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol.is_finite()) || !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(Error::InvalidContext("tolerances must be finite and positive".into()));
        }
        if max_terms < 8 {
            return Err(Error::InvalidContext(format!("max terms must be >= 8, got {max_terms}")));
        }
        if quad_order < 16 {
            return Err(Error::InvalidContext(format!("quadrature order must be >= 16, got {quad_order}")));
        }
        Ok(NumericContext { rel_tol, abs_tol, max_terms, quad_order })
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Result<Self> {
        Self::new(rel_tol, self.abs_tol, self.max_terms, self.quad_order)
    }

    pub fn with_abs_tol(self, abs_tol: f64) -> Result<Self> {
        Self::new(self.rel_tol, abs_tol, self.max_terms, self.quad_order)
    }

    pub fn with_max_terms(self, max_terms: usize) -> Result<Self> {
        Self::new(self.rel_tol, self.abs_tol, max_terms, self.quad_order)
    }

    pub fn with_quad_order(self, quad_order: usize) -> Result<Self> {
        Self::new(self.rel_tol, self.abs_tol, self.max_terms, quad_order)
    }
}

/// `ln u_n(t)` for `t > 2`, no argument check.
fn log_cheb_u_closed(n: usize, t: f64) -> f64 {
    let a = (0.5 * t).acosh();
    let m = (n + 1) as f64;
    m * a + (-(-2.0 * m * a).exp_m1()).ln() - 0.5 * ((t - 2.0).ln() + (t + 2.0).ln())
}

fn cheb_u_recursion(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    for _ in 1..n {
        let next = x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Dilated Chebyshev polynomial `u_n(x) = U_n(x/2)`.
pub fn cheb_u(n: usize, x: f64) -> f64 {
    match n {
        0 => return 1.0,
        1 => return x,
        _ => {}
    }
    let ax = x.abs();
    if ax > 2.0 {
        let l = log_cheb_u_closed(n, ax);
        if l > LOG_OVERFLOW {
            let v = l.exp();
            return if x < 0.0 && n % 2 == 1 { -v } else { v };
        }
    }
    cheb_u_recursion(n, x)
}

/// `ln u_n(t)` through the closed form in `q(t)`; requires `t > 2`.
pub fn log_cheb_u(n: usize, t: f64) -> Result<f64> {
    if !(t > 2.0) {
        return Err(domain(format!("log_cheb_u needs t > 2, got {t}")));
    }
    Ok(log_cheb_u_closed(n, t))
}

/// `ln |u_n(x)|` for any real `x`; `-inf` at zeros.
pub fn log_abs_cheb_u(n: usize, x: f64) -> f64 {
    let ax = x.abs();
    if ax > 2.0 {
        log_cheb_u_closed(n, ax)
    } else if ax == 2.0 {
        ((n + 1) as f64).ln()
    } else {
        cheb_u_recursion_total(n, x).abs().ln()
    }
}

fn cheb_u_recursion_total(n: usize, x: f64) -> f64 {
    if n == 0 {
        1.0
    } else {
        cheb_u_recursion(n, x)
    }
}

/// `u_n(x)` as sign and log-magnitude.
pub fn signed_log_cheb_u(n: usize, x: f64) -> SignedLog {
    if x.abs() >= 2.0 {
        let sign = if x < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
        SignedLog::new(sign, log_abs_cheb_u(n, x))
    } else {
        SignedLog::from_f64(cheb_u_recursion_total(n, x))
    }
}

/// `u_0(x), ..., u_{len-1}(x)` by the recursion.
pub fn cheb_u_table(x: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let (mut prev, mut cur) = (0.0, 1.0);
    for _ in 0..len {
        out.push(cur);
        let next = x * cur - prev;
        prev = cur;
        cur = next;
    }
    out
}

/// `v_n(x) = u_{2n}(sqrt x)`, evaluated for every real `x` by the
/// real-coefficient recursion.
pub fn cheb_v(n: usize, x: f64) -> f64 {
    match n {
        0 => return 1.0,
        1 => return x - 1.0,
        _ => {}
    }
    if x > 4.0 {
        let l = log_cheb_u_closed(2 * n, x.sqrt());
        if l > LOG_OVERFLOW {
            return l.exp();
        }
    }
    let (mut prev, mut cur) = (1.0, x - 1.0);
    for _ in 1..n {
        let next = (x - 2.0) * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// The smaller root `q(t)` of `q + 1/q = t`, computed as `2/(t + sqrt(t^2 - 4))`.
pub fn q_param(t: f64) -> Result<f64> {
    if !(t >= 2.0) {
        return Err(domain(format!("q(t) needs t >= 2, got {t}")));
    }
    Ok(2.0 / (t + ((t - 2.0) * (t + 2.0)).sqrt()))
}

/// `ln q(t) = -acosh(t/2)`.
pub fn log_q_param(t: f64) -> Result<f64> {
    if !(t >= 2.0) {
        return Err(domain(format!("q(t) needs t >= 2, got {t}")));
    }
    Ok(-(0.5 * t).acosh())
}

/// Dimension `d_n` of the `n`-th irreducible representation, rounded to the
/// nearest integer while it is exactly representable.
pub fn dim(g: &GroupFamily, n: usize) -> f64 {
    let n_real = g.size() as f64;
    let raw = match g.kind() {
        GroupKind::FreeOrthogonal => cheb_u(n, n_real),
        GroupKind::FreeSymmetric => cheb_v(n, n_real),
        GroupKind::QuantumAutomorphism => cheb_v(n, n_real * n_real),
    };
    if raw.abs() < 9.0e15 {
        raw.round()
    } else {
        raw
    }
}

/// Two-sided estimate `t q^{-(n-1)} <= u_n(t) <= q^{-n} / (1 - q^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Encadrement {
    pub lower: f64,
    pub upper: f64,
}

/// Natural logs of the two sides of [`encadrement_bounds`].
pub fn log_encadrement_bounds(n: usize, t: f64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(domain("encadrement needs n >= 1"));
    }
    if !(t >= 2.0) {
        return Err(domain(format!("encadrement needs t >= 2, got {t}")));
    }
    let a = (0.5 * t).acosh();
    let lower = t.ln() + (n - 1) as f64 * a;
    let upper = n as f64 * a - (-(-2.0 * a).exp_m1()).ln();
    Ok((lower, upper))
}

pub fn encadrement_bounds(n: usize, t: f64) -> Result<Encadrement> {
    let (lo, hi) = log_encadrement_bounds(n, t)?;
    Ok(Encadrement { lower: lo.exp(), upper: hi.exp() })
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau <= 4.0 {
        Ok(())
    } else {
        Err(domain(format!("tau must lie in (0, 4], got {tau}")))
    }
}

/// `C(tau) = (2 / (tau sqrt 5)) (2 + sqrt(2 + 9 tau^2))`.
pub fn cap_c(tau: f64) -> Result<f64> {
    check_tau(tau)?;
    Ok(2.0 / (tau * 5f64.sqrt()) * (2.0 + (2.0 + 9.0 * tau * tau).sqrt()))
}

/// Smallest integer `N` with `N >= tau + C(tau)`.
pub fn min_admissible_size(tau: f64) -> Result<u32> {
    Ok((tau + cap_c(tau)?).ceil() as u32)
}

/// Whether `N >= tau + C(tau)`.
pub fn is_admissible(size: u32, tau: f64) -> Result<bool> {
    Ok(size as f64 >= tau + cap_c(tau)?)
}

/// A step count that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepThreshold {
    Finite(u32),
    Infinite,
}

impl StepThreshold {
    pub fn finite(self) -> Option<u32> {
        match self {
            StepThreshold::Finite(k) => Some(k),
            StepThreshold::Infinite => None,
        }
    }

    /// Whether `k` steps reach the threshold.
    pub fn is_reached_by(self, k: u32) -> bool {
        match self {
            StepThreshold::Finite(k0) => k >= k0,
            StepThreshold::Infinite => false,
        }
    }
}

impl fmt::Display for StepThreshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepThreshold::Finite(k) => write!(f, "{k}"),
            StepThreshold::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for StepThreshold {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            StepThreshold::Finite(k) => s.serialize_u32(*k),
            StepThreshold::Infinite => s.serialize_str("inf"),
        }
    }
}

/// `acosh(d/2) - acosh(s/2)` for `2 <= s <= d`, free of cancellation when
/// `s` is close to `d`.
fn acosh_half_gap(s: f64, d: f64) -> f64 {
    let rs = ((s - 2.0) * (s + 2.0)).sqrt();
    let rd = ((d - 2.0) * (d + 2.0)).sqrt();
    let gap = d - s;
    let root_gap = if rs + rd > 0.0 { gap * (d + s) / (rd + rs) } else { 0.0 };
    ((gap + root_gap) / (s + rs)).ln_1p()
}

/// Smallest `k` with `q(s)^k > q(d)^{k-1}`, where `s` is the dominant
/// character argument of a state and `d` the dimension argument.
///
/// Arguments with `|s| <= 2` give 2: one step is a point mass on the
/// spectrum, two steps already have a square-summable density.
pub fn threshold_for_arguments(s: f64, d: f64) -> StepThreshold {
    let s = s.abs();
    if s >= d {
        return StepThreshold::Infinite;
    }
    if s <= 2.0 {
        return StepThreshold::Finite(2);
    }
    let quotient = (0.5 * d).acosh() / acosh_half_gap(s, d);
    let nearest = quotient.round();
    let k = if (quotient - nearest).abs() <= TIE_WINDOW * nearest.max(1.0) {
        nearest + 1.0
    } else {
        quotient.floor() + 1.0
    };
    if k > u32::MAX as f64 {
        StepThreshold::Infinite
    } else {
        StepThreshold::Finite(k as u32)
    }
}

/// Boundedness threshold `k_0` for the pure state of parameter `t`.
///
/// The free orthogonal family compares `q(t)` with `q(N)`; the even
/// families compare `q(sqrt t)` with `q(sqrt carrier)`.
pub fn threshold_k0(g: &GroupFamily, t: f64) -> Result<StepThreshold> {
    if !(t > 2.0) {
        return Err(domain(format!("k0 needs t > 2, got {t}; every power from 2 on has a density")));
    }
    let carrier = g.carrier();
    if t > carrier {
        return Err(domain(format!("t = {t} exceeds the carrier {carrier}")));
    }
    let (s, d) = if g.has_even_characters() { (t.sqrt(), carrier.sqrt()) } else { (t, carrier) };
    Ok(threshold_for_arguments(s, d))
}

/// Cut-off location `k_1 = N ln N / tau`.
pub fn threshold_k1(size: u32, tau: f64) -> Result<f64> {
    if size < 3 {
        return Err(domain(format!("k1 needs N >= 3, got {size}")));
    }
    check_tau(tau)?;
    let n = size as f64;
    Ok(n * n.ln() / tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn chebyshev_small_values() {
        assert_eq!(cheb_u(1, 3.7), 3.7);
        assert_eq!(cheb_u(3, 3.0), 21.0);
        assert_eq!(cheb_u(2, 4.0), 15.0);
        assert_eq!(cheb_u(5, 10.0), 96030.0);
        assert_eq!(cheb_u(0, -9.0), 1.0);
    }

    #[test]
    fn chebyshev_on_the_boundary() {
        for n in 0..50 {
            assert_eq!(cheb_u(n, 2.0), (n + 1) as f64);
            assert_eq!(log_abs_cheb_u(n, -2.0), ((n + 1) as f64).ln());
        }
    }

    #[test]
    fn log_form_matches_examples() {
        assert_relative_eq!(log_cheb_u(1, 5.0).unwrap(), 5f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(log_cheb_u(5, 10.0).unwrap(), 96030f64.ln(), max_relative = 1e-14);
        assert!(log_cheb_u(0, 3.0).unwrap().abs() < 1e-15);
        assert!(log_cheb_u(3, 2.0).is_err());
    }

    #[test]
    fn large_degree_switches_to_closed_form() {
        let v = cheb_u(2000, 3.0);
        assert!(v.is_infinite());
        let w = cheb_u(700, 3.0);
        assert!(w.is_finite());
        assert_relative_eq!(w.ln(), log_cheb_u(700, 3.0).unwrap(), max_relative = 1e-13);
        assert_eq!(cheb_u(701, -3.0).signum(), -1.0);
    }

    #[test]
    fn even_family_values() {
        assert_eq!(cheb_v(0, 1.3), 1.0);
        assert_eq!(cheb_v(1, 5.0), 4.0);
        assert_eq!(cheb_v(2, 5.0), 11.0);
        assert_relative_eq!(cheb_v(2, 5.0), cheb_u(4, 5f64.sqrt()), max_relative = 1e-14);
        assert_eq!(cheb_v(2, -1.0), 5.0);
    }

    #[test]
    fn q_parametrisation() {
        assert_eq!(q_param(2.0).unwrap(), 1.0);
        assert_relative_eq!(q_param(10.0).unwrap(), 0.101_020_514_433_643_8, max_relative = 1e-14);
        let q = q_param(5.0).unwrap();
        assert_relative_eq!(q + 1.0 / q, 5.0, max_relative = 1e-15);
        assert_relative_eq!(q, 0.208_712_152_522_080, max_relative = 1e-12);
        assert!(q_param(1.999).is_err());
        assert!(q_param(f64::NAN).is_err());
    }

    #[test]
    fn dimensions() {
        let o4 = GroupFamily::free_orthogonal(4).unwrap();
        assert_eq!(dim(&o4, 3), 56.0);
        let s5 = GroupFamily::free_symmetric(5).unwrap();
        assert_eq!(dim(&s5, 1), 4.0);
        let a2 = GroupFamily::quantum_automorphism(2).unwrap();
        assert_eq!(dim(&a2, 1), 3.0);
        assert_relative_eq!(a2.log_dim(1), 3f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(s5.log_dim(2), 11f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn group_sizes_are_checked() {
        assert!(GroupFamily::free_orthogonal(2).is_err());
        assert!(GroupFamily::free_symmetric(3).is_err());
        assert!(GroupFamily::quantum_automorphism(1).is_err());
        assert_eq!("splus".parse::<GroupKind>().unwrap(), GroupKind::FreeSymmetric);
        assert!("sun".parse::<GroupKind>().is_err());
    }

    #[test]
    fn encadrement_examples() {
        let e = encadrement_bounds(2, 3.0).unwrap();
        assert!((e.lower - 7.854).abs() < 1e-3 && (e.upper - 8.025).abs() < 1e-3);
        let e = encadrement_bounds(5, 10.0).unwrap();
        assert_relative_eq!(e.lower, 96_019.998_958_550_28, max_relative = 1e-12);
        assert_relative_eq!(e.upper, 96_030.000_000_108_46, max_relative = 1e-12);
        assert!(e.lower <= 96030.0 && 96030.0 <= e.upper);
        let e = encadrement_bounds(1, 7.5).unwrap();
        assert_relative_eq!(e.lower, 7.5, max_relative = 1e-15);
        assert!(encadrement_bounds(4, 2.0).unwrap().upper.is_infinite());
        assert!(encadrement_bounds(4, 1.5).is_err());
    }

    #[test]
    fn admissibility_constants() {
        assert_relative_eq!(cap_c(4.0).unwrap(), 3.1491, epsilon = 1e-4);
        assert_relative_eq!(cap_c(2.0).unwrap(), 3.6513, epsilon = 1e-4);
        assert_eq!(min_admissible_size(4.0).unwrap(), 8);
        assert_eq!(min_admissible_size(2.0).unwrap(), 6);
        assert!(cap_c(1e-9).unwrap() > 1e8);
        assert!(cap_c(0.0).is_err() && cap_c(4.5).is_err());
        assert!(!is_admissible(7, 4.0).unwrap());
        assert!(is_admissible(8, 4.0).unwrap());
    }

    #[test]
    fn boundedness_thresholds() {
        let o10 = GroupFamily::free_orthogonal(10).unwrap();
        let o4 = GroupFamily::free_orthogonal(4).unwrap();
        assert_eq!(threshold_k0(&o10, 8.0).unwrap(), StepThreshold::Finite(11));
        assert_eq!(threshold_k0(&o4, 3.0).unwrap(), StepThreshold::Finite(4));
        assert_eq!(threshold_k0(&o10, 6.0).unwrap(), StepThreshold::Finite(5));
        assert_eq!(threshold_k0(&o10, 10.0).unwrap(), StepThreshold::Infinite);
        assert!(threshold_k0(&o10, 2.0).is_err());
        assert!(threshold_k0(&o10, 10.5).is_err());
        let s25 = GroupFamily::free_symmetric(25).unwrap();
        assert_eq!(threshold_k0(&s25, 23.0).unwrap(), StepThreshold::Finite(35));
    }

    #[test]
    fn exact_ties_round_up() {
        // q(s)^k = q(d)^{k-1} exactly when s = u-image chosen so the quotient is 2:
        // acosh(d/2) = 2 (acosh(d/2) - acosh(s/2)) <=> acosh(s/2) = acosh(d/2)/2.
        let d = 10.0f64;
        let s = 2.0 * ((0.5 * d).acosh() / 2.0).cosh();
        assert_eq!(threshold_for_arguments(s, d), StepThreshold::Finite(3));
    }

    #[test]
    fn cutoff_location() {
        assert_relative_eq!(threshold_k1(10, 4.0).unwrap(), 5.756_462_732_485_114, max_relative = 1e-14);
        assert!(threshold_k1(20, 2.0).unwrap() > 2.0 * threshold_k1(10, 2.0).unwrap());
        assert!(threshold_k1(2, 2.0).is_err());
    }

    #[test]
    fn context_validation() {
        let ctx = NumericContext::default();
        assert_eq!(ctx.quad_order(), 32);
        assert!(ctx.with_quad_order(8).is_err());
        assert!(ctx.with_max_terms(4).is_err());
        assert!(ctx.with_rel_tol(0.0).is_err());
        assert!(NumericContext::new(1e-8, 1e-12, 100, 16).is_ok());
    }
}
