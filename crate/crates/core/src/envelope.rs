//! Majorants of the form `a (m+1)^p r^m` and their tail sums.
//!
//! Every series in the crate is indexed by a Chebyshev degree `m`; an
//! envelope bounds the absolute value of its terms for all `m >= 1`.

use std::ops::Mul;

use crate::kernel::q_param;
use crate::numeric::log_add_exp;

/// Above this constant the polynomial bound `|u_m(s)| <= m + 1` is used
/// for `|s| < 2` instead of `1 / sqrt(1 - s^2/4)`.
const MAX_BOUNDED_CONSTANT: f64 = 1e6;

/// `|term(m)| <= exp(log_scale + power ln(m+1) + m log_ratio)` for `m >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub log_scale: f64,
    pub power: f64,
    pub log_ratio: f64,
}

impl Envelope {
    pub const ZERO: Envelope = Envelope { log_scale: f64::NEG_INFINITY, power: 0.0, log_ratio: 0.0 };
    pub const ONE: Envelope = Envelope { log_scale: 0.0, power: 0.0, log_ratio: 0.0 };

    pub fn polynomial(power: f64) -> Self {
        Envelope { log_scale: 0.0, power, log_ratio: 0.0 }
    }

    pub fn is_zero(&self) -> bool {
        self.log_scale == f64::NEG_INFINITY
    }

    /// Bound on `|u_m(s)|`.
    pub fn chebyshev(s: f64) -> Self {
        let s = s.abs();
        if s > 2.0 {
            let q = q_param(s).expect("s > 2");
            Envelope { log_scale: -(-(2.0 * q.ln()).exp_m1()).ln(), power: 0.0, log_ratio: (0.5 * s).acosh() }
        } else if s == 2.0 {
            Self::polynomial(1.0)
        } else {
            let c = 1.0 / (1.0 - 0.25 * s * s).sqrt();
            if c <= MAX_BOUNDED_CONSTANT {
                Envelope { log_scale: c.ln(), power: 0.0, log_ratio: 0.0 }
            } else {
                Self::polynomial(1.0)
            }
        }
    }

    /// Bound on `1 / u_m(d)` for `d >= 2` and `m >= 1`.
    pub fn inverse_chebyshev(d: f64) -> Self {
        assert!(d >= 2.0, "dimension argument below 2");
        if d == 2.0 {
            Self::polynomial(-1.0)
        } else {
            let a = (0.5 * d).acosh();
            Envelope { log_scale: a - d.ln(), power: 0.0, log_ratio: -a }
        }
    }

    /// `sum w_i env_i`, bounded by summing scales and taking the largest
    /// power and ratio.
    pub fn weighted_sum(parts: &[(f64, Envelope)]) -> Self {
        let mut out = Envelope::ZERO;
        let mut first = true;
        for &(w, env) in parts {
            if w == 0.0 || env.is_zero() {
                continue;
            }
            let scale = w.abs().ln() + env.log_scale;
            if first {
                out = Envelope { log_scale: scale, ..env };
                first = false;
            } else {
                out.log_scale = log_add_exp(out.log_scale, scale);
                out.power = out.power.max(env.power);
                out.log_ratio = out.log_ratio.max(env.log_ratio);
            }
        }
        out
    }

    pub fn pow(self, e: f64) -> Self {
        if e == 0.0 {
            return Envelope::ONE;
        }
        if self.is_zero() {
            return Envelope::ZERO;
        }
        Envelope { log_scale: self.log_scale * e, power: self.power * e, log_ratio: self.log_ratio * e }
    }

    pub fn log_at(&self, m: usize) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.log_scale + self.power * ((m + 1) as f64).ln() + self.log_ratio * m as f64
    }

    /// Whether the terms are summable along any arithmetic progression.
    pub fn is_summable(&self) -> bool {
        self.is_zero() || self.log_ratio < 0.0 || (self.log_ratio == 0.0 && self.power < -1.0)
    }

    /// Log of a certified bound on `sum_{j >= 0} b(first + j step)`;
    /// `+inf` when no bound can be certified from `first` on.
    pub fn log_tail(&self, first: usize, step: usize) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let step_f = step as f64;
        let m0 = (first + 1) as f64;
        if self.log_ratio < 0.0 {
            let growth = self.power.max(0.0) * ((m0 + step_f) / m0).ln();
            let log_rho = step_f * self.log_ratio + growth;
            if log_rho < 0.0 {
                return self.log_at(first) - (-log_rho.exp_m1()).ln();
            }
            f64::INFINITY
        } else if self.log_ratio == 0.0 && self.power < -1.0 {
            let p = self.power;
            let head = p * m0.ln();
            let integral = (p + 1.0) * m0.ln() - (step_f * (-p - 1.0)).ln();
            self.log_scale + log_add_exp(head, integral)
        } else {
            f64::INFINITY
        }
    }

    /// Log of `sup_{m >= first} b(m)`; `+inf` if unbounded.
    pub fn log_sup_from(&self, first: usize) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (p, lr) = (self.power, self.log_ratio);
        if lr > 0.0 || (lr == 0.0 && p > 0.0) {
            return f64::INFINITY;
        }
        if p <= 0.0 {
            return self.log_at(first);
        }
        let peak = -p / lr - 1.0;
        if (first as f64) >= peak {
            self.log_at(first)
        } else {
            self.log_scale + p * (peak + 1.0).ln() + lr * peak
        }
    }
}

impl Mul for Envelope {
    type Output = Envelope;

    fn mul(self, other: Envelope) -> Self {
        if self.is_zero() || other.is_zero() {
            return Envelope::ZERO;
        }
        Envelope {
            log_scale: self.log_scale + other.log_scale,
            power: self.power + other.power,
            log_ratio: self.log_ratio + other.log_ratio,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::cheb_u;

    #[test]
    fn chebyshev_envelope_dominates() {
        for &s in &[-7.0, -2.5, -2.0, -1.3, 0.0, 0.7, 1.99, 2.0, 2.001, 3.0, 9.0] {
            let env = Envelope::chebyshev(s);
            for m in 1..300 {
                let u = cheb_u(m, s).abs();
                assert!(u.ln() <= env.log_at(m) + 1e-12, "s={s} m={m}");
            }
        }
    }

    #[test]
    fn inverse_envelope_dominates() {
        for &d in &[2.0, 2.2, 3.0, 10.0] {
            let env = Envelope::inverse_chebyshev(d);
            for m in 1..300 {
                assert!(-cheb_u(m, d).ln() <= env.log_at(m) + 1e-12, "d={d} m={m}");
            }
        }
    }

    #[test]
    fn geometric_tail_bounds_brute_force() {
        let env = Envelope { log_scale: 0.3, power: 2.0, log_ratio: -0.4 };
        for &(first, step) in &[(1usize, 1usize), (10, 2), (40, 1)] {
            let brute: f64 = (0..5000).map(|j| env.log_at(first + j * step).exp()).sum();
            let bound = env.log_tail(first, step).exp();
            assert!(bound >= brute * (1.0 - 1e-12), "{first} {step}: {bound} < {brute}");
        }
    }

    #[test]
    fn polynomial_tail_bounds_brute_force() {
        let env = Envelope { log_scale: 0.0, power: -2.5, log_ratio: 0.0 };
        let brute: f64 = (0..2_000_000).map(|j| env.log_at(6 + 2 * j).exp()).sum();
        assert!(env.log_tail(6, 2).exp() >= brute);
        assert!(Envelope::polynomial(-1.0).log_tail(3, 1).is_infinite());
    }

    #[test]
    fn sup_of_rising_then_falling_envelope() {
        let env = Envelope { log_scale: 0.0, power: 3.0, log_ratio: -0.5 };
        let brute = (1..500).map(|m| env.log_at(m)).fold(f64::NEG_INFINITY, f64::max);
        assert!(env.log_sup_from(1) >= brute - 1e-12);
        assert_eq!(env.log_sup_from(100), env.log_at(100));
    }

    #[test]
    fn algebra_of_envelopes() {
        let a = Envelope { log_scale: 1.0, power: 1.0, log_ratio: -0.2 };
        let b = a.pow(3.0) * Envelope::polynomial(1.0);
        assert_eq!(b.power, 4.0);
        assert!((b.log_ratio + 0.6).abs() < 1e-15);
        assert_eq!(Envelope::ZERO.pow(2.0), Envelope::ZERO);
        assert_eq!(a.pow(0.0), Envelope::ONE);
        let mix = Envelope::weighted_sum(&[(0.5, Envelope::chebyshev(3.0)), (0.5, Envelope::chebyshev(1.0))]);
        assert_eq!(mix.log_ratio, Envelope::chebyshev(3.0).log_ratio);
        assert_eq!(Envelope::weighted_sum(&[]), Envelope::ZERO);
    }
}
