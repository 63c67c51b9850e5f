//! Small floating-point helpers shared by the series code.

use std::ops::{Div, Mul};

/// A real number stored as sign and natural log of its magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: f64,
    pub log: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog { sign: 0.0, log: f64::NEG_INFINITY };
    pub const ONE: SignedLog = SignedLog { sign: 1.0, log: 0.0 };

    pub fn new(sign: f64, log: f64) -> Self {
        if sign == 0.0 || log == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            SignedLog { sign: sign.signum(), log }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self::new(x.signum(), x.abs().ln())
        }
    }

    pub fn value(self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.log.exp()
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0.0
    }

    pub fn powi(self, k: u32) -> Self {
        if k == 0 {
            return Self::ONE;
        }
        let sign = if k.is_multiple_of(2) { self.sign.abs() } else { self.sign };
        Self::new(sign, self.log * k as f64)
    }

    pub fn scale_log(self, log_factor: f64) -> Self {
        Self::new(self.sign, self.log + log_factor)
    }
}

impl Mul for SignedLog {
    type Output = SignedLog;

    fn mul(self, other: SignedLog) -> Self {
        Self::new(self.sign * other.sign, self.log + other.log)
    }
}

impl Div for SignedLog {
    type Output = SignedLog;

    fn div(self, other: SignedLog) -> Self {
        Self::new(self.sign * other.sign, self.log - other.log)
    }
}

/// `ln(e^a + e^b)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Signed sum of terms held in log form.
pub fn signed_log_sum(terms: &[SignedLog]) -> SignedLog {
    let mut pos = f64::NEG_INFINITY;
    let mut neg = f64::NEG_INFINITY;
    for t in terms {
        if t.sign > 0.0 {
            pos = log_add_exp(pos, t.log);
        } else if t.sign < 0.0 {
            neg = log_add_exp(neg, t.log);
        }
    }
    if pos == neg {
        return SignedLog::ZERO;
    }
    if pos > neg {
        SignedLog::new(1.0, pos + (-(neg - pos).exp()).ln_1p())
    } else {
        SignedLog::new(-1.0, neg + (-(pos - neg).exp()).ln_1p())
    }
}

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// `n` points spaced geometrically on `[lo, hi]`, endpoints included.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// `n` points spaced evenly on `(lo, hi]`, the left endpoint excluded.
pub fn open_left_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}
