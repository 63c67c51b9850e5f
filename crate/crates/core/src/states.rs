//! Central states, their convolution powers and the character statistics
//! used by the lower bounds.
//!
//! A central state is determined by its values `phi(n)` on the irreducible
//! representations. Every state handled here is a finite combination
//! `phi(n) = sum_i w_i u_{step n}(s_i) / u_{step n}(D)`, where `step` and
//! `D` come from the group family and each `s_i` is a character argument.

use std::str::FromStr;

use serde::Serialize;

use crate::envelope::Envelope;
use crate::error::{Error, Result};
use crate::kernel::{
    cap_c, cheb_u_table, signed_log_cheb_u, threshold_for_arguments, GroupFamily, GroupKind, NumericContext,
    StepThreshold,
};
use crate::numeric::{signed_log_sum, SignedLog};

/// `tau = 2(1 - cos theta)`; angles are reduced by the symmetry of cosine.
pub fn tau_from_angle(theta: f64) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::InvalidState(format!("angle must be finite, got {theta}")));
    }
    let tau = 2.0 * (1.0 - theta.cos());
    if tau <= 1e-15 {
        return Err(Error::InvalidState(format!("angle {theta} is a multiple of 2 pi")));
    }
    Ok(tau.min(4.0))
}

/// Trace `N - 2 + 2 cos theta` of a rotation by `theta` in a plane.
pub fn rotation_trace(size: u32, theta: f64) -> Result<f64> {
    if size < 3 {
        return Err(Error::InvalidState(format!("rotations need N >= 3, got {size}")));
    }
    Ok(size as f64 - tau_from_angle(theta)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixtureAtom {
    pub tau: f64,
    pub weight: f64,
}

/// Finite mixture of rotation angles, stored by `tau` with normalised weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleMixture {
    atoms: Vec<MixtureAtom>,
}

impl AngleMixture {
    pub fn new(atoms: Vec<MixtureAtom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidState("empty angle mixture".into()));
        }
        for a in &atoms {
            if !(a.tau > 0.0 && a.tau <= 4.0) {
                return Err(Error::InvalidState(format!("mixture tau {} outside (0, 4]", a.tau)));
            }
            if !(a.weight > 0.0 && a.weight.is_finite()) {
                return Err(Error::InvalidState(format!("mixture weight {} not positive", a.weight)));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        let atoms = atoms.into_iter().map(|a| MixtureAtom { tau: a.tau, weight: a.weight / total }).collect();
        Ok(AngleMixture { atoms })
    }

    pub fn single(tau: f64) -> Result<Self> {
        Self::new(vec![MixtureAtom { tau, weight: 1.0 }])
    }

    pub fn atoms(&self) -> &[MixtureAtom] {
        &self.atoms
    }

    /// `eta = sum w_i tau_i`.
    pub fn mean_tau(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight * a.tau).sum()
    }

    /// `delta = min tau_i`.
    pub fn min_tau(&self) -> f64 {
        self.atoms.iter().map(|a| a.tau).fold(f64::INFINITY, f64::min)
    }

    /// `sup_i (tau_i + C(tau_i))`, the size needed by the mixed-rotation bounds.
    pub fn required_size(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.tau + cap_c(a.tau).expect("tau checked on construction"))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

impl FromStr for AngleMixture {
    type Err = Error;

    /// Lines of `tau weight`, whitespace separated; `#` starts a comment.
    fn from_str(text: &str) -> Result<Self> {
        let mut atoms = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::InvalidState(format!("line {}: cannot parse `{s}`", lineno + 1)))
            };
            match fields.as_slice() {
                [tau, weight] => atoms.push(MixtureAtom { tau: parse(tau)?, weight: parse(weight)? }),
                _ => return Err(Error::InvalidState(format!("line {}: expected `tau weight`", lineno + 1))),
            }
        }
        AngleMixture::new(atoms)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum StateKind {
    Pure { t: f64 },
    Rotation { tau: f64 },
    Mixture(AngleMixture),
    RandomTransposition,
    Haar,
}

/// `phi(n) = sum_i w_i u_{step n}(s_i) / u_{step n}(dim_arg)`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CharacterForm {
    pub atoms: Vec<(f64, f64)>,
    pub step: usize,
    pub dim_arg: f64,
}

impl CharacterForm {
    fn is_unit_modulus(&self, s: f64) -> bool {
        s.abs() >= self.dim_arg
    }
}

/// Mean and variance of the fundamental character under a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentPair {
    pub mean: f64,
    pub variance: f64,
}

/// Location of `sup_{n >= 1} |phi(n)|` with the index where the scan stopped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupCertificate {
    pub sup_abs: f64,
    pub argmax: usize,
    pub certified_after: usize,
}

/// Values `phi(n)` and `ln d_n` for `n < len`.
#[derive(Debug, Clone)]
pub(crate) struct CharacterTable {
    pub phi: Vec<SignedLog>,
    pub log_dim: Vec<f64>,
}

impl CharacterTable {
    pub fn len(&self) -> usize {
        self.phi.len()
    }

    /// `phi(n)^k` in log form.
    pub fn power(&self, n: usize, k: u32) -> SignedLog {
        self.phi[n].powi(k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentralState {
    group: GroupFamily,
    kind: StateKind,
    form: CharacterForm,
}

impl CentralState {
    /// Pure character state `phi_t(n) = P_n(t) / d_n`.
    pub fn pure(group: GroupFamily, t: f64) -> Result<Self> {
        let carrier = group.carrier();
        let in_range = if group.has_even_characters() {
            (0.0..=carrier).contains(&t)
        } else {
            (-carrier..=carrier).contains(&t)
        };
        if !in_range {
            return Err(Error::InvalidState(format!("t = {t} outside the spectrum of {group}")));
        }
        let s = if group.has_even_characters() { t.sqrt() } else { t };
        Ok(Self::build(group, StateKind::Pure { t }, vec![(1.0, s)]))
    }

    /// Evaluation at the identity.
    pub fn counit(group: GroupFamily) -> Self {
        Self::pure(group, group.carrier()).expect("carrier lies in the spectrum")
    }

    pub fn haar(group: GroupFamily) -> Self {
        Self::build(group, StateKind::Haar, Vec::new())
    }

    /// Uniform measure on rotations by `theta`.
    pub fn rotation(group: GroupFamily, theta: f64) -> Result<Self> {
        Self::rotation_tau(group, tau_from_angle(theta)?)
    }

    /// Rotation state given by `tau = 2(1 - cos theta)`. On quantum
    /// automorphism groups this is the even restriction of the free
    /// orthogonal state.
    pub fn rotation_tau(group: GroupFamily, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau <= 4.0) {
            return Err(Error::InvalidState(format!("tau = {tau} outside (0, 4]")));
        }
        match group.kind() {
            GroupKind::FreeOrthogonal | GroupKind::QuantumAutomorphism => {
                let s = group.size() as f64 - tau;
                Ok(Self::build(group, StateKind::Rotation { tau }, vec![(1.0, s)]))
            }
            GroupKind::FreeSymmetric => Err(Error::InvalidState("rotation states need oplus or aut".into())),
        }
    }

    pub fn mixture(group: GroupFamily, mixture: AngleMixture) -> Result<Self> {
        if group.kind() != GroupKind::FreeOrthogonal {
            return Err(Error::InvalidState("angle mixtures need oplus".into()));
        }
        let n = group.size() as f64;
        let atoms = mixture.atoms().iter().map(|a| (a.weight, n - a.tau)).collect();
        Ok(Self::build(group, StateKind::Mixture(mixture), atoms))
    }

    /// `((N-1)/N) phi_{N-2} + (1/N) phi_N` on the free symmetric family.
    pub fn random_transposition(group: GroupFamily) -> Result<Self> {
        if group.kind() != GroupKind::FreeSymmetric {
            return Err(Error::InvalidState("random transpositions need splus".into()));
        }
        let n = group.size() as f64;
        let atoms = vec![((n - 1.0) / n, (n - 2.0).sqrt()), (1.0 / n, n.sqrt())];
        Ok(Self::build(group, StateKind::RandomTransposition, atoms))
    }

    fn build(group: GroupFamily, kind: StateKind, atoms: Vec<(f64, f64)>) -> Self {
        let form = CharacterForm { atoms, step: group.degree_step(), dim_arg: group.dimension_argument() };
        CentralState { group, kind, form }
    }

    pub fn group(&self) -> GroupFamily {
        self.group
    }

    pub fn kind(&self) -> &StateKind {
        &self.kind
    }

    pub(crate) fn form(&self) -> &CharacterForm {
        &self.form
    }

    pub fn is_haar(&self) -> bool {
        self.form.atoms.is_empty()
    }

    /// True when some weight sits on a character of modulus one (the
    /// counit or its sign twist); no convolution power then has a density.
    pub fn has_unit_modulus_part(&self) -> bool {
        self.form.atoms.iter().any(|&(_, s)| self.form.is_unit_modulus(s))
    }

    /// Largest `|s_i|` over the atoms.
    pub fn dominant_argument(&self) -> Option<f64> {
        self.form.atoms.iter().map(|&(_, s)| s.abs()).reduce(f64::max)
    }

    /// Smallest `k` for which `phi^{*k}` has a density.
    pub fn boundedness_threshold(&self) -> StepThreshold {
        match self.dominant_argument() {
            None => StepThreshold::Finite(1),
            Some(s) => threshold_for_arguments(s, self.form.dim_arg),
        }
    }

    /// `phi(n)` as sign and log-magnitude.
    pub fn eval_irrep_log(&self, n: usize) -> SignedLog {
        if n == 0 {
            return SignedLog::ONE;
        }
        let m = self.form.step * n;
        let log_d = self.group.log_dim(n);
        let parts: Vec<SignedLog> =
            self.form.atoms.iter().map(|&(w, s)| self.atom_ratio(s, m, log_d).scale_log(w.ln())).collect();
        combine(&parts)
    }

    fn atom_ratio(&self, s: f64, m: usize, log_d: f64) -> SignedLog {
        if s == self.form.dim_arg {
            SignedLog::ONE
        } else if s == -self.form.dim_arg {
            SignedLog::new(if m % 2 == 1 { -1.0 } else { 1.0 }, 0.0)
        } else {
            let u = signed_log_cheb_u(m, s);
            SignedLog::new(u.sign, u.log - log_d)
        }
    }

    /// `phi(n)`.
    pub fn eval_irrep(&self, n: usize) -> f64 {
        self.eval_irrep_log(n).value()
    }

    /// `phi^{*k}(n) = phi(n)^k`.
    pub fn conv_eval(&self, k: u32, n: usize) -> f64 {
        self.eval_irrep_log(n).powi(k).value()
    }

    /// Table of `phi(n)` and `ln d_n` for `n < len`.
    pub(crate) fn character_table(&self, len: usize) -> CharacterTable {
        let step = self.form.step;
        let log_dim: Vec<f64> = (0..len).map(|n| self.group.log_dim(n)).collect();
        let mut per_atom: Vec<Vec<SignedLog>> = Vec::with_capacity(self.form.atoms.len());
        for &(w, s) in &self.form.atoms {
            let lw = w.ln();
            let column: Vec<SignedLog> = if s.abs() < 2.0 {
                let us = cheb_u_table(s, step * len.max(1));
                (0..len).map(|n| SignedLog::from_f64(us[step * n]).scale_log(lw - log_dim[n])).collect()
            } else {
                (0..len).map(|n| self.atom_ratio(s, step * n, log_dim[n]).scale_log(lw)).collect()
            };
            per_atom.push(column);
        }
        let phi = (0..len)
            .map(|n| {
                if n == 0 {
                    return SignedLog::ONE;
                }
                let parts: Vec<SignedLog> = per_atom.iter().map(|c| c[n]).collect();
                combine(&parts)
            })
            .collect();
        CharacterTable { phi, log_dim }
    }

    /// Envelope of `|sum_i w_i u_m(s_i)|`.
    pub(crate) fn numerator_envelope(&self) -> Envelope {
        let parts: Vec<(f64, Envelope)> =
            self.form.atoms.iter().map(|&(w, s)| (w, Envelope::chebyshev(s))).collect();
        Envelope::weighted_sum(&parts)
    }

    /// Mean and variance of the fundamental character after `k` steps.
    pub fn mean_var_chi1(&self, k: u32) -> Result<MomentPair> {
        if k == 0 {
            return Err(Error::Domain("k must be >= 1".into()));
        }
        let d1 = self.group.dim(1);
        let d2 = self.group.dim(2);
        let first = d1 * self.conv_eval(k, 1);
        let second = d2 * self.conv_eval(k, 2);
        let mean = first;
        let raw = if self.group.has_even_characters() {
            1.0 + second + first - mean * mean
        } else {
            1.0 + second - mean * mean
        };
        let tol = 1e-9 * (1.0f64).max(mean * mean).max(second.abs());
        if raw < -tol {
            return Err(Error::NumericFailure(format!("negative variance {raw}")));
        }
        Ok(MomentPair { mean, variance: raw.max(0.0) })
    }

    /// `sup_{n >= 1} |phi(n)|`, certified by an envelope of the remaining
    /// terms.
    pub fn l2_sup(&self, ctx: &NumericContext) -> Result<SupCertificate> {
        if self.is_haar() {
            return Ok(SupCertificate { sup_abs: 0.0, argmax: 1, certified_after: 1 });
        }
        let form = &self.form;
        let unit_weight: f64 =
            form.atoms.iter().filter(|&&(_, s)| form.is_unit_modulus(s)).map(|&(w, _)| w).sum();
        let rest: Vec<(f64, Envelope)> = form
            .atoms
            .iter()
            .filter(|&&(_, s)| !form.is_unit_modulus(s))
            .map(|&(w, s)| (w, Envelope::chebyshev(s)))
            .collect();
        let rest = Envelope::weighted_sum(&rest) * Envelope::inverse_chebyshev(form.dim_arg);
        let table = self.character_table(ctx.max_terms() + 1);
        let (mut best, mut argmax) = (f64::NEG_INFINITY, 1);
        for n in 1..table.len() {
            let v = table.phi[n].value().abs();
            if v > best {
                best = v;
                argmax = n;
            }
            let tail = unit_weight + rest.log_sup_from(form.step * (n + 1)).exp();
            if tail <= best {
                return Ok(SupCertificate { sup_abs: best, argmax, certified_after: n });
            }
        }
        Err(Error::NonConvergence(ctx.max_terms()))
    }

    /// Distance `sup_{n >= 1} |phi(n)|^k` between the transition operators
    /// of `phi^{*k}` and of the Haar state on `L^2`.
    pub fn l2_operator_distance(&self, k: u32, ctx: &NumericContext) -> Result<f64> {
        if k == 0 {
            return Err(Error::Domain("k must be >= 1".into()));
        }
        Ok(self.l2_sup(ctx)?.sup_abs.powi(k as i32))
    }
}

fn combine(parts: &[SignedLog]) -> SignedLog {
    match parts {
        [] => SignedLog::ZERO,
        [single] => *single,
        _ => signed_log_sum(parts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn o(n: u32) -> GroupFamily {
        GroupFamily::free_orthogonal(n).unwrap()
    }

    #[test]
    fn traces() {
        assert_relative_eq!(rotation_trace(10, PI).unwrap(), 6.0);
        assert_relative_eq!(rotation_trace(10, PI / 2.0).unwrap(), 8.0, max_relative = 1e-15);
        assert_relative_eq!(rotation_trace(10, PI / 3.0).unwrap(), 9.0, max_relative = 1e-15);
        assert!(rotation_trace(10, 0.0).is_err());
        assert!(rotation_trace(2, PI).is_err());
    }

    #[test]
    fn irreducible_values() {
        let s = CentralState::pure(o(10), 7.0).unwrap();
        assert_relative_eq!(s.eval_irrep(1), 0.7, max_relative = 1e-15);
        assert_eq!(s.eval_irrep(0), 1.0);
        let r = CentralState::rotation(o(10), PI).unwrap();
        assert_relative_eq!(r.eval_irrep(1), 0.6, max_relative = 1e-15);
        assert_relative_eq!(r.conv_eval(3, 1), 0.216, max_relative = 1e-14);
        let rt = CentralState::random_transposition(GroupFamily::free_symmetric(10).unwrap()).unwrap();
        assert_relative_eq!(rt.eval_irrep(1), 0.8, max_relative = 1e-15);
    }

    #[test]
    fn counit_is_idempotent() {
        let c = CentralState::counit(o(6));
        for n in 0..40 {
            assert_eq!(c.conv_eval(7, n), 1.0);
        }
        assert!(c.has_unit_modulus_part());
        assert_eq!(c.boundedness_threshold(), StepThreshold::Infinite);
    }

    #[test]
    fn haar_vanishes() {
        let h = CentralState::haar(o(5));
        assert_eq!(h.eval_irrep(3), 0.0);
        assert_eq!(h.eval_irrep(0), 1.0);
        let m = h.mean_var_chi1(4).unwrap();
        assert_eq!((m.mean, m.variance), (0.0, 1.0));
        assert_eq!(h.l2_operator_distance(3, &NumericContext::default()).unwrap(), 0.0);
    }

    #[test]
    fn moments() {
        let r = CentralState::rotation(o(10), PI).unwrap();
        let m = r.mean_var_chi1(3).unwrap();
        assert_relative_eq!(m.mean, 2.16, max_relative = 1e-14);
        assert_relative_eq!(m.variance, 0.708_953_616_977_859_4, max_relative = 1e-12);
        let c = CentralState::counit(o(7)).mean_var_chi1(5).unwrap();
        assert_eq!(c.mean, 7.0);
        assert_eq!(c.variance, 0.0);
        let far = r.mean_var_chi1(400).unwrap();
        assert!(far.mean.abs() < 1e-12 && (far.variance - 1.0).abs() < 1e-12);
    }

    #[test]
    fn even_family_moments_use_the_extra_term() {
        let g = GroupFamily::free_symmetric(8).unwrap();
        let c = CentralState::counit(g).mean_var_chi1(2).unwrap();
        // d_1 = 7, d_2 = 41 and 1 + 41 + 7 - 49 = 0.
        assert_eq!(c.mean, 7.0);
        assert_eq!(c.variance, 0.0);
    }

    #[test]
    fn l2_distance_random_transposition() {
        let ctx = NumericContext::default();
        let rt = CentralState::random_transposition(GroupFamily::free_symmetric(10).unwrap()).unwrap();
        let cert = rt.l2_sup(&ctx).unwrap();
        assert_eq!(cert.argmax, 1);
        assert_relative_eq!(rt.l2_operator_distance(5, &ctx).unwrap(), 0.32768, max_relative = 1e-13);
        let c = CentralState::counit(o(5));
        assert_eq!(c.l2_operator_distance(9, &ctx).unwrap(), 1.0);
    }

    #[test]
    fn state_validation() {
        assert!(CentralState::pure(o(5), 5.5).is_err());
        assert!(CentralState::pure(o(5), -5.0).is_ok());
        let s = GroupFamily::free_symmetric(6).unwrap();
        assert!(CentralState::pure(s, -0.1).is_err());
        assert!(CentralState::rotation(s, PI).is_err());
        assert!(CentralState::random_transposition(o(6)).is_err());
        assert!(CentralState::mixture(s, AngleMixture::single(2.0).unwrap()).is_err());
        assert!(AngleMixture::new(vec![]).is_err());
        assert!(AngleMixture::single(0.0).is_err());
    }

    #[test]
    fn mixture_parsing_and_normalisation() {
        let m: AngleMixture = "# angles\n4 1\n2 3 # second\n\n".parse().unwrap();
        assert_eq!(m.atoms().len(), 2);
        assert_relative_eq!(m.atoms()[1].weight, 0.75);
        assert_relative_eq!(m.mean_tau(), 2.5);
        assert_eq!(m.min_tau(), 2.0);
        assert!("4".parse::<AngleMixture>().is_err());
        assert!("4 x".parse::<AngleMixture>().is_err());
    }

    #[test]
    fn table_matches_pointwise_evaluation() {
        let states = [
            CentralState::rotation(o(9), 2.0).unwrap(),
            CentralState::pure(o(9), -1.2).unwrap(),
            CentralState::random_transposition(GroupFamily::free_symmetric(7).unwrap()).unwrap(),
            CentralState::rotation(GroupFamily::quantum_automorphism(4).unwrap(), PI).unwrap(),
        ];
        for s in &states {
            let table = s.character_table(60);
            for n in 0..60 {
                let a = table.phi[n].value();
                let b = s.eval_irrep(n);
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300), "{n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn automorphism_rotation_is_even_restriction() {
        let aut = CentralState::rotation(GroupFamily::quantum_automorphism(6).unwrap(), PI / 2.0).unwrap();
        let orth = CentralState::rotation(o(6), PI / 2.0).unwrap();
        for n in 0..20 {
            assert_relative_eq!(aut.eval_irrep(n), orth.eval_irrep(2 * n), max_relative = 1e-12);
        }
    }
}
