//! Conversions among the tail-density, Fourier, Stieltjes, reciprocal
//! Cauchy (F) and Voiculescu (φ) representations, and the four convolutions.
//!
//! Conventions: G is taken on the lower half-plane, where
//! G(z) = Σ m_γ z^{−γ−1}; F = 1/G = z·Σ b_γ z^{−γ}; φ(z) = F^{−1}(z) − z.

use crate::error::{Error, Result};
use crate::semigroup::{Grid, SemigroupSpec};
use crate::series::{
    self, compose_f, growth_fit, identity_f, linear_combine, product, reciprocal, revert_f, Evaluation, GenSeries,
    Normalization, Variable, GUARD_FACTOR,
};
use crate::special::{unit_phase, Branch};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use std::sync::Arc;

const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const M0_TOL: f64 = 1e-9;

/// γ-complex moments m_γ, stored with GAMMA bookkeeping so that
/// 𝔉(z) = Σ m_γ (iz)^γ/Γ(γ+1).
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSeries {
    series: GenSeries,
}

impl MomentSeries {
    pub fn new(series: GenSeries) -> Result<Self> {
        let series = series.reinterpret(Variable::Ascending, Normalization::Gamma, 0);
        let m0 = series.constant_term();
        if (m0 - ONE).norm() > M0_TOL {
            return Err(Error::InvalidArgument(format!("moment series needs m₀ = 1, got {m0}")));
        }
        Ok(MomentSeries { series })
    }

    pub fn from_terms(grid: Arc<Grid>, terms: impl IntoIterator<Item = (f64, C64)>) -> Result<Self> {
        Self::new(GenSeries::from_terms(grid, Variable::Ascending, Normalization::Gamma, 0, terms)?)
    }

    /// Point mass at 0.
    pub fn delta0(grid: Arc<Grid>) -> Self {
        MomentSeries { series: GenSeries::unit(grid, Variable::Ascending, Normalization::Gamma) }
    }

    pub fn series(&self) -> &GenSeries {
        &self.series
    }
    pub fn grid(&self) -> &Arc<Grid> {
        self.series.grid()
    }
    pub fn spec(&self) -> &SemigroupSpec {
        self.series.spec()
    }
    pub fn cutoff(&self) -> f64 {
        self.series.cutoff()
    }
    pub fn moment(&self, gamma: f64) -> C64 {
        self.series.coeff(gamma)
    }
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64, C64)> + '_ {
        self.series.iter()
    }
    /// Validity radius 1.25·c·A for descending evaluations.
    pub fn validity_radius(&self) -> f64 {
        series::guard_radius(&self.series)
    }
    pub fn truncate(&self, cutoff: f64) -> Result<Self> {
        Ok(MomentSeries { series: self.series.truncate(cutoff)? })
    }
    /// Largest termwise difference |m_γ − m'_γ| relative to max(1, |m_γ|).
    pub fn max_rel_diff(&self, other: &MomentSeries) -> f64 {
        let a = self.series.dense();
        let b = match other.series.regrid(self.grid()) {
            Ok(s) => s.dense(),
            Err(_) => return f64::INFINITY,
        };
        a.iter().zip(&b).map(|(x, y)| (x - y).norm() / x.norm().max(1.0)).fold(0.0, f64::max)
    }
}

/// Fourier transform 𝔉(z) = Σ m_γ i^γ z^γ/Γ(γ+1) on z > 0.
#[derive(Debug, Clone)]
pub struct FourierEvaluator {
    moments: MomentSeries,
}

impl FourierEvaluator {
    pub fn eval(&self, z: f64) -> Result<Evaluation> {
        if !(z > 0.0) {
            return Err(Error::Domain(format!("Fourier series is defined for z > 0, got {z}")));
        }
        // (iz)^γ on the principal branch is i^γ z^γ
        series::evaluate(self.moments.series(), C64::new(0.0, z), Branch::Principal)
    }
}

pub fn fourier_from_moments(m: &MomentSeries) -> FourierEvaluator {
    FourierEvaluator { moments: m.clone() }
}

/// G(z) = Σ d_γ z^{−γ−1} with d_γ = m_γ.
pub fn stieltjes_from_moments(m: &MomentSeries) -> GenSeries {
    m.series.reinterpret(Variable::Descending, Normalization::Raw, 1)
}

pub fn moments_from_stieltjes(g: &GenSeries) -> Result<MomentSeries> {
    if g.variable() != Variable::Descending || g.normalization() != Normalization::Raw || g.offset() != 1 {
        return Err(Error::InvalidForm("expected G = Σ d_γ z^{−γ−1}".into()));
    }
    MomentSeries::new(g.clone())
}

pub fn evaluate_stieltjes(m: &MomentSeries, z: C64) -> Result<Evaluation> {
    series::evaluate(&stieltjes_from_moments(m), z, Branch::Principal)
}

/// Tail coefficients a_β of μ|_{|x|≥R}(dx) = Σ Im(a_β (1/x)^{β+1})dx.
#[derive(Debug, Clone, PartialEq)]
pub struct TailDensityModel {
    pub spec: SemigroupSpec,
    /// (β, a_β) with β > 0.
    pub a: Vec<(f64, C64)>,
    pub r: f64,
    pub big_r: f64,
    /// Real parts of the integer-exponent moments, index n ↦ Re m_n.
    /// Integer moments are not determined by the tail; by convention
    /// this defaults to [1] (m₀ = 1, others 0).
    pub inner_moments: Vec<f64>,
}

impl TailDensityModel {
    pub fn new(spec: SemigroupSpec, a: Vec<(f64, C64)>, r: f64, big_r: f64) -> Self {
        TailDensityModel { spec, a, r, big_r, inner_moments: vec![1.0] }
    }

    pub fn with_inner_moments(mut self, inner: Vec<f64>) -> Self {
        self.inner_moments = inner;
        self
    }

    pub fn validate(&self, c: f64) -> Result<()> {
        if !(self.r > 0.0 && self.big_r > 0.0) {
            return Err(Error::InvalidModel("r and R must be positive".into()));
        }
        if self.r >= self.big_r / c {
            return Err(Error::InvalidModel(format!("r = {} must be below R/c = {}", self.r, self.big_r / c)));
        }
        for &(b, a) in &self.a {
            if !(b > 0.0) {
                return Err(Error::InvalidModel(format!("tail exponent {b} must be positive")));
            }
            if a.norm() > self.r.powf(b) * (1.0 + 1e-12) {
                return Err(Error::InvalidModel(format!("|a_{b}| = {} exceeds r^β = {}", a.norm(), self.r.powf(b))));
            }
        }
        Ok(())
    }

    /// Tail model read off a moment series: a_γ = m_γ/π.
    pub fn from_moments(m: &MomentSeries) -> Self {
        let fit = growth_fit(m.series());
        let r = fit.a.max(fit.tail_rate).max(1e-300);
        let c = m.grid().density_constant();
        let a = m.iter().filter(|&(_, g, _)| g > 0.0).map(|(_, g, v)| (g, v / PI)).collect();
        let inner = m
            .iter()
            .filter(|&(_, g, _)| g.fract() == 0.0)
            .fold(Vec::new(), |mut acc: Vec<f64>, (_, g, v)| {
                let n = g as usize;
                if acc.len() <= n {
                    acc.resize(n + 1, 0.0);
                }
                acc[n] = v.re;
                acc
            });
        TailDensityModel { spec: m.spec().clone(), a, r, big_r: GUARD_FACTOR * c * r * 1.0001, inner_moments: inner }
    }
}

/// m_γ = π a_γ off the integers; at integer n the real part comes from the
/// inner-part descriptor and the imaginary part is π Im a_n.
pub fn moments_from_tail(model: &TailDensityModel, cutoff: f64) -> Result<MomentSeries> {
    let grid = series::grid(&model.spec, cutoff)?;
    model.validate(grid.density_constant())?;
    let mut terms: Vec<(f64, C64)> = Vec::new();
    for &(b, a) in &model.a {
        if b > cutoff * (1.0 + 1e-12) {
            continue;
        }
        if is_integer(b) {
            terms.push((b.round(), C64::new(0.0, PI * a.im)));
        } else {
            terms.push((b, a * PI));
        }
    }
    for (n, &re) in model.inner_moments.iter().enumerate() {
        if (n as f64) <= cutoff {
            terms.push((n as f64, C64::new(re, 0.0)));
        }
    }
    if model.inner_moments.is_empty() {
        terms.push((0.0, ONE));
    }
    MomentSeries::from_terms(grid, terms)
}

fn is_integer(x: f64) -> bool {
    (x - x.round()).abs() <= 1e-9 * x.abs().max(1.0)
}

/// Tail density (1/π) Σ_{γ>0} Im(m_γ (1/x)^{γ+1}) for |x| beyond the guard.
#[derive(Debug, Clone)]
pub struct TailDensity {
    moments: MomentSeries,
    radius: f64,
}

impl TailDensity {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if x.abs() <= self.radius {
            return Err(Error::OutsideValidityRegion { x, radius: self.radius });
        }
        let ax = x.abs();
        let mut s = 0.0;
        for (_, g, m) in self.moments.iter() {
            if g == 0.0 {
                continue;
            }
            let p = g + 1.0;
            let phase = if x > 0.0 { ONE } else { unit_phase(p) };
            s += (m * phase * ax.powf(-p)).im;
        }
        Ok(s / PI)
    }
}

pub fn tail_from_moments(m: &MomentSeries) -> TailDensity {
    TailDensity { moments: m.clone(), radius: m.validity_radius() }
}

/// F = z·(Σ m_γ z^{−γ})^{−1}.
pub fn f_from_moments(m: &MomentSeries) -> Result<GenSeries> {
    let bracket = m.series.reinterpret(Variable::Descending, Normalization::Raw, 0);
    Ok(reciprocal(&bracket)?.with_offset(-1))
}

pub fn moments_from_f(f: &GenSeries) -> Result<MomentSeries> {
    series::check_f_form(f)?;
    let m = reciprocal(&f.with_offset(0))?;
    MomentSeries::new(m)
}

/// φ(z) = F^{−1}(z) − z, stored like an F-form series (offset −1) whose
/// coefficient at γ multiplies z^{1−γ}; the constant term is zero.
pub fn voiculescu_from_moments(m: &MomentSeries) -> Result<GenSeries> {
    let f = f_from_moments(m)?;
    let k = revert_f(&f)?;
    linear_combine(ONE, &k, -ONE, &identity_f(m.grid().clone()))
}

pub fn moments_from_voiculescu(phi: &GenSeries) -> Result<MomentSeries> {
    let id = identity_f(phi.grid().clone());
    let k = linear_combine(ONE, phi, ONE, &id)?;
    let f = revert_f(&k)?;
    moments_from_f(&f)
}

/// Coefficient e_p of z^{−p} in φ (p may be negative for exponents below 1).
pub fn voiculescu_coefficient(phi: &GenSeries, p: f64) -> C64 {
    phi.coeff(p + 1.0)
}

/// Classical convolution: the binomial Γ-weighted moment product.
pub fn classical_convolve(m1: &MomentSeries, m2: &MomentSeries) -> Result<MomentSeries> {
    MomentSeries::new(product(&m1.series, &m2.series)?)
}

/// Boolean convolution: F = F₁ + F₂ − z.
pub fn boolean_convolve(m1: &MomentSeries, m2: &MomentSeries) -> Result<MomentSeries> {
    let f1 = f_from_moments(m1)?;
    let f2 = f_from_moments(m2)?;
    let sum = linear_combine(ONE, &f1, ONE, &f2)?;
    let id = identity_f(sum.grid().clone());
    moments_from_f(&linear_combine(ONE, &sum, -ONE, &id)?)
}

/// Monotone convolution: F = F₁ ∘ F₂.
pub fn monotone_convolve(m1: &MomentSeries, m2: &MomentSeries) -> Result<MomentSeries> {
    moments_from_f(&compose_f(&f_from_moments(m1)?, &f_from_moments(m2)?)?)
}

/// Free convolution: φ = φ₁ + φ₂.
pub fn free_convolve(m1: &MomentSeries, m2: &MomentSeries) -> Result<MomentSeries> {
    let p1 = voiculescu_from_moments(m1)?;
    let p2 = voiculescu_from_moments(m2)?;
    moments_from_voiculescu(&linear_combine(ONE, &p1, ONE, &p2)?)
}

/// Complex tail coefficients of a one-sided tail Σ b_β x^{−β−1}:
/// Im a_β = b_β, Re a_β = −cot(πβ) b_β.
pub fn tail_real_to_complex(b: &[(f64, f64)]) -> Result<Vec<(f64, C64)>> {
    b.iter()
        .map(|&(beta, bb)| {
            if is_integer(beta) {
                if bb != 0.0 {
                    return Err(Error::LogTermObstruction(beta));
                }
                return Ok((beta, C64::new(0.0, 0.0)));
            }
            let cot = (PI * beta).cos() / (PI * beta).sin();
            Ok((beta, C64::new(-cot * bb, bb)))
        })
        .collect()
}

/// Smallest A with |a_β| ≤ A^β over the given coefficients.
pub fn tail_growth(a: &[(f64, C64)]) -> f64 {
    a.iter().filter(|(b, _)| *b > 0.0).map(|(b, c)| c.norm().powf(1.0 / b)).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::grid;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn cauchy(cutoff: f64) -> MomentSeries {
        let g = grid(&SemigroupSpec::naturals(), cutoff).unwrap();
        MomentSeries::from_terms(g, (0..=cutoff as i32).map(|n| (n as f64, c(0.0, 1.0).powi(n)))).unwrap()
    }

    fn semicircle(cutoff: f64) -> MomentSeries {
        let g = grid(&SemigroupSpec::naturals(), cutoff).unwrap();
        let mut cat = vec![1.0f64];
        for n in 1..=(cutoff as usize / 2) {
            cat.push(cat[n - 1] * 2.0 * (2 * n - 1) as f64 / (n + 1) as f64);
        }
        MomentSeries::from_terms(g, cat.iter().enumerate().map(|(n, &v)| ((2 * n) as f64, c(v, 0.0)))).unwrap()
    }

    #[test]
    fn fourier_of_cauchy_and_delta() {
        let f = fourier_from_moments(&cauchy(20.0));
        let v = f.eval(1.0).unwrap();
        assert!((v.value - c((-1.0f64).exp(), 0.0)).norm() < 1e-10);
        assert!(f.eval(0.0).is_err());
        let d = MomentSeries::delta0(grid(&SemigroupSpec::naturals(), 5.0).unwrap());
        assert_eq!(fourier_from_moments(&d).eval(3.0).unwrap().value, c(1.0, 0.0));
    }

    #[test]
    fn fourier_of_half_stable_series() {
        // m_{n/2} = Γ(n/2 + 1) iⁿ/n!  ⟹  𝔉(z) = exp(i^{1/2}·i·z^{1/2})
        let g = grid(&SemigroupSpec::generated_by(&[0.5]).unwrap(), 20.0).unwrap();
        let terms = (0..=40).map(|n| {
            let gm = n as f64 / 2.0;
            (gm, c(0.0, 1.0).powi(n) * crate::special::gamma(gm + 1.0) / crate::special::factorial(n as u32))
        });
        let m = MomentSeries::from_terms(g, terms).unwrap();
        let z = 0.4f64;
        let expect = (crate::special::i_pow(0.5) * c(0.0, 1.0) * z.sqrt()).exp();
        assert!((fourier_from_moments(&m).eval(z).unwrap().value - expect).norm() < 1e-8);
    }

    #[test]
    fn stieltjes_coefficients_are_moments() {
        let m = cauchy(20.0);
        let g = stieltjes_from_moments(&m);
        for (i, _, v) in m.iter() {
            assert_eq!(g.coeff_at(i), v);
        }
        let v = evaluate_stieltjes(&m, c(0.0, -3.0)).unwrap().value;
        assert!((v - c(0.0, 0.25)).norm() < 1e-10);
        let sc = semicircle(40.0);
        let z = c(0.0, -5.0);
        let want = (z - (z * z - 4.0).sqrt()) / 2.0;
        let want = if (want * z - 1.0).norm() < 0.5 { want } else { (z + (z * z - 4.0).sqrt()) / 2.0 };
        assert!((evaluate_stieltjes(&sc, z).unwrap().value - want).norm() < 1e-9);
        let d = MomentSeries::delta0(grid(&SemigroupSpec::naturals(), 5.0).unwrap());
        assert!((evaluate_stieltjes(&d, c(1.0, -2.0)).unwrap().value - 1.0 / c(1.0, -2.0)).norm() < 1e-15);
    }

    #[test]
    fn tail_density_of_cauchy() {
        let t = tail_from_moments(&cauchy(20.0));
        let v = t.eval(5.0).unwrap();
        assert!((v - 1.0 / (26.0 * PI)).abs() < 1e-10);
        let v = t.eval(-5.0).unwrap();
        assert!((v - 1.0 / (26.0 * PI)).abs() < 1e-10);
        assert!(t.eval(1.0).is_err());
        let d = MomentSeries::delta0(grid(&SemigroupSpec::naturals(), 5.0).unwrap());
        assert_eq!(tail_from_moments(&d).eval(3.0).unwrap(), 0.0);
    }

    #[test]
    fn tail_model_round_trips() {
        let spec = SemigroupSpec::generated_by(&[0.5]).unwrap();
        let alpha: f64 = 0.5;
        let cc = 0.3;
        let a = unit_phase(alpha + 1.0) * (cc / ((alpha + 1.0) * PI).sin());
        let model = TailDensityModel::new(spec.clone(), vec![(alpha, a)], 0.4, 2.0);
        let m = moments_from_tail(&model, 6.0).unwrap();
        assert!((m.moment(0.5) - a * PI).norm() < 1e-15);
        assert_eq!(m.moment(0.0), c(1.0, 0.0));
        let empty = TailDensityModel::new(spec.clone(), vec![], 0.5, 2.0).with_inner_moments(vec![1.0, 0.0, 0.25]);
        let m = moments_from_tail(&empty, 6.0).unwrap();
        assert_eq!(m.moment(2.0), c(0.25, 0.0));
        let bad = TailDensityModel::new(spec, vec![(0.5, c(1.0, 0.0))], 0.4, 2.0);
        assert!(matches!(moments_from_tail(&bad, 6.0), Err(Error::InvalidModel(_))));
        // moments → tail model → moments
        let m = cauchy(12.0);
        let back = moments_from_tail(&TailDensityModel::from_moments(&m), 12.0).unwrap();
        assert!(m.max_rel_diff(&back) < 1e-12);
    }

    #[test]
    fn f_and_voiculescu_forms() {
        let m = cauchy(10.0);
        let f = f_from_moments(&m).unwrap();
        assert_eq!(f.len(), 2);
        assert!((f.coeff(1.0) - c(0.0, -1.0)).norm() < 1e-14);
        let phi = voiculescu_from_moments(&m).unwrap();
        assert_eq!(phi.len(), 1);
        assert!((voiculescu_coefficient(&phi, 0.0) - c(0.0, 1.0)).norm() < 1e-14);
        assert!(moments_from_f(&f).unwrap().max_rel_diff(&m) < 1e-12);
        assert!(moments_from_voiculescu(&phi).unwrap().max_rel_diff(&m) < 1e-12);

        let sc = semicircle(14.0);
        let phi = voiculescu_from_moments(&sc).unwrap();
        assert!((voiculescu_coefficient(&phi, 1.0) - 1.0).norm() < 1e-9);
        for (_, g, v) in phi.iter() {
            if g != 2.0 {
                assert!(v.norm() < 1e-9);
            }
        }
        let d = MomentSeries::delta0(grid(&SemigroupSpec::naturals(), 6.0).unwrap());
        assert!(voiculescu_from_moments(&d).unwrap().is_zero());
        assert_eq!(f_from_moments(&d).unwrap(), identity_f(d.grid().clone()));
    }

    #[test]
    fn convolutions_of_cauchy() {
        let m = cauchy(12.0);
        for conv in [classical_convolve, boolean_convolve, monotone_convolve, free_convolve] {
            let out = conv(&m, &m).unwrap();
            for n in 0..=12 {
                let want = c(0.0, 2.0).powi(n);
                assert!((out.moment(n as f64) - want).norm() < 1e-9 * want.norm().max(1.0));
            }
            let d = MomentSeries::delta0(m.grid().clone());
            assert!(conv(&m, &d).unwrap().max_rel_diff(&m) < 1e-12);
        }
    }

    #[test]
    fn boolean_bernoulli_and_free_semicircle() {
        let g = grid(&SemigroupSpec::naturals(), 12.0).unwrap();
        let bern = MomentSeries::from_terms(g, (0..=6).map(|n| ((2 * n) as f64, c(1.0, 0.0)))).unwrap();
        let b2 = boolean_convolve(&bern, &bern).unwrap();
        for n in 0..=6 {
            assert!((b2.moment((2 * n) as f64) - 2f64.powi(n)).norm() < 1e-9);
        }
        let sc = semicircle(12.0);
        let s2 = free_convolve(&sc, &sc).unwrap();
        assert!((s2.moment(2.0) - 2.0).norm() < 1e-9);
        assert!((s2.moment(4.0) - 8.0).norm() < 1e-9);
    }

    #[test]
    fn monotone_is_not_commutative() {
        let g = grid(&SemigroupSpec::naturals(), 8.0).unwrap();
        let bern = MomentSeries::from_terms(g.clone(), (0..=4).map(|n| ((2 * n) as f64, c(1.0, 0.0)))).unwrap();
        let shifted = MomentSeries::from_terms(g, (0..=8).map(|n| (n as f64, c(1.0, 0.0)))).unwrap(); // δ₁
        let ab = monotone_convolve(&bern, &shifted).unwrap();
        let ba = monotone_convolve(&shifted, &bern).unwrap();
        assert!(ab.max_rel_diff(&ba) > 1e-3);
    }

    #[test]
    fn real_tail_to_complex() {
        let a = tail_real_to_complex(&[(0.5, 1.0), (0.25, 1.0)]).unwrap();
        assert!((a[0].1 - c(0.0, 1.0)).norm() < 1e-15);
        assert!((a[1].1 - c(-1.0, 1.0)).norm() < 1e-15);
        assert_eq!(tail_real_to_complex(&[(2.0, 1.0)]), Err(Error::LogTermObstruction(2.0)));
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let spec = SemigroupSpec::generated_by(&[phi]).unwrap();
        let b: Vec<(f64, f64)> = crate::semigroup::enumerate_up_to(&spec, 20.0)
            .unwrap()
            .into_iter()
            .filter(|e| e.value > 0.0 && !is_integer(e.value))
            .map(|e| (e.value, 0.1f64.powf(e.value)))
            .collect();
        let a = tail_real_to_complex(&b).unwrap();
        let growth = tail_growth(&a);
        assert!(growth.is_finite() && growth < 1.0);
    }
}
