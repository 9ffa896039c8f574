//! Constructors for stable laws (classical, free, Boolean, monotone) and the
//! other explicit families: positive stable, stable mixtures, supremum and
//! last-passage densities, and μ^α_{b,r}.

use crate::error::{Error, Result};
use crate::semigroup::SemigroupSpec;
use crate::series::{self, binomial_power, exp_series, growth_fit, GenSeries, Normalization, Variable};
use crate::special::{factorial, gamma, Branch};
use crate::transforms::{self, moments_from_f, moments_from_voiculescu, MomentSeries, TailDensity};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

const ANGLE_TOL: f64 = 1e-12;
const RESONANCE_TOL: f64 = 1e-8;
/// Relative change of the fitted growth constant between the two cutoffs
/// below which a law is reported as cutoff-stable.
pub const STABLE_GROWTH_TOL: f64 = 0.01;
/// Relative increase above which a law is reported as diverging.
pub const UNSTABLE_GROWTH_TOL: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum StableKind {
    Classical,
    Free,
    Boolean,
    Monotone,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct StableParams {
    pub alpha: f64,
    pub b: C64,
    pub gamma_shift: f64,
    pub kind: StableKind,
}

impl StableParams {
    pub fn new(kind: StableKind, alpha: f64, b: C64, gamma_shift: f64) -> Result<Self> {
        let p = StableParams { alpha, b, gamma_shift, kind };
        p.validate()?;
        Ok(p)
    }

    /// Classical parametrization exp(iγz − c(1 − iβ tan(πα/2))|z|^α),
    /// converted through i^α b = −c(1 − iβ tan(πα/2)).
    pub fn from_classical(alpha: f64, c: f64, skew: f64, gamma_shift: f64) -> Result<Self> {
        if (alpha - 1.0).abs() < 1e-15 && skew != 0.0 {
            return Err(Error::InvalidParams("α = 1 with nonzero skewness has a logarithmic term".into()));
        }
        if !(c >= 0.0) || !(-1.0..=1.0).contains(&skew) {
            return Err(Error::InvalidParams("need c ≥ 0 and β ∈ [−1, 1]".into()));
        }
        let t = if alpha == 1.0 { 0.0 } else { (PI * alpha / 2.0).tan() };
        let rhs = C64::new(-c, c * skew * t);
        let b = rhs / crate::special::i_pow(alpha);
        // snap the phase onto the admissible interval when rounding pushes it out
        let b = snap_phase(alpha, b);
        StableParams::new(StableKind::Classical, alpha, b, gamma_shift)
    }

    /// Admissible interval for arg b.
    pub fn arg_range(alpha: f64) -> (f64, f64) {
        if alpha < 1.0 {
            ((1.0 - alpha) * PI, PI)
        } else if alpha == 1.0 {
            (0.0, PI)
        } else {
            (0.0, (2.0 - alpha) * PI)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(Error::InvalidParams(format!("α = {} outside (0, 2]", self.alpha)));
        }
        if !self.gamma_shift.is_finite() || !self.b.re.is_finite() || !self.b.im.is_finite() {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        if self.b == C64::new(0.0, 0.0) {
            return Ok(());
        }
        let (lo, hi) = Self::arg_range(self.alpha);
        let mut arg = self.b.arg();
        if arg < -ANGLE_TOL {
            arg += 2.0 * PI;
        }
        if arg < lo - ANGLE_TOL || arg > hi + ANGLE_TOL {
            return Err(Error::InvalidParams(format!(
                "arg b = {arg:.6} outside [{lo:.6}, {hi:.6}] for α = {}",
                self.alpha
            )));
        }
        Ok(())
    }

    /// Powers use the monotone branch only for monotone laws.
    pub fn branch(&self) -> Branch {
        match self.kind {
            StableKind::Monotone => Branch::Monotone,
            _ => Branch::Principal,
        }
    }
}

fn snap_phase(alpha: f64, b: C64) -> C64 {
    if b.norm() == 0.0 {
        return b;
    }
    let (lo, hi) = StableParams::arg_range(alpha);
    let mut arg = b.arg();
    if arg < -1e-9 {
        arg += 2.0 * PI;
    }
    if (arg - lo).abs() < 1e-9 {
        C64::from_polar(b.norm(), lo)
    } else if (arg - hi).abs() < 1e-9 {
        C64::from_polar(b.norm(), hi)
    } else {
        b
    }
}

/// Semigroup S_α (ℕ when α is an integer).
pub fn stable_semigroup(alpha: f64) -> Result<SemigroupSpec> {
    SemigroupSpec::generated_by(&[alpha])
}

/// Cutoff stability of the fitted growth constant.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MembershipDiagnosis {
    pub low_cutoff: f64,
    pub high_cutoff: f64,
    pub growth_low: f64,
    pub growth_high: f64,
    pub relative_change: f64,
    pub verdict: Membership,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Membership {
    /// Growth constant stable: geometric moment bound holds.
    Member,
    /// Growth constant keeps increasing with the cutoff.
    NonMember,
    /// Between the two thresholds.
    Inconclusive,
}

/// Growth constant used for cutoff comparisons: the envelope over the lower
/// half of the range combined with the extrapolated tail rate.
pub fn growth_constant(m: &MomentSeries) -> f64 {
    let fit = growth_fit(m.series());
    let half = m.truncate(m.cutoff() / 2.0).map(|h| growth_fit(h.series()).a).unwrap_or(fit.a);
    half.max(fit.tail_rate)
}

pub fn diagnose(low: &MomentSeries, high: &MomentSeries) -> MembershipDiagnosis {
    let a_low = growth_constant(low);
    let a_high = growth_constant(high);
    let rel = if a_low > 0.0 { (a_high - a_low) / a_low } else if a_high > 0.0 { f64::INFINITY } else { 0.0 };
    let verdict = if rel.abs() < STABLE_GROWTH_TOL {
        Membership::Member
    } else if rel > UNSTABLE_GROWTH_TOL {
        Membership::NonMember
    } else {
        Membership::Inconclusive
    };
    MembershipDiagnosis {
        low_cutoff: low.cutoff(),
        high_cutoff: high.cutoff(),
        growth_low: a_low,
        growth_high: a_high,
        relative_change: rel,
        verdict,
    }
}

/// A constructed law: its moments and the branch its powers use.
#[derive(Debug, Clone)]
pub struct StableLaw {
    pub params: StableParams,
    pub moments: MomentSeries,
    pub branch: Branch,
}

/// Moments of any of the four stable families.
pub fn stable_moments(params: &StableParams, cutoff: f64) -> Result<MomentSeries> {
    params.validate()?;
    match params.kind {
        StableKind::Classical => classical_moments(params, cutoff),
        StableKind::Free => free_stable(params, cutoff),
        StableKind::Boolean => boolean_stable(params, cutoff),
        StableKind::Monotone => monotone_stable(params.alpha, params.b, cutoff),
    }
}

fn classical_moments(params: &StableParams, cutoff: f64) -> Result<MomentSeries> {
    let grid = series::grid(&stable_semigroup(params.alpha)?, cutoff)?;
    // 𝔉(z) = exp(γ·(iz) + b·(iz)^α) as a series in w = iz
    let h = GenSeries::from_terms(
        grid,
        Variable::Ascending,
        Normalization::Raw,
        0,
        [(1.0, C64::new(params.gamma_shift, 0.0)), (params.alpha, params.b)],
    )?;
    MomentSeries::new(exp_series(&h)?.to_normalization(Normalization::Gamma))
}

/// Classical stable law: m_{m+nα} = Γ(m+nα+1)γ^m bⁿ/(m!n!), with the
/// membership diagnosis comparing cutoffs `cutoff/2` and `cutoff`.
pub fn classical_stable(params: &StableParams, cutoff: f64) -> Result<(StableLaw, MembershipDiagnosis)> {
    if params.kind != StableKind::Classical {
        return Err(Error::InvalidParams("expected classical parameters".into()));
    }
    let moments = stable_moments(params, cutoff)?;
    let low = stable_moments(params, cutoff / 2.0)?;
    let diag = diagnose(&low, &moments);
    Ok((StableLaw { params: *params, moments, branch: Branch::Principal }, diag))
}

/// Free stable: φ(z) = −γ + b z^{1−α}.
pub fn free_stable(params: &StableParams, cutoff: f64) -> Result<MomentSeries> {
    params.validate()?;
    let grid = series::grid(&stable_semigroup(params.alpha)?, cutoff)?;
    let phi = GenSeries::from_terms(
        grid,
        Variable::Descending,
        Normalization::Raw,
        -1,
        [(1.0, C64::new(-params.gamma_shift, 0.0)), (params.alpha, params.b)],
    )?;
    moments_from_voiculescu(&phi)
}

/// Boolean stable: z − F(z) = −γ + b z^{1−α}.
pub fn boolean_stable(params: &StableParams, cutoff: f64) -> Result<MomentSeries> {
    params.validate()?;
    let grid = series::grid(&stable_semigroup(params.alpha)?, cutoff)?;
    let f = GenSeries::from_terms(
        grid,
        Variable::Descending,
        Normalization::Raw,
        -1,
        [(0.0, C64::new(1.0, 0.0)), (1.0, C64::new(params.gamma_shift, 0.0)), (params.alpha, -params.b)],
    )?;
    moments_from_f(&f)
}

/// Strictly monotone stable: F(z) = (z^α − b)^{1/α} = z(1 − b z^{−α})^{1/α}.
pub fn monotone_stable(alpha: f64, b: C64, cutoff: f64) -> Result<MomentSeries> {
    StableParams::new(StableKind::Monotone, alpha, b, 0.0)?;
    let grid = series::grid(&stable_semigroup(alpha)?, cutoff)?;
    let base = GenSeries::from_terms(
        grid,
        Variable::Descending,
        Normalization::Raw,
        0,
        [(0.0, C64::new(1.0, 0.0)), (alpha, -b)],
    )?;
    moments_from_f(&binomial_power(&base, 1.0 / alpha)?.with_offset(-1))
}

pub fn stable_law(params: &StableParams, cutoff: f64) -> Result<StableLaw> {
    Ok(StableLaw { params: *params, moments: stable_moments(params, cutoff)?, branch: params.branch() })
}

/// One-sided α-stable density (1/π) Σ_{n≥1} (−1)^{n−1} sin(παn) Γ(nα+1)/n! x^{−1−nα}.
#[derive(Debug, Clone)]
pub struct PositiveStableDensity {
    pub alpha: f64,
    coeffs: Vec<f64>,
    x_min: f64,
}

/// Value with a bound on the omitted terms.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DensityValue {
    pub value: f64,
    pub remainder: f64,
}

pub fn positive_stable_density(alpha: f64, cutoff: f64) -> Result<PositiveStableDensity> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParams(format!("positive stable needs α ∈ (0, 1), got {alpha}")));
    }
    let n_max = (cutoff / alpha).floor().max(1.0) as u32;
    let coeffs: Vec<f64> = (1..=n_max)
        .map(|n| {
            let nf = n as f64;
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            sign * (PI * alpha * nf).sin() * gamma(nf * alpha + 1.0) / factorial(n) / PI
        })
        .collect();
    let a = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(k, c)| (c.abs() * PI).powf(1.0 / ((k + 1) as f64 * alpha)))
        .fold(0.0, f64::max);
    Ok(PositiveStableDensity { alpha, coeffs, x_min: series::GUARD_FACTOR * a })
}

impl PositiveStableDensity {
    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    /// Moments of the same law as a classical stable with b = e^{iπ(1−α)}.
    pub fn params(&self) -> StableParams {
        StableParams {
            alpha: self.alpha,
            b: C64::from_polar(1.0, PI * (1.0 - self.alpha)),
            gamma_shift: 0.0,
            kind: StableKind::Classical,
        }
    }

    pub fn eval(&self, x: f64) -> Result<DensityValue> {
        if x <= self.x_min {
            return Err(Error::OutsideValidityRegion { x, radius: self.x_min });
        }
        let mut s = 0.0;
        let mut last = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            let t = c * x.powf(-1.0 - (k + 1) as f64 * self.alpha);
            s += t;
            if *c != 0.0 {
                last = t.abs();
            }
        }
        // next terms shrink at least geometrically by (x_min/x)^α
        let q = (self.x_min / x).powf(self.alpha);
        Ok(DensityValue { value: s, remainder: last * q / (1.0 - q) })
    }
}

/// Mixture of symmetric α-stable laws with 𝔉(z) = ∫ e^{−|z|^α s} ν(ds).
///
/// m_{αn} = (−1)ⁿ m_n(ν) Γ(αn+1)/n! · e^{−iαnπ/2}, the phase carrying
/// i^{−αn} so that Σ m_γ (iz)^γ/Γ(γ+1) = Σ (−1)ⁿ m_n(ν) z^{αn}/n!.
pub fn stable_mixture(nu_moments: &[f64], alpha: f64, cutoff: f64) -> Result<(MomentSeries, TailDensity)> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParams(format!("stable mixture needs α ∈ (0, 1], got {alpha}")));
    }
    if nu_moments.first() != Some(&1.0) {
        return Err(Error::InvalidParams("ν must be a probability measure (m₀ = 1)".into()));
    }
    let grid = series::grid(&stable_semigroup(alpha)?, cutoff)?;
    let terms = nu_moments.iter().enumerate().filter(|(n, _)| *n as f64 * alpha <= cutoff).map(|(n, &mn)| {
        let g = alpha * n as f64;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        (g, C64::from_polar(sign * mn * gamma(g + 1.0) / factorial(n as u32), -PI * g / 2.0))
    });
    let m = MomentSeries::from_terms(grid, terms)?;
    let d = transforms::tail_from_moments(&m);
    Ok((m, d))
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SupremumSeriesParams {
    pub alpha: f64,
    pub rho: f64,
    pub m: usize,
    pub n: usize,
}

impl SupremumSeriesParams {
    pub fn new(alpha: f64, rho: f64) -> Self {
        SupremumSeriesParams { alpha, rho, m: 12, n: 12 }
    }
}

/// 1/Γ(x) for any real x, via reflection for negative arguments.
fn recip_gamma(x: f64) -> f64 {
    if x > 0.5 {
        return 1.0 / gamma(x);
    }
    if x.fract() == 0.0 {
        return 0.0;
    }
    (PI * x).sin() * gamma(1.0 - x) / PI
}

/// Density of the supremum of an α-stable process at time 1:
/// x^{−1−α} Σ_{m,n} b_{m,n+1} x^{−m−nα}.
#[derive(Debug, Clone)]
pub struct SupremumDensity {
    pub params: SupremumSeriesParams,
    /// coeffs[m][n] = b_{m,n+1}
    coeffs: Vec<Vec<f64>>,
}

/// b_{m,n} = (−1)^{m+n}/(Γ(1+m/α+n)Γ(−m−αn)) Π_{j≤m} sin(π(αρ+j−1)/α)/sin(πj/α)
///           · Π_{j≤n} sin(πα(ρ+j−1))/sin(παj).
pub fn supremum_coefficient(alpha: f64, rho: f64, m: usize, n: usize) -> Result<f64> {
    let mut prod = 1.0;
    for j in 1..=m {
        let jf = j as f64;
        let den = (PI * jf / alpha).sin();
        if den.abs() < RESONANCE_TOL {
            return Err(Error::Resonance { context: format!("sin(π·{j}/α)"), value: den.abs() });
        }
        prod *= (PI / alpha * (alpha * rho + jf - 1.0)).sin() / den;
    }
    for j in 1..=n {
        let jf = j as f64;
        let den = (PI * alpha * jf).sin();
        if den.abs() < RESONANCE_TOL {
            return Err(Error::Resonance { context: format!("sin(πα·{j})"), value: den.abs() });
        }
        prod *= (PI * alpha * (rho + jf - 1.0)).sin() / den;
    }
    let (mf, nf) = (m as f64, n as f64);
    let sign = if (m + n) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * recip_gamma(1.0 + mf / alpha + nf) * recip_gamma(-mf - alpha * nf) * prod)
}

pub fn supremum_density(params: SupremumSeriesParams) -> Result<SupremumDensity> {
    if !(params.alpha > 0.0 && params.alpha < 1.0) {
        return Err(Error::InvalidParams("supremum series needs α ∈ (0, 1)".into()));
    }
    if !(params.rho > 0.0 && params.rho < 1.0) {
        return Err(Error::InvalidParams("ρ must lie in (0, 1)".into()));
    }
    let coeffs = (0..=params.m)
        .map(|m| (0..=params.n).map(|n| supremum_coefficient(params.alpha, params.rho, m, n + 1)).collect())
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(SupremumDensity { params, coeffs })
}

impl SupremumDensity {
    pub fn coefficient(&self, m: usize, n_plus_one: usize) -> f64 {
        self.coeffs[m][n_plus_one - 1]
    }

    /// Partial sum with a remainder estimate from the outermost shell.
    pub fn eval(&self, x: f64) -> Result<DensityValue> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("supremum density needs x > 0, got {x}")));
        }
        let a = self.params.alpha;
        let (mm, nn) = (self.params.m, self.params.n);
        let mut total = 0.0;
        let mut shell = 0.0;
        let mut inner_shell = 0.0;
        for (m, row) in self.coeffs.iter().enumerate() {
            for (n, &b) in row.iter().enumerate() {
                let t = b * x.powf(-(m as f64) - n as f64 * a);
                total += t;
                if m == mm || n == nn {
                    shell += t.abs();
                } else if mm > 0 && nn > 0 && (m == mm - 1 || n == nn - 1) {
                    inner_shell += t.abs();
                }
            }
        }
        let pre = x.powf(-1.0 - a);
        let remainder = if inner_shell > 0.0 && shell < inner_shell {
            let q = shell / inner_shell;
            shell * q / (1.0 - q)
        } else if shell == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        Ok(DensityValue { value: total * pre, remainder: remainder * pre })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LastPassageParams {
    pub alpha: f64,
    pub d: u32,
    pub m: usize,
}

/// Density of the last exit time U₂ of a symmetric α-stable process in ℝ^d:
/// 2/(αΓ((d−α)/2)) Σ_m (−1)^m Γ((d+2m)/α)/(m! Γ((d−α)/2+m+1)) t^{−(d+2m)/α}.
#[derive(Debug, Clone)]
pub struct LastPassageDensity {
    pub params: LastPassageParams,
    coeffs: Vec<f64>,
}

pub fn last_passage_density(params: LastPassageParams) -> Result<LastPassageDensity> {
    let (a, d) = (params.alpha, params.d as f64);
    if !(a > 1.0 && a < d) {
        return Err(Error::InvalidParams(format!("need 1 < α < d, got α = {a}, d = {d}")));
    }
    let h = (d - a) / 2.0;
    let pre = 2.0 / (a * gamma(h));
    let coeffs = (0..=params.m)
        .map(|m| {
            let mf = m as f64;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            pre * sign * (ln_ratio((d + 2.0 * mf) / a, mf + 1.0, h + mf + 1.0)).exp()
        })
        .collect();
    Ok(LastPassageDensity { params, coeffs })
}

/// ln(Γ(a)/(Γ(b)Γ(c))) for positive arguments.
fn ln_ratio(a: f64, b: f64, c: f64) -> f64 {
    if a < 150.0 && b < 150.0 && c < 150.0 {
        (gamma(a) / (gamma(b) * gamma(c))).ln()
    } else {
        crate::special::ln_gamma(a) - crate::special::ln_gamma(b) - crate::special::ln_gamma(c)
    }
}

impl LastPassageDensity {
    pub fn coefficient(&self, m: usize) -> f64 {
        self.coeffs[m]
    }

    /// Exponents (d+2m)/α of t^{−·}.
    pub fn exponent(&self, m: usize) -> f64 {
        (self.params.d as f64 + 2.0 * m as f64) / self.params.alpha
    }

    pub fn eval(&self, t: f64) -> Result<DensityValue> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("last-passage density needs t > 0, got {t}")));
        }
        let terms: Vec<f64> = self.coeffs.iter().enumerate().map(|(m, c)| c * t.powf(-self.exponent(m))).collect();
        let value = terms.iter().sum();
        let k = terms.len();
        let remainder = if k >= 2 && terms[k - 1].abs() < terms[k - 2].abs() {
            let q = terms[k - 1].abs() / terms[k - 2].abs();
            terms[k - 1].abs() * q / (1.0 - q)
        } else {
            terms.last().map(|t| t.abs()).unwrap_or(0.0)
        };
        Ok(DensityValue { value, remainder })
    }
}

/// Admissibility of (α, b, r) for μ^α_{b,r}.
pub fn check_mu_br(alpha: f64, b: C64, r: f64) -> Result<()> {
    if !(r >= 1.0 && r.is_finite()) {
        return Err(Error::InvalidParams(format!("r = {r} must be in [1, ∞)")));
    }
    if !(alpha > 0.0 && alpha <= 2.0) || b == C64::new(0.0, 0.0) {
        return Err(Error::InvalidParams("need α ∈ (0, 2] and b ≠ 0".into()));
    }
    let (lo, hi) = if alpha <= 1.0 { ((1.0 - alpha) * PI, PI) } else { (0.0, (2.0 - alpha) * PI) };
    let mut arg = b.arg();
    if arg < -ANGLE_TOL {
        arg += 2.0 * PI;
    }
    if arg < lo - ANGLE_TOL || arg > hi + ANGLE_TOL {
        return Err(Error::InvalidParams(format!("arg b = {arg} outside [{lo}, {hi}]")));
    }
    Ok(())
}

/// Stieltjes series of μ^α_{b,r}, G(z) = r^{1/α}((1 − (1 − b z^{−α})^{1/r})/b)^{1/α}.
///
/// With u = b z^{−α}, 1 − (1 − u)^{1/r} = (u/r)(1 + q), so
/// G = z^{−1}(1 + q)^{1/α}.
pub fn mu_br(alpha: f64, b: C64, r: f64, cutoff: f64) -> Result<GenSeries> {
    check_mu_br(alpha, b, r)?;
    let spec = stable_semigroup(alpha)?;
    let wide = series::grid(&spec, cutoff + alpha)?;
    let inner = GenSeries::from_terms(
        wide,
        Variable::Descending,
        Normalization::Raw,
        0,
        [(0.0, C64::new(1.0, 0.0)), (alpha, -b)],
    )?;
    let p = binomial_power(&inner, 1.0 / r)?;
    // (1 − p)·r/u: coefficient at kα moves to (k−1)α
    let grid = series::grid(&spec, cutoff)?;
    let mut terms = Vec::new();
    for (_, g, c) in p.iter() {
        if g == 0.0 {
            continue;
        }
        let k = (g / alpha).round();
        if ((k * alpha) - g).abs() > 1e-9 * g.max(1.0) {
            return Err(Error::Internal(format!("unexpected exponent {g} in (1 − bz^−α)^(1/r)")));
        }
        let target = (k - 1.0) * alpha;
        if target <= cutoff * (1.0 + 1e-12) {
            terms.push((target, -c * r / b));
        }
    }
    let one_plus_q = GenSeries::from_terms(grid, Variable::Descending, Normalization::Raw, 0, terms)?;
    Ok(binomial_power(&one_plus_q, 1.0 / alpha)?.with_offset(1))
}
