//! Independent numerical ground truth for the series calculus.
//!
//! Nothing here calls the series arithmetic it is meant to check: transforms
//! are computed by adaptive quadrature of densities or characteristic
//! functions, and the brute-force product and reversion walk multi-indices
//! directly instead of using the grid's addition table.

use crate::error::{Error, Result};
use crate::quad::{integrate_to_infinity, integrate_with_limit, Integral};
use crate::series::{GenSeries, Normalization, Variable};
use crate::special::Branch;
use crate::transforms::{self, MomentSeries};
use num_complex::Complex64 as C64;
use std::cell::RefCell;
use std::f64::consts::PI;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Relative size of the truncated tail against the transform value.
pub const TAIL_REL_TARGET: f64 = 1e-10;
/// Largest number of half-periods integrated per side.
pub const MAX_HALF_PERIODS: f64 = 2.0e5;
/// Default y values for Stieltjes inversion.
pub const DEFAULT_Y_SEQUENCE: [f64; 3] = [1e-1, 3.162_277_660_168_379_5e-3, 1e-4];
/// Largest cutoff accepted by [`brute_revert`].
pub const BRUTE_REVERT_MAX_CUTOFF: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct QuadratureResult {
    pub value: C64,
    pub error_estimate: f64,
    /// Bound on the integral discarded beyond the truncation point.
    pub tail_bound: f64,
}

impl QuadratureResult {
    pub fn total_error(&self) -> f64 {
        self.error_estimate + self.tail_bound
    }
}

/// |ρ(x)| ≤ c|x|^{−β−1} for |x| ≥ from, with |ρ| nonincreasing there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerEnvelope {
    pub c: f64,
    pub beta_min: f64,
    pub from: f64,
}

/// Pointwise density with its support, optional breakpoints and tail envelope.
pub struct Density<'a> {
    pub eval: &'a dyn Fn(f64) -> f64,
    pub support: (f64, f64),
    pub breakpoints: Vec<f64>,
    pub envelope: Option<PowerEnvelope>,
    /// Holomorphic extension of the density to Re x ≥ from and Re x ≤ −from.
    pub continuation: Option<&'a dyn Fn(C64) -> C64>,
}

impl<'a> Density<'a> {
    pub fn compact(eval: &'a dyn Fn(f64) -> f64, lo: f64, hi: f64) -> Self {
        Density { eval, support: (lo, hi), breakpoints: Vec::new(), envelope: None, continuation: None }
    }

    pub fn heavy_tailed(eval: &'a dyn Fn(f64) -> f64, support: (f64, f64), envelope: PowerEnvelope) -> Self {
        Density { eval, support, breakpoints: Vec::new(), envelope: Some(envelope), continuation: None }
    }

    pub fn with_continuation(mut self, f: &'a dyn Fn(C64) -> C64) -> Self {
        self.continuation = Some(f);
        self
    }

    pub fn with_breakpoints(mut self, points: Vec<f64>) -> Self {
        self.breakpoints = points;
        self
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.support;
        if !(lo < hi) || lo.is_nan() || hi.is_nan() {
            return Err(Error::InvalidDensity(format!("empty support [{lo}, {hi}]")));
        }
        if lo.is_infinite() || hi.is_infinite() {
            match self.envelope {
                Some(e) if e.beta_min > 0.0 && e.c >= 0.0 && e.from > 0.0 && e.from.is_finite() => {}
                Some(e) => {
                    return Err(Error::InvalidDensity(format!(
                        "envelope c = {}, β = {}, from = {} is not integrable",
                        e.c, e.beta_min, e.from
                    )))
                }
                None => return Err(Error::InvalidDensity("unbounded support needs a power-law envelope".into())),
            }
        }
        Ok(())
    }

    /// Sorted finite cut points inside the support, including finite ends.
    fn cuts(&self, extra: &[f64]) -> Vec<f64> {
        let (lo, hi) = self.support;
        let mut v: Vec<f64> = self
            .breakpoints
            .iter()
            .chain(extra)
            .copied()
            .chain([lo, hi])
            .filter(|x| x.is_finite() && *x >= lo && *x <= hi)
            .collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

fn add(a: &mut Integral, b: Integral) {
    a.value += b.value;
    a.error += b.error;
}

fn zero_integral() -> Integral {
    Integral { value: ZERO, error: 0.0 }
}

/// ∫ over [a, b] split into pieces no longer than `step`.
fn integrate_stepped<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, step: f64) -> Integral {
    let mut out = zero_integral();
    if !(b > a) {
        return out;
    }
    let n = ((b - a) / step).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    for k in 0..n {
        let lo = a + k as f64 * h;
        let hi = if k + 1 == n { b } else { lo + h };
        add(&mut out, integrate_with_limit(f, lo, hi, 1e-17, 1e-13, 60));
    }
    out
}

/// ∫_a^∞ f for a > 0 via x = a·eˢ, which turns power tails into exponential ones.
fn integrate_log_tail<F: Fn(f64) -> C64>(f: &F, a: f64, decay: f64) -> Integral {
    let g = |s: f64| {
        let x = a * s.exp();
        f(x) * x
    };
    integrate_to_infinity(&g, 0.0, 1.0 / decay.max(0.05), 1e-17, 1e-13)
}

/// ∫ f over the support; unbounded ends are integrated from ±max(cut, from).
fn integrate_full<F: Fn(f64) -> C64>(d: &Density, f: &F, extra: &[f64], decay: f64) -> Integral {
    let (lo, hi) = d.support;
    let from = d.envelope.map(|e| e.from).unwrap_or(1.0);
    let mut pts = extra.to_vec();
    if hi.is_infinite() {
        pts.push(from);
    }
    if lo.is_infinite() {
        pts.push(-from);
    }
    let cuts = d.cuts(&pts);
    let mut out = zero_integral();
    for w in cuts.windows(2) {
        add(&mut out, integrate_with_limit(f, w[0], w[1], 1e-17, 1e-13, 400));
    }
    if hi.is_infinite() {
        let a = cuts.last().copied().unwrap_or(from).max(from);
        add(&mut out, integrate_log_tail(f, a, decay));
    }
    if lo.is_infinite() {
        let a = (-cuts.first().copied().unwrap_or(-from)).max(from);
        add(&mut out, integrate_log_tail(&|u: f64| f(-u), a, decay));
    }
    out
}

/// 𝔉(z) = ∫ e^{ixz} ρ(x) dx.
///
/// Integrates half-period by half-period on |x| ≤ X and bounds the rest by the
/// second mean value theorem: |∫_X^∞ e^{ixz}ρ| ≤ 2ρ(X)/|z| for monotone tails.
pub fn quadrature_fourier(d: &Density, z: f64) -> Result<QuadratureResult> {
    d.validate()?;
    if !z.is_finite() {
        return Err(Error::InvalidArgument(format!("z = {z} must be finite")));
    }
    let rho = d.eval;
    let f = |x: f64| C64::from_polar(rho(x), x * z);
    if z == 0.0 {
        let decay = d.envelope.map(|e| e.beta_min).unwrap_or(1.0);
        let r = integrate_full(d, &f, &[0.0], decay);
        return Ok(QuadratureResult { value: r.value, error_estimate: r.error, tail_bound: 0.0 });
    }
    let (lo, hi) = d.support;
    let half = PI / z.abs();
    let cuts = d.cuts(&[0.0]);
    let core_lo = cuts.first().copied().unwrap_or(0.0);
    let core_hi = cuts.last().copied().unwrap_or(0.0);
    let mut core = zero_integral();
    for w in cuts.windows(2) {
        add(&mut core, integrate_stepped(&f, w[0], w[1], half));
    }
    let env = d.envelope;
    let sides = lo.is_infinite() as u8 + hi.is_infinite() as u8;
    if sides == 0 {
        return Ok(QuadratureResult { value: core.value, error_estimate: core.error, tail_bound: 0.0 });
    }
    let env = env.expect("validated");
    if let Some(rho_c) = d.continuation {
        // ∫_X^∞ = iσ∫₀^∞ f(X + iσt)dt and ∫_{−∞}^{−X} = −iσ∫₀^∞ f(−X + iσt)dt, σ = sign z
        let sigma = z.signum();
        let fc = |x: C64| (I * z * x).exp() * rho_c(x);
        let mut total = core;
        if hi.is_infinite() {
            let x = ((core_hi.max(env.from) / half).ceil() + 8.0) * half;
            add(&mut total, integrate_stepped(&f, core_hi, x, half));
            let r = integrate_to_infinity(&|t: f64| fc(C64::new(x, sigma * t)), 0.0, 1.0 / z.abs(), 1e-17, 1e-13);
            add(&mut total, Integral { value: I * sigma * r.value, error: r.error });
        }
        if lo.is_infinite() {
            let x = (((-core_lo).max(env.from) / half).ceil() + 8.0) * half;
            add(&mut total, integrate_stepped(&f, -x, core_lo, half));
            let r = integrate_to_infinity(&|t: f64| fc(C64::new(-x, sigma * t)), 0.0, 1.0 / z.abs(), 1e-17, 1e-13);
            add(&mut total, Integral { value: -I * sigma * r.value, error: r.error });
        }
        return Ok(QuadratureResult { value: total.value, error_estimate: total.error, tail_bound: 0.0 });
    }
    let tail_at = |x: f64| 2.0 * env.c * x.powf(-env.beta_min - 1.0) / z.abs();
    let start_hi = core_hi.max(env.from);
    let start_lo = (-core_lo).max(env.from);
    let cap = |start: f64| start + MAX_HALF_PERIODS * half;
    // rough magnitude from the first stretch sets the tail target
    let probe_len = 64.0 * half;
    let mut probe = core.value;
    if hi.is_infinite() {
        probe += integrate_stepped(&f, core_hi, start_hi + probe_len, half).value;
    }
    if lo.is_infinite() {
        probe += integrate_stepped(&f, -start_lo - probe_len, core_lo, half).value;
    }
    let target = TAIL_REL_TARGET * probe.norm().max(1e-6);
    let x_for = |start: f64| {
        let want = (2.0 * env.c / (z.abs() * target / sides as f64)).powf(1.0 / (env.beta_min + 1.0));
        let x = want.max(start + probe_len).min(cap(start));
        // land on a zero of the phase
        (x / half).ceil() * half
    };
    let mut total = core;
    let mut tail_bound = 0.0;
    if hi.is_infinite() {
        let x = x_for(start_hi);
        add(&mut total, integrate_stepped(&f, core_hi, x, half));
        tail_bound += tail_at(x);
    }
    if lo.is_infinite() {
        let x = x_for(start_lo);
        add(&mut total, integrate_stepped(&f, -x, core_lo, half));
        tail_bound += tail_at(x);
    }
    Ok(QuadratureResult { value: total.value, error_estimate: total.error, tail_bound })
}

/// G(z) = ∫ ρ(x)/(z − x) dx for Im z < 0; unbounded ends are mapped, not truncated.
pub fn quadrature_stieltjes(d: &Density, z: C64) -> Result<QuadratureResult> {
    d.validate()?;
    if !(z.im < 0.0) {
        return Err(Error::InvalidArgument(format!("z = {z} must lie in the lower half-plane")));
    }
    let rho = d.eval;
    let f = |x: f64| rho(x) / (z - x);
    let w = -z.im;
    let extra: Vec<f64> = [0.0, 1.0, 4.0, 16.0]
        .iter()
        .flat_map(|k| [z.re - k * w, z.re + k * w])
        .chain([0.0])
        .collect();
    let decay = d.envelope.map(|e| e.beta_min + 1.0).unwrap_or(1.0);
    let r = integrate_full(d, &f, &extra, decay);
    Ok(QuadratureResult { value: r.value, error_estimate: r.error, tail_bound: 0.0 })
}

/// Characteristic function on t ≥ 0 with a bound L(T) ≥ ∫_T^∞ |𝔉(t)| dt.
pub struct CharacteristicFn<'a> {
    pub eval: &'a dyn Fn(f64) -> C64,
    pub tail_l1: &'a dyn Fn(f64) -> f64,
}

impl CharacteristicFn<'_> {
    fn horizon(&self, tol: f64) -> f64 {
        let mut t = 1.0;
        while (self.tail_l1)(t) > tol && t < 1e7 {
            t *= 1.5;
        }
        t
    }
}

/// ρ(x) = (1/π) Re ∫₀^∞ e^{−ixt} 𝔉(t) dt for real densities.
pub fn fourier_inversion(cf: &CharacteristicFn, x: f64) -> Result<QuadratureResult> {
    let t_max = cf.horizon(1e-14);
    let f = |t: f64| C64::from_polar(1.0, -x * t) * (cf.eval)(t);
    let step = if x == 0.0 { 1.0 } else { PI / x.abs() };
    let r = integrate_stepped(&f, 0.0, t_max, step.min(1.0));
    Ok(QuadratureResult {
        value: C64::new(r.value.re / PI, 0.0),
        error_estimate: r.error / PI,
        tail_bound: (cf.tail_l1)(t_max) / PI,
    })
}

/// G(z) = i ∫₀^∞ e^{−izt} 𝔉(t) dt for Im z < 0.
pub fn stieltjes_from_fourier(cf: &CharacteristicFn, z: C64) -> Result<QuadratureResult> {
    if !(z.im < 0.0) {
        return Err(Error::InvalidArgument(format!("z = {z} must lie in the lower half-plane")));
    }
    let t_max = cf.horizon(1e-14);
    let f = |t: f64| (-I * z * t).exp() * (cf.eval)(t);
    let step = if z.re == 0.0 { 1.0 } else { (PI / z.re.abs()).min(1.0) };
    let r = integrate_stepped(&f, 0.0, t_max, step);
    Ok(QuadratureResult { value: I * r.value, error_estimate: r.error, tail_bound: (cf.tail_l1)(t_max) })
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct InversionEstimate {
    pub value: f64,
    /// Gap between the full extrapolant and the one dropping the largest y.
    pub error_estimate: f64,
}

/// Polynomial extrapolation to 0 through (y_k, v_k) (Neville).
fn extrapolate_to_zero(ys: &[f64], vs: &[f64]) -> f64 {
    let mut p = vs.to_vec();
    let n = ys.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (ys[i + m] * p[i] - ys[i] * p[i + 1]) / (ys[i + m] - ys[i]);
        }
    }
    p[0]
}

/// ρ(x) ≈ lim_{y↓0} (1/π) Im G(x − iy), Richardson-extrapolated over `ys`.
pub fn stieltjes_inversion(g: &dyn Fn(C64) -> Result<C64>, x: f64, ys: &[f64]) -> Result<InversionEstimate> {
    if ys.is_empty() || ys.iter().any(|y| !(*y > 0.0)) {
        return Err(Error::InvalidArgument("y sequence must be nonempty and positive".into()));
    }
    let vs = ys.iter().map(|&y| g(C64::new(x, -y)).map(|v| v.im / PI)).collect::<Result<Vec<_>>>()?;
    let value = extrapolate_to_zero(ys, &vs);
    let error_estimate = if ys.len() > 1 {
        let (i_max, _) = ys.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("nonempty");
        let (ys2, vs2): (Vec<f64>, Vec<f64>) =
            ys.iter().zip(&vs).enumerate().filter(|(i, _)| *i != i_max).map(|(_, (y, v))| (*y, *v)).unzip();
        (value - extrapolate_to_zero(&ys2, &vs2)).abs()
    } else {
        f64::INFINITY
    };
    Ok(InversionEstimate { value, error_estimate })
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LaplaceLink {
    /// ∫₀^∞ 𝔉(z) e^{−yz} dz by quadrature.
    pub lhs: C64,
    /// −i G(−iy) from the series.
    pub rhs: C64,
    pub discrepancy: f64,
    pub quadrature_error: f64,
    pub series_tail: f64,
}

/// Fourier transform of a moment series as a closure for [`laplace_link_check`].
pub fn series_fourier(m: &MomentSeries) -> impl Fn(f64) -> Result<C64> {
    let ev = transforms::fourier_from_moments(m);
    let m0 = m.moment(0.0);
    move |z| if z == 0.0 { Ok(m0) } else { ev.eval(z).map(|e| e.value) }
}

/// Compares ∫₀^∞ 𝔉(z)e^{−yz}dz with −iG(−iy); requires y > 2cA.
pub fn laplace_link_check(fourier: &dyn Fn(f64) -> Result<C64>, m: &MomentSeries, y: f64) -> Result<LaplaceLink> {
    let c = m.grid().density_constant();
    let fit = crate::series::growth_fit(m.series());
    let a = fit.a.max(fit.tail_rate);
    if !(y > 2.0 * c * a) {
        return Err(Error::Divergence { modulus: y, radius: 2.0 * c * a });
    }
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let f = |z: f64| match fourier(z) {
        Ok(v) => v * (-y * z).exp(),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            ZERO
        }
    };
    let q = integrate_to_infinity(&f, 0.0, 1.0 / y, 1e-16, 1e-13);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let g = transforms::evaluate_stieltjes(m, C64::new(0.0, -y))?;
    let rhs = -I * g.value;
    Ok(LaplaceLink {
        lhs: q.value,
        rhs,
        discrepancy: (q.value - rhs).norm(),
        quadrature_error: q.error,
        series_tail: g.tail_bound,
    })
}

fn gamma_fn(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// Product by a nested loop over the representative multi-indices of both
/// factors, locating each summed multi-index by value.
pub fn brute_series_product(f: &GenSeries, g: &GenSeries) -> Result<GenSeries> {
    if f.spec() != g.spec() || f.variable() != g.variable() || f.normalization() != g.normalization() {
        return Err(Error::IncompatibleSeries("brute product needs matching series".into()));
    }
    let (small, other) = if f.cutoff() <= g.cutoff() { (f, g) } else { (g, f) };
    let grid = small.grid().clone();
    let gens = grid.spec().generators().to_vec();
    let gamma_weights = f.normalization() == Normalization::Gamma;
    let mut terms: Vec<(f64, C64)> = Vec::new();
    for (i, gi, a) in f.iter() {
        let ni = &f.grid().exponent(i).index.counts;
        for (j, gj, b) in g.iter() {
            let nj = &g.grid().exponent(j).index.counts;
            let v: f64 = ni.iter().zip(nj).zip(&gens).map(|((p, q), s)| (p + q) as f64 * s).sum();
            if v > grid.cutoff() * (1.0 + 1e-12) {
                continue;
            }
            let w = if gamma_weights { gamma_fn(v + 1.0) / (gamma_fn(gi + 1.0) * gamma_fn(gj + 1.0)) } else { 1.0 };
            terms.push((v, a * b * w));
        }
    }
    let _ = other;
    GenSeries::from_terms(grid, f.variable(), f.normalization(), f.offset() + g.offset(), terms)
}

fn single_term(like: &GenSeries, v: f64, c: C64) -> Result<GenSeries> {
    GenSeries::from_terms(like.grid().clone(), like.variable(), Normalization::Raw, 0, [(v, c)])
}

/// (1 + k)^β = Σ_n C(β, n) kⁿ with k of positive order.
fn brute_binomial(k: &GenSeries, beta: f64) -> Result<GenSeries> {
    let one = single_term(k, 0.0, ONE)?;
    let min = k.iter().map(|(_, g, _)| g).fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return Ok(one);
    }
    let n_max = (k.cutoff() / min).floor() as u32;
    let mut acc: Vec<(f64, C64)> = one.iter().map(|(_, g, c)| (g, c)).collect();
    let mut power = one;
    let mut coef = 1.0;
    for n in 1..=n_max {
        coef *= (beta - (n - 1) as f64) / n as f64;
        power = brute_series_product(&power, k)?;
        acc.extend(power.iter().map(|(_, g, c)| (g, c * coef)));
    }
    GenSeries::from_terms(k.grid().clone(), k.variable(), Normalization::Raw, 0, acc)
}

/// Compositional inverse of an F-form series by back-substitution, one
/// exponent at a time, at cutoffs up to [`BRUTE_REVERT_MAX_CUTOFF`].
pub fn brute_revert(f: &GenSeries) -> Result<GenSeries> {
    crate::series::check_f_form(f)?;
    if f.cutoff() > BRUTE_REVERT_MAX_CUTOFF {
        return Err(Error::InvalidArgument(format!(
            "brute reversion is limited to cutoff {BRUTE_REVERT_MAX_CUTOFF}, got {}",
            f.cutoff()
        )));
    }
    let bracket = f.with_offset(0);
    let grid = bracket.grid().clone();
    let mut k: Vec<(f64, C64)> = Vec::new();
    for l in 1..grid.len() {
        let lam = grid.value(l);
        let ks = GenSeries::from_terms(grid.clone(), Variable::Descending, Normalization::Raw, 0, k.clone())?;
        // coefficient of z^{−λ} in Σ_γ b_γ z^{−γ}(1 + k)^{1−γ}
        let mut c = ZERO;
        for (_, g, b) in bracket.iter() {
            if g > lam + 1e-12 {
                break;
            }
            let p = brute_binomial(&ks, 1.0 - g)?;
            c += b * p.coeff(lam - g);
        }
        k.push((lam, -c));
    }
    k.push((0.0, ONE));
    GenSeries::from_terms(grid, Variable::Descending, Normalization::Raw, -1, k)
}

/// G^α_{b,r}(z) = r^{1/α}((1 − (1 − b z^{−α})^{1/r})/b)^{1/α} evaluated
/// directly, taking the 1/α-th root nearest to 1/z.
pub fn mu_br_closed_form(alpha: f64, b: C64, r: f64, z: C64) -> Result<C64> {
    let w = Branch::Principal.pow(z, -alpha).ok_or_else(|| Error::Domain(format!("{z}")))?;
    let inner = (ONE - b * w).powf(1.0 / r);
    let base = (ONE - inner) / b;
    let principal = base.powf(1.0 / alpha) * r.powf(1.0 / alpha);
    let target = ONE / z;
    let turns = (1.0 / alpha).ceil() as i32 + 1;
    let best = (-turns..=turns)
        .map(|k| principal * C64::from_polar(1.0, 2.0 * PI * k as f64 / alpha))
        .min_by(|p, q| (p - target).norm().total_cmp(&(q - target).norm()))
        .expect("nonempty");
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::SemigroupSpec;
    use crate::series::{grid, product, revert_f};

    fn cauchy(x: f64) -> f64 {
        1.0 / (PI * (1.0 + x * x))
    }

    fn cauchy_density() -> Density<'static> {
        Density::heavy_tailed(&cauchy, (f64::NEG_INFINITY, f64::INFINITY), PowerEnvelope { c: 1.0 / PI, beta_min: 1.0, from: 1.0 })
    }

    #[test]
    fn cauchy_fourier() {
        let d = cauchy_density();
        let r = quadrature_fourier(&d, 1.0).unwrap();
        assert!((r.value - C64::new((-1.0f64).exp(), 0.0)).norm() < 1e-8, "{r:?}");
        let m = quadrature_fourier(&d, 0.0).unwrap();
        assert!((m.value - ONE).norm() < 1e-10);
        let minus = quadrature_fourier(&d, -1.0).unwrap();
        assert!((minus.value - r.value.conj()).norm() < 1e-12);
        let cc = |x: C64| ONE / (PI * (ONE + x * x));
        let rotated = cauchy_density().with_continuation(&cc);
        for z in [0.5, 1.0, 2.0, -1.0] {
            let r = quadrature_fourier(&rotated, z).unwrap();
            assert!((r.value.re - (-z.abs()).exp()).abs() < 1e-12 && r.value.im.abs() < 1e-12, "{z} {r:?}");
        }
    }

    #[test]
    fn pareto_half_fourier_decays_slowly_but_converges() {
        let rho = |x: f64| 0.5 * x.powf(-1.5);
        let d = Density::heavy_tailed(&rho, (1.0, f64::INFINITY), PowerEnvelope { c: 0.5, beta_min: 0.5, from: 1.0 });
        let r = quadrature_fourier(&d, 0.3).unwrap();
        assert!(r.tail_bound < 1e-8);
        let mass = quadrature_fourier(&d, 0.0).unwrap();
        assert!((mass.value - ONE).norm() < 1e-9);
        let rc = |x: C64| 0.5 * x.powf(-1.5);
        let exact = quadrature_fourier(&Density::heavy_tailed(&rho, (1.0, f64::INFINITY), PowerEnvelope { c: 0.5, beta_min: 0.5, from: 1.0 }).with_continuation(&rc), 0.3).unwrap();
        assert!((exact.value - r.value).norm() < r.tail_bound + 1e-9);
    }

    #[test]
    fn cauchy_stieltjes() {
        let d = cauchy_density();
        let r = quadrature_stieltjes(&d, C64::new(0.0, -3.0)).unwrap();
        assert!((r.value - C64::new(0.0, 0.25)).norm() < 1e-9, "{r:?}");
        let z = C64::new(-5.0, -2.0);
        let r = quadrature_stieltjes(&d, z).unwrap();
        assert!((r.value - ONE / (z - I)).norm() < 1e-9);
        assert!(quadrature_stieltjes(&d, C64::new(0.0, 1.0)).is_err());
    }

    #[test]
    fn narrow_bump_looks_like_a_point_mass() {
        let eps = 1e-3;
        let bump = move |x: f64| 0.75 / eps * (1.0 - (x / eps).powi(2)).max(0.0);
        let d = Density::compact(&bump, -eps, eps);
        let z = C64::new(0.0, -10.0);
        let r = quadrature_stieltjes(&d, z).unwrap();
        assert!((r.value - ONE / z).norm() < 1e-7);
    }

    #[test]
    fn missing_envelope_is_rejected() {
        let d = Density { eval: &cauchy, support: (0.0, f64::INFINITY), breakpoints: vec![], envelope: None, continuation: None };
        assert!(matches!(quadrature_fourier(&d, 1.0), Err(Error::InvalidDensity(_))));
        let bad = Density::heavy_tailed(&cauchy, (0.0, f64::INFINITY), PowerEnvelope { c: 1.0, beta_min: 0.0, from: 1.0 });
        assert!(matches!(quadrature_fourier(&bad, 1.0), Err(Error::InvalidDensity(_))));
    }

    #[test]
    fn cauchy_inversion() {
        let g = |z: C64| Ok(ONE / (z - I));
        let r = stieltjes_inversion(&g, 5.0, &DEFAULT_Y_SEQUENCE).unwrap();
        assert!((r.value - 1.0 / (26.0 * PI)).abs() < 1e-7, "{r:?}");
        let bump = |z: C64| Ok(ONE / z);
        let far = stieltjes_inversion(&bump, 3.0, &DEFAULT_Y_SEQUENCE).unwrap();
        assert!(far.value.abs() < 1e-8);
    }

    #[test]
    fn cauchy_characteristic_function_routes() {
        let f = |t: f64| C64::new((-t).exp(), 0.0);
        let tail = |t: f64| (-t).exp();
        let cf = CharacteristicFn { eval: &f, tail_l1: &tail };
        let r = fourier_inversion(&cf, 2.0).unwrap();
        assert!((r.value.re - cauchy(2.0)).abs() < 1e-10);
        let z = C64::new(1.0, -0.5);
        let g = stieltjes_from_fourier(&cf, z).unwrap();
        assert!((g.value - ONE / (z - I)).norm() < 1e-10);
    }

    #[test]
    fn laplace_link_for_point_mass_and_cauchy() {
        let g = grid(&SemigroupSpec::naturals(), 20.0).unwrap();
        let delta = MomentSeries::delta0(g.clone());
        let one = |_: f64| Ok(ONE);
        let l = laplace_link_check(&one, &delta, 5.0).unwrap();
        assert!((l.lhs - C64::new(0.2, 0.0)).norm() < 1e-12 && (l.rhs - C64::new(0.2, 0.0)).norm() < 1e-14);
        let m = MomentSeries::from_terms(g, (0..=20).map(|n| (n as f64, I.powu(n)))).unwrap();
        let e = |z: f64| Ok(C64::new((-z).exp(), 0.0));
        let l = laplace_link_check(&e, &m, 3.0).unwrap();
        assert!((l.lhs - C64::new(0.25, 0.0)).norm() < 1e-7 && l.discrepancy < 1e-7, "{l:?}");
        let s = series_fourier(&m);
        assert!(laplace_link_check(&s, &m, 3.0).unwrap().discrepancy < 1e-7);
        assert!(laplace_link_check(&e, &m, 1.0).is_err());
    }

    fn small_series(spec: &SemigroupSpec, seed: u64, norm: Normalization) -> GenSeries {
        let g = grid(spec, 4.0).unwrap();
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let terms: Vec<(f64, C64)> = g.values().iter().map(|&v| (v, C64::new(next(), next()))).collect();
        GenSeries::from_terms(g, Variable::Descending, norm, 0, terms).unwrap()
    }

    #[test]
    fn brute_product_agrees() {
        let spec = SemigroupSpec::generated_by(&[0.5, 0.7]).unwrap();
        for seed in 0..6 {
            for norm in [Normalization::Raw, Normalization::Gamma] {
                let f = small_series(&spec, seed, norm);
                let g = small_series(&spec, seed + 100, norm);
                let a = product(&f, &g).unwrap();
                let b = brute_series_product(&f, &g).unwrap();
                for (i, _, c) in a.iter() {
                    assert!((c - b.coeff_at(i)).norm() < 1e-12 * (1.0 + c.norm()));
                }
                assert_eq!(a.len(), b.len());
            }
        }
        let f = small_series(&spec, 7, Normalization::Raw);
        let unit = GenSeries::unit(f.grid().clone(), Variable::Descending, Normalization::Raw);
        assert_eq!(brute_series_product(&unit, &f).unwrap(), f);
    }

    #[test]
    fn brute_revert_matches_sweep() {
        let g = grid(&SemigroupSpec::naturals(), 6.0).unwrap();
        let f = GenSeries::from_terms(g, Variable::Descending, Normalization::Raw, -1, [(0.0, ONE), (2.0, -ONE)]).unwrap();
        let k = brute_revert(&f).unwrap();
        // (z + √(z² + 4))/2 = z + z⁻¹ − z⁻³ + 2z⁻⁵ − …
        for (v, c) in [(0.0, 1.0), (2.0, 1.0), (4.0, -1.0), (6.0, 2.0)] {
            assert!((k.coeff(v) - C64::new(c, 0.0)).norm() < 1e-13, "{v}");
        }
        assert_eq!(k.len(), 4);
        let spec = SemigroupSpec::generated_by(&[0.5, 0.7]).unwrap();
        let g = grid(&spec, 3.0).unwrap();
        let f = GenSeries::from_terms(
            g,
            Variable::Descending,
            Normalization::Raw,
            -1,
            [(0.0, ONE), (0.5, C64::new(0.3, -0.2)), (0.7, C64::new(-0.4, 0.1)), (1.2, C64::new(0.2, 0.5))],
        )
        .unwrap();
        let a = revert_f(&f).unwrap();
        let b = brute_revert(&f).unwrap();
        for (i, _, c) in a.iter() {
            assert!((c - b.coeff_at(i)).norm() < 1e-12);
        }
    }

    #[test]
    fn closed_form_mu_br_reduces_to_point_mass_at_r_one() {
        // r = 1: G = (z^{−α})^{1/α} = 1/z
        let z = C64::new(3.0, -4.0);
        let g = mu_br_closed_form(0.5, I, 1.0, z).unwrap();
        assert!((g - ONE / z).norm() < 1e-14);
        let g = mu_br_closed_form(2.0, ONE, 1.0, z).unwrap();
        assert!((g - ONE / z).norm() < 1e-14);
    }
}
