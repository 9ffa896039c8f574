//! Generalized power series Σ_{γ∈S} c_γ w^{γ+offset} with w = z or 1/z.
//!
//! Coefficients live on a shared [`Grid`] (the enumerated semigroup up to a
//! cutoff). All arithmetic is graded: a product or power never needs terms
//! above the cutoff to be exact below it.

use crate::error::{Error, Result};
use crate::semigroup::{Grid, SemigroupSpec};
use crate::special::{gamma, Branch};
use num_complex::Complex64 as C64;
use std::collections::BTreeMap;
use std::sync::Arc;

pub const DEFAULT_CUTOFF: f64 = 20.0;
/// Safety factor applied to c·A for descending evaluation.
/// Slope-fit residual beyond which [`tail_rate`] falls back to the chord.
const MAX_SLOPE_RMS: f64 = 0.1;
pub const GUARD_FACTOR: f64 = 1.25;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Variable {
    /// Powers of z.
    Ascending,
    /// Powers of 1/z.
    Descending,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Normalization {
    Raw,
    /// Stored c_γ stands for the term c_γ·w^γ/Γ(γ+1).
    Gamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum BoundShape {
    /// |c_γ| ≤ A^γ
    Pow,
    /// |c_γ| ≤ A^{γ+1}
    PowPlusOne,
}

/// Geometric coefficient bound fitted to the retained terms.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GrowthBound {
    /// Smallest A with |c_γ| ≤ A^{γ(+1)} over all retained γ > 0.
    pub a: f64,
    pub shape: BoundShape,
    pub fitted_over: f64,
    /// Tail growth rate: e^ρ where ρ is the extrapolated slope of
    /// log|c_γ| against γ over the upper half of the retained range,
    /// with polynomial prefactors γ^κ removed.
    pub tail_rate: f64,
}

impl GrowthBound {
    /// Bound used for guards and tail estimates: the larger of the envelope
    /// and the extrapolated tail rate, never below 1.
    pub fn effective(&self) -> f64 {
        self.a.max(self.tail_rate).max(1.0)
    }
}

/// Value of a truncated series at a point together with a bound on the
/// discarded tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: C64,
    pub tail_bound: f64,
}

#[derive(Debug, Clone)]
pub struct GenSeries {
    grid: Arc<Grid>,
    variable: Variable,
    normalization: Normalization,
    offset: i32,
    terms: BTreeMap<usize, C64>,
    truncated: bool,
}

impl PartialEq for GenSeries {
    fn eq(&self, other: &Self) -> bool {
        self.grid.same_as(&other.grid)
            && self.variable == other.variable
            && self.normalization == other.normalization
            && self.offset == other.offset
            && self.terms == other.terms
    }
}

/// Shared grid constructor; series built from equal specs and cutoffs
/// interoperate regardless of which `Arc` they hold.
pub fn grid(spec: &SemigroupSpec, cutoff: f64) -> Result<Arc<Grid>> {
    Ok(Arc::new(Grid::new(spec, cutoff)?))
}

impl GenSeries {
    pub fn zero(grid: Arc<Grid>, variable: Variable, normalization: Normalization, offset: i32) -> Self {
        GenSeries { grid, variable, normalization, offset, terms: BTreeMap::new(), truncated: false }
    }

    /// The series with the single term 1·w⁰.
    pub fn unit(grid: Arc<Grid>, variable: Variable, normalization: Normalization) -> Self {
        let mut s = Self::zero(grid, variable, normalization, 0);
        s.terms.insert(0, ONE);
        s
    }

    /// Build from (exponent, coefficient) pairs. Exponents above the cutoff
    /// are dropped and flagged; exponents outside S are rejected.
    pub fn from_terms(
        grid: Arc<Grid>,
        variable: Variable,
        normalization: Normalization,
        offset: i32,
        terms: impl IntoIterator<Item = (f64, C64)>,
    ) -> Result<Self> {
        let mut s = Self::zero(grid, variable, normalization, offset);
        for (v, c) in terms {
            if v > s.grid.cutoff() * (1.0 + 1e-12) {
                s.truncated = true;
                continue;
            }
            let i = s
                .grid
                .find(v)
                .ok_or_else(|| Error::InvalidArgument(format!("exponent {v} is not in the semigroup")))?;
            *s.terms.entry(i).or_insert(ZERO) += c;
        }
        s.canonicalize();
        Ok(s)
    }

    pub(crate) fn from_dense(
        grid: Arc<Grid>,
        variable: Variable,
        normalization: Normalization,
        offset: i32,
        dense: &[C64],
    ) -> Self {
        let terms = dense.iter().enumerate().filter(|(_, c)| **c != ZERO).map(|(i, c)| (i, *c)).collect();
        GenSeries { grid, variable, normalization, offset, terms, truncated: false }
    }

    fn canonicalize(&mut self) {
        self.terms.retain(|_, c| *c != ZERO);
    }

    fn like(&self, offset: i32, terms: BTreeMap<usize, C64>) -> Self {
        let mut s = GenSeries {
            grid: self.grid.clone(),
            variable: self.variable,
            normalization: self.normalization,
            offset,
            terms,
            truncated: self.truncated,
        };
        s.canonicalize();
        s
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }
    pub fn spec(&self) -> &SemigroupSpec {
        self.grid.spec()
    }
    pub fn cutoff(&self) -> f64 {
        self.grid.cutoff()
    }
    pub fn variable(&self) -> Variable {
        self.variable
    }
    pub fn normalization(&self) -> Normalization {
        self.normalization
    }
    pub fn offset(&self) -> i32 {
        self.offset
    }
    /// True when some term was discarded for lying above the cutoff.
    pub fn truncated(&self) -> bool {
        self.truncated
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient at semigroup exponent γ (zero when absent).
    pub fn coeff(&self, gamma: f64) -> C64 {
        self.grid.find(gamma).and_then(|i| self.terms.get(&i).copied()).unwrap_or(ZERO)
    }

    pub fn coeff_at(&self, index: usize) -> C64 {
        self.terms.get(&index).copied().unwrap_or(ZERO)
    }

    pub fn constant_term(&self) -> C64 {
        self.coeff_at(0)
    }

    /// (grid index, exponent γ, coefficient) in ascending γ.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64, C64)> + '_ {
        self.terms.iter().map(|(&i, &c)| (i, self.grid.value(i), c))
    }

    pub fn dense(&self) -> Vec<C64> {
        let mut d = vec![ZERO; self.grid.len()];
        for (&i, &c) in &self.terms {
            d[i] = c;
        }
        d
    }

    /// Same coefficients with a different offset.
    pub fn with_offset(&self, offset: i32) -> Self {
        self.like(offset, self.terms.clone())
    }

    /// Same coefficients reinterpreted under another variable/normalization.
    pub fn reinterpret(&self, variable: Variable, normalization: Normalization, offset: i32) -> Self {
        let mut s = self.like(offset, self.terms.clone());
        s.variable = variable;
        s.normalization = normalization;
        s
    }

    pub fn map_coeffs(&self, mut f: impl FnMut(f64, C64) -> C64) -> Self {
        let terms = self.terms.iter().map(|(&i, &c)| (i, f(self.grid.value(i), c))).collect();
        self.like(self.offset, terms)
    }

    pub fn scale(&self, a: C64) -> Self {
        self.map_coeffs(|_, c| c * a)
    }

    pub fn conj(&self) -> Self {
        self.map_coeffs(|_, c| c.conj())
    }

    /// Multiply by w^γ for the grid exponent at `index`.
    pub fn shift(&self, index: usize) -> Self {
        let mut terms = BTreeMap::new();
        let mut truncated = self.truncated;
        for (&i, &c) in &self.terms {
            match self.grid.add(i, index) {
                Some(k) => {
                    terms.insert(k, c);
                }
                None => truncated = true,
            }
        }
        let mut s = self.like(self.offset, terms);
        s.truncated = truncated;
        s
    }

    /// Re-express on a (smaller or equal) grid of the same semigroup.
    pub fn regrid(&self, target: &Arc<Grid>) -> Result<Self> {
        if self.grid.same_as(target) {
            let mut s = self.clone();
            s.grid = target.clone();
            return Ok(s);
        }
        if self.grid.spec() != target.spec() {
            return Err(Error::IncompatibleSeries("different semigroups".into()));
        }
        let mut terms = BTreeMap::new();
        let mut truncated = self.truncated;
        for (_, v, c) in self.iter() {
            match target.find(v) {
                Some(k) if v <= target.cutoff() * (1.0 + 1e-12) => {
                    terms.insert(k, c);
                }
                _ => truncated = true,
            }
        }
        let mut s = GenSeries {
            grid: target.clone(),
            variable: self.variable,
            normalization: self.normalization,
            offset: self.offset,
            terms,
            truncated,
        };
        s.canonicalize();
        Ok(s)
    }

    /// Truncate to a smaller cutoff.
    pub fn truncate(&self, cutoff: f64) -> Result<Self> {
        if cutoff >= self.cutoff() {
            return Ok(self.clone());
        }
        self.regrid(&grid(self.spec(), cutoff)?)
    }

    /// Convert stored coefficients between RAW and GAMMA bookkeeping.
    pub fn to_normalization(&self, normalization: Normalization) -> Self {
        let mut s = match (self.normalization, normalization) {
            (Normalization::Raw, Normalization::Gamma) => self.map_coeffs(|g, c| c * gamma(g + 1.0)),
            (Normalization::Gamma, Normalization::Raw) => self.map_coeffs(|g, c| c / gamma(g + 1.0)),
            _ => self.clone(),
        };
        s.normalization = normalization;
        s
    }
}

fn check_compatible(f: &GenSeries, g: &GenSeries) -> Result<()> {
    if f.variable != g.variable {
        return Err(Error::IncompatibleSeries("mismatched variable".into()));
    }
    if f.normalization != g.normalization {
        return Err(Error::IncompatibleSeries("mismatched normalization".into()));
    }
    if f.spec() != g.spec() {
        return Err(Error::IncompatibleSeries("mismatched semigroup".into()));
    }
    Ok(())
}

/// Bring two series onto the grid with the smaller cutoff.
pub fn align(f: &GenSeries, g: &GenSeries) -> Result<(GenSeries, GenSeries)> {
    check_compatible(f, g)?;
    if f.grid.same_as(&g.grid) {
        let g2 = g.regrid(&f.grid)?;
        return Ok((f.clone(), g2));
    }
    let target = if f.cutoff() <= g.cutoff() { f.grid.clone() } else { g.grid.clone() };
    Ok((f.regrid(&target)?, g.regrid(&target)?))
}

/// a·f + b·g.
pub fn linear_combine(a: C64, f: &GenSeries, b: C64, g: &GenSeries) -> Result<GenSeries> {
    let (f, g) = align(f, g)?;
    if f.offset != g.offset {
        return Err(Error::IncompatibleSeries(format!("offsets {} and {}", f.offset, g.offset)));
    }
    let mut terms: BTreeMap<usize, C64> = f.terms.iter().map(|(&i, &c)| (i, a * c)).collect();
    for (&i, &c) in &g.terms {
        *terms.entry(i).or_insert(ZERO) += b * c;
    }
    let mut s = f.like(f.offset, terms);
    s.truncated = f.truncated || g.truncated;
    Ok(s)
}

fn raw_product(f: &GenSeries, g: &GenSeries) -> (BTreeMap<usize, C64>, bool) {
    let grid = &f.grid;
    let mut out: BTreeMap<usize, C64> = BTreeMap::new();
    let mut truncated = f.truncated || g.truncated;
    for (&i, &a) in &f.terms {
        for (&j, &b) in &g.terms {
            match grid.add(i, j) {
                Some(k) => *out.entry(k).or_insert(ZERO) += a * b,
                None => {
                    truncated = true;
                    if grid.value(i) + grid.value(j) > grid.cutoff() + 1.0 {
                        break;
                    }
                }
            }
        }
    }
    (out, truncated)
}

/// Product of two series. GAMMA bookkeeping realizes the binomial moment
/// convolution Σ Γ(β+1)/(Γ(γ+1)Γ(δ+1)) c_γ c'_δ.
pub fn product(f: &GenSeries, g: &GenSeries) -> Result<GenSeries> {
    let (f, g) = align(f, g)?;
    let offset = f.offset + g.offset;
    match f.normalization {
        Normalization::Raw => {
            let (terms, truncated) = raw_product(&f, &g);
            let mut s = f.like(offset, terms);
            s.truncated = truncated;
            Ok(s)
        }
        Normalization::Gamma => {
            let fr = f.to_normalization(Normalization::Raw);
            let gr = g.to_normalization(Normalization::Raw);
            let (terms, truncated) = raw_product(&fr, &gr);
            let mut s = fr.like(offset, terms).to_normalization(Normalization::Gamma);
            s.truncated = truncated;
            Ok(s)
        }
    }
}

fn require_raw(f: &GenSeries, what: &str) -> Result<()> {
    if f.normalization != Normalization::Raw {
        return Err(Error::IncompatibleSeries(format!("{what} requires RAW normalization")));
    }
    Ok(())
}

/// Multiplicative inverse: g with f·g = 1 up to the cutoff.
///
/// Solved degree by degree: g₀ = 1/c₀ and
/// g_β = −(1/c₀) Σ_{γ>0, γ+δ=β} c_γ g_δ, which is the graded geometric
/// series (1/c₀)Σ_k (1 − f/c₀)^k summed exponent by exponent.
pub fn reciprocal(f: &GenSeries) -> Result<GenSeries> {
    require_raw(f, "reciprocal")?;
    let c0 = f.constant_term();
    if c0 == ZERO {
        return Err(Error::NotInvertible);
    }
    let grid = &f.grid;
    let n = grid.len();
    let mut acc = vec![ZERO; n];
    let mut g = vec![ZERO; n];
    let tail: Vec<(usize, C64)> = f.terms.iter().filter(|(&i, _)| i > 0).map(|(&i, &c)| (i, c)).collect();
    let inv = ONE / c0;
    for d in 0..n {
        g[d] = if d == 0 { inv } else { -inv * acc[d] };
        if g[d] == ZERO {
            continue;
        }
        for &(i, c) in &tail {
            if let Some(k) = grid.add(i, d) {
                acc[k] += c * g[d];
            }
        }
    }
    let mut s = GenSeries::from_dense(grid.clone(), f.variable, Normalization::Raw, -f.offset, &g);
    s.truncated = f.truncated;
    Ok(s)
}

/// Pairs (ε, δ) with ε > 0 and value(ε) + value(δ) = value(λ), per λ.
fn pair_table(grid: &Grid) -> Vec<Vec<(usize, usize)>> {
    let n = grid.len();
    let mut pairs = vec![Vec::new(); n];
    for e in 1..n {
        for d in 0..n {
            match grid.add(e, d) {
                Some(l) => pairs[l].push((e, d)),
                None => {
                    if grid.value(e) + grid.value(d) > grid.cutoff() + 1.0 {
                        break;
                    }
                }
            }
        }
    }
    pairs
}

/// Dense (1+h)^β with h given densely (h[0] ignored, treated as 0).
///
/// Uses the identity f·(w u') = β (w f')·u for u = f^β, which for exponent
/// values λ gives u_λ = (1/λ) Σ_{ε+δ=λ, ε>0} (βε − δ) h_ε u_δ.
fn dense_power(grid: &Grid, pairs: &[Vec<(usize, usize)>], h: &[C64], beta: f64, upto: usize) -> Vec<C64> {
    let mut u = vec![ZERO; grid.len()];
    u[0] = ONE;
    for l in 1..upto.min(grid.len()) {
        let lam = grid.value(l);
        let mut s = ZERO;
        for &(e, d) in &pairs[l] {
            if h[e] != ZERO && u[d] != ZERO {
                s += h[e] * u[d] * (beta * grid.value(e) - grid.value(d));
            }
        }
        u[l] = s / lam;
    }
    u
}

/// Generalized binomial power (1 + h)^β = Σ_n C(β, n) hⁿ, truncated at the cutoff.
pub fn binomial_power(f: &GenSeries, beta: f64) -> Result<GenSeries> {
    require_raw(f, "binomial_power")?;
    let c0 = f.constant_term();
    if (c0 - ONE).norm() > 1e-12 {
        return Err(Error::NormalizeFirst(format!("{c0}")));
    }
    if f.offset != 0 {
        return Err(Error::InvalidArgument("binomial_power needs offset 0".into()));
    }
    let pairs = pair_table(&f.grid);
    let mut h = f.dense();
    h[0] = ZERO;
    let u = dense_power(&f.grid, &pairs, &h, beta, f.grid.len());
    let mut s = GenSeries::from_dense(f.grid.clone(), f.variable, Normalization::Raw, 0, &u);
    s.truncated = f.truncated;
    Ok(s)
}

/// exp(h) for h with zero constant term, graded.
pub fn exp_series(h: &GenSeries) -> Result<GenSeries> {
    require_raw(h, "exp_series")?;
    if h.constant_term() != ZERO || h.offset != 0 {
        return Err(Error::InvalidArgument("exp_series needs a series of positive minimal order".into()));
    }
    // λ e_λ = Σ_{ε+δ=λ, ε>0} ε h_ε e_δ
    let grid = &h.grid;
    let pairs = pair_table(grid);
    let hd = h.dense();
    let mut e = vec![ZERO; grid.len()];
    e[0] = ONE;
    for l in 1..grid.len() {
        let mut s = ZERO;
        for &(i, d) in &pairs[l] {
            if hd[i] != ZERO && e[d] != ZERO {
                s += hd[i] * e[d] * grid.value(i);
            }
        }
        e[l] = s / grid.value(l);
    }
    Ok(GenSeries::from_dense(grid.clone(), h.variable, Normalization::Raw, 0, &e))
}

/// Checks for F-form: F(z) = z·Σ b_γ z^{−γ}, b₀ = 1, stored as the bracket
/// with offset −1 (RAW, DESCENDING).
pub fn check_f_form(f: &GenSeries) -> Result<()> {
    if f.variable != Variable::Descending || f.normalization != Normalization::Raw || f.offset != -1 {
        return Err(Error::InvalidForm("expected RAW descending series premultiplied by z".into()));
    }
    if (f.constant_term() - ONE).norm() > 1e-12 {
        return Err(Error::InvalidForm(format!("leading coefficient {} ≠ 1", f.constant_term())));
    }
    Ok(())
}

/// Identity map z in F-form.
pub fn identity_f(grid: Arc<Grid>) -> GenSeries {
    GenSeries::unit(grid, Variable::Descending, Normalization::Raw).with_offset(-1)
}

/// outer ∘ inner for F-form series.
///
/// With inner = z(1 + h): outer(inner(z)) = z Σ_γ b_γ z^{−γ}(1 + h)^{1−γ}.
pub fn compose_f(outer: &GenSeries, inner: &GenSeries) -> Result<GenSeries> {
    check_f_form(outer)?;
    check_f_form(inner)?;
    let (outer, inner) = align(outer, inner)?;
    let grid = outer.grid.clone();
    let pairs = pair_table(&grid);
    let mut h = inner.dense();
    h[0] = ZERO;
    let n = grid.len();
    let mut out = vec![ZERO; n];
    for (&gi, &b) in &outer.terms {
        // only exponents λ = γ + δ ≤ cutoff are needed
        let upto = grid.values().partition_point(|&v| v <= grid.cutoff() - grid.value(gi) + 1e-9);
        let p = dense_power(&grid, &pairs, &h, 1.0 - grid.value(gi), upto);
        for (d, &c) in p.iter().enumerate().take(upto) {
            if c != ZERO {
                if let Some(k) = grid.add(gi, d) {
                    out[k] += b * c;
                }
            }
        }
    }
    let mut s = GenSeries::from_dense(grid, Variable::Descending, Normalization::Raw, -1, &out);
    s.truncated = outer.truncated || inner.truncated;
    Ok(s)
}

/// Compositional inverse K of an F-form series: F(K(z)) = z.
///
/// Writing K(z) = z(1 + k), the coefficients solve
/// k = −Σ_{γ>0} b_γ z^{−γ}(1 + k)^{1−γ}. Every term on the right at
/// exponent λ only involves k below λ, so one ascending sweep, advancing
/// each power (1+k)^{1−γ} alongside k, determines all coefficients exactly.
pub fn revert_f(f: &GenSeries) -> Result<GenSeries> {
    check_f_form(f)?;
    let grid = f.grid.clone();
    let n = grid.len();
    let pairs = pair_table(&grid);
    let support: Vec<(usize, C64, f64)> =
        f.terms.iter().filter(|(&i, _)| i > 0).map(|(&i, &c)| (i, c, 1.0 - grid.value(i))).collect();
    // sub[j][λ] = δ with value(δ) + value(γ_j) = value(λ)
    let sub: Vec<Vec<Option<usize>>> = support
        .iter()
        .map(|&(gi, _, _)| {
            let mut m = vec![None; n];
            for d in 0..n {
                if let Some(l) = grid.add(gi, d) {
                    m[l] = Some(d);
                }
            }
            m
        })
        .collect();
    let mut k = vec![ZERO; n];
    let mut powers: Vec<Vec<C64>> = support
        .iter()
        .map(|_| {
            let mut p = vec![ZERO; n];
            p[0] = ONE;
            p
        })
        .collect();
    for l in 1..n {
        let mut s = ZERO;
        for (j, &(_, b, _)) in support.iter().enumerate() {
            if let Some(d) = sub[j][l] {
                s += b * powers[j][d];
            }
        }
        k[l] = -s;
        let lam = grid.value(l);
        for (j, &(_, _, beta)) in support.iter().enumerate() {
            let mut acc = ZERO;
            for &(e, d) in &pairs[l] {
                if k[e] != ZERO {
                    acc += k[e] * powers[j][d] * (beta * grid.value(e) - grid.value(d));
                }
            }
            powers[j][l] = acc / lam;
        }
    }
    k[0] = ONE;
    if k.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::Internal("non-finite coefficient during reversion".into()));
    }
    let mut s = GenSeries::from_dense(grid, Variable::Descending, Normalization::Raw, -1, &k);
    s.truncated = f.truncated;
    Ok(s)
}

/// Fit the geometric bound |c_γ| ≤ A^{γ(+1)} to the retained terms.
pub fn growth_fit(f: &GenSeries) -> GrowthBound {
    growth_fit_shaped(f, BoundShape::Pow)
}

pub fn growth_fit_shaped(f: &GenSeries, shape: BoundShape) -> GrowthBound {
    let extra = match shape {
        BoundShape::Pow => 0.0,
        BoundShape::PowPlusOne => 1.0,
    };
    let a = f
        .iter()
        .filter(|&(_, g, c)| g > 0.0 && c != ZERO)
        .map(|(_, g, c)| c.norm().powf(1.0 / (g + extra)))
        .fold(0.0, f64::max);
    GrowthBound { a, shape, fitted_over: f.cutoff(), tail_rate: tail_rate(f) }
}

/// Extrapolated exponential growth rate of |c_γ|.
///
/// Takes the largest |c_γ| in each unit window [n, n+1) of the upper two
/// thirds of the retained range, forms the local slopes of log|c| between
/// consecutive windows and extrapolates them to γ → ∞ with a least-squares
/// fit in {1, 1/γ, 1/γ²}. Returns e^{limit slope}. When the slopes are too
/// irregular for the fit, the chord slope over the window is used instead.
pub fn tail_rate(f: &GenSeries) -> f64 {
    let cutoff = f.cutoff();
    let mut best: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
    for (_, g, c) in f.iter() {
        if g <= 0.0 || c == ZERO || g < cutoff / 3.0 - 1e-9 {
            continue;
        }
        let y = c.norm().ln();
        let w = (g + 1e-9).floor() as i64;
        let e = best.entry(w).or_insert((g, y));
        if y > e.1 {
            *e = (g, y);
        }
    }
    let pts: Vec<(f64, f64)> = best.into_values().collect();
    if pts.len() < 3 {
        return pts.last().map(|&(g, y)| (y / g).exp()).unwrap_or(0.0);
    }
    let slopes: Vec<(f64, f64)> =
        pts.windows(2).map(|w| ((w[0].0 + w[1].0) / 2.0, (w[1].1 - w[0].1) / (w[1].0 - w[0].0))).collect();
    let k = if slopes.len() <= 2 { 1 } else { (slopes.len() - 1).min(3) };
    let row = |m: f64| [1.0, 1.0 / m, 1.0 / (m * m)];
    let mut ata = vec![vec![0.0; k]; k];
    let mut atb = vec![0.0; k];
    for &(m, s) in &slopes {
        let b = row(m);
        for r in 0..k {
            atb[r] += b[r] * s;
            for c in 0..k {
                ata[r][c] += b[r] * b[c];
            }
        }
    }
    let (g0, y0) = pts[0];
    let (g1, y1) = pts[pts.len() - 1];
    let chord = ((y1 - y0) / (g1 - g0)).exp();
    let Some(sol) = solve(ata, atb) else { return chord };
    let rms = (slopes
        .iter()
        .map(|&(m, s)| {
            let b = row(m);
            let fit: f64 = (0..k).map(|i| sol[i] * b[i]).sum();
            (fit - s).powi(2)
        })
        .sum::<f64>()
        / slopes.len() as f64)
        .sqrt();
    if rms > MAX_SLOPE_RMS {
        chord
    } else {
        sol[0].exp()
    }
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Radius 1.25·c·A outside which descending series are evaluated.
pub fn guard_radius(f: &GenSeries) -> f64 {
    let bound = growth_fit(f);
    GUARD_FACTOR * f.grid.density_constant() * bound.a.max(bound.tail_rate)
}

/// Partial sum at z with a bound on the discarded tail.
pub fn evaluate(f: &GenSeries, z: C64, branch: Branch) -> Result<Evaluation> {
    let log = branch.log(z).ok_or_else(|| Error::Domain(format!("{z}")))?;
    let c = f.grid.density_constant();
    let bound = growth_fit(f);
    let a_eff = bound.effective();
    let sign = match f.variable {
        Variable::Ascending => 1.0,
        Variable::Descending => -1.0,
    };
    if f.variable == Variable::Descending {
        let radius = GUARD_FACTOR * c * bound.a.max(bound.tail_rate);
        if z.norm() <= radius {
            return Err(Error::Divergence { modulus: z.norm(), radius });
        }
    }
    let mut value = ZERO;
    for (_, g, coef) in f.iter() {
        let mut term = coef * (log * (sign * (g + f.offset as f64))).exp();
        if f.normalization == Normalization::Gamma {
            term /= gamma(g + 1.0);
        }
        value += term;
    }
    let tail_bound = tail_estimate(f, z.norm(), c, a_eff);
    Ok(Evaluation { value, tail_bound })
}

/// Bound on Σ_{n ≥ ⌊cutoff⌋} c^{n+1} A^{n+1} |w|^{n(+1)} (÷ Γ(n+1) for GAMMA).
fn tail_estimate(f: &GenSeries, modulus: f64, c: f64, a: f64) -> f64 {
    let n0 = f.cutoff().floor() as i32;
    let (wmin, wmax) = match f.variable {
        Variable::Ascending => (modulus, modulus),
        Variable::Descending => (1.0 / modulus, 1.0 / modulus),
    };
    let shift = f.offset as f64;
    let mut total = 0.0;
    for n in n0..n0 + 400 {
        let nf = n as f64;
        let w = if wmax >= 1.0 { wmax.powf(nf + 1.0) } else { wmin.powf(nf) };
        let mut t = (c * a).powf(nf + 1.0) * w * wmax.powf(shift);
        if f.normalization == Normalization::Gamma {
            t /= gamma(nf + 1.0);
        }
        if !t.is_finite() {
            return f64::INFINITY;
        }
        total += t;
        if t < 1e-18 * total.max(1e-300) || t < 1e-300 {
            break;
        }
    }
    total
}
