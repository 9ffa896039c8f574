//! Finitely generated exponent semigroups S = {n₀ + n₁α₁ + … + n_pα_p}.

use crate::error::{Error, Result};
use num_integer::Integer;
use std::collections::HashMap;

const MERGE_TOL: f64 = 1e-9;
const MAX_DENOMINATOR: i64 = 1_000_000;

/// Generators {1, α₁, …, α_p} of an additive exponent semigroup.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SemigroupSpec {
    generators: Vec<f64>,
}

/// Multi-index (n₀, …, n_p) representing the exponent Σ nᵢgᵢ.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct ExponentIndex {
    pub counts: Vec<u32>,
}

impl ExponentIndex {
    pub fn value(&self, spec: &SemigroupSpec) -> f64 {
        self.counts.iter().zip(&spec.generators).map(|(&n, &g)| n as f64 * g).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(|&n| n == 0)
    }
}

/// Best rational approximation p/q with q ≤ `max_den` that reproduces `x`
/// to within a few ulps, if any.
pub fn detect_rational(x: f64, max_den: i64) -> Option<(i64, i64)> {
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e12 {
            break;
        }
        let a = a as i64;
        let p2 = a.checked_mul(p1)?.checked_add(p0)?;
        let q2 = a.checked_mul(q1)?.checked_add(q0)?;
        if q2 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        if ((p1 as f64) / (q1 as f64) - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            return Some((p1, q1));
        }
        let frac = r - a as f64;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

impl SemigroupSpec {
    /// Validate an explicit generator list; the first generator must be 1.
    pub fn new(generators: Vec<f64>) -> Result<Self> {
        if generators.first() != Some(&1.0) {
            return Err(Error::InvalidArgument("first generator must be 1".into()));
        }
        if generators.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(Error::InvalidArgument("generators must be positive and finite".into()));
        }
        if generators[1..].windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("extra generators must be strictly increasing".into()));
        }
        if generators[1..].iter().any(|&g| g == 1.0) {
            return Err(Error::InvalidArgument("generator 1 listed twice".into()));
        }
        Ok(SemigroupSpec { generators })
    }

    /// S = ℕ.
    pub fn naturals() -> Self {
        SemigroupSpec { generators: vec![1.0] }
    }

    /// S_{α₁,…,α_p}: sorts, drops duplicates and positive integers (already in ℕ).
    pub fn generated_by(alphas: &[f64]) -> Result<Self> {
        let mut gs: Vec<f64> = Vec::new();
        for &a in alphas {
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::InvalidArgument(format!("generator {a} must be positive")));
            }
            if a.fract() != 0.0 {
                gs.push(a);
            }
        }
        gs.sort_by(f64::total_cmp);
        gs.dedup();
        let mut generators = vec![1.0];
        generators.extend(gs);
        Ok(SemigroupSpec { generators })
    }

    pub fn generators(&self) -> &[f64] {
        &self.generators
    }

    /// Common denominator and integer numerators when every generator is
    /// rational with denominator ≤ 10⁶.
    pub fn rational_form(&self) -> Option<(Vec<i64>, i64)> {
        let fracs: Vec<(i64, i64)> =
            self.generators.iter().map(|&g| detect_rational(g, MAX_DENOMINATOR)).collect::<Option<_>>()?;
        let den = fracs.iter().fold(1i64, |l, &(_, q)| l.lcm(&q));
        if den > 1_000_000_000 {
            return None;
        }
        Some((fracs.iter().map(|&(p, q)| p * (den / q)).collect(), den))
    }
}

/// One merged element of S ∩ [0, cutoff].
#[derive(Debug, Clone, PartialEq)]
pub struct Exponent {
    pub value: f64,
    pub index: ExponentIndex,
}

fn for_each_index(spec: &SemigroupSpec, cutoff: f64, mut f: impl FnMut(&[u32])) {
    let gens = spec.generators();
    let mut counts = vec![0u32; gens.len()];
    fn rec(gens: &[f64], cutoff: f64, pos: usize, used: f64, counts: &mut [u32], f: &mut dyn FnMut(&[u32])) {
        if pos == gens.len() {
            f(counts);
            return;
        }
        let mut n = 0u32;
        loop {
            let v = used + n as f64 * gens[pos];
            if v > cutoff * (1.0 + MERGE_TOL) + MERGE_TOL {
                break;
            }
            counts[pos] = n;
            rec(gens, cutoff, pos + 1, v, counts, f);
            n += 1;
        }
        counts[pos] = 0;
    }
    rec(gens, cutoff, 0, 0.0, &mut counts, &mut f);
}

/// All of S ∩ [0, cutoff], ascending, coincident exponents merged.
///
/// The representative of a merged value is the lexicographically smallest
/// multi-index.
pub fn enumerate_up_to(spec: &SemigroupSpec, cutoff: f64) -> Result<Vec<Exponent>> {
    if !(cutoff > 0.0) || !cutoff.is_finite() {
        return Err(Error::InvalidArgument(format!("cutoff must be positive, got {cutoff}")));
    }
    if let Some((nums, den)) = spec.rational_form() {
        let limit = (cutoff * den as f64 * (1.0 + 1e-12)).floor() as i64;
        let mut by_key: HashMap<i64, Vec<u32>> = HashMap::new();
        for_each_index(spec, cutoff, |c| {
            let key: i64 = c.iter().zip(&nums).map(|(&n, &p)| n as i64 * p).sum();
            if key <= limit {
                by_key
                    .entry(key)
                    .and_modify(|e| {
                        if c < e.as_slice() {
                            *e = c.to_vec()
                        }
                    })
                    .or_insert_with(|| c.to_vec());
            }
        });
        let mut out: Vec<(i64, Vec<u32>)> = by_key.into_iter().collect();
        out.sort_by_key(|e| e.0);
        return Ok(out
            .into_iter()
            .map(|(k, counts)| Exponent { value: k as f64 / den as f64, index: ExponentIndex { counts } })
            .collect());
    }
    let mut raw: Vec<(f64, Vec<u32>)> = Vec::new();
    for_each_index(spec, cutoff, |c| {
        let v: f64 = c.iter().zip(spec.generators()).map(|(&n, &g)| n as f64 * g).sum();
        if v <= cutoff * (1.0 + MERGE_TOL) {
            raw.push((v, c.to_vec()));
        }
    });
    raw.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let mut out: Vec<Exponent> = Vec::new();
    let mut anchor = f64::NAN;
    for (v, counts) in raw {
        if out.is_empty() || (v - anchor).abs() > MERGE_TOL * anchor.max(1.0) {
            anchor = v;
            out.push(Exponent { value: v, index: ExponentIndex { counts } });
        } else {
            let last = out.last_mut().expect("non-empty");
            if counts < last.index.counts {
                last.index.counts = counts;
                last.value = v;
            }
        }
    }
    Ok(out)
}

/// Smallest c ≥ 1 with #(S ∩ [n, n+1)) ≤ c^{n+1} for 0 ≤ n ≤ horizon.
pub fn density_constant(spec: &SemigroupSpec, horizon: u32) -> Result<f64> {
    if horizon < 1 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let top = horizon as f64 + 1.0;
    let values = enumerate_up_to(spec, top)?;
    let mut counts = vec![0usize; horizon as usize + 1];
    for e in &values {
        let w = (e.value + MERGE_TOL * e.value.max(1.0)).floor() as usize;
        if w <= horizon as usize {
            counts[w] += 1;
        }
    }
    Ok(counts
        .iter()
        .enumerate()
        .map(|(n, &k)| (k as f64).powf(1.0 / (n as f64 + 1.0)))
        .fold(1.0, f64::max))
}

/// Enumerated S ∩ [0, cutoff] with an addition table lookup.
#[derive(Debug)]
pub struct Grid {
    spec: SemigroupSpec,
    cutoff: f64,
    exponents: Vec<Exponent>,
    values: Vec<f64>,
    keys: Option<(Vec<i64>, HashMap<i64, usize>)>,
    density: f64,
}

impl Grid {
    pub fn new(spec: &SemigroupSpec, cutoff: f64) -> Result<Self> {
        let exponents = enumerate_up_to(spec, cutoff)?;
        let values: Vec<f64> = exponents.iter().map(|e| e.value).collect();
        let keys = spec.rational_form().map(|(nums, _)| {
            let ks: Vec<i64> = exponents
                .iter()
                .map(|e| e.index.counts.iter().zip(&nums).map(|(&n, &p)| n as i64 * p).sum())
                .collect();
            let map = ks.iter().enumerate().map(|(i, &k)| (k, i)).collect();
            (ks, map)
        });
        let density = density_constant(spec, (cutoff.floor() as u32).max(1))?;
        Ok(Grid { spec: spec.clone(), cutoff, exponents, values, keys, density })
    }

    pub fn spec(&self) -> &SemigroupSpec {
        &self.spec
    }
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }
    pub fn exponent(&self, i: usize) -> &Exponent {
        &self.exponents[i]
    }
    /// Counting constant c of the semigroup over this grid's horizon.
    pub fn density_constant(&self) -> f64 {
        self.density
    }
    /// Smallest positive exponent.
    pub fn delta_min(&self) -> f64 {
        self.values.get(1).copied().unwrap_or(1.0)
    }

    /// Index of the grid value equal to `v` (merge tolerance), if any.
    pub fn find(&self, v: f64) -> Option<usize> {
        let tol = MERGE_TOL * v.abs().max(1.0);
        let i = self.values.partition_point(|&x| x < v - tol);
        (i < self.values.len() && (self.values[i] - v).abs() <= tol).then_some(i)
    }

    /// Index of value(i) + value(j), or `None` beyond the cutoff.
    pub fn add(&self, i: usize, j: usize) -> Option<usize> {
        match &self.keys {
            Some((ks, map)) => map.get(&(ks[i] + ks[j])).copied(),
            None => self.find(self.values[i] + self.values[j]),
        }
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        std::ptr::eq(self, other) || (self.spec == other.spec && self.cutoff == other.cutoff)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vals(spec: &SemigroupSpec, cutoff: f64) -> Vec<f64> {
        enumerate_up_to(spec, cutoff).unwrap().into_iter().map(|e| e.value).collect()
    }

    #[test]
    fn half_generator() {
        let s = SemigroupSpec::generated_by(&[0.5]).unwrap();
        // brute force over (m, n) with m + n/2 ≤ 2
        let mut expect = Vec::new();
        for m in 0..=2 {
            for n in 0..=4 {
                let v = m as f64 + n as f64 / 2.0;
                if v <= 2.0 && !expect.contains(&v) {
                    expect.push(v);
                }
            }
        }
        expect.sort_by(f64::total_cmp);
        assert_eq!(vals(&s, 2.0), expect);
        assert_eq!(expect, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn naturals_and_sqrt2() {
        assert_eq!(vals(&SemigroupSpec::naturals(), 3.0), vec![0.0, 1.0, 2.0, 3.0]);
        let r2 = 2f64.sqrt();
        let s = SemigroupSpec::generated_by(&[r2]).unwrap();
        let got = vals(&s, 3.0);
        let want = [0.0, 1.0, r2, 2.0, 1.0 + r2, 2.0 * r2, 3.0];
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn merged_representative_is_lexicographically_smallest() {
        let s = SemigroupSpec::generated_by(&[0.5]).unwrap();
        let e = enumerate_up_to(&s, 1.0).unwrap();
        assert_eq!(e[2].value, 1.0);
        assert_eq!(e[2].index.counts, vec![0, 2]);
    }

    #[test]
    fn invalid_inputs() {
        assert!(enumerate_up_to(&SemigroupSpec::naturals(), 0.0).is_err());
        assert!(SemigroupSpec::new(vec![1.0, 0.5, 0.3]).is_err());
        assert!(SemigroupSpec::new(vec![0.5]).is_err());
        assert!(density_constant(&SemigroupSpec::naturals(), 0).is_err());
    }

    #[test]
    fn density_constants() {
        assert_eq!(density_constant(&SemigroupSpec::naturals(), 10).unwrap(), 1.0);
        let half = SemigroupSpec::generated_by(&[0.5]).unwrap();
        assert!((density_constant(&half, 5).unwrap() - 2.0).abs() < 1e-15);
        let s = SemigroupSpec::generated_by(&[0.3]).unwrap();
        let c = density_constant(&s, 5).unwrap();
        // window counts by enumeration, bounded by ([1/α]+1)(n+1)
        let v = vals(&s, 6.0);
        for n in 0..=5usize {
            let k = v.iter().filter(|&&x| x >= n as f64 - 1e-12 && x < n as f64 + 1.0 - 1e-12).count();
            assert!(k <= 4 * (n + 1));
            assert!(k as f64 <= c.powi(n as i32 + 1) * (1.0 + 1e-12));
        }
        assert_eq!(c, 4.0);
    }

    #[test]
    fn rational_detection() {
        assert_eq!(detect_rational(0.3, 1_000_000), Some((3, 10)));
        assert_eq!(detect_rational(2f64.sqrt(), 1_000_000), None);
        let g = Grid::new(&SemigroupSpec::generated_by(&[0.5]).unwrap(), 3.0).unwrap();
        assert_eq!(g.add(1, 1), g.find(1.0));
        assert_eq!(g.add(6, 1), None);
    }

    proptest::proptest! {
        #[test]
        fn enumeration_closed_and_sorted(alpha in 0.15f64..2.5, cutoff in 1.0f64..6.0) {
            let s = SemigroupSpec::generated_by(&[alpha]).unwrap();
            let g = Grid::new(&s, cutoff).unwrap();
            let v = g.values();
            proptest::prop_assert!(v.windows(2).all(|w| w[0] < w[1]));
            for i in 0..v.len() {
                for j in 0..v.len() {
                    if v[i] + v[j] <= cutoff * (1.0 - 1e-9) {
                        proptest::prop_assert!(g.add(i, j).is_some());
                    }
                }
            }
        }
    }
}
