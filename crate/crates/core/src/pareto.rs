//! Fourier transform of one-sided Pareto tails R^β∫_R^∞ e^{ixz}x^{−β−1}dx as
//! an explicit series in powers z^k, z^β and (for integer β) z^β log z.

use crate::error::{Error, Result};
use crate::quad;
use crate::semigroup::SemigroupSpec;
use crate::series::{self, Evaluation, GenSeries, Normalization, Variable};
use crate::special::{factorial, i_pow, unit_phase};
use num_complex::Complex64 as C64;

/// β closer than this to an integer is treated as that integer.
pub const NEAR_INTEGER_TOL: f64 = 1e-8;
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const K_TERMS: u32 = 80;

/// ∫₁^∞ e^{ix}x^{−s}dx, computed as i·e^{i}∫₀^∞ e^{−t}(1+it)^{−s}dt.
pub fn oscillatory_constant(s: f64) -> Result<C64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidArgument(format!("oscillatory constant needs s > 0, got {s}")));
    }
    let f = |t: f64| (-t).exp() * C64::new(1.0, t).powf(-s);
    let r = quad::integrate_to_infinity(&f, 0.0, 1.0, 1e-16, 1e-14);
    Ok(C64::new(0.0, 1.0) * C64::new(0.0, 1.0).exp() * r.value)
}

/// Which of the two closed forms produced the constant term.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum ParetoConstant {
    /// c₁(β) = ∫₁^∞ e^{ix}x^{−β+[β]−2}dx, for β ≥ 1.
    C1(C64),
    /// c₂(β) = ∫₁^∞ e^{ix}x^{−β−1}dx + Σ_k i^k/(k!(k−β)), for 0 < β < 1.
    C2(C64),
}

/// The terms whose denominators vanish as β approaches an integer:
/// floor·(Rz)^{[β]} + ceil·(Rz)^{[β]+1} + beta·(Rz)^β + log·(Rz)^β log(Rz).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SingularPart {
    pub beta: f64,
    pub big_r: f64,
    pub floor_coeff: C64,
    pub ceil_coeff: C64,
    pub beta_coeff: C64,
    pub log_coeff: Option<C64>,
}

impl SingularPart {
    pub fn floor(&self) -> f64 {
        self.beta.floor()
    }

    pub fn eval(&self, z: f64) -> C64 {
        let x = self.big_r * z;
        let fl = self.floor();
        let mut v = self.floor_coeff * x.powf(fl) + self.ceil_coeff * x.powf(fl + 1.0) + self.beta_coeff * x.powf(self.beta);
        if let Some(l) = self.log_coeff {
            v += l * x.powf(self.beta) * x.ln();
        }
        v
    }

    fn map(&self, f: impl Fn(C64) -> C64) -> SingularPart {
        SingularPart {
            floor_coeff: f(self.floor_coeff),
            ceil_coeff: f(self.ceil_coeff),
            beta_coeff: f(self.beta_coeff),
            log_coeff: self.log_coeff.map(&f),
            ..*self
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParetoExpansion {
    /// β used in the formulas (snapped to an integer on the near-integer branch).
    pub beta: f64,
    pub big_r: f64,
    /// Regular part in powers of z (not Rz), truncated at the cutoff.
    pub regular_terms: GenSeries,
    pub singular: SingularPart,
    pub constant: ParetoConstant,
    /// Requested β when it was within [`NEAR_INTEGER_TOL`] of an integer.
    pub near_integer: Option<f64>,
    /// Coefficients of (Rz)^n beyond the cutoff, used for the tail bound.
    overflow: Vec<(f64, C64)>,
}

impl ParetoExpansion {
    pub fn warning(&self) -> Option<String> {
        self.near_integer.map(|b| format!("β = {b} is within {NEAR_INTEGER_TOL:e} of {}; integer formula used", self.beta))
    }

    pub fn has_log_term(&self) -> bool {
        self.singular.log_coeff.is_some()
    }

    pub fn eval(&self, z: f64) -> Result<Evaluation> {
        if !(z > 0.0) {
            return Err(Error::Domain(format!("expansion holds for z > 0, got {z}")));
        }
        let mut value = self.singular.eval(z);
        for (_, g, c) in self.regular_terms.iter() {
            value += c * z.powf(g);
        }
        let x = self.big_r * z;
        let tail_bound = self.overflow.iter().map(|(n, c)| c.norm() * x.powf(*n)).sum();
        Ok(Evaluation { value, tail_bound })
    }
}

fn snap(beta: f64) -> (f64, Option<f64>) {
    let n = beta.round();
    if n >= 1.0 && beta != n && (beta - n).abs() < NEAR_INTEGER_TOL {
        (n, Some(beta))
    } else {
        (beta, None)
    }
}

/// β(β−1)…(β−m+1).
fn falling(beta: f64, m: u32) -> f64 {
    (0..m).map(|j| beta - j as f64).product()
}

/// Expansion of R^β∫_R^∞ e^{ixz}x^{−β−1}dx for z > 0.
pub fn pareto_fourier(beta: f64, big_r: f64, cutoff: f64) -> Result<ParetoExpansion> {
    if !(beta > 0.0 && beta.is_finite()) || !(big_r > 0.0 && big_r.is_finite()) {
        return Err(Error::InvalidArgument(format!("need β > 0 and R > 0, got β = {beta}, R = {big_r}")));
    }
    let (beta, near_integer) = snap(beta);
    // coefficients of (Rz)^p
    let mut terms: Vec<(f64, C64)> = Vec::new();
    let (singular, constant) = if beta < 1.0 {
        // k = 0, 1 terms form the singular part; k ≥ 2 stay regular
        let c2_int = oscillatory_constant(beta + 1.0)?;
        let mut c_beta = c2_int;
        for k in 2..K_TERMS {
            let w = i_pow(k as f64) / (factorial(k) * (k as f64 - beta));
            c_beta += w;
            terms.push((k as f64, -w));
        }
        let c2 = c_beta + C64::new(-1.0 / beta, 0.0) + C64::new(0.0, 1.0 / (1.0 - beta));
        terms.push((beta, c_beta));
        let floor_coeff = C64::new(1.0 / beta, 0.0);
        let ceil_coeff = C64::new(0.0, 1.0 / (beta - 1.0));
        let sing = SingularPart {
            beta,
            big_r,
            floor_coeff,
            ceil_coeff,
            beta_coeff: -floor_coeff - ceil_coeff,
            log_coeff: None,
        };
        (sing, ParetoConstant::C2(c2))
    } else {
        let fl = beta.floor();
        let n_fl = fl as u32;
        let fr = beta - fl;
        let p = falling(beta, n_fl - 1);
        let c1 = oscillatory_constant(beta - fl + 2.0)?;
        // boundary sum Σ_{k=1}^{[β]−1} (iRz)^{k−1} e^{iRz}/(β…(β−k+1)), expanded
        let n_max = cutoff.ceil() as u32 + K_TERMS;
        for n in 0..=n_max {
            let mut s = 0.0;
            for k in 1..=(n_fl - 1).min(n + 1) {
                s += 1.0 / (falling(beta, k) * factorial(n + 1 - k));
            }
            if s != 0.0 {
                terms.push((n as f64, i_pow(n as f64) * s));
            }
        }
        // Σ_{k ∈ {0, 3, 4, …}} i^{k+[β]−1}((Rz)^β − (Rz)^{k+[β]−1})/(k!(k−β+[β]−1)·P)
        let mut c_beta = i_pow(fl - 1.0) * c1 / p;
        for k in std::iter::once(0).chain(3..K_TERMS) {
            let w = i_pow(k as f64 + fl - 1.0) / (factorial(k) * (k as f64 - fr - 1.0) * p);
            c_beta += w;
            terms.push((k as f64 + fl - 1.0, -w));
        }
        terms.push((beta, c_beta));
        let ceil_coeff = i_pow(fl + 1.0) / (2.0 * p * (fr - 1.0));
        let sing = if fr == 0.0 {
            SingularPart {
                beta,
                big_r,
                floor_coeff: ZERO,
                ceil_coeff,
                beta_coeff: -ceil_coeff,
                log_coeff: Some(-i_pow(beta) / p),
            }
        } else {
            let floor_coeff = i_pow(fl) / (p * fr);
            SingularPart { beta, big_r, floor_coeff, ceil_coeff, beta_coeff: -floor_coeff - ceil_coeff, log_coeff: None }
        };
        (sing, ParetoConstant::C1(c1))
    };
    build(beta, big_r, cutoff, terms, singular, constant, near_integer)
}

fn build(
    beta: f64,
    big_r: f64,
    cutoff: f64,
    terms: Vec<(f64, C64)>,
    singular: SingularPart,
    constant: ParetoConstant,
    near_integer: Option<f64>,
) -> Result<ParetoExpansion> {
    let spec = SemigroupSpec::generated_by(&[beta])?;
    let grid = series::grid(&spec, cutoff)?;
    let limit = cutoff * (1.0 + 1e-12);
    let (kept, overflow): (Vec<_>, Vec<_>) = terms.into_iter().partition(|(p, _)| *p <= limit);
    let regular_terms = GenSeries::from_terms(
        grid,
        Variable::Ascending,
        Normalization::Raw,
        0,
        kept.into_iter().map(|(p, c)| (p, c * big_r.powf(p))),
    )?;
    Ok(ParetoExpansion { beta, big_r, regular_terms, singular, constant, near_integer, overflow })
}

/// Expansion of R^β∫_{−∞}^{−R} e^{ixz}e^{i(β+1)π}|x|^{−β−1}dx for z > 0:
/// the conjugate of the positive-tail expansion times e^{i(β+1)π}.
pub fn negative_tail_fourier(beta: f64, big_r: f64, cutoff: f64) -> Result<ParetoExpansion> {
    let pos = pareto_fourier(beta, big_r, cutoff)?;
    let xi = unit_phase(pos.beta + 1.0);
    let f = |c: C64| xi * c.conj();
    Ok(ParetoExpansion {
        regular_terms: pos.regular_terms.map_coeffs(|_, c| f(c)),
        singular: pos.singular.map(f),
        overflow: pos.overflow.iter().map(|&(p, c)| (p, f(c))).collect(),
        ..pos
    })
}

/// (Im a)f_β + Im((−1)^{β+1}a)·conj(f_β), decomposed on
/// {(Rz)^{[β]}, (Rz)^{[β]+1}, (Rz)^β} plus the (Rz)^β log(Rz) coefficient.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CancellationResidual {
    pub part: SingularPart,
    pub value: C64,
}

impl CancellationResidual {
    pub fn log_coeff(&self) -> C64 {
        self.part.log_coeff.unwrap_or(ZERO)
    }
}

pub fn cancellation_residual(a_beta: C64, beta: f64, big_r: f64, z: f64) -> Result<CancellationResidual> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("z must be positive, got {z}")));
    }
    let f = pareto_fourier(beta, big_r, beta + 1.0)?.singular;
    let xi = unit_phase(f.beta + 1.0);
    let (u, v) = (a_beta.im, (xi * a_beta).im);
    let part = SingularPart {
        floor_coeff: u * f.floor_coeff + v * f.floor_coeff.conj(),
        ceil_coeff: u * f.ceil_coeff + v * f.ceil_coeff.conj(),
        beta_coeff: u * f.beta_coeff + v * f.beta_coeff.conj(),
        log_coeff: f.log_coeff.map(|l| u * l + v * l.conj()),
        ..f
    };
    Ok(CancellationResidual { value: part.eval(z), part })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadrature(beta: f64, z: f64) -> C64 {
        // ∫₁^X on the real line, then rotate the rest: i e^{izX}∫₀^∞ e^{−zt}(X+it)^{−β−1}dt
        let x_max = 40.0;
        let f = |x: f64| C64::new(0.0, z * x).exp() * x.powf(-beta - 1.0);
        let head = quad::integrate(f, 1.0, x_max, 1e-15, 1e-14).value;
        let g = |t: f64| (-z * t).exp() * C64::new(x_max, t).powf(-beta - 1.0);
        let tail = quad::integrate_to_infinity(&g, 0.0, 1.0 / z, 1e-16, 1e-14).value;
        head + C64::new(0.0, 1.0) * C64::new(0.0, z * x_max).exp() * tail
    }

    #[test]
    fn oscillatory_constant_cases() {
        // s = 2 against direct integration on [1, 1e4] with an explicit tail
        let direct = quad::integrate(|x| C64::new(0.0, x).exp() / (x * x), 1.0, 1e4, 1e-15, 1e-13).value;
        let c = oscillatory_constant(2.0).unwrap();
        // remaining ∫_{1e4}^∞ ≈ i e^{i·1e4}/1e8
        let tail = C64::new(0.0, 1.0) * C64::new(0.0, 1e4).exp() / 1e8;
        assert!((c - direct - tail).norm() < 1e-8);
        assert!(oscillatory_constant(3.0).unwrap().im > 0.0);
        assert!(oscillatory_constant(0.0).is_err());
    }

    #[test]
    fn expansion_matches_quadrature() {
        for beta in [0.3, 0.5, 1.7, 2.5, 3.2] {
            let e = pareto_fourier(beta, 1.0, 20.0).unwrap();
            for z in [0.05, 0.1, 0.3] {
                let v = e.eval(z).unwrap();
                let q = quadrature(beta, z);
                assert!((v.value - q).norm() < 1e-9 * q.norm(), "β = {beta}, z = {z}: {} vs {q}", v.value);
                assert!(v.tail_bound < 1e-12);
            }
        }
    }

    #[test]
    fn integer_beta_has_log_term() {
        for beta in [1.0, 2.0, 3.0] {
            let e = pareto_fourier(beta, 1.0, 20.0).unwrap();
            assert!(e.has_log_term() && e.near_integer.is_none());
            for z in [0.1, 0.3] {
                let q = quadrature(beta, z);
                assert!((e.eval(z).unwrap().value - q).norm() < 1e-9 * q.norm());
            }
        }
        let e = pareto_fourier(2.0, 1.0, 20.0).unwrap();
        assert!((e.singular.log_coeff.unwrap() - C64::new(1.0 / 2.0, 0.0)).norm() < 1e-15);
        let near = pareto_fourier(2.0 + 1e-12, 1.0, 20.0).unwrap();
        assert!(near.has_log_term() && near.warning().is_some());
        assert!(!pareto_fourier(2.5, 1.0, 20.0).unwrap().has_log_term());
    }

    #[test]
    fn small_z_limit_is_total_mass() {
        let e = pareto_fourier(0.5, 1.0, 20.0).unwrap();
        assert!((e.eval(1e-12).unwrap().value - 2.0).norm() < 1e-5);
        let n = negative_tail_fourier(0.5, 1.0, 20.0).unwrap();
        assert!((n.eval(1e-12).unwrap().value - C64::new(0.0, -2.0)).norm() < 1e-5);
    }

    #[test]
    fn negative_tail_matches_quadrature() {
        for beta in [0.5, 1.7, 2.0] {
            let n = negative_tail_fourier(beta, 1.0, 20.0).unwrap();
            let z = 0.3;
            let q = unit_phase(beta + 1.0) * quadrature(beta, z).conj();
            assert!((n.eval(z).unwrap().value - q).norm() < 1e-9 * q.norm());
        }
        let p = pareto_fourier(2.0, 1.0, 20.0).unwrap();
        let n = negative_tail_fourier(2.0, 1.0, 20.0).unwrap();
        assert_eq!(n.singular.log_coeff.unwrap(), -p.singular.log_coeff.unwrap().conj());
    }

    #[test]
    fn cancellation_bracket() {
        let a = C64::new(0.3, -0.8);
        for beta in [1.4, 2.5, 3.7] {
            let r = cancellation_residual(a, beta, 1.0, 0.2).unwrap();
            let fl = beta.floor();
            let p = falling(beta, fl as u32 - 1);
            let fr = beta - fl;
            let m1 = unit_phase(fl) - unit_phase(beta);
            let first = i_pow(-fl) / p * (a * m1 / fr).im;
            let m2 = C64::new(1.0, 0.0) - unit_phase(beta - fl - 1.0);
            let second = i_pow(fl + 1.0) / p * (a * m2 / (fr - 1.0)).im / 2.0;
            assert!((r.part.floor_coeff - first).norm() < 1e-13);
            assert!((r.part.ceil_coeff - second).norm() < 1e-13);
            assert_eq!(r.log_coeff(), ZERO);
        }
        let r = cancellation_residual(C64::new(2.0, 0.0), 2.0, 1.0, 0.2).unwrap();
        assert!(r.value.norm() < 1e-15);
        let r = cancellation_residual(C64::new(0.4, 1.1), 3.0, 1.0, 0.2).unwrap();
        assert!(r.log_coeff().norm() < 1e-15);
        // direct evaluation of the two f_β terms
        let a = C64::new(0.0, 1.0);
        let r = cancellation_residual(a, 0.5, 1.0, 0.3).unwrap();
        let f = pareto_fourier(0.5, 1.0, 2.0).unwrap().singular.eval(0.3);
        let direct = a.im * f + (unit_phase(1.5) * a).im * f.conj();
        assert!((r.value - direct).norm() < 1e-12);
    }
}
