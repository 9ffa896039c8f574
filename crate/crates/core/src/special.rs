//! Scalar helpers: gamma function, generalized binomials, branch-aware powers.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Γ(x) for real x.
///
/// Integer arguments up to 170 use exact factorials; everything else goes
/// through the Lanczos approximation (relative error well below 1e-13).
pub fn gamma(x: f64) -> f64 {
    if x.fract() == 0.0 && x >= 1.0 && x <= 171.0 {
        return factorial(x as u32 - 1);
    }
    statrs::function::gamma::gamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// 1/Γ(x), zero at the poles x = 0, −1, −2, …
pub fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x.fract() == 0.0 {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Generalized binomial coefficient C(β, n) = β(β−1)…(β−n+1)/n!.
pub fn binomial(beta: f64, n: u32) -> f64 {
    let mut c = 1.0;
    for k in 0..n {
        c *= (beta - k as f64) / (k as f64 + 1.0);
    }
    c
}

/// Which logarithm defines z^γ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Branch {
    /// Im log z ∈ (−π, π); cut along (−∞, 0].
    Principal,
    /// Im log z ∈ (−2π, 0); cut along [0, ∞).
    Monotone,
}

impl Branch {
    /// log z on this branch, or `None` when z sits on the cut.
    pub fn log(self, z: C64) -> Option<C64> {
        match self {
            Branch::Principal => {
                if z.im == 0.0 && z.re <= 0.0 {
                    return None;
                }
                Some(z.ln())
            }
            Branch::Monotone => {
                if z.im == 0.0 && z.re >= 0.0 {
                    return None;
                }
                let mut l = z.ln();
                if l.im > 0.0 {
                    l.im -= 2.0 * PI;
                }
                Some(l)
            }
        }
    }

    /// z^γ = e^{γ log z}.
    pub fn pow(self, z: C64, gamma: f64) -> Option<C64> {
        self.log(z).map(|l| (l * gamma).exp())
    }
}

/// i^γ on the principal branch, e^{iπγ/2}.
pub fn i_pow(gamma: f64) -> C64 {
    C64::from_polar(1.0, PI * gamma / 2.0)
}

/// e^{iπθ} with θ reduced exactly for integer multiples, so (−1)^n is real.
pub fn unit_phase(theta_over_pi: f64) -> C64 {
    let t = theta_over_pi.rem_euclid(2.0);
    if t.fract() == 0.0 {
        return if t == 0.0 { C64::new(1.0, 0.0) } else { C64::new(-1.0, 0.0) };
    }
    if (t * 2.0).fract() == 0.0 {
        return if t == 0.5 { C64::new(0.0, 1.0) } else { C64::new(0.0, -1.0) };
    }
    C64::from_polar(1.0, PI * t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        assert_eq!(gamma(5.0), 24.0);
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(1.5) - PI.sqrt() / 2.0).abs() < 1e-14);
        // Γ(−0.5) = −2√π
        assert!((gamma(-0.5) + 2.0 * PI.sqrt()).abs() / (2.0 * PI.sqrt()) < 1e-13);
        assert!((gamma(10.3) / (9.3 * 8.3 * 7.3 * 6.3 * 5.3 * 4.3 * 3.3 * 2.3 * 1.3 * gamma(1.3)) - 1.0).abs() < 1e-13);
        assert_eq!(recip_gamma(-3.0), 0.0);
    }

    #[test]
    fn binomial_half() {
        assert_eq!(binomial(0.5, 0), 1.0);
        assert_eq!(binomial(0.5, 1), 0.5);
        assert_eq!(binomial(0.5, 2), -0.125);
        assert_eq!(binomial(4.0, 2), 6.0);
    }

    #[test]
    fn branches() {
        let z = C64::new(0.0, -1.0);
        let p = Branch::Principal.pow(z, 0.5).unwrap();
        let e = C64::from_polar(1.0, -PI / 4.0);
        assert!((p - e).norm() < 1e-15);
        assert!(Branch::Principal.log(C64::new(-1.0, 0.0)).is_none());
        assert!(Branch::Monotone.log(C64::new(1.0, 0.0)).is_none());
        let m = Branch::Monotone.log(C64::new(0.0, 1.0)).unwrap();
        assert!((m.im + 1.5 * PI).abs() < 1e-15);
        assert_eq!(unit_phase(3.0), C64::new(-1.0, 0.0));
    }
}
