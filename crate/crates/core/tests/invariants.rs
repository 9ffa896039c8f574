use genseries::diophantine::{self, RealCertificate, TransformOp};
use genseries::series::{self, GenSeries};
use genseries::transforms::{self, MomentSeries};
use genseries::{Complex64 as C64, SemigroupSpec};
use proptest::prelude::*;

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

fn moment_series(alpha: f64, coeffs: &[(f64, f64)]) -> MomentSeries {
    let grid = series::grid(&SemigroupSpec::generated_by(&[alpha]).unwrap(), 4.0).unwrap();
    let terms: Vec<(f64, C64)> = grid
        .values()
        .iter()
        .zip(coeffs.iter().chain(std::iter::repeat(&(0.0, 0.0))))
        .map(|(&g, &(re, im))| (g, if g == 0.0 { ONE } else { C64::new(re, im) }))
        .collect();
    MomentSeries::from_terms(grid, terms).unwrap()
}

fn close(a: &GenSeries, b: &GenSeries, tol: f64) -> Result<(), TestCaseError> {
    let (a, b) = series::align(a, b).map_err(|e| TestCaseError::fail(e.to_string()))?;
    for (x, y) in a.dense().iter().zip(b.dense()) {
        prop_assert!((x - y).norm() <= tol * x.norm().max(1.0), "{x} vs {y}");
    }
    Ok(())
}

fn law() -> impl Strategy<Value = MomentSeries> {
    (prop_oneof![Just(0.5), Just(0.7), Just(1.0), Just(1.5), Just(2f64.sqrt() - 1.0)], prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 40))
        .prop_map(|(a, c)| moment_series(a, &c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn convolutions_have_delta_as_unit(m in law()) {
        let d = MomentSeries::delta0(m.grid().clone());
        for r in [
            transforms::classical_convolve(&m, &d).unwrap(),
            transforms::free_convolve(&m, &d).unwrap(),
            transforms::boolean_convolve(&m, &d).unwrap(),
            transforms::monotone_convolve(&m, &d).unwrap(),
            transforms::monotone_convolve(&d, &m).unwrap(),
        ] {
            close(r.series(), m.series(), 1e-10)?;
        }
    }

    #[test]
    fn commutative_convolutions_commute(seed in (-1.0..1.0f64, -1.0..1.0f64), m in law()) {
        let other = moment_series(m.spec().generators()[0], &[seed, (seed.1, seed.0)]);
        let other = MomentSeries::from_terms(m.grid().clone(), other.iter().map(|(_, g, c)| (g, c))).unwrap();
        for op in [transforms::classical_convolve, transforms::free_convolve, transforms::boolean_convolve] {
            close(op(&m, &other).unwrap().series(), op(&other, &m).unwrap().series(), 1e-10)?;
        }
    }

    #[test]
    fn representations_round_trip(m in law()) {
        let f = transforms::f_from_moments(&m).unwrap();
        close(transforms::moments_from_f(&f).unwrap().series(), m.series(), 1e-9)?;
        let phi = transforms::voiculescu_from_moments(&m).unwrap();
        close(transforms::moments_from_voiculescu(&phi).unwrap().series(), m.series(), 1e-9)?;
    }

    #[test]
    fn voiculescu_transform_is_additive_under_free_convolution(m in law()) {
        let sum = transforms::free_convolve(&m, &m).unwrap();
        let phi = transforms::voiculescu_from_moments(&m).unwrap();
        let twice = series::linear_combine(ONE, &phi, ONE, &phi).unwrap();
        close(&transforms::voiculescu_from_moments(&sum).unwrap(), &twice, 1e-9)?;
    }

    #[test]
    fn reversion_is_an_involution(m in law()) {
        let f = transforms::f_from_moments(&m).unwrap();
        let back = series::revert_f(&series::revert_f(&f).unwrap()).unwrap();
        close(&back, &f, 1e-8)?;
    }

    #[test]
    fn rational_certificates_round_trip_and_stay_rational(p in -500i64..500, q in 1i64..500, s in 1i64..20) {
        let text = format!("rational:{p}/{q}");
        let cert: RealCertificate = text.parse().unwrap();
        let again: RealCertificate = cert.to_string().parse().unwrap();
        prop_assert_eq!(cert.to_string(), again.to_string());
        let shifted = diophantine::transform_certificate(&cert, &format!("shift:1/{s}").parse::<TransformOp>().unwrap()).unwrap();
        let ev = diophantine::classify(&shifted, &Default::default()).unwrap();
        prop_assert_eq!(ev.verdict, diophantine::Verdict::Rational);
    }
}
