use std::sync::OnceLock;

use phaselab::calculus::{fractional_power, heat_semigroup, SemigroupQuery};
use phaselab::spectral::{assemble_operator, eigendecompose};
use phaselab::{Complex64, FieldSample, Grid, OscillatorSpec, SpectralDecomposition};
use proptest::prelude::*;

fn quartic() -> &'static SpectralDecomposition {
    static DEC: OnceLock<SpectralDecomposition> = OnceLock::new();
    DEC.get_or_init(|| {
        let grid = Grid::new(1, 128, 8.0).unwrap();
        eigendecompose(&assemble_operator(&OscillatorSpec::anharmonic(1, 2, 1), &grid).unwrap(), 64).unwrap()
    })
}

/// Band-limited field from a few low-mode coefficients.
fn field(coeffs: &[(f64, f64)]) -> FieldSample {
    let dec = quartic();
    let mut c = vec![Complex64::new(0.0, 0.0); dec.mode_count()];
    for (j, (re, im)) in coeffs.iter().enumerate() {
        c[j] = Complex64::new(*re, *im);
    }
    dec.synthesize(&c).unwrap()
}

fn coeff_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..12)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn semigroup_law(c in coeff_strategy(), t1 in 0.0..2.0f64, t2 in 0.0..2.0f64, beta in 0.3..2.0f64) {
        let dec = quartic();
        let f = field(&c);
        let a = heat_semigroup(&SemigroupQuery::new(dec, beta, t1).unwrap(), &f).unwrap();
        let ab = heat_semigroup(&SemigroupQuery::new(dec, beta, t2).unwrap(), &a).unwrap();
        let direct = heat_semigroup(&SemigroupQuery::new(dec, beta, t1 + t2).unwrap(), &f).unwrap();
        prop_assert!(ab.sub(&direct).unwrap().norm_l2() <= 1e-9 * f.norm_l2());
    }

    #[test]
    fn l2_contraction(c in coeff_strategy(), t in 0.0..5.0f64, beta in 0.3..2.0f64) {
        let dec = quartic();
        let f = field(&c);
        let out = heat_semigroup(&SemigroupQuery::new(dec, beta, t).unwrap(), &f).unwrap();
        let bound = (-t * dec.ground_eigenvalue().powf(beta)).exp() * f.norm_l2();
        prop_assert!(out.norm_l2() <= bound * (1.0 + 1e-10));
    }

    #[test]
    fn self_adjoint(c1 in coeff_strategy(), c2 in coeff_strategy(), t in 0.0..2.0f64) {
        let dec = quartic();
        let (f, g) = (field(&c1), field(&c2));
        let q = SemigroupQuery::new(dec, 1.0, t).unwrap();
        let lhs = heat_semigroup(&q, &f).unwrap().inner(&g).unwrap();
        let rhs = f.inner(&heat_semigroup(&q, &g).unwrap()).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-9 * f.norm_l2() * g.norm_l2());
    }

    #[test]
    fn power_commutes_with_semigroup(c in coeff_strategy(), t in 0.0..2.0f64, beta in 0.3..2.0f64, power in 0.0..2.0f64) {
        let dec = quartic();
        let f = field(&c);
        let q = SemigroupQuery::new(dec, beta, t).unwrap();
        let a = fractional_power(dec, power, &heat_semigroup(&q, &f).unwrap()).unwrap();
        let b = heat_semigroup(&q, &fractional_power(dec, power, &f).unwrap()).unwrap();
        prop_assert!(a.sub(&b).unwrap().norm_l2() <= 1e-9 * a.norm_l2().max(1e-300));
    }
}
