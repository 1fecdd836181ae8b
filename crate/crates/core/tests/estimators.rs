use std::sync::OnceLock;

use phaselab::estimators::{
    algebra_ratio, band_limit, default_t_list, fifty_probe_family, fit_decay_exponent, longtime_rate,
    multilinear_ratio, packet_pairs, probe_corpus, probe_operator_bound, random_packets, sigma,
    singular_frequency_growth, singular_weight_norm, sobolev_modulation_equivalence, spectral_sum_bound,
    weight_quotient_norm, QuotientForm, WeightQuotientParams, DEFAULT_PROBE_SEED,
};
use phaselab::model::Exponent;
use phaselab::phasespace::{ModulationNorm, ModulationSpace};
use phaselab::spectral::{assemble_operator, eigendecompose};
use phaselab::{FieldSample, Grid, MixedNormParams, OscillatorSpec, SpectralDecomposition, WeightSpec};
use proptest::prelude::*;

const INF: Exponent = Exponent::Infinity;

fn fin(p: f64) -> Exponent {
    Exponent::Finite(p)
}

fn decomposition(osc: OscillatorSpec, n: usize, l: f64) -> SpectralDecomposition {
    let grid = Grid::new(1, n, l).unwrap();
    eigendecompose(&assemble_operator(&osc, &grid).unwrap(), n / 2).unwrap()
}

fn hermite() -> &'static SpectralDecomposition {
    static DEC: OnceLock<SpectralDecomposition> = OnceLock::new();
    DEC.get_or_init(|| decomposition(OscillatorSpec::hermite(1), 128, 8.0))
}

fn evaluator(osc: &OscillatorSpec, grid: &Grid, s: f64, p: f64, q: f64) -> ModulationNorm {
    ModulationSpace::new(WeightSpec::anharmonic(s), MixedNormParams::finite(p, q).unwrap())
        .evaluator(osc, grid)
        .unwrap()
}

/// The smoothing-exponent grid with its closed-form targets.
fn sigma_tuples() -> Vec<(u32, u32, f64, Exponent, Exponent, f64)> {
    vec![
        (1, 1, 1.0, fin(1.0), fin(1.0), 1.0),
        (2, 1, 1.0, fin(2.0), fin(2.0), 3.0 / 8.0),
        (1, 2, 2.0, fin(2.0), INF, 1.0 / 8.0),
    ]
}

fn quotient(k: u32, l: u32, beta: f64, p: Exponent, q: Exponent, form: QuotientForm) -> WeightQuotientParams {
    let osc = OscillatorSpec::anharmonic(1, k, l).with_beta(beta).unwrap();
    WeightQuotientParams::new(osc, 0.0, p, q, form).unwrap()
}

#[test]
fn sigma_closed_forms() {
    for (k, l, beta, p, q, target) in sigma_tuples() {
        assert!((sigma(1, k, l, beta, &p, &q) - target).abs() < 1e-15);
    }
    assert_eq!(sigma(1, 1, 1, 1.0, &INF, &INF), 0.0);
}

#[test]
fn reduced_quotient_slopes_match_sigma() {
    for (k, l, beta, p, q, target) in sigma_tuples() {
        let params = quotient(k, l, beta, p, q, QuotientForm::Reduced);
        let samples: Vec<(f64, f64)> =
            default_t_list().into_iter().map(|t| (t, weight_quotient_norm(&params, t).unwrap())).collect();
        let fit = fit_decay_exponent(&samples, target).unwrap();
        assert!(fit.relative_deviation <= 0.10, "({k},{l},{beta}): {fit:?}");
        assert!(fit.r_squared >= 0.98 && !fit.flagged);
    }
}

#[test]
fn definition_quotient_is_finite_and_decreasing() {
    for (k, l, beta, p, q, _) in sigma_tuples() {
        let params = quotient(k, l, beta, p, q, QuotientForm::Definition);
        let values: Vec<f64> = default_t_list().into_iter().map(|t| weight_quotient_norm(&params, t).unwrap()).collect();
        assert!(values.iter().all(|v| v.is_finite() && *v > 0.0));
        assert!(values.windows(2).all(|w| w[1] < w[0]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn quotient_strictly_decreasing_in_time(idx in 0usize..3, a in -3.0..0.0f64, gap in 0.05..1.0f64, reduced in any::<bool>()) {
        let (k, l, beta, p, q, _) = sigma_tuples()[idx];
        let form = if reduced { QuotientForm::Reduced } else { QuotientForm::Definition };
        let params = quotient(k, l, beta, p, q, form);
        let t1 = 10f64.powf(a);
        let t2 = (t1 * 10f64.powf(gap)).min(1.0);
        prop_assume!(t2 > t1);
        prop_assert!(weight_quotient_norm(&params, t2).unwrap() < weight_quotient_norm(&params, t1).unwrap());
    }

    #[test]
    fn spectral_sum_ratio_non_increasing(mut ts in prop::collection::vec(1.0..10.0f64, 2..8), s0 in 0.0..3.0f64, beta in 0.5..2.0f64) {
        ts.sort_by(f64::total_cmp);
        let dec = hermite();
        let ratios: Vec<f64> = ts.iter().map(|&t| spectral_sum_bound(dec, beta, s0, t).unwrap().1).collect();
        prop_assert!(ratios.iter().all(|r| r.is_finite()));
        prop_assert!(ratios.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-14)));
    }
}

#[test]
fn spectral_sum_examples() {
    let grid = Grid::new(1, 64, 8.0).unwrap();
    let single = eigendecompose(&assemble_operator(&OscillatorSpec::hermite(1), &grid).unwrap(), 1).unwrap();
    assert_eq!(spectral_sum_bound(&single, 1.0, 0.0, 3.0).unwrap().1, 1.0);

    let dec = hermite();
    // oracle: the exact spectrum 2j+1 summed directly over the retained count
    let exact = |t: f64| -> f64 {
        (0..dec.mode_count()).map(|j| (-t * (2 * j) as f64).exp() * ((2 * j + 1) as f64).powi(2)).sum()
    };
    let ratios: Vec<f64> = [1.0, 2.0, 4.0].iter().map(|&t| spectral_sum_bound(dec, 1.0, 2.0, t).unwrap().1).collect();
    assert!(ratios.windows(2).all(|w| w[1] < w[0]));
    for (r, t) in ratios.iter().zip([1.0, 2.0, 4.0]) {
        assert!((r - exact(t)).abs() <= 1e-6 * exact(t), "t = {t}: {r} vs {}", exact(t));
    }
    for s0 in [0.0, 2.0] {
        let (sum, ratio) = spectral_sum_bound(dec, 1.0, s0, 10.0).unwrap();
        assert!((ratio - dec.ground_eigenvalue().powf(s0)).abs() <= 1e-6);
        assert!((sum - ratio * (-10.0 * dec.ground_eigenvalue()).exp()).abs() <= 1e-18);
    }
    assert!(spectral_sum_bound(dec, 1.0, 0.0, 0.5).is_err());
}

#[test]
fn probe_bound_examples() {
    let dec = hermite();
    let osc = OscillatorSpec::hermite(1);
    let norm = evaluator(&osc, dec.grid(), 1.0, 1.0, 1.0);
    let probes = probe_corpus(dec, DEFAULT_PROBE_SEED);
    assert!(probe_operator_bound(dec, 1.0, 0.0, &norm, &norm, &probes).unwrap().value >= 1.0 - 1e-6);

    let l2 = evaluator(&osc, dec.grid(), 0.0, 2.0, 2.0);
    let phi0 = [dec.mode_field(0)];
    for (beta, t) in [(1.0, 0.5), (2.0, 1.3)] {
        let bound = probe_operator_bound(dec, beta, t, &l2, &l2, &phi0).unwrap();
        let exact = (-t * dec.ground_eigenvalue().powf(beta)).exp();
        assert!((bound.value - exact).abs() <= 1e-9 * exact);
    }

    let with_zero = [FieldSample::zeros(*dec.grid()), dec.mode_field(0)];
    let bound = probe_operator_bound(dec, 1.0, 1.0, &l2, &l2, &with_zero).unwrap();
    assert_eq!(bound.argmax, 1);
    assert_eq!(bound.warnings.len(), 1);
    assert!(probe_operator_bound(dec, 1.0, 1.0, &l2, &l2, &with_zero[..1]).is_err());
}

#[test]
fn gaussian_probe_rate_hermite() {
    let dec = hermite();
    let osc = OscillatorSpec::hermite(1);
    let norm = evaluator(&osc, dec.grid(), 0.0, 2.0, 2.0);
    let probes: Vec<FieldSample> =
        random_packets(1, 30, DEFAULT_PROBE_SEED).iter().map(|p| band_limit(dec, &p.sample(*dec.grid()))).collect();
    let fit = longtime_rate(dec, 1.0, &[1.0, 2.0, 3.0], &norm, &norm, &probes).unwrap();
    assert!(fit.relative_deviation <= 0.05, "{fit:?}");
}

#[test]
fn longtime_rates() {
    let times: Vec<f64> = (0..9).map(|i| 1.0 + 0.5 * i as f64).collect();
    let quartic = decomposition(OscillatorSpec::anharmonic(1, 2, 1), 128, 8.0);
    // shooting oracle for the quartic ground state lives in the spectral tests
    assert!((quartic.ground_eigenvalue() - 1.0603620904).abs() < 1e-6);
    for (dec, beta) in [(hermite(), 1.0), (hermite(), 2.0), (&quartic, 1.0)] {
        let osc = dec.oscillator().unwrap().clone();
        let norm = evaluator(&osc, dec.grid(), 1.0, 1.0, 1.0);
        let fit = longtime_rate(dec, beta, &times, &norm, &norm, &probe_corpus(dec, DEFAULT_PROBE_SEED)).unwrap();
        assert!(fit.relative_deviation <= 0.05, "beta {beta}: {fit:?}");
    }
    let dec = hermite();
    let osc = OscillatorSpec::hermite(1);
    let a = evaluator(&osc, dec.grid(), 1.0, 1.0, 1.0);
    let b = evaluator(&osc, dec.grid(), 2.0, 1.0, 1.0);
    assert!(longtime_rate(dec, 1.0, &times, &a, &b, &[dec.mode_field(0)]).is_err());
}

#[test]
fn algebra_examples() {
    let dec = hermite();
    let osc = OscillatorSpec::hermite(1);
    let grid = *dec.grid();
    let norm = evaluator(&osc, &grid, 2.0, 2.0, 2.0);
    // a constant factor c gives ‖c f‖ / (‖f‖ ‖c‖) = 1/‖1‖ for any f and c
    let one = FieldSample::from_real_fn(grid, |_| 1.0);
    let unit_norm = norm.norm(&one).unwrap();
    let unit = one.scaled((1.0 / unit_norm).into());
    for p in random_packets(1, 5, 3) {
        let f = p.sample(grid);
        let r = algebra_ratio(&f, &unit, &norm).unwrap().unwrap();
        assert!((r - 1.0 / unit_norm).abs() <= 1e-12 / unit_norm);
    }
    assert_eq!(algebra_ratio(&FieldSample::zeros(grid), &one, &norm).unwrap(), None);

    let l1 = ModulationSpace::new(WeightSpec::anharmonic(0.0), MixedNormParams::finite(2.0, 1.0).unwrap())
        .evaluator(&osc, &grid)
        .unwrap();
    let phi0 = dec.mode_field(0);
    let r = algebra_ratio(&phi0, &phi0, &l1).unwrap().unwrap();
    assert!(r.is_finite() && r > 0.0);
}

#[test]
fn algebra_maximum_refines() {
    let pairs = packet_pairs(1, 20, DEFAULT_PROBE_SEED);
    let osc = OscillatorSpec::hermite(1);
    let max_ratio = |n: usize| {
        let grid = Grid::new(1, n, 12.0).unwrap();
        let norm = evaluator(&osc, &grid, 2.0, 2.0, 2.0);
        pairs
            .iter()
            .map(|(a, b)| algebra_ratio(&a.sample(grid), &b.sample(grid), &norm).unwrap().unwrap())
            .fold(0.0, f64::max)
    };
    let (coarse, fine) = (max_ratio(256), max_ratio(512));
    assert!(coarse.is_finite());
    assert!((coarse - fine).abs() <= 0.05 * fine, "{coarse} vs {fine}");
}

#[test]
fn multilinear_examples() {
    let dec = hermite();
    let osc = OscillatorSpec::hermite(1);
    let grid = *dec.grid();
    let base = ModulationSpace::new(WeightSpec::anharmonic(1.0), MixedNormParams::finite(2.0, 2.0).unwrap());
    let packets: Vec<FieldSample> = random_packets(1, 3, 11).iter().map(|p| p.sample(grid)).collect();

    let np = MixedNormParams::finite(2.0, 2.0).unwrap();
    let r = multilinear_ratio(&packets[..1], &[np], &np, &base, &osc).unwrap().unwrap();
    assert_eq!(r, 1.0);

    let inf1 = MixedNormParams::new(INF, fin(1.0));
    let two = multilinear_ratio(&packets[..2], &[inf1, inf1], &inf1, &base, &osc).unwrap().unwrap();
    let algebra = ModulationSpace { exponents: inf1, ..base.clone() }.evaluator(&osc, &grid).unwrap();
    assert_eq!(two, algebra_ratio(&packets[0], &packets[1], &algebra).unwrap().unwrap());

    let factor = MixedNormParams::finite(3.0, 4.0 / 3.0).unwrap();
    let target = MixedNormParams::finite(1.0, 4.0).unwrap();
    let three = multilinear_ratio(&packets, &[factor; 3], &target, &base, &osc).unwrap().unwrap();
    assert!(three.is_finite() && three > 0.0);

    let wrong = MixedNormParams::finite(1.0, 2.0).unwrap();
    assert!(multilinear_ratio(&packets, &[factor; 3], &wrong, &base, &osc).is_err());
}

#[test]
fn singular_weight_checks() {
    let grid = Grid::new(1, 256, 12.0).unwrap();
    let osc = OscillatorSpec::hermite(1);
    // α inside (0, 1) with s = 0: finite, and the truncation trend is mild
    let plain = evaluator(&osc, &grid, 0.0, 3.0, 3.0);
    let trend = singular_weight_norm(grid, 0.3, &plain, 8.0).unwrap();
    assert!(trend.small.is_finite() && trend.large.is_finite() && trend.large > trend.small);

    let weighted = evaluator(&osc, &grid, 0.1, 3.0, 1.5);
    assert!(singular_weight_norm(grid, 0.5, &weighted, 16.0).is_err());
    assert!(singular_weight_norm(grid, 0.0, &weighted, 8.0).is_err());
    let growth = singular_frequency_growth(grid, 0.5, &weighted, 1.0).unwrap();
    assert!(growth.relative_change > 0.0);
    assert!(singular_frequency_growth(grid, 0.5, &weighted, 3.0).is_err());
}

#[test]
fn equivalence_examples() {
    let dec = hermite();
    let osc = OscillatorSpec::hermite(1);
    let probes: Vec<FieldSample> = fifty_probe_family(dec, DEFAULT_PROBE_SEED).iter().map(|f| band_limit(dec, f)).collect();
    let flat = evaluator(&osc, dec.grid(), 0.0, 2.0, 2.0);
    let band = sobolev_modulation_equivalence(dec, 0.0, &flat, &probes).unwrap();
    assert!(band.spread() <= 1.01, "{band:?}");

    let norm = evaluator(&osc, dec.grid(), 2.0, 2.0, 2.0);
    let band = sobolev_modulation_equivalence(dec, 2.0, &norm, &probes).unwrap();
    assert!(band.spread() <= 20.0);
    let modes = [dec.mode_field(0), dec.mode_field(5)];
    let pair = sobolev_modulation_equivalence(dec, 2.0, &norm, &modes).unwrap();
    // both modes belong to the family, up to the rounding of band limiting
    assert!(pair.min >= band.min * (1.0 - 1e-12) && pair.max <= band.max * (1.0 + 1e-12), "{pair:?} vs {band:?}");

    let f = &probes[3];
    let scaled = [f.clone(), f.scaled(3.7.into())];
    let r = sobolev_modulation_equivalence(dec, 2.0, &norm, &scaled).unwrap();
    assert!((r.ratios[0] - r.ratios[1]).abs() <= 1e-14 * r.ratios[0]);

    assert!(sobolev_modulation_equivalence(dec, 1.0, &norm, &probes).is_err());
}
