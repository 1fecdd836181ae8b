use std::sync::OnceLock;

use phaselab::calculus::{heat_semigroup, SemigroupQuery};
use phaselab::nlheat::{
    duhamel_residual, etd_evolve, picard_solve, smallness_threshold, EtdScheme, NonlinearProblemSpec,
    NonlinearityKind, PicardOptions, Threshold, ThresholdSearch, Trajectory,
};
use phaselab::phasespace::ModulationSpace;
use phaselab::spectral::{assemble_operator, eigendecompose};
use phaselab::{Complex64, FieldSample, Grid, MixedNormParams, OscillatorSpec, SpectralDecomposition, WeightSpec};

fn hermite() -> &'static SpectralDecomposition {
    static DEC: OnceLock<SpectralDecomposition> = OnceLock::new();
    DEC.get_or_init(|| {
        let grid = Grid::new(1, 128, 8.0).unwrap();
        eigendecompose(&assemble_operator(&OscillatorSpec::hermite(1), &grid).unwrap(), 64).unwrap()
    })
}

/// Even, nonnegative, peak-one profile projected onto the retained modes.
fn profile() -> FieldSample {
    let dec = hermite();
    let raw = FieldSample::from_real_fn(*dec.grid(), |x| (-x[0] * x[0] / 1.28).exp());
    dec.synthesize(&dec.analyze(&raw).unwrap()).unwrap()
}

fn problem(lambda: f64, amplitude: f64) -> NonlinearProblemSpec {
    NonlinearProblemSpec {
        beta: 1.0,
        nu: 1,
        coupling: Complex64::new(lambda, 0.0),
        kind: NonlinearityKind::Power,
        initial: profile().scaled(amplitude.into()),
        monitor: ModulationSpace::new(WeightSpec::anharmonic(2.0), MixedNormParams::finite(2.0, 1.0).unwrap()),
    }
}

fn max_gap(a: &Trajectory, b: &Trajectory) -> f64 {
    a.checkpoints
        .iter()
        .zip(&b.checkpoints)
        .map(|(x, y)| {
            assert!((x.time - y.time).abs() < 1e-12);
            x.field.sub(&y.field).unwrap().norm_l2()
        })
        .fold(0.0, f64::max)
}

#[test]
fn linear_problem_matches_semigroup() {
    let dec = hermite();
    let spec = problem(0.0, 1.0);
    let picard = picard_solve(dec, &spec, 0.5, 1e-2, PicardOptions::default()).unwrap();
    let etd1 = etd_evolve(dec, &spec, 0.5, 1e-2, EtdScheme::First, 1).unwrap();
    let etd2 = etd_evolve(dec, &spec, 0.5, 1e-2, EtdScheme::SecondOrder, 1).unwrap();
    for traj in [&picard, &etd1, &etd2] {
        for cp in &traj.checkpoints {
            let exact = heat_semigroup(&SemigroupQuery::new(dec, 1.0, cp.time).unwrap(), &spec.initial).unwrap();
            assert!(cp.field.sub(&exact).unwrap().norm_l2() <= 1e-9 * spec.initial.norm_l2());
        }
        assert!(duhamel_residual(traj, dec, &spec).unwrap() <= 1e-9);
    }
}

#[test]
fn small_data_defocusing_benchmark() {
    let dec = hermite();
    let spec = problem(-1.0, 0.05 / 25.88);
    let dt = 1e-3;
    let traj = picard_solve(dec, &spec, 2.0, dt, PicardOptions::default()).unwrap();
    assert!(traj.blow_up.is_none());
    assert!(traj.times.windows(2).all(|w| w[1] > w[0]));

    let factor = traj.max_contraction().unwrap();
    assert!(factor <= 0.5, "contraction factor {factor}");

    let residual = duhamel_residual(&traj, dec, &spec).unwrap();
    assert!(residual <= 1e-4 * traj.sup_l2(), "residual {residual:e}");
    assert!(residual <= 1e-4 * traj.sup_monitored());

    assert!(traj.l2.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
    assert!(traj.sup_monitored() <= 2.0 * traj.monitored[0]);

    let parity = traj.checkpoints.iter().map(|c| c.field.parity_defect()).fold(0.0, f64::max);
    assert!(parity <= 1e-9, "parity defect {parity:e}");

    let etd = etd_evolve(dec, &spec, 1.0, dt, EtdScheme::First, 1).unwrap();
    let short: Trajectory = Trajectory {
        checkpoints: traj.checkpoints[..etd.checkpoints.len()].to_vec(),
        ..traj.clone()
    };
    assert!(max_gap(&short, &etd) <= 10.0 * dt * traj.sup_l2());
}

#[test]
fn corrupted_checkpoint_is_detected() {
    let dec = hermite();
    let spec = problem(-1.0, 0.5);
    let mut traj = picard_solve(dec, &spec, 0.2, 1e-3, PicardOptions::default()).unwrap();
    let clean = duhamel_residual(&traj, dec, &spec).unwrap();
    assert!(clean <= 1e-4 * traj.sup_l2(), "clean residual {clean:e}");
    let k = 10;
    traj.checkpoints[k].field = traj.checkpoints[k].field.scaled(1.1.into());
    let corrupted = duhamel_residual(&traj, dec, &spec).unwrap();
    assert!(corrupted >= 1e-2 * traj.sup_l2(), "corrupted residual {corrupted:e}");
}

#[test]
fn residual_needs_three_checkpoints() {
    let dec = hermite();
    let spec = problem(-1.0, 0.1);
    let traj = etd_evolve(dec, &spec, 0.01, 1e-2, EtdScheme::First, 1).unwrap();
    assert_eq!(traj.checkpoints.len(), 2);
    assert!(duhamel_residual(&traj, dec, &spec).is_err());
}

/// Observed orders from successive differences at the final time; with a
/// Richardson reference the error ratio equals the difference ratio.
fn observed_orders(scheme: EtdScheme) -> Vec<f64> {
    let dec = hermite();
    let spec = problem(-1.0, 1.0);
    let finals: Vec<FieldSample> = [8e-3, 4e-3, 2e-3, 1e-3]
        .iter()
        .map(|&dt| {
            let traj = etd_evolve(dec, &spec, 0.4, dt, scheme, usize::MAX).unwrap();
            traj.checkpoints.last().unwrap().field.clone()
        })
        .collect();
    let diffs: Vec<f64> = finals.windows(2).map(|w| w[0].sub(&w[1]).unwrap().norm_l2()).collect();
    diffs.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn etd_convergence_orders() {
    for (scheme, order) in [(EtdScheme::First, 1.0), (EtdScheme::SecondOrder, 2.0)] {
        for p in observed_orders(scheme) {
            assert!((p - order).abs() <= 0.2 * order, "{scheme:?}: observed order {p}");
        }
    }
}

#[test]
fn threshold_examples() {
    let dec = hermite();
    let search = ThresholdSearch::default();
    assert_eq!(
        smallness_threshold(dec, &problem(0.0, 1.0), search).unwrap(),
        Threshold::UpperBracket { epsilon: 10.0 }
    );
    match smallness_threshold(dec, &problem(-1.0, 1.0), search).unwrap() {
        Threshold::UpperBracket { epsilon } | Threshold::Found { epsilon, .. } => assert!(epsilon >= 0.1),
        other => panic!("{other:?}"),
    }
    let focusing = problem(1.0, 1.0);
    let Threshold::Found { epsilon, first_failure } = smallness_threshold(dec, &focusing, search).unwrap() else {
        panic!("focusing threshold should be finite");
    };
    assert!(epsilon < 10.0 && first_failure / epsilon <= 1.0 + search.resolution + 1e-12);
    let above = NonlinearProblemSpec {
        initial: focusing.initial.scaled((1.5 * epsilon).into()),
        ..focusing.clone()
    };
    let grown = match picard_solve(dec, &above, search.horizon, search.dt, PicardOptions::default()) {
        Ok(traj) => traj.blow_up.is_some() || traj.sup_monitored() > 2.0 * traj.monitored[0],
        Err(_) => true,
    };
    assert!(grown);
    let narrow = ThresholdSearch { lower: 5.0, ..search };
    assert_eq!(smallness_threshold(dec, &focusing, narrow).unwrap(), Threshold::NoThresholdInRange);
}

#[test]
fn inhomogeneous_small_data_run() {
    let dec = hermite();
    let spec = NonlinearProblemSpec {
        kind: NonlinearityKind::Inhomogeneous { alpha: 0.15 },
        monitor: ModulationSpace::new(WeightSpec::anharmonic(0.05), MixedNormParams::finite(12.0, 1.3).unwrap()),
        ..problem(-1.0, 0.05)
    };
    let traj = picard_solve(dec, &spec, 0.5, 1e-3, PicardOptions::default()).unwrap();
    assert!(traj.max_contraction().unwrap() <= 0.5);
    assert!(duhamel_residual(&traj, dec, &spec).unwrap() <= 1e-4 * traj.sup_l2());
    assert!(traj.sup_monitored() <= 2.0 * traj.monitored[0]);
    let parity = traj.checkpoints.iter().map(|c| c.field.parity_defect()).fold(0.0, f64::max);
    assert!(parity <= 1e-9);
}
