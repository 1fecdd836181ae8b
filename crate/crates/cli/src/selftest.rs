//! Quick examples with exact answers, one or two per library module.

use phaselab::calculus::{heat_semigroup, SemigroupQuery};
use phaselab::estimators::{check_multilinear_exponents, sigma, spectral_sum_bound};
use phaselab::nlheat::{picard_solve, NonlinearProblemSpec, NonlinearityKind, PicardOptions};
use phaselab::ougauss::{ou_semigroup, GaussianConjugation};
use phaselab::phasespace::{modulation_norm, ModulationSpace, WindowSpec};
use phaselab::spectral::{assemble_operator, eigendecompose};
use phaselab::{Complex64, Exponent, FieldSample, Grid, MixedNormParams, OscillatorSpec, WeightSpec};

use crate::report::{Check, ExperimentReport};

pub fn run(r: &mut ExperimentReport) -> phaselab::Result<()> {
    let osc = OscillatorSpec::hermite(1);
    let grid = Grid::new(1, 256, 12.0)?;
    let dec = eigendecompose(&assemble_operator(&osc, &grid)?, 128)?;

    let worst = (0..=5)
        .map(|j| {
            let exact = 2.0 * j as f64 + 1.0;
            (dec.eigenvalue(j) - exact).abs() / exact
        })
        .fold(0.0, f64::max);
    r.check(Check::at_most("spectral: hermite eigenvalues 2j+1", worst, Some(0.0), worst, 1e-6));
    let defect = dec.orthonormality_defect();
    r.check(Check::at_most("spectral: orthonormal modes", defect, Some(0.0), defect, 1e-10));

    let phi0 = dec.mode_field(0);
    let t = 0.7;
    let evolved = heat_semigroup(&SemigroupQuery::new(&dec, 1.0, t)?, &phi0)?;
    let gap = evolved.sub(&phi0.scaled((-t * dec.eigenvalue(0)).exp().into()))?.norm_l2();
    r.check(Check::at_most("calculus: ground state decays at its eigenvalue", gap, Some(0.0), gap, 1e-10));

    let packet = FieldSample::from_fn(grid, |x| {
        Complex64::from_polar((-(x[0] - 0.5).powi(2) / 2.0).exp(), 2.0 * std::f64::consts::PI * 0.3 * x[0])
    });
    let np = MixedNormParams::finite(2.0, 2.0)?;
    let m = modulation_norm(&packet, &WindowSpec::Gaussian, &WeightSpec::anharmonic(0.0), &osc, &np)?;
    let rel = (m - packet.norm_l2()).abs() / packet.norm_l2();
    r.check(Check::at_most("phasespace: M^{2,2}_0 norm equals the L2 norm", rel, Some(0.0), rel, 1e-6));

    let inf = Exponent::Infinity;
    let fin = |p| Exponent::finite(p);
    let sig = [
        (sigma(1, 1, 1, 1.0, &fin(1.0)?, &fin(1.0)?), 1.0),
        (sigma(1, 2, 1, 1.0, &fin(2.0)?, &fin(2.0)?), 0.375),
        (sigma(1, 1, 2, 2.0, &fin(2.0)?, &inf), 0.125),
    ];
    let dev = sig.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    r.check(Check::at_most("estimators: smoothing exponents", dev, Some(0.0), dev, 1e-15));
    let (_, ratio) = spectral_sum_bound(&dec, 1.0, 0.0, 10.0)?;
    let dev = (ratio - 1.0).abs();
    r.check(Check::at_most("estimators: spectral sum ratio tends to 1", ratio, Some(1.0), dev, 1e-6));
    let three = MixedNormParams::finite(3.0, 4.0 / 3.0)?;
    let ok = check_multilinear_exponents(&[three; 3], &MixedNormParams::finite(1.0, 4.0)?).is_ok();
    let dev = if ok { 0.0 } else { 1.0 };
    r.check(Check::at_most("estimators: trilinear exponent balance", dev, Some(0.0), dev, 0.0));

    let initial = dec.synthesize(&dec.analyze(&FieldSample::from_real_fn(grid, |x| (-x[0] * x[0]).exp()))?)?;
    let linear = NonlinearProblemSpec {
        beta: 1.0,
        nu: 1,
        coupling: Complex64::new(0.0, 0.0),
        kind: NonlinearityKind::Power,
        initial: initial.clone(),
        monitor: ModulationSpace::new(WeightSpec::anharmonic(2.0), MixedNormParams::finite(2.0, 1.0)?),
    };
    let traj = picard_solve(&dec, &linear, 0.1, 1e-2, PicardOptions::default())?;
    let end = traj.checkpoints.last().expect("final checkpoint");
    let exact = heat_semigroup(&SemigroupQuery::new(&dec, 1.0, end.time)?, &initial)?;
    let gap = end.field.sub(&exact)?.norm_l2() / initial.norm_l2();
    r.check(Check::at_most("nlheat: zero coupling is the linear flow", gap, Some(0.0), gap, 1e-9));

    let conj = GaussianConjugation::new(1)?;
    let one = FieldSample::from_real_fn(grid, |_| 1.0);
    let out = ou_semigroup(&conj, &dec, 1.0, 0.5, &one)?;
    let expect = (-0.5f64).exp();
    let err = (0..grid.node_count())
        .filter(|&i| grid.node_norm(i) <= 6.0)
        .map(|i| (out.field.values()[i] - expect).norm())
        .fold(0.0, f64::max);
    r.check(Check::at_most("ougauss: constants decay like e^{-t}", err, Some(0.0), err, 1e-6));
    Ok(())
}
