use phaselab::spectral::{assemble_operator, eigendecompose, eigenvalue_growth_fit};
use phaselab::{FieldSample, Grid, OscillatorSpec, SpectralDecomposition};

fn decompose(osc: &OscillatorSpec, grid: Grid, m: usize) -> SpectralDecomposition {
    eigendecompose(&assemble_operator(osc, &grid).unwrap(), m).unwrap()
}

/// Even ground state of `-u'' + x⁴ u = λ u` by RK4 shooting from the origin.
fn quartic_ground_state_by_shooting() -> f64 {
    let endpoint = |lambda: f64| {
        let (x_max, steps) = (5.0, 50_000);
        let dx = x_max / steps as f64;
        let rhs = |x: f64, u: f64, v: f64| (v, (x.powi(4) - lambda) * u);
        let (mut x, mut u, mut v) = (0.0f64, 1.0f64, 0.0f64);
        for _ in 0..steps {
            let (k1u, k1v) = rhs(x, u, v);
            let (k2u, k2v) = rhs(x + dx / 2.0, u + dx / 2.0 * k1u, v + dx / 2.0 * k1v);
            let (k3u, k3v) = rhs(x + dx / 2.0, u + dx / 2.0 * k2u, v + dx / 2.0 * k2v);
            let (k4u, k4v) = rhs(x + dx, u + dx * k3u, v + dx * k3v);
            u += dx / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            v += dx / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            x += dx;
            if u.abs() > 1e6 {
                break;
            }
        }
        u
    };
    // below λ₀ the solution blows up positive, above it crosses zero
    let (mut lo, mut hi) = (0.5, 1.5);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if endpoint(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn quartic_ground_state_matches_shooting_oracle() {
    let oracle = quartic_ground_state_by_shooting();
    assert!((oracle - 1.0603620904).abs() < 1e-8, "oracle {oracle}");
    let dec = decompose(&OscillatorSpec::anharmonic(1, 2, 1), Grid::new(1, 256, 8.0).unwrap(), 32);
    assert!((dec.ground_eigenvalue() - oracle).abs() < 1e-8, "{}", dec.ground_eigenvalue());
}

#[test]
fn hermite_default_grid_and_refinement() {
    let osc = OscillatorSpec::hermite(1);
    let grid = Grid::default_for(1).unwrap();
    let coarse = decompose(&osc, grid, 256);
    let fine = decompose(&osc, grid.refined(), 256);
    for j in 0..=20 {
        let exact = 2.0 * j as f64 + 1.0;
        assert!((coarse.eigenvalue(j) - exact).abs() <= 1e-6 * exact);
        assert!((coarse.eigenvalue(j) - fine.eigenvalue(j)).abs() <= 1e-6 * exact);
    }
    assert!(coarse.orthonormality_defect() <= 1e-9);
}

#[test]
fn completeness_on_gaussians() {
    let osc = OscillatorSpec::hermite(1);
    let grid = Grid::new(1, 256, 12.0).unwrap();
    let dec = decompose(&osc, grid, 128);
    for (c, w) in [(0.0, 1.0), (1.5, 0.7), (-2.0, 1.3)] {
        let f = FieldSample::from_real_fn(grid, |x| (-(x[0] - c) * (x[0] - c) / (2.0 * w * w)).exp());
        let back = dec.synthesize(&dec.analyze(&f).unwrap()).unwrap();
        assert!(back.sub(&f).unwrap().norm_l2() <= 1e-6 * f.norm_l2());
    }
}

#[test]
fn growth_exponent_targets() {
    let dec = decompose(&OscillatorSpec::anharmonic(1, 2, 1), Grid::new(1, 512, 12.0).unwrap(), 256);
    let fit = eigenvalue_growth_fit(&dec, 30, 100).unwrap();
    assert!((fit.target - 4.0 / 3.0).abs() < 1e-15);
    assert!(fit.relative_deviation < 0.1, "{fit:?}");
    let dec = decompose(&OscillatorSpec::anharmonic(1, 1, 2), Grid::new(1, 512, 30.0).unwrap(), 256);
    let fit = eigenvalue_growth_fit(&dec, 30, 100).unwrap();
    assert!((fit.target - 4.0 / 3.0).abs() < 1e-15);
    assert!(fit.relative_deviation < 0.1, "{fit:?}");
}
