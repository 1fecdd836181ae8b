//! Short-time smoothing exponent: the weight quotient `C(t)` and its
//! power-law fit.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{evaluate_potential, Exponent, OscillatorSpec};
use crate::numerics::{dyadic_half_line_rule, fit_line, pairwise_sum};

/// Which integrand to measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuotientForm {
    /// `v_{s₂} (1 + t^N v^{2βN})^{-1}` with `v = q₁ + V^{1/2} + |ξ|^l`.
    Definition,
    /// `(1 + t^{1/(2β)} (V^{1/2} + |ξ|^l))^{s₂ - 2βN}`, the bound the
    /// definition is reduced to. It is exactly quasi-homogeneous in `t`.
    Reduced,
}

#[derive(Debug, Clone)]
pub struct WeightQuotientParams {
    pub osc: OscillatorSpec,
    pub s2: f64,
    pub n_pow: u32,
    pub p_tilde: Exponent,
    pub q_tilde: Exponent,
    pub form: QuotientForm,
    /// Truncation radius of the `(x, ξ)` box.
    pub radius: f64,
    /// First dyadic panel `[0, base]`.
    pub panel_base: f64,
    pub nodes_per_panel: usize,
}

impl WeightQuotientParams {
    /// Parameters with `N` from [`default_n_pow`], `R = 1024`, 16 nodes per
    /// panel and first panel `[0, 1/8]`.
    pub fn new(osc: OscillatorSpec, s2: f64, p_tilde: Exponent, q_tilde: Exponent, form: QuotientForm) -> Result<Self> {
        let n_pow = default_n_pow(&osc, s2, &p_tilde, &q_tilde);
        let params = WeightQuotientParams {
            osc,
            s2,
            n_pow,
            p_tilde,
            q_tilde,
            form,
            radius: 1024.0,
            panel_base: 0.125,
            nodes_per_panel: 16,
        };
        params.validate()?;
        Ok(params)
    }

    fn effective_exponent(&self) -> Option<f64> {
        effective_exponent(&self.p_tilde, &self.q_tilde)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.osc.dimension();
        if d > 2 {
            return Err(Error::arg("weight quotient quadrature supports d <= 2"));
        }
        let decay = 2.0 * self.osc.beta() * self.n_pow as f64 - self.s2;
        let ok = match self.effective_exponent() {
            Some(p) => decay * p > d as f64,
            None => decay > 0.0,
        };
        if !ok {
            return Err(Error::arg(format!(
                "N = {} leaves the quotient non-integrable: (2βN - s₂)·p = {decay}·{:?} <= d",
                self.n_pow,
                self.effective_exponent()
            )));
        }
        if !(self.radius > self.panel_base && self.panel_base > 0.0 && self.nodes_per_panel >= 2) {
            return Err(Error::arg("bad quadrature resolution"));
        }
        Ok(())
    }
}

/// Smaller of the finite exponents, if any.
fn effective_exponent(p_tilde: &Exponent, q_tilde: &Exponent) -> Option<f64> {
    [p_tilde, q_tilde]
        .iter()
        .filter_map(|e| match e {
            Exponent::Finite(p) => Some(*p),
            Exponent::Infinity => None,
        })
        .reduce(f64::min)
}

/// Smallest `N` with `(2βN - s₂)·p_eff > d + 10`.
pub fn default_n_pow(osc: &OscillatorSpec, s2: f64, p_tilde: &Exponent, q_tilde: &Exponent) -> u32 {
    let p_eff = effective_exponent(p_tilde, q_tilde).unwrap_or(1.0);
    let need = osc.dimension() as f64 + 10.0;
    let mut n = 1u32;
    while (2.0 * osc.beta() * n as f64 - s2) * p_eff <= need {
        n += 1;
    }
    n
}

/// `σ = (d / 2β)(1/(k p̃) + 1/(l q̃))`, an infinite exponent contributing 0.
pub fn sigma(d: usize, k: u32, l: u32, beta: f64, p_tilde: &Exponent, q_tilde: &Exponent) -> f64 {
    d as f64 / (2.0 * beta) * (p_tilde.reciprocal() / k as f64 + q_tilde.reciprocal() / l as f64)
}

struct AxisRule {
    /// Points (first `d` entries used) and weights; weight 0 marks sup-only
    /// nodes such as the origin.
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
}

/// Symmetric tensor rule on `[-R, R]^d` for the x variable.
fn space_rule(d: usize, base: f64, radius: f64, per_panel: usize) -> AxisRule {
    let (r, w) = dyadic_half_line_rule(base, radius, per_panel);
    let mut axis: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    for (ri, wi) in r.iter().zip(&w) {
        axis.push((*ri, *wi));
        axis.push((-*ri, *wi));
    }
    let mut points = Vec::new();
    let mut weights = Vec::new();
    match d {
        1 => {
            for (x, w) in &axis {
                points.push([*x, 0.0]);
                weights.push(*w);
            }
        }
        _ => {
            for (a, wa) in &axis {
                for (b, wb) in &axis {
                    points.push([*a, *b]);
                    weights.push(wa * wb);
                }
            }
        }
    }
    AxisRule { points, weights }
}

/// Radial rule for the frequency variable; returns `(|ξ|, weight)`.
fn radial_rule(d: usize, base: f64, radius: f64, per_panel: usize) -> (Vec<f64>, Vec<f64>) {
    let (r, w) = dyadic_half_line_rule(base, radius, per_panel);
    let mut rs = vec![0.0];
    let mut ws = vec![0.0];
    for (ri, wi) in r.iter().zip(&w) {
        rs.push(*ri);
        // surface measure of the sphere of radius r in R^d
        ws.push(if d == 1 { 2.0 * wi } else { 2.0 * std::f64::consts::PI * ri * wi });
    }
    (rs, ws)
}

fn weighted_lp(values: &[f64], weights: &[f64], p: &Exponent) -> f64 {
    let max = values.iter().fold(0.0f64, |m, v| m.max(*v));
    match p {
        Exponent::Infinity => max,
        Exponent::Finite(p) => {
            if max == 0.0 {
                return 0.0;
            }
            let terms: Vec<f64> = values.iter().zip(weights).map(|(v, w)| w * (v / max).powf(*p)).collect();
            max * pairwise_sum(&terms).powf(1.0 / p)
        }
    }
}

fn evaluate_at_radius(params: &WeightQuotientParams, t: f64, radius: f64) -> f64 {
    let osc = &params.osc;
    let d = osc.dimension();
    let xr = space_rule(d, params.panel_base, radius, params.nodes_per_panel);
    let (xi_r, xi_w) = radial_rule(d, params.panel_base, radius, params.nodes_per_panel);
    let a: Vec<f64> = xr
        .points
        .iter()
        .map(|p| evaluate_potential(osc.potential(), &p[..d]).sqrt())
        .collect();
    let beta = osc.beta();
    let n = params.n_pow as f64;
    let integrand = |a: f64, b: f64| match params.form {
        QuotientForm::Definition => {
            let v = osc.q1() + a + b;
            v.powf(params.s2) / (1.0 + t.powf(n) * v.powf(2.0 * beta * n))
        }
        QuotientForm::Reduced => (1.0 + t.powf(1.0 / (2.0 * beta)) * (a + b)).powf(params.s2 - 2.0 * beta * n),
    };
    let inner: Vec<f64> = xi_r
        .par_iter()
        .map(|r| {
            let b = r.powi(osc.l() as i32);
            let vals: Vec<f64> = a.iter().map(|&ai| integrand(ai, b)).collect();
            weighted_lp(&vals, &xr.weights, &params.p_tilde)
        })
        .collect();
    weighted_lp(&inner, &xi_w, &params.q_tilde)
}

/// `‖quotient‖_{L^{p̃,q̃}}` over the truncated box, guarded by comparing
/// against the doubled box.
pub fn weight_quotient_norm(params: &WeightQuotientParams, t: f64) -> Result<f64> {
    params.validate()?;
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::arg(format!("t must lie in (0, 1], got {t}")));
    }
    let value = evaluate_at_radius(params, t, params.radius);
    let doubled = evaluate_at_radius(params, t, 2.0 * params.radius);
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::Numerical(format!("quotient norm {value} at t = {t}")));
    }
    let change = (doubled - value).abs() / doubled;
    if change >= 5e-3 {
        return Err(Error::Truncation {
            relative_change: change,
            suggested_radius: 4.0 * params.radius,
        });
    }
    Ok(doubled)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub t_min: f64,
    pub t_max: f64,
    /// `-σ`.
    pub target: f64,
    pub relative_deviation: f64,
    /// `R² < 0.98`.
    pub flagged: bool,
}

/// Six log-uniform times from `1e-3` to `1e-1`.
pub fn default_t_list() -> Vec<f64> {
    (0..6).map(|i| 10f64.powf(-3.0 + 0.4 * i as f64)).collect()
}

/// OLS of `log value` against `log t`, compared to `-σ`.
pub fn fit_decay_exponent(samples: &[(f64, f64)], sigma: f64) -> Result<DecayFitResult> {
    if samples.len() < 6 {
        return Err(Error::arg(format!("need at least 6 samples, got {}", samples.len())));
    }
    if samples.iter().any(|(t, v)| !(*t > 0.0 && *v > 0.0)) {
        return Err(Error::arg("times and values must be positive"));
    }
    let t_min = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let t_max = samples.iter().map(|s| s.0).fold(0.0, f64::max);
    if (t_max / t_min).log10() < 1.5 - 1e-12 {
        return Err(Error::arg("samples must span at least 1.5 decades of t"));
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let fit = fit_line(&xs, &ys)?;
    let target = -sigma;
    Ok(DecayFitResult {
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        t_min,
        t_max,
        target,
        relative_deviation: if sigma == 0.0 {
            fit.slope.abs()
        } else {
            (fit.slope - target).abs() / sigma.abs()
        },
        flagged: fit.r_squared < 0.98,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_substitutions() {
        let inf = Exponent::Infinity;
        let f = |p: f64| Exponent::Finite(p);
        assert_eq!(sigma(1, 1, 1, 1.0, &f(1.0), &f(1.0)), 1.0);
        assert_eq!(sigma(1, 2, 1, 1.0, &f(2.0), &f(2.0)), 3.0 / 8.0);
        assert_eq!(sigma(1, 1, 2, 2.0, &f(2.0), &inf), 1.0 / 8.0);
        assert_eq!(sigma(2, 1, 1, 1.0, &inf, &inf), 0.0);
    }

    #[test]
    fn synthetic_power_law_fit() {
        let samples: Vec<(f64, f64)> = default_t_list().into_iter().map(|t| (t, 3.0 / t)).collect();
        let fit = fit_decay_exponent(&samples, 1.0).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-10);
        assert!(fit.relative_deviation < 1e-10);
        assert!(!fit.flagged);
        assert!(fit_decay_exponent(&samples[..5], 1.0).is_err());
        let narrow: Vec<(f64, f64)> = (0..6).map(|i| (0.1 + 0.01 * i as f64, 1.0)).collect();
        assert!(fit_decay_exponent(&narrow, 1.0).is_err());
        let mut bad = samples.clone();
        bad[2].1 = 0.0;
        assert!(fit_decay_exponent(&bad, 1.0).is_err());
    }

    #[test]
    fn default_n_pow_margin() {
        let osc = OscillatorSpec::hermite(1);
        let f = Exponent::Finite;
        assert_eq!(default_n_pow(&osc, 0.0, &f(1.0), &f(1.0)), 6);
        assert_eq!(default_n_pow(&osc, 0.0, &f(2.0), &Exponent::Infinity), 3);
    }

    #[test]
    fn sup_norm_is_weight_minimum() {
        let osc = OscillatorSpec::hermite(1);
        let inf = Exponent::Infinity;
        let params = WeightQuotientParams::new(osc, 0.0, inf, inf, QuotientForm::Definition).unwrap();
        for t in [0.01, 0.3, 1.0] {
            let v = weight_quotient_norm(&params, t).unwrap();
            let expect = 1.0 / (1.0 + t.powi(params.n_pow as i32));
            assert!((v - expect).abs() < 1e-14, "{v} vs {expect}");
        }
    }

    #[test]
    fn monotone_in_time() {
        let osc = OscillatorSpec::anharmonic(1, 2, 1);
        let f = Exponent::Finite;
        for form in [QuotientForm::Definition, QuotientForm::Reduced] {
            let params = WeightQuotientParams::new(osc.clone(), 0.0, f(2.0), f(1.5), form).unwrap();
            let vals: Vec<f64> = [0.001, 0.01, 0.1, 1.0]
                .iter()
                .map(|&t| weight_quotient_norm(&params, t).unwrap())
                .collect();
            assert!(vals.windows(2).all(|w| w[0] > w[1]), "{vals:?}");
        }
    }

    #[test]
    fn rejects_non_integrable_power() {
        let osc = OscillatorSpec::hermite(1);
        let f = Exponent::Finite;
        let mut params = WeightQuotientParams::new(osc, 0.0, f(1.0), f(1.0), QuotientForm::Reduced).unwrap();
        params.n_pow = 1;
        params.s2 = 1.5;
        assert!(weight_quotient_norm(&params, 0.1).is_err());
    }
}
