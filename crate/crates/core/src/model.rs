//! Oscillator, potential, weight and exponent types.
//!
//! Frequencies passed to [`weight_value`] are in the variable of the
//! operator symbol `|ξ|^{2l} + V(x)`, i.e. angular frequency. The
//! phase-space module converts its lattice frequencies before calling in.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SPHERE_SAMPLES: usize = 2000;
const SPHERE_SEED: u64 = 0x5eed_5a3e;

/// One monomial `coefficient * Π x_i^{exponents[i]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub exponents: Vec<u32>,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialKind {
    /// `V(x) = a |x|^{2k}`.
    IsoPower {
        #[serde(default = "one")]
        coefficient: f64,
    },
    /// `V(x) = Σ_j a_j |x_j|^{2k}`.
    AnisoSum { coefficients: Vec<f64> },
    /// Arbitrary polynomial, homogeneous of total degree `2k`.
    CustomPoly { terms: Vec<PolyTerm> },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RawPotential {
    dimension: usize,
    degree_half: u32,
    #[serde(flatten)]
    kind: PotentialKind,
}

/// Strictly positive potential, homogeneous of degree `2k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPotential", into = "RawPotential")]
pub struct PotentialSpec {
    dimension: usize,
    degree_half: u32,
    kind: PotentialKind,
}

impl TryFrom<RawPotential> for PotentialSpec {
    type Error = Error;
    fn try_from(raw: RawPotential) -> Result<Self> {
        PotentialSpec::new(raw.dimension, raw.degree_half, raw.kind)
    }
}

impl From<PotentialSpec> for RawPotential {
    fn from(p: PotentialSpec) -> Self {
        RawPotential {
            dimension: p.dimension,
            degree_half: p.degree_half,
            kind: p.kind,
        }
    }
}

impl PotentialSpec {
    pub fn new(dimension: usize, degree_half: u32, kind: PotentialKind) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidPotential("dimension must be at least 1".into()));
        }
        if degree_half == 0 {
            return Err(Error::InvalidPotential("degree_half k must be positive".into()));
        }
        match &kind {
            PotentialKind::IsoPower { coefficient } => {
                if !(coefficient.is_finite() && *coefficient > 0.0) {
                    return Err(Error::InvalidPotential(format!(
                        "iso_power coefficient must be positive, got {coefficient}"
                    )));
                }
            }
            PotentialKind::AnisoSum { coefficients } => {
                if coefficients.len() != dimension {
                    return Err(Error::InvalidPotential(format!(
                        "aniso_sum needs {dimension} coefficients, got {}",
                        coefficients.len()
                    )));
                }
                if let Some(a) = coefficients.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
                    return Err(Error::InvalidPotential(format!(
                        "aniso_sum coefficients must be positive, got {a}"
                    )));
                }
            }
            PotentialKind::CustomPoly { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidPotential("custom_poly has no terms".into()));
                }
                for t in terms {
                    if t.exponents.len() != dimension {
                        return Err(Error::InvalidPotential(format!(
                            "custom_poly multi-index {:?} does not match dimension {dimension}",
                            t.exponents
                        )));
                    }
                    let total: u32 = t.exponents.iter().sum();
                    if total != 2 * degree_half {
                        return Err(Error::InvalidPotential(format!(
                            "custom_poly term {:?} has degree {total}, expected {}",
                            t.exponents,
                            2 * degree_half
                        )));
                    }
                    if !t.coefficient.is_finite() {
                        return Err(Error::InvalidPotential("non-finite coefficient".into()));
                    }
                }
            }
        }
        let spec = PotentialSpec {
            dimension,
            degree_half,
            kind,
        };
        spec.check_sphere_positivity()?;
        Ok(spec)
    }

    /// `V(x) = |x|^{2k}`.
    pub fn iso_power(dimension: usize, degree_half: u32) -> Self {
        PotentialSpec::new(dimension, degree_half, PotentialKind::IsoPower { coefficient: 1.0 })
            .expect("unit iso_power potential is valid")
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn degree_half(&self) -> u32 {
        self.degree_half
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    /// Positivity on the unit sphere plus homogeneity gives `V > 0` away
    /// from the origin.
    fn check_sphere_positivity(&self) -> Result<()> {
        for point in unit_sphere_samples(self.dimension) {
            let v = self.eval(&point);
            if !(v > 0.0) {
                return Err(Error::InvalidPotential(format!(
                    "V({point:?}) = {v} is not positive on the unit sphere"
                )));
            }
        }
        Ok(())
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let k = self.degree_half as i32;
        match &self.kind {
            PotentialKind::IsoPower { coefficient } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                coefficient * r2.powi(k)
            }
            PotentialKind::AnisoSum { coefficients } => coefficients
                .iter()
                .zip(x)
                .map(|(a, xi)| a * (xi * xi).powi(k))
                .sum(),
            PotentialKind::CustomPoly { terms } => terms
                .iter()
                .map(|t| {
                    t.coefficient
                        * t.exponents
                            .iter()
                            .zip(x)
                            .map(|(e, xi)| xi.powi(*e as i32))
                            .product::<f64>()
                })
                .sum(),
        }
    }
}

/// Quasi-uniform points on the unit sphere of `R^d`.
fn unit_sphere_samples(d: usize) -> Vec<Vec<f64>> {
    match d {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..SPHERE_SAMPLES)
            .map(|i| {
                let th = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / SPHERE_SAMPLES as f64;
                vec![th.cos(), th.sin()]
            })
            .collect(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(SPHERE_SEED);
            let mut out = Vec::with_capacity(SPHERE_SAMPLES + 2 * d);
            // coordinate axes first, where anisotropic sums are smallest
            for i in 0..d {
                for sign in [1.0, -1.0] {
                    let mut e = vec![0.0; d];
                    e[i] = sign;
                    out.push(e);
                }
            }
            while out.len() < SPHERE_SAMPLES + 2 * d {
                let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
                let r: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                if r > 1e-3 && r <= 1.0 {
                    out.push(v.iter().map(|a| a / r).collect());
                }
            }
            out
        }
    }
}

/// `V(x)` for a validated potential.
pub fn evaluate_potential(spec: &PotentialSpec, x: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), spec.dimension);
    spec.eval(x)
}

/// Parameters of `H_{k,l} = (-Δ)^l + V(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOscillator", into = "RawOscillator")]
pub struct OscillatorSpec {
    dimension: usize,
    l: u32,
    potential: PotentialSpec,
    beta: f64,
    q1: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawOscillator {
    dimension: usize,
    l: u32,
    potential: PotentialSpec,
    #[serde(default = "one")]
    beta: f64,
    #[serde(default = "one")]
    q1: f64,
}

impl TryFrom<RawOscillator> for OscillatorSpec {
    type Error = Error;
    fn try_from(r: RawOscillator) -> Result<Self> {
        OscillatorSpec::new(r.dimension, r.l, r.potential, r.beta, r.q1)
    }
}

impl From<OscillatorSpec> for RawOscillator {
    fn from(o: OscillatorSpec) -> Self {
        RawOscillator {
            dimension: o.dimension,
            l: o.l,
            potential: o.potential,
            beta: o.beta,
            q1: o.q1,
        }
    }
}

impl OscillatorSpec {
    pub fn new(dimension: usize, l: u32, potential: PotentialSpec, beta: f64, q1: f64) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::arg("dimension must be at least 1"));
        }
        if potential.dimension() != dimension {
            return Err(Error::arg(format!(
                "potential dimension {} does not match oscillator dimension {dimension}",
                potential.dimension()
            )));
        }
        if l == 0 {
            return Err(Error::arg("Laplacian power l must be at least 1"));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::arg(format!("beta must be positive, got {beta}")));
        }
        // q1 >= 1 keeps q1 + V + |ξ|^{2l} >= 1
        if !(q1.is_finite() && q1 >= 1.0) {
            return Err(Error::arg(format!("offset q1 must be >= 1, got {q1}")));
        }
        Ok(OscillatorSpec {
            dimension,
            l,
            potential,
            beta,
            q1,
        })
    }

    /// `-Δ + |x|^2` with β = 1, q₁ = 1.
    pub fn hermite(dimension: usize) -> Self {
        Self::anharmonic(dimension, 1, 1)
    }

    /// `(-Δ)^l + |x|^{2k}` with β = 1, q₁ = 1.
    pub fn anharmonic(dimension: usize, k: u32, l: u32) -> Self {
        OscillatorSpec::new(dimension, l, PotentialSpec::iso_power(dimension, k), 1.0, 1.0)
            .expect("unit anharmonic oscillator is valid")
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::arg(format!("beta must be positive, got {beta}")));
        }
        self.beta = beta;
        Ok(self)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }
    pub fn l(&self) -> u32 {
        self.l
    }
    pub fn k(&self) -> u32 {
        self.potential.degree_half()
    }
    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn q1(&self) -> f64 {
        self.q1
    }

    /// True for `-Δ + |x|^2` (unit coefficient).
    pub fn is_hermite(&self) -> bool {
        self.l == 1
            && self.k() == 1
            && matches!(self.potential.kind(), PotentialKind::IsoPower { coefficient } if *coefficient == 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    /// `(q₁ + V(x)^{1/2} + |ξ|^l)^s`
    Anharmonic,
    /// `(1 + |x| + |ξ|)^s`
    Polynomial,
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub kind: WeightKind,
    pub s: f64,
}

impl WeightSpec {
    pub fn anharmonic(s: f64) -> Self {
        WeightSpec {
            kind: WeightKind::Anharmonic,
            s,
        }
    }
    pub fn polynomial(s: f64) -> Self {
        WeightSpec {
            kind: WeightKind::Polynomial,
            s,
        }
    }
    pub fn flat() -> Self {
        WeightSpec {
            kind: WeightKind::Flat,
            s: 0.0,
        }
    }

    /// The unpowered weight `ṽ(x, ξ)`, so that `v_s = ṽ^s`.
    pub fn base(&self, osc: &OscillatorSpec, x: &[f64], xi: &[f64]) -> f64 {
        match self.kind {
            WeightKind::Anharmonic => {
                let v = evaluate_potential(osc.potential(), x);
                let xi_abs = norm2(xi);
                osc.q1() + v.sqrt() + xi_abs.powi(osc.l() as i32)
            }
            WeightKind::Polynomial => 1.0 + norm2(x) + norm2(xi),
            WeightKind::Flat => 1.0,
        }
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// `v_s(x, ξ)` for the weight's kind.
pub fn weight_value(w: &WeightSpec, osc: &OscillatorSpec, x: &[f64], xi: &[f64]) -> f64 {
    if w.kind == WeightKind::Flat {
        return 1.0;
    }
    w.base(osc, x, xi).powf(w.s)
}

/// A phase-space point `(x, ξ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
}

impl PhasePoint {
    fn add(&self, other: &PhasePoint) -> PhasePoint {
        PhasePoint {
            x: self.x.iter().zip(&other.x).map(|(a, b)| a + b).collect(),
            xi: self.xi.iter().zip(&other.xi).map(|(a, b)| a + b).collect(),
        }
    }
}

/// `max v(X+Y) / (v(X) v(Y))` over the sampled pairs.
pub fn submultiplicativity_defect(
    w: &WeightSpec,
    osc: &OscillatorSpec,
    samples: &[(PhasePoint, PhasePoint)],
) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::arg("submultiplicativity_defect: empty sample set"));
    }
    if w.s < 0.0 {
        return Err(Error::arg("submultiplicativity_defect requires s >= 0"));
    }
    let mut worst = f64::NEG_INFINITY;
    for (a, b) in samples {
        let sum = a.add(b);
        let ratio = weight_value(w, osc, &sum.x, &sum.xi)
            / (weight_value(w, osc, &a.x, &a.xi) * weight_value(w, osc, &b.x, &b.xi));
        worst = worst.max(ratio);
    }
    Ok(worst)
}

/// A Lebesgue exponent in `(0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self> {
        if p.is_finite() && p > 0.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::arg(format!("exponent must be positive and finite, got {p}")))
        }
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn reciprocal(&self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinity => 0.0,
        }
    }

    /// Exponent with the given reciprocal; `0` maps to `∞`.
    pub fn from_reciprocal(r: f64) -> Result<Self> {
        if r == 0.0 {
            Ok(Exponent::Infinity)
        } else if r > 0.0 && r.is_finite() {
            Ok(Exponent::Finite(1.0 / r))
        } else {
            Err(Error::arg(format!("reciprocal exponent must be >= 0, got {r}")))
        }
    }

    /// Hölder conjugate, defined for exponents `>= 1`.
    pub fn conjugate(&self) -> Option<Exponent> {
        match *self {
            Exponent::Infinity => Some(Exponent::Finite(1.0)),
            Exponent::Finite(p) if p == 1.0 => Some(Exponent::Infinity),
            Exponent::Finite(p) if p > 1.0 => Some(Exponent::Finite(p / (p - 1.0))),
            Exponent::Finite(_) => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

// Serialized as a number or the string "inf".
impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(p) => Exponent::finite(p).map_err(serde::de::Error::custom),
            Repr::Str(s) if s == "inf" || s == "infinity" => Ok(Exponent::Infinity),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("invalid exponent {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedNormParams {
    pub p: Exponent,
    pub q: Exponent,
}

impl MixedNormParams {
    pub fn new(p: Exponent, q: Exponent) -> Self {
        MixedNormParams { p, q }
    }

    pub fn finite(p: f64, q: f64) -> Result<Self> {
        Ok(MixedNormParams {
            p: Exponent::finite(p)?,
            q: Exponent::finite(q)?,
        })
    }

    pub fn p_conjugate(&self) -> Option<Exponent> {
        self.p.conjugate()
    }

    pub fn q_conjugate(&self) -> Option<Exponent> {
        self.q.conjugate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn potential_examples() {
        let iso = PotentialSpec::iso_power(1, 1);
        assert_eq!(evaluate_potential(&iso, &[2.0]), 4.0);
        let aniso = PotentialSpec::new(2, 1, PotentialKind::AnisoSum { coefficients: vec![1.0, 2.0] }).unwrap();
        assert_eq!(evaluate_potential(&aniso, &[1.0, 1.0]), 3.0);
        assert_eq!(evaluate_potential(&iso, &[0.0]), 0.0);
    }

    #[test]
    fn rejects_nonpositive_potentials() {
        // x^2 - y^2 vanishes on the diagonal and is negative on the y axis
        let bad = PotentialSpec::new(
            2,
            1,
            PotentialKind::CustomPoly {
                terms: vec![
                    PolyTerm { exponents: vec![2, 0], coefficient: 1.0 },
                    PolyTerm { exponents: vec![0, 2], coefficient: -1.0 },
                ],
            },
        );
        assert!(matches!(bad, Err(Error::InvalidPotential(_))));
        let wrong_degree = PotentialSpec::new(
            1,
            2,
            PotentialKind::CustomPoly { terms: vec![PolyTerm { exponents: vec![2], coefficient: 1.0 }] },
        );
        assert!(wrong_degree.is_err());
        assert!(PotentialSpec::new(2, 1, PotentialKind::AnisoSum { coefficients: vec![1.0, 0.0] }).is_err());
        assert!(PotentialSpec::new(1, 1, PotentialKind::IsoPower { coefficient: -1.0 }).is_err());
    }

    #[test]
    fn custom_poly_positive_quartic_accepted() {
        // x^4 + x^2 y^2 + y^4
        let p = PotentialSpec::new(
            2,
            2,
            PotentialKind::CustomPoly {
                terms: vec![
                    PolyTerm { exponents: vec![4, 0], coefficient: 1.0 },
                    PolyTerm { exponents: vec![2, 2], coefficient: 1.0 },
                    PolyTerm { exponents: vec![0, 4], coefficient: 1.0 },
                ],
            },
        )
        .unwrap();
        assert_eq!(evaluate_potential(&p, &[1.0, 1.0]), 3.0);
    }

    #[test]
    fn oscillator_rejects_small_offset() {
        let pot = PotentialSpec::iso_power(1, 1);
        assert!(OscillatorSpec::new(1, 1, pot.clone(), 1.0, 0.5).is_err());
        assert!(OscillatorSpec::new(1, 0, pot.clone(), 1.0, 1.0).is_err());
        assert!(OscillatorSpec::new(2, 1, pot, 1.0, 1.0).is_err());
    }

    #[test]
    fn weight_examples() {
        let osc = OscillatorSpec::hermite(1);
        let w0 = WeightSpec::anharmonic(0.0);
        assert_eq!(weight_value(&w0, &osc, &[3.7], &[-1.2]), 1.0);
        let w1 = WeightSpec::anharmonic(1.0);
        assert_eq!(weight_value(&w1, &osc, &[1.0], &[1.0]), 3.0);
        let p2 = WeightSpec::polynomial(2.0);
        assert_eq!(weight_value(&p2, &osc, &[1.0], &[2.0]), 16.0);
        assert_eq!(weight_value(&WeightSpec::flat(), &osc, &[5.0], &[5.0]), 1.0);
    }

    fn uniform_pairs(n: usize, seed: u64) -> Vec<(PhasePoint, PhasePoint)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut u = || rng.random_range(-5.0..5.0);
        (0..n)
            .map(|_| {
                (
                    PhasePoint { x: vec![u()], xi: vec![u()] },
                    PhasePoint { x: vec![u()], xi: vec![u()] },
                )
            })
            .collect()
    }

    #[test]
    fn submultiplicativity_examples() {
        let osc = OscillatorSpec::hermite(1);
        let samples = uniform_pairs(10_000, 7);
        let d0 = submultiplicativity_defect(&WeightSpec::anharmonic(0.0), &osc, &samples).unwrap();
        assert_eq!(d0, 1.0);
        let d1 = submultiplicativity_defect(&WeightSpec::anharmonic(1.0), &osc, &samples).unwrap();
        assert!(d1 <= 1.0, "anharmonic defect {d1}");
        let dp = submultiplicativity_defect(&WeightSpec::polynomial(1.0), &osc, &samples).unwrap();
        assert!(dp <= 1.0, "polynomial defect {dp}");
        assert!(submultiplicativity_defect(&WeightSpec::anharmonic(1.0), &osc, &[]).is_err());
    }

    #[test]
    fn submultiplicativity_brute_force_oracle() {
        // independent pointwise scan of (1+|x+y|+|ξ+η|) <= (1+|x|+|ξ|)(1+|y|+|η|)
        let samples = uniform_pairs(10_000, 11);
        for (a, b) in &samples {
            let lhs = 1.0 + (a.x[0] + b.x[0]).abs() + (a.xi[0] + b.xi[0]).abs();
            let rhs = (1.0 + a.x[0].abs() + a.xi[0].abs()) * (1.0 + b.x[0].abs() + b.xi[0].abs());
            assert!(lhs <= rhs);
        }
    }

    #[test]
    fn exponent_conjugates() {
        assert_eq!(Exponent::Finite(2.0).conjugate(), Some(Exponent::Finite(2.0)));
        assert_eq!(Exponent::Finite(1.0).conjugate(), Some(Exponent::Infinity));
        assert_eq!(Exponent::Infinity.conjugate(), Some(Exponent::Finite(1.0)));
        assert_eq!(Exponent::Finite(0.5).conjugate(), None);
        assert!(Exponent::finite(0.0).is_err());
        assert_eq!(Exponent::from_reciprocal(0.0).unwrap(), Exponent::Infinity);
    }

    #[test]
    fn oscillator_serde_validates() {
        let json = r#"{"dimension":1,"l":1,"potential":{"dimension":1,"degree_half":2,"kind":"iso_power"}}"#;
        let osc: OscillatorSpec = serde_json::from_str(json).unwrap();
        assert_eq!(osc.k(), 2);
        assert_eq!(osc.q1(), 1.0);
        let bad = r#"{"dimension":1,"l":1,"q1":0.2,"potential":{"dimension":1,"degree_half":2,"kind":"iso_power"}}"#;
        assert!(serde_json::from_str::<OscillatorSpec>(bad).is_err());
        let exps: MixedNormParams = serde_json::from_str(r#"{"p":2,"q":"inf"}"#).unwrap();
        assert_eq!(exps.q, Exponent::Infinity);
    }

    proptest! {
        #[test]
        fn homogeneity(x in -3.0f64..3.0, y in -3.0f64..3.0, tau in 0.01f64..10.0, k in 1u32..4) {
            let specs = [
                PotentialSpec::iso_power(2, k),
                PotentialSpec::new(2, k, PotentialKind::AnisoSum { coefficients: vec![0.5, 3.0] }).unwrap(),
            ];
            for spec in &specs {
                let v = evaluate_potential(spec, &[x, y]);
                let vt = evaluate_potential(spec, &[tau * x, tau * y]);
                let expect = tau.powi(2 * k as i32) * v;
                prop_assert!((vt - expect).abs() <= 1e-12 * expect.max(1.0));
            }
        }

        #[test]
        fn weight_exponents_add(x in -4.0f64..4.0, xi in -4.0f64..4.0, s1 in -2.0f64..2.0, s2 in -2.0f64..2.0) {
            let osc = OscillatorSpec::anharmonic(1, 2, 1);
            for kind in [WeightKind::Anharmonic, WeightKind::Polynomial] {
                let w = |s| WeightSpec { kind, s };
                let lhs = weight_value(&w(s1 + s2), &osc, &[x], &[xi]);
                let rhs = weight_value(&w(s1), &osc, &[x], &[xi]) * weight_value(&w(s2), &osc, &[x], &[xi]);
                prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs);
                prop_assert_eq!(weight_value(&w(0.0), &osc, &[x], &[xi]), 1.0);
            }
        }

        #[test]
        fn defect_symmetric_in_pair_order(seed in 0u64..1000) {
            let osc = OscillatorSpec::anharmonic(1, 2, 2);
            let w = WeightSpec::anharmonic(1.5);
            let samples = uniform_pairs(50, seed);
            let swapped: Vec<_> = samples.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
            let a = submultiplicativity_defect(&w, &osc, &samples).unwrap();
            let b = submultiplicativity_defect(&w, &osc, &swapped).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
