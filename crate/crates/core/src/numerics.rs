//! Shared numerical kernels: quadrature on unit cubes, certified truncation of
//! Gaussian lattice sums, and compensated summation in a fixed order.
//!
//! Every parallel loop in the crate collects its terms in canonical order and
//! reduces them sequentially with [`ComplexSum`], so results do not depend on
//! the number of worker threads.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num::complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::RealMat;

/// Neumaier's variant of Kahan summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Compensated sum of `terms` in the order given.
pub fn sum_deterministic(terms: &[Complex64]) -> Complex64 {
    let mut s = ComplexSum::default();
    for &t in terms {
        s.add(t);
    }
    s.value()
}

pub fn sum_real(terms: &[f64]) -> f64 {
    let mut s = NeumaierSum::default();
    for &t in terms {
        s.add(t);
    }
    s.value()
}

/// Maps `f` over `items` in parallel and sums the results in item order.
pub fn par_sum<I, F>(items: &[I], f: F) -> Complex64
where
    I: Sync,
    F: Fn(&I) -> Complex64 + Sync + Send,
{
    let terms: Vec<Complex64> = items.par_iter().map(f).collect();
    sum_deterministic(&terms)
}

/// A measured defect together with a certified bound on the numerical error
/// (truncation tails plus quadrature estimates) that went into it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub value: f64,
    pub bound: f64,
}

impl Residual {
    pub fn new(value: f64, bound: f64) -> Self {
        Residual { value, bound }
    }

    /// Componentwise maximum, for aggregating over probes.
    pub fn max(self, other: Self) -> Self {
        Residual { value: self.value.max(other.value), bound: self.bound.max(other.bound) }
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(p: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; p];
    let mut weights = vec![0.0; p];
    for i in 0..p.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (p as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=p {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if p == 1 {
                p1 = x;
                p0 = 1.0;
            }
            dp = p as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        if p == 1 {
            x = 0.0;
            dp = 1.0;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[p - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[p - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    /// Exact for polynomials of degree `2p - 1`.
    GaussLegendre,
    /// Equal-weight midpoint rule; exact for trigonometric polynomials with
    /// integer frequencies `|k| < p`.
    Periodic,
}

/// One-dimensional rule on `[0, 1]`, used as a tensor product on cubes.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    kind: RuleKind,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(kind: RuleKind, points: usize) -> Result<Self> {
        if points == 0 {
            return Err(Error::InvalidArgument("quadrature needs at least one point".into()));
        }
        let (nodes, weights) = match kind {
            RuleKind::GaussLegendre => gauss_legendre(points),
            RuleKind::Periodic => {
                ((0..points).map(|i| (i as f64 + 0.5) / points as f64).collect(), vec![1.0 / points as f64; points])
            }
        };
        Ok(QuadratureRule { kind, nodes, weights })
    }

    pub fn gauss_legendre(points: usize) -> Result<Self> {
        Self::new(RuleKind::GaussLegendre, points)
    }

    pub fn periodic(points: usize) -> Result<Self> {
        Self::new(RuleKind::Periodic, points)
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn points(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The same kind of rule with half the points (at least one), used for
    /// the error estimate.
    pub fn halved(&self) -> Self {
        Self::new(self.kind, (self.points() / 2).max(1)).expect("positive")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: Complex64,
    /// `|value - value at half the points|`.
    pub error_estimate: f64,
}

/// Tensor-product quadrature over `[0,1]^{rules.len()}`, one rule per axis.
/// Nodes are visited in row-major order (last axis fastest).
pub fn integrate_product<F>(rules: &[&QuadratureRule], f: F) -> Complex64
where
    F: Fn(&[f64]) -> Complex64 + Sync + Send,
{
    let total: usize = rules.iter().map(|r| r.points()).product();
    let terms: Vec<Complex64> = (0..total)
        .into_par_iter()
        .map(|mut k| {
            let mut x = vec![0.0; rules.len()];
            let mut w = 1.0;
            for (axis, r) in rules.iter().enumerate().rev() {
                let i = k % r.points();
                k /= r.points();
                x[axis] = r.nodes[i];
                w *= r.weights[i];
            }
            f(&x) * w
        })
        .collect();
    sum_deterministic(&terms)
}

/// Integral over `[0,1]^n` with the same rule on every axis, plus the
/// half-rule error estimate.
pub fn integrate_cube<F>(n: usize, rule: &QuadratureRule, f: F) -> Quadrature
where
    F: Fn(&[f64]) -> Complex64 + Sync + Send,
{
    let fine = integrate_product(&vec![rule; n], &f);
    let half = rule.halved();
    let coarse = integrate_product(&vec![&half; n], &f);
    Quadrature { value: fine, error_estimate: (fine - coarse).norm() }
}

pub(crate) fn to_dmatrix(m: &RealMat) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

/// Majorant `|f(x)| <= exp(log_amplitude) * exp(-π rate ‖x - center‖²)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianDecay {
    pub log_amplitude: f64,
    pub center: Vec<f64>,
    pub rate: f64,
}

impl GaussianDecay {
    /// Majorant of `|γ| exp(-π xᵀYx - 2π vᵀx)` for `Y` symmetric positive
    /// definite: complete the square and bound `Y` below by its smallest
    /// eigenvalue (shaved by a relative `1e-9` against rounding).
    pub fn from_quadratic(abs_gamma: f64, y: &RealMat, v: &[f64]) -> Result<Self> {
        let n = v.len();
        if y.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!("{}x{} form with {n} drift", y.rows(), y.cols())));
        }
        let ym = to_dmatrix(y);
        let eig = SymmetricEigen::new(ym.clone());
        let q = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let qmax = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        if !(q > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        if qmax / q > 1e12 {
            return Err(Error::NumericallySingular(qmax / q));
        }
        let vv = DVector::from_column_slice(v);
        let c = ym.cholesky().ok_or(Error::NotPositiveDefinite)?.solve(&vv);
        Ok(GaussianDecay {
            log_amplitude: abs_gamma.ln() + std::f64::consts::PI * vv.dot(&c),
            center: c.iter().map(|x| -x).collect(),
            rate: q * (1.0 - 1e-9),
        })
    }
}

/// How lattice sums are truncated: the smallest box radius whose certified
/// tail is at most `eps`, capped at `r_max`; or a fixed radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub eps: f64,
    pub r_max: i64,
    pub fixed: Option<i64>,
}

impl TruncationPolicy {
    pub fn new(eps: f64, r_max: i64) -> Result<Self> {
        if !(eps > 0.0) || r_max < 1 {
            return Err(Error::InvalidArgument(format!("truncation eps = {eps}, r_max = {r_max}")));
        }
        Ok(TruncationPolicy { eps, r_max, fixed: None })
    }

    pub fn fixed(radius: i64) -> Self {
        TruncationPolicy { eps: f64::INFINITY, r_max: radius, fixed: Some(radius) }
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { eps: 1e-12, r_max: 8, fixed: None }
    }
}

/// Truncation of `Σ_{ℓ ∈ Z^n} f(shift + ℓ)` to the box `‖ℓ - box_center‖∞ <= radius`.
#[derive(Clone, Debug, PartialEq)]
pub struct TailBound {
    pub rate: f64,
    /// Offset of the decay center from the nearest lattice translate, in `[-1/2, 1/2]^n`.
    pub drift: Vec<f64>,
    pub box_center: Vec<i64>,
    pub radius: i64,
    pub bound: f64,
}

fn one_sided_tail(q: f64, d: f64) -> f64 {
    // Σ_{k>=0} e^{-πq(d+k)²} <= e^{-πq d²} / (1 - e^{-2πq d}) for d > 0
    (-std::f64::consts::PI * q * d * d).exp() / (1.0 - (-2.0 * std::f64::consts::PI * q * d).exp())
}

/// Certified bound on the part of the lattice sum outside the box of the
/// given radius.
///
/// Per axis, with `S_R` the partial sum of `e^{-πq(k-δ)²}` over `|k| <= R`
/// and `t` the two geometric tails, the outside part of the product sum is
/// at most `Π(S_R + t) - Π S_R`, evaluated by telescoping to avoid
/// cancellation.
pub fn lattice_tail_bound(decay: &GaussianDecay, shift: &[f64], radius: i64) -> TailBound {
    let q = decay.rate;
    let pi = std::f64::consts::PI;
    let mut box_center = Vec::with_capacity(shift.len());
    let mut drift = Vec::with_capacity(shift.len());
    for (c, s) in decay.center.iter().zip(shift) {
        let z = (c - s).round();
        box_center.push(z as i64);
        drift.push(c - s - z);
    }
    let r = radius as f64;
    let partial: Vec<f64> = drift
        .iter()
        .map(|d| sum_real(&(-radius..=radius).map(|k| (-pi * q * (k as f64 - d).powi(2)).exp()).collect::<Vec<_>>()))
        .collect();
    let tails: Vec<f64> =
        drift.iter().map(|d| one_sided_tail(q, r + 1.0 - d) + one_sided_tail(q, r + 1.0 + d)).collect();
    let mut total = 0.0;
    for i in 0..drift.len() {
        let mut term = tails[i];
        for j in 0..drift.len() {
            if j < i {
                term *= partial[j];
            } else if j > i {
                term *= partial[j] + tails[j];
            }
        }
        total += term;
    }
    TailBound {
        rate: q,
        drift,
        box_center,
        radius,
        // slack for rounding in the partial sums, which can be as tight as the first tail term
        bound: decay.log_amplitude.exp() * total * (1.0 + 1e-10),
    }
}

/// Radius selected by `policy` for the sum `Σ_ℓ f(shift + ℓ)`.
pub fn truncation_radius(decay: &GaussianDecay, shift: &[f64], policy: &TruncationPolicy) -> Result<TailBound> {
    if let Some(r) = policy.fixed {
        return Ok(lattice_tail_bound(decay, shift, r));
    }
    let mut last = None;
    for r in 0..=policy.r_max {
        let tb = lattice_tail_bound(decay, shift, r);
        if tb.bound <= policy.eps {
            return Ok(tb);
        }
        last = Some(tb.bound);
    }
    Err(Error::TailBudgetExceeded { bound: last.unwrap_or(f64::INFINITY), eps: policy.eps, r_max: policy.r_max })
}

/// Integer points of the box `‖ℓ - center‖∞ <= radius`, lexicographic.
pub fn box_points(center: &[i64], radius: i64) -> Vec<Vec<i64>> {
    let n = center.len();
    let side = (2 * radius + 1) as usize;
    let total = side.pow(n as u32);
    (0..total)
        .map(|mut k| {
            let mut p = vec![0i64; n];
            for axis in (0..n).rev() {
                p[axis] = center[axis] - radius + (k % side) as i64;
                k /= side;
            }
            p
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn gauss_legendre_basics() {
        for p in 1..=40 {
            let (x, w) = gauss_legendre(p);
            assert!((sum_real(&w) - 1.0).abs() < 1e-14, "p = {p}");
            assert!(w.iter().all(|&w| w > 0.0));
            assert!(x.windows(2).all(|s| s[0] < s[1]));
        }
        let (x, _) = gauss_legendre(2);
        assert!((x[0] - (0.5 - 0.5 / 3f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn polynomial_exactness() {
        for p in [1usize, 2, 5, 16, 32] {
            let rule = QuadratureRule::gauss_legendre(p).unwrap();
            for deg in 0..2 * p {
                let v = integrate_product(&[&rule], |x| c(x[0].powi(deg as i32)));
                assert!((v.re - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13, "p={p} deg={deg}");
            }
        }
        let rule = QuadratureRule::gauss_legendre(3).unwrap();
        let q = integrate_cube(2, &rule, |x| c(x[0].powi(5) * x[1].powi(4)));
        assert!((q.value.re - 1.0 / 30.0).abs() < 1e-14);
    }

    #[test]
    fn cube_examples() {
        let rule = QuadratureRule::gauss_legendre(1).unwrap();
        assert!((integrate_cube(1, &rule, |x| c(x[0])).value.re - 0.5).abs() < 1e-15);
        let rule = QuadratureRule::gauss_legendre(32).unwrap();
        for n in 1..=3 {
            assert!((integrate_cube(n, &rule, |_| c(1.0)).value.re - 1.0).abs() < 1e-15);
        }
        let tau = std::f64::consts::TAU;
        for m in [[1i32, 0], [2, -3], [0, 5]] {
            let q = integrate_cube(2, &rule, |x| {
                Complex64::from_polar(1.0, tau * (m[0] as f64 * x[0] + m[1] as f64 * x[1]))
            });
            assert!(q.value.norm() < 1e-10, "{m:?}");
        }
    }

    #[test]
    fn periodic_rule_resolves_frequencies_below_points() {
        let rule = QuadratureRule::periodic(8).unwrap();
        let tau = std::f64::consts::TAU;
        for k in -7i32..=7 {
            let v = integrate_product(&[&rule], |x| Complex64::from_polar(1.0, tau * k as f64 * x[0]));
            let expect = if k == 0 { 1.0 } else { 0.0 };
            assert!((v - c(expect)).norm() < 1e-14, "k = {k}");
        }
        let v = integrate_product(&[&rule], |x| Complex64::from_polar(1.0, tau * 8.0 * x[0]));
        assert!((v.re + 1.0).abs() < 1e-12);
    }

    #[test]
    fn summation_examples() {
        assert_eq!(sum_deterministic(&[]), Complex64::new(0.0, 0.0));
        let mut terms: Vec<Complex64> = (0..1000).map(|k| c(1.0 / (k as f64 + 1.0))).collect();
        let a = sum_deterministic(&terms);
        let b = par_sum(&terms, |&t| t);
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        terms.shuffle(&mut ChaCha8Rng::seed_from_u64(3));
        let shuffled = sum_deterministic(&terms);
        assert!((shuffled - a).norm() < 1e-14);
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let terms = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(sum_real(&terms), 2.0);
    }

    #[test]
    fn alternating_harmonic_million_terms() {
        // Partial sum of the alternating harmonic series to 10^6 terms, via the
        // digamma closed form in mpmath at 50 digits.
        const ORACLE: f64 = 0.693_146_680_560_195_3;
        let terms: Vec<f64> =
            (1..=1_000_000).map(|k| if k % 2 == 1 { 1.0 / k as f64 } else { -1.0 / k as f64 }).collect();
        assert!((sum_real(&terms) - ORACLE).abs() < 1e-14);
    }

    #[test]
    fn truncation_radius_examples() {
        let decay = GaussianDecay { log_amplitude: 0.0, center: vec![0.0], rate: 1.0 };
        let policy = TruncationPolicy::new(1e-8, 20).unwrap();
        for lam in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let tb = truncation_radius(&decay, &[lam], &policy).unwrap();
            assert!(tb.radius <= 4, "lambda = {lam}");
        }
        let strict = TruncationPolicy::new(1e-300, 3).unwrap();
        assert!(matches!(truncation_radius(&decay, &[0.3], &strict), Err(Error::TailBudgetExceeded { .. })));
    }

    #[test]
    fn tail_bound_is_monotone() {
        let decay = GaussianDecay { log_amplitude: 0.3, center: vec![0.2, -1.7], rate: 0.4 };
        let mut prev = f64::INFINITY;
        for r in 0..12 {
            let b = lattice_tail_bound(&decay, &[0.1, 0.6], r).bound;
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn tail_bound_dominates_exhaustive_tail() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        use rand::Rng;
        for n in 1..=2usize {
            for _ in 0..20 {
                let rate = rng.gen_range(0.2..2.0);
                let center: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let shift: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
                let decay = GaussianDecay { log_amplitude: 0.0, center: center.clone(), rate };
                for r in 0..=6 {
                    let tb = lattice_tail_bound(&decay, &shift, r);
                    let wide = box_points(&tb.box_center, r + 40);
                    let mut tail = Vec::new();
                    for p in wide {
                        let inside = p.iter().zip(&tb.box_center).all(|(a, b)| (a - b).abs() <= r);
                        if !inside {
                            let d2: f64 = (0..n).map(|i| (shift[i] + p[i] as f64 - center[i]).powi(2)).sum();
                            tail.push((-std::f64::consts::PI * rate * d2).exp());
                        }
                    }
                    let actual = sum_real(&tail);
                    assert!(tb.bound >= actual, "n={n} r={r} bound={} actual={actual}", tb.bound);
                    assert!(tb.bound <= 3.0 * actual + 1e-300);
                }
            }
        }
    }

    #[test]
    fn decay_from_quadratic_majorizes() {
        let y = RealMat::from_rows(vec![vec![1.0, 0.3], vec![0.3, 0.5]]).unwrap();
        let v = [0.4, -0.2];
        let d = GaussianDecay::from_quadratic(2.0, &y, &v).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        use rand::Rng;
        for _ in 0..200 {
            let x = [rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)];
            let quad = x[0] * x[0] * 1.0 + 2.0 * 0.3 * x[0] * x[1] + 0.5 * x[1] * x[1];
            let lin = v[0] * x[0] + v[1] * x[1];
            let f = 2.0 * (-std::f64::consts::PI * (quad + 2.0 * lin)).exp();
            let r2 = (x[0] - d.center[0]).powi(2) + (x[1] - d.center[1]).powi(2);
            let maj = (d.log_amplitude - std::f64::consts::PI * d.rate * r2).exp();
            assert!(f <= maj * (1.0 + 1e-12));
        }
    }

    #[test]
    fn box_points_order() {
        let pts = box_points(&[0, 5], 1);
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0], vec![-1, 4]);
        assert_eq!(pts[1], vec![-1, 5]);
        assert_eq!(pts[8], vec![1, 6]);
        assert_eq!(box_points(&[], 3), vec![Vec::<i64>::new()]);
    }
}
