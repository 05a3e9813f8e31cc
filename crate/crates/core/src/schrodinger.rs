//! Gaussian wave packets on `R^(h,g)` and the Schrödinger representation
//! `U(σ_c)` acting on them.
//!
//! A packet is `γ exp(πi xᵀQx + 2πi bᵀx)` with `x` the row-major
//! vectorization of `λ` and `Im Q` positive definite. Translations and linear
//! modulations map packets to packets, and inner products have a closed form,
//! so unitarity and homomorphism checks involve no discretization.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num::complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::exact::{trace, CplxMat, Mat, RealMat};
use crate::group::{Dim, GroupElement};
use crate::numerics::{gauss_legendre, sum_deterministic, to_dmatrix, GaussianDecay};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const PI: f64 = std::f64::consts::PI;
const TAU: f64 = std::f64::consts::TAU;

pub(crate) fn cis(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * x)
}

/// `σ(c X)` for real square matrices.
pub(crate) fn sigma(c: &RealMat, x: &RealMat) -> f64 {
    trace(&(c * x)).expect("square")
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianPacket {
    gamma: Complex64,
    q: CplxMat,
    b: Vec<Complex64>,
}

impl GaussianPacket {
    pub fn new(gamma: Complex64, q: CplxMat, b: Vec<Complex64>) -> Result<Self> {
        let n = b.len();
        if q.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!("Q is {}x{}, b has {n} entries", q.rows(), q.cols())));
        }
        if !q.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        if !gamma.is_finite() || q.as_slice().iter().chain(&b).any(|z| !z.is_finite()) {
            return Err(Error::InvalidArgument("packet data must be finite".into()));
        }
        let y = to_dmatrix(&q.map(|z| z.im));
        let min = SymmetricEigen::new(y).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(min > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(GaussianPacket { gamma, q, b })
    }

    /// `exp(-π‖x‖²)`, i.e. `γ = 1`, `Q = iE`, `b = 0`.
    pub fn standard(n: usize) -> Self {
        GaussianPacket {
            gamma: Complex64::new(1.0, 0.0),
            q: Mat::from_fn(n, n, |i, j| if i == j { I } else { Complex64::new(0.0, 0.0) }),
            b: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn gamma(&self) -> Complex64 {
        self.gamma
    }

    pub fn q(&self) -> &CplxMat {
        &self.q
    }

    pub fn b(&self) -> &[Complex64] {
        &self.b
    }

    fn exponent(&self, x: &[f64]) -> Complex64 {
        let n = self.n();
        let mut quad = Complex64::new(0.0, 0.0);
        let mut lin = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..n {
                row += self.q[(i, j)] * x[j];
            }
            quad += row * x[i];
            lin += self.b[i] * x[i];
        }
        I * PI * quad + I * TAU * lin
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        if self.gamma == Complex64::new(0.0, 0.0) {
            return self.gamma;
        }
        (self.gamma.ln() + self.exponent(x)).exp()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        GaussianPacket { gamma: self.gamma * s, ..self.clone() }
    }

    /// `x ↦ e^{2πi phase} e^{2πi mᵀx} f(x + x₀)`.
    pub fn translate_modulate(&self, x0: &[f64], m: &[f64], phase: f64) -> Self {
        let n = self.n();
        let mut b = self.b.clone();
        for i in 0..n {
            let qx: Complex64 = (0..n).map(|j| self.q[(i, j)] * x0[j]).sum();
            b[i] += qx + m[i];
        }
        let log_factor = self.exponent(x0) + I * TAU * phase;
        let gamma = self.gamma * log_factor.exp();
        GaussianPacket { gamma, q: self.q.clone(), b }
    }

    /// `∫ f₁ conj(f₂) = γ₁ conj(γ₂) det(A)^{-1/2} exp(-π βᵀA⁻¹β)` with
    /// `A = -i(Q₁ - conj Q₂)`, `β = b₁ - conj b₂`; `det^{-1/2}` is the product
    /// of principal square roots of the eigenvalues of `A`, which all lie in
    /// the right half-plane.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        let n = self.n();
        if other.n() != n {
            return Err(Error::DimensionMismatch(format!("{n} vs {}", other.n())));
        }
        let a = DMatrix::from_fn(n, n, |i, j| -I * (self.q[(i, j)] - other.q[(i, j)].conj()));
        let beta = DVector::from_fn(n, |i, _| self.b[i] - other.b[i].conj());
        let sv = a.clone().singular_values();
        let (smax, smin) = (sv.max(), sv.min());
        if !(smin > 0.0) || smax / smin > 1e12 {
            return Err(Error::NumericallySingular(smax / smin));
        }
        let eig = Schur::new(a.clone()).eigenvalues().ok_or(Error::NumericallySingular(smax / smin))?;
        let log_sqrt_det: Complex64 = eig.iter().map(|z| z.ln() * 0.5).sum();
        let sol = a.lu().solve(&beta).ok_or(Error::Singular)?;
        let quad: Complex64 = beta.iter().zip(sol.iter()).map(|(x, y)| x * y).sum();
        let pref = self.gamma * other.gamma.conj();
        if pref == Complex64::new(0.0, 0.0) {
            return Ok(pref);
        }
        Ok((pref.ln() - log_sqrt_det - PI * quad).exp())
    }

    /// The packet `x ↦ f(x) conj(g(x))`.
    pub fn times_conj(&self, other: &Self) -> Self {
        GaussianPacket {
            gamma: self.gamma * other.gamma.conj(),
            q: Mat::from_fn(self.n(), self.n(), |i, j| self.q[(i, j)] - other.q[(i, j)].conj()),
            b: self.b.iter().zip(&other.b).map(|(x, y)| x - y.conj()).collect(),
        }
    }

    pub fn decay(&self) -> Result<GaussianDecay> {
        let y = self.q.map(|z| z.im);
        let v: Vec<f64> = self.b.iter().map(|z| z.im).collect();
        GaussianDecay::from_quadratic(self.gamma.norm(), &y, &v)
    }
}

/// Finite sum of packets on `R^(h,g)`; the empty sum is the zero function.
#[derive(Clone, Debug, PartialEq)]
pub struct PacketSum {
    dim: Dim,
    packets: Vec<GaussianPacket>,
}

impl PacketSum {
    pub fn new(dim: Dim, packets: Vec<GaussianPacket>) -> Result<Self> {
        if let Some(p) = packets.iter().find(|p| p.n() != dim.n()) {
            return Err(Error::DimensionMismatch(format!("packet on R^{} in a sum over R^{}", p.n(), dim.n())));
        }
        Ok(PacketSum { dim, packets })
    }

    pub fn zero(dim: Dim) -> Self {
        PacketSum { dim, packets: Vec::new() }
    }

    pub fn standard(dim: Dim) -> Self {
        PacketSum { dim, packets: vec![GaussianPacket::standard(dim.n())] }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn packets(&self) -> &[GaussianPacket] {
        &self.packets
    }

    pub fn is_zero(&self) -> bool {
        self.packets.iter().all(|p| p.gamma == Complex64::new(0.0, 0.0))
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let terms: Vec<Complex64> = self.packets.iter().map(|p| p.eval(x)).collect();
        sum_deterministic(&terms)
    }

    pub fn eval_at(&self, lambda: &RealMat) -> Complex64 {
        self.eval(lambda.as_slice())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", self.dim, other.dim)));
        }
        let mut packets = self.packets.clone();
        packets.extend(other.packets.iter().cloned());
        Ok(PacketSum { dim: self.dim, packets })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        PacketSum { dim: self.dim, packets: self.packets.iter().map(|p| p.scale(s)).collect() }
    }

    pub fn translate_modulate(&self, x0: &[f64], m: &[f64], phase: f64) -> Self {
        PacketSum { dim: self.dim, packets: self.packets.iter().map(|p| p.translate_modulate(x0, m, phase)).collect() }
    }

    /// `f ↦ f(· + λ₀)`.
    pub fn translate(&self, lambda0: &RealMat) -> Self {
        self.translate_modulate(lambda0.as_slice(), &vec![0.0; self.dim.n()], 0.0)
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", self.dim, other.dim)));
        }
        let mut terms = Vec::with_capacity(self.packets.len() * other.packets.len());
        for p in &self.packets {
            for q in &other.packets {
                terms.push(p.inner(q)?);
            }
        }
        Ok(sum_deterministic(&terms))
    }

    pub fn norm_sq(&self) -> Result<f64> {
        Ok(self.inner(self)?.re)
    }
}

/// `(U_{g₀}(σ_c) f)(λ) = e^{2πiσ{c(κ₀ + μ₀ᵗλ₀ + 2λᵗμ₀)}} f(λ + λ₀)`: a translation
/// by `λ₀`, the modulation `vec(2cμ₀)` and the constant phase `σ(c(κ₀ + μ₀ᵗλ₀))`.
pub fn schrodinger_act(c: &RealMat, g0: &GroupElement<f64>, f: &PacketSum) -> Result<PacketSum> {
    let d = f.dim();
    if g0.dim() != d || c.shape() != (d.h, d.h) {
        return Err(Error::DimensionMismatch(format!("{:?} acting on {:?}", g0.dim(), d)));
    }
    let m = (c * g0.mu()).scale(&2.0);
    let phase = sigma(c, &(g0.kappa() + &(g0.mu() * &g0.lambda().transpose())));
    Ok(f.translate_modulate(g0.lambda().as_slice(), m.as_slice(), phase))
}

/// `Φ_c(f)`: the function `g ↦ e^{2πiσ{c(κ+μᵗλ)}} f(λ)` on `G`.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftedFunction {
    c: RealMat,
    f: PacketSum,
}

impl LiftedFunction {
    pub fn c(&self) -> &RealMat {
        &self.c
    }

    pub fn eval(&self, g: &GroupElement<f64>) -> Complex64 {
        let s = sigma(&self.c, &(g.kappa() + &(g.mu() * &g.lambda().transpose())));
        cis(s) * self.f.eval_at(g.lambda())
    }
}

pub fn lift_phi(c: &RealMat, f: &PacketSum) -> LiftedFunction {
    LiftedFunction { c: c.clone(), f: f.clone() }
}

/// `Ψ_c(φ)(λ) = φ((λ, 0, 0))`, which is the underlying packet sum.
pub fn drop_psi(phi: &LiftedFunction) -> PacketSum {
    phi.f.clone()
}

/// The action on the induced model:
/// `e^{2πiσ{c(κ₀+κ+μ₀ᵗλ₀+μᵗλ+2λᵗμ₀)}} φ((λ₀+λ, 0, 0))`.
pub fn schrodinger_act_h(
    c: &RealMat,
    g0: &GroupElement<f64>,
    phi: &LiftedFunction,
    g: &GroupElement<f64>,
) -> Complex64 {
    let (l0, m0, k0) = (g0.lambda(), g0.mu(), g0.kappa());
    let (l, m, k) = (g.lambda(), g.mu(), g.kappa());
    let x = &(&(&(k0 + k) + &(m0 * &l0.transpose())) + &(m * &l.transpose())) + &(l * &m0.transpose()).scale(&2.0);
    cis(sigma(c, &x)) * phi.eval(&GroupElement::translation(l0 + l))
}

/// `∫ |f|²` by composite Gauss–Legendre on `[-L, L]^n`; an independent check
/// of the closed-form norm for small `n`.
pub fn quadrature_norm_sq(f: &PacketSum, half_width: f64, panels: usize, points: usize) -> f64 {
    let (x, w) = gauss_legendre(points);
    let h = 2.0 * half_width / panels as f64;
    let mut nodes = Vec::with_capacity(panels * points);
    let mut weights = Vec::with_capacity(panels * points);
    for p in 0..panels {
        for i in 0..points {
            nodes.push(-half_width + h * (p as f64 + x[i]));
            weights.push(h * w[i]);
        }
    }
    let n = f.dim().n();
    let per_axis = nodes.len();
    let total = per_axis.pow(n as u32);
    let terms: Vec<Complex64> = (0..total)
        .map(|mut k| {
            let mut pt = vec![0.0; n];
            let mut wt = 1.0;
            for axis in (0..n).rev() {
                pt[axis] = nodes[k % per_axis];
                wt *= weights[k % per_axis];
                k /= per_axis;
            }
            Complex64::new(f.eval(&pt).norm_sqr() * wt, 0.0)
        })
        .collect();
    sum_deterministic(&terms).re
}

/// Seeded packets with `Im Q` comfortably positive definite.
pub mod random {
    use super::*;

    pub fn packet<R: Rng>(rng: &mut R, n: usize) -> GaussianPacket {
        let x = Mat::from_fn(n, n, |_, _| rng.gen_range(-0.5..0.5));
        let a = Mat::from_fn(n, n, |_, _| rng.gen_range(-0.3..0.3));
        let y = &(&a * &a.transpose()) + &RealMat::identity(n).scale(&rng.gen_range(0.6..1.4));
        let q = Mat::from_fn(n, n, |i, j| Complex64::new(0.5 * (x[(i, j)] + x[(j, i)]), y[(i, j)]));
        let b = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-0.5..0.5))).collect();
        let gamma = Complex64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..TAU));
        GaussianPacket::new(gamma, q, b).expect("positive imaginary part")
    }

    pub fn packet_sum<R: Rng>(rng: &mut R, dim: Dim, terms: usize) -> PacketSum {
        PacketSum::new(dim, (0..terms).map(|_| packet(rng, dim.n())).collect()).expect("same dim")
    }

    pub fn level_like<R: Rng>(rng: &mut R, h: usize) -> RealMat {
        let a = Mat::from_fn(h, h, |_, _| rng.gen_range(-1.0..1.0));
        &(&a * &a.transpose()) + &RealMat::identity(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::random as grand;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const DIMS: [(usize, usize); 4] = [(1, 1), (2, 1), (1, 2), (2, 2)];

    fn random_point<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect()
    }

    #[test]
    fn eval_examples() {
        let d = Dim::new(1, 1).unwrap();
        let f = PacketSum::standard(d);
        assert!((f.eval(&[0.0]) - 1.0).norm() < 1e-15);
        for x in [0.3, -1.2, 2.0] {
            assert!((f.eval(&[x]).norm() - (-PI * x * x).exp()).abs() < 1e-15);
        }
        assert_eq!(PacketSum::zero(d).eval(&[0.7]), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn validation() {
        let q = CplxMat::from_rows(vec![vec![Complex64::new(0.0, -1.0)]]).unwrap();
        assert!(matches!(
            GaussianPacket::new(Complex64::new(1.0, 0.0), q, vec![Complex64::new(0.0, 0.0)]),
            Err(Error::NotPositiveDefinite)
        ));
        let q = CplxMat::from_rows(vec![vec![I, Complex64::new(1.0, 0.0)], vec![Complex64::new(0.0, 0.0), I]]).unwrap();
        assert!(matches!(
            GaussianPacket::new(Complex64::new(1.0, 0.0), q, vec![Complex64::new(0.0, 0.0); 2]),
            Err(Error::NotSymmetric)
        ));
    }

    #[test]
    fn standard_norm_closed_form() {
        for (g, h) in DIMS {
            let f = PacketSum::standard(Dim::new(g, h).unwrap());
            let n = (g * h) as i32;
            assert!((f.norm_sq().unwrap() - 2f64.powf(-n as f64 / 2.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn inner_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for (g, h) in [(1, 1), (2, 1)] {
            let d = Dim::new(g, h).unwrap();
            for _ in 0..3 {
                let f = random::packet_sum(&mut rng, d, 2);
                let q = quadrature_norm_sq(&f, 7.0, 28, 10);
                let c = f.norm_sq().unwrap();
                assert!((q - c).abs() < 1e-8 * c.max(1.0), "{q} vs {c}");
            }
        }
    }

    #[test]
    fn inner_is_hermitian_and_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(78);
        for (g, h) in DIMS {
            let d = Dim::new(g, h).unwrap();
            let f1 = random::packet_sum(&mut rng, d, 3);
            let f2 = random::packet_sum(&mut rng, d, 2);
            let a = f1.inner(&f2).unwrap();
            let b = f2.inner(&f1).unwrap();
            assert!((a - b.conj()).norm() < 1e-12);
            let n = f1.inner(&f1).unwrap();
            assert!(n.re > 0.0 && n.im.abs() < 1e-12 * n.re);
        }
    }

    #[test]
    fn translate_modulate_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        for (g, h) in DIMS {
            let d = Dim::new(g, h).unwrap();
            let n = d.n();
            let f = random::packet_sum(&mut rng, d, 2);
            assert_eq!(f.translate_modulate(&vec![0.0; n], &vec![0.0; n], 0.0), f);
            let x0 = random_point(&mut rng, n);
            let m = random_point(&mut rng, n);
            let phase = rng.gen_range(0.0..1.0);
            let tf = f.translate_modulate(&x0, &m, phase);
            for _ in 0..20 {
                let x = random_point(&mut rng, n);
                let shifted: Vec<f64> = x.iter().zip(&x0).map(|(a, b)| a + b).collect();
                let mx: f64 = m.iter().zip(&x).map(|(a, b)| a * b).sum();
                let direct = cis(phase + mx) * f.eval(&shifted);
                assert!((tf.eval(&x) - direct).norm() < 1e-12 * (1.0 + direct.norm()));
            }
            let x1 = random_point(&mut rng, n);
            let sum: Vec<f64> = x0.iter().zip(&x1).map(|(a, b)| a + b).collect();
            let zero = vec![0.0; n];
            let two = f.translate_modulate(&x0, &zero, 0.0).translate_modulate(&x1, &zero, 0.0);
            let one = f.translate_modulate(&sum, &zero, 0.0);
            let p = random_point(&mut rng, n);
            assert!((two.eval(&p) - one.eval(&p)).norm() < 1e-12);
        }
    }

    #[test]
    fn action_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(80);
        for (g, h) in DIMS {
            let d = Dim::new(g, h).unwrap();
            let c = random::level_like(&mut rng, h);
            let f = random::packet_sum(&mut rng, d, 2);
            let id = GroupElement::identity(d);
            let u = schrodinger_act(&c, &id, &f).unwrap();
            let k0 = grand::real_symmetric(&mut rng, h, 1.0);
            let central = GroupElement::central(g, k0.clone()).unwrap();
            let uc = schrodinger_act(&c, &central, &f).unwrap();
            let lam0 = grand::real_matrix(&mut rng, h, g, 1.0);
            let ut = schrodinger_act(&c, &GroupElement::translation(lam0.clone()), &f).unwrap();
            for _ in 0..5 {
                let x = random_point(&mut rng, d.n());
                assert!((u.eval(&x) - f.eval(&x)).norm() < 1e-13);
                assert!((uc.eval(&x) - cis(sigma(&c, &k0)) * f.eval(&x)).norm() < 1e-12);
                let shifted: Vec<f64> = x.iter().zip(lam0.as_slice()).map(|(a, b)| a + b).collect();
                assert!((ut.eval(&x) - f.eval(&shifted)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn unitarity_and_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(81);
        for (g, h) in DIMS {
            let d = Dim::new(g, h).unwrap();
            let c = random::level_like(&mut rng, h);
            for _ in 0..10 {
                let f = random::packet_sum(&mut rng, d, 2);
                let g0 = grand::element_f64(&mut rng, d, 1.0);
                let g1 = grand::element_f64(&mut rng, d, 1.0);
                let uf = schrodinger_act(&c, &g0, &f).unwrap();
                let (a, b) = (uf.norm_sq().unwrap(), f.norm_sq().unwrap());
                assert!((a - b).abs() <= 1e-10 * b);
                let lhs = schrodinger_act(&c, &g0.compose(&g1).unwrap(), &f).unwrap();
                let rhs = schrodinger_act(&c, &g0, &schrodinger_act(&c, &g1, &f).unwrap()).unwrap();
                for _ in 0..5 {
                    let x = random_point(&mut rng, d.n());
                    assert!((lhs.eval(&x) - rhs.eval(&x)).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn lifted_model() {
        let mut rng = ChaCha8Rng::seed_from_u64(82);
        for (g, h) in DIMS {
            let d = Dim::new(g, h).unwrap();
            let c = random::level_like(&mut rng, h);
            let f = random::packet_sum(&mut rng, d, 2);
            let phi = lift_phi(&c, &f);
            assert_eq!(drop_psi(&phi), f);
            for _ in 0..10 {
                let lam = grand::real_matrix(&mut rng, h, g, 1.0);
                assert!((phi.eval(&GroupElement::translation(lam.clone())) - f.eval_at(&lam)).norm() < 1e-14);

                let gg = grand::element_f64(&mut rng, d, 1.0);
                let mu = grand::real_matrix(&mut rng, h, g, 1.0);
                let kap = grand::real_symmetric(&mut rng, h, 1.0);
                let k = crate::group::SquareElement::new(RealMat::zeros(h, g), mu, kap.clone()).unwrap().to_round();
                let lhs = phi.eval(&k.compose(&gg).unwrap());
                assert!((lhs - cis(sigma(&c, &kap)) * phi.eval(&gg)).norm() < 1e-10);

                let g0 = grand::element_f64(&mut rng, d, 1.0);
                let direct = schrodinger_act_h(&c, &g0, &phi, &gg);
                let via = lift_phi(&c, &schrodinger_act(&c, &g0, &drop_psi(&phi)).unwrap()).eval(&gg);
                assert!((direct - via).norm() < 1e-10);
            }
            let id = GroupElement::identity(d);
            let gg = grand::element_f64(&mut rng, d, 1.0);
            assert!((schrodinger_act_h(&c, &id, &phi, &gg) - phi.eval(&gg)).norm() < 1e-12);
        }
    }
}
