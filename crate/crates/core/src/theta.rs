//! Theta functions attached to the lattice representation twisted by
//! `q_M(ξ, η) = 2σ(Mξᵗη)`.
//!
//! Test vectors of `H_{M,q_M}` are Poincaré averages of Gaussian seeds
//! `ψ(λ,μ,κ) = e^{2πiσ(Mκ)} f₀(λ,μ)`:
//! `φ(g) = Σ_{(ξ,η) ∈ L} φ_{M,q_M}(γ_{ξ,η})⁻¹ ψ(γ_{ξ,η} ∘ g)` with
//! `γ_{ξ,η} = (ξ, η, -ηᵗξ)`. From `φ` one builds `E_φ`, `F_φ`, `F_{Ω,φ}` and
//! `θ_{Ω,φ}` and checks their quasi-periodicity under `L`.
//!
//! For `h ≥ 2` the triple `(λ, μ, 0)` need not lie in `G`. The evaluator
//! takes raw triples; since `φ` sees `κ` only through `σ(Mκ)`, the value at
//! `(λ, μ, κ)` equals `φ` at the group element with `κ` replaced by its
//! symmetric-compatible part.

use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::characters::{random as crand, CharMq, GammaLElement};
use crate::error::{Error, Result};
use crate::exact::{CplxMat, IntMat, Level, Mat, RealMat};
use crate::group::{random as grand, Dim, GroupElement};
use crate::lattice::SeriesValue;
use crate::numerics::{
    box_points, integrate_cube, sum_deterministic, to_dmatrix, truncation_radius, Quadrature, QuadratureRule, Residual,
    TruncationPolicy,
};
use crate::schrodinger::{cis, random as srand, sigma, GaussianPacket};

/// A point of the Siegel upper half plane of degree `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct SiegelPoint {
    omega: CplxMat,
    im_inv: RealMat,
}

impl SiegelPoint {
    pub fn new(omega: CplxMat) -> Result<Self> {
        if !omega.is_square() {
            return Err(Error::NotSquare { rows: omega.rows(), cols: omega.cols() });
        }
        if !omega.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        let y = to_dmatrix(&omega.map(|z| z.im));
        let chol = y.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
        let inv = chol.inverse();
        let g = omega.rows();
        Ok(SiegelPoint { im_inv: Mat::from_fn(g, g, |i, j| inv[(i, j)]), omega })
    }

    /// `iE_g`.
    pub fn identity(g: usize) -> Self {
        let omega = Mat::from_fn(g, g, |i, j| if i == j { Complex64::new(0.0, 1.0) } else { Complex64::new(0.0, 0.0) });
        Self::new(omega).expect("iE is in the upper half plane")
    }

    pub fn omega(&self) -> &CplxMat {
        &self.omega
    }

    pub fn g(&self) -> usize {
        self.omega.rows()
    }

    /// `λΩ + μ`.
    pub fn assemble(&self, lambda: &RealMat, mu: &RealMat) -> CplxMat {
        &(&lambda.to_complex() * &self.omega) + &mu.to_complex()
    }

    /// `(λ, μ)` with `W = λΩ + μ`: `λ = (Im W)(Im Ω)⁻¹`, `μ = Re W - λ Re Ω`.
    pub fn split(&self, w: &CplxMat) -> (RealMat, RealMat) {
        let lambda = &w.map(|z| z.im) * &self.im_inv;
        let mu = &w.map(|z| z.re) - &(&lambda * &self.omega.map(|z| z.re));
        (lambda, mu)
    }
}

/// How the `κ`-component of the averaging elements is chosen. Both choices
/// give the same function; the second adds the symmetric `ξᵗξ + ηᵗη` to
/// `-ηᵗξ`, which must cancel against the character.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KappaChoice {
    Antisymmetric,
    Shifted,
}

/// Which lattice points enter the Poincaré sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SumBox {
    /// Per seed packet, the certified truncation around its decay center.
    Adaptive(TruncationPolicy),
    /// The box `‖(ξ, η)‖∞ <= R` around the origin, without a tail bound.
    Origin(i64),
}

/// `σ(M a ᵗb)` for `h×g` matrices stored row-major.
fn pair(m: &RealMat, a: &[f64], b: &[f64], g: usize) -> f64 {
    let h = m.rows();
    let mut s = 0.0;
    for i in 0..h {
        for j in 0..h {
            let mut abt = 0.0;
            for k in 0..g {
                abt += a[j * g + k] * b[i * g + k];
            }
            s += m[(i, j)] * abt;
        }
    }
    s
}

/// A Poincaré-averaged element of `H_{M,q_M}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedElement {
    level: Level,
    dim: Dim,
    seed: Vec<GaussianPacket>,
    kappa_choice: KappaChoice,
}

impl TwistedElement {
    pub fn new(level: Level, dim: Dim, seed: Vec<GaussianPacket>) -> Result<Self> {
        if level.h() != dim.h {
            return Err(Error::DimensionMismatch(format!("level h = {}, dim {:?}", level.h(), dim)));
        }
        if let Some(p) = seed.iter().find(|p| p.n() != 2 * dim.n()) {
            return Err(Error::DimensionMismatch(format!(
                "seed packet in {} variables, expected {}",
                p.n(),
                2 * dim.n()
            )));
        }
        Ok(TwistedElement { level, dim, seed, kappa_choice: KappaChoice::Antisymmetric })
    }

    pub fn with_kappa_choice(mut self, choice: KappaChoice) -> Self {
        self.kappa_choice = choice;
        self
    }

    pub fn level(&self) -> &Level {
        &self.level
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn seed(&self) -> &[GaussianPacket] {
        &self.seed
    }

    /// `φ((λ, μ, κ))` in round coordinates.
    pub fn eval_triple(&self, lambda: &RealMat, mu: &RealMat, kappa: &RealMat, sum: &SumBox) -> Result<SeriesValue> {
        let (h, g) = (self.dim.h, self.dim.g);
        let n = self.dim.n();
        if lambda.shape() != (h, g) || mu.shape() != (h, g) || kappa.shape() != (h, h) {
            return Err(Error::DimensionMismatch(format!(
                "triple of shapes {:?}, {:?}, {:?}",
                lambda.shape(),
                mu.shape(),
                kappa.shape()
            )));
        }
        let m = self.level.m_f64();
        let lam = lambda.as_slice();
        let mu_s = mu.as_slice();
        let shifted = self.kappa_choice == KappaChoice::Shifted;
        let shift: Vec<f64> = lam.iter().chain(mu_s).copied().collect();
        // exponent of φ(γ)⁻¹ e^{2πiσ(M(κ̃ - κ))} for γ = γ_{ξ,η}
        let phase = |l: &[i64]| -> f64 {
            let xi: Vec<f64> = l[..n].iter().map(|&v| v as f64).collect();
            let eta: Vec<f64> = l[n..].iter().map(|&v| v as f64).collect();
            let mut gamma_kappa = -pair(&m, &eta, &xi, g);
            if shifted {
                gamma_kappa += pair(&m, &xi, &xi, g) + pair(&m, &eta, &eta, g);
            }
            let moved = gamma_kappa + pair(&m, &xi, mu_s, g) - pair(&m, &eta, lam, g);
            moved - (gamma_kappa + pair(&m, &xi, &eta, g))
        };
        let mut values = Vec::with_capacity(self.seed.len());
        let mut tail = 0.0;
        let mut x = vec![0.0; 2 * n];
        for p in &self.seed {
            let pts = match sum {
                SumBox::Adaptive(policy) => {
                    let tb = truncation_radius(&p.decay()?, &shift, policy)?;
                    tail += tb.bound;
                    box_points(&tb.box_center, tb.radius)
                }
                SumBox::Origin(r) => {
                    tail = f64::INFINITY;
                    box_points(&vec![0; 2 * n], *r)
                }
            };
            let terms: Vec<Complex64> = pts
                .iter()
                .map(|l| {
                    for i in 0..2 * n {
                        x[i] = shift[i] + l[i] as f64;
                    }
                    p.eval(&x) * cis(phase(l))
                })
                .collect();
            values.push(sum_deterministic(&terms));
        }
        let value = cis(sigma(&m, kappa)) * sum_deterministic(&values);
        Ok(SeriesValue { value, tail, max_frequency: 0 })
    }

    pub fn eval(&self, g0: &GroupElement<f64>, sum: &SumBox) -> Result<SeriesValue> {
        self.eval_triple(g0.lambda(), g0.mu(), g0.kappa(), sum)
    }

    /// `E_φ(λ, μ) = φ((λ, μ, 0))`.
    pub fn e(&self, lambda: &RealMat, mu: &RealMat, sum: &SumBox) -> Result<SeriesValue> {
        self.eval_triple(lambda, mu, &RealMat::zeros(self.dim.h, self.dim.h), sum)
    }

    /// `F_φ(λ, μ) = φ([λ, μ, 0]) = φ((λ, μ, -μᵗλ))`.
    pub fn f(&self, lambda: &RealMat, mu: &RealMat, sum: &SumBox) -> Result<SeriesValue> {
        let kappa = (mu * &lambda.transpose()).scale(&-1.0);
        self.eval_triple(lambda, mu, &kappa, sum)
    }

    /// `e^{-2πiσ(MλΩᵗλ)}`.
    pub fn omega_prefactor(&self, omega: &SiegelPoint, lambda: &RealMat) -> Complex64 {
        let l = lambda.to_complex();
        let q = &(&l * omega.omega()) * &l.transpose();
        let m = self.level.m_f64().to_complex();
        let s: Complex64 =
            (0..self.dim.h).map(|i| (0..self.dim.h).map(|j| m[(i, j)] * q[(j, i)]).sum::<Complex64>()).sum();
        (Complex64::new(0.0, -std::f64::consts::TAU) * s).exp()
    }

    /// `F_{Ω,φ}(λ, μ) = e^{-2πiσ(MλΩᵗλ)} F_φ(λ, μ)`.
    pub fn f_omega(&self, omega: &SiegelPoint, lambda: &RealMat, mu: &RealMat, sum: &SumBox) -> Result<SeriesValue> {
        let pre = self.omega_prefactor(omega, lambda);
        let v = self.f(lambda, mu, sum)?;
        Ok(SeriesValue { value: pre * v.value, tail: pre.norm() * v.tail, max_frequency: 0 })
    }

    /// `θ_{Ω,φ}(W) = F_{Ω,φ}(λ, μ)` for `W = λΩ + μ`.
    pub fn theta(&self, omega: &SiegelPoint, w: &CplxMat, sum: &SumBox) -> Result<ThetaValue> {
        if w.shape() != (self.dim.h, self.dim.g) || omega.g() != self.dim.g {
            return Err(Error::DimensionMismatch(format!("W is {:?}, Ω of degree {}", w.shape(), omega.g())));
        }
        let (lambda, mu) = omega.split(w);
        let v = self.f_omega(omega, &lambda, &mu, sum)?;
        Ok(ThetaValue { w: w.clone(), lambda, mu, value: v.value, tail: v.tail })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThetaValue {
    pub w: CplxMat,
    pub lambda: RealMat,
    pub mu: RealMat,
    pub value: Complex64,
    pub tail: f64,
}

/// `Σ_L φ_{M,q_M}(γ)⁻¹ ψ(γ ∘ g)` for the Gaussian seed `f₀` in the variables
/// `(vec λ, vec μ)`.
pub fn poincare_series(level: &Level, dim: Dim, seed: Vec<GaussianPacket>) -> Result<TwistedElement> {
    TwistedElement::new(level.clone(), dim, seed)
}

/// `|φ(γ₀ ∘ g) - φ_{M,q_M}(γ₀) φ(g)|`.
pub fn membership_defect(
    phi: &TwistedElement,
    gamma0: &GammaLElement,
    g: &GroupElement<f64>,
    sum: &SumBox,
) -> Result<Residual> {
    let moved = gamma0.element().to_f64().compose(g)?;
    let lhs = phi.eval(&moved, sum)?;
    let rhs = phi.eval(g, sum)?;
    let chi = CharMq::canonical(phi.level().clone(), phi.dim().g).eval(gamma0)?.to_complex();
    Ok(Residual::new((lhs.value - chi * rhs.value).norm(), lhs.tail + rhs.tail))
}

/// A probe for the transformation laws: a point `(λ, μ)` and a lattice
/// shift `(ξ, η)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LawProbe {
    pub lambda: RealMat,
    pub mu: RealMat,
    pub xi: IntMat,
    pub eta: IntMat,
}

impl LawProbe {
    pub fn random<R: Rng>(rng: &mut R, dim: Dim, shift_bound: i64) -> Self {
        LawProbe {
            lambda: grand::real_matrix(rng, dim.h, dim.g, 1.0),
            mu: grand::real_matrix(rng, dim.h, dim.g, 1.0),
            xi: crand::int_matrix(rng, dim.h, dim.g, shift_bound),
            eta: crand::int_matrix(rng, dim.h, dim.g, shift_bound),
        }
    }
}

/// Defects of the four quasi-periodicity laws, and of the `bold H` law
/// (the `E_φ` law applied to `F_φ`). The `F_{Ω,φ}` and `θ_{Ω,φ}` defects are
/// divided by `|e^{-2πiσ(M(λ+ξ)Ωᵗ(λ+ξ))}|`, the size of the prefactor at the
/// shifted point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LawResiduals {
    pub e_law: Residual,
    pub f_law: Residual,
    pub f_omega_law: Residual,
    pub theta_law: Residual,
    pub bold_h_on_f: Residual,
}

impl LawResiduals {
    pub fn max(self, o: Self) -> Self {
        LawResiduals {
            e_law: self.e_law.max(o.e_law),
            f_law: self.f_law.max(o.f_law),
            f_omega_law: self.f_omega_law.max(o.f_omega_law),
            theta_law: self.theta_law.max(o.theta_law),
            bold_h_on_f: self.bold_h_on_f.max(o.bold_h_on_f),
        }
    }

    /// The four laws the element must satisfy, in order.
    pub fn laws(&self) -> [Residual; 4] {
        [self.e_law, self.f_law, self.f_omega_law, self.theta_law]
    }
}

pub fn transformation_residuals(
    phi: &TwistedElement,
    omega: &SiegelPoint,
    probe: &LawProbe,
    sum: &SumBox,
) -> Result<LawResiduals> {
    let m = phi.level().m_f64();
    let (lam, mu) = (&probe.lambda, &probe.mu);
    let xi = probe.xi.to_rational().to_f64();
    let eta = probe.eta.to_rational().to_f64();
    let lam2 = lam + &xi;
    let mu2 = mu + &eta;
    let t = |a: &RealMat| a.transpose();

    let e0 = phi.e(lam, mu, sum)?;
    let e1 = phi.e(&lam2, &mu2, sum)?;
    let e_factor = cis(sigma(&m, &(&(&(&xi * &t(&eta)) + &(lam * &t(&eta))) - &(mu * &t(&xi)))));
    let e_law = Residual::new((e1.value - e_factor * e0.value).norm(), e1.tail + e0.tail);

    let f0 = phi.f(lam, mu, sum)?;
    let f1 = phi.f(&lam2, &mu2, sum)?;
    let f_factor = cis(-2.0 * sigma(&m, &(&xi * &t(mu))));
    let f_law = Residual::new((f1.value - f_factor * f0.value).norm(), f1.tail + f0.tail);
    let bold_h_on_f = Residual::new((f1.value - e_factor * f0.value).norm(), f1.tail + f0.tail);

    let scale = phi.omega_prefactor(omega, &lam2).norm();
    let mc = m.to_complex();
    let sigma_c = |x: &CplxMat| -> Complex64 {
        (0..mc.rows()).map(|i| (0..mc.rows()).map(|j| mc[(i, j)] * x[(j, i)]).sum::<Complex64>()).sum()
    };
    let (xc, lc, uc) = (xi.to_complex(), lam.to_complex(), mu.to_complex());
    let om = omega.omega();
    let xox = &(&xc * om) * &xc.transpose();
    let lox = &(&lc * om) * &xc.transpose();
    let ux = &uc * &xc.transpose();
    let inner = &(&xox + &lox.scale(&Complex64::new(2.0, 0.0))) + &ux.scale(&Complex64::new(2.0, 0.0));
    let fo_factor = (Complex64::new(0.0, -std::f64::consts::TAU) * sigma_c(&inner)).exp();
    let fo0 = phi.f_omega(omega, lam, mu, sum)?;
    let fo1 = phi.f_omega(omega, &lam2, &mu2, sum)?;
    let f_omega_law = Residual::new(
        (fo1.value - fo_factor * fo0.value).norm() / scale,
        (fo1.tail + fo_factor.norm() * fo0.tail) / scale,
    );

    let w = omega.assemble(lam, mu);
    let w2 = &(&w + &(&xc * om)) + &eta.to_complex();
    let th0 = phi.theta(omega, &w, sum)?;
    let th1 = phi.theta(omega, &w2, sum)?;
    let th_inner = &xox + &(&w * &xc.transpose()).scale(&Complex64::new(2.0, 0.0));
    let th_factor = (Complex64::new(0.0, -std::f64::consts::TAU) * sigma_c(&th_inner)).exp();
    let theta_law = Residual::new(
        (th1.value - th_factor * th0.value).norm() / scale,
        (th1.tail + th_factor.norm() * th0.tail) / scale,
    );

    Ok(LawResiduals { e_law, f_law, f_omega_law, theta_law, bold_h_on_f })
}

/// `∫_{I_λ × I_μ} |F_φ|²` by the tensor rule given, with the half-rule
/// estimate plus twice the largest tail times the sup of `|F_φ|`. `|F_φ|` is
/// periodic in `λ` and `μ`, so the periodic rule converges fastest.
pub fn finiteness_integral(
    phi: &TwistedElement,
    rule: &QuadratureRule,
    trunc: &TruncationPolicy,
) -> Result<Quadrature> {
    let d = phi.dim();
    let n = d.n();
    let err = std::sync::Mutex::new(None);
    let tail = std::sync::Mutex::new(0.0f64);
    let sum = SumBox::Adaptive(*trunc);
    let q = integrate_cube(2 * n, rule, |x| {
        let lam = RealMat::from_vec(d.h, d.g, x[..n].to_vec()).expect("shape");
        let mu = RealMat::from_vec(d.h, d.g, x[n..].to_vec()).expect("shape");
        match phi.f(&lam, &mu, &sum) {
            Ok(v) => {
                let mut t = tail.lock().expect("lock");
                *t = t.max(v.tail * (2.0 * v.value.norm() + v.tail));
                Complex64::new(v.value.norm_sqr(), 0.0)
            }
            Err(e) => {
                err.lock().expect("lock").get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    });
    if let Some(e) = err.into_inner().expect("lock") {
        return Err(e);
    }
    Ok(Quadrature { value: q.value, error_estimate: q.error_estimate + tail.into_inner().expect("lock") })
}

/// Seeded Siegel point `X + iY` with `Y = AᵗA + E/2`.
pub fn random_siegel<R: Rng>(rng: &mut R, g: usize) -> SiegelPoint {
    let x = grand::real_symmetric(rng, g, 0.5);
    let a = grand::real_matrix(rng, g, g, 0.5);
    let y = &(&a.transpose() * &a) + &RealMat::identity(g).scale(&0.5);
    SiegelPoint::new(Mat::from_fn(g, g, |i, j| Complex64::new(x[(i, j)], y[(i, j)]))).expect("positive imaginary part")
}

/// Options for [`verify_theta_suite`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaOptions {
    pub seed: u64,
    pub tol: f64,
    pub membership_probes: usize,
    pub law_probes: usize,
    pub trunc: TruncationPolicy,
    /// Gauss–Legendre points per axis for the finiteness integral.
    pub quad: usize,
    /// Radii of the origin-centered boxes for the convergence study.
    pub radii: Vec<i64>,
    pub packets: usize,
}

impl Default for ThetaOptions {
    fn default() -> Self {
        ThetaOptions {
            seed: 0,
            tol: 1e-6,
            membership_probes: 30,
            law_probes: 20,
            trunc: TruncationPolicy::default(),
            quad: 12,
            radii: (1..=7).collect(),
            packets: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaReport {
    pub g: usize,
    pub h: usize,
    pub t: Vec<Vec<i64>>,
    pub membership: Residual,
    pub kappa_choice_difference: f64,
    pub laws: LawResiduals,
    /// Largest law defect at each radius of the convergence study.
    pub radius_study: Vec<f64>,
    pub monotone: bool,
    pub norm_sq: f64,
    pub norm_error: f64,
    pub options: ThetaOptions,
    pub passed: bool,
}

/// Floor below which the convergence study treats defects as rounding.
const RADIUS_FLOOR: f64 = 1e-12;

/// `true` when each value is at most its predecessor or already at the
/// rounding floor.
pub fn is_monotone(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] || w[1] <= RADIUS_FLOOR)
}

/// Builds a seeded Poincaré series and runs membership, the four
/// transformation laws, `κ`-choice independence, the convergence study and
/// the finiteness integral.
pub fn verify_theta_suite(g: usize, level: &Level, opts: &ThetaOptions) -> Result<ThetaReport> {
    let dim = Dim::new(g, level.h())?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let seed: Vec<GaussianPacket> = (0..opts.packets.max(1)).map(|_| srand::packet(&mut rng, 2 * dim.n())).collect();
    let phi = poincare_series(level, dim, seed)?;
    let other = phi.clone().with_kappa_choice(KappaChoice::Shifted);
    let omega = random_siegel(&mut rng, g);
    let sum = SumBox::Adaptive(opts.trunc);

    let mut membership = Residual::default();
    let mut kappa_diff: f64 = 0.0;
    for _ in 0..opts.membership_probes {
        let gamma = crand::gamma_l(&mut rng, dim);
        let x = grand::element_f64(&mut rng, dim, 1.0);
        membership = membership.max(membership_defect(&phi, &gamma, &x, &sum)?);
        kappa_diff = kappa_diff.max((phi.eval(&x, &sum)?.value - other.eval(&x, &sum)?.value).norm());
    }

    let probes: Vec<LawProbe> = (0..opts.law_probes).map(|_| LawProbe::random(&mut rng, dim, 2)).collect();
    let mut laws = LawResiduals::default();
    for p in &probes {
        laws = laws.max(transformation_residuals(&phi, &omega, p, &sum)?);
    }

    let study_probes: Vec<LawProbe> = (0..opts.law_probes.min(5)).map(|_| LawProbe::random(&mut rng, dim, 1)).collect();
    let mut radius_study = Vec::with_capacity(opts.radii.len());
    for &r in &opts.radii {
        let mut worst: f64 = 0.0;
        for p in &study_probes {
            let res = transformation_residuals(&phi, &omega, p, &SumBox::Origin(r))?;
            worst = res.laws().iter().fold(worst, |a, x| a.max(x.value));
        }
        radius_study.push(worst);
    }
    let monotone = is_monotone(&radius_study);

    let norm = finiteness_integral(&phi, &QuadratureRule::periodic(opts.quad)?, &opts.trunc)?;
    let norm_sq = norm.value.re;

    let passed = membership.value <= opts.tol
        && kappa_diff <= opts.tol
        && laws.laws().iter().all(|r| r.value <= opts.tol)
        && monotone
        && norm_sq.is_finite()
        && norm.error_estimate <= opts.tol * norm_sq.max(1.0);
    Ok(ThetaReport {
        g,
        h: level.h(),
        t: level.t_rows(),
        membership,
        kappa_choice_difference: kappa_diff,
        laws,
        radius_study,
        monotone,
        norm_sq,
        norm_error: norm.error_estimate,
        options: opts.clone(),
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(rows: &[&[i64]]) -> Level {
        Level::from_i64(rows).unwrap()
    }

    fn element(level: &Level, g: usize, seed: u64) -> TwistedElement {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = Dim::new(g, level.h()).unwrap();
        poincare_series(level, dim, vec![srand::packet(&mut rng, 2 * dim.n())]).unwrap()
    }

    fn sum() -> SumBox {
        SumBox::Adaptive(TruncationPolicy::new(1e-13, 12).unwrap())
    }

    fn m(v: f64) -> RealMat {
        RealMat::from_vec(1, 1, vec![v]).unwrap()
    }

    #[test]
    fn zero_seed_is_zero() {
        let dim = Dim::new(1, 1).unwrap();
        let phi = poincare_series(&lv(&[&[1]]), dim, vec![GaussianPacket::standard(2).scale(Complex64::new(0.0, 0.0))])
            .unwrap();
        assert_eq!(phi.e(&m(0.3), &m(0.4), &sum()).unwrap().value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn split_roundtrip_and_prefactor() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for g in 1..=2 {
            let om = random_siegel(&mut rng, g);
            let w = Mat::from_fn(2, g, |_, _| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
            let (l, u) = om.split(&w);
            assert!(om.assemble(&l, &u).as_slice().iter().zip(w.as_slice()).all(|(a, b)| (a - b).norm() < 1e-12));
        }
        let phi = element(&lv(&[&[2]]), 1, 2);
        let om = SiegelPoint::identity(1);
        // M = 1, Ω = i: |e^{-2πiλ²i}| = e^{2πλ²}
        let p = phi.omega_prefactor(&om, &m(0.7));
        assert!((p.norm() - (std::f64::consts::TAU * 0.49).exp()).abs() < 1e-12 * p.norm());
        assert_eq!(phi.omega_prefactor(&om, &m(0.0)), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn e_and_f_relation() {
        let phi = element(&lv(&[&[1]]), 1, 3);
        for (l, u) in [(0.0, 0.0), (0.3, -0.8), (1.4, 0.2)] {
            let e = phi.e(&m(l), &m(u), &sum()).unwrap().value;
            let f = phi.f(&m(l), &m(u), &sum()).unwrap().value;
            assert!((f - cis(-0.5 * u * l) * e).norm() < 1e-13);
        }
    }

    #[test]
    fn membership_and_kappa_choice() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (t, g) in [(vec![vec![1]], 1), (vec![vec![3]], 1), (vec![vec![1]], 2), (vec![vec![2, 1], vec![1, 2]], 1)] {
            let rows: Vec<&[i64]> = t.iter().map(|r| r.as_slice()).collect();
            let phi = element(&lv(&rows), g, 5);
            let other = phi.clone().with_kappa_choice(KappaChoice::Shifted);
            for _ in 0..10 {
                let gamma = crand::gamma_l(&mut rng, phi.dim());
                let x = grand::element_f64(&mut rng, phi.dim(), 1.0);
                let r = membership_defect(&phi, &gamma, &x, &sum()).unwrap();
                assert!(r.value < 1e-9, "{t:?}: {}", r.value);
                let a = phi.eval(&x, &sum()).unwrap().value;
                assert!((a - other.eval(&x, &sum()).unwrap().value).norm() < 1e-9);
            }
            let central = GammaLElement::central(g, grand::rational_symmetric(&mut rng, phi.dim().h)).unwrap();
            let x = grand::element_f64(&mut rng, phi.dim(), 1.0);
            assert!(membership_defect(&phi, &central, &x, &sum()).unwrap().value < 1e-12);
        }
    }

    #[test]
    fn laws_hold_and_bold_h_fails_for_f() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for (t, g) in [(vec![vec![1]], 1), (vec![vec![2]], 1), (vec![vec![1]], 2), (vec![vec![2, 1], vec![1, 2]], 1)] {
            let rows: Vec<&[i64]> = t.iter().map(|r| r.as_slice()).collect();
            let phi = element(&lv(&rows), g, 7);
            let om = random_siegel(&mut rng, g);
            let mut worst = LawResiduals::default();
            for _ in 0..10 {
                let p = LawProbe::random(&mut rng, phi.dim(), 2);
                let r = transformation_residuals(&phi, &om, &p, &sum()).unwrap();
                assert!(r.theta_law.value <= r.f_omega_law.value + 1e-9);
                worst = worst.max(r);
            }
            for r in worst.laws() {
                assert!(r.value < 1e-8, "{t:?}: {worst:?}");
            }
            assert!(worst.bold_h_on_f.value > 1e-3);
        }
    }

    #[test]
    fn zero_shift_gives_zero_residuals() {
        let phi = element(&lv(&[&[1]]), 1, 8);
        let p = LawProbe { lambda: m(0.2), mu: m(0.4), xi: IntMat::zeros(1, 1), eta: IntMat::zeros(1, 1) };
        let r = transformation_residuals(&phi, &SiegelPoint::identity(1), &p, &sum()).unwrap();
        assert_eq!(r.e_law.value, 0.0);
        assert_eq!(r.f_law.value, 0.0);
        assert!(r.f_omega_law.value < 1e-15 && r.theta_law.value < 1e-14);
    }

    #[test]
    fn radius_study_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let phi = element(&lv(&[&[1]]), 1, 10);
        let om = SiegelPoint::identity(1);
        let probes: Vec<LawProbe> = (0..5).map(|_| LawProbe::random(&mut rng, phi.dim(), 1)).collect();
        let study: Vec<f64> = (1..=7)
            .map(|r| {
                probes.iter().fold(0.0f64, |a, p| {
                    let res = transformation_residuals(&phi, &om, p, &SumBox::Origin(r)).unwrap();
                    res.laws().iter().fold(a, |b, x| b.max(x.value))
                })
            })
            .collect();
        assert!(study[0] > 1e-3, "{study:?}");
        assert!(is_monotone(&study), "{study:?}");
        assert!(*study.last().unwrap() < 1e-10, "{study:?}");
    }

    #[test]
    fn suite_passes_for_small_cases() {
        for (t, g) in [(vec![vec![1]], 1), (vec![vec![2]], 1)] {
            let rows: Vec<&[i64]> = t.iter().map(|r| r.as_slice()).collect();
            let opts = ThetaOptions { membership_probes: 5, law_probes: 5, quad: 16, ..Default::default() };
            let r = verify_theta_suite(g, &lv(&rows), &opts).unwrap();
            assert!(r.passed, "{r:#?}");
        }
    }
}
