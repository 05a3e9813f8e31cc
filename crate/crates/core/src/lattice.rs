//! The lattice representation `π_M = Ind_{Γ_L}^G φ_M`: coset systems of
//! `Z^(h,g)` modulo `2M`, evaluation of elements from their Fourier data,
//! the right-translation action, and Fourier extraction over `I_μ`.
//!
//! An element is stored as its components `α ↦ c_α`; its value at
//! `[λ, μ, κ]` is
//! `e^{2πiσ(Mκ)} Σ_α Σ_N c_α(λ+N) e^{2πiσ{(α+2MN)ᵗμ}}`.

use num::bigint::BigInt;
use num::complex::Complex64;
use num::traits::{ToPrimitive, Zero};

use crate::characters::{char_is_valid_for_pi_m, CharMq, GammaLElement};
use crate::error::{Error, Result};
use crate::exact::{column_hermite, smith_normal_form, ColumnHermite, IntMat, Level, Mat, RealMat};
use crate::group::{Dim, GroupElement, SquareElement};
use crate::numerics::{
    box_points, integrate_product, sum_deterministic, truncation_radius, Quadrature, QuadratureRule, Residual,
    TruncationPolicy,
};
use crate::schrodinger::{cis, sigma, GaussianPacket, PacketSum};

/// Representatives of `Z^(h,g)` modulo `2M·Z^(h,g)`, in lexicographic order
/// of their row-major entries.
#[derive(Clone, Debug, PartialEq)]
pub struct CosetSystem {
    level: Level,
    g: usize,
    reps: Vec<IntMat>,
    hermite: ColumnHermite,
}

fn int_key(m: &IntMat) -> Vec<BigInt> {
    m.as_slice().to_vec()
}

/// Enumerates `(Z^h / TZ^h)^g` through the Smith form `T = UDV`
/// (`x = Uy` with `0 <= yᵢ < dᵢ` per column) and reduces every
/// representative into the Hermite box of `T`.
pub fn coset_reps(level: &Level, g: usize) -> Result<CosetSystem> {
    if g == 0 {
        return Err(Error::InvalidArgument("g must be positive".into()));
    }
    let h = level.h();
    let t = level.t();
    let snf = smith_normal_form(t)?;
    let hermite = column_hermite(t)?;
    let d: Vec<i64> = snf.invariant_factors().iter().map(|x| x.to_i64().expect("small level")).collect();
    let per_col: i64 = d.iter().product();

    let mut columns = Vec::with_capacity(per_col as usize);
    for k in 0..per_col {
        let mut rest = k;
        let y: Vec<BigInt> = d
            .iter()
            .map(|&di| {
                let v = rest % di;
                rest /= di;
                BigInt::from(v)
            })
            .collect();
        let x: Vec<BigInt> = (0..h).map(|i| (0..h).map(|j| &snf.u[(i, j)] * &y[j]).sum()).collect();
        columns.push(hermite.reduce(&x).0);
    }
    let total = (per_col as usize).pow(g as u32);
    let mut reps: Vec<IntMat> = (0..total)
        .map(|mut k| {
            let mut a = IntMat::zeros(h, g);
            for col in (0..g).rev() {
                let c = &columns[k % columns.len()];
                for i in 0..h {
                    a[(i, col)] = c[i].clone();
                }
                k /= columns.len();
            }
            a
        })
        .collect();
    reps.sort_by_key(int_key);
    reps.dedup();
    if reps.len() != total {
        return Err(Error::InvariantViolation(format!("{} distinct cosets, expected {total}", reps.len())));
    }
    Ok(CosetSystem { level: level.clone(), g, reps, hermite })
}

impl CosetSystem {
    pub fn level(&self) -> &Level {
        &self.level
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn reps(&self) -> &[IntMat] {
        &self.reps
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// `(det 2M)^g` from the Smith invariants, for cross-checking `len`.
    pub fn expected_count(&self) -> Result<BigInt> {
        let per: BigInt = smith_normal_form(self.level.t())?.invariant_factors().iter().product();
        Ok(num::pow::pow(per, self.g))
    }

    /// `N = α + 2M·λ₀` with `α` canonical.
    pub fn reduce(&self, n: &IntMat) -> Result<(IntMat, IntMat)> {
        let h = self.level.h();
        if n.shape() != (h, self.g) {
            return Err(Error::DimensionMismatch(format!("{:?} vs ({h}, {})", n.shape(), self.g)));
        }
        let mut alpha = IntMat::zeros(h, self.g);
        let mut lambda0 = IntMat::zeros(h, self.g);
        for col in 0..self.g {
            let (r, q) = self.hermite.reduce(&n.column(col));
            for i in 0..h {
                alpha[(i, col)] = r[i].clone();
                lambda0[(i, col)] = (0..h).map(|j| &self.hermite.v[(i, j)] * &q[j]).sum();
            }
        }
        Ok((alpha, lambda0))
    }

    pub fn is_canonical(&self, alpha: &IntMat) -> bool {
        self.index_of(alpha).is_some()
    }

    pub fn index_of(&self, alpha: &IntMat) -> Option<usize> {
        self.reps.binary_search_by_key(&int_key(alpha), int_key).ok()
    }
}

/// A series value with the certified bound on its omitted tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub tail: f64,
    /// Largest `|entry|` of a frequency retained in the sum.
    pub max_frequency: i64,
}

impl SeriesValue {
    pub fn zero() -> Self {
        SeriesValue { value: Complex64::new(0.0, 0.0), tail: 0.0, max_frequency: 0 }
    }
}

fn to_i64(m: &IntMat) -> Mat<i64> {
    m.to_i64().expect("lattice data fits in i64")
}

/// `Σ_N p(shift + N) e^{2πi phase(N)}` over the truncation box, in
/// lexicographic order of `N`, with its tail bound.
pub(crate) fn packet_lattice_sum(
    p: &GaussianPacket,
    shift: &[f64],
    trunc: &TruncationPolicy,
    mut phase: impl FnMut(&[i64]) -> f64,
) -> Result<(Complex64, f64, Vec<Vec<i64>>)> {
    if p.gamma() == Complex64::new(0.0, 0.0) {
        return Ok((Complex64::new(0.0, 0.0), 0.0, Vec::new()));
    }
    let tb = truncation_radius(&p.decay()?, shift, trunc)?;
    let pts = box_points(&tb.box_center, tb.radius);
    let mut x = vec![0.0; shift.len()];
    let terms: Vec<Complex64> = pts
        .iter()
        .map(|n| {
            for i in 0..shift.len() {
                x[i] = shift[i] + n[i] as f64;
            }
            p.eval(&x) * cis(phase(n))
        })
        .collect();
    Ok((sum_deterministic(&terms), tb.bound, pts))
}

/// The retained terms `(frequency, c(λ+N))` of a series at fixed `λ`, with
/// frequencies flattened row-major.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FourierTerms {
    pub terms: Vec<(Vec<i64>, Complex64)>,
    pub tail: f64,
    pub max_frequency: i64,
}

/// One Fourier component: frequencies `α + S·N` carrying `c(λ + N)`, with
/// step `S = 2M` for genuine elements of `π_M`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeComponent {
    alpha: IntMat,
    coeff: PacketSum,
    step: IntMat,
}

impl LatticeComponent {
    pub fn new(level: &Level, alpha: IntMat, coeff: PacketSum) -> Result<Self> {
        Self::with_step(alpha, coeff, level.t().clone())
    }

    /// A component with an arbitrary frequency step. Only `S = 2M` gives
    /// elements of the representation space; other steps serve as negative
    /// controls for the membership and intertwining checks.
    pub fn with_step(alpha: IntMat, coeff: PacketSum, step: IntMat) -> Result<Self> {
        let d = coeff.dim();
        if alpha.shape() != (d.h, d.g) || step.shape() != (d.h, d.h) {
            return Err(Error::DimensionMismatch(format!(
                "alpha {:?}, step {:?} for {:?}",
                alpha.shape(),
                step.shape(),
                d
            )));
        }
        Ok(LatticeComponent { alpha, coeff, step })
    }

    pub fn alpha(&self) -> &IntMat {
        &self.alpha
    }

    pub fn coeff(&self) -> &PacketSum {
        &self.coeff
    }

    /// The terms of [`Self::series`] at `λ`, before the `μ` phases.
    pub fn fourier_terms(&self, lambda: &RealMat, trunc: &TruncationPolicy) -> Result<FourierTerms> {
        let d = self.coeff.dim();
        let (h, g) = (d.h, d.g);
        let alpha = to_i64(&self.alpha);
        let step = to_i64(&self.step);
        let shift = lambda.as_slice();
        let mut out = FourierTerms::default();
        let mut x = vec![0.0; shift.len()];
        for p in self.coeff.packets() {
            if p.gamma() == Complex64::new(0.0, 0.0) {
                continue;
            }
            let tb = truncation_radius(&p.decay()?, shift, trunc)?;
            for n in box_points(&tb.box_center, tb.radius) {
                for i in 0..shift.len() {
                    x[i] = shift[i] + n[i] as f64;
                }
                let mut freq = vec![0i64; h * g];
                for i in 0..h {
                    for j in 0..g {
                        let f = alpha[(i, j)] + (0..h).map(|k| step[(i, k)] * n[k * g + j]).sum::<i64>();
                        out.max_frequency = out.max_frequency.max(f.abs());
                        freq[i * g + j] = f;
                    }
                }
                out.terms.push((freq, p.eval(&x)));
            }
            out.tail += tb.bound;
        }
        Ok(out)
    }

    /// `Σ_N c(λ+N) e^{2πiσ{(α+SN)ᵗμ}}` without the `κ` prefactor.
    pub fn series(&self, lambda: &RealMat, mu: &RealMat, trunc: &TruncationPolicy) -> Result<SeriesValue> {
        let d = self.coeff.dim();
        let (h, g) = (d.h, d.g);
        let alpha = to_i64(&self.alpha);
        let step = to_i64(&self.step);
        // integer frequencies only see μ mod 1
        let mu_red: Vec<f64> = mu.as_slice().iter().map(|x| x - x.floor()).collect();
        let mut values = Vec::new();
        let mut tail = 0.0;
        let mut max_frequency = 0i64;
        for p in self.coeff.packets() {
            let mut freq = vec![0i64; h * g];
            let (v, t, pts) = packet_lattice_sum(p, lambda.as_slice(), trunc, |n| {
                let mut s = 0.0;
                for i in 0..h {
                    for j in 0..g {
                        let mut f = alpha[(i, j)];
                        for k in 0..h {
                            f += step[(i, k)] * n[k * g + j];
                        }
                        freq[i * g + j] = f;
                        s += f as f64 * mu_red[i * g + j];
                    }
                }
                s
            })?;
            for n in &pts {
                for i in 0..h {
                    for j in 0..g {
                        let f = alpha[(i, j)] + (0..h).map(|k| step[(i, k)] * n[k * g + j]).sum::<i64>();
                        max_frequency = max_frequency.max(f.abs());
                    }
                }
            }
            values.push(v);
            tail += t;
        }
        Ok(SeriesValue { value: sum_deterministic(&values), tail, max_frequency })
    }
}

/// Anything that can be evaluated as a function on `G` in the model of the
/// lattice representation.
pub trait LatticeFunction: Sync {
    fn level(&self) -> &Level;
    fn dim(&self) -> Dim;
    fn eval(&self, s: &SquareElement<f64>, trunc: &TruncationPolicy) -> Result<SeriesValue>;
    /// Fourier terms in `μ` at `(λ, κ = 0)`.
    fn fourier_terms(&self, lambda: &RealMat, trunc: &TruncationPolicy) -> Result<FourierTerms>;
}

/// A finite sum of components, i.e. an element of `⊕_α H_{M,α}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeElement {
    level: Level,
    dim: Dim,
    components: Vec<LatticeComponent>,
}

impl LatticeElement {
    pub fn new(level: Level, dim: Dim, components: Vec<LatticeComponent>) -> Result<Self> {
        if level.h() != dim.h {
            return Err(Error::DimensionMismatch(format!("level h = {}, dim {:?}", level.h(), dim)));
        }
        if let Some(c) = components.iter().find(|c| c.coeff.dim() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "component over {:?} in element over {:?}",
                c.coeff.dim(),
                dim
            )));
        }
        Ok(LatticeElement { level, dim, components })
    }

    pub fn single(level: Level, component: LatticeComponent) -> Result<Self> {
        let dim = component.coeff.dim();
        Self::new(level, dim, vec![component])
    }

    pub fn components(&self) -> &[LatticeComponent] {
        &self.components
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.level != other.level || self.dim != other.dim {
            return Err(Error::DimensionMismatch("elements of different spaces".into()));
        }
        let mut components = self.components.clone();
        components.extend(other.components.iter().cloned());
        Self::new(self.level.clone(), self.dim, components)
    }
}

impl LatticeFunction for LatticeElement {
    fn level(&self) -> &Level {
        &self.level
    }

    fn dim(&self) -> Dim {
        self.dim
    }

    fn eval(&self, s: &SquareElement<f64>, trunc: &TruncationPolicy) -> Result<SeriesValue> {
        let m = self.level.m_f64();
        let pref = cis(sigma(&m, s.kappa()));
        let mut values = Vec::with_capacity(self.components.len());
        let mut out = SeriesValue::zero();
        for c in &self.components {
            let v = c.series(s.lambda(), s.mu(), trunc)?;
            values.push(v.value);
            out.tail += v.tail;
            out.max_frequency = out.max_frequency.max(v.max_frequency);
        }
        out.value = pref * sum_deterministic(&values);
        Ok(out)
    }

    fn fourier_terms(&self, lambda: &RealMat, trunc: &TruncationPolicy) -> Result<FourierTerms> {
        let mut out = FourierTerms::default();
        for c in &self.components {
            let t = c.fourier_terms(lambda, trunc)?;
            out.terms.extend(t.terms);
            out.tail += t.tail;
            out.max_frequency = out.max_frequency.max(t.max_frequency);
        }
        Ok(out)
    }
}

/// `(π_M(g₀)φ)(s) = φ(s ∘ g₀)`, the product taken in round coordinates.
pub fn act_pi<F: LatticeFunction>(
    phi: &F,
    g0: &GroupElement<f64>,
    s: &SquareElement<f64>,
    trunc: &TruncationPolicy,
) -> Result<SeriesValue> {
    let gate = char_is_valid_for_pi_m(phi.level(), phi.dim().g);
    if !gate.valid {
        return Err(Error::GateFailure(format!(
            "sigma(M mu0 ᵗlambda0) = {} is not an integer",
            gate.offending_value.expect("witness")
        )));
    }
    let moved = s.to_round().compose(g0)?.to_square();
    phi.eval(&moved, trunc)
}

/// `∫_{I_μ} φ([λ, μ, κ]) e^{-2πiσ(Nᵗμ)} dμ` with the periodic rule, which is
/// exact for every retained frequency as long as the frequency offsets stay
/// below the number of points; the error estimate is the truncation tail.
pub fn fourier_coefficient<F: LatticeFunction>(
    phi: &F,
    freq: &IntMat,
    lambda: &RealMat,
    kappa: &RealMat,
    rule: &QuadratureRule,
    trunc: &TruncationPolicy,
) -> Result<Quadrature> {
    let d = phi.dim();
    let n = d.n();
    let nf = to_i64(freq);
    let span = nf.as_slice().iter().map(|x| x.abs()).max().unwrap_or(0);
    // probe the retained frequencies at the cube's corner
    let probe = SquareElement::new(lambda.clone(), RealMat::zeros(d.h, d.g), kappa.clone())?;
    let reach = phi.eval(&probe, trunc)?.max_frequency + span;
    if reach >= rule.points() as i64 {
        return Err(Error::QuadratureTooCoarse { points: rule.points(), frequency: reach });
    }
    let rules = vec![rule; n];
    let tails = std::sync::Mutex::new(0.0f64);
    let err = std::sync::Mutex::new(None);
    let value = integrate_product(&rules, |mu| {
        let mu_m = RealMat::from_vec(d.h, d.g, mu.to_vec()).expect("shape");
        let s = SquareElement::new(lambda.clone(), mu_m, kappa.clone()).expect("symmetric kappa");
        match phi.eval(&s, trunc) {
            Ok(v) => {
                let mut t = tails.lock().expect("lock");
                *t = t.max(v.tail);
                let phase: f64 = nf.as_slice().iter().zip(mu).map(|(k, x)| *k as f64 * x).sum();
                v.value * cis(-phase)
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
    Ok(Quadrature { value, error_estimate: tails.into_inner().expect("lock") })
}

/// `e^{2πiσ(Mκ)} c_α(λ)` recovered from the values of `φ` on `I_μ`.
pub fn fourier_extract<F: LatticeFunction>(
    phi: &F,
    alpha: &IntMat,
    lambda: &RealMat,
    kappa: &RealMat,
    rule: &QuadratureRule,
    trunc: &TruncationPolicy,
) -> Result<Quadrature> {
    fourier_coefficient(phi, alpha, lambda, kappa, rule, trunc)
}

/// `|φ(γ₀ ∘ s) - φ_M(γ₀) φ(s)|` for the canonical character `φ_M`, with the sum of both tails as bound.
pub fn membership_defect<F: LatticeFunction>(
    phi: &F,
    gamma0: &GammaLElement,
    s: &SquareElement<f64>,
    trunc: &TruncationPolicy,
) -> Result<Residual> {
    let g0 = gamma0.element().to_f64();
    let moved = g0.compose(&s.to_round())?.to_square();
    let lhs = phi.eval(&moved, trunc)?;
    let rhs = phi.eval(s, trunc)?;
    let chi = CharMq::canonical(phi.level().clone(), phi.dim().g).eval(gamma0)?.to_complex();
    Ok(Residual::new((lhs.value - chi * rhs.value).norm(), lhs.tail + rhs.tail))
}

/// `∫_{I_λ} Σ_N |c(λ+N)|² dλ`, with each product packet `c_p conj(c_q)`
/// periodized under a certified tail.
pub fn periodized_norm_sq(c: &PacketSum, rule: &QuadratureRule, trunc: &TruncationPolicy) -> Result<Quadrature> {
    let n = c.dim().n();
    let products: Vec<GaussianPacket> =
        c.packets().iter().flat_map(|p| c.packets().iter().map(move |q| p.times_conj(q))).collect();
    let tails = std::sync::Mutex::new(0.0f64);
    let err = std::sync::Mutex::new(None);
    let rules = vec![rule; n];
    let value = integrate_product(&rules, |lam| {
        let mut vals = Vec::with_capacity(products.len());
        let mut tail = 0.0;
        for p in &products {
            match packet_lattice_sum(p, lam, trunc, |_| 0.0) {
                Ok((v, t, _)) => {
                    vals.push(v);
                    tail += t;
                }
                Err(e) => {
                    err.lock().expect("lock").get_or_insert(e);
                }
            }
        }
        let mut t = tails.lock().expect("lock");
        *t = t.max(tail);
        sum_deterministic(&vals)
    });
    if let Some(e) = err.into_inner().expect("lock") {
        return Err(e);
    }
    Ok(Quadrature { value, error_estimate: tails.into_inner().expect("lock") })
}

/// `IntMat` of the given shape with all entries zero.
pub fn zero_int(h: usize, g: usize) -> IntMat {
    Mat::from_fn(h, g, |_, _| BigInt::zero())
}
