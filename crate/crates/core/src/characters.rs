//! Characters: `σ_c` on `K`, the lattice characters `φ_{M,q}` on `Γ_L`, the
//! flat characters `φ_{k,l}`, and the canonical `q_M(ξ, η) = 2σ(Mξᵗη)`.
//!
//! A general `q` is carried as `q_M` plus a flat twist `2σ(kᵗξ + lᵗη)`. Every
//! such `q` satisfies the cocycle condition, and any two characters with the
//! same `M` differ by a flat one, which makes twist recovery exact.

use num::rational::BigRational;
use num::traits::Zero;
use num::BigInt;

use crate::error::{Error, Result};
use crate::exact::{rat, trace, IntMat, Level, Mat, RatMat};
use crate::group::{GroupElement, KElement, Phase};

fn mod_two(x: BigRational) -> BigRational {
    let two = rat(2, 1);
    let f = (x.clone() / two.clone()).floor();
    x - f * two
}

/// `σ(A ᵗB)`, i.e. the entrywise dot product of two `h x g` matrices.
fn pair(a: &RatMat, b: &RatMat) -> Result<BigRational> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    Ok(a.frobenius_dot(b))
}

/// The central character `σ_c(κ) = e^{2πi σ(cκ)}` of `K`.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaC {
    c: RatMat,
}

impl SigmaC {
    pub fn new(c: RatMat) -> Result<Self> {
        if !c.is_square() {
            return Err(Error::NotSquare { rows: c.rows(), cols: c.cols() });
        }
        if !c.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        if c.is_zero() {
            return Err(Error::InvalidArgument("sigma_c needs c != 0".into()));
        }
        Ok(SigmaC { c })
    }

    pub fn from_level(level: &Level) -> Self {
        SigmaC { c: level.m().clone() }
    }

    pub fn c(&self) -> &RatMat {
        &self.c
    }

    pub fn eval(&self, a: &KElement<BigRational>) -> Result<Phase<BigRational>> {
        Ok(Phase::new(trace(&self.c.checked_mul(&a.kappa)?)?))
    }
}

/// An element of `Γ_L`: a group element with integral `λ` and `μ`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaLElement(GroupElement<BigRational>);

impl GammaLElement {
    pub fn new(g: GroupElement<BigRational>) -> Result<Self> {
        if !g.lambda().is_integral() || !g.mu().is_integral() {
            return Err(Error::InvalidArgument("lattice element needs integral lambda and mu".into()));
        }
        Ok(GammaLElement(g))
    }

    /// `(ξ, η, -ηᵗξ)`, the lattice point with vanishing square-coordinate `κ`.
    pub fn from_lattice(xi: &IntMat, eta: &IntMat) -> Result<Self> {
        let (x, e) = (xi.to_rational(), eta.to_rational());
        let kappa = -&e.checked_mul(&x.transpose())?;
        Self::new(GroupElement::new(x, e, kappa)?)
    }

    pub fn central(g: usize, kappa: RatMat) -> Result<Self> {
        Self::new(GroupElement::central(g, kappa)?)
    }

    pub fn element(&self) -> &GroupElement<BigRational> {
        &self.0
    }

    pub fn xi(&self) -> IntMat {
        self.0.lambda().to_integer().expect("integral")
    }

    pub fn eta(&self) -> IntMat {
        self.0.mu().to_integer().expect("integral")
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        Ok(GammaLElement(self.0.compose(&other.0)?))
    }
}

/// `q_M(ξ, η) = 2σ(Mξᵗη) mod 2`.
pub fn q_m(level: &Level, xi: &IntMat, eta: &IntMat) -> Result<BigRational> {
    let prod = xi.to_rational().checked_mul(&eta.to_rational().transpose())?;
    Ok(mod_two(trace(&level.m().checked_mul(&prod)?)? * rat(2, 1)))
}

/// Flat character `φ_{k,l}(ξ, η) = e^{2πi σ(kᵗξ + lᵗη)}` with `k, l` mod 1.
#[derive(Clone, Debug, PartialEq)]
pub struct CharKL {
    k: RatMat,
    l: RatMat,
}

impl CharKL {
    pub fn new(k: RatMat, l: RatMat) -> Result<Self> {
        if k.shape() != l.shape() {
            return Err(Error::DimensionMismatch(format!("k {:?}, l {:?}", k.shape(), l.shape())));
        }
        let reduce = |m: &RatMat| m.map(|x| x - x.floor());
        Ok(CharKL { k: reduce(&k), l: reduce(&l) })
    }

    pub fn zero(h: usize, g: usize) -> Self {
        CharKL { k: RatMat::zeros(h, g), l: RatMat::zeros(h, g) }
    }

    pub fn k(&self) -> &RatMat {
        &self.k
    }

    pub fn l(&self) -> &RatMat {
        &self.l
    }

    pub fn is_trivial(&self) -> bool {
        self.k.is_zero() && self.l.is_zero()
    }

    pub fn eval(&self, xi: &IntMat, eta: &IntMat) -> Result<Phase<BigRational>> {
        Ok(Phase::new(pair(&self.k, &xi.to_rational())? + pair(&self.l, &eta.to_rational())?))
    }
}

/// The function `q` on `L`, as an element of the family used by the workbench.
#[derive(Clone, Debug, PartialEq)]
pub enum QDescriptor {
    /// `q ≡ 0`; a cocycle only when `M` is integral.
    Zero,
    /// `q_M + 2σ(kᵗξ + lᵗη)`.
    Canonical(CharKL),
}

impl QDescriptor {
    pub fn eval(&self, level: &Level, xi: &IntMat, eta: &IntMat) -> Result<BigRational> {
        match self {
            QDescriptor::Zero => Ok(BigRational::zero()),
            QDescriptor::Canonical(tw) => {
                let flat = tw.eval(xi, eta)?.exponent().clone();
                Ok(mod_two(q_m(level, xi, eta)? + flat * rat(2, 1)))
            }
        }
    }
}

/// `q(l₀+l₁) - q(l₀) - q(l₁) + 2σ{M(λ₀ᵗμ₁ - μ₀ᵗλ₁)} mod 2`; zero iff `φ_{M,q}`
/// is multiplicative on this pair.
pub fn cocycle_defect(
    level: &Level,
    q: &QDescriptor,
    l0: (&IntMat, &IntMat),
    l1: (&IntMat, &IntMat),
) -> Result<BigRational> {
    let (x0, e0) = l0;
    let (x1, e1) = l1;
    let sum = q.eval(level, &(x0 + x1), &(e0 + e1))?;
    let cross = &x0.to_rational().checked_mul(&e1.to_rational().transpose())?
        - &e0.to_rational().checked_mul(&x1.to_rational().transpose())?;
    let s = trace(&level.m().checked_mul(&cross)?)?;
    Ok(mod_two(sum - q.eval(level, x0, e0)? - q.eval(level, x1, e1)? + s * rat(2, 1)))
}

/// `φ_{M,q}(λ, μ, κ) = e^{2πiσ(Mκ)} e^{πi q(λ, μ)}` with `q = q_M + twist`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharMq {
    level: Level,
    twist: CharKL,
}

impl CharMq {
    pub fn new(level: Level, twist: CharKL) -> Result<Self> {
        if twist.k.rows() != level.h() {
            return Err(Error::DimensionMismatch(format!(
                "twist has {} rows, level h = {}",
                twist.k.rows(),
                level.h()
            )));
        }
        Ok(CharMq { level, twist })
    }

    pub fn canonical(level: Level, g: usize) -> Self {
        let h = level.h();
        CharMq { level, twist: CharKL::zero(h, g) }
    }

    pub fn level(&self) -> &Level {
        &self.level
    }

    pub fn twist(&self) -> &CharKL {
        &self.twist
    }

    pub fn q(&self) -> QDescriptor {
        QDescriptor::Canonical(self.twist.clone())
    }

    pub fn eval(&self, gamma: &GammaLElement) -> Result<Phase<BigRational>> {
        let g = gamma.element();
        let central = trace(&self.level.m().checked_mul(g.kappa())?)?;
        let q = self.q().eval(&self.level, &gamma.xi(), &gamma.eta())?;
        Ok(Phase::new(central + q / rat(2, 1)))
    }

    /// The character `γ ↦ φ(gγg⁻¹)` for `g = (a, b, -bᵗa)`; its twist is
    /// `(k - 2Mb, l + 2Ma)`.
    pub fn conjugate(&self, a: &RatMat, b: &RatMat) -> Result<Self> {
        let t = self.level.t().to_rational();
        CharMq::new(
            self.level.clone(),
            CharKL::new(self.twist.k.checked_sub(&t.checked_mul(b)?)?, self.twist.l.checked_add(&t.checked_mul(a)?)?)?,
        )
    }
}

/// The element `(a, b, -bᵗa)` whose conjugation turns `φ_{M,q_M}` twisted by
/// `(k, l)` back into `φ_{M,q_M}`: `a = -(2M)⁻¹l`, `b = (2M)⁻¹k`.
pub fn untwisting_element(level: &Level, twist: &CharKL) -> Result<GroupElement<BigRational>> {
    let t_inv = rational_inverse(&level.t().to_rational())?;
    let a = -&t_inv.checked_mul(twist.l())?;
    let b = t_inv.checked_mul(twist.k())?;
    let kappa = -&b.checked_mul(&a.transpose())?;
    GroupElement::new(a, b, kappa)
}

/// `g γ g⁻¹`.
pub fn conjugate_lattice_element(g: &GroupElement<BigRational>, gamma: &GammaLElement) -> Result<GammaLElement> {
    GammaLElement::new(g.compose(gamma.element())?.compose(&g.inverse())?)
}

pub(crate) fn rational_inverse(a: &RatMat) -> Result<RatMat> {
    let n = a.rows();
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let mut m = a.clone();
    let mut inv = RatMat::identity(n);
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[(r, col)].is_zero()).ok_or(Error::Singular)?;
        for j in 0..n {
            let (x, y) = (m[(col, j)].clone(), inv[(col, j)].clone());
            m[(col, j)] = m[(piv, j)].clone();
            inv[(col, j)] = inv[(piv, j)].clone();
            m[(piv, j)] = x;
            inv[(piv, j)] = y;
        }
        let p = m[(col, col)].clone();
        for j in 0..n {
            m[(col, j)] = m[(col, j)].clone() / p.clone();
            inv[(col, j)] = inv[(col, j)].clone() / p.clone();
        }
        for r in 0..n {
            if r != col && !m[(r, col)].is_zero() {
                let f = m[(r, col)].clone();
                for j in 0..n {
                    m[(r, j)] = m[(r, j)].clone() - f.clone() * m[(col, j)].clone();
                    inv[(r, j)] = inv[(r, j)].clone() - f.clone() * inv[(col, j)].clone();
                }
            }
        }
    }
    Ok(inv)
}

/// `χ₁ · χ₂⁻¹`, recovered from its values on the `2hg` standard lattice
/// basis vectors and checked to be flat on sums of pairs of them.
pub fn twist_decompose(chi1: &CharMq, chi2: &CharMq) -> Result<CharKL> {
    if chi1.level != chi2.level {
        return Err(Error::InvalidArgument("twist decomposition needs a common level".into()));
    }
    let (h, g) = chi1.twist.k.shape();
    let ratio = |xi: &IntMat, eta: &IntMat| -> Result<BigRational> {
        let gamma = GammaLElement::from_lattice(xi, eta)?;
        Ok(chi1.eval(&gamma)?.add(&chi2.eval(&gamma)?.neg()).exponent().clone())
    };
    let unit = |i: usize, j: usize| Mat::from_fn(h, g, |a, b| BigInt::from(((a, b) == (i, j)) as i64));
    let zero = IntMat::zeros(h, g);
    let mut k = RatMat::zeros(h, g);
    let mut l = RatMat::zeros(h, g);
    for i in 0..h {
        for j in 0..g {
            k[(i, j)] = ratio(&unit(i, j), &zero)?;
            l[(i, j)] = ratio(&zero, &unit(i, j))?;
        }
    }
    let flat = CharKL::new(k, l)?;
    let basis: Vec<(IntMat, IntMat)> =
        (0..h * g).flat_map(|p| [(unit(p / g, p % g), zero.clone()), (zero.clone(), unit(p / g, p % g))]).collect();
    for (x0, e0) in &basis {
        for (x1, e1) in &basis {
            let (x, e) = (x0 + x1, e0 + e1);
            if ratio(&x, &e)? != *flat.eval(&x, &e)?.exponent() {
                return Err(Error::InvariantViolation("character ratio is not flat".into()));
            }
        }
    }
    Ok(flat)
}

/// Outcome of the test whether `e^{2πiσ(Mκ)}` is a character of `Γ_L`.
#[derive(Clone, Debug, PartialEq)]
pub struct GateResult {
    pub valid: bool,
    /// `(λ₀, μ₀)` with `σ(Mμ₀ᵗλ₀) ∉ Z`, when invalid.
    pub witness: Option<(IntMat, IntMat)>,
    pub offending_value: Option<BigRational>,
}

/// `σ(Mμ₀ᵗλ₀) ∈ Z` for all integral `λ₀, μ₀` iff every `σ(M E_ij) = M_ji` is
/// an integer; the witness realizes `μ₀ᵗλ₀ = E_ij` with first columns
/// `μ₀ = e_i`, `λ₀ = e_j`.
pub fn char_is_valid_for_pi_m(level: &Level, g: usize) -> GateResult {
    let h = level.h();
    for i in 0..h {
        for j in 0..h {
            let v = level.m()[(j, i)].clone();
            if !v.is_integer() {
                let lambda0 = Mat::from_fn(h, g, |a, b| BigInt::from((a == j && b == 0) as i64));
                let mu0 = Mat::from_fn(h, g, |a, b| BigInt::from((a == i && b == 0) as i64));
                return GateResult { valid: false, witness: Some((lambda0, mu0)), offending_value: Some(v) };
            }
        }
    }
    GateResult { valid: true, witness: None, offending_value: None }
}

/// Whether `κ ↦ e^{2πiσ(Mκ)}` is trivial on integral symmetric `κ`, i.e.
/// whether every diagonal entry of `M` is an integer. Returns the first
/// failing diagonal index otherwise.
pub fn trivial_on_integral_center(level: &Level) -> std::result::Result<(), usize> {
    match (0..level.h()).find(|&i| !level.m()[(i, i)].is_integer()) {
        Some(i) => Err(i),
        None => Ok(()),
    }
}

/// Seeded generators for lattice data.
pub mod random {
    use num::BigInt;
    use rand::Rng;

    use super::{CharKL, GammaLElement};
    use crate::exact::{IntMat, Mat};
    use crate::group::{random as grand, Dim, GroupElement};

    pub fn int_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, bound: i64) -> IntMat {
        Mat::from_fn(rows, cols, |_, _| BigInt::from(rng.gen_range(-bound..=bound)))
    }

    pub fn lattice_point<R: Rng>(rng: &mut R, dim: Dim) -> (IntMat, IntMat) {
        (int_matrix(rng, dim.h, dim.g, 3), int_matrix(rng, dim.h, dim.g, 3))
    }

    pub fn gamma_l<R: Rng>(rng: &mut R, dim: Dim) -> GammaLElement {
        let (x, e) = lattice_point(rng, dim);
        let (x, e) = (x.to_rational(), e.to_rational());
        let s = grand::rational_symmetric(rng, dim.h);
        let kappa = &s - &(&e * &x.transpose());
        GammaLElement::new(GroupElement::new(x, e, kappa).expect("symmetric")).expect("integral")
    }

    pub fn twist<R: Rng>(rng: &mut R, dim: Dim) -> CharKL {
        let k = grand::rational_matrix(rng, dim.h, dim.g);
        let l = grand::rational_matrix(rng, dim.h, dim.g);
        CharKL::new(k, l).expect("same shape")
    }
}

/// The five half-integral levels exercised by the character suite.
pub fn sample_levels() -> Vec<Level> {
    [vec![vec![1]], vec![vec![2]], vec![vec![3]], vec![vec![2, 1], vec![1, 2]], vec![vec![2, 1], vec![1, 4]]]
        .into_iter()
        .map(|rows| {
            let r: Vec<&[i64]> = rows.iter().map(|v| v.as_slice()).collect();
            Level::from_i64(&r).expect("positive definite")
        })
        .collect()
}
