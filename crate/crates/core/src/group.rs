//! The Heisenberg group `H^(g,h)` of triples `(λ, μ, κ)` with `λ, μ` of
//! size `h x g`, `κ` of size `h x h` and `κ + μᵗλ` symmetric.
//!
//! Two coordinate systems are carried: round `(λ, μ, κ)` with the product
//! `(λ+λ', μ+μ', κ+κ'+λᵗμ'−μᵗλ')`, and square `[λ, μ, κ] = (λ, μ, κ−μᵗλ)`
//! whose `κ` is symmetric. Elements over `BigRational` give exact group-law
//! checks; `f64` elements feed the analysis modules.

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{trace, Mat, RealScalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dim {
    pub g: usize,
    pub h: usize,
}

impl Dim {
    pub fn new(g: usize, h: usize) -> Result<Self> {
        if g == 0 || h == 0 {
            return Err(Error::InvalidArgument(format!("g = {g}, h = {h} must be positive")));
        }
        Ok(Dim { g, h })
    }

    /// Real dimension `hg` of `R^(h,g)`.
    pub fn n(&self) -> usize {
        self.g * self.h
    }
}

fn check_shape<T>(m: &Mat<T>, rows: usize, cols: usize, what: &str) -> Result<()>
where
    T: Clone,
{
    if m.shape() != (rows, cols) {
        return Err(Error::DimensionMismatch(format!("{what} is {}x{}, expected {rows}x{cols}", m.rows(), m.cols())));
    }
    Ok(())
}

/// Element in round coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement<T> {
    lambda: Mat<T>,
    mu: Mat<T>,
    kappa: Mat<T>,
}

impl<T: RealScalar> GroupElement<T> {
    pub fn new(lambda: Mat<T>, mu: Mat<T>, kappa: Mat<T>) -> Result<Self> {
        let (h, g) = lambda.shape();
        check_shape(&mu, h, g, "mu")?;
        check_shape(&kappa, h, h, "kappa")?;
        let s = &kappa + &(&mu * &lambda.transpose());
        if !s.is_symmetric() {
            return Err(Error::InvariantViolation("kappa + mu ᵗlambda is not symmetric".into()));
        }
        Ok(GroupElement { lambda, mu, kappa })
    }

    pub fn identity(dim: Dim) -> Self {
        GroupElement { lambda: Mat::zeros(dim.h, dim.g), mu: Mat::zeros(dim.h, dim.g), kappa: Mat::zeros(dim.h, dim.h) }
    }

    /// The element `(λ, 0, 0)` of the abelian subgroup `S`.
    pub fn translation(lambda: Mat<T>) -> Self {
        let (h, g) = lambda.shape();
        GroupElement { lambda, mu: Mat::zeros(h, g), kappa: Mat::zeros(h, h) }
    }

    /// The central element `(0, 0, κ)`; `κ` must be symmetric.
    pub fn central(g: usize, kappa: Mat<T>) -> Result<Self> {
        let h = kappa.rows();
        Self::new(Mat::zeros(h, g), Mat::zeros(h, g), kappa)
    }

    pub fn dim(&self) -> Dim {
        Dim { g: self.lambda.cols(), h: self.lambda.rows() }
    }

    pub fn lambda(&self) -> &Mat<T> {
        &self.lambda
    }

    pub fn mu(&self) -> &Mat<T> {
        &self.mu
    }

    pub fn kappa(&self) -> &Mat<T> {
        &self.kappa
    }

    pub fn into_parts(self) -> (Mat<T>, Mat<T>, Mat<T>) {
        (self.lambda, self.mu, self.kappa)
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", self.dim(), other.dim())));
        }
        Ok(())
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let kappa = &(&(&self.kappa + &other.kappa) + &(&self.lambda * &other.mu.transpose()))
            - &(&self.mu * &other.lambda.transpose());
        Ok(GroupElement { lambda: &self.lambda + &other.lambda, mu: &self.mu + &other.mu, kappa })
    }

    pub fn inverse(&self) -> Self {
        let kappa =
            &(&(-&self.kappa) + &(&self.lambda * &self.mu.transpose())) - &(&self.mu * &self.lambda.transpose());
        GroupElement { lambda: -&self.lambda, mu: -&self.mu, kappa }
    }

    pub fn to_square(&self) -> SquareElement<T> {
        SquareElement {
            lambda: self.lambda.clone(),
            mu: self.mu.clone(),
            kappa: &self.kappa + &(&self.mu * &self.lambda.transpose()),
        }
    }

    /// `g = k_g ∘ s_g` with `k_g = (0, μ, κ+μᵗλ)` in `K` and `s_g = (λ, 0, 0)` in `S`.
    pub fn mackey_decompose(&self) -> (Self, Self) {
        let (h, g) = self.lambda.shape();
        let k = GroupElement {
            lambda: Mat::zeros(h, g),
            mu: self.mu.clone(),
            kappa: &self.kappa + &(&self.mu * &self.lambda.transpose()),
        };
        (k, Self::translation(self.lambda.clone()))
    }

    /// Image in `Sp(g+h)` as a `2(g+h)`-square matrix with block rows
    /// `(E_g, 0, 0, ᵗμ)`, `(λ, E_h, μ, κ)`, `(0, 0, E_g, −ᵗλ)`, `(0, 0, 0, E_h)`.
    pub fn embed_symplectic(&self) -> Mat<T> {
        let Dim { g, h } = self.dim();
        let n = 2 * (g + h);
        // block boundaries: [0,g) [g,g+h) [g+h,2g+h) [2g+h,n)
        let block = |i: usize| {
            if i < g {
                (0, i)
            } else if i < g + h {
                (1, i - g)
            } else if i < 2 * g + h {
                (2, i - g - h)
            } else {
                (3, i - 2 * g - h)
            }
        };
        Mat::from_fn(n, n, |i, j| {
            let ((bi, a), (bj, b)) = (block(i), block(j));
            let delta = || if a == b { T::one() } else { T::zero() };
            match (bi, bj) {
                (0, 0) | (1, 1) | (2, 2) | (3, 3) => delta(),
                (0, 3) => self.mu[(b, a)].clone(),
                (1, 0) => self.lambda[(a, b)].clone(),
                (1, 2) => self.mu[(a, b)].clone(),
                (1, 3) => self.kappa[(a, b)].clone(),
                (2, 3) => -self.lambda[(b, a)].clone(),
                _ => T::zero(),
            }
        })
    }

    pub fn map_scalar<U: RealScalar>(&self, f: impl Fn(&T) -> U) -> GroupElement<U> {
        GroupElement { lambda: self.lambda.map(&f), mu: self.mu.map(&f), kappa: self.kappa.map(&f) }
    }

    pub fn to_f64(&self) -> GroupElement<f64> {
        self.map_scalar(RealScalar::to_f64)
    }
}

/// `J = [[0, E], [−E, 0]]` of size `2(g+h)`.
pub fn symplectic_j<T: RealScalar>(dim: Dim) -> Mat<T> {
    let k = dim.g + dim.h;
    Mat::from_fn(2 * k, 2 * k, |i, j| {
        if j == i + k {
            T::one()
        } else if i == j + k {
            -T::one()
        } else {
            T::zero()
        }
    })
}

/// Element in square coordinates `[λ, μ, κ]`, `κ` symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareElement<T> {
    lambda: Mat<T>,
    mu: Mat<T>,
    kappa: Mat<T>,
}

impl<T: RealScalar> SquareElement<T> {
    pub fn new(lambda: Mat<T>, mu: Mat<T>, kappa: Mat<T>) -> Result<Self> {
        let (h, g) = lambda.shape();
        check_shape(&mu, h, g, "mu")?;
        check_shape(&kappa, h, h, "kappa")?;
        if !kappa.is_symmetric() {
            return Err(Error::InvariantViolation("square-coordinate kappa is not symmetric".into()));
        }
        Ok(SquareElement { lambda, mu, kappa })
    }

    pub fn identity(dim: Dim) -> Self {
        GroupElement::identity(dim).to_square()
    }

    pub fn dim(&self) -> Dim {
        Dim { g: self.lambda.cols(), h: self.lambda.rows() }
    }

    pub fn lambda(&self) -> &Mat<T> {
        &self.lambda
    }

    pub fn mu(&self) -> &Mat<T> {
        &self.mu
    }

    pub fn kappa(&self) -> &Mat<T> {
        &self.kappa
    }

    pub fn to_round(&self) -> GroupElement<T> {
        GroupElement {
            lambda: self.lambda.clone(),
            mu: self.mu.clone(),
            kappa: &self.kappa - &(&self.mu * &self.lambda.transpose()),
        }
    }

    /// `[λ+λ₀, μ+μ₀, κ+κ₀+λᵗμ₀+μ₀ᵗλ]`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", self.dim(), other.dim())));
        }
        let cross = &self.lambda * &other.mu.transpose();
        let kappa = &(&(&self.kappa + &other.kappa) + &cross) + &cross.transpose();
        Ok(SquareElement { lambda: &self.lambda + &other.lambda, mu: &self.mu + &other.mu, kappa })
    }

    /// `[−λ, −μ, −κ+λᵗμ+μᵗλ]`.
    pub fn inverse(&self) -> Self {
        let cross = &self.lambda * &self.mu.transpose();
        SquareElement { lambda: -&self.lambda, mu: -&self.mu, kappa: &(&(-&self.kappa) + &cross) + &cross.transpose() }
    }

    pub fn to_f64(&self) -> SquareElement<f64> {
        SquareElement {
            lambda: self.lambda.map(RealScalar::to_f64),
            mu: self.mu.map(RealScalar::to_f64),
            kappa: self.kappa.map(RealScalar::to_f64),
        }
    }
}

/// `[0, μ, κ]` in the commutative normal subgroup `K`.
#[derive(Clone, Debug, PartialEq)]
pub struct KElement<T> {
    pub mu: Mat<T>,
    pub kappa: Mat<T>,
}

impl<T: RealScalar> KElement<T> {
    pub fn new(mu: Mat<T>, kappa: Mat<T>) -> Result<Self> {
        check_shape(&kappa, mu.rows(), mu.rows(), "kappa")?;
        if !kappa.is_symmetric() {
            return Err(Error::InvariantViolation("K element needs symmetric kappa".into()));
        }
        Ok(KElement { mu, kappa })
    }

    pub fn to_group(&self) -> GroupElement<T> {
        SquareElement {
            lambda: Mat::zeros(self.mu.rows(), self.mu.cols()),
            mu: self.mu.clone(),
            kappa: self.kappa.clone(),
        }
        .to_round()
    }

    /// Group product in `K` (commutative: `μ` and `κ` add).
    pub fn add(&self, other: &Self) -> Self {
        KElement { mu: &self.mu + &other.mu, kappa: &self.kappa + &other.kappa }
    }
}

/// Unitary character `(μ̂, κ̂)` of `K`.
#[derive(Clone, Debug, PartialEq)]
pub struct KHatElement<T> {
    pub mu_hat: Mat<T>,
    pub kappa_hat: Mat<T>,
}

impl<T: RealScalar> KHatElement<T> {
    pub fn new(mu_hat: Mat<T>, kappa_hat: Mat<T>) -> Result<Self> {
        check_shape(&kappa_hat, mu_hat.rows(), mu_hat.rows(), "kappa_hat")?;
        if !kappa_hat.is_symmetric() {
            return Err(Error::InvariantViolation("dual element needs symmetric kappa_hat".into()));
        }
        Ok(KHatElement { mu_hat, kappa_hat })
    }
}

/// A point of `R/Z`, i.e. the exponent of a unit complex number `e^{2πi x}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Phase<T>(T);

impl<T: RealScalar> Phase<T> {
    pub fn new(x: T) -> Self {
        let f = x.floor_val();
        Phase(x - f)
    }

    pub fn zero() -> Self {
        Phase(T::zero())
    }

    /// Representative in `[0, 1)`.
    pub fn exponent(&self) -> &T {
        &self.0
    }

    pub fn add(&self, other: &Self) -> Self {
        Phase::new(self.0.clone() + other.0.clone())
    }

    pub fn neg(&self) -> Self {
        Phase::new(-self.0.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(1.0, std::f64::consts::TAU * self.0.to_f64())
    }
}

/// Raw pairing exponent `σ(μ̂ᵗμ + κ̂κ)`.
pub fn pairing_exponent<T: RealScalar>(a: &KElement<T>, a_hat: &KHatElement<T>) -> Result<T> {
    let m = &a_hat.mu_hat.checked_mul(&a.mu.transpose())? + &a_hat.kappa_hat.checked_mul(&a.kappa)?;
    trace(&m)
}

/// `⟨a, â⟩ = e^{2πi σ(μ̂ᵗμ + κ̂κ)}`, carried as its exponent mod 1.
pub fn pairing<T: RealScalar>(a: &KElement<T>, a_hat: &KHatElement<T>) -> Result<Phase<T>> {
    pairing_exponent(a, a_hat).map(Phase::new)
}

/// `α_λ([0, μ, κ]) = [0, μ, κ+λᵗμ+μᵗλ]`.
pub fn s_action<T: RealScalar>(lambda: &Mat<T>, a: &KElement<T>) -> Result<KElement<T>> {
    let cross = lambda.checked_mul(&a.mu.transpose())?;
    Ok(KElement { mu: a.mu.clone(), kappa: &(&a.kappa + &cross) + &cross.transpose() })
}

/// `α*_λ(μ̂, κ̂) = (μ̂ + 2κ̂λ, κ̂)`.
pub fn s_action_dual<T: RealScalar>(lambda: &Mat<T>, a_hat: &KHatElement<T>) -> Result<KHatElement<T>> {
    let two = T::one() + T::one();
    let shift = a_hat.kappa_hat.checked_mul(lambda)?.scale(&two);
    Ok(KHatElement { mu_hat: a_hat.mu_hat.checked_add(&shift)?, kappa_hat: a_hat.kappa_hat.clone() })
}

#[derive(Clone, Debug, PartialEq)]
pub enum OrbitType<T> {
    /// `κ̂ ≠ 0`: the orbit is `{(2κ̂λ, κ̂)}`, a copy of `R^(h,g)`.
    Generic { kappa_hat: Mat<T> },
    /// `κ̂ = 0`: the point orbit `{(ŷ, 0)}`.
    Point { y_hat: Mat<T> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stabilizer {
    Trivial,
    WholeS,
}

/// S-orbit type of a dual element together with its stabilizer in `S`.
pub fn classify_orbit<T: RealScalar>(a_hat: &KHatElement<T>) -> (OrbitType<T>, Stabilizer) {
    if a_hat.kappa_hat.is_zero() {
        (OrbitType::Point { y_hat: a_hat.mu_hat.clone() }, Stabilizer::WholeS)
    } else {
        (OrbitType::Generic { kappa_hat: a_hat.kappa_hat.clone() }, Stabilizer::Trivial)
    }
}

/// Seeded generators of bounded random elements.
pub mod random {
    use num::rational::BigRational;
    use rand::Rng;

    use super::{Dim, GroupElement, KElement, KHatElement};
    use crate::exact::{rat, Mat};

    const DENOMS: [i64; 4] = [1, 2, 3, 4];

    pub fn rational<R: Rng>(rng: &mut R, bound: i64) -> BigRational {
        let d = DENOMS[rng.gen_range(0..DENOMS.len())];
        rat(rng.gen_range(-bound * d..=bound * d), d)
    }

    pub fn rational_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Mat<BigRational> {
        Mat::from_fn(rows, cols, |_, _| rational(rng, 3))
    }

    pub fn rational_symmetric<R: Rng>(rng: &mut R, n: usize) -> Mat<BigRational> {
        let a = rational_matrix(rng, n, n);
        Mat::from_fn(n, n, |i, j| if i <= j { a[(i, j)].clone() } else { a[(j, i)].clone() })
    }

    pub fn element<R: Rng>(rng: &mut R, dim: Dim) -> GroupElement<BigRational> {
        let lambda = rational_matrix(rng, dim.h, dim.g);
        let mu = rational_matrix(rng, dim.h, dim.g);
        let s = rational_symmetric(rng, dim.h);
        let kappa = &s - &(&mu * &lambda.transpose());
        GroupElement::new(lambda, mu, kappa).expect("constructed symmetric")
    }

    pub fn k_element<R: Rng>(rng: &mut R, dim: Dim) -> KElement<BigRational> {
        KElement { mu: rational_matrix(rng, dim.h, dim.g), kappa: rational_symmetric(rng, dim.h) }
    }

    pub fn k_hat_element<R: Rng>(rng: &mut R, dim: Dim) -> KHatElement<BigRational> {
        KHatElement { mu_hat: rational_matrix(rng, dim.h, dim.g), kappa_hat: rational_symmetric(rng, dim.h) }
    }

    pub fn real_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, scale: f64) -> Mat<f64> {
        Mat::from_fn(rows, cols, |_, _| rng.gen_range(-scale..=scale))
    }

    pub fn real_symmetric<R: Rng>(rng: &mut R, n: usize, scale: f64) -> Mat<f64> {
        let a = real_matrix(rng, n, n, scale);
        Mat::from_fn(n, n, |i, j| if i <= j { a[(i, j)] } else { a[(j, i)] })
    }

    /// Element with `λ`, `μ` entries in `[-scale, scale]` and symmetric part of
    /// `κ + μᵗλ` likewise bounded.
    pub fn element_f64<R: Rng>(rng: &mut R, dim: Dim, scale: f64) -> GroupElement<f64> {
        let lambda = real_matrix(rng, dim.h, dim.g, scale);
        let mu = real_matrix(rng, dim.h, dim.g, scale);
        let s = real_symmetric(rng, dim.h, scale);
        let kappa = &s - &(&mu * &lambda.transpose());
        GroupElement::new(lambda, mu, kappa).expect("constructed symmetric")
    }
}
