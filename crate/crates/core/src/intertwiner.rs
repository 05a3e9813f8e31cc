//! The operators `θ_{M,α}` from `L²(R^(h,g))` into the `α`-component of the
//! lattice representation, their isometry and intertwining certificates,
//! orthogonality of the components and the full decomposition report.
//!
//! The literal operator (`c_α = f`) satisfies
//! `π_M(g₀)θ_α f = χ_α(g₀)·θ_α(U_{g₀}f)` with `χ_α(g₀) = e^{2πiσ(αᵗμ₀)}`.
//! Precomposing with the translation by `a = (2M)⁻¹α` removes the character:
//! `θ̃_α f = θ_α(f(· + a))` intertwines `U(σ_M)` with `π_M` exactly.

use num::complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characters::{char_is_valid_for_pi_m, rational_inverse};
use crate::error::{Error, Result};
use crate::exact::{IntMat, Level, RealMat};
use crate::group::{random as grand, Dim, GroupElement, SquareElement};
use crate::lattice::{
    act_pi, coset_reps, periodized_norm_sq, CosetSystem, FourierTerms, LatticeComponent, LatticeElement,
    LatticeFunction,
};
use crate::numerics::{ComplexSum, Quadrature, QuadratureRule, Residual, TruncationPolicy};
use crate::schrodinger::{cis, random as srand, schrodinger_act, PacketSum};

/// `θ_{M,α}f`: the component with Fourier coefficient `c_α = f`.
pub fn theta_transform(cosets: &CosetSystem, alpha: &IntMat, f: &PacketSum) -> Result<LatticeComponent> {
    if !cosets.is_canonical(alpha) {
        return Err(Error::InvalidArgument(format!("{alpha:?} is not a canonical coset representative")));
    }
    LatticeComponent::new(cosets.level(), alpha.clone(), f.clone())
}

/// `(2M)⁻¹α` in floating point.
pub fn intertwining_shift(level: &Level, alpha: &IntMat) -> Result<RealMat> {
    let tinv = rational_inverse(&level.t().to_rational())?;
    Ok(tinv.checked_mul(&alpha.to_rational())?.to_f64())
}

/// `θ̃_{M,α}f = θ_{M,α}(f(· + (2M)⁻¹α))`.
pub fn corrected_theta_transform(cosets: &CosetSystem, alpha: &IntMat, f: &PacketSum) -> Result<LatticeComponent> {
    let a = intertwining_shift(cosets.level(), alpha)?;
    theta_transform(cosets, alpha, &f.translate(&a))
}

/// `e^{2πiσ(αᵗμ₀)}`, the factor by which the literal operator fails to
/// intertwine.
pub fn alpha_character(alpha: &IntMat, g0: &GroupElement<f64>) -> Complex64 {
    let a = alpha.to_rational().to_f64();
    cis(a.frobenius_dot(g0.mu()))
}

/// `|‖θ_{M,α}f‖² - ‖f‖²| / ‖f‖²`, the left norm by `I_λ`-quadrature of the
/// periodization `Σ_N |c_α(λ+N)|²`, the right one in closed form. The
/// bound is the truncation tail plus the half-rule quadrature estimate.
pub fn isometry_residual(
    component: &LatticeComponent,
    rule: &QuadratureRule,
    trunc: &TruncationPolicy,
) -> Result<Residual> {
    let c = component.coeff();
    let exact = c.norm_sq()?;
    if !(exact > 0.0) {
        return Err(Error::InvalidArgument("isometry check needs f != 0".into()));
    }
    let fine = periodized_norm_sq(c, rule, trunc)?;
    let coarse = periodized_norm_sq(c, &rule.halved(), trunc)?;
    let q_err = (fine.value - coarse.value).norm();
    Ok(Residual::new((fine.value.re - exact).abs() / exact, (fine.error_estimate + q_err) / exact))
}

/// Which operator the intertwining check is run on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntertwinerVariant {
    /// `θ̃_{M,α}`; intertwines exactly.
    Corrected,
    /// `θ_{M,α}` compared against `π_M(g₀)` directly.
    Literal,
    /// `θ_{M,α}` with the character `χ_α(g₀)` restored on the left.
    LiteralUpToCharacter,
}

/// `max_s |θ(U_{g₀}(σ_M)f)(s) - (π_M(g₀)θf)(s)|`. The left side goes through
/// the Schrödinger action and the series evaluator, the right side through
/// right translation on `G`.
pub fn intertwining_residual(
    cosets: &CosetSystem,
    alpha: &IntMat,
    f: &PacketSum,
    g0: &GroupElement<f64>,
    samples: &[SquareElement<f64>],
    variant: IntertwinerVariant,
    trunc: &TruncationPolicy,
) -> Result<Residual> {
    let level = cosets.level();
    let gate = char_is_valid_for_pi_m(level, cosets.g());
    if !gate.valid {
        return Err(Error::GateFailure(format!("level {:?} fails the character gate", level.t_rows())));
    }
    let m = level.m_f64();
    let build = |f: &PacketSum| match variant {
        IntertwinerVariant::Corrected => corrected_theta_transform(cosets, alpha, f),
        _ => theta_transform(cosets, alpha, f),
    };
    let factor = match variant {
        IntertwinerVariant::LiteralUpToCharacter => alpha_character(alpha, g0),
        _ => Complex64::new(1.0, 0.0),
    };
    let moved = LatticeElement::single(level.clone(), build(&schrodinger_act(&m, g0, f)?)?)?;
    let phi = LatticeElement::single(level.clone(), build(f)?)?;
    let mut out = Residual::default();
    for s in samples {
        let lhs = moved.eval(s, trunc)?;
        let rhs = act_pi(&phi, g0, s, trunc)?;
        out = out.max(Residual::new((factor * lhs.value - rhs.value).norm(), lhs.tail + rhs.tail));
    }
    Ok(out)
}

/// `⟨φ₁, φ₂⟩ = ∫_{I_λ × I_μ} φ₁ conj(φ₂)` at `κ = 0`; see [`gram_matrix`].
pub fn inner_product<F1: LatticeFunction, F2: LatticeFunction>(
    phi1: &F1,
    phi2: &F2,
    lambda_rule: &QuadratureRule,
    trunc: &TruncationPolicy,
) -> Result<Quadrature> {
    Ok(gram_matrix(&[phi1, phi2], lambda_rule, trunc)?[0][1])
}

/// All inner products `⟨φ_i, φ_j⟩` from one pass over a shared grid,
/// Gauss–Legendre in `λ` and the periodic rule in `μ`. The periodic rule is
/// sized from the frequencies actually retained so that it integrates every
/// product of exponentials exactly; the error estimate is the truncation tail
/// times the sup of the other factor plus the `λ` half-rule difference.
///
/// At each `λ` node the Fourier terms are computed once and the `μ` nodes
/// `(k + 1/2)/p` are evaluated from a table of `2p`-th roots of unity.
pub fn gram_matrix(
    phis: &[&dyn LatticeFunction],
    lambda_rule: &QuadratureRule,
    trunc: &TruncationPolicy,
) -> Result<Vec<Vec<Quadrature>>> {
    let k = phis.len();
    let Some(first) = phis.first() else {
        return Ok(Vec::new());
    };
    let d = first.dim();
    if let Some(other) = phis.iter().find(|p| p.dim() != d) {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", d, other.dim())));
    }
    let n = d.n();
    // row-major node of a tensor grid, last axis fastest
    let node = |rule: &QuadratureRule, mut idx: usize, x: &mut [f64]| -> f64 {
        let mut w = 1.0;
        for axis in (0..x.len()).rev() {
            let i = idx % rule.points();
            idx /= rule.points();
            x[axis] = rule.nodes()[i];
            w *= rule.weights()[i];
        }
        w
    };
    let terms_at = |rule: &QuadratureRule, li: usize| -> Result<(f64, Vec<FourierTerms>)> {
        let mut lam = vec![0.0; n];
        let w = node(rule, li, &mut lam);
        let l = RealMat::from_vec(d.h, d.g, lam).expect("shape");
        Ok((w, phis.iter().map(|p| p.fourier_terms(&l, trunc)).collect::<Result<_>>()?))
    };
    let coarse_rule = lambda_rule.halved();
    // frequencies depend on λ only through the truncation box
    let mut reach = 0;
    for rule in [lambda_rule, &coarse_rule] {
        for li in 0..rule.points().pow(n as u32) {
            for t in terms_at(rule, li)?.1 {
                reach = reach.max(t.max_frequency);
            }
        }
    }
    let p = 2 * reach as usize + 1;
    let periodic = QuadratureRule::periodic(p)?;
    let roots: Vec<Complex64> = (0..2 * p).map(|j| cis(j as f64 / (2 * p) as f64)).collect();
    let mu_total = p.pow(n as u32);
    let wmu = periodic.weights()[0].powi(n as i32);

    let integrate = |rule: &QuadratureRule| -> Result<(Vec<Complex64>, Vec<f64>)> {
        let per_node: Vec<Result<(Vec<Complex64>, Vec<f64>)>> = (0..rule.points().pow(n as u32))
            .into_par_iter()
            .map(|li| {
                let (wl, terms) = terms_at(rule, li)?;
                let w = wl * wmu;
                let mut sums = vec![ComplexSum::default(); k * k];
                let mut sup = vec![0.0f64; k];
                let mut odd = vec![0usize; n];
                let mut vals = vec![Complex64::new(0.0, 0.0); k];
                for mi in 0..mu_total {
                    let mut r = mi;
                    for axis in (0..n).rev() {
                        odd[axis] = 2 * (r % p) + 1;
                        r /= p;
                    }
                    for (v, t) in vals.iter_mut().zip(&terms) {
                        let mut acc = ComplexSum::default();
                        for (freq, c) in &t.terms {
                            let e: i64 = freq.iter().zip(&odd).map(|(f, o)| f * *o as i64).sum();
                            acc.add(c * roots[e.rem_euclid(2 * p as i64) as usize]);
                        }
                        *v = acc.value();
                    }
                    for i in 0..k {
                        sup[i] = sup[i].max(vals[i].norm());
                        for j in 0..k {
                            sums[i * k + j].add(vals[i] * vals[j].conj() * w);
                        }
                    }
                }
                let mut tails = vec![0.0f64; k * k];
                for i in 0..k {
                    for j in 0..k {
                        let (a, b) = (terms[i].tail, terms[j].tail);
                        tails[i * k + j] = a * (sup[j] + b) + b * sup[i];
                    }
                }
                Ok((sums.iter().map(|s| s.value()).collect(), tails))
            })
            .collect();
        let mut sums = vec![ComplexSum::default(); k * k];
        let mut tails = vec![0.0f64; k * k];
        for r in per_node {
            let (v, t) = r?;
            for idx in 0..k * k {
                sums[idx].add(v[idx]);
                tails[idx] = tails[idx].max(t[idx]);
            }
        }
        Ok((sums.iter().map(|s| s.value()).collect(), tails))
    };
    let (fine, tails) = integrate(lambda_rule)?;
    let (coarse, _) = integrate(&coarse_rule)?;
    Ok((0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let idx = i * k + j;
                    Quadrature { value: fine[idx], error_estimate: tails[idx] + (fine[idx] - coarse[idx]).norm() }
                })
                .collect()
        })
        .collect())
}

/// Tolerances and sizes for [`decompose_and_verify`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionOptions {
    pub seed: u64,
    /// Threshold for isometry, intertwining and orthogonality residuals.
    pub tol: f64,
    /// Threshold for certified truncation tails.
    pub tail_tol: f64,
    /// Gauss–Legendre points per `λ` axis.
    pub quad: usize,
    pub trunc: TruncationPolicy,
    pub group_elements: usize,
    pub samples: usize,
    /// Gaussian packets per test vector.
    pub packets: usize,
}

impl Default for DecompositionOptions {
    fn default() -> Self {
        DecompositionOptions {
            seed: 0,
            tol: 1e-6,
            tail_tol: 1e-8,
            quad: 32,
            trunc: TruncationPolicy::default(),
            group_elements: 50,
            samples: 10,
            packets: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub alpha: Vec<Vec<i64>>,
    pub isometry: Residual,
    /// Corrected operator against the right-translation route.
    pub intertwining: Residual,
    /// Literal operator with the `χ_α` factor restored.
    pub intertwining_up_to_character: Residual,
    /// Literal operator without the factor; nonzero whenever `α ≠ 0`.
    pub literal_defect: f64,
    /// Largest `|⟨θ̃_α f_α, θ̃_β f_β⟩|` over `β ≠ α`.
    pub orthogonality: Residual,
    /// `|⟨θ̃_α f_α, θ̃_α f_α⟩ - ‖f_α‖²|`.
    pub self_inner: Residual,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub g: usize,
    pub h: usize,
    pub t: Vec<Vec<i64>>,
    pub multiplicity: u64,
    pub expected_multiplicity: u64,
    pub components: Vec<ComponentRecord>,
    pub options: DecompositionOptions,
    pub passed: bool,
}

impl DecompositionReport {
    pub fn check_passed(&self) -> bool {
        let opts = &self.options;
        let ok = |r: &Residual| r.value <= opts.tol;
        self.multiplicity == self.expected_multiplicity
            && self.components.iter().all(|c| {
                ok(&c.isometry)
                    && ok(&c.intertwining)
                    && c.intertwining.bound <= opts.tail_tol
                    && ok(&c.intertwining_up_to_character)
                    && ok(&c.orthogonality)
                    && ok(&c.self_inner)
            })
    }
}

fn alpha_rows(a: &IntMat) -> Vec<Vec<i64>> {
    let m = a.to_i64().expect("small representative");
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect()).collect()
}

/// Enumerates the coset system, builds one seeded test vector per
/// component and runs the isometry, intertwining and orthogonality checks.
pub fn decompose_and_verify(g: usize, level: &Level, opts: &DecompositionOptions) -> Result<DecompositionReport> {
    let dim = Dim::new(g, level.h())?;
    let gate = char_is_valid_for_pi_m(level, g);
    if !gate.valid {
        return Err(Error::GateFailure(format!(
            "sigma(M mu0 ᵗlambda0) = {} for the witness",
            gate.offending_value.expect("witness")
        )));
    }
    let cosets = coset_reps(level, g)?;
    let expected: u64 =
        cosets.expected_count()?.try_into().map_err(|_| Error::InvalidArgument("count overflow".into()))?;
    let rule = QuadratureRule::gauss_legendre(opts.quad)?;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let vectors: Vec<PacketSum> =
        cosets.reps().iter().map(|_| srand::packet_sum(&mut rng, dim, opts.packets)).collect();
    let elements: Vec<GroupElement<f64>> =
        (0..opts.group_elements).map(|_| grand::element_f64(&mut rng, dim, 1.0)).collect();
    let samples: Vec<SquareElement<f64>> =
        (0..opts.samples).map(|_| grand::element_f64(&mut rng, dim, 1.0).to_square()).collect();

    let images: Vec<LatticeElement> = cosets
        .reps()
        .iter()
        .zip(&vectors)
        .map(|(a, f)| LatticeElement::single(level.clone(), corrected_theta_transform(&cosets, a, f)?))
        .collect::<Result<_>>()?;

    let refs: Vec<&dyn LatticeFunction> = images.iter().map(|p| p as &dyn LatticeFunction).collect();
    let gram = gram_matrix(&refs, &rule, &opts.trunc)?;

    let records: Vec<Result<ComponentRecord>> = cosets
        .reps()
        .par_iter()
        .enumerate()
        .map(|(i, alpha)| {
            let f = &vectors[i];
            let isometry = isometry_residual(&images[i].components()[0], &rule, &opts.trunc)?;
            let mut intertwining = Residual::default();
            let mut up_to = Residual::default();
            let mut literal: f64 = 0.0;
            for g0 in &elements {
                let run = |v| intertwining_residual(&cosets, alpha, f, g0, &samples, v, &opts.trunc);
                intertwining = intertwining.max(run(IntertwinerVariant::Corrected)?);
                up_to = up_to.max(run(IntertwinerVariant::LiteralUpToCharacter)?);
                literal = literal.max(run(IntertwinerVariant::Literal)?.value);
            }
            let norm = f.norm_sq()?;
            let mut orthogonality = Residual::default();
            for (j, q) in gram[i].iter().enumerate() {
                if j != i {
                    orthogonality = orthogonality.max(Residual::new(q.value.norm(), q.error_estimate));
                }
            }
            let q = gram[i][i];
            Ok(ComponentRecord {
                alpha: alpha_rows(alpha),
                isometry,
                intertwining,
                intertwining_up_to_character: up_to,
                literal_defect: literal,
                orthogonality,
                self_inner: Residual::new((q.value - norm).norm() / norm, q.error_estimate / norm),
            })
        })
        .collect();
    let components = records.into_iter().collect::<Result<Vec<_>>>()?;
    let mut report = DecompositionReport {
        g,
        h: level.h(),
        t: level.t_rows(),
        multiplicity: cosets.len() as u64,
        expected_multiplicity: expected,
        components,
        options: opts.clone(),
        passed: false,
    };
    report.passed = report.check_passed();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::fourier_extract;
    use rand::Rng;

    fn lv(rows: &[&[i64]]) -> Level {
        Level::from_i64(rows).unwrap()
    }

    fn im(rows: &[&[i64]]) -> IntMat {
        IntMat::from_i64(rows).unwrap()
    }

    fn trunc() -> TruncationPolicy {
        TruncationPolicy::new(1e-13, 12).unwrap()
    }

    fn samples<R: Rng>(rng: &mut R, d: Dim, n: usize) -> Vec<SquareElement<f64>> {
        (0..n).map(|_| grand::element_f64(rng, d, 1.0).to_square()).collect()
    }

    #[test]
    fn theta_rejects_noncanonical_and_maps_zero() {
        let cs = coset_reps(&lv(&[&[2]]), 1).unwrap();
        let d = Dim::new(1, 1).unwrap();
        assert!(theta_transform(&cs, &im(&[&[2]]), &PacketSum::standard(d)).is_err());
        let z = LatticeElement::single(
            cs.level().clone(),
            theta_transform(&cs, &im(&[&[1]]), &PacketSum::zero(d)).unwrap(),
        )
        .unwrap();
        let s = SquareElement::identity(d);
        assert_eq!(z.eval(&s, &trunc()).unwrap().value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn theta_at_mu_zero_is_periodization() {
        let cs = coset_reps(&lv(&[&[2]]), 1).unwrap();
        let d = Dim::new(1, 1).unwrap();
        let f = PacketSum::standard(d);
        let phi = LatticeElement::single(cs.level().clone(), theta_transform(&cs, &im(&[&[1]]), &f).unwrap()).unwrap();
        for lam in [0.0, 0.3, 0.77] {
            let s = SquareElement::new(
                RealMat::from_vec(1, 1, vec![lam]).unwrap(),
                RealMat::zeros(1, 1),
                RealMat::zeros(1, 1),
            )
            .unwrap();
            let brute: Complex64 = (-40..=40).map(|k| f.eval(&[lam + k as f64])).sum();
            assert!((phi.eval(&s, &trunc()).unwrap().value - brute).norm() < 1e-10);
        }
    }

    #[test]
    fn standard_gaussian_isometry() {
        let cs = coset_reps(&lv(&[&[2]]), 1).unwrap();
        let d = Dim::new(1, 1).unwrap();
        let f = PacketSum::standard(d);
        let rule = QuadratureRule::gauss_legendre(32).unwrap();
        let c = theta_transform(&cs, &im(&[&[0]]), &f).unwrap();
        assert!((f.norm_sq().unwrap() - 0.5f64.sqrt()).abs() < 1e-14);
        let r = isometry_residual(&c, &rule, &trunc()).unwrap();
        assert!(r.value < 1e-6);
        let c2 = theta_transform(&cs, &im(&[&[0]]), &f.scale(Complex64::new(2.0, 0.0))).unwrap();
        assert!((isometry_residual(&c2, &rule, &trunc()).unwrap().value - r.value).abs() < 1e-12);
    }

    #[test]
    fn intertwining_variants() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cs = coset_reps(&lv(&[&[2]]), 1).unwrap();
        let d = Dim::new(1, 1).unwrap();
        let f = srand::packet_sum(&mut rng, d, 2);
        let ss = samples(&mut rng, d, 5);
        let alpha = im(&[&[1]]);
        let id = GroupElement::identity(d);
        let r = intertwining_residual(&cs, &alpha, &f, &id, &ss, IntertwinerVariant::Literal, &trunc()).unwrap();
        assert!(r.value < 1e-12);
        let central = GroupElement::central(1, RealMat::from_vec(1, 1, vec![0.37]).unwrap()).unwrap();
        let r = intertwining_residual(&cs, &alpha, &f, &central, &ss, IntertwinerVariant::Literal, &trunc()).unwrap();
        assert!(r.value < 1e-10);
        let mut literal: f64 = 0.0;
        for _ in 0..10 {
            let g0 = grand::element_f64(&mut rng, d, 1.0);
            for v in [IntertwinerVariant::Corrected, IntertwinerVariant::LiteralUpToCharacter] {
                let r = intertwining_residual(&cs, &alpha, &f, &g0, &ss, v, &trunc()).unwrap();
                assert!(r.value < 1e-9, "{v:?}: {}", r.value);
                assert!(r.bound < 1e-8);
            }
            literal = literal.max(
                intertwining_residual(&cs, &alpha, &f, &g0, &ss, IntertwinerVariant::Literal, &trunc()).unwrap().value,
            );
        }
        assert!(literal > 1e-3);
    }

    #[test]
    fn intertwining_higher_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for (t, g) in [(vec![vec![4, 2], vec![2, 2]], 1), (vec![vec![2]], 2)] {
            let rows: Vec<&[i64]> = t.iter().map(|r| r.as_slice()).collect();
            let cs = coset_reps(&lv(&rows), g).unwrap();
            let d = Dim::new(g, cs.level().h()).unwrap();
            let f = srand::packet_sum(&mut rng, d, 1);
            let ss = samples(&mut rng, d, 3);
            for alpha in cs.reps() {
                let g0 = grand::element_f64(&mut rng, d, 1.0);
                let r =
                    intertwining_residual(&cs, alpha, &f, &g0, &ss, IntertwinerVariant::Corrected, &trunc()).unwrap();
                assert!(r.value < 1e-9, "{alpha:?}: {}", r.value);
            }
        }
    }

    #[test]
    fn gate_blocks_intertwining() {
        let cs = coset_reps(&lv(&[&[3]]), 1).unwrap();
        let d = Dim::new(1, 1).unwrap();
        let id = GroupElement::identity(d);
        let r = intertwining_residual(
            &cs,
            &im(&[&[0]]),
            &PacketSum::standard(d),
            &id,
            &[],
            IntertwinerVariant::Corrected,
            &trunc(),
        );
        assert!(matches!(r, Err(Error::GateFailure(_))));
        assert!(matches!(
            decompose_and_verify(1, cs.level(), &DecompositionOptions::default()),
            Err(Error::GateFailure(_))
        ));
    }

    #[test]
    fn roundtrip_and_orthogonality() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let cs = coset_reps(&lv(&[&[4]]), 1).unwrap();
        let d = Dim::new(1, 1).unwrap();
        let f = srand::packet_sum(&mut rng, d, 1);
        let k = srand::packet_sum(&mut rng, d, 1);
        let a = LatticeElement::single(cs.level().clone(), theta_transform(&cs, &im(&[&[1]]), &f).unwrap()).unwrap();
        let b = LatticeElement::single(cs.level().clone(), theta_transform(&cs, &im(&[&[3]]), &k).unwrap()).unwrap();
        let rule = QuadratureRule::gauss_legendre(24).unwrap();
        assert!(inner_product(&a, &b, &rule, &trunc()).unwrap().value.norm() < 1e-10);
        let q = inner_product(&a, &a, &rule, &trunc()).unwrap();
        assert!((q.value - f.norm_sq().unwrap()).norm() < 1e-8);
        let zero = LatticeElement::single(
            cs.level().clone(),
            theta_transform(&cs, &im(&[&[3]]), &PacketSum::zero(d)).unwrap(),
        )
        .unwrap();
        assert_eq!(inner_product(&a, &zero, &rule, &trunc()).unwrap().value.norm(), 0.0);

        let per = QuadratureRule::periodic(48).unwrap();
        let kap = RealMat::zeros(1, 1);
        for lam in [0.1, 0.5, 0.9] {
            let l = RealMat::from_vec(1, 1, vec![lam]).unwrap();
            let v = fourier_extract(&a, &im(&[&[1]]), &l, &kap, &per, &trunc()).unwrap();
            assert!((v.value - f.eval(&[lam])).norm() < 1e-10);
            let w = fourier_extract(&a, &im(&[&[2]]), &l, &kap, &per, &trunc()).unwrap();
            assert!(w.value.norm() < 1e-10);
        }
    }

    #[test]
    fn small_decomposition_passes() {
        let opts = DecompositionOptions { group_elements: 5, samples: 3, quad: 24, ..Default::default() };
        let r = decompose_and_verify(1, &lv(&[&[2]]), &opts).unwrap();
        assert_eq!(r.multiplicity, 2);
        assert!(r.passed, "{r:#?}");
        assert!(r.components[1].literal_defect > 1e-3);
    }
}
