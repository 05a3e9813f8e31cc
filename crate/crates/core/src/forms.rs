//! Integral alternating forms on `L = Z^{2m}`: Frobenius normal form,
//! elementary divisors, Pfaffian and the index of `L` in its dual.
//!
//! The reduction is the symplectic analogue of Smith reduction. At every
//! stage the pivot is the nonzero entry of least absolute value in the
//! unreduced block (ties broken lexicographically by `(row, col)`), so the
//! output is a deterministic function of the input.

use num::bigint::BigInt;
use num::integer::Integer;
use num::traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{det_int, smith_normal_form, IntMat, Mat};

#[derive(Clone, Debug, PartialEq)]
pub struct AltForm {
    b: IntMat,
}

impl AltForm {
    pub fn new(b: IntMat) -> Result<Self> {
        if !b.is_square() {
            return Err(Error::NotSquare { rows: b.rows(), cols: b.cols() });
        }
        let n = b.rows();
        if n == 0 || n % 2 == 1 {
            return Err(Error::InvalidArgument(format!("alternating form needs even positive size, got {n}")));
        }
        for i in 0..n {
            for j in 0..n {
                if b[(i, j)] != -b[(j, i)].clone() {
                    return Err(Error::NotAlternating);
                }
            }
        }
        Ok(AltForm { b })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::new(IntMat::from_i64(rows)?)
    }

    /// `[[0, E_m], [-E_m, 0]]`.
    pub fn standard(m: usize) -> Self {
        AltForm { b: block_form(&vec![BigInt::one(); m]) }
    }

    pub fn matrix(&self) -> &IntMat {
        &self.b
    }

    pub fn m(&self) -> usize {
        self.b.rows() / 2
    }

    /// Orthogonal sum of two forms, the `ξ`-coordinates of both first.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (m1, m2) = (self.m(), other.m());
        let m = m1 + m2;
        // position of coordinate k of each summand in the combined basis
        let place = |k: usize, mi: usize, offset: usize| if k < mi { offset + k } else { m + offset + k - mi };
        let mut b = IntMat::zeros(2 * m, 2 * m);
        for i in 0..2 * m1 {
            for j in 0..2 * m1 {
                b[(place(i, m1, 0), place(j, m1, 0))] = self.b[(i, j)].clone();
            }
        }
        for i in 0..2 * m2 {
            for j in 0..2 * m2 {
                b[(place(i, m2, m1), place(j, m2, m1))] = other.b[(i, j)].clone();
            }
        }
        AltForm { b }
    }
}

/// `[[0, diag(e)], [-diag(e), 0]]`.
pub fn block_form(e: &[BigInt]) -> IntMat {
    let m = e.len();
    Mat::from_fn(2 * m, 2 * m, |i, j| {
        if j == i + m {
            e[i].clone()
        } else if i == j + m {
            -e[j].clone()
        } else {
            BigInt::zero()
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrobeniusData {
    /// Columns are the new basis `ξ₁..ξ_m, η₁..η_m`.
    pub p: IntMat,
    pub e: Vec<BigInt>,
}

impl FrobeniusData {
    pub fn normal_form(&self) -> IntMat {
        block_form(&self.e)
    }
}

/// Working state: the Gram matrix `ᵗPBP` kept in sync with the basis `P`.
struct Reducer {
    g: IntMat,
    p: IntMat,
}

impl Reducer {
    /// `v_j ← v_j + c v_i`.
    fn add(&mut self, j: usize, i: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let n = self.g.rows();
        for r in 0..n {
            let v = self.p[(r, i)].clone() * c;
            self.p[(r, j)] += v;
            let v = self.g[(r, i)].clone() * c;
            self.g[(r, j)] += v;
        }
        for col in 0..n {
            let v = self.g[(i, col)].clone() * c;
            self.g[(j, col)] += v;
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        let n = self.g.rows();
        for r in 0..n {
            let t = self.p[(r, i)].clone();
            self.p[(r, i)] = self.p[(r, j)].clone();
            self.p[(r, j)] = t;
            let t = self.g[(r, i)].clone();
            self.g[(r, i)] = self.g[(r, j)].clone();
            self.g[(r, j)] = t;
        }
        for c in 0..n {
            let t = self.g[(i, c)].clone();
            self.g[(i, c)] = self.g[(j, c)].clone();
            self.g[(j, c)] = t;
        }
    }

    fn min_entry(&self, live: &[usize]) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for (a, &i) in live.iter().enumerate() {
            for &j in &live[a + 1..] {
                let v = &self.g[(i, j)];
                if v.is_zero() {
                    continue;
                }
                if best.is_none_or(|(x, y)| v.abs() < self.g[(x, y)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        best
    }
}

/// Basis change `P` and divisors `e₁ | e₂ | … | e_m` with
/// `ᵗPBP = [[0, diag(e)], [-diag(e), 0]]`.
///
/// Stage `k` works on the positions `k..m` and `m+k..2m` and places its
/// pivot pair at `(k, m+k)`.
pub fn frobenius_normal_form(form: &AltForm) -> Result<FrobeniusData> {
    let n = form.b.rows();
    let m = n / 2;
    let mut st = Reducer { g: form.b.clone(), p: IntMat::identity(n) };
    let mut divisors = Vec::with_capacity(m);
    for k in 0..m {
        let (p, q) = (k, m + k);
        let live: Vec<usize> = (k..m).chain(m + k..n).collect();
        let rest: Vec<usize> = live.iter().copied().filter(|&r| r != p && r != q).collect();
        loop {
            let (i, j) = st.min_entry(&live).ok_or(Error::Singular)?;
            // `j > i >= p`, so moving `i` to `p` leaves `j` in place
            st.swap(p, i);
            st.swap(q, j);
            if st.g[(p, q)].is_negative() {
                st.swap(p, q);
            }
            let d = st.g[(p, q)].clone();
            let mut clean = true;
            for &r in &rest {
                // v_r ← v_r + a v_p + b v_q kills the multiples of d in the pivot rows
                let (bq, _) = st.g[(q, r)].div_mod_floor(&d);
                st.add(r, p, &bq);
                let (bp, _) = st.g[(p, r)].div_mod_floor(&d);
                st.add(r, q, &-bp);
                clean &= st.g[(p, r)].is_zero() && st.g[(q, r)].is_zero();
            }
            if !clean {
                continue;
            }
            // d must divide the rest of the form; otherwise fold an offending
            // vector into v_p, which creates a smaller entry in row p
            let bad = rest
                .iter()
                .flat_map(|&r| rest.iter().map(move |&s| (r, s)))
                .find(|&(r, s)| !st.g[(r, s)].is_multiple_of(&d));
            match bad {
                Some((r, _)) => st.add(p, r, &BigInt::one()),
                None => {
                    divisors.push(d);
                    break;
                }
            }
        }
    }
    let data = FrobeniusData { p: st.p, e: divisors };
    debug_assert_eq!(&(&data.p.transpose() * &form.b) * &data.p, data.normal_form());
    Ok(data)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PfaffianIndex {
    pub pfaffian: BigInt,
    pub index: BigInt,
}

/// `pf = Π eᵢ` and `[L* : L] = pf²`, cross-checked against `det B = pf²`.
pub fn pfaffian_and_dual_index(form: &AltForm) -> Result<PfaffianIndex> {
    let data = frobenius_normal_form(form)?;
    let pf: BigInt = data.e.iter().product();
    let index = &pf * &pf;
    let det = det_int(&form.b)?;
    if det != index {
        return Err(Error::InvariantViolation(format!("det B = {det} but pf^2 = {index}")));
    }
    Ok(PfaffianIndex { pfaffian: pf, index })
}

pub fn is_self_dual(form: &AltForm) -> Result<bool> {
    Ok(pfaffian_and_dual_index(form)?.index.is_one())
}

/// `[L* : L]` as the product of the Smith invariants of `B`, since
/// `L* = B⁻¹Z^{2m}`.
pub fn dual_index_by_smith(form: &AltForm) -> Result<BigInt> {
    Ok(smith_normal_form(&form.b)?.invariant_factors().iter().map(|d| d.abs()).product())
}

/// `[L* : L]` by listing the points `k / det B` of `[0,1)^{2m}` with
/// `B(k / det B)` integral. Exponential in `2m`; for small forms only.
pub fn dual_index_by_enumeration(form: &AltForm) -> Result<u64> {
    let b = form.b.to_i64().ok_or(Error::InvalidArgument("entries exceed i64".into()))?;
    let det = det_int(&form.b)?;
    let det: i64 = i64::try_from(det.abs()).map_err(|_| Error::InvalidArgument("determinant too large".into()))?;
    if det == 0 {
        return Err(Error::Singular);
    }
    let n = b.rows();
    let total = (det as u64)
        .checked_pow(n as u32)
        .filter(|&t| t <= 50_000_000)
        .ok_or(Error::InvalidArgument(format!("enumeration of {det}^{n} points refused")))?;
    let mut count = 0;
    let mut k = vec![0i64; n];
    for _ in 0..total {
        if (0..n).all(|i| (0..n).map(|j| b[(i, j)] * k[j]).sum::<i64>() % det == 0) {
            count += 1;
        }
        for slot in k.iter_mut().rev() {
            *slot += 1;
            if *slot < det {
                break;
            }
            *slot = 0;
        }
    }
    Ok(count)
}

/// Seeded random nonsingular alternating forms.
pub mod random {
    use num::traits::Zero;
    use num::BigInt;
    use rand::Rng;

    use super::AltForm;
    use crate::exact::{det_int, IntMat};

    pub fn alt_form<R: Rng>(rng: &mut R, m: usize, bound: i64) -> AltForm {
        let n = 2 * m;
        loop {
            let mut b = IntMat::zeros(n, n);
            for i in 0..n {
                for j in i + 1..n {
                    let v = BigInt::from(rng.gen_range(-bound..=bound));
                    b[(j, i)] = -v.clone();
                    b[(i, j)] = v;
                }
            }
            if !det_int(&b).expect("square").is_zero() {
                return AltForm { b };
            }
        }
    }

    /// Random unimodular matrix as a product of elementary column moves.
    pub fn unimodular<R: Rng>(rng: &mut R, n: usize, steps: usize) -> IntMat {
        let mut u = IntMat::identity(n);
        for _ in 0..steps {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            if i == j {
                continue;
            }
            let c = BigInt::from(rng.gen_range(-2..=2));
            for r in 0..n {
                let v = u[(r, i)].clone() * &c;
                u[(r, j)] += v;
            }
        }
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn check(form: &AltForm) -> FrobeniusData {
        let d = frobenius_normal_form(form).unwrap();
        assert_eq!(&(&d.p.transpose() * form.matrix()) * &d.p, d.normal_form());
        assert!(det_int(&d.p).unwrap().abs().is_one());
        assert!(d.e.windows(2).all(|w| w[1].is_multiple_of(&w[0])));
        assert!(d.e.iter().all(|x| x.is_positive()));
        d
    }

    #[test]
    fn standard_form_is_already_normal() {
        for m in 1..=3 {
            let d = check(&AltForm::standard(m));
            assert_eq!(d.e, ints(&vec![1; m]));
            assert_eq!(d.p, IntMat::identity(2 * m));
            let pi = pfaffian_and_dual_index(&AltForm::standard(m)).unwrap();
            assert_eq!((pi.pfaffian, pi.index), (BigInt::one(), BigInt::one()));
            assert!(is_self_dual(&AltForm::standard(m)).unwrap());
        }
    }

    #[test]
    fn two_by_two() {
        let f = AltForm::from_i64(&[&[0, 2], &[-2, 0]]).unwrap();
        assert_eq!(check(&f).e, ints(&[2]));
        assert!(!is_self_dual(&f).unwrap());
        assert_eq!(pfaffian_and_dual_index(&f).unwrap().index, BigInt::from(4));
        let f = AltForm::from_i64(&[&[0, -3], &[3, 0]]).unwrap();
        assert_eq!(check(&f).e, ints(&[3]));
    }

    #[test]
    fn non_chain_blocks_are_merged() {
        // diag(2, 3) blocks conjugated by a unimodular matrix: det 36, divisors (1, 6)
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let base = block_form(&ints(&[2, 3]));
        for _ in 0..10 {
            let u = random::unimodular(&mut rng, 4, 12);
            let f = AltForm::new(&(&u.transpose() * &base) * &u).unwrap();
            assert_eq!(det_int(f.matrix()).unwrap(), BigInt::from(36));
            assert_eq!(check(&f).e, ints(&[1, 6]));
        }
        let pi = pfaffian_and_dual_index(&AltForm::new(block_form(&ints(&[1, 2]))).unwrap()).unwrap();
        assert_eq!((pi.pfaffian, pi.index), (BigInt::from(2), BigInt::from(4)));
    }

    #[test]
    fn block_sums_of_standard_forms_are_self_dual() {
        let f = AltForm::standard(1).direct_sum(&AltForm::standard(2));
        assert_eq!(f, AltForm::standard(3));
        assert!(is_self_dual(&f).unwrap());
    }

    #[test]
    fn random_forms_reconstruct() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for m in 1..=4 {
            for _ in 0..25 {
                let f = random::alt_form(&mut rng, m, 4);
                check(&f);
                let pi = pfaffian_and_dual_index(&f).unwrap();
                assert_eq!(det_int(f.matrix()).unwrap(), pi.index);
                assert_eq!(dual_index_by_smith(&f).unwrap(), pi.index);
            }
        }
    }

    #[test]
    fn dual_index_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let mut tested = 0;
        while tested < 12 {
            let m = 1 + tested % 2;
            let f = random::alt_form(&mut rng, m, 2);
            let idx = pfaffian_and_dual_index(&f).unwrap().index;
            if idx > BigInt::from(if m == 1 { 400 } else { 36 }) {
                continue;
            }
            assert_eq!(BigInt::from(dual_index_by_enumeration(&f).unwrap()), idx);
            tested += 1;
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(AltForm::from_i64(&[&[0, 1], &[1, 0]]), Err(Error::NotAlternating)));
        assert!(matches!(AltForm::from_i64(&[&[1, 1], &[-1, 0]]), Err(Error::NotAlternating)));
        assert!(AltForm::from_i64(&[&[0]]).is_err());
        let singular = AltForm::from_i64(&[&[0, 0], &[0, 0]]).unwrap();
        assert!(matches!(frobenius_normal_form(&singular), Err(Error::Singular)));
    }
}
