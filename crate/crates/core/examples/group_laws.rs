//! Exact arithmetic in the Heisenberg group: round and square coordinates,
//! inverses, the K⋊S factorization and the symplectic embedding.

use hrep::exact::Mat;
use hrep::group::{random, symplectic_j, Dim, GroupElement};
use num::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn show(m: &Mat<BigRational>) -> String {
    let rows: Vec<String> =
        (0..m.rows()).map(|i| (0..m.cols()).map(|j| m[(i, j)].to_string()).collect::<Vec<_>>().join(" ")).collect();
    format!("[{}]", rows.join("; "))
}

fn main() -> hrep::Result<()> {
    let dim = Dim::new(2, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = random::element(&mut rng, dim);
    let b = random::element(&mut rng, dim);

    let ab = a.compose(&b)?;
    println!("a    = ({}, {}, {})", show(a.lambda()), show(a.mu()), show(a.kappa()));
    println!("b    = ({}, {}, {})", show(b.lambda()), show(b.mu()), show(b.kappa()));
    println!("a∘b  = ({}, {}, {})", show(ab.lambda()), show(ab.mu()), show(ab.kappa()));
    println!("a∘a⁻¹ is the identity: {}", a.compose(&a.inverse())? == GroupElement::identity(dim));

    let square = a.to_square().compose(&b.to_square())?;
    println!("square product, back in round coordinates, agrees: {}", square.to_round() == ab);

    let (k, s) = a.mackey_decompose();
    println!(
        "a = k∘s with k = (0, {}, {}) and s = ({}, 0, 0): {}",
        show(k.mu()),
        show(k.kappa()),
        show(s.lambda()),
        k.compose(&s)? == a
    );

    let m = ab.embed_symplectic();
    let j = symplectic_j(dim);
    println!("embedding of a∘b is the product of embeddings: {}", m == &a.embed_symplectic() * &b.embed_symplectic());
    println!("ᵗM J M = J: {}", &(&m.transpose() * &j) * &m == j);
    Ok(())
}
