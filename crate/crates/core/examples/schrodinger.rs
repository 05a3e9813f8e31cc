//! The Schrödinger representation on Gaussian packets: closed-form norms,
//! unitarity and the homomorphism property.

use hrep::exact::Level;
use hrep::group::{random as grand, Dim};
use hrep::schrodinger::{quadrature_norm_sq, random as srand, schrodinger_act, PacketSum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hrep::Result<()> {
    let dim = Dim::new(1, 1)?;
    let m = Level::from_i64(&[&[2]])?.m_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(3);

    let gauss = PacketSum::standard(dim);
    println!(
        "‖e^(-π x²)‖²: closed form {:.15}, quadrature {:.15}, 2^(-1/2) = {:.15}",
        gauss.norm_sq()?,
        quadrature_norm_sq(&gauss, 7.0, 28, 10),
        0.5f64.sqrt()
    );

    let f = srand::packet_sum(&mut rng, dim, 3);
    let g0 = grand::element_f64(&mut rng, dim, 1.0);
    let g1 = grand::element_f64(&mut rng, dim, 1.0);
    let uf = schrodinger_act(&m, &g0, &f)?;
    println!("‖f‖² = {:.15}, ‖U(g0) f‖² = {:.15}", f.norm_sq()?, uf.norm_sq()?);

    let lhs = schrodinger_act(&m, &g0.compose(&g1)?, &f)?;
    let rhs = schrodinger_act(&m, &g0, &schrodinger_act(&m, &g1, &f)?)?;
    for x in [-0.7, 0.0, 0.45, 1.3] {
        println!("x = {x:5.2}: |U(g0 g1) f - U(g0) U(g1) f| = {:.2e}", (lhs.eval(&[x]) - rhs.eval(&[x])).norm());
    }
    Ok(())
}
