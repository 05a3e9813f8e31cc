//! Characters of the lattice subgroup: the q_M correction, flat twists and
//! the gate deciding whether the central character extends.

use hrep::characters::{char_is_valid_for_pi_m, cocycle_defect, random, twist_decompose, CharMq};
use hrep::exact::Level;
use hrep::group::Dim;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hrep::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let level = Level::from_i64(&[&[4, 2], &[2, 2]])?;
    let dim = Dim::new(1, 2)?;
    let canon = CharMq::canonical(level.clone(), 1);

    let mut worst = 0usize;
    for _ in 0..200 {
        let a = random::gamma_l(&mut rng, dim);
        let b = random::gamma_l(&mut rng, dim);
        let d = cocycle_defect(&level, &canon.q(), (&a.xi(), &a.eta()), (&b.xi(), &b.eta()))?;
        worst += !num::Zero::is_zero(&d) as usize;
    }
    println!("T = [[4,2],[2,2]]: q_M cocycle fails on {worst} of 200 pairs");

    let twist = random::twist(&mut rng, dim);
    let chi = CharMq::new(level.clone(), twist.clone())?;
    println!("twist recovered from chi / chi_canonical: {}", twist_decompose(&chi, &canon)? == twist);

    for rows in [&[&[2i64][..]][..], &[&[3]], &[&[2, 1], &[1, 2]]] {
        let level = Level::from_i64(rows)?;
        let gate = char_is_valid_for_pi_m(&level, 1);
        match gate.offending_value {
            None => println!("T = {:?}: central character extends", level.t_rows()),
            Some(v) => println!("T = {:?}: does not extend, sigma(M mu0 ᵗlambda0) = {v}", level.t_rows()),
        }
    }
    Ok(())
}
