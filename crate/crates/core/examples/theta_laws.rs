//! A Poincaré series over the lattice subgroup and the transformation laws
//! of the functions and theta series built from it.

use hrep::exact::Level;
use hrep::theta::{verify_theta_suite, ThetaOptions};

fn main() -> hrep::Result<()> {
    let opts = ThetaOptions { membership_probes: 10, law_probes: 8, ..Default::default() };
    for rows in [&[&[1i64][..]][..], &[&[2]], &[&[2, 1], &[1, 2]]] {
        let level = Level::from_i64(rows)?;
        let r = verify_theta_suite(1, &level, &opts)?;
        println!("T = {:?}", r.t);
        println!("  membership {:.1e}", r.membership.value);
        println!(
            "  laws: E {:.1e}  F {:.1e}  F_Omega {:.1e}  theta {:.1e}",
            r.laws.e_law.value, r.laws.f_law.value, r.laws.f_omega_law.value, r.laws.theta_law.value
        );
        println!("  F against the E law (should fail): {:.1e}", r.laws.bold_h_on_f.value);
        let radii: Vec<String> = r.radius_study.iter().map(|x| format!("{x:.0e}")).collect();
        println!("  worst law defect by box radius: {}", radii.join(" "));
        println!("  ∫|F|² = {:.6} ± {:.0e}", r.norm_sq, r.norm_error);
    }
    Ok(())
}
