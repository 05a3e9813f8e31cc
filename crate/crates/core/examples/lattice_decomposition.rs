//! Decomposition of the lattice representation into (det 2M)^g copies of
//! the Schrödinger representation, with per-component residuals.

use hrep::exact::Level;
use hrep::intertwiner::{decompose_and_verify, DecompositionOptions};

fn main() -> hrep::Result<()> {
    let opts = DecompositionOptions { group_elements: 20, samples: 5, ..Default::default() };
    for (g, rows) in [(1, &[&[2i64][..]][..]), (1, &[&[4]]), (2, &[&[2]])] {
        let level = Level::from_i64(rows)?;
        let r = decompose_and_verify(g, &level, &opts)?;
        println!("g = {g}, T = {:?}: {} components, expected {}", r.t, r.multiplicity, r.expected_multiplicity);
        for c in &r.components {
            println!(
                "  alpha = {:?}  isometry {:.1e}  intertwining {:.1e}  uncorrected {:.1e}  orthogonality {:.1e}",
                c.alpha, c.isometry.value, c.intertwining.value, c.literal_defect, c.orthogonality.value
            );
        }
        println!("  all within tolerance: {}", r.passed);
    }
    Ok(())
}
