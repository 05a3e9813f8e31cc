//! Frobenius normal form of an alternating integer form, its Pfaffian and
//! the index of the lattice in its dual.

use hrep::forms::{
    dual_index_by_enumeration, dual_index_by_smith, frobenius_normal_form, pfaffian_and_dual_index, AltForm,
};

fn main() -> hrep::Result<()> {
    let form = AltForm::from_i64(&[&[0, 2, 4, 0], &[-2, 0, 6, 2], &[-4, -6, 0, 8], &[0, -2, -8, 0]])?;
    let data = frobenius_normal_form(&form)?;
    let e: Vec<String> = data.e.iter().map(|x| x.to_string()).collect();
    println!("elementary divisors: {}", e.join(", "));
    println!("ᵗP B P is the block form: {}", &(&data.p.transpose() * form.matrix()) * &data.p == data.normal_form());

    let pi = pfaffian_and_dual_index(&form)?;
    println!("Pfaffian {}, [L* : L] = {}", pi.pfaffian, pi.index);
    println!("by Smith normal form: {}", dual_index_by_smith(&form)?);
    println!("by enumeration:       {}", dual_index_by_enumeration(&form)?);
    Ok(())
}
