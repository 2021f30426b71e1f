//! K0-valued Fredholm indices of module maps and of d + d* on a complex.

use wstar::cli::generate::{generate, Profile};
use wstar::complex::{fredholm_f, hodge_spaces};
use wstar::operator::fredholm_index;

fn main() -> wstar::Result<()> {
    let inst = generate(3, Profile::Medium);
    println!("algebra {}", inst.algebra);
    for (name, phi) in &inst.maps {
        println!(
            "{name:>6}: [ker] = {}, [coker] = {}, index = {}",
            phi.kernel_projection().k0(),
            phi.cokernel_projection().k0(),
            fredholm_index(phi)
        );
    }
    let c = &inst.complexes["c"];
    let f = fredholm_f(c)?;
    let h = hodge_spaces(c)?;
    println!("complex of length {}", c.len());
    println!("Ind(d + d*)          = {}", fredholm_index(&f));
    println!("Σ (-1)^m [E_m]       = {}", c.euler_characteristic());
    println!("[H_even] - [H_odd]   = {}", h.euler_class());
    Ok(())
}
