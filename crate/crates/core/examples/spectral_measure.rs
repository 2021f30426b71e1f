//! Spectral measure, K0-valued spectral function and cyclic trace of a module unitary,
//! and their invariance under module isomorphisms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wstar::algebra::k0_of_projection;
use wstar::cli::generate::{generate, random_isomorphic_copy, Profile};
use wstar::spectral::{conjugation_invariance_check, cyclic_trace_of, spectral_function_of, spectral_measure};

fn main() -> wstar::Result<()> {
    let inst = generate(5, Profile::Small);
    let u = &inst.maps["u"];
    println!("u on a module of class {} over {}", u.source().k0(), inst.algebra);

    let measure = spectral_measure(u)?;
    for p in measure.points() {
        println!("  φ = {:.6}  class {}", p.angle, k0_of_projection(p.projection.matrix())?);
    }
    println!("‖U − Σ e^(iφ) P‖ = {:.2e}", measure.reconstruction_residual(u));
    for (angle, class) in spectral_function_of(&measure)?.support() {
        println!("  s({angle:.6}) = {class}");
    }
    let trace = cyclic_trace_of(&measure);
    println!("cyclic trace T(U) = {trace}");

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (_, j) = random_isomorphic_copy(u.source(), 4, &mut rng);
    let check = conjugation_invariance_check(u, &j)?;
    println!("after conjugation by a random isomorphism: {} (equal: {})", check.trace_target, check.equal);
    Ok(())
}
