//! Lefschetz numbers L1 (K0-valued spectral data) and L0 (HC0-valued traces) of a
//! unitary chain map, the Chern identity between them, and the flat Lefschetz number.

use wstar::cli::generate::{generate, Profile};
use wstar::complex::{chern_check_of, lefschetz, ChernWeighting, ComplexEndomorphism};
use wstar::oracle::oracle_lefschetz;
use wstar::{BlockAlgebra, HilbertModule};

fn main() -> wstar::Result<()> {
    let inst = generate(2, Profile::Small);
    let c = &inst.complexes["c"];
    let (_, u) = &inst.endomorphisms["U"];
    let data = lefschetz(c, u)?;
    println!("harmonic classes: {:?}", data.harmonic.ranks().iter().map(ToString::to_string).collect::<Vec<_>>());
    for (angle, class) in data.l1.support() {
        println!("  L1({angle:.6}) = {class}");
    }
    println!("L0 = {}", data.l0);
    for w in [ChernWeighting::Weighted, ChernWeighting::Unweighted] {
        let check = chern_check_of(&data, w);
        println!("{w:?} integral of ch L1: {} -> {}", check.rhs, if check.equal { "PASS" } else { "FAIL" });
    }
    println!("flat Lefschetz number {:.6}", oracle_lefschetz(c, u));

    // identity: L1 is the index concentrated at angle 0
    let a = BlockAlgebra::new(vec![1, 2])?;
    let spaces = vec![HilbertModule::free(&a, 2), HilbertModule::free(&a, 1)];
    let z = wstar::FiniteComplex::with_zero_differentials(spaces)?;
    let id = lefschetz(&z, &ComplexEndomorphism::identity(&z))?;
    let (angle, class) = &id.l1.support()[0];
    println!("identity on a zero-differential complex: L1({angle}) = {class}, L0 = {}", id.l0);
    Ok(())
}
