//! Orthogonal and bi-orthogonal complements, direct summands, intersections, sums and the
//! cyclic decomposition of a module over M2.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wstar::cli::generate::random_element;
use wstar::module::{
    biorthogonal_complement, intersect, is_direct_summand, orthogonal_complement, structure_decompose, submodule_sum,
};
use wstar::{BlockAlgebra, HilbertModule};

fn main() -> wstar::Result<()> {
    let a = BlockAlgebra::new(vec![2])?;
    let m = HilbertModule::free(&a, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (x, y, z) = (random_element(&m, &mut rng), random_element(&m, &mut rng), random_element(&m, &mut rng));

    let perp = orthogonal_complement(std::slice::from_ref(&x), &m)?;
    let back = biorthogonal_complement(std::slice::from_ref(&x), &m)?;
    println!("M = A^3, [M] = {}", m.k0());
    println!("[x^⊥] = {}, [x^⊥⊥] = {}, x ∈ x^⊥⊥ up to {:.1e}", perp.k0(), back.k0(), back.membership_residual(&x));

    match is_direct_summand(std::slice::from_ref(&x), &m)? {
        Some(s) => println!("A·x is a direct summand of class {}", s.k0()),
        None => println!("A·x is not a direct summand"),
    }

    let p = biorthogonal_complement(&[x, y.clone()], &m)?;
    let q = biorthogonal_complement(&[y, z], &m)?;
    let meet = intersect(&p, &q)?;
    let join = submodule_sum(&p, &q)?;
    println!("[P] + [Q] = {} + {}, [P∩Q] + [P+Q] = {} + {}", p.k0(), q.k0(), meet.k0(), join.k0());

    for (i, piece) in structure_decompose(&m).iter().enumerate() {
        println!("cyclic piece {i}: class {}", piece.submodule().k0());
    }
    Ok(())
}
