//! Projections over M1 ⊕ M2: their K0 rank vectors, HC0 traces and the Chern map between them.

use wstar::algebra::{blocktrace, chern_ch0, k0_of_projection};
use wstar::{AlgMatrix, BlockAlgebra, CMat, HilbertModule, C64};

fn main() -> wstar::Result<()> {
    let a = BlockAlgebra::new(vec![1, 2])?;
    println!("algebra {a}, complex dimension {}", a.dim());

    // q = 1 on the C block, a rank-1 projection inside M2(M2) = M4 on the other
    let v = [C64::new(0.5, 0.0), C64::new(0.5, 0.0), C64::new(0.0, 0.5), C64::new(0.0, -0.5)];
    let vv = CMat::from_fn(4, 4, |i, j| v[i] * v[j].conj());
    let q = AlgMatrix::from_blocks(&a, 2, 2, vec![CMat::from_diagonal_element(2, 2, C64::new(1.0, 0.0)), vv])?;
    let m = HilbertModule::new(q)?;

    let k = k0_of_projection(m.projection())?;
    let traces = blocktrace(&m.projection().entry_trace());
    println!("[M] = {k}, dim_C M = {}", k.complex_dim(&a));
    println!("trace of q = {traces}, ch(M) = {}", chern_ch0(&k));

    let free = HilbertModule::free(&a, 1);
    let sum = m.direct_sum(&free)?;
    println!("[M ⊕ A] = {} = {} + {}", sum.k0(), m.k0(), free.k0());
    Ok(())
}
