//! Brute-force complex-linear verification.
//!
//! The oracle forgets the module structure: a matrix `T` over `A` becomes the
//! dense complex matrix of `x ↦ x·T` on the flattened coordinates of `A^n`,
//! and kernels, ranks, eigendata, harmonic spaces and traces are recomputed
//! there with Jacobi-type solvers. Nothing here calls into the module layer's
//! numerics; only the data types are shared.

mod jacobi;

pub use jacobi::{hermitian_jacobi, one_sided_svd};

use crate::algebra::{AlgMatrix, BlockAlgebra};
use crate::complex::{ComplexEndomorphism, FiniteComplex};
use crate::module::{HilbertModule, ModuleElement};
use crate::operator::ModuleMap;
use crate::tol::tolerances;
use crate::{CMat, C64};

/// Flat coordinates of `A^n`: block `j` contributes `n_j` rows of length `n·n_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatSpace {
    algebra: BlockAlgebra,
    rank: usize,
    offsets: Vec<usize>,
    dim: usize,
}

impl FlatSpace {
    pub fn new(algebra: &BlockAlgebra, rank: usize) -> Self {
        let mut offsets = Vec::with_capacity(algebra.num_blocks());
        let mut dim = 0;
        for &nj in algebra.block_sizes() {
            offsets.push(dim);
            dim += rank * nj * nj;
        }
        FlatSpace { algebra: algebra.clone(), rank, offsets, dim }
    }

    /// `n · Σ n_j²`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Flat index of entry `(row, col)` of block `block` of a row `x ∈ A^n`,
    /// where `row < n_j` and `col < n·n_j`.
    pub fn index(&self, block: usize, row: usize, col: usize) -> usize {
        let nj = self.algebra.block_sizes()[block];
        debug_assert!(row < nj && col < self.rank * nj);
        self.offsets[block] + row * self.rank * nj + col
    }
}

/// The complex matrix `F` with `flat(x·T) = flat(x)·F`.
pub fn flatten_matrix(t: &AlgMatrix) -> CMat {
    let algebra = t.algebra();
    let src = FlatSpace::new(algebra, t.rows());
    let dst = FlatSpace::new(algebra, t.cols());
    let mut f = CMat::zeros(src.dim(), dst.dim());
    for (j, &nj) in algebra.block_sizes().iter().enumerate() {
        let b = t.block(j);
        for r in 0..nj {
            for a in 0..t.rows() * nj {
                for c in 0..t.cols() * nj {
                    f[(src.index(j, r, a), dst.index(j, r, c))] = b[(a, c)];
                }
            }
        }
    }
    f
}

pub fn flatten(phi: &ModuleMap) -> CMat {
    flatten_matrix(phi.matrix())
}

/// `flat(x)` as a `1 × dim` row.
pub fn flatten_element(x: &ModuleElement) -> CMat {
    let coords = x.coords();
    let space = FlatSpace::new(coords.algebra(), coords.cols());
    let mut v = CMat::zeros(1, space.dim());
    for (j, &nj) in coords.algebra().block_sizes().iter().enumerate() {
        let b = coords.block(j);
        for r in 0..nj {
            for c in 0..coords.cols() * nj {
                v[(0, space.index(j, r, c))] = b[(r, c)];
            }
        }
    }
    v
}

fn threshold(singular_values: &[f64]) -> f64 {
    let t = tolerances();
    let largest = singular_values.first().copied().unwrap_or(0.0);
    (t.rank_relative() * largest).max(t.rank_floor())
}

pub fn oracle_rank(x: &CMat) -> usize {
    if x.is_empty() {
        return 0;
    }
    // one-sided Jacobi works on columns; use the shorter side
    let work = if x.ncols() > x.nrows() { x.adjoint() } else { x.clone() };
    let (sv, _) = one_sided_svd(&work);
    let thr = threshold(&sv);
    sv.iter().filter(|&&s| s > thr).count()
}

/// Orthonormal columns spanning `{w : x·w = 0}`.
pub fn null_space(x: &CMat) -> CMat {
    let n = x.ncols();
    if x.nrows() == 0 {
        return CMat::identity(n, n);
    }
    let (sv, v) = one_sided_svd(x);
    let thr = threshold(&sv);
    let keep: Vec<usize> = (0..n).filter(|&i| sv[i] <= thr).collect();
    let mut out = CMat::zeros(n, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        out.set_column(c, &v.column(i));
    }
    out
}

/// Complex dimension of a module: rank of its flattened presentation.
pub fn oracle_module_dim(module: &HilbertModule) -> usize {
    oracle_rank(&flatten_matrix(module.projection()))
}

/// `dim_C {x ∈ M : x·T = 0} = rank(Q) − rank(Q·F)`.
pub fn oracle_kernel_dim(phi: &ModuleMap) -> usize {
    let q = flatten_matrix(phi.source().projection());
    let f = flatten(phi);
    oracle_rank(&q) - oracle_rank(&(&q * f))
}

/// `dim_C` of the range of `φ`.
pub fn oracle_range_dim(phi: &ModuleMap) -> usize {
    let q = flatten_matrix(phi.source().projection());
    oracle_rank(&(&q * flatten(phi)))
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
pub fn oracle_eig(h: &CMat) -> (Vec<f64>, CMat) {
    hermitian_jacobi(h)
}

/// Eigenvalues of the Hermitian endomorphism `h` restricted to its flattened
/// module, each repeated with its complex multiplicity.
pub fn oracle_module_spectrum(h: &ModuleMap) -> Vec<f64> {
    let q = flatten_matrix(h.source().projection());
    let basis = null_space(&(CMat::identity(q.nrows(), q.ncols()) - &q).adjoint());
    let f = flatten(h);
    // rows v = w*: restriction is w* F w
    let restricted = basis.adjoint() * f * &basis;
    oracle_eig(&restricted).0
}

/// Trace of the complex-linear realization of an endomorphism on its module.
pub fn oracle_trace(phi: &ModuleMap) -> C64 {
    let q = flatten_matrix(phi.source().projection());
    (q * flatten(phi)).trace()
}

/// Orthonormal columns `w` whose rows `v = w*` span the flat harmonic space of degree `m`.
pub fn oracle_harmonic_basis(c: &FiniteComplex, m: usize) -> CMat {
    let space = &c.spaces()[m];
    let q = flatten_matrix(space.projection());
    let dim = q.nrows();
    let mut constraints = vec![CMat::identity(dim, dim) - &q];
    if m < c.differentials().len() {
        constraints.push(flatten(&c.differentials()[m]));
    }
    if m > 0 {
        let prev = &c.differentials()[m - 1];
        let q_prev = flatten_matrix(prev.source().projection());
        constraints.push((q_prev * flatten(prev)).adjoint());
    }
    let width: usize = constraints.iter().map(|k| k.ncols()).sum();
    let mut k = CMat::zeros(dim, width);
    let mut col = 0;
    for block in &constraints {
        k.view_mut((0, col), block.shape()).copy_from(block);
        col += block.ncols();
    }
    // v·K = 0  ⇔  K*·v* = 0
    null_space(&k.adjoint())
}

/// The scalar Lefschetz number `Σ_m (−1)^m tr_C(U_m | H_m)` from flat data.
pub fn oracle_lefschetz(c: &FiniteComplex, u: &ComplexEndomorphism) -> C64 {
    let mut total = C64::new(0.0, 0.0);
    for (m, um) in u.components().iter().enumerate() {
        let basis = oracle_harmonic_basis(c, m);
        let tr = (basis.adjoint() * flatten(um) * &basis).trace();
        if m % 2 == 0 {
            total += tr;
        } else {
            total -= tr;
        }
    }
    total
}

/// Complex dimension of each flat harmonic space.
pub fn oracle_betti(c: &FiniteComplex) -> Vec<usize> {
    (0..c.spaces().len()).map(|m| oracle_harmonic_basis(c, m).ncols()).collect()
}
