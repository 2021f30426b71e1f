//! Finite-dimensional W*-algebras `A = M_{n_1}(C) ⊕ … ⊕ M_{n_k}(C)`, matrices
//! over them, and the invariants `K_0(A) = Z^k` and `HC_0(A) = C^k`.
//!
//! An `r × c` matrix over `A` is stored block by block: its `j`-th block is the
//! ordinary complex `(r·n_j) × (c·n_j)` matrix obtained by writing the `j`-th
//! components of all entries side by side. Entry `(i, l)` occupies rows
//! `i·n_j..(i+1)·n_j` and columns `l·n_j..(l+1)·n_j` of that block. Arithmetic
//! over `A` is then blockwise matrix arithmetic.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::linalg;
use crate::tol::tolerances;
use crate::{CMat, C64};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockAlgebra {
    block_sizes: Vec<usize>,
}

impl BlockAlgebra {
    pub fn new(block_sizes: Vec<usize>) -> Result<Self> {
        if block_sizes.is_empty() {
            return Err(Error::Shape("an algebra needs at least one block".into()));
        }
        if block_sizes.contains(&0) {
            return Err(Error::Shape(format!("block sizes must be positive, got {block_sizes:?}")));
        }
        Ok(BlockAlgebra { block_sizes })
    }

    /// `C^n` as the diagonal algebra with `n` one-dimensional blocks.
    pub fn diagonal(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn num_blocks(&self) -> usize {
        self.block_sizes.len()
    }

    /// Complex dimension `Σ n_i²`.
    pub fn dim(&self) -> usize {
        self.block_sizes.iter().map(|n| n * n).sum()
    }

    pub fn one(&self) -> AlgElem {
        AlgElem(AlgMatrix::identity(self, 1))
    }

    pub fn zero(&self) -> AlgElem {
        AlgElem(AlgMatrix::zeros(self, 1, 1))
    }
}

impl fmt::Display for BlockAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.block_sizes.iter().map(|n| format!("M{n}")).collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// A rectangular matrix over a [`BlockAlgebra`].
#[derive(Debug, Clone, PartialEq)]
pub struct AlgMatrix {
    algebra: BlockAlgebra,
    rows: usize,
    cols: usize,
    blocks: Vec<CMat>,
}

impl AlgMatrix {
    pub fn zeros(algebra: &BlockAlgebra, rows: usize, cols: usize) -> Self {
        let blocks = algebra
            .block_sizes
            .iter()
            .map(|&n| linalg::zeros(rows * n, cols * n))
            .collect();
        AlgMatrix { algebra: algebra.clone(), rows, cols, blocks }
    }

    pub fn identity(algebra: &BlockAlgebra, n: usize) -> Self {
        let blocks = algebra.block_sizes.iter().map(|&b| linalg::identity(n * b)).collect();
        AlgMatrix { algebra: algebra.clone(), rows: n, cols: n, blocks }
    }

    pub fn from_blocks(algebra: &BlockAlgebra, rows: usize, cols: usize, blocks: Vec<CMat>) -> Result<Self> {
        if blocks.len() != algebra.num_blocks() {
            return Err(Error::Shape(format!(
                "expected {} blocks, got {}",
                algebra.num_blocks(),
                blocks.len()
            )));
        }
        for (j, (b, &n)) in blocks.iter().zip(&algebra.block_sizes).enumerate() {
            if b.shape() != (rows * n, cols * n) {
                return Err(Error::Shape(format!(
                    "block {j} has shape {:?}, expected {:?}",
                    b.shape(),
                    (rows * n, cols * n)
                )));
            }
        }
        Ok(AlgMatrix { algebra: algebra.clone(), rows, cols, blocks })
    }

    /// Builds a matrix from its entries, given row by row.
    pub fn from_entries(algebra: &BlockAlgebra, entries: &[Vec<AlgElem>]) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        let mut out = Self::zeros(algebra, rows, cols);
        for (i, row) in entries.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Shape(format!("row {i} has {} entries, expected {cols}", row.len())));
            }
            for (l, e) in row.iter().enumerate() {
                out.set_entry(i, l, e)?;
            }
        }
        Ok(out)
    }

    pub fn algebra(&self) -> &BlockAlgebra {
        &self.algebra
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn block(&self, j: usize) -> &CMat {
        &self.blocks[j]
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn entry(&self, i: usize, l: usize) -> AlgElem {
        let blocks = self
            .algebra
            .block_sizes
            .iter()
            .zip(&self.blocks)
            .map(|(&n, b)| b.view((i * n, l * n), (n, n)).into_owned())
            .collect();
        AlgElem(AlgMatrix { algebra: self.algebra.clone(), rows: 1, cols: 1, blocks })
    }

    pub fn set_entry(&mut self, i: usize, l: usize, e: &AlgElem) -> Result<()> {
        if e.algebra() != &self.algebra {
            return Err(Error::Shape("entry belongs to a different algebra".into()));
        }
        if i >= self.rows || l >= self.cols {
            return Err(Error::Shape(format!("entry ({i},{l}) outside {}x{}", self.rows, self.cols)));
        }
        for (j, &n) in self.algebra.block_sizes.iter().enumerate() {
            self.blocks[j].view_mut((i * n, l * n), (n, n)).copy_from(e.block(j));
        }
        Ok(())
    }

    /// Applies `f` to every block; `f` must preserve the `(rows, cols)` pattern
    /// given by `rows`/`cols` scaled by the block size.
    pub(crate) fn map_blocks(&self, rows: usize, cols: usize, f: impl Fn(usize, &CMat) -> CMat) -> Self {
        let blocks = self.blocks.iter().enumerate().map(|(j, b)| f(j, b)).collect();
        AlgMatrix { algebra: self.algebra.clone(), rows, cols, blocks }
    }

    pub(crate) fn from_blocks_unchecked(algebra: &BlockAlgebra, rows: usize, cols: usize, blocks: Vec<CMat>) -> Self {
        debug_assert!(Self::from_blocks(algebra, rows, cols, blocks.clone()).is_ok());
        AlgMatrix { algebra: algebra.clone(), rows, cols, blocks }
    }

    fn same_algebra(&self, other: &Self) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(Error::Shape(format!(
                "operands over different algebras ({} vs {})",
                self.algebra, other.algebra
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_algebra(other)?;
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!("cannot add {:?} and {:?}", self.shape(), other.shape())));
        }
        Ok(self.map_blocks(self.rows, self.cols, |j, b| b + &other.blocks[j]))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_algebra(other)?;
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {:?} by {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(self.map_blocks(self.rows, other.cols, |j, b| b * &other.blocks[j]))
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map_blocks(self.rows, self.cols, |_, b| b * s)
    }

    /// Entrywise adjoint followed by transposition, i.e. blockwise conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.map_blocks(self.cols, self.rows, |_, b| b.adjoint())
    }

    pub fn hermitian_part(&self) -> Self {
        self.map_blocks(self.rows, self.cols, |_, b| linalg::hermitize(b))
    }

    /// Operator norm: the largest block spectral norm.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(linalg::spectral_norm).fold(0.0, f64::max)
    }

    /// `‖self − other‖`; infinite when the shapes differ.
    pub fn dist(&self, other: &Self) -> f64 {
        match self.checked_sub(other) {
            Ok(d) => d.norm(),
            Err(_) => f64::INFINITY,
        }
    }

    /// `max(‖p − p*‖, ‖p² − p‖)`, infinite for non-square input.
    pub fn projection_residual(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let sa = self.dist(&self.adjoint());
        let idem = (self * self).dist(self);
        sa.max(idem)
    }

    pub fn is_projection(&self) -> bool {
        self.projection_residual() <= tolerances().identity()
    }

    /// Block-diagonal direct sum `diag(self, other)`.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        self.same_algebra(other)?;
        Ok(self.map_blocks(self.rows + other.rows, self.cols + other.cols, |j, b| {
            linalg::direct_sum(b, &other.blocks[j])
        }))
    }

    /// Block matrix with the given row/column partition; `pieces` are
    /// `(row_part, col_part, matrix)`, everything else is zero.
    pub fn assemble(
        algebra: &BlockAlgebra,
        row_sizes: &[usize],
        col_sizes: &[usize],
        pieces: &[(usize, usize, &AlgMatrix)],
    ) -> Result<Self> {
        let offsets = |sizes: &[usize]| {
            sizes.iter().scan(0, |acc, &s| {
                let o = *acc;
                *acc += s;
                Some(o)
            }).collect::<Vec<_>>()
        };
        let (ro, co) = (offsets(row_sizes), offsets(col_sizes));
        let mut out = Self::zeros(algebra, row_sizes.iter().sum(), col_sizes.iter().sum());
        for &(r, c, m) in pieces {
            if m.algebra != *algebra || m.shape() != (row_sizes[r], col_sizes[c]) {
                return Err(Error::Shape(format!(
                    "piece ({r}, {c}) has shape {:?}, expected {:?}",
                    m.shape(),
                    (row_sizes[r], col_sizes[c])
                )));
            }
            for (j, &n) in algebra.block_sizes.iter().enumerate() {
                out.blocks[j].view_mut((ro[r] * n, co[c] * n), m.blocks[j].shape()).copy_from(&m.blocks[j]);
            }
        }
        Ok(out)
    }

    /// The `rows × cols` submatrix starting at entry `(r0, c0)`.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "submatrix out of range");
        let blocks = self
            .algebra
            .block_sizes
            .iter()
            .zip(&self.blocks)
            .map(|(&n, b)| b.view((r0 * n, c0 * n), (rows * n, cols * n)).into_owned())
            .collect();
        AlgMatrix { algebra: self.algebra.clone(), rows, cols, blocks }
    }

    /// `Tr_n`: the sum of the diagonal entries of a square matrix, an element of `A`.
    pub fn entry_trace(&self) -> AlgElem {
        let mut acc = self.algebra.zero();
        for i in 0..self.rows.min(self.cols) {
            acc = AlgElem(&acc.0 + &self.entry(i, i).0);
        }
        acc
    }
}

impl Add for &AlgMatrix {
    type Output = AlgMatrix;
    fn add(self, rhs: &AlgMatrix) -> AlgMatrix {
        self.checked_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for &AlgMatrix {
    type Output = AlgMatrix;
    fn sub(self, rhs: &AlgMatrix) -> AlgMatrix {
        self.checked_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Mul for &AlgMatrix {
    type Output = AlgMatrix;
    fn mul(self, rhs: &AlgMatrix) -> AlgMatrix {
        self.checked_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

/// An element of a [`BlockAlgebra`]: one complex `n_i × n_i` matrix per block.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgElem(AlgMatrix);

impl AlgElem {
    pub fn new(algebra: &BlockAlgebra, blocks: Vec<CMat>) -> Result<Self> {
        AlgMatrix::from_blocks(algebra, 1, 1, blocks).map(AlgElem)
    }

    /// Element of the diagonal algebra `C^n` with the given coordinates.
    pub fn from_diagonal(algebra: &BlockAlgebra, values: &[C64]) -> Result<Self> {
        if algebra.block_sizes.iter().any(|&n| n != 1) || values.len() != algebra.num_blocks() {
            return Err(Error::Shape("diagonal element needs a commutative algebra of matching size".into()));
        }
        Self::new(algebra, values.iter().map(|&v| CMat::from_element(1, 1, v)).collect())
    }

    pub fn algebra(&self) -> &BlockAlgebra {
        &self.0.algebra
    }

    pub fn block(&self, j: usize) -> &CMat {
        &self.0.blocks[j]
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.0.blocks
    }

    pub fn as_matrix(&self) -> &AlgMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> AlgMatrix {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        AlgElem(self.0.adjoint())
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn dist(&self, other: &Self) -> f64 {
        self.0.dist(&other.0)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.0.checked_add(&other.0).map(AlgElem)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.0.checked_mul(&other.0).map(AlgElem)
    }

    pub fn scale(&self, s: C64) -> Self {
        AlgElem(self.0.scale(s))
    }

    /// Smallest eigenvalue of the Hermitian part over all blocks.
    pub fn min_hermitian_eigenvalue(&self) -> f64 {
        self.0
            .blocks
            .iter()
            .flat_map(|b| linalg::hermitian_eig(b).0)
            .fold(f64::INFINITY, f64::min)
    }
}

impl From<AlgElem> for AlgMatrix {
    fn from(e: AlgElem) -> Self {
        e.0
    }
}

pub(crate) fn elem_from_matrix(m: AlgMatrix) -> AlgElem {
    debug_assert_eq!(m.shape(), (1, 1));
    AlgElem(m)
}

/// Operation selector for [`alg_arith`].
#[derive(Debug, Clone, Copy)]
pub enum ArithOp<'a> {
    Add(&'a AlgElem),
    Mul(&'a AlgElem),
    Adjoint,
    Scale(C64),
}

/// Blockwise arithmetic in `A`.
pub fn alg_arith(a: &AlgElem, op: ArithOp<'_>) -> Result<AlgElem> {
    match op {
        ArithOp::Add(b) => a.checked_add(b),
        ArithOp::Mul(b) => a.checked_mul(b),
        ArithOp::Adjoint => Ok(a.adjoint()),
        ArithOp::Scale(s) => Ok(a.scale(s)),
    }
}

/// A class in `K_0(A) = Z^k`, counted in multiples of the simple modules.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct K0Class {
    pub ranks: Vec<i64>,
}

impl K0Class {
    pub fn new(ranks: Vec<i64>) -> Self {
        K0Class { ranks }
    }

    pub fn zero(num_blocks: usize) -> Self {
        K0Class { ranks: vec![0; num_blocks] }
    }

    pub fn is_zero(&self) -> bool {
        self.ranks.iter().all(|&r| r == 0)
    }

    /// Complex dimension `Σ n_j · rank_j` of a module of this class.
    pub fn complex_dim(&self, algebra: &BlockAlgebra) -> i64 {
        self.ranks.iter().zip(algebra.block_sizes()).map(|(&r, &n)| r * n as i64).sum()
    }
}

impl Add for &K0Class {
    type Output = K0Class;
    fn add(self, rhs: &K0Class) -> K0Class {
        assert_eq!(self.ranks.len(), rhs.ranks.len(), "K0 classes over different algebras");
        K0Class { ranks: self.ranks.iter().zip(&rhs.ranks).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &K0Class {
    type Output = K0Class;
    fn sub(self, rhs: &K0Class) -> K0Class {
        self + &(-rhs)
    }
}

impl Neg for &K0Class {
    type Output = K0Class;
    fn neg(self) -> K0Class {
        K0Class { ranks: self.ranks.iter().map(|r| -r).collect() }
    }
}

impl AddAssign<&K0Class> for K0Class {
    fn add_assign(&mut self, rhs: &K0Class) {
        *self = &*self + rhs;
    }
}

impl fmt::Display for K0Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.ranks.iter().map(|r| r.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// A class in `HC_0(A) = A/[A,A] ≅ C^k`, one trace per block.
#[derive(Debug, Clone, PartialEq)]
pub struct HC0Class {
    pub traces: Vec<C64>,
}

impl HC0Class {
    pub fn new(traces: Vec<C64>) -> Self {
        HC0Class { traces }
    }

    pub fn zero(num_blocks: usize) -> Self {
        HC0Class { traces: vec![C64::new(0.0, 0.0); num_blocks] }
    }

    pub fn conj(&self) -> Self {
        HC0Class { traces: self.traces.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        HC0Class { traces: self.traces.iter().map(|z| z * s).collect() }
    }

    /// Largest componentwise modulus of the difference.
    pub fn dist(&self, other: &Self) -> f64 {
        if self.traces.len() != other.traces.len() {
            return f64::INFINITY;
        }
        self.traces.iter().zip(&other.traces).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `Σ n_j · trace_j`: the trace of the complex-linear realization.
    pub fn flat_trace(&self, algebra: &BlockAlgebra) -> C64 {
        self.traces.iter().zip(algebra.block_sizes()).map(|(t, &n)| t * n as f64).sum()
    }
}

impl Add for &HC0Class {
    type Output = HC0Class;
    fn add(self, rhs: &HC0Class) -> HC0Class {
        assert_eq!(self.traces.len(), rhs.traces.len(), "HC0 classes over different algebras");
        HC0Class { traces: self.traces.iter().zip(&rhs.traces).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &HC0Class {
    type Output = HC0Class;
    fn sub(self, rhs: &HC0Class) -> HC0Class {
        self + &rhs.scale(C64::new(-1.0, 0.0))
    }
}

impl fmt::Display for HC0Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.traces.iter().map(|z| fmt_complex(*z)).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Fixed-precision complex formatting used in reports; rounds away `-0`.
pub fn fmt_complex(z: C64) -> String {
    let clean = |x: f64| if x.abs() < 5e-10 { 0.0 } else { x };
    let (re, im) = (clean(z.re), clean(z.im));
    if im == 0.0 {
        format!("{re:.9}")
    } else {
        format!("{re:.9}{}{:.9}i", if im < 0.0 { "-" } else { "+" }, im.abs())
    }
}

/// Per-block trace `A → HC_0(A)`.
pub fn blocktrace(a: &AlgElem) -> HC0Class {
    HC0Class { traces: a.blocks().iter().map(linalg::trace).collect() }
}

/// The `K_0` class of the module `p(A^n)` for a projection `p ∈ M_n(A)`.
///
/// Block `j` of the module is `n_j` copies of the range of `p`'s block, so the
/// multiplicity of the simple module is the number of eigenvalues of that
/// block above `1/2`; the trace must agree with that count.
pub fn k0_of_projection(p: &AlgMatrix) -> Result<K0Class> {
    let residual = p.projection_residual();
    if residual > tolerances().identity() {
        return Err(Error::Validation { what: "projection".into(), residual });
    }
    let mut ranks = Vec::with_capacity(p.blocks.len());
    for (j, b) in p.blocks.iter().enumerate() {
        let (vals, _) = linalg::hermitian_eig(b);
        let count = vals.iter().filter(|&&v| v > 0.5).count();
        let tr = linalg::trace(b).re;
        if (tr - count as f64).abs() > 1e-6 {
            return Err(Error::Consistency(format!(
                "block {j}: trace {tr} of projection is not the integral rank {count}"
            )));
        }
        ranks.push(count as i64);
    }
    Ok(K0Class { ranks })
}

/// Chern character `K_0(A) → HC_0(A)` in degree zero.
pub fn chern_ch0(c: &K0Class) -> HC0Class {
    HC0Class { traces: c.ranks.iter().map(|&r| C64::new(r as f64, 0.0)).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn m2(entries: [f64; 4]) -> CMat {
        CMat::from_row_slice(2, 2, &entries.map(c))
    }

    #[test]
    fn rejects_empty_or_zero_blocks() {
        assert!(BlockAlgebra::new(vec![]).is_err());
        assert!(BlockAlgebra::new(vec![2, 0]).is_err());
        assert_eq!(BlockAlgebra::new(vec![1, 2, 3]).unwrap().dim(), 14);
    }

    #[test]
    fn orthogonal_idempotents_multiply_to_zero() {
        let a = BlockAlgebra::diagonal(2).unwrap();
        let e1 = AlgElem::from_diagonal(&a, &[c(1.0), c(0.0)]).unwrap();
        let e2 = AlgElem::from_diagonal(&a, &[c(0.0), c(1.0)]).unwrap();
        let prod = alg_arith(&e1, ArithOp::Mul(&e2)).unwrap();
        assert_eq!(prod, a.zero());
    }

    #[test]
    fn adjoint_of_nilpotent() {
        let a = BlockAlgebra::new(vec![2]).unwrap();
        let x = AlgElem::new(&a, vec![m2([0.0, 1.0, 0.0, 0.0])]).unwrap();
        let y = alg_arith(&x, ArithOp::Adjoint).unwrap();
        assert_eq!(y.block(0), &m2([0.0, 0.0, 1.0, 0.0]));
    }

    #[test]
    fn mismatched_algebras_are_structural_errors() {
        let a = BlockAlgebra::new(vec![2]).unwrap();
        let b = BlockAlgebra::new(vec![1, 1]).unwrap();
        let err = alg_arith(&a.one(), ArithOp::Add(&b.one())).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
        let wrong = AlgElem::new(&a, vec![CMat::zeros(3, 3)]);
        assert!(matches!(wrong, Err(Error::Shape(_))));
    }

    #[test]
    fn blocktrace_examples() {
        let a = BlockAlgebra::new(vec![2]).unwrap();
        assert_eq!(blocktrace(&a.one()).traces, vec![c(2.0)]);
        let d = BlockAlgebra::diagonal(2).unwrap();
        let e1 = AlgElem::from_diagonal(&d, &[c(1.0), c(0.0)]).unwrap();
        assert_eq!(blocktrace(&e1).traces, vec![c(1.0), c(0.0)]);
    }

    #[test]
    fn k0_examples() {
        let a = BlockAlgebra::new(vec![2]).unwrap();
        assert_eq!(k0_of_projection(&AlgMatrix::identity(&a, 1)).unwrap(), K0Class::new(vec![2]));
        let d = BlockAlgebra::diagonal(2).unwrap();
        let e1 = AlgElem::from_diagonal(&d, &[c(1.0), c(0.0)]).unwrap();
        assert_eq!(k0_of_projection(e1.as_matrix()).unwrap(), K0Class::new(vec![1, 0]));
        assert_eq!(k0_of_projection(&AlgMatrix::zeros(&d, 3, 3)).unwrap(), K0Class::zero(2));
    }

    #[test]
    fn k0_rejects_non_projections() {
        let a = BlockAlgebra::new(vec![2]).unwrap();
        let not_idem = AlgElem::new(&a, vec![m2([2.0, 0.0, 0.0, 0.0])]).unwrap();
        assert!(matches!(k0_of_projection(not_idem.as_matrix()), Err(Error::Validation { .. })));
        let not_sa = AlgElem::new(&a, vec![m2([1.0, 1.0, 0.0, 0.0])]).unwrap();
        assert!(matches!(k0_of_projection(not_sa.as_matrix()), Err(Error::Validation { .. })));
    }

    #[test]
    fn chern_examples() {
        assert_eq!(chern_ch0(&K0Class::new(vec![1, 0])).traces, vec![c(1.0), c(0.0)]);
        assert_eq!(chern_ch0(&K0Class::new(vec![-1, 3])).traces, vec![c(-1.0), c(3.0)]);
        let a = BlockAlgebra::new(vec![2]).unwrap();
        let via_k0 = chern_ch0(&k0_of_projection(&AlgMatrix::identity(&a, 1)).unwrap());
        assert_eq!(via_k0, blocktrace(&a.one()));
    }

    #[test]
    fn entries_round_trip_through_blocks() {
        let a = BlockAlgebra::new(vec![1, 2]).unwrap();
        let x = AlgElem::new(&a, vec![CMat::from_element(1, 1, c(3.0)), m2([1.0, 2.0, 3.0, 4.0])]).unwrap();
        let m = AlgMatrix::from_entries(&a, &[vec![a.zero(), x.clone()], vec![a.one(), a.zero()]]).unwrap();
        assert_eq!(m.entry(0, 1), x);
        assert_eq!(m.entry(1, 0), a.one());
        assert_eq!(m.block(1).shape(), (4, 4));
        assert_eq!(m.entry_trace(), a.zero());
    }
}
