//! Bounded `A`-linear maps between modules `q(A^m) → q'(A^n)`.
//!
//! A map acts on rows from the right, `x ↦ x·T`, with an `m × n` matrix `T`
//! over `A` satisfying `q·T·q' = T`. Composition "first `φ`, then `ψ`" has
//! matrix `T_φ·T_ψ`, and the adjoint has matrix `T*`.

use crate::algebra::{k0_of_projection, AlgMatrix, K0Class};
use crate::error::{Error, Result};
use crate::linalg;
use crate::module::{HilbertModule, ModuleElement, Submodule};
use crate::oracle;
use crate::tol::tolerances;
use crate::{CMat, C64};

/// Hard cap on the number of Taylor terms in [`operator_sqrt`].
pub const SERIES_MAX_TERMS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ModuleMap {
    source: HilbertModule,
    target: HilbertModule,
    matrix: AlgMatrix,
}

impl ModuleMap {
    pub fn new(source: &HilbertModule, target: &HilbertModule, matrix: AlgMatrix) -> Result<Self> {
        if matrix.algebra() != source.algebra() || matrix.algebra() != target.algebra() {
            return Err(Error::Shape("map, source and target use different algebras".into()));
        }
        if matrix.shape() != (source.ambient_rank(), target.ambient_rank()) {
            return Err(Error::Shape(format!(
                "map matrix {:?} does not fit A^{} → A^{}",
                matrix.shape(),
                source.ambient_rank(),
                target.ambient_rank()
            )));
        }
        let residual = (&(source.projection() * &matrix) * target.projection()).dist(&matrix);
        if residual > tolerances().identity() {
            return Err(Error::Validation { what: "map compatibility (q·T·q' = T)".into(), residual });
        }
        Ok(ModuleMap { source: source.clone(), target: target.clone(), matrix })
    }

    /// The map with matrix `q·raw·q'`.
    pub fn compressed(source: &HilbertModule, target: &HilbertModule, raw: &AlgMatrix) -> Self {
        let matrix = &(source.projection() * raw) * target.projection();
        ModuleMap { source: source.clone(), target: target.clone(), matrix }
    }

    pub fn identity(module: &HilbertModule) -> Self {
        ModuleMap { source: module.clone(), target: module.clone(), matrix: module.projection().clone() }
    }

    pub fn zero(source: &HilbertModule, target: &HilbertModule) -> Self {
        let matrix = AlgMatrix::zeros(source.algebra(), source.ambient_rank(), target.ambient_rank());
        ModuleMap { source: source.clone(), target: target.clone(), matrix }
    }

    pub fn source(&self) -> &HilbertModule {
        &self.source
    }

    pub fn target(&self) -> &HilbertModule {
        &self.target
    }

    pub fn matrix(&self) -> &AlgMatrix {
        &self.matrix
    }

    pub fn is_endomorphism(&self) -> bool {
        self.source.same_as(&self.target)
    }

    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    pub fn dist(&self, other: &Self) -> f64 {
        self.matrix.dist(&other.matrix)
    }

    pub fn scale(&self, s: C64) -> Self {
        ModuleMap { matrix: self.matrix.scale(s), ..self.clone() }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if !self.source.same_as(&other.source) || !self.target.same_as(&other.target) {
            return Err(Error::Shape("cannot add maps between different modules".into()));
        }
        Ok(ModuleMap { matrix: self.matrix.checked_add(&other.matrix)?, ..self.clone() })
    }

    pub fn apply(&self, x: &ModuleElement) -> Result<ModuleElement> {
        if !x.owner().same_as(&self.source) {
            return Err(Error::Shape("element is not in the source module".into()));
        }
        self.target.project(&(x.coords() * &self.matrix))
    }

    /// The composite "first `self`, then `next`".
    pub fn then(&self, next: &ModuleMap) -> Result<ModuleMap> {
        if !self.target.same_as(&next.source) {
            return Err(Error::Shape("composable maps need matching target and source".into()));
        }
        Ok(ModuleMap {
            source: self.source.clone(),
            target: next.target.clone(),
            matrix: self.matrix.checked_mul(&next.matrix)?,
        })
    }

    pub fn adjoint(&self) -> ModuleMap {
        ModuleMap { source: self.target.clone(), target: self.source.clone(), matrix: self.matrix.adjoint() }
    }

    /// `diag(φ, ψ): M ⊕ M' → N ⊕ N'`.
    pub fn direct_sum(&self, other: &ModuleMap) -> Result<ModuleMap> {
        Ok(ModuleMap {
            source: self.source.direct_sum(&other.source)?,
            target: self.target.direct_sum(&other.target)?,
            matrix: self.matrix.direct_sum(&other.matrix)?,
        })
    }

    /// Projection onto `{x ∈ M : x·T = 0}`.
    pub fn kernel_projection(&self) -> Submodule {
        let n = self.source.ambient_rank();
        let r = self
            .source
            .projection()
            .map_blocks(n, n, |j, q| linalg::row_kernel_within(q, self.matrix.block(j)));
        Submodule::from_projection_unchecked(&self.source, r)
    }

    /// Projection onto the range `M·T ⊆ N`.
    pub fn range_projection(&self) -> Submodule {
        let n = self.target.ambient_rank();
        let r = self.target.projection().map_blocks(n, n, |j, q| {
            let image = self.source.projection().block(j) * self.matrix.block(j) * q;
            linalg::row_space_projection(&image)
        });
        Submodule::from_projection_unchecked(&self.target, r)
    }

    /// `(Im φ)^⊥ ⊆ N`.
    pub fn cokernel_projection(&self) -> Submodule {
        self.range_projection().complement()
    }

    /// Smallest singular value of the restriction to the source exceeds the
    /// relative threshold, i.e. the kernel is zero.
    pub fn is_injective(&self) -> bool {
        self.kernel_projection().k0().is_zero()
    }

    /// `max(‖T·T* − q‖, ‖T*·T − q‖)` for an endomorphism; infinite otherwise.
    pub fn unitary_residual(&self) -> f64 {
        if !self.is_endomorphism() {
            return f64::INFINITY;
        }
        let q = self.source.projection();
        let a = (&self.matrix * &self.matrix.adjoint()).dist(q);
        let b = (&self.matrix.adjoint() * &self.matrix).dist(q);
        a.max(b)
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary_residual() <= tolerances().identity()
    }

    /// `‖T − T*‖` for an endomorphism; infinite otherwise.
    pub fn self_adjoint_residual(&self) -> f64 {
        if !self.is_endomorphism() {
            return f64::INFINITY;
        }
        self.matrix.dist(&self.matrix.adjoint())
    }

    /// Smallest eigenvalue of a self-adjoint endomorphism on the module
    /// (the complement of the presentation is ignored).
    pub fn min_module_eigenvalue(&self) -> f64 {
        compress_each(&self.source, &self.matrix)
            .iter()
            .filter(|c| c.nrows() > 0)
            .map(|c| linalg::hermitian_eig(c).0[0])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Per block, `B* T B` for an orthonormal basis `B` of the module block.
fn compress_each(module: &HilbertModule, matrix: &AlgMatrix) -> Vec<CMat> {
    module
        .block_bases()
        .iter()
        .zip(matrix.blocks())
        .map(|(b, t)| b.adjoint() * t * b)
        .collect()
}

/// Rebuilds `B f(B* T B) B*` blockwise.
fn expand_each(module: &HilbertModule, compressed: Vec<CMat>) -> AlgMatrix {
    let n = module.ambient_rank();
    let bases = module.block_bases();
    let blocks = bases.iter().zip(compressed).map(|(b, c)| b * c * b.adjoint()).collect();
    AlgMatrix::from_blocks_unchecked(module.algebra(), n, n, blocks)
}

/// The adjoint map, `⟨φx, y⟩ = ⟨x, φ*y⟩`.
pub fn adjoint_map(phi: &ModuleMap) -> ModuleMap {
    phi.adjoint()
}

/// `Ker φ` as a direct summand of the source.
pub fn kernel_projection(phi: &ModuleMap) -> Submodule {
    phi.kernel_projection()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqrtMethod {
    /// Partial sums of the Taylor series of `√(1 − x)` at zero.
    Series,
    /// Diagonalization by the independent Jacobi eigensolver.
    Oracle,
}

/// Taylor coefficients `λ_1, …, λ_n` with `√(1 − x) = 1 − Σ λ_k x^k`.
pub fn sqrt_coefficients(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut lambda = 0.5;
    for k in 1..=n {
        out.push(lambda);
        lambda *= (2 * k) as f64 - 1.0;
        lambda /= (2 * k) as f64 + 2.0;
    }
    out
}

fn check_positive(h: &ModuleMap) -> Result<()> {
    if !h.is_endomorphism() {
        return Err(Error::Shape("square root needs an endomorphism".into()));
    }
    let tol = tolerances().identity();
    let sa = h.self_adjoint_residual();
    if sa > tol {
        return Err(Error::Validation { what: "self-adjointness".into(), residual: sa });
    }
    let min = h.min_module_eigenvalue();
    if min < -tol {
        return Err(Error::Validation { what: "positivity".into(), residual: -min });
    }
    Ok(())
}

/// The positive square root of a positive endomorphism.
///
/// `Series` evaluates `‖h‖^{1/2} (id − Σ_{k≤n} λ_k (id − h/‖h‖)^k)` and stops at
/// the first summand whose norm drops below the series threshold; more than
/// [`SERIES_MAX_TERMS`] terms is a [`Error::Convergence`].
pub fn operator_sqrt(h: &ModuleMap, method: SqrtMethod) -> Result<ModuleMap> {
    check_positive(h)?;
    let module = h.source();
    let hm = h.matrix().hermitian_part();
    match method {
        SqrtMethod::Oracle => {
            let n = module.ambient_rank();
            let s = hm.map_blocks(n, n, |_, b| {
                let (vals, vecs) = oracle::hermitian_jacobi(b);
                let roots = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
                    vals.len(),
                    vals.iter().map(|&v| C64::new(v.max(0.0).sqrt(), 0.0)),
                ));
                &vecs * roots * vecs.adjoint()
            });
            Ok(ModuleMap::compressed(module, module, &s))
        }
        SqrtMethod::Series => {
            let norm = hm.norm();
            let q = module.projection();
            if norm <= tolerances().rank_floor() {
                return Ok(ModuleMap::zero(module, module));
            }
            let y = q - &hm.scale(C64::new(1.0 / norm, 0.0));
            // y is positive with ‖y‖ ≤ 1, so ‖y^k‖ = ‖y‖^k exactly.
            let y_norm = compress_each(module, &y)
                .iter()
                .filter(|c| c.nrows() > 0)
                .map(|c| *linalg::hermitian_eig(c).0.last().unwrap())
                .fold(0.0, f64::max)
                .clamp(0.0, 1.0);
            let stop = tolerances().series_stop();
            let scale = norm.sqrt();
            let mut lambda = 0.5;
            let mut power = y_norm;
            let mut terms = 0;
            loop {
                terms += 1;
                let summand = scale * lambda * power;
                if summand < stop {
                    break;
                }
                if terms >= SERIES_MAX_TERMS {
                    return Err(Error::Convergence { limit: SERIES_MAX_TERMS, last_term: summand });
                }
                lambda *= (2 * terms) as f64 - 1.0;
                lambda /= (2 * terms) as f64 + 2.0;
                power *= y_norm;
            }
            let coeffs = sqrt_coefficients(terms);
            // Horner: Σ λ_k y^k = y(λ_1 + y(λ_2 + … + y λ_n)).
            let mut acc = q.scale(C64::new(coeffs[terms - 1], 0.0));
            for &c in coeffs[..terms - 1].iter().rev() {
                acc = &q.scale(C64::new(c, 0.0)) + &(&y * &acc);
            }
            let sum = &y * &acc;
            let s = (q - &sum).scale(C64::new(scale, 0.0));
            Ok(ModuleMap::compressed(module, module, &s.hermitian_part()))
        }
    }
}

/// `(h)^{-1/2}` on the module for positive definite `h` (zero off the module).
fn inverse_sqrt_on_module(h: &ModuleMap) -> AlgMatrix {
    let module = h.source();
    let compressed = compress_each(module, &h.matrix().hermitian_part())
        .into_iter()
        .map(|c| {
            let (vals, vecs) = linalg::hermitian_eig(&c);
            let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
                vals.len(),
                vals.iter().map(|&v| C64::new(1.0 / v.sqrt(), 0.0)),
            ));
            &vecs * d * vecs.adjoint()
        })
        .collect();
    expand_each(module, compressed)
}

fn check_injective(alpha: &ModuleMap) -> Result<()> {
    let kernel = alpha.kernel_projection();
    if !kernel.k0().is_zero() {
        return Err(Error::Precondition(format!("map is not injective; kernel class {}", kernel.k0())));
    }
    Ok(())
}

fn isometric_part(alpha: &ModuleMap) -> ModuleMap {
    let gram = alpha.then(&alpha.adjoint()).expect("α then α* composes");
    let inv_sqrt = inverse_sqrt_on_module(&gram);
    ModuleMap::compressed(alpha.source(), alpha.target(), &(&inv_sqrt * alpha.matrix()))
}

/// `V = α(α*α)^{-1/2}`, a unitary module isomorphism `M → N`.
pub fn polar_isometry(alpha: &ModuleMap) -> Result<ModuleMap> {
    check_injective(alpha)?;
    let defect = alpha.cokernel_projection();
    let defect_class = defect.k0();
    if !defect_class.is_zero() {
        return Err(Error::RangeDefect { defect: defect_class, projection: Box::new(defect.projection().clone()) });
    }
    Ok(isometric_part(alpha))
}

/// For injective `α: M → N`, the isometry of `M` onto the summand `α(M)^{⊥⊥}`
/// together with its orthogonal complement in `N`.
pub fn embed_as_summand(alpha: &ModuleMap) -> Result<(ModuleMap, Submodule)> {
    check_injective(alpha)?;
    Ok((isometric_part(alpha), alpha.cokernel_projection()))
}

/// `Ind F = [Ker F] − [(Im F)^⊥]` in `K_0(A)`.
pub fn fredholm_index(f: &ModuleMap) -> K0Class {
    let ker = k0_of_projection(f.kernel_projection().projection()).expect("kernel projection is a projection");
    let coker = k0_of_projection(f.cokernel_projection().projection()).expect("range projection is a projection");
    &ker - &coker
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BlockAlgebra;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn scalar_map(n: usize, m: usize, entries: &[f64]) -> ModuleMap {
        let a = BlockAlgebra::new(vec![1]).unwrap();
        let mat = AlgMatrix::from_blocks(&a, n, m, vec![CMat::from_row_slice(n, m, &entries.iter().map(|&v| c(v)).collect::<Vec<_>>())])
            .unwrap();
        ModuleMap::new(&HilbertModule::free(&a, n), &HilbertModule::free(&a, m), mat).unwrap()
    }

    #[test]
    fn taylor_coefficients_of_sqrt() {
        let l = sqrt_coefficients(4);
        assert_eq!(l, vec![0.5, 0.125, 0.0625, 5.0 / 128.0]);
    }

    #[test]
    fn kernel_examples() {
        let zero = scalar_map(2, 1, &[0.0, 0.0]);
        assert_eq!(zero.kernel_projection().k0(), K0Class::new(vec![2]));
        let inv = scalar_map(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert!(inv.kernel_projection().k0().is_zero());
    }

    #[test]
    fn sqrt_examples_both_methods() {
        for method in [SqrtMethod::Series, SqrtMethod::Oracle] {
            let id = scalar_map(2, 2, &[1.0, 0.0, 0.0, 1.0]);
            assert!(operator_sqrt(&id, method).unwrap().dist(&id) < 1e-10);
            let d = scalar_map(2, 2, &[4.0, 0.0, 0.0, 1.0]);
            let expect = scalar_map(2, 2, &[2.0, 0.0, 0.0, 1.0]);
            assert!(operator_sqrt(&d, method).unwrap().dist(&expect) < 1e-8, "{method:?}");
            let h = scalar_map(2, 2, &[2.0, 1.0, 1.0, 2.0]);
            let (p, m) = ((3f64.sqrt() + 1.0) / 2.0, (3f64.sqrt() - 1.0) / 2.0);
            let expect = scalar_map(2, 2, &[p, m, m, p]);
            assert!(operator_sqrt(&h, method).unwrap().dist(&expect) < 1e-8, "{method:?}");
        }
    }

    #[test]
    fn sqrt_rejects_non_positive_and_flags_singular() {
        let neg = scalar_map(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(operator_sqrt(&neg, SqrtMethod::Series), Err(Error::Validation { .. })));
        let singular = scalar_map(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(operator_sqrt(&singular, SqrtMethod::Series), Err(Error::Convergence { .. })));
        let s = operator_sqrt(&singular, SqrtMethod::Oracle).unwrap();
        assert!(s.dist(&singular) < 1e-12);
    }

    #[test]
    fn polar_examples() {
        let two = scalar_map(2, 2, &[2.0, 0.0, 0.0, 2.0]);
        let id = scalar_map(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        assert!(polar_isometry(&two).unwrap().dist(&id) < 1e-12);
        let pos = scalar_map(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        assert!(polar_isometry(&pos).unwrap().dist(&id) < 1e-12);
        let alpha = scalar_map(2, 2, &[0.0, 2.0, 1.0, 0.0]);
        let swap = scalar_map(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(polar_isometry(&alpha).unwrap().dist(&swap) < 1e-12);
    }

    #[test]
    fn polar_preconditions() {
        let singular = scalar_map(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(polar_isometry(&singular), Err(Error::Precondition(_))));
        let into_bigger = scalar_map(1, 2, &[1.0, 0.0]);
        match polar_isometry(&into_bigger) {
            Err(Error::RangeDefect { defect, .. }) => assert_eq!(defect, K0Class::new(vec![1])),
            other => panic!("expected range defect, got {other:?}"),
        }
    }

    #[test]
    fn embedding_examples() {
        let alpha = scalar_map(1, 2, &[1.0, 0.0]);
        let (v, comp) = embed_as_summand(&alpha).unwrap();
        assert!(v.dist(&alpha) < 1e-12);
        let a = BlockAlgebra::new(vec![1]).unwrap();
        let e22 = AlgMatrix::from_blocks(&a, 2, 2, vec![CMat::from_row_slice(2, 2, &[c(0.0), c(0.0), c(0.0), c(1.0)])]).unwrap();
        assert!(comp.projection().dist(&e22) < 1e-12);
        let inv = scalar_map(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert!(embed_as_summand(&inv).unwrap().1.k0().is_zero());
    }

    #[test]
    fn index_examples() {
        assert_eq!(fredholm_index(&scalar_map(2, 1, &[0.0, 0.0])), K0Class::new(vec![1]));
        assert!(fredholm_index(&scalar_map(2, 2, &[1.0, 2.0, 3.0, 4.0])).is_zero());
    }

    #[test]
    fn adjoint_of_right_multiplication() {
        let a = BlockAlgebra::new(vec![2]).unwrap();
        let m = HilbertModule::free(&a, 1);
        let u = AlgMatrix::from_blocks(&a, 1, 1, vec![CMat::from_row_slice(2, 2, &[c(0.0), C64::new(0.0, 1.0), c(1.0), c(0.0)])]).unwrap();
        let phi = ModuleMap::new(&m, &m, u.clone()).unwrap();
        assert_eq!(adjoint_map(&phi).matrix(), &u.adjoint());
        assert!(adjoint_map(&ModuleMap::identity(&m)).dist(&ModuleMap::identity(&m)) < 1e-15);
    }
}
