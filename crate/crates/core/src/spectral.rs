//! Spectral decomposition of module unitaries `U = Σ_k e^{iφ_k} P_k`, the
//! `K_0`-valued spectral function `φ ↦ [P(φ)]` and the cyclic trace `T(U)`.

use std::f64::consts::{PI, TAU};

use crate::algebra::{blocktrace, k0_of_projection, AlgMatrix, HC0Class, K0Class};
use crate::error::{Error, Result};
use crate::linalg;
use crate::module::HilbertModule;
use crate::operator::{polar_isometry, ModuleMap};
use crate::tol::tolerances;
use crate::{CMat, C64};

/// Canonical angle of a unit complex number in `[0, 2π)`.
///
/// Angles within the cluster tolerance of `2π` become `0`, and angles within
/// rounding of `0` or `π` become exactly `0` or `π`, so `1` and `−1` have one
/// representative each.
pub fn canonical_angle(z: C64) -> f64 {
    snap_angle(z.im.atan2(z.re))
}

const SNAP: f64 = 1e-12;

fn snap_angle(phi: f64) -> f64 {
    let mut a = phi.rem_euclid(TAU);
    if TAU - a <= tolerances().cluster() || a >= TAU || a <= SNAP {
        a = 0.0;
    }
    if (a - PI).abs() <= SNAP {
        a = PI;
    }
    a
}

/// `e^{iφ}`, exact at `0` and `π`.
pub fn phase(angle: f64) -> C64 {
    if angle == 0.0 {
        C64::new(1.0, 0.0)
    } else if angle == PI {
        C64::new(-1.0, 0.0)
    } else {
        C64::from_polar(1.0, angle)
    }
}

/// Circular distance between two angles.
pub fn angle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPoint {
    pub angle: f64,
    pub projection: ModuleMap,
}

/// Finite projection-valued measure resolving a module unitary.
#[derive(Debug, Clone)]
pub struct SpectralMeasure {
    module: HilbertModule,
    points: Vec<SpectralPoint>,
    warnings: Vec<String>,
}

impl SpectralMeasure {
    pub fn module(&self) -> &HilbertModule {
        &self.module
    }

    /// Points ordered by angle.
    pub fn points(&self) -> &[SpectralPoint] {
        &self.points
    }

    /// Near-collisions of eigen-angle groups (closer than ten cluster tolerances).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// `Σ_k e^{iφ_k} P_k`.
    pub fn reconstruct(&self) -> AlgMatrix {
        let n = self.module.ambient_rank();
        let mut acc = AlgMatrix::zeros(self.module.algebra(), n, n);
        for p in &self.points {
            acc = &acc + &p.projection.matrix().scale(phase(p.angle));
        }
        acc
    }

    /// `‖U − Σ e^{iφ_k} P_k‖`.
    pub fn reconstruction_residual(&self, u: &ModuleMap) -> f64 {
        self.reconstruct().dist(u.matrix())
    }

    /// `‖Σ P_k − id‖`.
    pub fn completeness_residual(&self) -> f64 {
        let n = self.module.ambient_rank();
        let sum = self
            .points
            .iter()
            .fold(AlgMatrix::zeros(self.module.algebra(), n, n), |acc, p| &acc + p.projection.matrix());
        sum.dist(self.module.projection())
    }

    /// `max_{j≠k} ‖P_j P_k‖`.
    pub fn orthogonality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, p) in self.points.iter().enumerate() {
            for q in &self.points[a + 1..] {
                worst = worst.max((p.projection.matrix() * q.projection.matrix()).norm());
            }
        }
        worst
    }

    /// `max_k ‖P_k U − U P_k‖`.
    pub fn commutation_residual(&self, u: &ModuleMap) -> f64 {
        self.points
            .iter()
            .map(|p| (p.projection.matrix() * u.matrix()).dist(&(u.matrix() * p.projection.matrix())))
            .fold(0.0, f64::max)
    }
}

fn check_unitary(u: &ModuleMap) -> Result<()> {
    if !u.is_endomorphism() {
        return Err(Error::Shape("spectral data needs an endomorphism".into()));
    }
    let residual = u.unitary_residual();
    if residual > tolerances().identity() {
        return Err(Error::Validation { what: "unitarity".into(), residual });
    }
    Ok(())
}

/// Eigen-decomposition of a module unitary, eigen-angles clustered within the
/// cluster tolerance.
pub fn spectral_measure(u: &ModuleMap) -> Result<SpectralMeasure> {
    check_unitary(u)?;
    let module = u.source().clone();
    let tol = tolerances().cluster();

    // (eigenvalue, block, eigenvector) over all blocks
    let mut eigen: Vec<(C64, usize, nalgebra::DVector<C64>)> = Vec::new();
    for (j, basis) in module.block_bases().iter().enumerate() {
        if basis.ncols() == 0 {
            continue;
        }
        let compressed = basis.adjoint() * u.matrix().block(j) * basis;
        let (vals, q) = linalg::unitary_eig(&compressed);
        let vectors = basis * q;
        for (i, z) in vals.into_iter().enumerate() {
            eigen.push((z, j, vectors.column(i).into_owned()));
        }
    }
    let mut order: Vec<(f64, usize)> = eigen.iter().enumerate().map(|(i, e)| (canonical_angle(e.0), i)).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for &(angle, i) in &order {
        if angle - last > tol || clusters.is_empty() {
            clusters.push(Vec::new());
        }
        clusters.last_mut().unwrap().push(i);
        last = angle;
    }
    if clusters.len() > 1 {
        let first = order.first().unwrap().0;
        if first + TAU - last <= tol {
            let tail = clusters.pop().unwrap();
            clusters[0].extend(tail);
        }
    }

    let n = module.ambient_rank();
    let mut points: Vec<SpectralPoint> = clusters
        .iter()
        .map(|members| {
            let mean: C64 = members.iter().map(|&i| eigen[i].0 / eigen[i].0.norm()).sum();
            let mut proj = AlgMatrix::zeros(module.algebra(), n, n);
            let blocks: Vec<CMat> = (0..module.algebra().num_blocks())
                .map(|j| {
                    let mut b = proj.block(j).clone();
                    for &i in members.iter().filter(|&&i| eigen[i].1 == j) {
                        b += &eigen[i].2 * eigen[i].2.adjoint();
                    }
                    b
                })
                .collect();
            proj = AlgMatrix::from_blocks_unchecked(module.algebra(), n, n, blocks);
            SpectralPoint { angle: canonical_angle(mean), projection: ModuleMap::compressed(&module, &module, &proj) }
        })
        .collect();
    points.sort_by(|a, b| a.angle.total_cmp(&b.angle));

    let mut warnings = Vec::new();
    if points.len() > 1 {
        for k in 0..points.len() {
            let (a, b) = (points[k].angle, points[(k + 1) % points.len()].angle);
            let gap = angle_dist(a, b);
            if gap <= 10.0 * tol && (k + 1 < points.len() || points.len() > 2) {
                warnings.push(format!("eigen-angle groups at {a:.9} and {b:.9} are only {gap:.3e} apart"));
            }
        }
    }
    Ok(SpectralMeasure { module, points, warnings })
}

/// A finitely supported map `S¹ → K_0(A)`; angles strictly increasing, no zero classes.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    num_blocks: usize,
    support: Vec<(f64, K0Class)>,
}

impl SpectralFunction {
    pub fn zero(num_blocks: usize) -> Self {
        SpectralFunction { num_blocks, support: Vec::new() }
    }

    /// Normalizes arbitrary `(angle, class)` pairs: angles within the cluster
    /// tolerance are merged (circularly), classes summed, zeros dropped.
    pub fn from_entries(num_blocks: usize, entries: impl IntoIterator<Item = (f64, K0Class)>) -> Self {
        let tol = tolerances().cluster();
        let mut items: Vec<(f64, K0Class)> = entries.into_iter().map(|(a, c)| (snap_angle(a), c)).collect();
        items.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, K0Class)> = Vec::new();
        for (angle, class) in items {
            match merged.last_mut() {
                Some((a, c)) if angle - *a <= tol => *c += &class,
                _ => merged.push((angle, class)),
            }
        }
        if merged.len() > 1 {
            let first = merged[0].0;
            if first + TAU - merged.last().unwrap().0 <= tol {
                let (_, tail) = merged.pop().unwrap();
                merged[0].1 += &tail;
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        SpectralFunction { num_blocks, support: merged }
    }

    pub fn num_blocks(&self) -> usize {
        self.num_blocks
    }

    pub fn support(&self) -> &[(f64, K0Class)] {
        &self.support
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    /// Sum of all values.
    pub fn total(&self) -> K0Class {
        self.support.iter().fold(K0Class::zero(self.num_blocks), |acc, (_, c)| &acc + c)
    }

    /// Value at `angle` (zero off the support).
    pub fn value_at(&self, angle: f64) -> K0Class {
        let tol = tolerances().cluster();
        self.support
            .iter()
            .find(|(a, _)| angle_dist(*a, angle) <= tol)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| K0Class::zero(self.num_blocks))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_entries(self.num_blocks, self.support.iter().chain(&other.support).cloned())
    }

    pub fn neg(&self) -> Self {
        SpectralFunction { num_blocks: self.num_blocks, support: self.support.iter().map(|(a, c)| (*a, -c)).collect() }
    }

    /// Same support (angles within `angle_tol`) and identical classes.
    pub fn matches(&self, other: &Self, angle_tol: f64) -> bool {
        self.support.len() == other.support.len()
            && self
                .support
                .iter()
                .zip(&other.support)
                .all(|((a, c), (b, d))| angle_dist(*a, *b) <= angle_tol && c == d)
    }

    /// `Σ_φ w(φ)·ch(L(φ))` in `HC_0(A)`.
    pub fn integrate(&self, weight: impl Fn(f64) -> C64) -> HC0Class {
        let mut acc = HC0Class::zero(self.num_blocks);
        for (a, c) in &self.support {
            acc = &acc + &crate::algebra::chern_ch0(c).scale(weight(*a));
        }
        acc
    }
}

/// `φ ↦ [P(φ)]` for a module unitary.
pub fn spectral_function(u: &ModuleMap) -> Result<SpectralFunction> {
    let measure = spectral_measure(u)?;
    spectral_function_of(&measure)
}

pub fn spectral_function_of(measure: &SpectralMeasure) -> Result<SpectralFunction> {
    let k = measure.module.algebra().num_blocks();
    let entries = measure
        .points
        .iter()
        .map(|p| Ok((p.angle, k0_of_projection(p.projection.matrix())?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralFunction::from_entries(k, entries))
}

/// `T(U) = blocktrace(Tr_n(Σ_k e^{iφ_k} q P_k q))`.
pub fn cyclic_trace(u: &ModuleMap) -> Result<HC0Class> {
    Ok(cyclic_trace_of(&spectral_measure(u)?))
}

pub fn cyclic_trace_of(measure: &SpectralMeasure) -> HC0Class {
    let q = measure.module.projection();
    let compressed = &(q * &measure.reconstruct()) * q;
    blocktrace(&compressed.entry_trace())
}

#[derive(Debug, Clone)]
pub struct InvarianceCheck {
    pub trace_source: HC0Class,
    pub trace_target: HC0Class,
    /// `U_N = V U_M V*` for the polar isometry `V` of `J`.
    pub transported: ModuleMap,
    pub equal: bool,
}

/// Transports `U_M` along the isomorphism `J: M → N` and compares cyclic traces.
pub fn conjugation_invariance_check(u_m: &ModuleMap, j: &ModuleMap) -> Result<InvarianceCheck> {
    if !j.source().same_as(u_m.source()) {
        return Err(Error::Shape("J must start at the module of U".into()));
    }
    let v = polar_isometry(j).map_err(|e| Error::Precondition(format!("J is not invertible: {e}")))?;
    let u_n = v.adjoint().then(u_m)?.then(&v)?;
    let trace_source = cyclic_trace(u_m)?;
    let trace_target = cyclic_trace(&u_n)?;
    let equal = trace_source.dist(&trace_target) <= tolerances().identity();
    Ok(InvarianceCheck { trace_source, trace_target, transported: u_n, equal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BlockAlgebra;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn map_over(a: &BlockAlgebra, n: usize, blocks: Vec<CMat>) -> ModuleMap {
        let m = HilbertModule::free(a, n);
        ModuleMap::new(&m, &m, AlgMatrix::from_blocks(a, n, n, blocks).unwrap()).unwrap()
    }

    #[test]
    fn identity_has_one_point() {
        let a = BlockAlgebra::new(vec![1]).unwrap();
        let id = map_over(&a, 2, vec![CMat::identity(2, 2)]);
        let m = spectral_measure(&id).unwrap();
        assert_eq!(m.points().len(), 1);
        assert_eq!(m.points()[0].angle, 0.0);
        assert!(m.points()[0].projection.dist(&id) < 1e-12);
    }

    #[test]
    fn reflection_splits_at_pi() {
        let a = BlockAlgebra::new(vec![1]).unwrap();
        let u = map_over(&a, 2, vec![CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])]);
        let m = spectral_measure(&u).unwrap();
        let angles: Vec<f64> = m.points().iter().map(|p| p.angle).collect();
        assert_eq!(angles, vec![0.0, PI]);
        let f = spectral_function(&u).unwrap();
        assert_eq!(f.support(), &[(0.0, K0Class::new(vec![1])), (PI, K0Class::new(vec![1]))]);
        assert!(cyclic_trace(&u).unwrap().dist(&HC0Class::new(vec![c(0.0, 0.0)])) < 1e-12);
    }

    #[test]
    fn rotation_has_conjugate_angles() {
        let th = PI / 5.0;
        let a = BlockAlgebra::new(vec![1]).unwrap();
        let u = map_over(&a, 2, vec![CMat::from_row_slice(2, 2, &[c(th.cos(), 0.0), c(-th.sin(), 0.0), c(th.sin(), 0.0), c(th.cos(), 0.0)])]);
        let m = spectral_measure(&u).unwrap();
        assert_eq!(m.points().len(), 2);
        assert!((m.points()[0].angle - th).abs() < 1e-12);
        assert!((m.points()[1].angle - (TAU - th)).abs() < 1e-12);
        assert!(m.reconstruction_residual(&u) < 1e-12);
        for p in m.points() {
            assert_eq!(k0_of_projection(p.projection.matrix()).unwrap(), K0Class::new(vec![1]));
        }
    }

    #[test]
    fn matrix_block_examples() {
        let a = BlockAlgebra::new(vec![2]).unwrap();
        let id = map_over(&a, 1, vec![CMat::identity(2, 2)]);
        assert_eq!(spectral_function(&id).unwrap().support(), &[(0.0, K0Class::new(vec![2]))]);
        assert!(cyclic_trace(&id).unwrap().dist(&HC0Class::new(vec![c(2.0, 0.0)])) < 1e-12);
        let d = map_over(&a, 1, vec![CMat::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)])]);
        assert!(cyclic_trace(&d).unwrap().dist(&HC0Class::zero(1)) < 1e-12);
    }

    #[test]
    fn rejects_non_unitary() {
        let a = BlockAlgebra::new(vec![1]).unwrap();
        let u = map_over(&a, 1, vec![CMat::from_element(1, 1, c(2.0, 0.0))]);
        assert!(matches!(spectral_measure(&u), Err(Error::Validation { .. })));
    }

    #[test]
    fn spectral_functions_merge_and_cancel() {
        let f = SpectralFunction::from_entries(
            1,
            vec![(0.0, K0Class::new(vec![1])), (TAU - 1e-9, K0Class::new(vec![-1])), (1.0, K0Class::new(vec![2]))],
        );
        assert_eq!(f.support(), &[(1.0, K0Class::new(vec![2]))]);
        assert_eq!(f.add(&f.neg()), SpectralFunction::zero(1));
    }

    #[test]
    fn swap_conjugation_keeps_trace() {
        let a = BlockAlgebra::new(vec![1]).unwrap();
        let u = map_over(&a, 2, vec![CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])]);
        let j = map_over(&a, 2, vec![CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])]);
        let check = conjugation_invariance_check(&u, &j).unwrap();
        assert!(check.equal);
        assert!(check.trace_target.dist(&HC0Class::zero(1)) < 1e-12);
        let singular = map_over(&a, 2, vec![CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])]);
        assert!(matches!(conjugation_invariance_check(&u, &singular), Err(Error::Precondition(_))));
    }
}
