//! Finite complexes of projective modules, their harmonic spaces and the
//! Lefschetz numbers `L_1` (spectral-function valued) and `L_0` (`HC_0` valued).

use crate::algebra::{k0_of_projection, AlgMatrix, BlockAlgebra, HC0Class, K0Class};
use crate::error::{Error, Result};
use crate::module::{intersect, HilbertModule, Submodule};
use crate::operator::{polar_isometry, ModuleMap};
use crate::spectral::{cyclic_trace_of, phase, spectral_function_of, spectral_measure, SpectralFunction, SpectralMeasure};
use crate::tol::tolerances;
use crate::C64;

/// `Γ(E_0) → Γ(E_1) → … → Γ(E_N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteComplex {
    spaces: Vec<HilbertModule>,
    differentials: Vec<ModuleMap>,
}

impl FiniteComplex {
    /// Checks shapes only; `d² = 0` is checked by [`validate_complex`].
    pub fn new(spaces: Vec<HilbertModule>, differentials: Vec<ModuleMap>) -> Result<Self> {
        if spaces.is_empty() {
            return Err(Error::Shape("a complex needs at least one space".into()));
        }
        if differentials.len() + 1 != spaces.len() {
            return Err(Error::Shape(format!(
                "{} spaces need {} differentials, got {}",
                spaces.len(),
                spaces.len() - 1,
                differentials.len()
            )));
        }
        let algebra = spaces[0].algebra();
        for (m, s) in spaces.iter().enumerate() {
            if s.algebra() != algebra {
                return Err(Error::Shape(format!("space {m} lives over {}, not {algebra}", s.algebra())));
            }
        }
        for (m, d) in differentials.iter().enumerate() {
            if !d.source().same_as(&spaces[m]) || !d.target().same_as(&spaces[m + 1]) {
                return Err(Error::Shape(format!("differential {m} does not map space {m} to space {}", m + 1)));
            }
        }
        Ok(FiniteComplex { spaces, differentials })
    }

    /// `0 → M → 0`-style complex with zero differentials.
    pub fn with_zero_differentials(spaces: Vec<HilbertModule>) -> Result<Self> {
        let differentials = spaces.windows(2).map(|w| ModuleMap::zero(&w[0], &w[1])).collect();
        Self::new(spaces, differentials)
    }

    pub fn algebra(&self) -> &BlockAlgebra {
        self.spaces[0].algebra()
    }

    pub fn spaces(&self) -> &[HilbertModule] {
        &self.spaces
    }

    pub fn differentials(&self) -> &[ModuleMap] {
        &self.differentials
    }

    /// Number of degrees.
    pub fn len(&self) -> usize {
        self.spaces.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `Σ_m (−1)^m [Γ(E_m)]`.
    pub fn euler_characteristic(&self) -> K0Class {
        alternating(self.spaces.iter().map(HilbertModule::k0), self.algebra().num_blocks())
    }

    /// `Γ(E_ev) = Γ(E_0) ⊕ Γ(E_2) ⊕ …`.
    pub fn even_total(&self) -> HilbertModule {
        total(self.algebra(), self.spaces.iter().step_by(2))
    }

    /// `Γ(E_od) = Γ(E_1) ⊕ Γ(E_3) ⊕ …` (possibly of ambient rank zero).
    pub fn odd_total(&self) -> HilbertModule {
        total(self.algebra(), self.spaces.iter().skip(1).step_by(2))
    }

    fn parity_ranks(&self, parity: usize) -> Vec<usize> {
        self.spaces.iter().skip(parity).step_by(2).map(HilbertModule::ambient_rank).collect()
    }
}

fn total<'a>(algebra: &BlockAlgebra, spaces: impl Iterator<Item = &'a HilbertModule>) -> HilbertModule {
    spaces.fold(HilbertModule::free(algebra, 0), |acc, s| acc.direct_sum(s).expect("same algebra"))
}

fn alternating(classes: impl Iterator<Item = K0Class>, k: usize) -> K0Class {
    classes
        .enumerate()
        .fold(K0Class::zero(k), |acc, (m, c)| if m % 2 == 0 { &acc + &c } else { &acc - &c })
}

/// Per-degree `‖d_{m+1} ∘ d_m‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexReport {
    pub residuals: Vec<f64>,
    pub pass: bool,
}

pub fn validate_complex(c: &FiniteComplex) -> ComplexReport {
    let residuals: Vec<f64> = c
        .differentials
        .windows(2)
        .map(|w| (w[0].matrix() * w[1].matrix()).norm())
        .collect();
    let pass = residuals.iter().all(|&r| r <= tolerances().identity());
    ComplexReport { residuals, pass }
}

fn require_valid(c: &FiniteComplex) -> Result<()> {
    let report = validate_complex(c);
    if !report.pass {
        let worst = report.residuals.iter().cloned().fold(0.0, f64::max);
        return Err(Error::Precondition(format!("not a complex: ‖d∘d‖ = {worst:.3e}")));
    }
    Ok(())
}

/// A unitary chain endomorphism `(U_m)` of a complex.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexEndomorphism {
    components: Vec<ModuleMap>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EndomorphismReport {
    pub unitary_residuals: Vec<f64>,
    /// `‖U_{m+1} ∘ d_m − d_m ∘ U_m‖`.
    pub chain_residuals: Vec<f64>,
    pub pass: bool,
}

impl ComplexEndomorphism {
    /// Checks that component `m` is an endomorphism of space `m`.
    pub fn new(c: &FiniteComplex, components: Vec<ModuleMap>) -> Result<Self> {
        if components.len() != c.len() {
            return Err(Error::Shape(format!("{} degrees need {} components, got {}", c.len(), c.len(), components.len())));
        }
        for (m, u) in components.iter().enumerate() {
            if !u.source().same_as(&c.spaces[m]) || !u.target().same_as(&c.spaces[m]) {
                return Err(Error::Shape(format!("component {m} is not an endomorphism of space {m}")));
            }
        }
        Ok(ComplexEndomorphism { components })
    }

    pub fn identity(c: &FiniteComplex) -> Self {
        ComplexEndomorphism { components: c.spaces.iter().map(ModuleMap::identity).collect() }
    }

    pub fn components(&self) -> &[ModuleMap] {
        &self.components
    }

    pub fn validate(&self, c: &FiniteComplex) -> EndomorphismReport {
        let unitary_residuals: Vec<f64> = self.components.iter().map(ModuleMap::unitary_residual).collect();
        let chain_residuals: Vec<f64> = c
            .differentials
            .iter()
            .enumerate()
            .map(|(m, d)| {
                let after = d.matrix() * self.components[m + 1].matrix();
                let before = self.components[m].matrix() * d.matrix();
                after.dist(&before)
            })
            .collect();
        let tol = tolerances().identity();
        let pass = unitary_residuals.iter().chain(&chain_residuals).all(|&r| r <= tol);
        EndomorphismReport { unitary_residuals, chain_residuals, pass }
    }
}

fn require_endomorphism(c: &FiniteComplex, u: &ComplexEndomorphism) -> Result<()> {
    require_valid(c)?;
    let report = u.validate(c);
    if !report.pass {
        let worst_u = report.unitary_residuals.iter().cloned().fold(0.0, f64::max);
        let worst_c = report.chain_residuals.iter().cloned().fold(0.0, f64::max);
        return Err(Error::Precondition(format!(
            "not a unitary chain map: unitarity {worst_u:.3e}, chain {worst_c:.3e}"
        )));
    }
    Ok(())
}

/// `H_m = Ker d_m ∩ (Im d_{m−1})^⊥`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSpaces {
    h: Vec<Submodule>,
}

impl HarmonicSpaces {
    pub fn h(&self) -> &[Submodule] {
        &self.h
    }

    pub fn ranks(&self) -> Vec<K0Class> {
        self.h.iter().map(Submodule::k0).collect()
    }

    /// `[H_ev] − [H_od]`.
    pub fn euler_class(&self) -> K0Class {
        let k = self.h[0].ambient().algebra().num_blocks();
        alternating(self.ranks().into_iter(), k)
    }

    /// `⊕ H_{2i}` (parity 0) or `⊕ H_{2i+1}` (parity 1) inside the total module.
    pub fn total_projection(&self, parity: usize) -> AlgMatrix {
        let algebra = self.h[0].ambient().algebra();
        self.h
            .iter()
            .skip(parity)
            .step_by(2)
            .fold(AlgMatrix::zeros(algebra, 0, 0), |acc, s| acc.direct_sum(s.projection()).expect("same algebra"))
    }

    /// Largest of `‖r_m d_m‖` and `‖r_m d_{m−1}*‖` (closedness under d and d*).
    pub fn closedness_residual(&self, c: &FiniteComplex) -> f64 {
        let mut worst: f64 = 0.0;
        for (m, s) in self.h.iter().enumerate() {
            let r = s.projection();
            if m < c.differentials.len() {
                worst = worst.max((r * c.differentials[m].matrix()).norm());
            }
            if m > 0 {
                worst = worst.max((r * &c.differentials[m - 1].matrix().adjoint()).norm());
            }
        }
        worst
    }

    /// Per-degree `‖r U_m − r U_m r‖`.
    pub fn invariance_residuals(&self, u: &ComplexEndomorphism) -> Vec<f64> {
        self.h
            .iter()
            .zip(&u.components)
            .map(|(s, um)| invariance_residual(s, um))
            .collect()
    }
}

fn invariance_residual(s: &Submodule, u: &ModuleMap) -> f64 {
    let r = s.projection();
    let ru = r * u.matrix();
    ru.dist(&(&ru * r))
}

pub fn hodge_spaces(c: &FiniteComplex) -> Result<HarmonicSpaces> {
    require_valid(c)?;
    let mut h = Vec::with_capacity(c.len());
    for (m, space) in c.spaces.iter().enumerate() {
        let closed = match c.differentials.get(m) {
            Some(d) => d.kernel_projection(),
            None => space.whole(),
        };
        let harmonic = if m > 0 {
            let exact = c.differentials[m - 1].range_projection();
            intersect(&closed, &exact.complement())?
        } else {
            closed
        };
        h.push(harmonic);
    }
    Ok(HarmonicSpaces { h })
}

/// `F = d + d*: Γ(E_ev) → Γ(E_od)`.
pub fn fredholm_f(c: &FiniteComplex) -> Result<ModuleMap> {
    require_valid(c)?;
    let (even, odd) = (c.even_total(), c.odd_total());
    let (rows, cols) = (c.parity_ranks(0), c.parity_ranks(1));
    let adjoints: Vec<AlgMatrix> = c.differentials.iter().map(|d| d.matrix().adjoint()).collect();
    let mut pieces = Vec::new();
    for (m, d) in c.differentials.iter().enumerate() {
        if m % 2 == 0 {
            // d_m: E_m → E_{m+1}
            pieces.push((m / 2, m / 2, d.matrix()));
        } else {
            // d_m*: E_{m+1} → E_m
            pieces.push((m.div_ceil(2), m / 2, &adjoints[m]));
        }
    }
    let matrix = AlgMatrix::assemble(c.algebra(), &rows, &cols, &pieces)?;
    Ok(ModuleMap::compressed(&even, &odd, &matrix))
}

/// Distances between `Ker F`, `Ker F*` and `⊕ H_{2i}`, `⊕ H_{2i+1}`.
pub fn hodge_identity_residuals(c: &FiniteComplex, h: &HarmonicSpaces) -> Result<(f64, f64)> {
    let f = fredholm_f(c)?;
    let even = f.kernel_projection().projection().dist(&h.total_projection(0));
    let odd = f.adjoint().kernel_projection().projection().dist(&h.total_projection(1));
    Ok((even, odd))
}

/// `U_m` viewed on the harmonic submodule `H_m`.
///
/// Errors if `U_m` moves `H_m` by more than the residual tolerance; small
/// drift is removed by passing to the polar isometry.
pub fn restrict_to_harmonic(s: &Submodule, u: &ModuleMap) -> Result<ModuleMap> {
    let t = tolerances();
    let drift = invariance_residual(s, u);
    if drift > t.residual() {
        return Err(Error::Consistency(format!("harmonic space is not invariant: residual {drift:.3e}")));
    }
    let module = s.as_module();
    let r = s.projection();
    let restricted = ModuleMap::compressed(&module, &module, &(&(r * u.matrix()) * r));
    if drift.max(restricted.unitary_residual()) <= t.drift() {
        return Ok(restricted);
    }
    polar_isometry(&restricted)
        .map_err(|e| Error::Consistency(format!("restriction to a harmonic space is not invertible: {e}")))
}

/// Everything computed on the way to `L_1` and `L_0`.
#[derive(Debug, Clone)]
pub struct Lefschetz {
    pub harmonic: HarmonicSpaces,
    pub restricted: Vec<ModuleMap>,
    pub measures: Vec<SpectralMeasure>,
    pub l1: SpectralFunction,
    pub l0: HC0Class,
}

pub fn lefschetz(c: &FiniteComplex, u: &ComplexEndomorphism) -> Result<Lefschetz> {
    require_endomorphism(c, u)?;
    let harmonic = hodge_spaces(c)?;
    let k = c.algebra().num_blocks();
    let mut restricted = Vec::new();
    let mut measures = Vec::new();
    let mut entries = Vec::new();
    let mut l0 = HC0Class::zero(k);
    for (m, (s, um)) in harmonic.h.iter().zip(&u.components).enumerate() {
        let v = restrict_to_harmonic(s, um)?;
        let measure = spectral_measure(&v)?;
        let f = spectral_function_of(&measure)?;
        let trace = cyclic_trace_of(&measure);
        if m % 2 == 0 {
            entries.extend(f.support().iter().cloned());
            l0 = &l0 + &trace;
        } else {
            entries.extend(f.support().iter().map(|(a, cl)| (*a, -cl)));
            l0 = &l0 - &trace;
        }
        restricted.push(v);
        measures.push(measure);
    }
    let l1 = SpectralFunction::from_entries(k, entries);
    Ok(Lefschetz { harmonic, restricted, measures, l1, l0 })
}

/// `L_1(E, U) = Σ_m (−1)^m [dP_{U|H_m}]`.
pub fn lefschetz_l1(c: &FiniteComplex, u: &ComplexEndomorphism) -> Result<SpectralFunction> {
    Ok(lefschetz(c, u)?.l1)
}

/// `L_0(E, U) = Σ_m (−1)^m T(U|H_m)`.
pub fn lefschetz_l0(c: &FiniteComplex, u: &ComplexEndomorphism) -> Result<HC0Class> {
    Ok(lefschetz(c, u)?.l0)
}

/// How the spectral function is integrated against the circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChernWeighting {
    /// `Σ_φ e^{iφ} ch(L_1(φ))`.
    #[default]
    Weighted,
    /// `Σ_φ ch(L_1(φ))`.
    Unweighted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChernCheck {
    pub lhs: HC0Class,
    pub rhs: HC0Class,
    pub equal: bool,
}

pub fn chern_consistency(c: &FiniteComplex, u: &ComplexEndomorphism, weighting: ChernWeighting) -> Result<ChernCheck> {
    Ok(chern_check_of(&lefschetz(c, u)?, weighting))
}

pub fn chern_check_of(data: &Lefschetz, weighting: ChernWeighting) -> ChernCheck {
    let rhs = match weighting {
        ChernWeighting::Weighted => data.l1.integrate(phase),
        ChernWeighting::Unweighted => data.l1.integrate(|_| C64::new(1.0, 0.0)),
    };
    let equal = data.l0.dist(&rhs) <= tolerances().identity();
    ChernCheck { lhs: data.l0.clone(), rhs, equal }
}

/// Transports `(c, U)` along module isomorphisms `J_m: Γ(E_m) → N_m`
/// (made unitary by polar decomposition first).
pub fn conjugate_complex(
    c: &FiniteComplex,
    u: &ComplexEndomorphism,
    isos: &[ModuleMap],
) -> Result<(FiniteComplex, ComplexEndomorphism)> {
    if isos.len() != c.len() {
        return Err(Error::Shape(format!("need {} isomorphisms, got {}", c.len(), isos.len())));
    }
    let v: Vec<ModuleMap> = isos
        .iter()
        .enumerate()
        .map(|(m, j)| {
            if !j.source().same_as(&c.spaces[m]) {
                return Err(Error::Shape(format!("isomorphism {m} does not start at space {m}")));
            }
            polar_isometry(j).map_err(|e| Error::Precondition(format!("isomorphism {m} is not invertible: {e}")))
        })
        .collect::<Result<_>>()?;
    let spaces: Vec<HilbertModule> = v.iter().map(|x| x.target().clone()).collect();
    let differentials = c
        .differentials
        .iter()
        .enumerate()
        .map(|(m, d)| v[m].adjoint().then(d)?.then(&v[m + 1]))
        .collect::<Result<Vec<_>>>()?;
    let components = u
        .components
        .iter()
        .zip(&v)
        .map(|(um, vm)| vm.adjoint().then(um)?.then(vm))
        .collect::<Result<Vec<_>>>()?;
    let c2 = FiniteComplex::new(spaces, differentials)?;
    let u2 = ComplexEndomorphism::new(&c2, components)?;
    Ok((c2, u2))
}

/// `k0` of each harmonic space, checked for integrality.
pub fn betti_classes(h: &HarmonicSpaces) -> Result<Vec<K0Class>> {
    h.h.iter().map(|s| k0_of_projection(s.projection())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::fredholm_index;
    use crate::CMat;
    use std::f64::consts::PI;

    fn scalar(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn cplx() -> BlockAlgebra {
        BlockAlgebra::new(vec![1]).unwrap()
    }

    fn map(a: &BlockAlgebra, n: usize, m: usize, entries: &[f64]) -> ModuleMap {
        let mat = AlgMatrix::from_blocks(a, n, m, vec![CMat::from_row_slice(n, m, &entries.iter().map(|&v| scalar(v)).collect::<Vec<_>>())])
            .unwrap();
        ModuleMap::new(&HilbertModule::free(a, n), &HilbertModule::free(a, m), mat).unwrap()
    }

    fn two_term_zero() -> FiniteComplex {
        let a = cplx();
        FiniteComplex::with_zero_differentials(vec![HilbertModule::free(&a, 1), HilbertModule::free(&a, 1)]).unwrap()
    }

    #[test]
    fn zero_differentials_pass_and_keep_everything() {
        let c = two_term_zero();
        let report = validate_complex(&c);
        assert!(report.pass);
        assert!(report.residuals.is_empty());
        let h = hodge_spaces(&c).unwrap();
        assert_eq!(h.ranks(), vec![K0Class::new(vec![1]), K0Class::new(vec![1])]);
    }

    #[test]
    fn violation_reports_norm() {
        let a = cplx();
        let c = FiniteComplex::new(
            vec![HilbertModule::free(&a, 1), HilbertModule::free(&a, 1), HilbertModule::free(&a, 1)],
            vec![map(&a, 1, 1, &[2.0]), map(&a, 1, 1, &[1.5])],
        )
        .unwrap();
        let report = validate_complex(&c);
        assert!(!report.pass);
        assert!((report.residuals[0] - 3.0).abs() < 1e-12);
        assert!(matches!(hodge_spaces(&c), Err(Error::Precondition(_))));
    }

    #[test]
    fn exact_complexes_have_no_harmonics() {
        let a = cplx();
        let c = FiniteComplex::new(vec![HilbertModule::free(&a, 1), HilbertModule::free(&a, 1)], vec![map(&a, 1, 1, &[1.0])]).unwrap();
        let h = hodge_spaces(&c).unwrap();
        assert!(h.ranks().iter().all(K0Class::is_zero));
        let f = fredholm_f(&c).unwrap();
        assert!(f.is_injective());
        assert!(fredholm_index(&f).is_zero());

        let c3 = FiniteComplex::new(
            vec![HilbertModule::free(&a, 1), HilbertModule::free(&a, 2), HilbertModule::free(&a, 1)],
            vec![map(&a, 1, 2, &[1.0, 0.0]), map(&a, 2, 1, &[0.0, 1.0])],
        )
        .unwrap();
        let h3 = hodge_spaces(&c3).unwrap();
        assert!(h3.ranks().iter().all(K0Class::is_zero));
        let (ev, od) = hodge_identity_residuals(&c3, &h3).unwrap();
        assert!(ev < 1e-12 && od < 1e-12);
        let u = ComplexEndomorphism::identity(&c3);
        assert!(lefschetz_l1(&c3, &u).unwrap().is_zero());
        assert!(lefschetz_l0(&c3, &u).unwrap().dist(&HC0Class::zero(1)) < 1e-12);
    }

    #[test]
    fn reflection_endomorphism() {
        let c = two_term_zero();
        let a = cplx();
        let id = ComplexEndomorphism::identity(&c);
        assert!(lefschetz_l1(&c, &id).unwrap().is_zero());
        let u = ComplexEndomorphism::new(&c, vec![map(&a, 1, 1, &[1.0]), map(&a, 1, 1, &[-1.0])]).unwrap();
        let l = lefschetz(&c, &u).unwrap();
        assert_eq!(l.l1.support(), &[(0.0, K0Class::new(vec![1])), (PI, K0Class::new(vec![-1]))]);
        assert!(l.l0.dist(&HC0Class::new(vec![scalar(2.0)])) < 1e-12);
        let check = chern_check_of(&l, ChernWeighting::Weighted);
        assert!(check.equal);
        assert!(!chern_check_of(&l, ChernWeighting::Unweighted).equal);
    }

    #[test]
    fn identity_gives_index() {
        let a = BlockAlgebra::new(vec![1, 2]).unwrap();
        let spaces = vec![HilbertModule::free(&a, 2), HilbertModule::free(&a, 1), HilbertModule::free(&a, 1)];
        let c = FiniteComplex::with_zero_differentials(spaces).unwrap();
        let f = fredholm_f(&c).unwrap();
        let index = fredholm_index(&f);
        assert_eq!(index, c.euler_characteristic());
        assert_eq!(index, K0Class::new(vec![2, 4]));
        let l = lefschetz(&c, &ComplexEndomorphism::identity(&c)).unwrap();
        assert_eq!(l.l1.support(), &[(0.0, index.clone())]);
        assert!(l.l0.dist(&crate::algebra::chern_ch0(&index)) < 1e-12);
    }

    #[test]
    fn chain_map_violation_is_precondition() {
        let a = cplx();
        let c = FiniteComplex::new(vec![HilbertModule::free(&a, 1), HilbertModule::free(&a, 1)], vec![map(&a, 1, 1, &[1.0])]).unwrap();
        let u = ComplexEndomorphism::new(&c, vec![map(&a, 1, 1, &[1.0]), map(&a, 1, 1, &[-1.0])]).unwrap();
        assert!(matches!(lefschetz(&c, &u), Err(Error::Precondition(_))));
    }

    #[test]
    fn conjugation_keeps_lefschetz() {
        let c = two_term_zero();
        let a = cplx();
        let u = ComplexEndomorphism::new(&c, vec![map(&a, 1, 1, &[-1.0]), map(&a, 1, 1, &[1.0])]).unwrap();
        let isos = vec![map(&a, 1, 1, &[3.0]), map(&a, 1, 1, &[-0.5])];
        let (c2, u2) = conjugate_complex(&c, &u, &isos).unwrap();
        let (l, l2) = (lefschetz(&c, &u).unwrap(), lefschetz(&c2, &u2).unwrap());
        assert_eq!(l.l1, l2.l1);
        assert!(l.l0.dist(&l2.l0) < 1e-12);
    }
}
