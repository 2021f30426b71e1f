//! The property suite behind `wstar check`.
//!
//! The suite is a list of independent cases; each case derives its own random
//! stream from the seed and its index, so serial and parallel runs produce the
//! same results in the same order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::generate::{generate, random_element, random_isomorphic_copy, Profile};
use super::instance::Instance;
use crate::algebra::{blocktrace, chern_ch0, k0_of_projection, AlgElem, HC0Class, K0Class};
use crate::complex::{
    chern_check_of, conjugate_complex, fredholm_f, hodge_identity_residuals, lefschetz, validate_complex, ChernWeighting,
    ComplexEndomorphism, FiniteComplex,
};
use crate::error::Error;
use crate::module::{
    biorthogonal_complement, inner_product, intersect, is_direct_summand, orthogonal_complement, structure_decompose,
    submodule_sum, HilbertModule, ModuleElement,
};
use crate::operator::{embed_as_summand, fredholm_index, operator_sqrt, polar_isometry, ModuleMap, SqrtMethod};
use crate::oracle;
use crate::spectral::{
    conjugation_invariance_check, cyclic_trace_of, spectral_function, spectral_function_of, spectral_measure,
};
use crate::tol::tolerances;
use crate::C64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Property {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Property {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Property { name: name.into(), pass, detail: detail.into() }
    }

    fn residual(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Property::new(name, value <= bound, format!("residual {value:.3e} (bound {bound:.0e})"))
    }

    fn exact<T: PartialEq + std::fmt::Display>(name: impl Into<String>, got: &T, want: &T) -> Self {
        Property::new(name, got == want, format!("{got} vs {want}"))
    }

    fn error(name: impl Into<String>, e: &Error) -> Self {
        Property::new(name, false, format!("error: {e}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub profile: Profile,
    pub weighting: ChernWeighting,
    pub parallel: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { seed: 0, profile: Profile::Small, weighting: ChernWeighting::Weighted, parallel: 1 }
    }
}

enum Case<'a> {
    Algebra,
    Module(&'a str, &'a HilbertModule),
    Map(&'a str, &'a ModuleMap),
    Invariance(&'a str, &'a ModuleMap, &'a str, &'a ModuleMap),
    Complex(String, FiniteComplex, ComplexEndomorphism),
}

fn case_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index as u64 + 1))
}

fn max_rank(inst: &Instance) -> usize {
    inst.modules.values().map(HilbertModule::ambient_rank).max().unwrap_or(1).max(1)
}

/// Runs every property that applies to the instance.
///
/// Without a complex in the instance, one is synthesized from `options.seed`.
pub fn run_suite(inst: &Instance, options: &SuiteOptions) -> Vec<Property> {
    let mut cases = vec![Case::Algebra];
    cases.extend(inst.modules.iter().map(|(n, m)| Case::Module(n, m)));
    cases.extend(inst.maps.iter().map(|(n, m)| Case::Map(n, m)));
    for (un, u) in &inst.maps {
        if !(u.is_endomorphism() && u.is_unitary()) {
            continue;
        }
        for (jn, j) in &inst.maps {
            if jn != un && j.source().same_as(u.source()) && is_bijective(j) {
                cases.push(Case::Invariance(un, u, jn, j));
            }
        }
    }
    let mut with_endo = std::collections::BTreeSet::new();
    for (en, (cn, e)) in &inst.endomorphisms {
        with_endo.insert(cn.clone());
        cases.push(Case::Complex(format!("{cn}/{en}"), inst.complexes[cn].clone(), e.clone()));
    }
    for (cn, c) in &inst.complexes {
        if !with_endo.contains(cn) {
            cases.push(Case::Complex(format!("{cn}/id"), c.clone(), ComplexEndomorphism::identity(c)));
        }
    }
    if inst.complexes.is_empty() {
        let synth = generate(options.seed, options.profile);
        let (_, e) = synth.endomorphisms["U"].clone();
        cases.push(Case::Complex("synthesized/U".into(), synth.complexes["c"].clone(), e));
    }

    let rank = max_rank(inst);
    let run = |index: usize, case: &Case| -> Vec<Property> {
        let mut rng = case_rng(options.seed, index);
        match case {
            Case::Algebra => algebra_case(inst, &mut rng),
            Case::Module(n, m) => module_case(n, m, &mut rng),
            Case::Map(n, m) => map_case(n, m, &mut rng),
            Case::Invariance(un, u, jn, j) => invariance_case(un, u, jn, j),
            Case::Complex(n, c, e) => complex_case(n, c, e, options.weighting, rank, &mut rng),
        }
    };

    let workers = options.parallel.max(1).min(cases.len().max(1));
    let mut results: Vec<Vec<Property>> = vec![Vec::new(); cases.len()];
    if workers <= 1 {
        for (i, case) in cases.iter().enumerate() {
            results[i] = run(i, case);
        }
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let cases = &cases;
                    let run = &run;
                    scope.spawn(move || {
                        (w..cases.len()).step_by(workers).map(|i| (i, run(i, &cases[i]))).collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                for (i, props) in h.join().expect("suite worker panicked") {
                    results[i] = props;
                }
            }
        });
    }
    results.into_iter().flatten().collect()
}

fn is_bijective(j: &ModuleMap) -> bool {
    j.kernel_projection().k0().is_zero() && j.cokernel_projection().k0().is_zero() && !j.source().is_zero()
}

fn random_alg(inst: &Instance, rng: &mut ChaCha8Rng) -> AlgElem {
    let blocks = inst.algebra.block_sizes().iter().map(|&n| super::generate::random_matrix(n, n, rng)).collect();
    AlgElem::new(&inst.algebra, blocks).expect("shapes fit")
}

fn algebra_case(inst: &Instance, rng: &mut ChaCha8Rng) -> Vec<Property> {
    let mut out = Vec::new();
    let (a, b, c) = (random_alg(inst, rng), random_alg(inst, rng), random_alg(inst, rng));
    let scale = 1.0 + a.norm() * b.norm() * c.norm();
    let ab = a.checked_mul(&b).unwrap();
    let assoc = ab.checked_mul(&c).unwrap().dist(&a.checked_mul(&b.checked_mul(&c).unwrap()).unwrap());
    out.push(Property::residual("algebra.associativity", assoc / scale, tolerances().identity()));
    let anti = ab.adjoint().dist(&b.adjoint().checked_mul(&a.adjoint()).unwrap());
    out.push(Property::residual("algebra.adjoint", anti / scale, tolerances().identity()));

    let mut total = K0Class::zero(inst.algebra.num_blocks());
    let mut traces = HC0Class::zero(inst.algebra.num_blocks());
    for (name, m) in &inst.modules {
        match k0_of_projection(m.projection()) {
            Ok(k) => {
                let oracle_dim = oracle::oracle_module_dim(m) as i64;
                out.push(Property::exact(format!("algebra.k0_dimension[{name}]"), &k.complex_dim(&inst.algebra), &oracle_dim));
                let trace = blocktrace(&m.projection().entry_trace());
                out.push(Property::residual(format!("algebra.trace_vs_chern[{name}]"), trace.dist(&chern_ch0(&k)), tolerances().identity()));
                total += &k;
                traces = &traces + &trace;
            }
            Err(e) => out.push(Property::error(format!("algebra.k0[{name}]"), &e)),
        }
    }
    out.push(Property::residual("algebra.chern_additive", chern_ch0(&total).dist(&traces), tolerances().identity()));
    out
}

fn element_pair(m: &HilbertModule, rng: &mut ChaCha8Rng) -> (ModuleElement, ModuleElement) {
    (random_element(m, rng), random_element(m, rng))
}

fn module_case(name: &str, m: &HilbertModule, rng: &mut ChaCha8Rng) -> Vec<Property> {
    let mut out = Vec::new();
    let tol = tolerances();
    let (x, y) = element_pair(m, rng);
    let a = {
        let blocks = m.algebra().block_sizes().iter().map(|&n| super::generate::random_matrix(n, n, rng)).collect();
        AlgElem::new(m.algebra(), blocks).unwrap()
    };
    let xy = inner_product(&x, &y).unwrap();
    let scale = 1.0 + a.norm() * xy.norm();
    let linear = inner_product(&x.left_mul(&a).unwrap(), &y).unwrap().dist(&a.checked_mul(&xy).unwrap());
    let hermitian = inner_product(&y, &x).unwrap().dist(&xy.adjoint());
    let positive = inner_product(&x, &x).unwrap().min_hermitian_eigenvalue();
    out.push(Property::new(
        format!("module.inner_product[{name}]"),
        linear / scale <= tol.identity() && hermitian / scale <= tol.identity() && positive >= -tol.identity(),
        format!("linearity {:.3e}, symmetry {:.3e}, min ⟨x,x⟩ eigenvalue {positive:.3e}", linear / scale, hermitian / scale),
    ));

    let pieces = structure_decompose(m);
    let classes = pieces.iter().map(|p| p.submodule().k0()).fold(K0Class::zero(m.algebra().num_blocks()), |acc, c| &acc + &c);
    let mut overlap: f64 = 0.0;
    for (i, p) in pieces.iter().enumerate() {
        for q in &pieces[i + 1..] {
            overlap = overlap.max((p.submodule().projection() * q.submodule().projection()).norm());
        }
    }
    out.push(Property::new(
        format!("module.cyclic_decomposition[{name}]"),
        classes == m.k0() && overlap <= tol.residual(),
        format!("{} pieces, classes sum to {classes}, overlap {overlap:.3e}", pieces.len()),
    ));

    // P = span(x1, x2), Q = span(x2, x3): P ∩ Q ⊇ A·x2
    let x3 = random_element(m, rng);
    let result = (|| -> crate::Result<Property> {
        let p = biorthogonal_complement(&[x.clone(), y.clone()], m)?;
        let q = biorthogonal_complement(&[y.clone(), x3.clone()], m)?;
        let meet = intersect(&p, &q)?;
        let join = submodule_sum(&p, &q)?;
        let lhs = &meet.k0() + &join.k0();
        let rhs = &p.k0() + &q.k0();
        let inside = (meet.projection() * p.projection()).dist(meet.projection())
            .max((meet.projection() * q.projection()).dist(meet.projection()));
        let contains_y = meet.membership_residual(&y);
        Ok(Property::new(
            format!("module.intersection_sum[{name}]"),
            lhs == rhs && inside <= tol.residual() && contains_y <= tol.residual(),
            format!("[P∩Q]+[P+Q] = {lhs}, [P]+[Q] = {rhs}, containment {:.3e}", inside.max(contains_y)),
        ))
    })();
    out.push(result.unwrap_or_else(|e| Property::error(format!("module.intersection_sum[{name}]"), &e)));

    let summand = is_direct_summand(std::slice::from_ref(&x), m);
    out.push(match summand {
        Ok(Some(s)) => Property::residual(format!("module.direct_summand[{name}]"), s.membership_residual(&x), tol.residual()),
        Ok(None) => Property::new(format!("module.direct_summand[{name}]"), false, "cyclic submodule not recognised as a summand"),
        Err(e) => Property::error(format!("module.direct_summand[{name}]"), &e),
    });
    out
}

/// `max ‖⟨xV, yV⟩ − ⟨x, y⟩‖` over random pairs.
pub fn isometry_defect(v: &ModuleMap, pairs: usize, rng: &mut impl Rng) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let x = random_element(v.source(), rng);
        let y = random_element(v.source(), rng);
        let before = inner_product(&x, &y).unwrap();
        let after = inner_product(&v.apply(&x).unwrap(), &v.apply(&y).unwrap()).unwrap();
        worst = worst.max(after.dist(&before) / (1.0 + before.norm()));
    }
    worst
}

/// `(‖r_ker + r_ker^⊥ − q‖, ‖r_ker^⊥⊥ − r_ker‖)`.
pub fn kernel_summand_residuals(phi: &ModuleMap) -> crate::Result<(f64, f64)> {
    let ker = phi.kernel_projection();
    let gens = ker.generators();
    let perp = orthogonal_complement(&gens, phi.source())?;
    let split = (ker.projection() + perp.projection()).dist(phi.source().projection());
    let again = biorthogonal_complement(&gens, phi.source())?;
    Ok((split, again.dist(&ker)))
}

fn map_case(name: &str, phi: &ModuleMap, rng: &mut ChaCha8Rng) -> Vec<Property> {
    let mut out = Vec::new();
    let tol = tolerances();
    let algebra = phi.source().algebra().clone();

    match kernel_summand_residuals(phi) {
        Ok((split, again)) => out.push(Property::residual(format!("kernel.summand[{name}]"), split.max(again), tol.residual())),
        Err(e) => out.push(Property::error(format!("kernel.summand[{name}]"), &e)),
    }
    let ker = phi.kernel_projection().k0().complex_dim(&algebra);
    let oracle_ker = oracle::oracle_kernel_dim(phi) as i64;
    let range = phi.range_projection().k0().complex_dim(&algebra);
    let oracle_range = oracle::oracle_range_dim(phi) as i64;
    out.push(Property::new(
        format!("oracle.kernel_dimension[{name}]"),
        ker == oracle_ker && range == oracle_range,
        format!("kernel {ker} vs {oracle_ker}, range {range} vs {oracle_range}"),
    ));

    let x = random_element(phi.source(), rng);
    let y = random_element(phi.target(), rng);
    let lhs = inner_product(&phi.apply(&x).unwrap(), &y).unwrap();
    let rhs = inner_product(&x, &phi.adjoint().apply(&y).unwrap()).unwrap();
    out.push(Property::residual(format!("operator.adjoint[{name}]"), lhs.dist(&rhs) / (1.0 + lhs.norm()), tol.identity()));

    let index = fredholm_index(phi);
    let expected = &phi.source().k0() - &phi.target().k0();
    out.push(Property::exact(format!("operator.index[{name}]"), &index, &expected));

    let composite = phi.then(&phi.adjoint()).unwrap();
    let functorial = (oracle::flatten(phi) * oracle::flatten(&phi.adjoint()) - oracle::flatten(&composite)).norm();
    out.push(Property::residual(format!("oracle.functoriality[{name}]"), functorial / (1.0 + phi.norm().powi(2)), tol.drift()));

    if phi.is_endomorphism() && phi.is_unitary() {
        out.extend(unitary_properties(name, phi));
    }
    if phi.is_endomorphism()
        && phi.self_adjoint_residual() <= tol.identity()
        && phi.min_module_eigenvalue() >= -tol.identity()
    {
        out.extend(sqrt_properties(name, phi));
    }
    if phi.is_injective() && !phi.source().is_zero() {
        out.extend(polar_properties(name, phi, rng));
    }
    out
}

fn expand_angles(function_points: &[(f64, usize)], f: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut v: Vec<f64> = function_points.iter().flat_map(|&(a, mult)| std::iter::repeat_n(f(a), mult)).collect();
    v.sort_by(f64::total_cmp);
    v
}

fn spectrum_gap(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn unitary_properties(name: &str, u: &ModuleMap) -> Vec<Property> {
    let tol = tolerances();
    let mut out = Vec::new();
    let algebra = u.source().algebra().clone();
    let measure = match spectral_measure(u) {
        Ok(m) => m,
        Err(e) => return vec![Property::error(format!("spectral.measure[{name}]"), &e)],
    };
    let recon = measure.reconstruction_residual(u);
    let complete = measure.completeness_residual();
    let orth = measure.orthogonality_residual();
    out.push(Property::residual(format!("spectral.measure[{name}]"), recon.max(complete).max(orth), tol.residual()));
    match spectral_function_of(&measure) {
        Ok(f) => out.push(Property::exact(format!("spectral.classes[{name}]"), &f.total(), &u.source().k0())),
        Err(e) => out.push(Property::error(format!("spectral.classes[{name}]"), &e)),
    }

    let trace = cyclic_trace_of(&measure);
    let flat = oracle::oracle_trace(u);
    let weighted: C64 = trace.traces.iter().zip(algebra.block_sizes()).map(|(t, &n)| t * n as f64).sum();
    out.push(Property::residual(format!("spectral.trace_bridge[{name}]"), (flat - weighted).norm(), tol.residual()));
    match spectral_measure(&u.adjoint()) {
        Ok(m) => out.push(Property::residual(
            format!("spectral.adjoint_trace[{name}]"),
            cyclic_trace_of(&m).dist(&trace.conj()),
            tol.identity(),
        )),
        Err(e) => out.push(Property::error(format!("spectral.adjoint_trace[{name}]"), &e)),
    }

    // Independent check of the eigen-angles: cos and sin parts via the oracle.
    let mults: Vec<(f64, usize)> = measure
        .points()
        .iter()
        .map(|p| {
            let dim = k0_of_projection(p.projection.matrix()).map_or(0, |k| k.complex_dim(&algebra));
            (p.angle, dim as usize)
        })
        .collect();
    let m = u.source();
    let re = ModuleMap::compressed(m, m, &u.matrix().hermitian_part());
    let im = ModuleMap::compressed(m, m, &(u.matrix() - &u.matrix().adjoint()).scale(C64::new(0.0, -0.5)));
    let gap_cos = spectrum_gap(&oracle::oracle_module_spectrum(&re), &expand_angles(&mults, f64::cos));
    let gap_sin = spectrum_gap(&oracle::oracle_module_spectrum(&im), &expand_angles(&mults, f64::sin));
    out.push(Property::residual(format!("oracle.eigen_angles[{name}]"), gap_cos.max(gap_sin), tol.residual()));
    out
}

fn sqrt_properties(name: &str, h: &ModuleMap) -> Vec<Property> {
    let tol = tolerances();
    let reference = match operator_sqrt(h, SqrtMethod::Oracle) {
        Ok(s) => s,
        Err(e) => return vec![Property::error(format!("operator.sqrt[{name}]"), &e)],
    };
    let mut out = Vec::new();
    match operator_sqrt(h, SqrtMethod::Series) {
        Ok(s) => {
            let agree = s.dist(&reference);
            let square = s.then(&s).unwrap().dist(h);
            out.push(Property::new(
                format!("operator.sqrt[{name}]"),
                agree <= tol.sqrt_agreement() && square <= tol.sqrt_agreement(),
                format!("series vs oracle {agree:.3e}, square {square:.3e}"),
            ));
        }
        Err(Error::Convergence { limit, last_term }) => out.push(Property::new(
            format!("operator.sqrt[{name}]"),
            true,
            format!(
                "flagged non-convergent after {limit} terms (last summand {last_term:.3e}, min eigenvalue {:.3e})",
                h.min_module_eigenvalue()
            ),
        )),
        Err(e) => out.push(Property::error(format!("operator.sqrt[{name}]"), &e)),
    }
    let squared: Vec<f64> = oracle::oracle_module_spectrum(&reference).iter().map(|v| v * v).collect();
    let gap = spectrum_gap(&squared, &oracle::oracle_module_spectrum(h));
    out.push(Property::residual(format!("oracle.sqrt_spectrum[{name}]"), gap, tol.sqrt_agreement()));
    out
}

fn polar_properties(name: &str, alpha: &ModuleMap, rng: &mut ChaCha8Rng) -> Vec<Property> {
    let tol = tolerances();
    let defect = &alpha.target().k0() - &alpha.source().k0();
    let surjective = alpha.cokernel_projection().k0().is_zero();
    let mut out = Vec::new();
    match polar_isometry(alpha) {
        Ok(v) => {
            let pairs = isometry_defect(&v, 50, rng);
            let left = (v.matrix() * &v.matrix().adjoint()).dist(alpha.source().projection());
            let right = (&v.matrix().adjoint() * v.matrix()).dist(alpha.target().projection());
            out.push(Property::new(
                format!("operator.polar[{name}]"),
                surjective && pairs <= tol.residual() && left <= tol.residual() && right <= tol.residual(),
                format!("pairs {pairs:.3e}, VV* − q {left:.3e}, V*V − q' {right:.3e}"),
            ));
        }
        Err(Error::RangeDefect { defect: d, .. }) => {
            out.push(Property::new(
                format!("operator.range_defect[{name}]"),
                !surjective && d == defect,
                format!("defect class {d}, expected {defect}"),
            ));
        }
        Err(e) => out.push(Property::error(format!("operator.polar[{name}]"), &e)),
    }
    if !surjective {
        match embed_as_summand(alpha) {
            Ok((v, complement)) => {
                let pairs = isometry_defect(&v, 50, rng);
                let left = (v.matrix() * &v.matrix().adjoint()).dist(alpha.source().projection());
                let image = &v.matrix().adjoint() * v.matrix();
                let split = (&image + complement.projection()).dist(alpha.target().projection());
                out.push(Property::new(
                    format!("operator.embedding[{name}]"),
                    pairs <= tol.residual() && left <= tol.residual() && split <= tol.residual(),
                    format!("pairs {pairs:.3e}, VV* − q {left:.3e}, V*V + complement − q' {split:.3e}"),
                ));
            }
            Err(e) => out.push(Property::error(format!("operator.embedding[{name}]"), &e)),
        }
    }
    out
}

fn invariance_case(un: &str, u: &ModuleMap, jn: &str, j: &ModuleMap) -> Vec<Property> {
    let name = format!("spectral.invariance[{un} via {jn}]");
    let result = (|| -> crate::Result<Property> {
        let check = conjugation_invariance_check(u, j)?;
        let before = spectral_function(u)?;
        let after = spectral_function(&check.transported)?;
        let same = before.matches(&after, tolerances().cluster());
        Ok(Property::new(
            name.clone(),
            check.equal && same,
            format!(
                "trace difference {:.3e}, spectral functions {}",
                check.trace_source.dist(&check.trace_target),
                if same { "agree" } else { "differ" }
            ),
        ))
    })();
    vec![result.unwrap_or_else(|e| Property::error(name, &e))]
}

fn complex_case(
    name: &str,
    c: &FiniteComplex,
    u: &ComplexEndomorphism,
    weighting: ChernWeighting,
    max_rank: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Property> {
    let tol = tolerances();
    let algebra = c.algebra().clone();
    let mut out = Vec::new();
    let report = validate_complex(c);
    let worst = report.residuals.iter().cloned().fold(0.0, f64::max);
    out.push(Property::residual(format!("complex.d_squared[{name}]"), worst, tol.identity()));
    let endo = u.validate(c);
    let worst_u = endo.unitary_residuals.iter().chain(&endo.chain_residuals).cloned().fold(0.0, f64::max);
    out.push(Property::residual(format!("complex.chain_map[{name}]"), worst_u, tol.identity()));
    if !report.pass || !endo.pass {
        return out;
    }

    let data = match lefschetz(c, u) {
        Ok(d) => d,
        Err(e) => {
            out.push(Property::error(format!("complex.lefschetz[{name}]"), &e));
            return out;
        }
    };
    let h = &data.harmonic;
    out.push(Property::residual(format!("complex.harmonic_closed[{name}]"), h.closedness_residual(c), tol.residual()));
    let inv = h.invariance_residuals(u).into_iter().fold(0.0, f64::max);
    out.push(Property::residual(format!("complex.harmonic_invariant[{name}]"), inv, tol.residual()));
    let summand = h
        .h()
        .iter()
        .map(|s| s.projection().projection_residual().max((s.projection() * s.ambient().projection()).dist(s.projection())))
        .fold(0.0, f64::max);
    out.push(Property::residual(format!("complex.harmonic_summands[{name}]"), summand, tol.identity()));
    match hodge_identity_residuals(c, h) {
        Ok((ev, od)) => out.push(Property::residual(format!("complex.hodge_identity[{name}]"), ev.max(od), tol.residual())),
        Err(e) => out.push(Property::error(format!("complex.hodge_identity[{name}]"), &e)),
    }

    let f = match fredholm_f(c) {
        Ok(f) => f,
        Err(e) => {
            out.push(Property::error(format!("complex.index[{name}]"), &e));
            return out;
        }
    };
    let index = fredholm_index(&f);
    let euler = c.euler_characteristic();
    let harmonic = h.euler_class();
    out.push(Property::new(
        format!("complex.index[{name}]"),
        index == euler && index == harmonic,
        format!("Ind F = {index}, Σ(−1)^m [E_m] = {euler}, [H_ev] − [H_od] = {harmonic}"),
    ));
    let f_ker = f.kernel_projection().k0().complex_dim(&algebra);
    let f_oracle = oracle::oracle_kernel_dim(&f) as i64;
    out.push(Property::exact(format!("oracle.kernel_dimension[{name}/F]"), &f_ker, &f_oracle));
    let betti: Vec<i64> = h.ranks().iter().map(|k| k.complex_dim(&algebra)).collect();
    let oracle_betti: Vec<i64> = oracle::oracle_betti(c).into_iter().map(|d| d as i64).collect();
    out.push(Property::new(
        format!("oracle.betti[{name}]"),
        betti == oracle_betti,
        format!("{betti:?} vs {oracle_betti:?}"),
    ));

    let spectral = data
        .measures
        .iter()
        .zip(&data.restricted)
        .map(|(m, v)| m.reconstruction_residual(v).max(m.completeness_residual()))
        .fold(0.0, f64::max);
    out.push(Property::residual(format!("complex.restricted_spectral[{name}]"), spectral, tol.residual()));

    let chern = chern_check_of(&data, weighting);
    out.push(Property::new(
        format!("complex.chern[{name}]"),
        chern.equal,
        format!("L0 = {}, Σ e^(iφ) ch(L1(φ)) = {}, difference {:.3e}", chern.lhs, chern.rhs, chern.lhs.dist(&chern.rhs)),
    ));
    let flat = oracle::oracle_lefschetz(c, u);
    let weighted: C64 = data.l0.traces.iter().zip(algebra.block_sizes()).map(|(t, &n)| t * n as f64).sum();
    out.push(Property::residual(format!("oracle.lefschetz_bridge[{name}]"), (flat - weighted).norm(), tol.residual()));

    match lefschetz(c, &ComplexEndomorphism::identity(c)) {
        Ok(id) => {
            let support_ok = id.l1.support().iter().all(|(a, _)| *a == 0.0);
            let class_ok = id.l1.total() == index;
            let l0 = id.l0.dist(&chern_ch0(&index));
            out.push(Property::new(
                format!("complex.identity_lefschetz[{name}]"),
                support_ok && class_ok && l0 <= tol.identity(),
                format!("L1 total {}, L0 − ch(Ind F) {l0:.3e}", id.l1.total()),
            ));
        }
        Err(e) => out.push(Property::error(format!("complex.identity_lefschetz[{name}]"), &e)),
    }

    let isos: Vec<ModuleMap> = c.spaces().iter().map(|s| random_isomorphic_copy(s, max_rank, rng).1).collect();
    let moved = conjugate_complex(c, u, &isos).and_then(|(c2, u2)| lefschetz(&c2, &u2));
    match moved {
        Ok(d2) => {
            let same = data.l1.matches(&d2.l1, tol.cluster());
            let l0 = data.l0.dist(&d2.l0);
            out.push(Property::new(
                format!("complex.isomorphism_invariance[{name}]"),
                same && l0 <= tol.identity(),
                format!("L1 {}, L0 difference {l0:.3e}", if same { "unchanged" } else { "changed" }),
            ));
        }
        Err(e) => out.push(Property::error(format!("complex.isomorphism_invariance[{name}]"), &e)),
    }
    out
}

/// Convenience for callers holding a single complex.
pub fn complex_properties(c: &FiniteComplex, u: &ComplexEndomorphism, weighting: ChernWeighting, seed: u64) -> Vec<Property> {
    let max_rank = c.spaces().iter().map(HilbertModule::ambient_rank).max().unwrap_or(1).max(1);
    complex_case("c", c, u, weighting, max_rank, &mut case_rng(seed, 0))
}
