//! Deterministic random instances.
//!
//! Every complex is built one algebra block at a time: each space splits as
//! `B_m ⊕ H_m ⊕ C_m` with `d_m` carrying `C_m` isomorphically onto `B_{m+1}`,
//! so `d² = 0` holds by orthogonality and `H_m` is exactly the harmonic part.
//! The endomorphism shares its phases between `C_m` and `B_{m+1}`, which makes
//! it a chain map by construction.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::instance::{validate_instance, Instance, InstanceBuilder, InstanceFile};
use crate::algebra::{AlgMatrix, BlockAlgebra};
use crate::linalg;
use crate::module::{HilbertModule, ModuleElement};
use crate::operator::ModuleMap;
use crate::{CMat, C64};

/// Size limits for generated instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Profile {
    /// Blocks of size 1 or 2, at most 2 blocks, ambient rank ≤ 3, at most 3 degrees.
    Small,
    /// Blocks of size ≤ 3, at most 3 blocks, ambient rank ≤ 4, at most 5 degrees.
    Medium,
}

impl Profile {
    fn max_block(self) -> usize {
        match self {
            Profile::Small => 2,
            Profile::Medium => 3,
        }
    }

    fn max_blocks(self) -> usize {
        match self {
            Profile::Small => 2,
            Profile::Medium => 3,
        }
    }

    pub fn max_rank(self) -> usize {
        match self {
            Profile::Small => 3,
            Profile::Medium => 4,
        }
    }

    fn max_len(self) -> usize {
        match self {
            Profile::Small => 3,
            Profile::Medium => 5,
        }
    }
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "small" => Ok(Profile::Small),
            "medium" => Ok(Profile::Medium),
            _ => Err(format!("unknown profile {s:?} (expected small or medium)")),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Small => "small",
            Profile::Medium => "medium",
        })
    }
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_matrix(r: usize, c: usize, rng: &mut impl Rng) -> CMat {
    CMat::from_fn(r, c, |_, _| gaussian(rng))
}

pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> CMat {
    linalg::hermitize(&random_matrix(n, n, rng))
}

fn diag(values: impl ExactSizeIterator<Item = C64>) -> CMat {
    let n = values.len();
    CMat::from_diagonal(&DVector::from_iterator(n, values))
}

/// `exp(iH)` for a random Hermitian `H`.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> CMat {
    let (vals, vecs) = linalg::hermitian_eig(&random_hermitian(n, rng));
    let phases = diag(vals.iter().map(|&v| C64::from_polar(1.0, v)));
    &vecs * phases * vecs.adjoint()
}

/// `V diag(s) W` with singular values drawn from `[lo, hi]`, shape `r × c`.
fn random_full_rank(r: usize, c: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> CMat {
    let v = random_unitary(r, rng);
    let w = random_unitary(c, rng);
    let mut s = CMat::zeros(r, c);
    for i in 0..r.min(c) {
        s[(i, i)] = C64::new(rng.random_range(lo..=hi), 0.0);
    }
    v * s * w
}

fn phase(rng: &mut impl Rng, discrete: bool) -> C64 {
    if discrete {
        C64::from_polar(1.0, TAU * rng.random_range(0..6) as f64 / 6.0)
    } else {
        C64::from_polar(1.0, rng.random_range(0.0..TAU))
    }
}

fn columns(w: &CMat, start: usize, len: usize) -> CMat {
    w.columns(start, len).into_owned()
}

/// Per-block orthonormal bases of a random module with the given block ranks.
fn random_bases(algebra: &BlockAlgebra, rank: usize, ranks: &[usize], rng: &mut impl Rng) -> Vec<CMat> {
    algebra
        .block_sizes()
        .iter()
        .zip(ranks)
        .map(|(&n, &k)| columns(&random_unitary(rank * n, rng), 0, k))
        .collect()
}

fn module_from_bases(algebra: &BlockAlgebra, rank: usize, bases: &[CMat]) -> HilbertModule {
    let blocks = bases.iter().map(|b| b * b.adjoint()).collect();
    HilbertModule::new(AlgMatrix::from_blocks(algebra, rank, rank, blocks).expect("shapes fit"))
        .expect("orthonormal bases give projections")
}

/// The map `x ↦ x·(B_M X B_N*)` for per-block coefficient matrices `X`.
fn map_from_coefficients(m: &HilbertModule, bm: &[CMat], n: &HilbertModule, bn: &[CMat], x: &[CMat]) -> ModuleMap {
    let blocks = (0..bm.len()).map(|j| &bm[j] * &x[j] * bn[j].adjoint()).collect();
    let t = AlgMatrix::from_blocks(m.algebra(), m.ambient_rank(), n.ambient_rank(), blocks).expect("shapes fit");
    ModuleMap::compressed(m, n, &t)
}

/// A random module with the same `K_0` class as `module` and an isomorphism onto it.
pub fn random_isomorphic_copy(module: &HilbertModule, max_rank: usize, rng: &mut impl Rng) -> (HilbertModule, ModuleMap) {
    let algebra = module.algebra();
    let ranks: Vec<usize> = module.k0().ranks.iter().map(|&r| r as usize).collect();
    let needed = needed_rank(algebra, &ranks).max(1);
    let rank = rng.random_range(needed..=max_rank.max(needed));
    let target_bases = random_bases(algebra, rank, &ranks, rng);
    let target = module_from_bases(algebra, rank, &target_bases);
    let x: Vec<CMat> = ranks.iter().map(|&k| random_full_rank(k, k, 0.25, 4.0, rng)).collect();
    let iso = map_from_coefficients(module, &module.block_bases(), &target, &target_bases, &x);
    (target, iso)
}

/// A random element `x = y·q` of a module.
pub fn random_element(module: &HilbertModule, rng: &mut impl Rng) -> ModuleElement {
    let algebra = module.algebra();
    let n = module.ambient_rank();
    let blocks = algebra.block_sizes().iter().map(|&b| random_matrix(b, n * b, rng)).collect();
    let y = AlgMatrix::from_blocks(algebra, 1, n, blocks).expect("shapes fit");
    module.project(&y).expect("row of the right length")
}

fn needed_rank(algebra: &BlockAlgebra, ranks: &[usize]) -> usize {
    algebra.block_sizes().iter().zip(ranks).map(|(&n, &k)| k.div_ceil(n)).max().unwrap_or(0)
}

struct ComplexPlan {
    ranks: Vec<usize>,
    spaces: Vec<HilbertModule>,
    differentials: Vec<ModuleMap>,
    endomorphism: Vec<ModuleMap>,
}

fn generate_complex(algebra: &BlockAlgebra, profile: Profile, rng: &mut impl Rng) -> ComplexPlan {
    let len = rng.random_range(2..=profile.max_len());
    let ranks: Vec<usize> = (0..len).map(|_| rng.random_range(1..=profile.max_rank())).collect();
    let k = algebra.num_blocks();
    // per degree, per block: (B, H, C) bases, the differential coefficients and U
    let mut q_blocks = vec![Vec::with_capacity(k); len];
    let mut d_blocks = vec![Vec::with_capacity(k); len - 1];
    let mut u_blocks = vec![Vec::with_capacity(k); len];
    for &n in algebra.block_sizes() {
        let discrete = rng.random_bool(0.5);
        let mut b_dim = 0;
        let mut incoming: Option<Vec<C64>> = None;
        let mut prev_c: Option<(CMat, Vec<f64>)> = None;
        for m in 0..len {
            let cap = ranks[m] * n;
            let avail = cap - b_dim;
            let h_dim = rng.random_range(0..=avail);
            let c_dim = if m + 1 < len { rng.random_range(0..=(avail - h_dim).min(ranks[m + 1] * n)) } else { 0 };
            let w = random_unitary(cap, rng);
            let b = columns(&w, 0, b_dim);
            let h = columns(&w, b_dim, h_dim);
            let c = columns(&w, b_dim + h_dim, c_dim);
            let used = columns(&w, 0, b_dim + h_dim + c_dim);
            q_blocks[m].push(&used * used.adjoint());

            if let Some((c_prev, s)) = prev_c.take() {
                let scale = diag(s.iter().map(|&v| C64::new(v, 0.0)));
                d_blocks[m - 1].push(c_prev * scale * b.adjoint());
            }
            let b_phases = incoming.take().unwrap_or_default();
            let c_phases: Vec<C64> = (0..c_dim).map(|_| phase(rng, discrete)).collect();
            let h_unitary = if discrete {
                let v = random_unitary(h_dim, rng);
                let d = diag((0..h_dim).map(|_| phase(rng, true)));
                &v * d * v.adjoint()
            } else {
                random_unitary(h_dim, rng)
            };
            let u = &b * diag(b_phases.iter().cloned()) * b.adjoint()
                + &h * h_unitary * h.adjoint()
                + &c * diag(c_phases.iter().cloned()) * c.adjoint();
            u_blocks[m].push(u);

            let s: Vec<f64> = (0..c_dim).map(|_| rng.random_range(0.5..=2.0)).collect();
            incoming = Some(c_phases);
            prev_c = Some((c, s));
            b_dim = c_dim;
        }
    }
    let spaces: Vec<HilbertModule> = (0..len)
        .map(|m| {
            let q = AlgMatrix::from_blocks(algebra, ranks[m], ranks[m], std::mem::take(&mut q_blocks[m])).expect("shapes fit");
            HilbertModule::new(q).expect("projection by construction")
        })
        .collect();
    let differentials = (0..len - 1)
        .map(|m| {
            let t = AlgMatrix::from_blocks(algebra, ranks[m], ranks[m + 1], std::mem::take(&mut d_blocks[m])).expect("shapes fit");
            ModuleMap::compressed(&spaces[m], &spaces[m + 1], &t)
        })
        .collect();
    let endomorphism = (0..len)
        .map(|m| {
            let t = AlgMatrix::from_blocks(algebra, ranks[m], ranks[m], std::mem::take(&mut u_blocks[m])).expect("shapes fit");
            ModuleMap::compressed(&spaces[m], &spaces[m], &t)
        })
        .collect();
    ComplexPlan { ranks, spaces, differentials, endomorphism }
}

/// The random instance for `(seed, profile)`; identical bytes for identical inputs.
pub fn generate_instance(seed: u64, profile: Profile) -> InstanceFile {
    let mut rng = rng_for(seed);
    let k = rng.random_range(1..=profile.max_blocks());
    let sizes: Vec<usize> = (0..k).map(|_| rng.random_range(1..=profile.max_block())).collect();
    let algebra = BlockAlgebra::new(sizes).expect("positive block sizes");
    let mut out = InstanceBuilder::new(&algebra);

    let plan = generate_complex(&algebra, profile, &mut rng);
    debug_assert_eq!(plan.ranks.len(), plan.spaces.len());
    let space_names: Vec<String> = (0..plan.spaces.len()).map(|m| format!("E{m}")).collect();
    let d_names: Vec<String> = (0..plan.differentials.len()).map(|m| format!("d{m}")).collect();
    let u_names: Vec<String> = (0..plan.spaces.len()).map(|m| format!("U{m}")).collect();
    for (name, s) in space_names.iter().zip(&plan.spaces) {
        out.module(name, s);
    }
    for (m, d) in plan.differentials.iter().enumerate() {
        out.map(&d_names[m], &space_names[m], &space_names[m + 1], d);
    }
    for (m, u) in plan.endomorphism.iter().enumerate() {
        out.map(&u_names[m], &space_names[m], &space_names[m], u);
    }
    out.complex("c", &space_names, &d_names);
    out.endomorphism("U", "c", &u_names);

    // M, N ≅ M, W ⊇ M
    let max_rank = profile.max_rank();
    let (m_rank, m_ranks) = loop {
        let r = rng.random_range(1..=max_rank);
        let ranks: Vec<usize> = algebra.block_sizes().iter().map(|&n| rng.random_range(0..=r * n)).collect();
        if ranks.iter().sum::<usize>() >= 2 {
            break (r, ranks);
        }
    };
    let bm = random_bases(&algebra, m_rank, &m_ranks, &mut rng);
    let module_m = module_from_bases(&algebra, m_rank, &bm);
    let needed = needed_rank(&algebra, &m_ranks).max(1);
    let n_rank = rng.random_range(needed..=max_rank);
    let bn = random_bases(&algebra, n_rank, &m_ranks, &mut rng);
    let module_n = module_from_bases(&algebra, n_rank, &bn);
    let w_rank = max_rank;
    let w_ranks: Vec<usize> = algebra
        .block_sizes()
        .iter()
        .zip(&m_ranks)
        .map(|(&n, &k)| rng.random_range(k..=w_rank * n))
        .collect();
    let bw = random_bases(&algebra, w_rank, &w_ranks, &mut rng);
    let module_w = module_from_bases(&algebra, w_rank, &bw);
    out.module("M", &module_m).module("N", &module_n).module("W", &module_w);

    let phi: Vec<CMat> = m_ranks
        .iter()
        .map(|&k| {
            let inner = rng.random_range(0..=k);
            random_matrix(k, inner, &mut rng) * random_matrix(inner, k, &mut rng)
        })
        .collect();
    out.map("phi", "M", "N", &map_from_coefficients(&module_m, &bm, &module_n, &bn, &phi));
    let alpha: Vec<CMat> = m_ranks.iter().map(|&k| random_full_rank(k, k, 0.25, 4.0, &mut rng)).collect();
    out.map("alpha", "M", "N", &map_from_coefficients(&module_m, &bm, &module_n, &bn, &alpha));
    let beta: Vec<CMat> = m_ranks
        .iter()
        .zip(&w_ranks)
        .map(|(&k, &l)| random_full_rank(k, l, 0.25, 4.0, &mut rng))
        .collect();
    out.map("beta", "M", "W", &map_from_coefficients(&module_m, &bm, &module_w, &bw, &beta));

    let positive = |rng: &mut ChaCha8Rng, singular_block: Option<usize>| -> Vec<CMat> {
        m_ranks
            .iter()
            .enumerate()
            .map(|(j, &k)| {
                let v = random_unitary(k, rng);
                let mut vals: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..=1.5)).collect();
                if singular_block == Some(j) {
                    vals[0] = 0.0;
                }
                let d = diag(vals.iter().map(|&x| C64::new(x, 0.0)));
                &v * d * v.adjoint()
            })
            .collect()
    };
    let h_pos = positive(&mut rng, None);
    let singular_block = m_ranks.iter().position(|&k| k > 0);
    let h_sing = positive(&mut rng, singular_block);
    out.map("h_pos", "M", "M", &hermitian_map(&module_m, &bm, &h_pos));
    out.map("h_sing", "M", "M", &hermitian_map(&module_m, &bm, &h_sing));
    let u: Vec<CMat> = m_ranks.iter().map(|&k| random_unitary(k, &mut rng)).collect();
    out.map("u", "M", "M", &map_from_coefficients(&module_m, &bm, &module_m, &bm, &u));
    out.build()
}

fn hermitian_map(m: &HilbertModule, bm: &[CMat], x: &[CMat]) -> ModuleMap {
    let raw = map_from_coefficients(m, bm, m, bm, x);
    ModuleMap::compressed(m, m, &raw.matrix().hermitian_part())
}

/// [`generate_instance`] followed by validation.
pub fn generate(seed: u64, profile: Profile) -> Instance {
    validate_instance(generate_instance(seed, profile)).expect("generated instances are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::instance::emit_instance;
    use crate::complex::validate_complex;

    #[test]
    fn deterministic_bytes() {
        assert_eq!(emit_instance(&generate_instance(0, Profile::Small)), emit_instance(&generate_instance(0, Profile::Small)));
        assert_ne!(emit_instance(&generate_instance(0, Profile::Small)), emit_instance(&generate_instance(1, Profile::Small)));
    }

    #[test]
    fn generated_complexes_are_complexes() {
        for seed in 0..20 {
            for profile in [Profile::Small, Profile::Medium] {
                let inst = generate(seed, profile);
                let c = &inst.complexes["c"];
                assert!(validate_complex(c).pass, "seed {seed}");
                let (_, u) = &inst.endomorphisms["U"];
                let report = u.validate(c);
                assert!(report.chain_residuals.iter().all(|&r| r <= 1e-10), "seed {seed}: {report:?}");
            }
        }
    }

    #[test]
    fn profile_limits() {
        for seed in 0..20 {
            let inst = generate(seed, Profile::Small);
            assert!(inst.algebra.num_blocks() <= 2);
            assert!(inst.algebra.block_sizes().iter().all(|&n| n <= 2));
            assert!(inst.modules.values().all(|m| m.ambient_rank() <= 3));
            assert!(inst.complexes["c"].len() <= 3);
        }
    }
}
