use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wstar::cli::generate::{generate, random_matrix, random_unitary, Profile};
use wstar::cli::instance::{format_complex, parse_complex};
use wstar::complex::{chern_consistency, ChernWeighting};
use wstar::operator::{fredholm_index, operator_sqrt, SqrtMethod};
use wstar::spectral::{spectral_function, spectral_measure};
use wstar::{oracle, AlgMatrix, BlockAlgebra, HilbertModule, ModuleMap, C64};

fn algebra() -> impl Strategy<Value = BlockAlgebra> {
    prop::collection::vec(1usize..=3, 1..=3).prop_map(|b| BlockAlgebra::new(b).unwrap())
}

fn random_map(a: &BlockAlgebra, rows: usize, cols: usize, seed: u64) -> ModuleMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks = a.block_sizes().iter().map(|&n| random_matrix(rows * n, cols * n, &mut rng)).collect();
    let t = AlgMatrix::from_blocks(a, rows, cols, blocks).unwrap();
    ModuleMap::new(&HilbertModule::free(a, rows), &HilbertModule::free(a, cols), t).unwrap()
}

fn random_unitary_map(a: &BlockAlgebra, n: usize, seed: u64) -> ModuleMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks = a.block_sizes().iter().map(|&b| random_unitary(n * b, &mut rng)).collect();
    let m = HilbertModule::free(a, n);
    ModuleMap::new(&m, &m, AlgMatrix::from_blocks(a, n, n, blocks).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn index_is_rank_difference(a in algebra(), r in 0usize..4, c in 0usize..4, seed: u64) {
        let phi = random_map(&a, r, c, seed);
        let expected = &phi.source().k0() - &phi.target().k0();
        prop_assert_eq!(fredholm_index(&phi), expected);
    }

    #[test]
    fn kernel_matches_oracle(a in algebra(), r in 1usize..4, c in 1usize..4, seed: u64) {
        let phi = random_map(&a, r, c, seed);
        let psi = random_map(&a, c, r, seed ^ 1);
        let composite = phi.then(&psi).unwrap();
        let k = composite.kernel_projection().k0();
        prop_assert_eq!(k.complex_dim(&a) as usize, oracle::oracle_kernel_dim(&composite));
    }

    #[test]
    fn spectral_measure_resolves_random_unitaries(a in algebra(), n in 1usize..4, seed: u64) {
        let u = random_unitary_map(&a, n, seed);
        let m = spectral_measure(&u).unwrap();
        prop_assert!(m.reconstruction_residual(&u) <= 1e-8);
        prop_assert!(m.completeness_residual() <= 1e-8);
        prop_assert_eq!(spectral_function(&u).unwrap().total(), u.source().k0());
    }

    #[test]
    fn sqrt_squares_back(a in algebra(), n in 1usize..4, seed: u64) {
        let x = random_map(&a, n, n, seed);
        let h = x.then(&x.adjoint()).unwrap();
        let s = operator_sqrt(&h, SqrtMethod::Oracle).unwrap();
        prop_assert!(s.then(&s).unwrap().dist(&h) <= 1e-8 * (1.0 + h.norm()));
    }

    #[test]
    fn chern_identity_on_generated_instances(seed in 1000u64..100_000) {
        let inst = generate(seed, Profile::Small);
        let (cname, u) = &inst.endomorphisms["U"];
        let check = chern_consistency(&inst.complexes[cname], u, ChernWeighting::Weighted).unwrap();
        prop_assert!(check.equal, "{} vs {}", check.lhs, check.rhs);
    }

    #[test]
    fn complex_numbers_round_trip(re: f64, im: f64) {
        let z = C64::new(re, im);
        let back = parse_complex(&format_complex(z)).unwrap();
        prop_assert!(back == z || (re.is_nan() || im.is_nan()));
    }
}
