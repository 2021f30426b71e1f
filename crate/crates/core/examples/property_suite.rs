//! Runs the full property suite on a few generated instances, or on an instance file.

use wstar::cli::generate::Profile;
use wstar::cli::instance::parse_instance;
use wstar::cli::suite::{run_suite, SuiteOptions};
use wstar::complex::ChernWeighting;

fn main() {
    let path = std::env::args().nth(1);
    let runs: Vec<(String, wstar::cli::instance::Instance, u64)> = match path {
        Some(p) => vec![(p.clone(), parse_instance(p.as_ref()).unwrap_or_else(|e| panic!("{e}")), 0)],
        None => (0..3).map(|s| (format!("seed {s}"), wstar::cli::generate::generate(s, Profile::Small), s)).collect(),
    };
    for (label, inst, seed) in runs {
        let options = SuiteOptions { seed, profile: Profile::Small, weighting: ChernWeighting::Weighted, parallel: 2 };
        let props = run_suite(&inst, &options);
        let failed: Vec<_> = props.iter().filter(|p| !p.pass).collect();
        println!("{label}: {} properties, {} failed", props.len(), failed.len());
        for p in failed {
            println!("  FAIL {} {}", p.name, p.detail);
        }
    }
}
