//! Finite models of the three infinite-dimensional examples: non-complemented kernels,
//! non-closed ranges and non-complemented closed submodules all disappear once the
//! algebra is a W*-algebra.

use wstar::cli::demo::{run_example, Example};

fn main() {
    let mut all = true;
    for ex in [Example::Example1, Example::Example2, Example::Example3] {
        let (report, pass) = run_example(ex);
        print!("{}", report.text(None));
        println!();
        all &= pass;
    }
    std::process::exit(if all { 0 } else { 2 });
}
