//! The Taylor-series square root against a diagonalizing reference, and polar isometries
//! of injective maps.

use wstar::operator::{embed_as_summand, operator_sqrt, polar_isometry, SqrtMethod};
use wstar::{AlgMatrix, BlockAlgebra, CMat, Error, HilbertModule, ModuleMap, C64};

fn over_c(rows: usize, cols: usize, entries: &[f64]) -> ModuleMap {
    let a = BlockAlgebra::new(vec![1]).unwrap();
    let m = CMat::from_row_slice(rows, cols, &entries.iter().map(|&v| C64::new(v, 0.0)).collect::<Vec<_>>());
    let t = AlgMatrix::from_blocks(&a, rows, cols, vec![m]).unwrap();
    ModuleMap::new(&HilbertModule::free(&a, rows), &HilbertModule::free(&a, cols), t).unwrap()
}

fn main() -> wstar::Result<()> {
    let h = over_c(2, 2, &[2.0, 1.0, 1.0, 2.0]);
    let series = operator_sqrt(&h, SqrtMethod::Series)?;
    let reference = operator_sqrt(&h, SqrtMethod::Oracle)?;
    println!("sqrt [[2,1],[1,2]]: series vs reference {:.2e}", series.dist(&reference));
    println!("{}", series.matrix().block(0));

    let singular = over_c(2, 2, &[1.0, 0.0, 0.0, 0.0]);
    match operator_sqrt(&singular, SqrtMethod::Series) {
        Err(Error::Convergence { limit, last_term }) => {
            println!("diag(1, 0): series flagged after {limit} terms (last summand {last_term:.2e})")
        }
        other => println!("diag(1, 0): {other:?}"),
    }

    let alpha = over_c(2, 2, &[0.0, 2.0, 1.0, 0.0]);
    let v = polar_isometry(&alpha)?;
    println!("polar isometry of [[0,2],[1,0]]:{}", v.matrix().block(0));

    let wide = over_c(1, 2, &[3.0, 4.0]);
    match polar_isometry(&wide) {
        Err(Error::RangeDefect { defect, .. }) => println!("C → C^2 is not onto; defect class {defect}"),
        other => println!("{other:?}"),
    }
    let (iso, complement) = embed_as_summand(&wide)?;
    println!("embedding as a summand: V = {}complement class {}", iso.matrix().block(0), complement.k0());
    Ok(())
}
