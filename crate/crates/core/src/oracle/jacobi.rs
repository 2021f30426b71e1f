// Jacobi-type dense solvers for the oracle. These deliberately avoid the
// Householder/QR machinery used by the module layer.

use crate::{CMat, C64};

const MAX_SWEEPS: usize = 100;

/// The 2×2 unitary `G` with `G* [[app, apq], [conj(apq), aqq]] G` diagonal.
fn rotation(app: f64, aqq: f64, apq: C64) -> [C64; 4] {
    let mag = apq.norm();
    let w = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let wc = w.conj();
    // [[g_pp, g_pq], [g_qp, g_qq]]
    [C64::new(c, 0.0), C64::new(s, 0.0), -wc * s, wc * c]
}

fn rotate_columns(x: &mut CMat, p: usize, q: usize, g: &[C64; 4]) {
    for k in 0..x.nrows() {
        let (xp, xq) = (x[(k, p)], x[(k, q)]);
        x[(k, p)] = xp * g[0] + xq * g[2];
        x[(k, q)] = xp * g[1] + xq * g[3];
    }
}

fn rotate_rows_adjoint(x: &mut CMat, p: usize, q: usize, g: &[C64; 4]) {
    for k in 0..x.ncols() {
        let (xp, xq) = (x[(p, k)], x[(q, k)]);
        x[(p, k)] = g[0].conj() * xp + g[2].conj() * xq;
        x[(q, k)] = g[1].conj() * xp + g[3].conj() * xq;
    }
}

/// Cyclic two-sided Jacobi for Hermitian matrices. Returns eigenvalues in
/// ascending order and the unitary whose columns are the eigenvectors.
pub fn hermitian_jacobi(h: &CMat) -> (Vec<f64>, CMat) {
    let n = h.nrows();
    assert_eq!(n, h.ncols(), "Jacobi needs a square matrix");
    let mut a = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let mut v = CMat::identity(n, n);
    let scale = a.norm().max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)].norm() <= 1e-300 {
                    continue;
                }
                let g = rotation(a[(p, p)].re, a[(q, q)].re, a[(p, q)]);
                rotate_columns(&mut a, p, q, &g);
                rotate_rows_adjoint(&mut a, p, q, &g);
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                rotate_columns(&mut v, p, q, &g);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let vals = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vecs = CMat::zeros(n, n);
    for (c, &i) in order.iter().enumerate() {
        vecs.set_column(c, &v.column(i));
    }
    (vals, vecs)
}

/// One-sided (Hestenes) Jacobi SVD. Returns singular values (descending) and the
/// full `n × n` unitary of right singular vectors, columns in the same order.
pub fn one_sided_svd(x: &CMat) -> (Vec<f64>, CMat) {
    let n = x.ncols();
    let mut w = x.clone();
    let mut v = CMat::identity(n, n);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dotc(&w.column(q));
                if gamma.norm() <= 1e-15 * (alpha * beta).sqrt() || gamma.norm() <= 1e-300 {
                    continue;
                }
                rotated = true;
                let g = rotation(alpha, beta, gamma);
                rotate_columns(&mut w, p, q, &g);
                rotate_columns(&mut v, p, q, &g);
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let mut vecs = CMat::zeros(n, n);
    for (c, &i) in order.iter().enumerate() {
        vecs.set_column(c, &v.column(i));
    }
    (order.iter().map(|&i| norms[i]).collect(), vecs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, seed: u64) -> CMat {
        // small deterministic LCG, enough for a smoke test
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        CMat::from_fn(n, n, |_, _| C64::new(next(), next()))
    }

    #[test]
    fn jacobi_diagonalizes_hermitian() {
        let x = sample(7, 3);
        let h = &x + x.adjoint();
        let (vals, vecs) = hermitian_jacobi(&h);
        let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(7, vals.iter().map(|&v| C64::new(v, 0.0))));
        assert!((&vecs * d * vecs.adjoint() - &h).norm() < 1e-12);
        assert!((vecs.adjoint() * &vecs - CMat::identity(7, 7)).norm() < 1e-12);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn svd_finds_null_space() {
        let a = sample(5, 9);
        let mut x = CMat::zeros(5, 6);
        x.view_mut((0, 0), (5, 5)).copy_from(&a);
        // last column duplicates the first: a one-dimensional null space
        let first = x.column(0).into_owned();
        x.set_column(5, &first);
        let (sv, v) = one_sided_svd(&x);
        assert!(sv[5] < 1e-12 && sv[4] > 1e-6);
        assert!((&x * v.column(5)).norm() < 1e-12);
        assert!((v.adjoint() * &v - CMat::identity(6, 6)).norm() < 1e-12);
    }
}
