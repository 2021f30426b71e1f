// Dense numerics for the module layer. Everything here works on a single
// algebra block; the block decomposition is handled by the callers.

use nalgebra::linalg::SymmetricEigen;

use crate::tol::tolerances;
use crate::{CMat, C64};

pub(crate) fn zeros(r: usize, c: usize) -> CMat {
    CMat::zeros(r, c)
}

pub(crate) fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub(crate) fn hermitize(x: &CMat) -> CMat {
    (x + x.adjoint()) * C64::new(0.5, 0.0)
}

/// Largest singular value.
pub(crate) fn spectral_norm(x: &CMat) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let gram = if x.nrows() < x.ncols() { x * x.adjoint() } else { x.adjoint() * x };
    let (vals, _) = hermitian_eig(&gram);
    vals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

pub(crate) fn rank_threshold(largest: f64) -> f64 {
    let t = tolerances();
    (t.rank_relative() * largest).max(t.rank_floor())
}

/// Orthonormal basis (as columns) of the column space of `x`.
///
/// Householder QR with column pivoting; the pivoted diagonal of `R` decides the rank.
pub(crate) fn range_basis(x: &CMat) -> CMat {
    let (m, n) = x.shape();
    if m == 0 || n == 0 {
        return zeros(m, 0);
    }
    let qr = x.clone().col_piv_qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..m.min(n)).map(|i| r[(i, i)].norm()).collect();
    let largest = diag.first().copied().unwrap_or(0.0);
    let thr = rank_threshold(largest);
    let k = diag.iter().take_while(|&&d| d > thr).count();
    qr.q().columns(0, k).into_owned()
}

#[cfg(test)]
pub(crate) fn rank(x: &CMat) -> usize {
    range_basis(x).ncols()
}

/// Orthogonal projection onto the column space of `x`.
pub(crate) fn range_projection(x: &CMat) -> CMat {
    let b = range_basis(x);
    &b * b.adjoint()
}

/// Projection `r` whose fixed rows `v r = v` are exactly the row span of `x`.
pub(crate) fn row_space_projection(x: &CMat) -> CMat {
    range_projection(&x.adjoint())
}

/// Projection onto `{v : v q = v, v t = 0}` for a projection `q`.
pub(crate) fn row_kernel_within(q: &CMat, t: &CMat) -> CMat {
    let r = q - range_projection(&(q * t));
    hermitize(&r)
}

/// Eigen-decomposition of the Hermitian part of `h`, eigenvalues ascending.
pub(crate) fn hermitian_eig(h: &CMat) -> (Vec<f64>, CMat) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let eig = SymmetricEigen::new(hermitize(h));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = zeros(n, n);
    for (c, &i) in order.iter().enumerate() {
        vecs.set_column(c, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Orthonormal basis of the range of a projection (eigenvalues above 1/2).
pub(crate) fn projection_basis(p: &CMat) -> CMat {
    let (vals, vecs) = hermitian_eig(p);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > 0.5).collect();
    let mut basis = zeros(p.nrows(), keep.len());
    for (c, &i) in keep.iter().enumerate() {
        basis.set_column(c, &vecs.column(i));
    }
    basis
}

/// Eigen-decomposition of a unitary `x`: unit-modulus eigenvalues and an
/// orthonormal eigenbasis (columns).
///
/// The spectrum is rotated so that a point far from it sits at `-1`; the Cayley
/// transform `i(1 + v)^{-1}(1 - v)` is then a well-conditioned Hermitian matrix with
/// the same eigenvectors.
pub(crate) fn unitary_eig(x: &CMat) -> (Vec<C64>, CMat) {
    let n = x.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let one = identity(n);
    let candidates = 2 * n + 1;
    let rotated = |theta: f64| x * C64::from_polar(1.0, -theta);
    let (mut best, mut margin) = (0.0, f64::NEG_INFINITY);
    for k in 0..candidates {
        let theta = std::f64::consts::TAU * k as f64 / candidates as f64;
        let (vals, _) = hermitian_eig(&(&one + hermitize(&rotated(theta))));
        if vals[0] > margin {
            (best, margin) = (theta, vals[0]);
        }
    }
    let v = rotated(best);
    let cayley = (&one + &v)
        .lu()
        .solve(&(&one - &v))
        .expect("-1 is kept away from the spectrum")
        * C64::i();
    let (_, vecs) = hermitian_eig(&cayley);
    let vals = (0..n)
        .map(|i| {
            let c = vecs.column(i);
            let z = (c.adjoint() * x * c)[(0, 0)];
            z / z.norm()
        })
        .collect();
    (vals, vecs)
}

pub(crate) fn trace(x: &CMat) -> C64 {
    x.diagonal().iter().sum()
}

pub(crate) fn direct_sum(a: &CMat, b: &CMat) -> CMat {
    let mut out = zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn range_projection_of_rank_one() {
        let x = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        let p = range_projection(&x);
        let expect = CMat::from_element(2, 2, c(0.5, 0.0));
        assert!((p - expect).norm() < 1e-12);
    }

    #[test]
    fn empty_inputs_are_harmless() {
        assert_eq!(rank(&zeros(0, 3)), 0);
        assert_eq!(range_projection(&zeros(3, 0)).shape(), (3, 3));
        assert_eq!(spectral_norm(&zeros(0, 0)), 0.0);
    }

    #[test]
    fn tiny_inputs_have_rank_zero() {
        let x = CMat::from_element(3, 3, c(1e-14, 0.0));
        assert_eq!(rank(&x), 0);
    }

    #[test]
    fn row_kernel_respects_presentation() {
        // q = diag(1,1,0), t kills e1 only
        let mut q = zeros(3, 3);
        q[(0, 0)] = c(1.0, 0.0);
        q[(1, 1)] = c(1.0, 0.0);
        let mut t = zeros(3, 1);
        t[(1, 0)] = c(2.0, 0.0);
        t[(2, 0)] = c(5.0, 0.0);
        let r = row_kernel_within(&q, &t);
        let mut expect = zeros(3, 3);
        expect[(0, 0)] = c(1.0, 0.0);
        assert!((r - expect).norm() < 1e-12);
    }

    #[test]
    fn unitary_eig_of_rotation_has_conjugate_phases() {
        let th: f64 = std::f64::consts::PI / 5.0;
        let x = CMat::from_row_slice(
            2,
            2,
            &[c(th.cos(), 0.0), c(-th.sin(), 0.0), c(th.sin(), 0.0), c(th.cos(), 0.0)],
        );
        let (vals, q) = unitary_eig(&x);
        let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(vals.clone()));
        assert!((&q * d * q.adjoint() - &x).norm() < 1e-12);
        let mut args: Vec<f64> = vals.iter().map(|z| z.arg()).collect();
        args.sort_by(f64::total_cmp);
        assert!((args[0] + th).abs() < 1e-12 && (args[1] - th).abs() < 1e-12);
    }

    #[test]
    fn unitary_eig_of_identity_is_exact() {
        let (vals, q) = unitary_eig(&identity(4));
        assert!(vals.iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-14));
        assert!((q.adjoint() * &q - identity(4)).norm() < 1e-14);
    }
}
