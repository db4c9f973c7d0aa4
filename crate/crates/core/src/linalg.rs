//! Dense complex linear algebra helpers on top of `nalgebra`.
//!
//! Everything here works on dynamically sized matrices; the dimensions this
//! crate targets (d up to a few dozen) make static sizing pointless.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;
pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn zeros(d: usize) -> CMat {
    CMat::zeros(d, d)
}

/// `|u><v|`
pub fn outer(u: &CVec, v: &CVec) -> CMat {
    u * v.adjoint()
}

/// `<u|v>`, antilinear in the first slot.
#[inline]
pub fn braket(u: &CVec, v: &CVec) -> C64 {
    u.dotc(v)
}

/// `<v|A|v>`
pub fn expect(v: &CVec, a: &CMat) -> C64 {
    v.dotc(&(a * v))
}

/// `<u|A|v>`
pub fn sandwich(u: &CVec, a: &CMat, v: &CVec) -> C64 {
    u.dotc(&(a * v))
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

pub fn trace(a: &CMat) -> C64 {
    a.trace()
}

/// Hilbert-Schmidt pairing `Tr(AB)`; the real inner product on Herm(d).
pub fn trace_inner(a: &CMat, b: &CMat) -> C64 {
    let mut acc = ZERO;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn frobenius(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn max_abs_real(a: &RMat) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.abs()))
}

/// Largest entrywise deviation of `A` from `A†`.
pub fn hermitian_defect(a: &CMat) -> f64 {
    let d = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in i..d {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()).scale(0.5)
}

/// Spectral norm via singular values.
pub fn op_norm(a: &CMat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone()
        .singular_values()
        .iter()
        .fold(0.0f64, |m, &s| m.max(s))
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVec, b: &CVec) -> CVec {
    a.kronecker(b)
}

pub fn basis_vec(d: usize, k: usize) -> CVec {
    let mut v = CVec::zeros(d);
    v[k] = ONE;
    v
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// The input is symmetrized first, so small anti-Hermitian noise is ignored.
pub fn eigh(a: &CMat) -> (Vec<f64>, CMat) {
    let d = a.nrows();
    if d == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMat::zeros(d, d);
    for (col, &k) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(k));
    }
    (values, vectors)
}

/// Real symmetric eigendecomposition, eigenvalues ascending.
pub fn eigh_real(a: &RMat) -> (Vec<f64>, RMat) {
    let d = a.nrows();
    if d == 0 {
        return (Vec::new(), RMat::zeros(0, 0));
    }
    let sym = (a + a.transpose()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = RMat::zeros(d, d);
    for (col, &k) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(k));
    }
    (values, vectors)
}

/// Real coordinates of a Hermitian matrix in which the trace inner product
/// becomes the Euclidean one: diagonal entries first, then `√2·Re`, `√2·Im`
/// of each strictly upper entry in row-major order.
pub fn herm_to_real(a: &CMat) -> RVec {
    let d = a.nrows();
    let mut out = RVec::zeros(d * d);
    for i in 0..d {
        out[i] = a[(i, i)].re;
    }
    let s = std::f64::consts::SQRT_2;
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = a[(i, j)];
            out[k] = s * z.re;
            out[k + 1] = s * z.im;
            k += 2;
        }
    }
    out
}

/// Inverse of [`herm_to_real`].
pub fn real_to_herm(v: &RVec, d: usize) -> CMat {
    assert_eq!(v.len(), d * d, "coordinate vector has wrong length");
    let mut a = CMat::zeros(d, d);
    for i in 0..d {
        a[(i, i)] = c(v[i], 0.0);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = c(s * v[k], s * v[k + 1]);
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
            k += 2;
        }
    }
    a
}

/// Orthonormal basis (as columns) of the orthogonal complement of
/// `span{vectors}` in `C^d`.
pub fn orth_complement(vectors: &[CVec], d: usize) -> CMat {
    let mut proj = identity(d);
    for q in orthonormalize(vectors, 1e-12) {
        proj -= outer(&q, &q);
    }
    let (vals, vecs) = eigh(&proj);
    let keep: Vec<usize> = (0..d).filter(|&k| vals[k] > 0.5).collect();
    let mut out = CMat::zeros(d, keep.len());
    for (col, &k) in keep.iter().enumerate() {
        out.set_column(col, &vecs.column(k));
    }
    out
}

/// Modified Gram-Schmidt with one re-orthogonalization pass; vectors whose
/// residual norm falls below `tol` times their input norm are dropped.
pub fn orthonormalize(vectors: &[CVec], tol: f64) -> Vec<CVec> {
    let mut basis: Vec<CVec> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let n0 = v.norm();
        if n0 == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let proj = q.dotc(&w);
                w.axpy(-proj, q, ONE);
            }
        }
        let n = w.norm();
        if n > tol * n0 {
            basis.push(w.unscale(n));
        }
    }
    basis
}

/// Inverse square root of a positive definite Hermitian matrix.
pub fn inv_sqrt_psd(a: &CMat) -> CMat {
    let (vals, vecs) = eigh(a);
    let d = a.nrows();
    let mut diag = CMat::zeros(d, d);
    for k in 0..d {
        diag[(k, k)] = c(1.0 / vals[k].max(f64::MIN_POSITIVE).sqrt(), 0.0);
    }
    &vecs * diag * vecs.adjoint()
}

/// `exp(-i·H)` for Hermitian `H`.
pub fn unitary_from_hamiltonian(h: &CMat) -> CMat {
    let (vals, vecs) = eigh(h);
    let d = h.nrows();
    let mut diag = CMat::zeros(d, d);
    for k in 0..d {
        diag[(k, k)] = C64::from_polar(1.0, -vals[k]);
    }
    &vecs * diag * vecs.adjoint()
}

/// Pauli matrices, handy for tests and examples.
pub mod pauli {
    use super::*;

    pub fn x() -> CMat {
        CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    pub fn y() -> CMat {
        CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
    }

    pub fn z() -> CMat {
        CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }
}
