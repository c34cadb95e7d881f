//! Dense complex linear algebra shared by every module.
//!
//! Everything at desk scale (dims up to a few thousand) is kept as plain
//! dense `Array2<Complex64>`. Hermitian eigensolves are delegated to the
//! system LAPACK (`zheevd`); the rest is ndarray.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{FqsError, FqsResult};

pub type C64 = Complex64;
pub type CMat = Array2<C64>;
pub type CVec = Array1<C64>;

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues and the
/// matrix whose columns are the corresponding orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigH {
    pub values: Array1<f64>,
    pub vectors: CMat,
}

mod lapack {
    use super::C64;

    extern "C" {
        pub fn zheevd_(
            jobz: *const u8,
            uplo: *const u8,
            n: *const i32,
            a: *mut C64,
            lda: *const i32,
            w: *mut f64,
            work: *mut C64,
            lwork: *const i32,
            rwork: *mut f64,
            lrwork: *const i32,
            iwork: *mut i32,
            liwork: *const i32,
            info: *mut i32,
        );
    }
}

/// Hermitian eigendecomposition via LAPACK `zheevd` (divide and conquer).
///
/// The input is *assumed* Hermitian; only its lower triangle is referenced.
pub fn eigh(a: &CMat) -> FqsResult<EigH> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(FqsError::Validation(format!(
            "eigh needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    if n == 0 {
        return Err(FqsError::Validation("eigh on empty matrix".into()));
    }
    // Column-major copy for LAPACK.
    let mut buf: Vec<C64> = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            buf.push(a[[i, j]]);
        }
    }
    let mut w = vec![0.0f64; n];
    let (jobz, uplo) = (b'V', b'L');
    let ni = n as i32;
    let mut info = 0i32;
    let m1 = -1i32;
    let mut work_q = [C64::new(0.0, 0.0)];
    let mut rwork_q = [0.0f64];
    let mut iwork_q = [0i32];
    unsafe {
        lapack::zheevd_(
            &jobz,
            &uplo,
            &ni,
            buf.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            work_q.as_mut_ptr(),
            &m1,
            rwork_q.as_mut_ptr(),
            &m1,
            iwork_q.as_mut_ptr(),
            &m1,
            &mut info,
        );
    }
    if info != 0 {
        return Err(FqsError::Numerical(format!(
            "zheevd workspace query failed (info = {info})"
        )));
    }
    let lwork = work_q[0].re as i32;
    let lrwork = rwork_q[0] as i32;
    let liwork = iwork_q[0];
    let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
    let mut rwork = vec![0.0f64; lrwork.max(1) as usize];
    let mut iwork = vec![0i32; liwork.max(1) as usize];
    unsafe {
        lapack::zheevd_(
            &jobz,
            &uplo,
            &ni,
            buf.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            &lrwork,
            iwork.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(FqsError::Numerical(format!(
            "zheevd failed (info = {info})"
        )));
    }
    let mut vectors = CMat::zeros((n, n));
    for j in 0..n {
        for i in 0..n {
            vectors[[i, j]] = buf[j * n + i];
        }
    }
    Ok(EigH {
        values: Array1::from(w),
        vectors,
    })
}

/// Conjugate transpose.
pub fn dagger(a: &CMat) -> CMat {
    let mut out = CMat::zeros((a.ncols(), a.nrows()));
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            out[[j, i]] = a[[i, j]].conj();
        }
    }
    out
}

/// Largest entrywise deviation from Hermiticity, `max |A - A^dagger|`.
pub fn hermiticity_residual(a: &CMat) -> f64 {
    let mut r: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in i..a.ncols() {
            r = r.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    r
}

/// Largest entrywise deviation of `U^dagger U` from the identity.
pub fn unitarity_residual(u: &CMat) -> f64 {
    let prod = dagger(u).dot(u);
    let mut r: f64 = 0.0;
    for i in 0..prod.nrows() {
        for j in 0..prod.ncols() {
            let expect = if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            };
            r = r.max((prod[[i, j]] - expect).norm());
        }
    }
    r
}

/// Spectral norm (largest singular value), computed from `eigh(A^dagger A)`.
pub fn spectral_norm(a: &CMat) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    let gram = dagger(a).dot(a);
    let eig = eigh(&gram).expect("gram matrix eigensolve");
    eig.values
        .iter()
        .fold(0.0f64, |acc, &v| acc.max(v.max(0.0)))
        .sqrt()
}

/// Largest entrywise absolute difference between two matrices.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.dim(), b.dim());
    let mut r: f64 = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        r = r.max((x - y).norm());
    }
    r
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = CMat::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij.norm() == 0.0 {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[[i * br + k, j * bc + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Complex identity matrix.
pub fn identity(n: usize) -> CMat {
    CMat::eye(n)
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Inner product `<a|b>`.
pub fn inner(a: &CVec, b: &CVec) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Phase-insensitive overlap `|<a|b>|` of two (not necessarily unit) vectors.
pub fn fidelity(a: &CVec, b: &CVec) -> f64 {
    let na = vec_norm(a);
    let nb = vec_norm(b);
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    inner(a, b).norm() / (na * nb)
}

/// `e^{-i H t}` for Hermitian `H`, from a precomputed eigendecomposition.
pub fn expm_from_eig(eig: &EigH, t: f64) -> CMat {
    let n = eig.values.len();
    let mut scaled = eig.vectors.clone();
    for j in 0..n {
        let phase = C64::from_polar(1.0, -eig.values[j] * t);
        for i in 0..n {
            scaled[[i, j]] *= phase;
        }
    }
    scaled.dot(&dagger(&eig.vectors))
}

/// `e^{-i H t} v` from a precomputed eigendecomposition.
pub fn expm_apply_from_eig(eig: &EigH, v: &CVec, t: f64) -> CVec {
    let coeffs = dagger(&eig.vectors).dot(v);
    let rotated: CVec = coeffs
        .iter()
        .zip(eig.values.iter())
        .map(|(c, &lam)| c * C64::from_polar(1.0, -lam * t))
        .collect();
    eig.vectors.dot(&rotated)
}

/// Dense `e^{-i H t}` for Hermitian `H` (eigensolve each call; see
/// [`crate::propagator::expm_apply`] for the cached entry point).
pub fn expm_hermitian(h: &CMat, t: f64) -> FqsResult<CMat> {
    let eig = eigh(h)?;
    Ok(expm_from_eig(&eig, t))
}
