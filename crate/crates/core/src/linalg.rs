//! Dense complex linear algebra used by every builder: Hermitian
//! eigendecomposition with ascending ordering and a few norms.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending; column `n` of
/// `vectors` belongs to `values[n]`.
#[derive(Debug, Clone)]
pub struct Spectrum<T: Real> {
    pub values: Vec<T>,
    pub vectors: CMatrix<T>,
}

/// Largest `|H_ab - conj(H_ba)|`.
pub fn max_asymmetry<T: Real>(h: &CMatrix<T>) -> T {
    let n = h.nrows();
    let mut worst = T::zero();
    for a in 0..n {
        for b in a..n {
            let d = (h[(a, b)] - h[(b, a)].conj()).norm_sqr().sqrt();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

pub fn check_hermitian<T: Real>(h: &CMatrix<T>, tol: T) -> Result<()> {
    if h.nrows() != h.ncols() {
        return Err(Error::DimensionMismatch { expected: h.nrows(), got: h.ncols() });
    }
    let asym = max_asymmetry(h);
    if asym > tol {
        return Err(Error::NonHermitian(asym.to_f64_lossy()));
    }
    Ok(())
}

/// Full eigendecomposition of a Hermitian matrix.
pub fn eigh<T: Real>(h: &CMatrix<T>) -> Result<Spectrum<T>> {
    let eig = SymmetricEigen::try_new(h.clone(), T::default_epsilon(), 0).ok_or(Error::EigenFailure)?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(h.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(Spectrum { values, vectors })
}

/// Sorted eigenvalues only.
pub fn eigvalsh<T: Real>(h: &CMatrix<T>) -> Result<Vec<T>> {
    let values = SymmetricEigen::try_new(h.clone(), T::default_epsilon(), 0).ok_or(Error::EigenFailure)?.eigenvalues;
    let mut v: Vec<T> = values.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(v)
}

pub fn norm<T: Real>(v: &CVector<T>) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// `<a|b>`, conjugating the left argument.
pub fn inner<T: Real>(a: &CVector<T>, b: &CVector<T>) -> Complex<T> {
    a.iter().zip(b.iter()).fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

/// `<v|H|v>` (real part; the imaginary part vanishes for Hermitian `H`).
pub fn expectation<T: Real>(h: &CMatrix<T>, v: &CVector<T>) -> T {
    inner(v, &(h * v)).re
}

/// Largest absolute difference between two equally long sorted sequences.
pub fn max_sorted_deviation<T: Real>(a: &[T], b: &[T]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    Ok(a.iter().zip(b).fold(T::zero(), |m, (x, y)| {
        let d = (*x - *y).abs();
        if d > m {
            d
        } else {
            m
        }
    }))
}

/// Kronecker product `a (x) b`.
pub fn kron<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a.kronecker(b)
}
