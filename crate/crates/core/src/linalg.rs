//! Dense complex linear-algebra helpers shared by the state and entropy code.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Eigenvalues below this magnitude are treated as exact zeros.
pub const ZERO_EIGENVALUE: f64 = 1e-12;
/// Negative eigenvalues down to this value are clipped to zero.
pub const POSITIVITY_TOL: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Hermitian part `(m + m†) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

fn finite_eigen(h: &CMatrix) -> Option<SymmetricEigen<C64, nalgebra::Dyn>> {
    let eig = SymmetricEigen::new(h.clone());
    let ok = eig.eigenvalues.iter().all(|v| v.is_finite())
        && eig.eigenvectors.iter().all(|z| z.re.is_finite() && z.im.is_finite());
    ok.then_some(eig)
}

/// Eigen-decomposition of a Hermitian matrix. The QR iteration can break down
/// on highly degenerate spectra; it is then retried on `W h W†` for a fixed
/// pseudo-random unitary `W`.
fn robust_eigen(h: CMatrix) -> SymmetricEigen<C64, nalgebra::Dyn> {
    if let Some(eig) = finite_eigen(&h) {
        return eig;
    }
    let n = h.nrows();
    for attempt in 0..4u64 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_0000 + attempt);
        let w = ginibre(n, n, &mut rng).qr().q();
        let rotated = hermitian_part(&(&w * &h * w.adjoint()));
        if let Some(mut eig) = finite_eigen(&rotated) {
            eig.eigenvectors = w.adjoint() * eig.eigenvectors;
            return eig;
        }
    }
    SymmetricEigen::new(h)
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = robust_eigen(hermitian_part(m));
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    let h = hermitian_part(m);
    let direct = h.symmetric_eigenvalues();
    let mut values: Vec<f64> = if direct.iter().all(|x| x.is_finite()) {
        direct.iter().copied().collect()
    } else {
        robust_eigen(h).eigenvalues.iter().copied().collect()
    };
    values.sort_by(f64::total_cmp);
    values
}

/// Apply `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_map(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (values, vectors) = eigh(m);
    let n = values.len();
    let mut scaled = vectors.clone();
    for (col, &v) in values.iter().enumerate() {
        let fv = f(v);
        for r in 0..n {
            scaled[(r, col)] *= fv;
        }
    }
    scaled * vectors.adjoint()
}

/// Principal square root of a positive semidefinite matrix; eigenvalues
/// below [`ZERO_EIGENVALUE`] are taken as zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    hermitian_map(m, |v| if v > ZERO_EIGENVALUE { v.sqrt() } else { 0.0 })
}

pub fn nuclear_norm(m: &CMatrix) -> f64 {
    m.clone().svd(false, false).singular_values.iter().sum()
}

pub fn trace_norm(m: &CMatrix) -> f64 {
    eigvalsh(m).iter().map(|v| v.abs()).sum()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn max_abs_entry(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Standard complex normal sample with `E|z|^2 = 1`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    // column-major fill keeps the draw order stable across nalgebra versions
    let mut m = CMatrix::zeros(rows, cols);
    for col in 0..cols {
        for r in 0..rows {
            m[(r, col)] = complex_normal(rng);
        }
    }
    m
}

/// Matrix exponential of an anti-Hermitian generator `g`, computed as
/// `exp(i H)` with `H = -i g` Hermitian.
pub fn expm_antihermitian(g: &CMatrix) -> CMatrix {
    let h = g * c(0.0, -1.0);
    let (values, vectors) = eigh(&h);
    let n = values.len();
    let mut scaled = vectors.clone();
    for (col, &v) in values.iter().enumerate() {
        let phase = c(0.0, v).exp();
        for r in 0..n {
            scaled[(r, col)] *= phase;
        }
    }
    scaled * vectors.adjoint()
}

/// Extend orthonormal columns to a full unitary by Gram-Schmidt against the
/// standard basis.
pub fn complete_unitary(columns: &CMatrix) -> CMatrix {
    let n = columns.nrows();
    let mut basis: Vec<CVector> = columns.column_iter().map(|col| col.into_owned()).collect();
    let mut e = 0;
    while basis.len() < n && e < n {
        let mut v = CVector::zeros(n);
        v[e] = c(1.0, 0.0);
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / c(norm, 0.0));
        }
        e += 1;
    }
    CMatrix::from_columns(&basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eigh_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = ginibre(5, 5, &mut rng);
        let h = &g + g.adjoint();
        let (values, vectors) = eigh(&h);
        let diag = CMatrix::from_diagonal(&DVector::from_iterator(
            5,
            values.iter().map(|&v| c(v, 0.0)),
        ));
        let back = &vectors * diag * vectors.adjoint();
        assert!(max_abs_entry(&(back - h)) < 1e-10);
        assert!(values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn exponential_of_antihermitian_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = ginibre(6, 6, &mut rng);
        let a = &g - g.adjoint();
        let u = expm_antihermitian(&a);
        let eye = CMatrix::identity(6, 6);
        assert!(max_abs_entry(&(u.adjoint() * &u - eye)) < 1e-10);
    }

    #[test]
    fn completion_keeps_given_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = ginibre(6, 2, &mut rng).qr().q();
        let u = complete_unitary(&q);
        assert_eq!(u.shape(), (6, 6));
        assert!(max_abs_entry(&(u.columns(0, 2).into_owned() - &q)) < 1e-12);
        assert!(max_abs_entry(&(u.adjoint() * &u - CMatrix::identity(6, 6))) < 1e-10);
    }
}
