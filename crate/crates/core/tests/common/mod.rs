#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use qregion_core::qstate::{MultipartiteState, PureState, QuantumState};

pub type Mat = DMatrix<Complex64>;

/// Partial trace by direct index arithmetic; the last subsystem is least
/// significant.
pub fn reduce(m: &Mat, dims: &[usize], keep: &[usize]) -> Mat {
    let n = dims.len();
    let traced: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
    let kd: Vec<usize> = keep.iter().map(|&i| dims[i]).collect();
    let td: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let dk: usize = kd.iter().product();
    let dt: usize = td.iter().product();
    let digits = |mut x: usize, radix: &[usize]| {
        let mut out = vec![0; radix.len()];
        for k in (0..radix.len()).rev() {
            out[k] = x % radix[k];
            x /= radix[k];
        }
        out
    };
    let full_index = |kdig: &[usize], tdig: &[usize]| {
        let mut idx = 0;
        for i in 0..n {
            let d = match keep.iter().position(|&k| k == i) {
                Some(p) => kdig[p],
                None => tdig[traced.iter().position(|&t| t == i).unwrap()],
            };
            idx = idx * dims[i] + d;
        }
        idx
    };
    let mut out = Mat::zeros(dk, dk);
    for a in 0..dk {
        let ad = digits(a, &kd);
        for b in 0..dk {
            let bd = digits(b, &kd);
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..dt {
                let tdig = digits(t, &td);
                acc += m[(full_index(&ad, &tdig), full_index(&bd, &tdig))];
            }
            out[(a, b)] = acc;
        }
    }
    out
}

/// Von Neumann entropy in bits of a Hermitian matrix.
pub fn entropy(m: &Mat) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .filter(|&&x| x > 1e-12)
        .map(|&x| -x * x.log2())
        .sum()
}

pub fn positions<Q: QuantumState + ?Sized>(s: &Q, labels: &[&str]) -> Vec<usize> {
    labels
        .iter()
        .map(|l| s.labels().iter().position(|x| x == l).expect("label present"))
        .collect()
}

/// `H(labels)` of a density matrix state, computed independently.
pub fn h(s: &MultipartiteState, labels: &[&str]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let mut keep = positions(s, labels);
    keep.sort_unstable();
    entropy(&reduce(s.matrix(), s.dims(), &keep))
}

pub fn pure_density(p: &PureState) -> Mat {
    let v = p.amplitudes();
    v * v.adjoint()
}

pub fn h_pure(p: &PureState, labels: &[&str]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let mut keep = positions(p, labels);
    keep.sort_unstable();
    entropy(&reduce(&pure_density(p), p.dims(), &keep))
}

pub fn shannon_bits(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

/// Mass and size of the ε-typical set by enumerating all `|X|^n` sequences.
pub fn brute_typical(p: &[f64], n: usize, eps: f64) -> (f64, u64) {
    let h = shannon_bits(p);
    let a = p.len();
    let total = (a as u64).pow(n as u32);
    let mut mass = 0.0;
    let mut count = 0;
    for mut x in 0..total {
        let mut logp = 0.0;
        let mut prob = 1.0;
        for _ in 0..n {
            let s = (x % a as u64) as usize;
            x /= a as u64;
            logp += p[s].log2();
            prob *= p[s];
        }
        if prob > 0.0 && (-logp / n as f64 - h).abs() <= eps + 1e-12 {
            mass += prob;
            count += 1;
        }
    }
    (mass, count)
}
