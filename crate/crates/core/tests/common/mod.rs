//! Shared fixtures and independent oracle helpers for the integration
//! suites. Oracle routines deliberately avoid the library's code paths:
//! plain repeated products instead of log-rescaled ones, power iteration
//! instead of the SVD eigenline extraction.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use anosov_core::{SymmetricSet, UnimodularMatrix};

pub fn unimod(d: usize, entries: &[f64]) -> UnimodularMatrix {
    UnimodularMatrix::from_matrix(DMatrix::from_row_slice(d, d, entries)).unwrap()
}

pub fn rotation2(angle: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[angle.cos(), -angle.sin(), angle.sin(), angle.cos()])
}

/// Conjugate of diag(t, 1/t) by a rotation.
pub fn conjugated_diag2(t: f64, angle: f64) -> UnimodularMatrix {
    let r = rotation2(angle);
    let d = DMatrix::from_row_slice(2, 2, &[t, 0.0, 0.0, 1.0 / t]);
    UnimodularMatrix::from_matrix(&r * d * r.transpose()).unwrap()
}

/// The shipped example: diag(4, 1/4) and its conjugate by a rotation of
/// pi/4 (entries are exact dyadics).
pub fn sl2_example() -> SymmetricSet {
    SymmetricSet::from_generators(vec![
        ("a".into(), unimod(2, &[4.0, 0.0, 0.0, 0.25])),
        ("b".into(), unimod(2, &[2.125, 1.875, 1.875, 2.125])),
    ])
    .unwrap()
}

pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Random matrix with N(0,1) entries, determinant-normalized to 1.
pub fn random_sl<R: Rng>(d: usize, rng: &mut R) -> UnimodularMatrix {
    loop {
        let mut m = DMatrix::from_fn(d, d, |_, _| gaussian(rng));
        let det = m.determinant();
        if det.abs() < 1e-3 {
            continue;
        }
        if det < 0.0 {
            for j in 0..d {
                m[(0, j)] = -m[(0, j)];
            }
        }
        let scale = m.determinant().powf(-1.0 / d as f64);
        if let Ok(g) = UnimodularMatrix::new(m * scale, 1e-7) {
            return g;
        }
    }
}

/// Haar-ish random orthogonal matrix via QR of a Gaussian matrix.
pub fn random_orthogonal<R: Rng>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let m = DMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let qr = m.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            for i in 0..d {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Random proximal matrix with orthogonal eigenframe: exact agreement of
/// singular values of powers with eigenvalue powers.
pub fn random_orthogonal_proximal<R: Rng>(d: usize, rng: &mut R) -> UnimodularMatrix {
    let q = random_orthogonal(d, rng);
    let mut exps: Vec<f64> = (0..d).map(|_| gaussian(rng)).collect();
    exps.sort_by(|a, b| b.partial_cmp(a).unwrap());
    // enforce a clear top gap and zero sum
    exps[0] += 0.5;
    let mean = exps.iter().sum::<f64>() / d as f64;
    for e in exps.iter_mut() {
        *e -= mean;
    }
    let diag = DMatrix::from_diagonal(&DVector::from_iterator(d, exps.iter().map(|e| e.exp())));
    UnimodularMatrix::new(&q * diag * q.transpose(), 1e-7).unwrap()
}

/// Random proximal matrix with a genuinely non-orthogonal eigenframe.
pub fn random_skew_proximal<R: Rng>(d: usize, rng: &mut R) -> UnimodularMatrix {
    loop {
        let g = random_sl(d, rng);
        if anosov_core::proximality_test(&g, 1e-4).is_ok() {
            return g;
        }
    }
}

/// Plain n-th power by repeated multiplication; the oracle counterpart
/// of the log-rescaled route (valid while entries stay in f64 range).
pub fn plain_power(g: &UnimodularMatrix, n: u32) -> UnimodularMatrix {
    let mut out = g.clone();
    for _ in 1..n {
        out = out.mul(g).unwrap();
    }
    out
}

/// Top eigenline by power iteration.
pub fn power_iteration_line(m: &DMatrix<f64>, iterations: usize) -> DVector<f64> {
    let d = m.nrows();
    let mut v = DVector::from_element(d, 1.0) / (d as f64).sqrt();
    // a second start guards against an unlucky orthogonal initial vector
    let mut w = DVector::zeros(d);
    w[0] = 1.0;
    for _ in 0..iterations {
        v = m * v;
        let n = v.norm();
        if n > 0.0 {
            v /= n;
        }
        w = m * w;
        let n = w.norm();
        if n > 0.0 {
            w /= n;
        }
    }
    if (m * &v).norm() >= (m * &w).norm() {
        v
    } else {
        w
    }
}

/// Chordal distance between two lines given by arbitrary representatives.
pub fn chordal(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let a = a / a.norm();
    let b = b / b.norm();
    ((&a - &b).norm()).min((&a + &b).norm())
}

/// Enumerates reduced words over `2r` letters (pair convention `i ^ 1`)
/// up to `max_len`, independent of the library enumerator.
pub fn oracle_words(rank: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = (0..2 * rank).map(|l| vec![l]).collect();
    stack.reverse();
    while let Some(w) = stack.pop() {
        if w.len() < max_len {
            for l in (0..2 * rank).rev() {
                if l ^ 1 != *w.last().unwrap() {
                    let mut next = w.clone();
                    next.push(l);
                    stack.push(next);
                }
            }
        }
        out.push(w);
    }
    out
}

pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    nalgebra::linalg::SVD::new(m.clone(), false, false)
        .singular_values
        .iter()
        .fold(0.0f64, |acc, s| acc.max(*s))
}
