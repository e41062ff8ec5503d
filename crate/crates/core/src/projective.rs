//! Real projective space and its dual: points, hyperplanes, and the
//! chordal metric `d(X,Y) = min ||x - y||` over unit representatives.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};

/// Unit-norm threshold used by the canonical-sign rule.
const SIGN_EPS: f64 = 1e-9;

/// A line in R^d, stored as a unit vector with canonical sign
/// (first coordinate of absolute value above the threshold is positive).
#[derive(Debug, Clone, PartialEq)]
pub struct ProjPoint {
    rep: DVector<f64>,
}

impl ProjPoint {
    pub fn new(v: DVector<f64>) -> Result<Self> {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            rep: canonicalize(v / norm),
        })
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        Self::new(DVector::from_row_slice(v))
    }

    /// Unit representative with canonical sign.
    pub fn rep(&self) -> &DVector<f64> {
        &self.rep
    }

    pub fn dim(&self) -> usize {
        self.rep.len()
    }

    /// The hyperplane annihilated by this vector, under the Euclidean
    /// identification of the dual.
    pub fn to_dual_hyperplane(&self) -> ProjHyperplane {
        ProjHyperplane {
            conormal: self.rep.clone(),
        }
    }
}

/// A hyperplane in R^d, stored by its unit conormal with canonical sign.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjHyperplane {
    conormal: DVector<f64>,
}

impl ProjHyperplane {
    pub fn new(conormal: DVector<f64>) -> Result<Self> {
        let p = ProjPoint::new(conormal)?;
        Ok(Self { conormal: p.rep })
    }

    pub fn conormal(&self) -> &DVector<f64> {
        &self.conormal
    }

    pub fn dim(&self) -> usize {
        self.conormal.len()
    }

    /// The conormal line, viewed as a point of the dual projective space.
    pub fn to_dual_point(&self) -> ProjPoint {
        ProjPoint {
            rep: self.conormal.clone(),
        }
    }

    /// An orthonormal basis of the hyperplane, as columns of a d x (d-1)
    /// matrix (Householder complement of the conormal).
    pub fn basis(&self) -> DMatrix<f64> {
        let d = self.conormal.len();
        // Householder H with H * conormal = +-e_1; columns 2..d of H
        // are an orthonormal basis of the orthogonal complement.
        let mut w = self.conormal.clone();
        let sign = if w[0] >= 0.0 { 1.0 } else { -1.0 };
        w[0] += sign;
        let wn = w.norm();
        let mut out = DMatrix::zeros(d, d - 1);
        if wn == 0.0 {
            for j in 1..d {
                out[(j, j - 1)] = 1.0;
            }
            return out;
        }
        let w = w / wn;
        for j in 1..d {
            for i in 0..d {
                let e = if i == j { 1.0 } else { 0.0 };
                out[(i, j - 1)] = e - 2.0 * w[i] * w[j];
            }
        }
        out
    }
}

fn canonicalize(mut v: DVector<f64>) -> DVector<f64> {
    for i in 0..v.len() {
        if v[i].abs() > SIGN_EPS {
            if v[i] < 0.0 {
                v.neg_mut();
            }
            break;
        }
    }
    v
}

/// Chordal distance between two lines: `min(||x - y||, ||x + y||)` on the
/// canonical unit representatives. Symmetric, in `[0, sqrt(2)]`.
pub fn proj_distance(a: &ProjPoint, b: &ProjPoint) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let diff = (&a.rep - &b.rep).norm();
    let sum = (&a.rep + &b.rep).norm();
    Ok(diff.min(sum))
}

/// Chordal distance from a line to the nearest line inside a hyperplane.
///
/// With `s = |<n, x>|` for unit conormal and representative this equals
/// `s * sqrt(2 / (1 + sqrt(1 - s^2)))`, the exact minimum of the chordal
/// line distance over the hyperplane.
pub fn point_hyperplane_distance(p: &ProjPoint, h: &ProjHyperplane) -> Result<f64> {
    if p.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: h.dim(),
        });
    }
    let s = p.rep.dot(&h.conormal).abs().min(1.0);
    Ok(chordal_from_alignment(s))
}

/// Distance as a function of the alignment `s = |<n, x>|`.
pub fn chordal_from_alignment(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * (2.0 / (1.0 + (1.0 - s * s).sqrt())).sqrt()
}

/// Inverse of [`chordal_from_alignment`]: the alignment a point must have
/// with the conormal to sit at chordal distance `d` from the hyperplane.
pub fn alignment_from_chordal(d: f64) -> f64 {
    let d = d.clamp(0.0, std::f64::consts::SQRT_2);
    d * (1.0 - d * d / 4.0).max(0.0).sqrt()
}

/// Image of a line under an invertible linear map.
pub fn act(m: &DMatrix<f64>, p: &ProjPoint) -> Result<ProjPoint> {
    ProjPoint::new(m * &p.rep)
}

/// Draws a point of `B(h, eps)`, the set of lines at chordal distance at
/// least `eps` from the hyperplane. This is the chordal ball around the
/// conormal line of radius `sqrt(2 - 2 s_eps)`; we pick a uniform chordal
/// radius and a uniform direction inside the hyperplane.
pub fn sample_far_point<R: Rng>(h: &ProjHyperplane, eps: f64, rng: &mut R) -> ProjPoint {
    let d = h.dim();
    let s_min = alignment_from_chordal(eps);
    let r_max = (2.0 - 2.0 * s_min).max(0.0).sqrt();
    let r: f64 = rng.random::<f64>() * r_max;
    let s = 1.0 - r * r / 2.0;
    let basis = h.basis();
    let mut dir = DVector::zeros(d - 1);
    for i in 0..d - 1 {
        dir[i] = gaussian(rng);
    }
    let norm = dir.norm();
    let tangent = if norm > 0.0 {
        basis * (dir / norm)
    } else {
        basis.column(0).into_owned()
    };
    let v = h.conormal() * s + tangent * (1.0 - s * s).max(0.0).sqrt();
    ProjPoint::new(v).expect("sampled vector is unit scale")
}

/// Standard normal deviate by Box-Muller.
pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Uniform random line (Gaussian vector, normalized).
pub fn random_point<R: Rng>(dim: usize, rng: &mut R) -> ProjPoint {
    loop {
        let v = DVector::from_fn(dim, |_, _| gaussian(rng));
        if let Ok(p) = ProjPoint::new(v) {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn e(i: usize, d: usize) -> ProjPoint {
        let mut v = DVector::zeros(d);
        v[i] = 1.0;
        ProjPoint::new(v).unwrap()
    }

    #[test]
    fn distance_identical_lines_is_zero() {
        let p = e(0, 2);
        let q = ProjPoint::from_slice(&[-3.0, 0.0]).unwrap();
        assert_relative_eq!(proj_distance(&p, &q).unwrap(), 0.0);
    }

    #[test]
    fn distance_orthogonal_lines() {
        let d = proj_distance(&e(0, 3), &e(1, 3)).unwrap();
        assert_relative_eq!(d, std::f64::consts::SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn distance_diagonal_line() {
        let p = e(0, 2);
        let q = ProjPoint::from_slice(&[1.0, 1.0]).unwrap();
        let expect = 2.0 * (std::f64::consts::PI / 8.0).sin();
        assert_relative_eq!(proj_distance(&p, &q).unwrap(), expect, epsilon = 1e-12);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        assert!(proj_distance(&e(0, 2), &e(0, 3)).is_err());
    }

    #[test]
    fn hyperplane_distance_matches_brute_force() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for trial in 0..60 {
            let d = 3 + trial % 4;
            let p = random_point(d, &mut rng);
            let h = random_point(d, &mut rng).to_dual_hyperplane();
            let exact = point_hyperplane_distance(&p, &h).unwrap();
            // brute force over lines inside the hyperplane: no sampled line
            // may be closer than the claimed minimum, and in dimension 3
            // (where the line set is a circle) the minimum must be attained.
            let basis = h.basis();
            let mut best = f64::INFINITY;
            for i in 0..20000 {
                let mut c = DVector::zeros(d - 1);
                if d == 3 {
                    let t = std::f64::consts::PI * i as f64 / 20000.0;
                    c[0] = t.cos();
                    c[1] = t.sin();
                } else {
                    for k in 0..d - 1 {
                        c[k] = gaussian(&mut rng);
                    }
                }
                if c.norm() == 0.0 {
                    continue;
                }
                let line = ProjPoint::new(&basis * c).unwrap();
                best = best.min(proj_distance(&p, &line).unwrap());
            }
            assert!(
                best >= exact - 1e-9,
                "sampled line closer than the exact minimum"
            );
            if d == 3 {
                assert!(best - exact < 1e-4, "exact minimum not approached");
            }
        }
    }

    #[test]
    fn alignment_roundtrip() {
        for &s in &[0.0, 1e-6, 0.1, 0.5, 0.9, 1.0] {
            let d = chordal_from_alignment(s);
            assert_relative_eq!(alignment_from_chordal(d), s, epsilon = 1e-12);
        }
    }

    #[test]
    fn basis_is_orthonormal_complement() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for d in 2..7 {
            let h = random_point(d, &mut rng).to_dual_hyperplane();
            let b = h.basis();
            let gram = b.transpose() * &b;
            assert_relative_eq!(&gram, &DMatrix::identity(d - 1, d - 1), epsilon = 1e-10);
            let overlap = (b.transpose() * h.conormal()).norm();
            assert!(overlap < 1e-10);
        }
    }

    #[test]
    fn sampled_far_points_stay_far() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let h = random_point(4, &mut rng).to_dual_hyperplane();
        let eps = 0.2;
        for _ in 0..500 {
            let p = sample_far_point(&h, eps, &mut rng);
            assert!(point_hyperplane_distance(&p, &h).unwrap() >= eps - 1e-12);
        }
    }
}
