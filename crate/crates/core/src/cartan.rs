//! Cartan and Jordan projections: sorted log singular values and log
//! eigenvalue moduli, the first simple root `alpha_1`, and an
//! overflow-free route to the Cartan projection of large matrix powers.

use crate::error::{Error, Result};
use crate::matrix::{exterior_power, singular_values, ScaledMatrix, UnimodularMatrix};

/// Sorted log singular values, non-increasing, summing to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CartanVector(Vec<f64>);

/// Sorted log eigenvalue moduli, non-increasing, summing to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanVector(Vec<f64>);

impl CartanVector {
    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    /// mu_1 - mu_2, the first simple root evaluated on the projection.
    pub fn alpha1(&self) -> f64 {
        alpha1(&self.0)
    }
}

impl JordanVector {
    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn alpha1(&self) -> f64 {
        alpha1(&self.0)
    }
}

/// First entry minus second entry.
pub fn alpha1(v: &[f64]) -> f64 {
    assert!(v.len() >= 2, "alpha1 needs at least two entries");
    v[0] - v[1]
}

/// Cartan projection: log singular values of `g`, sorted non-increasing.
pub fn cartan_projection(g: &UnimodularMatrix) -> Result<CartanVector> {
    let sv = singular_values(g.matrix());
    if sv.iter().any(|s| !s.is_finite() || *s <= 0.0) {
        return Err(Error::Numerical(
            "singular value computation produced a non-positive value".into(),
        ));
    }
    Ok(CartanVector(sv.iter().map(|s| s.ln()).collect()))
}

/// Jordan projection: log moduli of the eigenvalues of `g`, sorted
/// non-increasing.
pub fn jordan_projection(g: &UnimodularMatrix) -> JordanVector {
    let eigs = g.matrix().clone().complex_eigenvalues();
    let mut logs: Vec<f64> = eigs.iter().map(|z| z.norm().ln()).collect();
    logs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    JordanVector(logs)
}

/// Cartan projection of `g^n` without forming the power.
///
/// Uses `mu_1 + ... + mu_k (g^n) = log || (wedge^k g)^n ||` with each
/// exterior-power matrix raised by log-rescaled repeated squaring, so the
/// result is exact up to rounding for any `n`.
pub fn cartan_projection_power(g: &UnimodularMatrix, n: u64) -> Result<CartanVector> {
    let d = g.dim();
    if n == 0 {
        return Ok(CartanVector(vec![0.0; d]));
    }
    let mut partial = vec![0.0; d]; // partial[k-1] = mu_1 + ... + mu_k
    for k in 1..d {
        let wedge = ScaledMatrix::new(exterior_power(g.matrix(), k));
        partial[k - 1] = wedge.pow(n).log_operator_norm();
        if !partial[k - 1].is_finite() {
            return Err(Error::Numerical(format!(
                "log-rescaled power produced a non-finite norm at exterior order {k}"
            )));
        }
    }
    partial[d - 1] = 0.0; // det(g^n) = 1
    let mut mu = Vec::with_capacity(d);
    let mut prev = 0.0;
    for k in 0..d {
        mu.push(partial[k] - prev);
        prev = partial[k];
    }
    Ok(CartanVector(mu))
}

/// `alpha_1(mu(g^n))`, the singular value gap of a matrix power in log
/// domain: `2 log ||g^n|| - log ||wedge^2 (g^n)||`.
pub fn alpha1_of_power(g: &UnimodularMatrix, n: u64) -> Result<f64> {
    let mu = cartan_projection_power(g, n)?;
    Ok(mu.alpha1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn unimod(entries: &[f64]) -> UnimodularMatrix {
        let d = (entries.len() as f64).sqrt() as usize;
        UnimodularMatrix::from_matrix(DMatrix::from_row_slice(d, d, entries)).unwrap()
    }

    #[test]
    fn cartan_of_diagonal() {
        let mu = cartan_projection(&unimod(&[2.0, 0.0, 0.0, 0.5])).unwrap();
        assert_relative_eq!(mu.entries()[0], 2.0f64.ln(), epsilon = 1e-12);
        assert_relative_eq!(mu.entries()[1], -(2.0f64.ln()), epsilon = 1e-12);
    }

    #[test]
    fn cartan_of_identity() {
        let mu = cartan_projection(&UnimodularMatrix::identity(2)).unwrap();
        assert_eq!(mu.entries(), &[0.0, 0.0]);
    }

    #[test]
    fn cartan_of_shear_is_log_golden_ratio() {
        // g^T g = [[1,1],[1,2]] has eigenvalues (3 +- sqrt(5))/2, so the
        // singular values of g are phi and 1/phi.
        let mu = cartan_projection(&unimod(&[1.0, 1.0, 0.0, 1.0])).unwrap();
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert_relative_eq!(mu.entries()[0], phi.ln(), epsilon = 1e-12);
        assert_relative_eq!(mu.alpha1(), 2.0 * phi.ln(), epsilon = 1e-12);
    }

    #[test]
    fn jordan_of_diagonal_and_unipotent() {
        let lam = jordan_projection(&unimod(&[2.0, 0.0, 0.0, 0.5]));
        assert_relative_eq!(lam.entries()[0], 2.0f64.ln(), epsilon = 1e-12);
        let lam = jordan_projection(&unimod(&[1.0, 1.0, 0.0, 1.0]));
        assert_relative_eq!(lam.entries()[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(lam.entries()[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn jordan_of_rotation_is_zero() {
        let (c, s) = ((std::f64::consts::PI / 3.0).cos(), (std::f64::consts::PI / 3.0).sin());
        let lam = jordan_projection(&unimod(&[c, -s, s, c]));
        assert_relative_eq!(lam.entries()[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(lam.entries()[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn alpha1_examples() {
        assert_relative_eq!(alpha1(&[2.0f64.ln(), -(2.0f64.ln())]), 2.0 * 2.0f64.ln());
        assert_relative_eq!(alpha1(&[0.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn power_projection_matches_direct_at_small_n() {
        let g = unimod(&[2.125, 1.875, 1.875, 2.125]);
        let g3 = g.mul(&g).unwrap().mul(&g).unwrap();
        let direct = cartan_projection(&g3).unwrap();
        let powered = cartan_projection_power(&g, 3).unwrap();
        for (a, b) in direct.entries().iter().zip(powered.entries()) {
            assert_relative_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn power_projection_survives_huge_exponents() {
        let g = unimod(&[4.0, 0.0, 0.0, 0.25]);
        let mu = cartan_projection_power(&g, 1 << 20).unwrap();
        let expect = (1u64 << 20) as f64 * 4.0f64.ln();
        assert_relative_eq!(mu.entries()[0], expect, max_relative = 1e-12);
        assert_relative_eq!(mu.entries()[1], -expect, max_relative = 1e-12);
    }
}
