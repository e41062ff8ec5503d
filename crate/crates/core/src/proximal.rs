//! Proximality: deciding whether the eigenvalue of maximal modulus is
//! real and simple, and extracting the attracting line and repelling
//! hyperplane when it is.

use nalgebra::DMatrix;

use crate::error::{Error, NotProximal, Result};
use crate::matrix::UnimodularMatrix;
use crate::projective::{ProjHyperplane, ProjPoint};

/// Default relative tolerance on the log spectral gap. Ties within this
/// tolerance are declared not proximal: the certifier fails closed.
pub const DEFAULT_GAP_TOL: f64 = 1e-8;

/// Relative threshold for treating the leading eigenvalue as real.
const IM_TOL: f64 = 1e-10;

/// Fixed-point data of a proximal matrix.
#[derive(Debug, Clone)]
pub struct ProximalData {
    /// The attracting eigenline.
    pub attracting: ProjPoint,
    /// The invariant complementary hyperplane.
    pub repelling: ProjHyperplane,
    /// Modulus of the leading eigenvalue.
    pub top_modulus: f64,
    /// Log spectral gap `lambda_1 - lambda_2 > 0`.
    pub gap: f64,
}

/// Decides proximality of `g` with the given log-gap tolerance.
///
/// The repelling hyperplane is recovered as the attracting eigenline of
/// the transpose (the conormal of the invariant complement), not by
/// deflation.
pub fn proximality_test(
    g: &UnimodularMatrix,
    gap_tol: f64,
) -> std::result::Result<ProximalData, NotProximal> {
    proximality_test_matrix(g.matrix(), gap_tol)
}

/// Scale-free proximality test on a raw matrix. Proximality and the fixed
/// points are invariant under rescaling; `top_modulus` refers to the
/// matrix as given.
pub fn proximality_test_matrix(
    m: &DMatrix<f64>,
    gap_tol: f64,
) -> std::result::Result<ProximalData, NotProximal> {
    let eigs = m.clone().complex_eigenvalues();
    let mut moduli: Vec<(f64, f64)> = eigs.iter().map(|z| (z.norm(), z.im.abs())).collect();
    moduli.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let (m1, im1) = moduli[0];
    let m2 = moduli[1].0;
    if im1 > IM_TOL * m1 {
        return Err(NotProximal::ComplexLeadingEigenvalue { modulus: m1 });
    }
    let gap = m1.ln() - m2.ln();
    if gap <= gap_tol {
        return Err(NotProximal::ModulusTie { gap });
    }
    // Signed leading eigenvalue: real with modulus m1.
    let lambda = eigs
        .iter()
        .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
        .map(|z| z.re)
        .unwrap();
    let attracting = eigenline(m, lambda);
    let left = eigenline(&m.transpose(), lambda);
    ProximalData::assemble(m, attracting, left, m1, gap)
}

impl ProximalData {
    fn assemble(
        m: &DMatrix<f64>,
        attracting: Result<ProjPoint>,
        left: Result<ProjPoint>,
        top_modulus: f64,
        gap: f64,
    ) -> std::result::Result<ProximalData, NotProximal> {
        // Numerical degeneracies surface as a tie: the verdict stays closed.
        let fail = || NotProximal::ModulusTie { gap: 0.0 };
        let attracting = attracting.map_err(|_| fail())?;
        let left = left.map_err(|_| fail())?;
        let residual =
            (m * attracting.rep() - attracting.rep() * sign_of_top(m, &attracting) * top_modulus)
                .norm();
        if residual > 1e-6 * (1.0 + top_modulus) {
            return Err(fail());
        }
        // The attracting line may not lie in the invariant complement.
        if attracting.rep().dot(left.rep()).abs() < 1e-12 {
            return Err(fail());
        }
        Ok(ProximalData {
            attracting,
            repelling: left.to_dual_hyperplane(),
            top_modulus,
            gap,
        })
    }
}

fn sign_of_top(m: &DMatrix<f64>, v: &ProjPoint) -> f64 {
    let image = m * v.rep();
    if image.dot(v.rep()) >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Eigenline for a (numerically) known simple real eigenvalue: the right
/// singular vector of `g - lambda I` with smallest singular value.
fn eigenline(m: &DMatrix<f64>, lambda: f64) -> Result<ProjPoint> {
    let d = m.nrows();
    let shifted = m - DMatrix::from_diagonal_element(d, d, lambda);
    let svd = nalgebra::linalg::SVD::new(shifted, false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Numerical("SVD did not return right singular vectors".into()))?;
    let mut min_idx = 0;
    for i in 1..svd.singular_values.len() {
        if svd.singular_values[i] < svd.singular_values[min_idx] {
            min_idx = i;
        }
    }
    ProjPoint::new(v_t.row(min_idx).transpose())
}

/// Both `g` and its inverse must be proximal. Returns the data pair
/// `(of g, of g^-1)`.
pub fn biproximality_test(
    g: &UnimodularMatrix,
    gap_tol: f64,
) -> std::result::Result<(ProximalData, ProximalData), NotProximal> {
    let fwd = proximality_test(g, gap_tol)?;
    let bwd = proximality_test(&g.inverse(), gap_tol)?;
    Ok((fwd, bwd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::{point_hyperplane_distance, proj_distance};
    use approx::assert_relative_eq;

    fn unimod(d: usize, entries: &[f64]) -> UnimodularMatrix {
        UnimodularMatrix::from_matrix(DMatrix::from_row_slice(d, d, entries)).unwrap()
    }

    #[test]
    fn diagonal_is_proximal() {
        let g = unimod(3, &[3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0 / 3.0]);
        let data = proximality_test(&g, DEFAULT_GAP_TOL).unwrap();
        assert_relative_eq!(data.gap, 3.0f64.ln(), epsilon = 1e-10);
        assert_relative_eq!(data.top_modulus, 3.0, epsilon = 1e-10);
        let e0 = ProjPoint::from_slice(&[1.0, 0.0, 0.0]).unwrap();
        assert!(proj_distance(&data.attracting, &e0).unwrap() < 1e-10);
        // repelling hyperplane is span{e1, e2}, conormal e0
        assert!(point_hyperplane_distance(&e0, &data.repelling).unwrap() > 1.414);
    }

    #[test]
    fn modulus_tie_is_rejected() {
        let g = unimod(3, &[2.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.25]);
        assert!(matches!(
            proximality_test(&g, DEFAULT_GAP_TOL),
            Err(NotProximal::ModulusTie { .. })
        ));
    }

    #[test]
    fn rotation_is_rejected() {
        let (c, s) = (0.0, 1.0); // rotation by pi/2
        let g = unimod(2, &[c, -s, s, c]);
        assert!(matches!(
            proximality_test(&g, DEFAULT_GAP_TOL),
            Err(NotProximal::ComplexLeadingEigenvalue { .. })
        ));
    }

    #[test]
    fn negative_leading_eigenvalue_is_proximal() {
        let g = unimod(2, &[-4.0, 0.0, 0.0, -0.25]);
        let data = proximality_test(&g, DEFAULT_GAP_TOL).unwrap();
        assert_relative_eq!(data.top_modulus, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn repelling_of_nondiagonal() {
        // conjugate of diag(4, 1/4) by rotation of pi/4
        let g = unimod(2, &[2.125, 1.875, 1.875, 2.125]);
        let data = proximality_test(&g, DEFAULT_GAP_TOL).unwrap();
        let plus = ProjPoint::from_slice(&[1.0, 1.0]).unwrap();
        assert!(proj_distance(&data.attracting, &plus).unwrap() < 1e-10);
        // invariant complement is the (1,-1) line, conormal (1,1)
        let conormal = data.repelling.to_dual_point();
        assert!(proj_distance(&conormal, &plus).unwrap() < 1e-10);
    }

    #[test]
    fn biproximality_of_shear_fails() {
        let g = unimod(2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(biproximality_test(&g, DEFAULT_GAP_TOL).is_err());
    }
}
