//! Unimodular matrices, their duals and exterior powers, and a
//! log-rescaled representation for products that would overflow `f64`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Default tolerance on `|det - 1|` at construction.
pub const DEFAULT_DET_TOL: f64 = 1e-9;

/// A real d x d matrix with determinant 1.
#[derive(Debug, Clone, PartialEq)]
pub struct UnimodularMatrix {
    m: DMatrix<f64>,
}

impl UnimodularMatrix {
    /// Validates shape, finiteness and `|det - 1| <= det_tol`.
    pub fn new(m: DMatrix<f64>, det_tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() < 2 {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let det = m.determinant();
        if (det - 1.0).abs() > det_tol {
            return Err(Error::NotUnimodular { det, tol: det_tol });
        }
        Ok(Self { m })
    }

    /// Construction with the default determinant tolerance.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        Self::new(m, DEFAULT_DET_TOL)
    }

    /// Builds from row-major entries.
    pub fn from_rows(dim: usize, entries: &[f64], det_tol: f64) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::NotSquare {
                rows: dim,
                cols: entries.len() / dim.max(1),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries), det_tol)
    }

    /// Wraps a matrix known to be unimodular (e.g. a product of validated
    /// ones) without re-checking the determinant, but still rejecting
    /// non-finite entries.
    pub(crate) fn from_product(m: DMatrix<f64>) -> Result<Self> {
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::Overflow);
        }
        Ok(Self { m })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn inverse(&self) -> Self {
        let inv = self
            .m
            .clone()
            .try_inverse()
            .expect("unimodular matrix is invertible");
        Self { m: inv }
    }

    /// The action on the dual space: the inverse transpose.
    ///
    /// Satisfies `dual(g)+ = (inverse(g)-)*` and `dual(g)- = (inverse(g)+)*`
    /// for biproximal `g`.
    pub fn dual(&self) -> Self {
        Self {
            m: self.inverse().m.transpose(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            m: self.m.transpose(),
        }
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        singular_values(&self.m)[0]
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        Self::from_product(&self.m * &rhs.m)
    }
}

/// Singular values of `m`, sorted in non-increasing order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let svd = nalgebra::linalg::SVD::new(m.clone(), false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Largest singular value of an arbitrary matrix.
pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    singular_values(m)[0]
}

/// Lexicographically ordered k-subsets of `0..d`.
fn subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k == 0 || k > d {
        return out;
    }
    loop {
        out.push(cur.clone());
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < d - (k - i) {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// The induced action on k-vectors in the lexicographic basis
/// `e_{i1} ^ ... ^ e_{ik}` (i1 < ... < ik). Entries are the k x k minors.
pub fn exterior_power(m: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let d = m.nrows();
    assert!(k >= 1 && k <= d, "exterior power order out of range");
    let idx = subsets(d, k);
    let n = idx.len();
    let mut out = DMatrix::zeros(n, n);
    let mut minor = DMatrix::zeros(k, k);
    for (a, rows) in idx.iter().enumerate() {
        for (b, cols) in idx.iter().enumerate() {
            for (i, &r) in rows.iter().enumerate() {
                for (j, &c) in cols.iter().enumerate() {
                    minor[(i, j)] = m[(r, c)];
                }
            }
            out[(a, b)] = minor.determinant();
        }
    }
    out
}

/// The second exterior power, a C(d,2) x C(d,2) matrix in the basis
/// `e_i ^ e_j` (i < j).
pub fn exterior_square(g: &UnimodularMatrix) -> DMatrix<f64> {
    exterior_power(g.matrix(), 2)
}

/// A matrix stored up to scale, with the scale tracked in log domain.
///
/// The projective action only depends on the rescaled part; norms of long
/// products are recovered as `log_scale + log ||m||` without overflow.
#[derive(Debug, Clone)]
pub struct ScaledMatrix {
    m: DMatrix<f64>,
    log_scale: f64,
}

impl ScaledMatrix {
    pub fn new(m: DMatrix<f64>) -> Self {
        Self { m, log_scale: 0.0 }.normalized()
    }

    /// Wraps a matrix that already stands for `exp(log_scale) * m`.
    pub fn with_log_scale(m: DMatrix<f64>, log_scale: f64) -> Self {
        Self { m, log_scale }.normalized()
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim),
            log_scale: 0.0,
        }
    }

    fn normalized(mut self) -> Self {
        let max = self.m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        if max > 0.0 && max.is_finite() {
            self.m /= max;
            self.log_scale += max.ln();
        }
        self
    }

    /// Rescaled representative; its largest entry has absolute value 1.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self {
            m: &self.m * &rhs.m,
            log_scale: self.log_scale + rhs.log_scale,
        }
        .normalized()
    }

    /// n-th power by repeated squaring, renormalizing at every step.
    pub fn pow(&self, n: u64) -> Self {
        let mut result = Self::identity(self.dim());
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// `log ||A||` for the represented matrix A (operator norm).
    pub fn log_operator_norm(&self) -> f64 {
        operator_norm(&self.m).ln() + self.log_scale
    }
}

impl From<&UnimodularMatrix> for ScaledMatrix {
    fn from(g: &UnimodularMatrix) -> Self {
        ScaledMatrix::new(g.matrix().clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn diag2(a: f64, b: f64) -> UnimodularMatrix {
        UnimodularMatrix::from_matrix(DMatrix::from_row_slice(2, 2, &[a, 0.0, 0.0, b])).unwrap()
    }

    #[test]
    fn rejects_bad_determinant() {
        let m = DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 1.0]);
        assert!(matches!(
            UnimodularMatrix::from_matrix(m),
            Err(Error::NotUnimodular { .. })
        ));
    }

    #[test]
    fn rejects_non_finite() {
        let m = DMatrix::from_row_slice(2, 2, &[f64::NAN, 0.0, 0.0, 1.0]);
        assert!(matches!(
            UnimodularMatrix::from_matrix(m),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn dual_of_diagonal() {
        let g = diag2(2.0, 0.5);
        let dual = g.dual();
        assert_relative_eq!(dual.matrix()[(0, 0)], 0.5);
        assert_relative_eq!(dual.matrix()[(1, 1)], 2.0);
    }

    #[test]
    fn dual_of_shear() {
        let g =
            UnimodularMatrix::from_matrix(DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]))
                .unwrap();
        let dual = g.dual();
        let expect = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, -1.0, 1.0]);
        assert_relative_eq!(dual.matrix(), &expect, epsilon = 1e-12);
    }

    #[test]
    fn exterior_square_dim2_is_det() {
        let g =
            UnimodularMatrix::from_matrix(DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]))
                .unwrap();
        let w = exterior_square(&g);
        assert_eq!(w.nrows(), 1);
        assert_relative_eq!(w[(0, 0)], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn exterior_square_diag3() {
        let (a, b, c) = (2.0, 3.0, 1.0 / 6.0);
        let g = UnimodularMatrix::from_matrix(DMatrix::from_partial_diagonal(3, 3, &[a, b, c]))
            .unwrap();
        let w = exterior_square(&g);
        // basis e0^e1, e0^e2, e1^e2
        assert_relative_eq!(w[(0, 0)], a * b, epsilon = 1e-12);
        assert_relative_eq!(w[(1, 1)], a * c, epsilon = 1e-12);
        assert_relative_eq!(w[(2, 2)], b * c, epsilon = 1e-12);
        assert_relative_eq!(w[(0, 1)], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn exterior_square_of_identity() {
        let g = UnimodularMatrix::identity(4);
        let w = exterior_square(&g);
        assert_eq!(w.nrows(), 6);
        assert_relative_eq!(&w, &DMatrix::identity(6, 6), epsilon = 1e-12);
    }

    #[test]
    fn scaled_power_tracks_log_norm() {
        let g = diag2(4.0, 0.25);
        let p = ScaledMatrix::from(&g).pow(4096);
        // ||g^n|| = 4^n
        assert_relative_eq!(
            p.log_operator_norm(),
            4096.0 * 4.0f64.ln(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn scaled_mul_matches_plain_product() {
        let g = diag2(4.0, 0.25);
        let h =
            UnimodularMatrix::from_matrix(DMatrix::from_row_slice(2, 2, &[2.125, 1.875, 1.875, 2.125]))
                .unwrap();
        let plain = g.mul(&h).unwrap();
        let scaled = ScaledMatrix::from(&g).mul(&ScaledMatrix::from(&h));
        assert_relative_eq!(
            scaled.log_operator_norm(),
            plain.operator_norm().ln(),
            max_relative = 1e-12
        );
    }
}
