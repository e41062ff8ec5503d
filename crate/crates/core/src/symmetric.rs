//! Symmetric sets of unimodular matrices: `2r` elements closed under
//! inversion, with a fixpoint-free pairing, plus powered variants used by
//! the power search.

use crate::error::{Error, NotProximal, Result};
use crate::matrix::{exterior_power, ScaledMatrix, UnimodularMatrix};
use crate::proximal::{proximality_test, ProximalData};

/// Tolerance on `||g * g_pair - I||` when explicit inverses are supplied.
pub const PAIRING_TOL: f64 = 1e-8;

/// A symmetric set `S = {g_1, g_1^-1, ..., g_r, g_r^-1}` in canonical
/// order: element `2k` is the k-th generator, `2k + 1` its inverse.
#[derive(Debug, Clone)]
pub struct SymmetricSet {
    dim: usize,
    elements: Vec<UnimodularMatrix>,
    names: Vec<String>,
}

impl SymmetricSet {
    /// Symmetric closure of a generator list; inverses are computed.
    pub fn from_generators(generators: Vec<(String, UnimodularMatrix)>) -> Result<Self> {
        let with_inverses = generators
            .into_iter()
            .map(|(name, g)| (name, g, None))
            .collect();
        Self::from_generators_with_inverses(with_inverses)
    }

    /// Symmetric closure where each generator may carry an explicit
    /// inverse, validated against `PAIRING_TOL`.
    pub fn from_generators_with_inverses(
        generators: Vec<(String, UnimodularMatrix, Option<UnimodularMatrix>)>,
    ) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::DegenerateSet);
        }
        let dim = generators[0].1.dim();
        let mut elements = Vec::with_capacity(2 * generators.len());
        let mut names = Vec::with_capacity(2 * generators.len());
        for (idx, (name, g, inv)) in generators.into_iter().enumerate() {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: g.dim(),
                });
            }
            let inv = match inv {
                Some(explicit) => {
                    if explicit.dim() != dim {
                        return Err(Error::DimensionMismatch {
                            left: dim,
                            right: explicit.dim(),
                        });
                    }
                    let defect = (g.matrix() * explicit.matrix()
                        - nalgebra::DMatrix::identity(dim, dim))
                    .norm();
                    if defect > PAIRING_TOL {
                        return Err(Error::PairingDefect {
                            index: 2 * idx,
                            defect,
                        });
                    }
                    explicit
                }
                None => g.inverse(),
            };
            names.push(name.clone());
            names.push(format!("{name}^-1"));
            elements.push(g);
            elements.push(inv);
        }
        Ok(Self {
            dim,
            elements,
            names,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of generators r; the set has 2r elements.
    pub fn rank(&self) -> usize {
        self.elements.len() / 2
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Index of the inverse of element `i` (a fixpoint-free involution).
    pub fn pair(&self, i: usize) -> usize {
        i ^ 1
    }

    pub fn element(&self, i: usize) -> &UnimodularMatrix {
        &self.elements[i]
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn elements(&self) -> &[UnimodularMatrix] {
        &self.elements
    }

    /// The dual set `S* = {g* : g in S}` acting on the dual space; the
    /// pairing is preserved since `(g*)^-1 = (g^-1)*`.
    pub fn dual_set(&self) -> Self {
        Self {
            dim: self.dim,
            elements: self.elements.iter().map(|g| g.dual()).collect(),
            names: self.names.iter().map(|n| format!("{n}*")).collect(),
        }
    }

    /// Proximality data for every element and every dual element; fails
    /// on the first element that is not proximal. Since the set is
    /// symmetric this certifies biproximality of the whole set.
    pub fn certify_biproximal(&self, gap_tol: f64) -> Result<ProximalityBundle> {
        let fail = |index: usize, name: &str, reason: NotProximal| Error::NotBiproximal {
            index,
            name: name.to_string(),
            reason,
        };
        let mut primal = Vec::with_capacity(self.len());
        for (i, g) in self.elements.iter().enumerate() {
            primal.push(proximality_test(g, gap_tol).map_err(|r| fail(i, self.name(i), r))?);
        }
        let mut dual = Vec::with_capacity(self.len());
        for (i, g) in self.elements.iter().enumerate() {
            dual.push(
                proximality_test(&g.dual(), gap_tol)
                    .map_err(|r| fail(i, self.name(i), r))?,
            );
        }
        Ok(ProximalityBundle { primal, dual })
    }

    /// The set `S^n` in log-rescaled form.
    pub fn powered(&self, power: u32) -> PoweredSet {
        let elements = self
            .elements
            .iter()
            .map(|g| ScaledMatrix::from(g).pow(power as u64))
            .collect();
        PoweredSet {
            base: self.clone(),
            power,
            elements,
        }
    }
}

/// Per-index fixed-point data for a symmetric set and its dual.
#[derive(Debug, Clone)]
pub struct ProximalityBundle {
    pub primal: Vec<ProximalData>,
    pub dual: Vec<ProximalData>,
}

/// A symmetric set raised to a power, kept up to scale. The fixed-point
/// data of `g^n` coincides with that of `g`, so certificates reuse the
/// base bundle while the rescaled matrices carry the contraction.
#[derive(Debug, Clone)]
pub struct PoweredSet {
    base: SymmetricSet,
    power: u32,
    elements: Vec<ScaledMatrix>,
}

impl PoweredSet {
    pub(crate) fn from_parts(base: SymmetricSet, power: u32, elements: Vec<ScaledMatrix>) -> Self {
        Self {
            base,
            power,
            elements,
        }
    }

    pub fn base(&self) -> &SymmetricSet {
        &self.base
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn dim(&self) -> usize {
        self.base.dim
    }

    pub fn rank(&self) -> usize {
        self.base.rank()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn pair(&self, i: usize) -> usize {
        i ^ 1
    }

    pub fn element(&self, i: usize) -> &ScaledMatrix {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[ScaledMatrix] {
        &self.elements
    }

    /// Display name of element `i` at this power, e.g. `a^3` and `a^-3`.
    pub fn name(&self, i: usize) -> String {
        let base = self.base.name(i);
        if self.power == 1 {
            base.to_string()
        } else if let Some(stem) = base.strip_suffix("^-1") {
            format!("{stem}^-{}", self.power)
        } else {
            format!("{base}^{}", self.power)
        }
    }

    /// The powered dual set `(S*)^n = (S^n)*`.
    pub fn dual(&self) -> PoweredSet {
        self.base.dual_set().powered(self.power)
    }

    /// Second exterior powers of the powered elements, log-rescaled.
    pub fn wedge_elements(&self) -> Vec<ScaledMatrix> {
        self.elements
            .iter()
            .map(|e| {
                ScaledMatrix::with_log_scale(
                    exterior_power(e.matrix(), 2),
                    2.0 * e.log_scale(),
                )
            })
            .collect()
    }
}
