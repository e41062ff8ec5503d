//! File formats: matrix-set inputs with decimal-string entries, JSJ graph
//! and registering inputs, and the certificate output.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use anosov_core::jsj::{ElementAssignment, GraphOfGroups};
use anosov_core::{
    AnosovVerdict, PowerSearchResult, RegisteringSpec, RunConfig, SymmetricSet, UnimodularMatrix,
    WellPositionedVerdict,
};

/// One matrix entry: written as a decimal string so certificates do not
/// depend on binary-float formatting across platforms; numbers are
/// accepted on input.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryValue {
    Text(String),
    Number(f64),
}

impl EntryValue {
    fn parse(&self) -> Result<f64> {
        match self {
            EntryValue::Number(v) => Ok(*v),
            EntryValue::Text(s) => s
                .trim()
                .parse::<f64>()
                .with_context(|| format!("invalid matrix entry {s:?}")),
        }
    }
}

pub type MatrixData = Vec<Vec<EntryValue>>;

fn matrix_to_data(m: &nalgebra::DMatrix<f64>) -> MatrixData {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| EntryValue::Text(format!("{}", m[(i, j)])))
                .collect()
        })
        .collect()
}

fn data_to_matrix(data: &MatrixData, dim: usize, what: &str) -> Result<nalgebra::DMatrix<f64>> {
    if data.len() != dim || data.iter().any(|row| row.len() != dim) {
        bail!("matrix for {what} is not {dim}x{dim}");
    }
    let mut out = nalgebra::DMatrix::zeros(dim, dim);
    for (i, row) in data.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            out[(i, j)] = v.parse()?;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorEntry {
    pub name: String,
    pub matrix: MatrixData,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inverse: Option<MatrixData>,
}

/// A symmetric matrix set on disk: named generators, with optional
/// explicit inverses (computed and paired otherwise).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SetFile {
    pub dim: usize,
    pub generators: Vec<GeneratorEntry>,
}

impl SetFile {
    pub fn to_symmetric_set(&self, det_tol: f64) -> Result<SymmetricSet> {
        if self.dim < 2 {
            bail!("dimension must be at least 2");
        }
        let mut generators = Vec::with_capacity(self.generators.len());
        for entry in &self.generators {
            let m = data_to_matrix(&entry.matrix, self.dim, &entry.name)?;
            let g = UnimodularMatrix::new(m, det_tol)
                .with_context(|| format!("generator {}", entry.name))?;
            let inv = entry
                .inverse
                .as_ref()
                .map(|data| -> Result<UnimodularMatrix> {
                    let m = data_to_matrix(data, self.dim, &format!("{}^-1", entry.name))?;
                    UnimodularMatrix::new(m, det_tol)
                        .with_context(|| format!("inverse of {}", entry.name))
                })
                .transpose()?;
            generators.push((entry.name.clone(), g, inv));
        }
        Ok(SymmetricSet::from_generators_with_inverses(generators)?)
    }

    /// Writes generators with explicit inverses so a round-trip
    /// reproduces the set entry-exact.
    pub fn from_set(set: &SymmetricSet) -> SetFile {
        let generators = (0..set.rank())
            .map(|k| GeneratorEntry {
                name: set.name(2 * k).to_string(),
                matrix: matrix_to_data(set.element(2 * k).matrix()),
                inverse: Some(matrix_to_data(set.element(2 * k + 1).matrix())),
            })
            .collect();
        SetFile {
            dim: set.dim(),
            generators,
        }
    }
}

/// Registering input: a graph, the cyclic vertex, and the chosen
/// elements with their matrices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegisterFile {
    pub graph: GraphOfGroups,
    pub cyclic_vertex: String,
    pub a0: NamedMatrix,
    pub neighbors: Vec<NeighborEntry>,
    #[serde(default)]
    pub dim: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NamedMatrix {
    pub name: String,
    pub matrix: MatrixData,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NeighborEntry {
    pub vertex: String,
    pub name: String,
    pub matrix: MatrixData,
}

impl RegisterFile {
    pub fn to_spec(&self, det_tol: f64) -> Result<RegisteringSpec> {
        let dim = match self.dim {
            Some(d) => d,
            None => self.a0.matrix.len(),
        };
        let parse = |named: &str, data: &MatrixData| -> Result<UnimodularMatrix> {
            let m = data_to_matrix(data, dim, named)?;
            UnimodularMatrix::new(m, det_tol).with_context(|| format!("element {named}"))
        };
        let a0 = ElementAssignment {
            name: self.a0.name.clone(),
            matrix: parse(&self.a0.name, &self.a0.matrix)?,
        };
        let neighbors = self
            .neighbors
            .iter()
            .map(|n| -> Result<_> {
                Ok((
                    n.vertex.clone(),
                    Some(ElementAssignment {
                        name: n.name.clone(),
                        matrix: parse(&n.name, &n.matrix)?,
                    }),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RegisteringSpec {
            graph: self.graph.clone(),
            cyclic_vertex: self.cyclic_vertex.clone(),
            a0: Some(a0),
            neighbors,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self {
            name: "anosov".into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailureInfo {
    pub stage: String,
    pub message: String,
}

/// The certificate written by `certify` and `register`: inputs echoed by
/// digest and configuration, evidence, verdict. Identical inputs and
/// seed reproduce this byte-identically apart from `timing_ms`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateFile {
    pub tool: ToolInfo,
    pub input_digest: String,
    pub config: RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub well_positioned: Option<WellPositionedVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power_search: Option<PowerSearchResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anosov: Option<AnosovVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub registering: Option<anosov_core::jsj::RegisteringReport>,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<FailureInfo>,
    pub timing_ms: u64,
}

pub fn sha256_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("sha256:{}", hex::encode(hasher.finalize()))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<(T, String)> {
    let bytes = std::fs::read(path)
        .with_context(|| format!("cannot read input file {}", path.display()))?;
    let value: T = serde_json::from_slice(&bytes)
        .with_context(|| format!("invalid JSON in {}", path.display()))?;
    Ok((value, sha256_digest(&bytes)))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).context("serializing output")?;
    text.push('\n');
    std::fs::write(path, text)
        .with_context(|| format!("cannot write output file {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_file_roundtrip_is_entry_exact() {
        let json = r#"{
            "dim": 2,
            "generators": [
                {"name": "a", "matrix": [["4", "0"], ["0", "0.25"]]},
                {"name": "b", "matrix": [[2.125, 1.875], [1.875, 2.125]]}
            ]
        }"#;
        let file: SetFile = serde_json::from_str(json).unwrap();
        let set = file.to_symmetric_set(1e-9).unwrap();
        assert_eq!(set.len(), 4);
        let rewritten = SetFile::from_set(&set);
        let reparsed = rewritten.to_symmetric_set(1e-9).unwrap();
        for i in 0..set.len() {
            assert_eq!(set.element(i).matrix(), reparsed.element(i).matrix());
        }
    }

    #[test]
    fn wrong_determinant_is_rejected() {
        let json = r#"{"dim": 2, "generators": [{"name": "a", "matrix": [["0.5","0"],["0","1"]]}]}"#;
        let file: SetFile = serde_json::from_str(json).unwrap();
        assert!(file.to_symmetric_set(1e-9).is_err());
    }

    #[test]
    fn wrong_inverse_is_rejected() {
        let json = r#"{"dim": 2, "generators": [
            {"name": "a", "matrix": [["4","0"],["0","0.25"]],
             "inverse": [["2","0"],["0","0.5"]]}
        ]}"#;
        let file: SetFile = serde_json::from_str(json).unwrap();
        assert!(file.to_symmetric_set(1e-9).is_err());
    }

    #[test]
    fn non_square_matrix_is_rejected() {
        let json = r#"{"dim": 2, "generators": [{"name": "a", "matrix": [["4","0","1"],["0","0.25","1"]]}]}"#;
        let file: SetFile = serde_json::from_str(json).unwrap();
        assert!(file.to_symmetric_set(1e-9).is_err());
    }
}
