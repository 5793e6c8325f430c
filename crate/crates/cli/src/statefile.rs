//! JSON state files: `{"dims": [dA, dB], "kind": "density" | "pure", "data": [[re, im], ...]}`.

use std::fmt;
use std::path::Path;

use mmes_core::qmat::{BipartiteShape, Complex64, ComplexMatrix, DensityMatrix, PureState};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Density,
    Pure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dims: [usize; 2],
    pub kind: StateKind,
    /// Row-major matrix entries for `density`, the flat vector for `pure`.
    pub data: Vec<[f64; 2]>,
}

/// A state read from disk.
#[derive(Debug, Clone)]
pub enum LoadedState {
    Density(DensityMatrix),
    Pure(PureState),
}

impl LoadedState {
    pub fn into_density(self) -> DensityMatrix {
        match self {
            LoadedState::Density(d) => d,
            LoadedState::Pure(p) => p.to_density(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateFileError {
    Io(String),
    /// Syntax or schema problem at a given line and column.
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    /// Entries parse but break a state invariant.
    Invalid(String),
}

impl fmt::Display for StateFileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateFileError::Io(m) => write!(f, "cannot read state file: {m}"),
            StateFileError::Parse {
                line,
                column,
                message,
            } => {
                write!(f, "line {line}, column {column}: {message}")
            }
            StateFileError::Invalid(m) => write!(f, "state invariant violated: {m}"),
        }
    }
}

fn to_complex(data: &[[f64; 2]]) -> Vec<Complex64> {
    data.iter().map(|[r, i]| Complex64::new(*r, *i)).collect()
}

fn to_pairs(data: &[Complex64]) -> Vec<[f64; 2]> {
    data.iter().map(|z| [z.re, z.im]).collect()
}

impl StateFile {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let s = rho.shape();
        Self {
            dims: [s.da, s.db],
            kind: StateKind::Density,
            data: to_pairs(rho.matrix().as_slice()),
        }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let s = psi.shape();
        Self {
            dims: [s.da, s.db],
            kind: StateKind::Pure,
            data: to_pairs(psi.amplitudes()),
        }
    }

    pub fn parse(text: &str) -> Result<Self, StateFileError> {
        serde_json::from_str(text).map_err(|e| {
            let full = e.to_string();
            let suffix = format!(" at line {} column {}", e.line(), e.column());
            StateFileError::Parse {
                line: e.line(),
                column: e.column(),
                message: full.strip_suffix(&suffix).unwrap_or(&full).to_string(),
            }
        })
    }

    pub fn read(path: &Path) -> Result<Self, StateFileError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| StateFileError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Checks entry count and the state invariants.
    pub fn load(&self) -> Result<LoadedState, StateFileError> {
        let [da, db] = self.dims;
        let shape =
            BipartiteShape::new(da, db).map_err(|e| StateFileError::Invalid(e.to_string()))?;
        let n = shape.dim();
        let expected = match self.kind {
            StateKind::Density => n * n,
            StateKind::Pure => n,
        };
        if self.data.len() != expected {
            return Err(StateFileError::Invalid(format!(
                "dims {da}x{db} need {expected} entries, found {}",
                self.data.len()
            )));
        }
        let entries = to_complex(&self.data);
        let invalid = |e: mmes_core::Error| StateFileError::Invalid(e.to_string());
        match self.kind {
            StateKind::Pure => PureState::new(shape, entries)
                .map(LoadedState::Pure)
                .map_err(invalid),
            StateKind::Density => {
                let m = ComplexMatrix::from_row_major(n, n, entries).map_err(invalid)?;
                DensityMatrix::new(shape, m)
                    .map(LoadedState::Density)
                    .map_err(invalid)
            }
        }
    }
}
