//! Instance documents: JSON with `mu`, `nu`, `matrix`, and optional `name` and
//! `description`.

use std::io::Read;
use std::path::Path;

use mixkt::{MeasureSpace, WeightedMatrix};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    pub matrix: Vec<Vec<f64>>,
}

impl InstanceFile {
    pub fn from_matrix(a: &WeightedMatrix) -> Self {
        Self {
            name: None,
            description: None,
            mu: a.row_space().masses().to_vec(),
            nu: a.col_space().masses().to_vec(),
            matrix: a.to_rows(),
        }
    }

    /// Parses and validates a document; `source` names it in messages.
    pub fn parse(text: &str, source: &str) -> Result<Self, CliError> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| CliError::Parse {
            origin: source.to_string(),
            message: format!("line {}, column {}: {e}", e.line(), e.column()),
        })?;
        file.validate(source)?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instances always serialize")
    }

    fn validate(&self, source: &str) -> Result<(), CliError> {
        let err = |message: String| CliError::Parse {
            origin: source.to_string(),
            message,
        };
        for (field, masses) in [("mu", &self.mu), ("nu", &self.nu)] {
            if masses.is_empty() {
                return Err(err(format!("field '{field}': needs at least one mass")));
            }
            if let Some((i, w)) = masses.iter().enumerate().find(|(_, w)| !(**w > 0.0 && w.is_finite())) {
                return Err(err(format!(
                    "field '{field}[{i}]': mass {w} must be positive and finite"
                )));
            }
        }
        if self.matrix.len() != self.mu.len() {
            return Err(err(format!(
                "field 'matrix': {} rows, but 'mu' has {} entries",
                self.matrix.len(),
                self.mu.len()
            )));
        }
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != self.nu.len() {
                return Err(err(format!(
                    "field 'matrix[{i}]': {} entries, but 'nu' has {}",
                    row.len(),
                    self.nu.len()
                )));
            }
            if let Some(j) = row.iter().position(|x| !x.is_finite()) {
                return Err(err(format!("field 'matrix[{i}][{j}]': value is not finite")));
            }
        }
        Ok(())
    }

    pub fn matrix(&self) -> Result<WeightedMatrix, CliError> {
        let rows = MeasureSpace::new(self.mu.clone())?;
        let cols = MeasureSpace::new(self.nu.clone())?;
        Ok(WeightedMatrix::from_rows(rows, cols, &self.matrix)?)
    }
}

/// Reads an instance from `path`, or from standard input when it is `None` or `-`.
pub fn read_instance(path: Option<&Path>) -> Result<InstanceFile, CliError> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Parse {
                origin: p.display().to_string(),
                message: e.to_string(),
            })?;
            InstanceFile::parse(&text, &p.display().to_string())
        }
        _ => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| CliError::Parse {
                    origin: "<stdin>".into(),
                    message: e.to_string(),
                })?;
            InstanceFile::parse(&text, "<stdin>")
        }
    }
}
