//! Theory files (JSON, UTF-8).
//!
//! Matrices are row-major; the row index is the input effect coordinate
//! under right action. `experiments` is optional and lists, for each declared
//! experiment, the names of its transformations.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bipartite::BipartiteForm;
use crate::error::{check_dim, Error, Result};
use crate::theory::{
    Cone, EffectVector, Experiment, Named, StateVector, Theory, TransformationMatrix,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoryFile {
    pub name: String,
    pub effect_dim: usize,
    pub unit_effect: Vec<f64>,
    pub identity: Vec<Vec<f64>>,
    pub transformations: Vec<NamedMatrix>,
    pub extremal_states: Vec<NamedCoords>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub faithful_state: Option<MatrixFragment>,
    pub cone: Cone,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub experiments: Vec<ExperimentSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedMatrix {
    pub name: String,
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedCoords {
    pub name: String,
    pub coords: Vec<f64>,
}

/// `{"matrix": [[...]]}`, also the format of calibration estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFragment {
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub transformations: Vec<String>,
}

impl MatrixFragment {
    pub fn from_matrix(m: &TransformationMatrix) -> Self {
        MatrixFragment {
            matrix: m.to_rows(),
        }
    }
}

impl TheoryFile {
    pub fn from_theory(theory: &Theory) -> Self {
        TheoryFile {
            name: theory.name.clone(),
            effect_dim: theory.effect_dim(),
            unit_effect: theory.unit_effect.0.iter().copied().collect(),
            identity: theory.identity.to_rows(),
            transformations: theory
                .transformations
                .iter()
                .map(|t| NamedMatrix {
                    name: t.name.clone(),
                    matrix: t.value.to_rows(),
                })
                .collect(),
            extremal_states: theory
                .extremal_states
                .iter()
                .map(|s| NamedCoords {
                    name: s.name.clone(),
                    coords: s.value.0.iter().copied().collect(),
                })
                .collect(),
            faithful_state: theory.faithful_state.as_ref().map(|f| MatrixFragment {
                matrix: TransformationMatrix(f.0.clone()).to_rows(),
            }),
            cone: theory.cone,
            experiments: theory
                .experiments
                .iter()
                .map(|e| ExperimentSpec {
                    name: e.name.clone(),
                    transformations: e.members.clone(),
                })
                .collect(),
        }
    }

    pub fn into_theory(self) -> Result<Theory> {
        let d = self.effect_dim;
        check_dim("unit_effect", d, self.unit_effect.len())?;
        let square = |what: &str, rows: &[Vec<f64>]| -> Result<TransformationMatrix> {
            check_dim(what, d, rows.len())?;
            TransformationMatrix::from_rows(rows)
        };
        let identity = square("identity", &self.identity)?;
        let transformations = self
            .transformations
            .iter()
            .map(|t| Ok(Named::new(t.name.clone(), square(&t.name, &t.matrix)?)))
            .collect::<Result<Vec<_>>>()?;
        let extremal_states = self
            .extremal_states
            .into_iter()
            .map(|s| Named::new(s.name, StateVector::from_vec(s.coords)))
            .collect();
        let faithful_state = self
            .faithful_state
            .map(|f| square("faithful_state", &f.matrix).map(|m| BipartiteForm(m.0)))
            .transpose()?;
        let experiments = self
            .experiments
            .into_iter()
            .map(|e| Experiment {
                name: e.name,
                members: e.transformations,
            })
            .collect();
        Theory::new(
            self.name,
            EffectVector::from_vec(self.unit_effect),
            identity,
            transformations,
            extremal_states,
            experiments,
            self.cone,
            faithful_state,
        )
    }
}

pub fn theory_from_json(text: &str) -> Result<Theory> {
    let file: TheoryFile = serde_json::from_str(text)?;
    file.into_theory()
}

pub fn theory_to_json(theory: &Theory) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&TheoryFile::from_theory(theory))?;
    s.push('\n');
    Ok(s)
}

pub fn read_theory(path: &Path) -> Result<Theory> {
    let text = std::fs::read_to_string(path)?;
    theory_from_json(&text).map_err(|e| match e {
        Error::Json(j) => Error::Input(format!("{}: {j}", path.display())),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BIT: &str = r#"{
        "name": "bit",
        "effect_dim": 2,
        "unit_effect": [1, 1],
        "identity": [[1, 0], [0, 1]],
        "transformations": [{"name": "select_0", "matrix": [[1, 0], [0, 0]]}],
        "extremal_states": [{"name": "s0", "coords": [1, 0]}, {"name": "s1", "coords": [0, 1]}],
        "faithful_state": {"matrix": [[0.5, 0], [0, 0.5]]},
        "cone": {"kind": "classical-substochastic"}
    }"#;

    #[test]
    fn parses_minimal_file() {
        let t = theory_from_json(BIT).unwrap();
        assert_eq!(t.effect_dim(), 2);
        assert_eq!(t.cone, Cone::ClassicalSubstochastic);
        assert!(t.experiments.is_empty());
        assert!(t.validate(1e-9).all_passed());
    }

    #[test]
    fn quantum_cone_carries_hilbert_dim() {
        let cone: Cone =
            serde_json::from_str(r#"{"kind": "quantum-choi", "hilbert_dim": 2}"#).unwrap();
        assert_eq!(cone, Cone::QuantumChoi { hilbert_dim: 2 });
        assert!(serde_json::from_str::<Cone>(r#"{"kind": "simplex"}"#).is_err());
    }

    #[test]
    fn dimension_mismatch_is_an_input_error() {
        let bad = BIT.replace(r#""unit_effect": [1, 1]"#, r#""unit_effect": [1, 1, 1]"#);
        assert!(matches!(
            theory_from_json(&bad),
            Err(Error::DimensionMismatch { .. })
        ));
        let ragged = BIT.replace("[[1, 0], [0, 0]]", "[[1, 0], [0]]");
        assert!(matches!(
            theory_from_json(&ragged),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn unknown_experiment_member_rejected() {
        let bad = BIT.replace(
            r#""cone""#,
            r#""experiments": [{"name": "m", "transformations": ["nope"]}], "cone""#,
        );
        assert!(matches!(theory_from_json(&bad), Err(Error::Unknown { .. })));
    }
}
