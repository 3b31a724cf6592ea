use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{IsingModel, QubitId};
use crate::error::{Error, Result};

/// On-disk model schema:
/// `{"variables":[ids], "h":{"id":coef}, "J":[[i,j,coef]...], "offset":real}`.
///
/// An optional `provenance` object records how the model was produced and
/// is ignored when the model is loaded.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
    pub variables: Vec<QubitId>,
    #[serde(default)]
    pub h: BTreeMap<QubitId, f64>,
    #[serde(rename = "J", default)]
    pub j: Vec<(QubitId, QubitId, f64)>,
    #[serde(default)]
    pub offset: f64,
}

impl From<&IsingModel> for ModelFile {
    fn from(m: &IsingModel) -> Self {
        ModelFile {
            provenance: None,
            variables: m.variables().collect(),
            h: m.linear_terms().collect(),
            j: m.quadratic_terms().collect(),
            offset: m.offset(),
        }
    }
}

impl TryFrom<ModelFile> for IsingModel {
    type Error = Error;

    fn try_from(f: ModelFile) -> Result<IsingModel> {
        let vars: BTreeSet<QubitId> = f.variables.iter().copied().collect();
        if vars.len() != f.variables.len() {
            return Err(Error::InvalidModel("duplicate entries in variables".into()));
        }
        if !f.offset.is_finite() {
            return Err(Error::InvalidModel("offset is not finite".into()));
        }
        let mut m = IsingModel::new();
        for &q in &vars {
            m.add_variable(q);
        }
        for (&q, &v) in &f.h {
            if !vars.contains(&q) {
                return Err(Error::InvalidModel(format!("h references undeclared qubit {q}")));
            }
            m.set_linear(q, v)?;
        }
        let mut seen = BTreeSet::new();
        for &(a, b, v) in &f.j {
            for q in [a, b] {
                if !vars.contains(&q) {
                    return Err(Error::InvalidModel(format!("J references undeclared qubit {q}")));
                }
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(Error::InvalidModel(format!("duplicate coupler ({a}, {b})")));
            }
            m.set_quadratic(a, b, v)?;
        }
        m.set_offset(f.offset);
        Ok(m)
    }
}

impl IsingModel {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ModelFile::from(self))?)
    }

    pub fn to_json_with_provenance(&self, provenance: serde_json::Value) -> Result<String> {
        let mut f = ModelFile::from(self);
        f.provenance = Some(provenance);
        Ok(serde_json::to_string_pretty(&f)?)
    }

    pub fn from_json(s: &str) -> Result<IsingModel> {
        let f: ModelFile = serde_json::from_str(s)?;
        f.try_into()
    }

    pub fn load(path: &Path) -> Result<IsingModel> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
