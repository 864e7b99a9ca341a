//! JSON resource-set files.
//!
//! ```json
//! {
//!   "omega_size": 4,
//!   "resources": [
//!     { "id": "peaked", "strategy": [1, 0, 0, 0] },
//!     { "id": "task",   "fitness": [0.1, 0.9, 0.3, 0.2], "queries": 6 }
//!   ],
//!   "weights": [0.5, 0.5]
//! }
//! ```
//!
//! Syntax and type errors report the line and column; semantic errors
//! report the offending field path, e.g. `resources[1].strategy`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::search::{validate_strategy, InformationResource, ResourceDistribution, ResourceSet};

#[derive(Debug, Error)]
pub enum ResourceFileError {
    #[error("cannot read {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{field}: {message}")]
    Schema { field: String, message: String },
}

fn schema(field: impl Into<String>, message: impl ToString) -> ResourceFileError {
    ResourceFileError::Schema {
        field: field.into(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawResource {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fitness: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub queries: Option<usize>,
}

/// The file as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawResourceFile {
    pub omega_size: usize,
    pub resources: Vec<RawResource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

/// A validated resource file.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceFile {
    pub set: ResourceSet,
    pub weights: Option<Vec<f64>>,
}

impl ResourceFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ResourceFileError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ResourceFileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ResourceFileError> {
        let raw: RawResourceFile =
            serde_json::from_str(text).map_err(|e| ResourceFileError::Syntax {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
        Self::from_raw(raw)
    }

    pub fn from_raw(raw: RawResourceFile) -> Result<Self, ResourceFileError> {
        let n = raw.omega_size;
        if n == 0 {
            return Err(schema("omega_size", "must be at least 1"));
        }
        if raw.resources.is_empty() {
            return Err(schema("resources", "must list at least one resource"));
        }
        let mut resources = Vec::with_capacity(raw.resources.len());
        for (i, r) in raw.resources.into_iter().enumerate() {
            let at = |f: &str| format!("resources[{i}].{f}");
            let resource = match (r.strategy, r.fitness) {
                (Some(strategy), None) => {
                    if r.queries.is_some() {
                        return Err(schema(
                            at("queries"),
                            "only allowed together with `fitness`",
                        ));
                    }
                    let s =
                        validate_strategy(n, &strategy).map_err(|e| schema(at("strategy"), e))?;
                    InformationResource::explicit(r.id, s)
                }
                (None, Some(fitness)) => {
                    if fitness.len() != n {
                        return Err(schema(
                            at("fitness"),
                            format!("expected {n} entries, found {}", fitness.len()),
                        ));
                    }
                    let queries = r
                        .queries
                        .ok_or_else(|| schema(at("queries"), "required with `fitness`"))?;
                    InformationResource::fitness_task(r.id, fitness, queries).map_err(
                        |e| match e {
                            Error::InvalidParameter(m) if m.contains("query") => {
                                schema(at("queries"), m)
                            }
                            other => schema(at("fitness"), other),
                        },
                    )?
                }
                (Some(_), Some(_)) => {
                    return Err(schema(
                        format!("resources[{i}]"),
                        "give either `strategy` or `fitness`, not both",
                    ))
                }
                (None, None) => {
                    return Err(schema(
                        format!("resources[{i}]"),
                        "needs a `strategy` or a `fitness` field",
                    ))
                }
            };
            resources.push(resource);
        }
        let set = ResourceSet::new(n, resources).map_err(|e| schema("resources", e))?;
        if let Some(w) = &raw.weights {
            ResourceDistribution::new(set.clone(), w.clone()).map_err(|e| schema("weights", e))?;
        }
        Ok(Self {
            set,
            weights: raw.weights,
        })
    }

    /// The distribution over the set: `weights` if given, else the file's
    /// weights, else uniform.
    pub fn distribution(&self, weights: Option<Vec<f64>>) -> Result<ResourceDistribution, Error> {
        match weights.or_else(|| self.weights.clone()) {
            Some(w) => ResourceDistribution::new(self.set.clone(), w),
            None => Ok(ResourceDistribution::uniform(self.set.clone())),
        }
    }
}
