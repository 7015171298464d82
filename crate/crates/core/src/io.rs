//! JSON files: instances, bare networks and solutions.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::apcp::{SolveStats, Status};
use crate::network::{ArcId, ArcSpec, Instance, ModelError, Network, NodeId, PathSet};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Malformed JSON or a schema violation; the message starts with the
    /// offending field path.
    #[error("{origin}: {path}: {message}")]
    Parse {
        origin: String,
        path: String,
        message: String,
    },
    #[error("{origin}: {source}")]
    Invalid {
        origin: String,
        #[source]
        source: ModelError,
    },
}

/// On-disk instance layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub nodes: Vec<NodeId>,
    pub arcs: Vec<ArcSpec>,
    pub source: NodeId,
    pub dest: NodeId,
    pub k: usize,
    #[serde(default)]
    pub congested_arc: Option<ArcId>,
}

/// On-disk network layout: an instance file without the routing fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub nodes: Vec<NodeId>,
    pub arcs: Vec<ArcSpec>,
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance) -> Self {
        let net = &instance.network;
        InstanceFile {
            nodes: net.node_ids().to_vec(),
            arcs: net.arc_specs(),
            source: net.node_id(instance.source),
            dest: net.node_id(instance.dest),
            k: instance.k,
            congested_arc: instance.congested_arc,
        }
    }

    pub fn into_instance(self) -> Result<Instance, ModelError> {
        let network = Network::new(self.nodes, &self.arcs)?;
        Instance::new(network, self.source, self.dest, self.k, self.congested_arc)
    }
}

impl NetworkFile {
    pub fn from_network(network: &Network) -> Self {
        NetworkFile {
            nodes: network.node_ids().to_vec(),
            arcs: network.arc_specs(),
        }
    }

    pub fn into_network(self) -> Result<Network, ModelError> {
        Network::new(self.nodes, &self.arcs)
    }
}

/// Parses JSON, reporting errors with the path of the offending field
/// (`arcs[2].cap`, `source`, ...).
pub fn from_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, IoError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        IoError::Parse {
            origin: origin.to_string(),
            path,
            message: e.into_inner().to_string(),
        }
    })
}

pub fn parse_instance(text: &str, origin: &str) -> Result<Instance, IoError> {
    from_json::<InstanceFile>(text, origin)?
        .into_instance()
        .map_err(|source| IoError::Invalid {
            origin: origin.to_string(),
            source,
        })
}

pub fn parse_network(text: &str, origin: &str) -> Result<Network, IoError> {
    from_json::<NetworkFile>(text, origin)?
        .into_network()
        .map_err(|source| IoError::Invalid {
            origin: origin.to_string(),
            source,
        })
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `text` plus a trailing newline.
pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, format!("{text}\n")).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

pub fn load_instance(path: &Path) -> Result<Instance, IoError> {
    parse_instance(&read_text(path)?, &path.display().to_string())
}

pub fn save_instance(instance: &Instance, path: &Path) -> Result<(), IoError> {
    write_text(path, &to_json(&InstanceFile::from_instance(instance)))
}

pub fn load_network(path: &Path) -> Result<Network, IoError> {
    parse_network(&read_text(path)?, &path.display().to_string())
}

pub fn save_network(network: &Network, path: &Path) -> Result<(), IoError> {
    write_text(path, &to_json(&NetworkFile::from_network(network)))
}

/// Solution output shared by all methods. `obj_a`/`obj_b` are only present
/// for the disjoint-path relaxations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub paths: Vec<Vec<ArcId>>,
    pub z: Option<i64>,
    pub cost: Option<i64>,
    pub status: Status,
    pub stats: SolveStats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obj_a: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obj_b: Option<i64>,
}

impl SolutionFile {
    pub fn pathset(&self, network: &Network) -> Result<PathSet, ArcId> {
        PathSet::from_arc_ids(network, &self.paths)
    }
}
