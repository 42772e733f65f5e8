//! JSON and DOT serialisation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::finite_graph::name::VertexName;
use crate::finite_graph::structure::{Kind, Part, Structure};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StructureJson {
    kind: Kind,
    vertices: Vec<VertexName>,
    edges: Vec<(VertexName, VertexName)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parts: Option<BTreeMap<VertexName, Part>>,
}

impl Serialize for Structure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StructureJson {
            kind: self.kind(),
            vertices: self.vertices().iter().cloned().collect(),
            edges: self.edges(),
            parts: (self.kind() == Kind::Bipartite).then(|| self.parts().clone()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Structure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = StructureJson::deserialize(d)?;
        let vertices: BTreeSet<_> = j.vertices.into_iter().collect();
        Structure::build(j.kind, vertices, j.edges, j.parts.unwrap_or_default())
            .map_err(serde::de::Error::custom)
    }
}

pub fn to_json(g: &Structure) -> String {
    serde_json::to_string_pretty(g).expect("structures always serialise")
}

pub fn from_json(text: &str) -> Result<Structure> {
    Ok(serde_json::from_str(text)?)
}

/// Graphviz rendering. Bipartite parts are drawn as two ranked clusters.
pub fn to_dot(g: &Structure) -> String {
    let mut out = String::new();
    let (head, sep) = match g.kind() {
        Kind::Digraph => ("digraph", "->"),
        _ => ("graph", "--"),
    };
    writeln!(out, "{head} G {{").unwrap();
    if g.kind() == Kind::Bipartite {
        for p in 0..2u8 {
            writeln!(out, "  subgraph cluster_part{p} {{").unwrap();
            writeln!(out, "    label=\"part {p}\";").unwrap();
            writeln!(out, "    rank=same;").unwrap();
            for v in g.part_members(p) {
                writeln!(out, "    \"{v}\";").unwrap();
            }
            writeln!(out, "  }}").unwrap();
        }
    } else {
        for v in g.vertices() {
            writeln!(out, "  \"{v}\";").unwrap();
        }
    }
    for (u, v) in g.edges() {
        writeln!(out, "  \"{u}\" {sep} \"{v}\";").unwrap();
    }
    out.push_str("}\n");
    out
}
