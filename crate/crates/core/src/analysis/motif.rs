use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const MAX_MOTIF_NODES: usize = 8;

/// Small pattern graph `F` used in homomorphism counts.
///
/// Text form: `v=3; 0-1 1-2 2-0`, or one of the names `node`, `edge`,
/// `triangle`, `path3` (3 nodes, 2 edges), `path4`, `star4`, `square`,
/// `k4`, `benzene` (6-cycle).
#[derive(Debug, Clone, PartialEq)]
pub struct Motif {
    graph: Graph,
}

impl Motif {
    pub fn new(graph: Graph) -> Result<Self> {
        let v = graph.node_count();
        if v == 0 {
            return Err(Error::InvalidArgument("motif needs at least one node".into()));
        }
        if v > MAX_MOTIF_NODES {
            return Err(Error::MotifTooLarge(v));
        }
        Ok(Motif { graph })
    }

    pub fn node() -> Self {
        Motif { graph: Graph::empty(1) }
    }

    pub fn edge() -> Self {
        Motif { graph: Graph::complete(2) }
    }

    pub fn triangle() -> Self {
        Motif { graph: Graph::complete(3) }
    }

    /// Path on three nodes.
    pub fn path3() -> Self {
        Motif { graph: Graph::path(3) }
    }

    pub fn named(name: &str) -> Option<Self> {
        let graph = match name {
            "node" => Graph::empty(1),
            "edge" => Graph::complete(2),
            "triangle" => Graph::complete(3),
            "path3" => Graph::path(3),
            "path4" => Graph::path(4),
            "star4" => Graph::star(4),
            "square" => Graph::cycle(4),
            "k4" => Graph::complete(4),
            "benzene" => Graph::cycle(6),
            _ => return None,
        };
        Some(Motif { graph })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// `v(F)`
    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    /// `e(F)`
    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }
}

impl FromStr for Motif {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(m) = Motif::named(s) {
            return Ok(m);
        }
        let bad = |msg: &str| Error::InvalidArgument(format!("motif {s:?}: {msg}"));
        let (head, body) = s.split_once(';').unwrap_or((s, ""));
        let v: usize = head
            .trim()
            .strip_prefix("v=")
            .ok_or_else(|| bad("expected a name or \"v=N; a-b ...\""))?
            .trim()
            .parse()
            .map_err(|_| bad("bad node count"))?;
        if v > MAX_MOTIF_NODES {
            return Err(Error::MotifTooLarge(v));
        }
        let edges = body
            .split_whitespace()
            .map(|tok| {
                let (a, b) = tok.split_once('-').ok_or_else(|| bad("edges look like a-b"))?;
                let a = a.parse().map_err(|_| bad("bad edge endpoint"))?;
                let b = b.parse().map_err(|_| bad("bad edge endpoint"))?;
                Ok((a, b))
            })
            .collect::<Result<Vec<(usize, usize)>>>()?;
        Motif::new(Graph::new(v, edges)?)
    }
}

impl fmt::Display for Motif {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v={};", self.node_count())?;
        for (a, b) in self.graph.edges() {
            write!(f, " {a}-{b}")?;
        }
        Ok(())
    }
}
