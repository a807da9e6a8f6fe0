//! Line-oriented text format for mesh fixtures.
//!
//! ```text
//! mgfem-mesh 1
//! dim <d>
//! nodes <N>
//! <x> <y> <z>                       N lines, local node order
//! elements <M>
//! <level> <n_0> ... <n_{2^d-1}>      M lines, corners in lexicographic order
//! constraints <K>
//! <hanging> <count> <master> <weight> ...   K lines
//! ```
//!
//! Node indices are the compact local numbering of [`Topology`]. Reals are
//! written in shortest round-trip scientific notation, so reading a file
//! back reproduces the values exactly.

use std::fmt::Write as _;
use std::path::Path;

use super::hanging::hanging_constraints;
use super::topology::Topology;
use super::tree::HierMesh;
use crate::error::{Error, Result};

const MAGIC: &str = "mgfem-mesh 1";

#[derive(Debug, Clone, PartialEq)]
pub struct MeshText {
    pub dim: usize,
    pub coords: Vec<[f64; 3]>,
    pub elements: Vec<(u32, Vec<usize>)>,
    /// `(hanging, [(master, weight)])`.
    pub constraints: Vec<(usize, Vec<(usize, f64)>)>,
}

impl MeshText {
    pub fn from_mesh(mesh: &HierMesh) -> Self {
        let topo = Topology::new(mesh);
        let nc = topo.n_corners();
        let elements = topo
            .elements
            .iter()
            .zip(&topo.elem_nodes)
            .map(|(&e, l)| (mesh.element(e).level, l[..nc].to_vec()))
            .collect();
        let constraints = hanging_constraints(mesh)
            .into_iter()
            .map(|c| {
                let h = topo.local(c.hanging_node).expect("hanging node is active");
                let m = c
                    .masters
                    .iter()
                    .zip(&c.weights)
                    .map(|(&m, &w)| (topo.local(m).expect("master is active"), w))
                    .collect();
                (h, m)
            })
            .collect();
        Self {
            dim: topo.dim,
            coords: topo.coords,
            elements,
            constraints,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{MAGIC}");
        let _ = writeln!(s, "dim {}", self.dim);
        let _ = writeln!(s, "nodes {}", self.coords.len());
        for x in &self.coords {
            let _ = writeln!(s, "{:e} {:e} {:e}", x[0], x[1], x[2]);
        }
        let _ = writeln!(s, "elements {}", self.elements.len());
        for (level, nodes) in &self.elements {
            let _ = write!(s, "{level}");
            for n in nodes {
                let _ = write!(s, " {n}");
            }
            s.push('\n');
        }
        let _ = writeln!(s, "constraints {}", self.constraints.len());
        for (h, masters) in &self.constraints {
            let _ = write!(s, "{h} {}", masters.len());
            for (m, w) in masters {
                let _ = write!(s, " {m} {w:e}");
            }
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::InvalidMesh(format!("unexpected end of file, expected {what}")))
        };
        let (_, magic) = next("header")?;
        if magic != MAGIC {
            return Err(Error::InvalidMesh(format!("bad header `{magic}`")));
        }
        let dim = header_count(next("dim")?, "dim")?;
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidMesh(format!("dimension must be 2 or 3, got {dim}")));
        }
        let n_nodes = header_count(next("nodes")?, "nodes")?;
        let mut coords = Vec::with_capacity(n_nodes);
        for _ in 0..n_nodes {
            let (ln, l) = next("node coordinates")?;
            let v: Vec<f64> = fields(ln, l)?;
            if v.len() != 3 {
                return Err(bad_line(ln, "expected 3 coordinates"));
            }
            coords.push([v[0], v[1], v[2]]);
        }
        let n_elems = header_count(next("elements")?, "elements")?;
        let mut elements = Vec::with_capacity(n_elems);
        for _ in 0..n_elems {
            let (ln, l) = next("element")?;
            let v: Vec<usize> = fields(ln, l)?;
            if v.len() != 1 + (1 << dim) {
                return Err(bad_line(ln, "wrong number of element corners"));
            }
            if v[1..].iter().any(|&n| n >= n_nodes) {
                return Err(bad_line(ln, "node index out of range"));
            }
            elements.push((v[0] as u32, v[1..].to_vec()));
        }
        let n_cons = header_count(next("constraints")?, "constraints")?;
        let mut constraints = Vec::with_capacity(n_cons);
        for _ in 0..n_cons {
            let (ln, l) = next("constraint")?;
            let tok: Vec<&str> = l.split_whitespace().collect();
            let parse_idx = |t: &str| -> Result<usize> {
                t.parse().map_err(|_| bad_line(ln, "bad index"))
            };
            if tok.len() < 2 {
                return Err(bad_line(ln, "truncated constraint"));
            }
            let h = parse_idx(tok[0])?;
            let k = parse_idx(tok[1])?;
            if tok.len() != 2 + 2 * k {
                return Err(bad_line(ln, "wrong number of master entries"));
            }
            let mut masters = Vec::with_capacity(k);
            for j in 0..k {
                let m = parse_idx(tok[2 + 2 * j])?;
                let w: f64 = tok[3 + 2 * j].parse().map_err(|_| bad_line(ln, "bad weight"))?;
                masters.push((m, w));
            }
            constraints.push((h, masters));
        }
        Ok(Self {
            dim,
            coords,
            elements,
            constraints,
        })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

fn bad_line(line: usize, msg: &str) -> Error {
    Error::InvalidMesh(format!("line {line}: {msg}"))
}

fn header_count((ln, l): (usize, &str), key: &str) -> Result<usize> {
    let mut it = l.split_whitespace();
    if it.next() != Some(key) {
        return Err(bad_line(ln, &format!("expected `{key} <count>`")));
    }
    it.next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad_line(ln, &format!("expected `{key} <count>`")))
}

fn fields<T: std::str::FromStr>(ln: usize, l: &str) -> Result<Vec<T>> {
    l.split_whitespace()
        .map(|t| t.parse().map_err(|_| bad_line(ln, &format!("cannot parse `{t}`"))))
        .collect()
}
