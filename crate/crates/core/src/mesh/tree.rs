//! Forest of quadtrees/octrees over a tensor-product grid of root cells.
//!
//! Every node is identified by an integer logical position on the finest
//! representable grid, so lookups and neighbor searches are exact. Physical
//! coordinates come from per-axis maps of the logical position, which gives
//! both uniform meshes and the graded cavity mesh from one representation.
//!
//! A [`HierMesh`] is a view into a shared [`Tree`]: the tree only ever grows
//! and each view records which of its elements are active, refined or not
//! part of the view. All levels of a multigrid hierarchy share one tree.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Deepest refinement level below a root cell.
pub const LMAX: u32 = 24;
const ROOT_SPAN: u64 = 1 << LMAX;

pub type NodeId = usize;
pub type ElemId = usize;

/// Map from the normalized logical coordinate `t ∈ [0,1]` to physical space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisMap {
    Uniform { lo: f64, hi: f64 },
    /// `lo + (hi - lo) · ½(1 - cos(π t))`: clusters points at both ends.
    Cosine { lo: f64, hi: f64 },
}

impl AxisMap {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            AxisMap::Uniform { lo, hi } => lo + (hi - lo) * t,
            AxisMap::Cosine { lo, hi } => {
                if t == 0.0 {
                    lo
                } else if t == 1.0 {
                    hi
                } else {
                    lo + (hi - lo) * 0.5 * (1.0 - (std::f64::consts::PI * t).cos())
                }
            }
        }
    }

    pub fn lo(&self) -> f64 {
        match *self {
            AxisMap::Uniform { lo, .. } | AxisMap::Cosine { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> f64 {
        match *self {
            AxisMap::Uniform { hi, .. } | AxisMap::Cosine { hi, .. } => hi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElemState {
    Active,
    Refined,
    /// Exists in the shared tree but is not part of this view.
    Dormant,
}

#[derive(Debug, Clone)]
pub struct Element {
    pub level: u32,
    /// Logical position of the lower corner.
    pub anchor: [u64; 3],
    /// Corner nodes, corner `c = cx + 2cy + 4cz`. Only the first `2^dim`
    /// entries are meaningful.
    pub nodes: [NodeId; 8],
    pub parent: Option<ElemId>,
    /// Children are stored contiguously starting here, in corner order.
    pub first_child: Option<ElemId>,
}

impl Element {
    pub fn corners<'a>(&'a self, dim: usize) -> &'a [NodeId] {
        &self.nodes[..1 << dim]
    }
}

#[derive(Debug, Clone)]
pub struct Tree {
    dim: usize,
    roots: [usize; 3],
    maps: [AxisMap; 3],
    elements: Vec<Element>,
    keys: Vec<[u64; 3]>,
    coords: Vec<[f64; 3]>,
    lookup: HashMap<[u64; 3], NodeId>,
}

impl Tree {
    fn new(dim: usize, roots: [usize; 3], maps: [AxisMap; 3]) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidMesh(format!("dimension must be 2 or 3, got {dim}")));
        }
        let roots = if dim == 2 { [roots[0], roots[1], 1] } else { roots };
        if roots.iter().any(|&r| r == 0) {
            return Err(Error::InvalidMesh("root grid needs at least one cell per axis".into()));
        }
        for m in &maps[..dim] {
            if !(m.hi() > m.lo()) || !m.lo().is_finite() || !m.hi().is_finite() {
                return Err(Error::InvalidMesh(format!("invalid axis extent {m:?}")));
            }
        }
        let mut t = Tree {
            dim,
            roots,
            maps,
            elements: Vec::new(),
            keys: Vec::new(),
            coords: Vec::new(),
            lookup: HashMap::new(),
        };
        for k in 0..roots[2] {
            for j in 0..roots[1] {
                for i in 0..roots[0] {
                    let anchor = [i as u64 * ROOT_SPAN, j as u64 * ROOT_SPAN, k as u64 * ROOT_SPAN];
                    let nodes = t.corner_nodes(anchor, 0);
                    t.elements.push(Element {
                        level: 0,
                        anchor,
                        nodes,
                        parent: None,
                        first_child: None,
                    });
                }
            }
        }
        Ok(t)
    }

    fn span(&self, axis: usize) -> u64 {
        self.roots[axis] as u64 * ROOT_SPAN
    }

    fn node_at(&mut self, key: [u64; 3]) -> NodeId {
        if let Some(&id) = self.lookup.get(&key) {
            return id;
        }
        let id = self.keys.len();
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = self.maps[a].eval(key[a] as f64 / self.span(a) as f64);
        }
        self.keys.push(key);
        self.coords.push(x);
        self.lookup.insert(key, id);
        id
    }

    fn corner_nodes(&mut self, anchor: [u64; 3], level: u32) -> [NodeId; 8] {
        let h = size_at(level);
        let mut nodes = [0; 8];
        for (c, n) in nodes.iter_mut().enumerate().take(1 << self.dim) {
            let mut key = anchor;
            for (a, k) in key.iter_mut().enumerate().take(self.dim) {
                *k += ((c >> a) & 1) as u64 * h;
            }
            *n = self.node_at(key);
        }
        nodes
    }

    fn ensure_children(&mut self, e: ElemId) -> ElemId {
        if let Some(fc) = self.elements[e].first_child {
            return fc;
        }
        let (level, anchor) = (self.elements[e].level, self.elements[e].anchor);
        let h = size_at(level + 1);
        let first = self.elements.len();
        for c in 0..1usize << self.dim {
            let mut ca = anchor;
            for (a, k) in ca.iter_mut().enumerate().take(self.dim) {
                *k += ((c >> a) & 1) as u64 * h;
            }
            let nodes = self.corner_nodes(ca, level + 1);
            self.elements.push(Element {
                level: level + 1,
                anchor: ca,
                nodes,
                parent: Some(e),
                first_child: None,
            });
        }
        self.elements[e].first_child = Some(first);
        first
    }
}

/// Logical edge length of a cell on `level`.
#[inline]
pub fn size_at(level: u32) -> u64 {
    ROOT_SPAN >> level
}

/// Corner offsets `(dx, dy, dz) ∈ {-1,0,1}^dim` of the face neighbors, and in
/// 3D also the edge neighbors. Both kinds are kept 2:1 balanced.
pub(crate) fn balance_directions(dim: usize) -> Vec<[i64; 3]> {
    let mut dirs = Vec::new();
    let range = |a: usize| if a < dim { -1..=1 } else { 0..=0 };
    for dz in range(2) {
        for dy in range(1) {
            for dx in range(0) {
                let nz = (dx != 0) as usize + (dy != 0) as usize + (dz != 0) as usize;
                let max = if dim == 2 { 1 } else { 2 };
                if nz >= 1 && nz <= max {
                    dirs.push([dx, dy, dz]);
                }
            }
        }
    }
    dirs
}

/// A mesh: one view into a shared refinement tree.
#[derive(Debug, Clone)]
pub struct HierMesh {
    tree: Arc<Tree>,
    state: Vec<ElemState>,
}

impl HierMesh {
    /// Tensor-product grid of `roots` unrefined cells with per-axis maps.
    pub fn from_roots(dim: usize, roots: [usize; 3], maps: [AxisMap; 3]) -> Result<Self> {
        let tree = Tree::new(dim, roots, maps)?;
        let state = vec![ElemState::Active; tree.elements.len()];
        Ok(Self {
            tree: Arc::new(tree),
            state,
        })
    }

    pub fn dim(&self) -> usize {
        self.tree.dim
    }

    pub fn roots(&self) -> [usize; 3] {
        self.tree.roots
    }

    pub fn axis_maps(&self) -> [AxisMap; 3] {
        self.tree.maps
    }

    pub fn n_corners(&self) -> usize {
        1 << self.tree.dim
    }

    /// True when both views share the same underlying tree, so their node
    /// and element ids are interchangeable.
    pub fn shares_tree_with(&self, other: &HierMesh) -> bool {
        Arc::ptr_eq(&self.tree, &other.tree)
    }

    /// True when node and element ids mean the same thing in both views.
    ///
    /// Refining a view whose tree is shared copies the tree before
    /// appending to it, so a refined mesh and its source still agree on
    /// every id the source knows about. This checks that one tree is a
    /// prefix of the other.
    pub fn ids_compatible_with(&self, other: &HierMesh) -> bool {
        if self.shares_tree_with(other) {
            return true;
        }
        let (a, b) = if self.tree.elements.len() <= other.tree.elements.len() {
            (&self.tree, &other.tree)
        } else {
            (&other.tree, &self.tree)
        };
        a.dim == b.dim
            && a.roots == b.roots
            && a.maps == b.maps
            && a.keys.len() <= b.keys.len()
            && a.keys[..] == b.keys[..a.keys.len()]
            && a.elements.iter().zip(&b.elements).all(|(x, y)| {
                x.level == y.level && x.anchor == y.anchor && x.parent == y.parent
            })
    }

    pub fn element(&self, e: ElemId) -> &Element {
        &self.tree.elements[e]
    }

    pub fn state(&self, e: ElemId) -> ElemState {
        self.state.get(e).copied().unwrap_or(ElemState::Dormant)
    }

    pub fn n_tree_elements(&self) -> usize {
        self.tree.elements.len()
    }

    pub fn n_tree_nodes(&self) -> usize {
        self.tree.keys.len()
    }

    pub fn node_coords(&self, n: NodeId) -> [f64; 3] {
        self.tree.coords[n]
    }

    pub fn node_key(&self, n: NodeId) -> [u64; 3] {
        self.tree.keys[n]
    }

    pub fn node_by_key(&self, key: &[u64; 3]) -> Option<NodeId> {
        self.tree.lookup.get(key).copied()
    }

    /// Logical extent of the whole domain along `axis`.
    pub fn logical_span(&self, axis: usize) -> u64 {
        self.tree.span(axis)
    }

    /// Fraction of the way from logical position `a` to `b` at which `m`
    /// lies physically along `axis`. Exact in the logical ratio on uniform
    /// axes, so midpoints give exactly ½.
    pub fn axis_ratio(&self, axis: usize, a: u64, m: u64, b: u64) -> f64 {
        match self.tree.maps[axis] {
            AxisMap::Uniform { .. } => (m - a) as f64 / (b - a) as f64,
            map @ AxisMap::Cosine { .. } => {
                let s = self.tree.span(axis) as f64;
                let (xa, xm, xb) = (
                    map.eval(a as f64 / s),
                    map.eval(m as f64 / s),
                    map.eval(b as f64 / s),
                );
                (xm - xa) / (xb - xa)
            }
        }
    }

    /// Active element ids in increasing order.
    pub fn active_elements(&self) -> Vec<ElemId> {
        (0..self.state.len())
            .filter(|&e| self.state[e] == ElemState::Active)
            .collect()
    }

    pub fn n_active(&self) -> usize {
        self.state.iter().filter(|&&s| s == ElemState::Active).count()
    }

    pub fn max_level(&self) -> u32 {
        self.active_elements()
            .iter()
            .map(|&e| self.element(e).level)
            .max()
            .unwrap_or(0)
    }

    /// Marks, per tree node, whether an active element uses it.
    pub fn active_node_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.n_tree_nodes()];
        let nc = self.n_corners();
        for (e, s) in self.state.iter().enumerate() {
            if *s == ElemState::Active {
                for &n in &self.tree.elements[e].nodes[..nc] {
                    mask[n] = true;
                }
            }
        }
        mask
    }

    /// Tree node ids used by active elements, ascending.
    pub fn active_nodes(&self) -> Vec<NodeId> {
        self.active_node_mask()
            .iter()
            .enumerate()
            .filter_map(|(n, &m)| m.then_some(n))
            .collect()
    }

    pub fn n_nodes(&self) -> usize {
        self.active_node_mask().iter().filter(|&&m| m).count()
    }

    /// Root cell containing a logical position, if it is inside the domain.
    fn root_of(&self, p: [i64; 3]) -> Option<ElemId> {
        let mut idx = [0usize; 3];
        for a in 0..3 {
            if a >= self.tree.dim {
                continue;
            }
            if p[a] < 0 || p[a] as u64 >= self.tree.span(a) {
                return None;
            }
            idx[a] = (p[a] as u64 / ROOT_SPAN) as usize;
        }
        let r = self.tree.roots;
        Some(idx[0] + r[0] * (idx[1] + r[1] * idx[2]))
    }

    /// The element of this view containing the cell of `level` anchored at
    /// `p`: the active element covering it, or the element at exactly
    /// `level` if that one is refined further.
    pub(crate) fn locate(&self, level: u32, p: [i64; 3]) -> Option<ElemId> {
        let mut e = self.root_of(p)?;
        loop {
            let el = &self.tree.elements[e];
            if el.level >= level || self.state(e) != ElemState::Refined {
                return Some(e);
            }
            let h = size_at(el.level + 1);
            let mut c = 0;
            for a in 0..self.tree.dim {
                if p[a] as u64 >= el.anchor[a] + h {
                    c |= 1 << a;
                }
            }
            e = el.first_child.expect("refined element has children") + c;
        }
    }

    fn shifted(&self, e: ElemId, dir: [i64; 3], by: u64) -> [i64; 3] {
        let el = &self.tree.elements[e];
        let mut p = [0i64; 3];
        for a in 0..3 {
            p[a] = el.anchor[a] as i64 + dir[a] * by as i64;
        }
        p
    }

    fn set_state(&mut self, e: ElemId, s: ElemState) {
        if self.state.len() <= e {
            self.state.resize(e + 1, ElemState::Dormant);
        }
        self.state[e] = s;
    }

    fn refine_one(&mut self, e: ElemId) {
        if self.state(e) != ElemState::Active || self.element(e).level >= LMAX {
            return;
        }
        let level = self.element(e).level;
        let h = size_at(level) as u64;
        for dir in balance_directions(self.dim()) {
            let p = self.shifted(e, dir, h);
            if let Some(n) = self.locate(level, p) {
                if self.element(n).level < level {
                    self.refine_one(n);
                }
            }
        }
        let first = Arc::make_mut(&mut self.tree).ensure_children(e);
        self.set_state(e, ElemState::Refined);
        for c in 0..self.n_corners() {
            self.set_state(first + c, ElemState::Active);
        }
    }

    /// Refines the marked elements and, transitively, whatever neighbors
    /// are needed to keep face (and in 3D edge) neighbors within one level.
    /// Elements that are not active, or already at [`LMAX`], are skipped.
    pub fn refine(&self, marked: &[ElemId]) -> HierMesh {
        let mut out = self.clone();
        let mut marked = marked.to_vec();
        marked.sort_unstable();
        marked.dedup();
        for e in marked {
            out.refine_one(e);
        }
        out
    }

    /// Refines every active element once.
    pub fn uniform_refine(&self) -> HierMesh {
        self.refine(&self.active_elements())
    }

    /// Refines every active element `times` times.
    pub fn uniform_refine_n(&self, times: usize) -> HierMesh {
        let mut m = self.clone();
        for _ in 0..times {
            m = m.uniform_refine();
        }
        m
    }

    /// Undoes every refinement whose children are all active, deepest level
    /// first, skipping merges that would leave a neighbor two levels finer.
    pub fn global_coarsen(&self) -> HierMesh {
        let mut out = self.clone();
        let nc = self.n_corners();
        let mut cand: Vec<ElemId> = (0..self.state.len())
            .filter(|&e| {
                self.state[e] == ElemState::Refined && {
                    let fc = self.element(e).first_child.unwrap();
                    (fc..fc + nc).all(|c| self.state(c) == ElemState::Active)
                }
            })
            .collect();
        cand.sort_by_key(|&e| (std::cmp::Reverse(self.element(e).level), e));
        let dirs = balance_directions(self.dim());
        for e in cand {
            if out.merge_allowed(e, &dirs) {
                let fc = out.element(e).first_child.unwrap();
                for c in fc..fc + nc {
                    out.set_state(c, ElemState::Dormant);
                }
                out.set_state(e, ElemState::Active);
            }
        }
        out
    }

    /// Whether making `e` active keeps every neighbor within one level.
    fn merge_allowed(&self, e: ElemId, dirs: &[[i64; 3]]) -> bool {
        let level = self.element(e).level;
        let h = size_at(level + 1) as i64;
        let dim = self.dim();
        let anchor = self.element(e).anchor;
        for dir in dirs {
            // Fine cells adjacent to `e` across this face or edge.
            let free: Vec<usize> = (0..dim).filter(|&a| dir[a] == 0).collect();
            for bits in 0..1usize << free.len() {
                let mut p = [0i64; 3];
                for a in 0..3 {
                    p[a] = anchor[a] as i64;
                    if a < dim {
                        p[a] += match dir[a] {
                            -1 => -h,
                            1 => 2 * h,
                            _ => 0,
                        };
                    }
                }
                for (k, &a) in free.iter().enumerate() {
                    p[a] += ((bits >> k) & 1) as i64 * h;
                }
                if let Some(n) = self.locate(level + 1, p) {
                    if self.element(n).level == level + 1 && self.state(n) == ElemState::Refined {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Checks that every face (and in 3D edge) neighbor pair of active
    /// elements differs by at most one level.
    pub fn is_balanced(&self) -> bool {
        let dirs = balance_directions(self.dim());
        for e in self.active_elements() {
            let level = self.element(e).level;
            let h = size_at(level);
            for dir in &dirs {
                let p = self.shifted(e, *dir, h);
                if let Some(n) = self.locate(level, p) {
                    if self.element(n).level + 1 < level {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Per-element state, for serialization and tests.
    pub fn states(&self) -> &[ElemState] {
        &self.state
    }
}
