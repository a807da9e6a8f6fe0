use super::tree::{size_at, ElemId, HierMesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lo,
    Hi,
}

/// A face, edge or vertex of the domain box, given by the axes it is pinned
/// to and on which side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEntity {
    pub pinned: [Option<Side>; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    Face,
    Edge,
    Vertex,
}

impl Pattern {
    /// The entity refined toward in the elasticity runs: the face `x=0`,
    /// the edge `x=y=0`, or the vertex at the origin.
    pub fn default_target(self, dim: usize) -> BoundaryEntity {
        let pinned_axes = match self {
            Pattern::Face => 1,
            Pattern::Edge => 2,
            Pattern::Vertex => dim,
        };
        let mut pinned = [None; 3];
        for p in pinned.iter_mut().take(pinned_axes.min(dim)) {
            *p = Some(Side::Lo);
        }
        BoundaryEntity { pinned }
    }

    pub fn name(self) -> &'static str {
        match self {
            Pattern::Face => "face",
            Pattern::Edge => "edge",
            Pattern::Vertex => "vertex",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "face" => Some(Pattern::Face),
            "edge" => Some(Pattern::Edge),
            "vertex" => Some(Pattern::Vertex),
            _ => None,
        }
    }
}

impl BoundaryEntity {
    pub fn face(axis: usize, side: Side) -> Self {
        let mut pinned = [None; 3];
        pinned[axis] = Some(side);
        Self { pinned }
    }

    pub fn edge(a: (usize, Side), b: (usize, Side)) -> Self {
        let mut pinned = [None; 3];
        pinned[a.0] = Some(a.1);
        pinned[b.0] = Some(b.1);
        Self { pinned }
    }

    pub fn vertex(sides: [Side; 3]) -> Self {
        Self {
            pinned: sides.map(Some),
        }
    }
}

/// Active elements within `layers` of their own widths of the entity:
/// `layers = 1` selects exactly the elements touching it.
pub fn mark_geometric(mesh: &HierMesh, target: &BoundaryEntity, layers: u64) -> Vec<ElemId> {
    let dim = mesh.dim();
    mesh.active_elements()
        .into_iter()
        .filter(|&e| {
            let el = mesh.element(e);
            let h = size_at(el.level);
            (0..dim).all(|a| {
                let dist = match target.pinned[a] {
                    None => return true,
                    Some(Side::Lo) => el.anchor[a],
                    Some(Side::Hi) => mesh.logical_span(a) - el.anchor[a] - h,
                };
                dist < layers * h
            })
        })
        .collect()
}

/// Marking depth used for the adaptive elasticity meshes.
pub const DEFAULT_LAYERS: u64 = 4;

/// The adaptive mesh on "mesh level" `level`: `level - 1` rounds of
/// marking toward `target` and refining, starting from `base` (level 1).
pub fn refine_toward(base: &HierMesh, target: &BoundaryEntity, layers: u64, level: usize) -> HierMesh {
    let mut m = base.clone();
    for _ in 1..level.max(1) {
        let marked = mark_geometric(&m, target, layers);
        m = m.refine(&marked);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build::uniform_unit_box;

    #[test]
    fn cube_examples() {
        let m = uniform_unit_box(3, 1);
        let v = mark_geometric(&m, &Pattern::Vertex.default_target(3), 1);
        assert_eq!(v.len(), 1);
        let f = mark_geometric(&m, &Pattern::Face.default_target(3), 1);
        assert_eq!(f.len(), 4);
        let e = mark_geometric(&m, &Pattern::Edge.default_target(3), 1);
        assert_eq!(e.len(), 2);
    }

    #[test]
    fn hi_side() {
        let m = uniform_unit_box(2, 2);
        let f = mark_geometric(&m, &BoundaryEntity::face(1, Side::Hi), 1);
        assert_eq!(f.len(), 4);
        for e in f {
            let el = m.element(e);
            assert_eq!(el.anchor[1] + size_at(el.level), m.logical_span(1));
        }
    }
}
