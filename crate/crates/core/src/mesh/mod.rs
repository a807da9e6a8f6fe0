//! Hierarchical quadrilateral and hexahedral meshes.

pub mod build;
pub mod hanging;
pub mod hierarchy;
pub mod io;
pub mod mark;
pub mod topology;
pub mod tree;

pub use build::{axis_coordinates, box_mesh, graded_roots, graded_tensor_mesh, unit_box, uniform_unit_box};
pub use hanging::{hanging_constraints, HangingConstraint, HangingKind};
pub use hierarchy::{build_hierarchy, MeshHierarchy};
pub use io::MeshText;
pub use mark::{mark_geometric, refine_toward, BoundaryEntity, Pattern, Side, DEFAULT_LAYERS};
pub use topology::Topology;
pub use tree::{AxisMap, ElemId, ElemState, Element, HierMesh, NodeId, LMAX};
