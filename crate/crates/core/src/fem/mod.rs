//! Degree-1 finite element spaces and assembly.

pub mod assemble;
pub mod constrain;
pub mod element;
pub mod space;
pub mod transfer;

pub use assemble::{
    assemble_advection, assemble_convection, assemble_elasticity, assemble_gradient_coupling, assemble_gradient_load,
    assemble_load, assemble_mass, assemble_stiffness, l2_error, lumped_from,
};
pub use constrain::{
    apply_dirichlet, constrain_rhs, constrain_system, expand_hanging, flat_hanging_matrix,
    DirichletSystem,
};
pub use element::{eval_point, q1_ref_grad, q1_value, QuadPoint, QuadratureRule};
pub use space::{build_hanging_matrix, FeSpace, LocalConstraint};
pub use transfer::build_prolongation;
