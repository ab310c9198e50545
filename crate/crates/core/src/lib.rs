//! Structural analysis pipeline for algorithmically generated frame models.
//!
//! The crate reads and writes the VTK XML exchange dialect ([`exchange`]),
//! repairs model topology ([`repair`]), runs linear statics on 3D beam and
//! truss frames ([`solver`]), and reduces the response to a per-element
//! resistance ratio ([`post`]). [`casegen`] builds parametric benchmark models.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod casegen;
pub mod exchange;
pub mod model;
pub mod post;
pub mod repair;
pub mod section;
pub mod solver;
pub mod topology;
pub mod validate;

pub use model::{BoundaryCondition, Cell, CellId, CellKind, Material, Point, PointId, RigidLink, StructuralModel};
pub use section::{CrossSection, SectionProperties, SectionShape};
pub use validate::{validate, Finding, ValidationReport};
