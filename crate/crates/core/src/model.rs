//! In-memory structural model: points and line cells annotated with
//! cross-sections, materials, nodal loads, supports and rigid links.
//!
//! Units are fixed throughout the crate: millimetres, newtons, megapascals,
//! seconds, and tonnes for mass (so that density times gravity times area is
//! a line load in N/mm).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::section::CrossSection;

/// Standard gravitational acceleration in mm/s².
pub const STANDARD_GRAVITY: f64 = 9806.65;

/// Names of the six nodal degrees of freedom, in slot order.
pub const DOF_NAMES: [&str; 6] = ["ux", "uy", "uz", "rx", "ry", "rz"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellId(pub u32);

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub id: PointId,
    pub coords: [f64; 3],
    /// `true` marks a fixed slot, ordered as [`DOF_NAMES`].
    pub fixed: [bool; 6],
    /// 0 means no nodal load, otherwise a key into the boundary-condition catalog.
    pub bc_id: u32,
}

impl Point {
    pub fn new(id: u32, coords: [f64; 3]) -> Self {
        Point {
            id: PointId(id),
            coords,
            fixed: [false; 6],
            bc_id: 0,
        }
    }

    pub fn is_constrained(&self) -> bool {
        self.fixed.iter().any(|&f| f)
    }

    pub fn fixed_count(&self) -> usize {
        self.fixed.iter().filter(|&&f| f).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellKind {
    Beam,
    Truss,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub id: CellId,
    pub kind: CellKind,
    pub nodes: [PointId; 2],
    pub cs_id: u32,
    pub mat_id: u32,
}

impl Cell {
    pub fn beam(id: u32, a: u32, b: u32, cs_id: u32, mat_id: u32) -> Self {
        Cell {
            id: CellId(id),
            kind: CellKind::Beam,
            nodes: [PointId(a), PointId(b)],
            cs_id,
            mat_id,
        }
    }

    pub fn truss(id: u32, a: u32, b: u32, cs_id: u32, mat_id: u32) -> Self {
        Cell {
            kind: CellKind::Truss,
            ..Cell::beam(id, a, b, cs_id, mat_id)
        }
    }
}

/// Isotropic linear elastic material (`IsoLinEl`).
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    /// Young's modulus, MPa.
    pub e: f64,
    pub nu: f64,
    /// Thermal expansion coefficient, 1/K. Stored only.
    pub t_alpha: f64,
    /// Mass density in kg/mm³ (7850 kg/m³ is 7850e-9).
    pub density: f64,
    /// Yield stress R_y, MPa.
    pub yield_stress: f64,
    /// Unrecognised `key value` pairs, kept in input order.
    pub extra: Vec<(String, String)>,
}

impl Material {
    pub const DEFAULT_YIELD_STRESS: f64 = 300.0;

    /// Structural steel as used by the cantilever example.
    pub fn steel() -> Self {
        Material {
            e: 210.0e3,
            nu: 0.2,
            t_alpha: 1.2e-5,
            density: 7850.0e-9,
            yield_stress: Self::DEFAULT_YIELD_STRESS,
            extra: Vec::new(),
        }
    }

    pub fn shear_modulus(&self) -> f64 {
        self.e / (2.0 * (1.0 + self.nu))
    }

    pub(crate) fn invalid_reason(&self) -> Option<&'static str> {
        if !(self.e.is_finite() && self.e > 0.0) {
            Some("E must be positive")
        } else if !(self.nu.is_finite() && (0.0..0.5).contains(&self.nu)) {
            Some("nu must lie in [0, 0.5)")
        } else if !(self.density.is_finite() && self.density >= 0.0) {
            Some("density must be non-negative")
        } else if !(self.yield_stress.is_finite() && self.yield_stress > 0.0) {
            Some("Ry must be positive")
        } else if !self.t_alpha.is_finite() {
            Some("tAlpha must be finite")
        } else {
            None
        }
    }
}

/// A `NodalLoad` entry: forces (N) and moments (N·mm) in global axes.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCondition {
    pub components: [f64; 6],
    pub extra: Vec<(String, String)>,
}

impl BoundaryCondition {
    pub fn nodal_load(components: [f64; 6]) -> Self {
        BoundaryCondition {
            components,
            extra: Vec::new(),
        }
    }
}

/// Kinematic tie `u_slave = u_master + θ_master × r`, `θ_slave = θ_master`.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidLink {
    pub master: PointId,
    pub slave: PointId,
    /// Explicit arm `r`; `None` means slave position minus master position.
    pub offset: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructuralModel {
    pub comment: String,
    pub points: Vec<Point>,
    pub cells: Vec<Cell>,
    pub cross_sections: BTreeMap<u32, CrossSection>,
    pub materials: BTreeMap<u32, Material>,
    pub bcs: BTreeMap<u32, BoundaryCondition>,
    pub rigid_links: Vec<RigidLink>,
    /// Acceleration vector for self-weight, mm/s².
    pub gravity: [f64; 3],
    pub self_weight: bool,
}

impl Default for StructuralModel {
    fn default() -> Self {
        StructuralModel {
            comment: String::new(),
            points: Vec::new(),
            cells: Vec::new(),
            cross_sections: BTreeMap::new(),
            materials: BTreeMap::new(),
            bcs: BTreeMap::new(),
            rigid_links: Vec::new(),
            gravity: [0.0, 0.0, -STANDARD_GRAVITY],
            self_weight: true,
        }
    }
}

impl StructuralModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.cells.is_empty()
    }

    /// Map from point id to its position in `points`. Later duplicates win.
    pub fn point_index(&self) -> HashMap<PointId, usize> {
        self.points.iter().enumerate().map(|(i, p)| (p.id, i)).collect()
    }

    pub fn point(&self, id: PointId) -> Option<&Point> {
        self.points.iter().find(|p| p.id == id)
    }

    pub fn cell(&self, id: CellId) -> Option<&Cell> {
        self.cells.iter().find(|c| c.id == id)
    }

    /// Ids of points carrying a constraint or a nodal load.
    pub fn protected_points(&self) -> Vec<PointId> {
        self.points
            .iter()
            .filter(|p| p.is_constrained() || p.bc_id != 0)
            .map(|p| p.id)
            .collect()
    }

    pub fn rigid_link_for_slave(&self, slave: PointId) -> Option<&RigidLink> {
        self.rigid_links.iter().find(|l| l.slave == slave)
    }

    pub fn cell_length(&self, cell: &Cell) -> Option<f64> {
        let a = self.point(cell.nodes[0])?;
        let b = self.point(cell.nodes[1])?;
        Some(distance(&a.coords, &b.coords))
    }

    /// Whether point and cell ids are `0..n` in storage order.
    pub fn has_dense_ids(&self) -> bool {
        self.points.iter().enumerate().all(|(i, p)| p.id.0 as usize == i)
            && self.cells.iter().enumerate().all(|(i, c)| c.id.0 as usize == i)
    }

    /// Copy with points and cells sorted by id and renumbered `0..n`.
    ///
    /// References that do not resolve are left untouched.
    pub fn compacted(&self) -> StructuralModel {
        let mut points = self.points.clone();
        points.sort_by_key(|p| p.id);
        let mut cells = self.cells.clone();
        cells.sort_by_key(|c| c.id);

        let remap: HashMap<PointId, PointId> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.id, PointId(i as u32)))
            .collect();
        let map = |id: PointId| remap.get(&id).copied().unwrap_or(id);

        for (i, p) in points.iter_mut().enumerate() {
            p.id = PointId(i as u32);
        }
        for (i, c) in cells.iter_mut().enumerate() {
            c.id = CellId(i as u32);
            c.nodes = [map(c.nodes[0]), map(c.nodes[1])];
        }
        let rigid_links = self
            .rigid_links
            .iter()
            .map(|l| RigidLink {
                master: map(l.master),
                slave: map(l.slave),
                offset: l.offset,
            })
            .collect();

        StructuralModel {
            points,
            cells,
            rigid_links,
            ..self.clone()
        }
    }

    pub fn next_point_id(&self) -> u32 {
        self.points.iter().map(|p| p.id.0 + 1).max().unwrap_or(0)
    }

    pub fn next_cell_id(&self) -> u32 {
        self.cells.iter().map(|c| c.id.0 + 1).max().unwrap_or(0)
    }
}

pub(crate) fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}
