//! Read-only consistency check of a [`StructuralModel`].

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::model::{distance, CellId, PointId, StructuralModel};

/// Default distance below which two points are considered identical, mm.
pub const DEFAULT_MERGE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Blocking,
    Warning,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Finding {
    DuplicatePointId(PointId),
    DuplicateCellId(CellId),
    DanglingPoint { cell: CellId, point: PointId },
    DanglingCrossSection { cell: CellId, cs_id: u32 },
    DanglingMaterial { cell: CellId, mat_id: u32 },
    DanglingBoundaryCondition { point: PointId, bc_id: u32 },
    DanglingRigidLink { point: PointId },
    NonFiniteCoordinate(PointId),
    NonFiniteValue { what: String },
    InvalidCrossSection { cs_id: u32, reason: String },
    InvalidMaterial { mat_id: u32, reason: String },
    InvalidRigidLink { slave: PointId, reason: &'static str },
    DegenerateCell { cell: CellId, length: f64 },
    UnreferencedCrossSection(u32),
    UnreferencedMaterial(u32),
    UnreferencedBoundaryCondition(u32),
    OrphanPoint(PointId),
}

impl Finding {
    pub fn severity(&self) -> Severity {
        use Finding::*;
        match self {
            DegenerateCell { .. }
            | UnreferencedCrossSection(_)
            | UnreferencedMaterial(_)
            | UnreferencedBoundaryCondition(_)
            | OrphanPoint(_) => Severity::Warning,
            _ => Severity::Blocking,
        }
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Finding::*;
        match self {
            DuplicatePointId(p) => write!(f, "point id {p} is used more than once"),
            DuplicateCellId(c) => write!(f, "cell id {c} is used more than once"),
            DanglingPoint { cell, point } => {
                write!(f, "cell {cell} references missing point {point}")
            }
            DanglingCrossSection { cell, cs_id } => {
                write!(f, "cell {cell} references missing cross-section {cs_id}")
            }
            DanglingMaterial { cell, mat_id } => {
                write!(f, "cell {cell} references missing material {mat_id}")
            }
            DanglingBoundaryCondition { point, bc_id } => {
                write!(f, "point {point} references missing boundary condition {bc_id}")
            }
            DanglingRigidLink { point } => {
                write!(f, "rigid link references missing point {point}")
            }
            NonFiniteCoordinate(p) => write!(f, "point {p} has a non-finite coordinate"),
            NonFiniteValue { what } => write!(f, "non-finite value in {what}"),
            InvalidCrossSection { cs_id, reason } => {
                write!(f, "cross-section {cs_id} is invalid: {reason}")
            }
            InvalidMaterial { mat_id, reason } => {
                write!(f, "material {mat_id} is invalid: {reason}")
            }
            InvalidRigidLink { slave, reason } => {
                write!(f, "rigid link on slave {slave} is invalid: {reason}")
            }
            DegenerateCell { cell, length } => {
                write!(f, "cell {cell} is degenerate (length {length:e} mm)")
            }
            UnreferencedCrossSection(id) => write!(f, "cross-section {id} is never referenced"),
            UnreferencedMaterial(id) => write!(f, "material {id} is never referenced"),
            UnreferencedBoundaryCondition(id) => {
                write!(f, "boundary condition {id} is never referenced")
            }
            OrphanPoint(p) => write!(f, "point {p} is not referenced by any cell"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    /// `true` when no blocking defect was found; warnings are allowed.
    pub fn ok(&self) -> bool {
        self.blocking().next().is_none()
    }

    pub fn blocking(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity() == Severity::Blocking)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity() == Severity::Warning)
    }
}

pub fn validate(model: &StructuralModel) -> ValidationReport {
    validate_with_tol(model, DEFAULT_MERGE_TOL)
}

/// Like [`validate`], flagging cells no longer than `tol` as degenerate.
pub fn validate_with_tol(model: &StructuralModel, tol: f64) -> ValidationReport {
    let mut findings = Vec::new();

    let mut points: HashMap<PointId, usize> = HashMap::with_capacity(model.points.len());
    for (i, p) in model.points.iter().enumerate() {
        if points.insert(p.id, i).is_some() {
            findings.push(Finding::DuplicatePointId(p.id));
        }
        if !p.coords.iter().all(|c| c.is_finite()) {
            findings.push(Finding::NonFiniteCoordinate(p.id));
        }
        if p.bc_id != 0 && !model.bcs.contains_key(&p.bc_id) {
            findings.push(Finding::DanglingBoundaryCondition {
                point: p.id,
                bc_id: p.bc_id,
            });
        }
    }

    let mut cell_ids = HashSet::with_capacity(model.cells.len());
    let mut used_points = HashSet::new();
    let mut used_cs = BTreeSet::new();
    let mut used_mat = BTreeSet::new();
    for c in &model.cells {
        if !cell_ids.insert(c.id) {
            findings.push(Finding::DuplicateCellId(c.id));
        }
        let mut resolved = true;
        for &n in &c.nodes {
            used_points.insert(n);
            if !points.contains_key(&n) {
                resolved = false;
                findings.push(Finding::DanglingPoint { cell: c.id, point: n });
            }
        }
        used_cs.insert(c.cs_id);
        used_mat.insert(c.mat_id);
        if !model.cross_sections.contains_key(&c.cs_id) {
            findings.push(Finding::DanglingCrossSection {
                cell: c.id,
                cs_id: c.cs_id,
            });
        }
        if !model.materials.contains_key(&c.mat_id) {
            findings.push(Finding::DanglingMaterial {
                cell: c.id,
                mat_id: c.mat_id,
            });
        }
        if resolved {
            let a = &model.points[points[&c.nodes[0]]].coords;
            let b = &model.points[points[&c.nodes[1]]].coords;
            let length = distance(a, b);
            if length.is_finite() && length <= tol {
                findings.push(Finding::DegenerateCell { cell: c.id, length });
            }
        }
    }

    for (&id, cs) in &model.cross_sections {
        if let Err(e) = cs.properties() {
            findings.push(Finding::InvalidCrossSection {
                cs_id: id,
                reason: e.to_string(),
            });
        }
    }
    for (&id, mat) in &model.materials {
        if let Some(reason) = mat.invalid_reason() {
            findings.push(Finding::InvalidMaterial {
                mat_id: id,
                reason: reason.to_string(),
            });
        }
    }
    for (&id, bc) in &model.bcs {
        if !bc.components.iter().all(|v| v.is_finite()) {
            findings.push(Finding::NonFiniteValue {
                what: format!("boundary condition {id}"),
            });
        }
    }
    if !model.gravity.iter().all(|g| g.is_finite()) {
        findings.push(Finding::NonFiniteValue {
            what: "gravity".to_string(),
        });
    }

    let masters: HashSet<PointId> = model.rigid_links.iter().map(|l| l.master).collect();
    let mut slaves = HashSet::new();
    for link in &model.rigid_links {
        used_points.insert(link.master);
        used_points.insert(link.slave);
        for p in [link.master, link.slave] {
            if !points.contains_key(&p) {
                findings.push(Finding::DanglingRigidLink { point: p });
            }
        }
        let invalid = |reason| Finding::InvalidRigidLink {
            slave: link.slave,
            reason,
        };
        if link.master == link.slave {
            findings.push(invalid("master and slave coincide"));
        }
        if !slaves.insert(link.slave) {
            findings.push(invalid("slave is linked more than once"));
        }
        if masters.contains(&link.slave) {
            findings.push(invalid("slave is also a master (chained links)"));
        }
        if let Some(r) = link.offset {
            if !r.iter().all(|v| v.is_finite()) {
                findings.push(invalid("offset is not finite"));
            }
        }
    }

    for &id in model.cross_sections.keys() {
        if !used_cs.contains(&id) {
            findings.push(Finding::UnreferencedCrossSection(id));
        }
    }
    for &id in model.materials.keys() {
        if !used_mat.contains(&id) {
            findings.push(Finding::UnreferencedMaterial(id));
        }
    }
    let used_bc: BTreeSet<u32> = model.points.iter().map(|p| p.bc_id).collect();
    for &id in model.bcs.keys() {
        if !used_bc.contains(&id) {
            findings.push(Finding::UnreferencedBoundaryCondition(id));
        }
    }
    for p in &model.points {
        if !used_points.contains(&p.id) {
            findings.push(Finding::OrphanPoint(p.id));
        }
    }

    ValidationReport { findings }
}
