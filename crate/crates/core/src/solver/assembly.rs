use std::collections::HashMap;

use rayon::prelude::*;

use super::element::{element_data, ElementData};
use super::sparse::CsrMatrix;
use super::SolverError;
use crate::model::{CellKind, PointId, StructuralModel, DOF_NAMES};
use crate::repair::{check_support_reachability, link_arm};
use crate::validate::validate;

/// State of one DOF slot.
#[derive(Debug, Clone, PartialEq)]
pub enum DofSlot {
    Free(usize),
    /// Supported, or suppressed because nothing gives it stiffness.
    Fixed,
    /// Rigid-link slave: `Σ coef · u[eq]` over free master equations.
    Slave(Vec<(usize, f64)>),
}

impl DofSlot {
    /// The slot as a combination of equations; empty for a fixed slot.
    pub fn terms(&self) -> Vec<(usize, f64)> {
        match self {
            DofSlot::Free(eq) => vec![(*eq, 1.0)],
            DofSlot::Fixed => Vec::new(),
            DofSlot::Slave(t) => t.clone(),
        }
    }
}

/// Where an equation lives in the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofLabel {
    pub point: PointId,
    /// Index into [`DOF_NAMES`].
    pub dof: usize,
}

impl std::fmt::Display for DofLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} of point {}", DOF_NAMES[self.dof], self.point)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    /// Six slots per point, by position in `model.points`.
    pub slots: Vec<[DofSlot; 6]>,
    pub labels: Vec<DofLabel>,
    /// Points whose rotations were suppressed (only truss cells attached).
    pub suppressed_rotations: Vec<PointId>,
}

impl DofMap {
    pub fn n_eq(&self) -> usize {
        self.labels.len()
    }

    /// Expand an equation vector to six values per point.
    pub fn expand(&self, u: &[f64]) -> Vec<[f64; 6]> {
        self.slots
            .iter()
            .map(|slots| {
                let mut d = [0.0; 6];
                for (k, slot) in slots.iter().enumerate() {
                    d[k] = match slot {
                        DofSlot::Free(eq) => u[*eq],
                        DofSlot::Fixed => 0.0,
                        DofSlot::Slave(t) => t.iter().map(|&(eq, c)| c * u[eq]).sum(),
                    };
                }
                d
            })
            .collect()
    }
}

pub fn build_dof_map(model: &StructuralModel) -> Result<DofMap, SolverError> {
    let index = model.point_index();
    let n = model.points.len();
    let mut has_beam = vec![false; n];
    let mut has_cell = vec![false; n];
    for cell in &model.cells {
        for node in &cell.nodes {
            if let Some(&i) = index.get(node) {
                has_cell[i] = true;
                has_beam[i] |= cell.kind == CellKind::Beam;
            }
        }
    }
    let mut in_link = vec![false; n];
    let mut slave_of: HashMap<usize, usize> = HashMap::new();
    for link in &model.rigid_links {
        let (Some(&m), Some(&s)) = (index.get(&link.master), index.get(&link.slave)) else {
            return Err(SolverError::InvalidModel(format!(
                "rigid link {} -> {} references a missing point",
                link.master, link.slave
            )));
        };
        in_link[m] = true;
        in_link[s] = true;
        if model.points[s].is_constrained() {
            return Err(SolverError::ConstrainedSlave(link.slave));
        }
        slave_of.insert(s, m);
    }
    if let Some(&m) = slave_of.values().find(|m| slave_of.contains_key(m)) {
        return Err(SolverError::InvalidModel(format!(
            "point {} is both a rigid-link master and slave",
            model.points[m].id
        )));
    }

    let mut slots: Vec<[DofSlot; 6]> = vec![std::array::from_fn(|_| DofSlot::Fixed); n];
    let mut labels = Vec::new();
    let mut suppressed = Vec::new();
    for (i, p) in model.points.iter().enumerate() {
        if slave_of.contains_key(&i) || !(has_cell[i] || in_link[i]) {
            continue;
        }
        let rotations_live = has_beam[i] || in_link[i];
        if !rotations_live {
            suppressed.push(p.id);
        }
        for k in 0..6 {
            if !p.fixed[k] && (k < 3 || rotations_live) {
                slots[i][k] = DofSlot::Free(labels.len());
                labels.push(DofLabel { point: p.id, dof: k });
            }
        }
    }

    for link in &model.rigid_links {
        let m = index[&link.master];
        let s = index[&link.slave];
        let r = link_arm(model, link).ok_or(SolverError::InvalidModel(format!(
            "rigid link {} -> {} has no usable arm",
            link.master, link.slave
        )))?;
        let master: [Vec<(usize, f64)>; 6] = std::array::from_fn(|k| slots[m][k].terms());
        let combo = |parts: &[(usize, f64)]| {
            let mut acc: Vec<(usize, f64)> = Vec::new();
            for &(k, c) in parts {
                if c == 0.0 {
                    continue;
                }
                for &(eq, w) in &master[k] {
                    acc.push((eq, c * w));
                }
            }
            DofSlot::Slave(acc)
        };
        // u_s = u_m + θ_m × r
        slots[s] = [
            combo(&[(0, 1.0), (4, r[2]), (5, -r[1])]),
            combo(&[(1, 1.0), (5, r[0]), (3, -r[2])]),
            combo(&[(2, 1.0), (3, r[1]), (4, -r[0])]),
            combo(&[(3, 1.0)]),
            combo(&[(4, 1.0)]),
            combo(&[(5, 1.0)]),
        ];
    }
    Ok(DofMap {
        slots,
        labels,
        suppressed_rotations: suppressed,
    })
}

/// `K u = f` over the free equations.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub k: CsrMatrix,
    pub f: Vec<f64>,
    /// One label per equation when the system comes from a model.
    pub labels: Vec<DofLabel>,
}

impl LinearSystem {
    pub fn new(k: CsrMatrix, f: Vec<f64>) -> Self {
        assert_eq!(k.n(), f.len());
        LinearSystem {
            k,
            f,
            labels: Vec::new(),
        }
    }

    pub fn n_eq(&self) -> usize {
        self.f.len()
    }
}

#[derive(Debug, Clone)]
pub struct Assembly {
    pub system: LinearSystem,
    pub dofs: DofMap,
    /// One entry per cell, in model order.
    pub elements: Vec<ElementData>,
    /// Nodal loads per point (global), excluding element line loads.
    pub nodal_loads: Vec<[f64; 6]>,
}

/// Validate, check supports, then assemble.
pub fn assemble(model: &StructuralModel) -> Result<Assembly, SolverError> {
    let report = validate(model);
    if let Some(first) = report.blocking().next() {
        return Err(SolverError::InvalidModel(format!(
            "{first} ({} blocking finding(s))",
            report.blocking().count()
        )));
    }
    let unsupported = check_support_reachability(model);
    if !unsupported.is_empty() {
        return Err(SolverError::Unsupported(unsupported));
    }
    assemble_unchecked(model)
}

/// Assemble without the validation and support pre-checks; mechanisms then
/// surface as pivot failures in the direct solver.
pub fn assemble_unchecked(model: &StructuralModel) -> Result<Assembly, SolverError> {
    let dofs = build_dof_map(model)?;
    let index = model.point_index();
    let elements: Vec<ElementData> = model
        .cells
        .par_iter()
        .map(|c| element_data(model, c, &index))
        .collect::<Result<_, _>>()?;

    let n_eq = dofs.n_eq();
    let mut triplets = Vec::new();
    let mut f = vec![0.0; n_eq];
    for e in &elements {
        let k = e.k_global();
        let fe = e.load_global();
        let terms: Vec<Vec<(usize, f64)>> = (0..12).map(|a| dofs.slots[e.nodes[a / 6]][a % 6].terms()).collect();
        for a in 0..12 {
            for &(ea, ca) in &terms[a] {
                f[ea] += ca * fe[a];
                for b in 0..12 {
                    let kab = k[(a, b)];
                    if kab == 0.0 {
                        continue;
                    }
                    for &(eb, cb) in &terms[b] {
                        if ea <= eb {
                            triplets.push((ea, eb, ca * cb * kab));
                        }
                    }
                }
            }
        }
    }

    let mut nodal_loads = vec![[0.0; 6]; model.points.len()];
    for (i, p) in model.points.iter().enumerate() {
        if p.bc_id == 0 {
            continue;
        }
        let bc = model
            .bcs
            .get(&p.bc_id)
            .ok_or_else(|| SolverError::InvalidModel(format!("point {} references missing load {}", p.id, p.bc_id)))?;
        nodal_loads[i] = bc.components;
        for k in 0..6 {
            for (eq, c) in dofs.slots[i][k].terms() {
                f[eq] += c * bc.components[k];
            }
        }
    }

    let k = CsrMatrix::from_upper_triplets(n_eq, triplets);
    Ok(Assembly {
        system: LinearSystem {
            k,
            f,
            labels: dofs.labels.clone(),
        },
        dofs,
        elements,
        nodal_loads,
    })
}
