use nalgebra::Vector3;

use super::assembly::Assembly;
use super::element::Vec12;
use crate::model::{CellId, PointId, StructuralModel};
use crate::repair::link_arm;

/// Section forces at both ends of a cell in local axes, ordered
/// `[N, Vy, Vz, T, My, Mz]` (N, N·mm). Tension and the usual positive-face
/// convention at the end; the start carries the same sign convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndForces {
    pub cell: CellId,
    pub start: [f64; 6],
    pub end: [f64; 6],
}

fn element_displacements(displacements: &[[f64; 6]], nodes: [usize; 2]) -> Vec12 {
    let mut u = Vec12::zeros();
    for (k, &p) in nodes.iter().enumerate() {
        for d in 0..6 {
            u[6 * k + d] = displacements[p][d];
        }
    }
    u
}

/// Element end actions on the nodes, local axes: `k u − f_eq`.
fn end_actions(assembly: &Assembly, e: usize, displacements: &[[f64; 6]]) -> Vec12 {
    let el = &assembly.elements[e];
    let u_local = el.transformation() * element_displacements(displacements, el.nodes);
    el.k_local * u_local - el.load_local
}

/// `displacements` holds six values per model point, as from `DofMap::expand`.
pub fn recover_end_forces(assembly: &Assembly, displacements: &[[f64; 6]]) -> Vec<EndForces> {
    (0..assembly.elements.len())
        .map(|e| {
            let s = end_actions(assembly, e, displacements);
            let mut start = [0.0; 6];
            let mut end = [0.0; 6];
            for k in 0..6 {
                start[k] = -s[k];
                end[k] = s[6 + k];
            }
            EndForces {
                cell: assembly.elements[e].cell,
                start,
                end,
            }
        })
        .collect()
}

/// Support reaction at one point, global axes (N, N·mm).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reaction {
    pub point: PointId,
    pub components: [f64; 6],
}

/// Out-of-balance nodal forces at constrained slots, i.e. what the supports
/// exert on the structure. Slave residuals are carried to their masters
/// through the rigid arm first.
pub fn reactions(model: &StructuralModel, assembly: &Assembly, displacements: &[[f64; 6]]) -> Vec<Reaction> {
    let n = model.points.len();
    let mut residual: Vec<[f64; 6]> = assembly.nodal_loads.iter().map(|l| l.map(|v| -v)).collect();
    for (e, el) in assembly.elements.iter().enumerate() {
        let s = el.transformation().transpose() * end_actions(assembly, e, displacements);
        for (k, &p) in el.nodes.iter().enumerate() {
            for d in 0..6 {
                residual[p][d] += s[6 * k + d];
            }
        }
    }
    let index = model.point_index();
    for link in &model.rigid_links {
        let (m, s) = (index[&link.master], index[&link.slave]);
        let r = Vector3::from(link_arm(model, link).unwrap_or([0.0; 3]));
        let force = Vector3::new(residual[s][0], residual[s][1], residual[s][2]);
        let moment = r.cross(&force);
        for d in 0..3 {
            residual[m][d] += residual[s][d];
            residual[m][3 + d] += residual[s][3 + d] + moment[d];
        }
        residual[s] = [0.0; 6];
    }

    let mut out = Vec::new();
    for i in 0..n {
        let slots = &assembly.dofs.slots[i];
        let mut components = [0.0; 6];
        let mut any = false;
        for d in 0..6 {
            if matches!(slots[d], super::DofSlot::Fixed) {
                components[d] = residual[i][d];
                any = true;
            }
        }
        let is_slave = slots.iter().any(|s| matches!(s, super::DofSlot::Slave(_)));
        if any && !is_slave {
            out.push(Reaction {
                point: model.points[i].id,
                components,
            });
        }
    }
    out
}

/// Resultant force and moment about the origin of all applied loads
/// (nodal loads plus consistent element loads) and of the reactions.
pub fn load_and_reaction_resultants(
    model: &StructuralModel,
    assembly: &Assembly,
    reactions: &[Reaction],
) -> ([f64; 6], [f64; 6]) {
    let mut applied = [0.0; 6];
    let add = |acc: &mut [f64; 6], x: &[f64; 3], c: &[f64]| {
        let f = Vector3::new(c[0], c[1], c[2]);
        let m = Vector3::from(*x).cross(&f);
        for d in 0..3 {
            acc[d] += c[d];
            acc[3 + d] += c[3 + d] + m[d];
        }
    };
    for (p, load) in model.points.iter().zip(&assembly.nodal_loads) {
        add(&mut applied, &p.coords, load);
    }
    for el in &assembly.elements {
        let f = el.load_global();
        for (k, &p) in el.nodes.iter().enumerate() {
            add(&mut applied, &model.points[p].coords, &f.as_slice()[6 * k..6 * k + 6]);
        }
    }
    let index = model.point_index();
    let mut supports = [0.0; 6];
    for r in reactions {
        add(&mut supports, &model.points[index[&r.point]].coords, &r.components);
    }
    (applied, supports)
}
