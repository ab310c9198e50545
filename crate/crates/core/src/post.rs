//! Resistance ratio `u_el = σ_eq / R_y` per element, its yes/no
//! classification, summaries and deformed geometry.
//!
//! Stresses are evaluated at both element ends with the extreme fibres of
//! both bending planes superposed (conservative for round sections) and the
//! torsional shear `|T|/Wt`; transverse shear is neglected.

use crate::model::{CellId, StructuralModel};
use crate::section::SectionProperties;
use crate::solver::EndForces;

pub const DEFAULT_THRESHOLD: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressState {
    /// `|N|/A + |My|/Wy + |Mz|/Wz`, MPa.
    pub sigma_axial: f64,
    /// `|T|/Wt`, MPa.
    pub tau: f64,
    /// MPa² (`σ_eq = √(3 J2)`).
    pub j2: f64,
    pub sigma_eq: f64,
}

impl StressState {
    /// `forces` ordered `[N, Vy, Vz, T, My, Mz]`.
    pub fn at_section(forces: &[f64; 6], p: &SectionProperties) -> Self {
        let sigma_axial = forces[0].abs() / p.area + forces[4].abs() / p.wy + forces[5].abs() / p.wz;
        let tau = forces[3].abs() / p.wt;
        let j2 = sigma_axial * sigma_axial / 3.0 + tau * tau;
        StressState {
            sigma_axial,
            tau,
            j2,
            sigma_eq: (3.0 * j2).sqrt(),
        }
    }
}

/// Larger of the two end ratios.
pub fn resistance_ratio(forces: &EndForces, p: &SectionProperties, yield_stress: f64) -> f64 {
    let s0 = StressState::at_section(&forces.start, p).sigma_eq;
    let s1 = StressState::at_section(&forces.end, p).sigma_eq;
    s0.max(s1) / yield_stress
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Ok,
    Exceeded,
}

/// Exceeded only when strictly above the threshold.
pub fn classify(u_el: f64, threshold: f64) -> Classification {
    if u_el > threshold {
        Classification::Exceeded
    } else {
        Classification::Ok
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultSet {
    /// Per model point, `[ux, uy, uz, rx, ry, rz]` (mm, rad).
    pub displacements: Vec<[f64; 6]>,
    pub end_forces: Vec<EndForces>,
    /// Per cell, in model order.
    pub u_el: Vec<f64>,
    pub exceeded: Vec<bool>,
    pub max_u_el: f64,
    pub max_total_displacement: f64,
}

impl ResultSet {
    /// `props` and `yield_stress` run parallel to `end_forces`.
    pub fn new(
        displacements: Vec<[f64; 6]>,
        end_forces: Vec<EndForces>,
        props: &[SectionProperties],
        yield_stress: &[f64],
        threshold: f64,
    ) -> Self {
        let u_el: Vec<f64> = end_forces
            .iter()
            .zip(props.iter().zip(yield_stress))
            .map(|(f, (p, ry))| resistance_ratio(f, p, *ry))
            .collect();
        let exceeded = u_el
            .iter()
            .map(|&u| classify(u, threshold) == Classification::Exceeded)
            .collect();
        let max_u_el = u_el.iter().copied().fold(0.0, f64::max);
        let max_total_displacement = displacements.iter().map(total_displacement).fold(0.0, f64::max);
        ResultSet {
            displacements,
            end_forces,
            u_el,
            exceeded,
            max_u_el,
            max_total_displacement,
        }
    }

    pub fn exceeded_cells(&self) -> Vec<CellId> {
        self.end_forces
            .iter()
            .zip(&self.exceeded)
            .filter(|(_, &x)| x)
            .map(|(f, _)| f.cell)
            .collect()
    }
}

pub fn total_displacement(d: &[f64; 6]) -> f64 {
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub max_u_el: f64,
    /// Cell attaining `max_u_el`, lowest id on ties.
    pub max_u_el_cell: Option<CellId>,
    pub max_total_displacement: f64,
    pub exceeded_count: usize,
    pub cell_count: usize,
}

pub fn summarize(results: &ResultSet) -> Summary {
    let mut max_cell: Option<(f64, CellId)> = None;
    for (f, &u) in results.end_forces.iter().zip(&results.u_el) {
        let better = match max_cell {
            None => true,
            Some((m, c)) => u > m || (u == m && f.cell < c),
        };
        if better {
            max_cell = Some((u, f.cell));
        }
    }
    Summary {
        max_u_el: results.max_u_el,
        max_u_el_cell: max_cell.map(|(_, c)| c),
        max_total_displacement: results.max_total_displacement,
        exceeded_count: results.exceeded.iter().filter(|&&x| x).count(),
        cell_count: results.u_el.len(),
    }
}

/// `x + scale·u` for every point, in model order.
pub fn deformed_geometry(model: &StructuralModel, displacements: &[[f64; 6]], scale: f64) -> Vec<[f64; 3]> {
    model
        .points
        .iter()
        .zip(displacements)
        .map(|(p, d)| {
            if scale == 0.0 {
                p.coords
            } else {
                [
                    p.coords[0] + scale * d[0],
                    p.coords[1] + scale * d[1],
                    p.coords[2] + scale * d[2],
                ]
            }
        })
        .collect()
}
