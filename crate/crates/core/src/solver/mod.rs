//! Linear statics of 3D beam and truss frames.
//!
//! Units throughout are mm, N and MPa. Rigid-link slaves are eliminated by
//! the transformation method, so the assembled stiffness stays symmetric
//! positive definite for a properly supported model and both solvers apply.

mod assembly;
mod direct;
mod element;
mod forces;
mod pcg;
pub mod sparse;

use thiserror::Error;

use crate::model::CellId;
use crate::repair::UnsupportedComponent;
use crate::section::SectionError;

pub use assembly::{assemble, assemble_unchecked, build_dof_map, Assembly, DofLabel, DofMap, DofSlot, LinearSystem};
pub use direct::{solve_direct, LdlFactor};
pub use element::{
    beam_stiffness_local, local_axes, truss_stiffness_local, uniform_load_local, ElementData, Mat12, Reference, Vec12,
};
pub use forces::{load_and_reaction_resultants, reactions, recover_end_forces, EndForces, Reaction};
pub use pcg::{solve_pcg_ichol, IncompleteCholesky, DEFAULT_PCG_TOL};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("model is not valid for analysis: {0}")]
    InvalidModel(String),
    #[error("{} component(s) are not supported against rigid-body motion", .0.len())]
    Unsupported(Vec<UnsupportedComponent>),
    #[error("cell {0} has zero length")]
    ZeroLength(CellId),
    #[error("cell {cell}: {source}")]
    Section { cell: CellId, source: SectionError },
    #[error("cell {cell}: cannot orient the cross-section: {reason}")]
    Orientation { cell: CellId, reason: String },
    #[error("point {0} is a rigid-link slave and cannot be supported")]
    ConstrainedSlave(crate::model::PointId),
    #[error("kinematic mechanism: pivot {pivot:e} at {}", label.map(|l| l.to_string()).unwrap_or_else(|| format!("equation {equation}")))]
    Mechanism {
        equation: usize,
        label: Option<DofLabel>,
        pivot: f64,
    },
    #[error("incomplete Cholesky broke down even with diagonal shift {shift:e}")]
    PreconditionerBreakdown { shift: f64 },
    #[error("stiffness is not positive definite (found at CG iteration {iterations})")]
    NotPositiveDefinite { iterations: usize },
    #[error("PCG did not converge in {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("tolerance must lie in (0, 1), got {0}")]
    BadTolerance(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Direct,
    PcgIchol,
}

impl SolveMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveMethod::Direct => "direct",
            SolveMethod::PcgIchol => "pcg-ichol",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub method: SolveMethod,
    /// 0 for the direct solver.
    pub iterations: usize,
    /// `‖f − K u‖/‖f‖` for the direct solver, the preconditioned residual
    /// ratio for PCG.
    pub relative_residual: f64,
    /// Seconds.
    pub wall_time: f64,
}

/// Solver selection with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Solver {
    #[default]
    Direct,
    Pcg {
        tol: f64,
        max_iter: Option<usize>,
    },
}

pub fn solve(system: &LinearSystem, solver: Solver) -> Result<(Vec<f64>, SolveStats), SolverError> {
    match solver {
        Solver::Direct => solve_direct(system),
        Solver::Pcg { tol, max_iter } => solve_pcg_ichol(system, tol, max_iter),
    }
}
