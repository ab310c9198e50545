//! One-call linear analysis: assemble, solve, recover forces and reactions,
//! and reduce to resistance ratios.

use std::borrow::Cow;

use crate::model::StructuralModel;
use crate::post::{summarize, ResultSet, Summary, DEFAULT_THRESHOLD};
use crate::solver::{
    assemble, load_and_reaction_resultants, reactions, recover_end_forces, solve, Assembly, Reaction, SolveStats,
    Solver, SolverError,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub solver: Solver,
    /// Overrides the model's own self-weight flag when set.
    pub self_weight: Option<bool>,
    pub threshold: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            solver: Solver::Direct,
            self_weight: None,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub assembly: Assembly,
    /// Solution over the free equations.
    pub solution: Vec<f64>,
    pub results: ResultSet,
    pub reactions: Vec<Reaction>,
    pub stats: SolveStats,
    pub summary: Summary,
    /// `‖applied + reactions‖ / ‖applied‖` over force and moment resultants
    /// about the origin (absolute when nothing is applied).
    pub equilibrium_error: f64,
}

pub fn analyze(model: &StructuralModel, options: &AnalysisOptions) -> Result<Analysis, SolverError> {
    let model: Cow<StructuralModel> = match options.self_weight {
        Some(flag) if flag != model.self_weight => {
            let mut m = model.clone();
            m.self_weight = flag;
            Cow::Owned(m)
        }
        _ => Cow::Borrowed(model),
    };
    let assembly = assemble(&model)?;
    let (solution, stats) = solve(&assembly.system, options.solver)?;
    let displacements = assembly.dofs.expand(&solution);
    let end_forces = recover_end_forces(&assembly, &displacements);
    let reactions = reactions(&model, &assembly, &displacements);

    let props: Vec<_> = assembly.elements.iter().map(|e| e.props).collect();
    let yield_stress: Vec<f64> = model
        .cells
        .iter()
        .map(|c| model.materials[&c.mat_id].yield_stress)
        .collect();
    let results = ResultSet::new(displacements, end_forces, &props, &yield_stress, options.threshold);
    let summary = summarize(&results);

    let (applied, supports) = load_and_reaction_resultants(&model, &assembly, &reactions);
    let scale = applied.iter().map(|v| v * v).sum::<f64>().sqrt();
    let imbalance = applied
        .iter()
        .zip(&supports)
        .map(|(a, s)| (a + s) * (a + s))
        .sum::<f64>()
        .sqrt();
    let equilibrium_error = if scale > 0.0 { imbalance / scale } else { imbalance };

    Ok(Analysis {
        assembly,
        solution,
        results,
        reactions,
        stats,
        summary,
        equilibrium_error,
    })
}
