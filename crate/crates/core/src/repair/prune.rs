use std::collections::{HashMap, HashSet, VecDeque};

use super::{RepairError, RepairReport};
use crate::model::{PointId, StructuralModel};

/// Remove dead arms.
///
/// First every unprotected point with at most `max_degree` incident cells is
/// deleted together with its cells, repeatedly, until none is left. The
/// peeled points then fall into clusters joined by peeled cells; a cluster
/// attached to two or more retained points is a load path (a chain between
/// the body and a support, or between two parts of the body) and is put back.
/// What remains deleted hangs off the body by a single point.
///
/// Constrained points, loaded points and rigid-link endpoints are protected.
/// The result does not depend on deletion order.
pub fn prune_dead_arms(model: &mut StructuralModel, max_degree: usize) -> Result<RepairReport, RepairError> {
    let mut protected: HashSet<PointId> = model.protected_points().into_iter().collect();
    for link in &model.rigid_links {
        protected.insert(link.master);
        protected.insert(link.slave);
    }
    prune_dead_arms_with(model, max_degree, &protected)
}

pub fn prune_dead_arms_with(
    model: &mut StructuralModel,
    max_degree: usize,
    protected: &HashSet<PointId>,
) -> Result<RepairReport, RepairError> {
    if max_degree == 0 {
        return Err(RepairError::BadDegree);
    }
    let mut report = RepairReport::starting_from(model);
    let index = model.point_index();
    let n = model.points.len();

    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ci, cell) in model.cells.iter().enumerate() {
        for (k, node) in cell.nodes.iter().enumerate() {
            if k == 1 && cell.nodes[0] == *node {
                continue;
            }
            if let Some(&pi) = index.get(node) {
                incident[pi].push(ci);
            }
        }
    }
    let mut degree: Vec<usize> = incident.iter().map(Vec::len).collect();
    let is_protected: Vec<bool> = model.points.iter().map(|p| protected.contains(&p.id)).collect();

    let mut point_gone = vec![false; n];
    let mut cell_gone = vec![false; model.cells.len()];
    let mut queued = vec![false; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for i in 0..n {
        if !is_protected[i] && degree[i] <= max_degree {
            queued[i] = true;
            queue.push_back(i);
        }
    }

    while let Some(i) = queue.pop_front() {
        point_gone[i] = true;
        for &ci in &incident[i] {
            if cell_gone[ci] {
                continue;
            }
            cell_gone[ci] = true;
            for node in &model.cells[ci].nodes {
                let Some(&j) = index.get(node) else { continue };
                if j == i || point_gone[j] {
                    continue;
                }
                degree[j] -= 1;
                if !queued[j] && !is_protected[j] && degree[j] <= max_degree {
                    queued[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }

    restore_load_paths(model, &index, &incident, &mut point_gone, &mut cell_gone);

    if n > 0 && point_gone.iter().all(|&g| g) {
        return Err(RepairError::WouldEmpty);
    }

    report.pruned_arm_points = (0..n).filter(|&i| point_gone[i]).map(|i| model.points[i].id).collect();
    report.pruned_arm_points.sort();
    report.pruned_cells = (0..model.cells.len())
        .filter(|&i| cell_gone[i])
        .map(|i| model.cells[i].id)
        .collect();
    report.pruned_cells.sort();

    let mut i = 0;
    model.points.retain(|_| {
        i += 1;
        !point_gone[i - 1]
    });
    let mut i = 0;
    model.cells.retain(|_| {
        i += 1;
        !cell_gone[i - 1]
    });
    Ok(report.finish())
}

fn restore_load_paths(
    model: &StructuralModel,
    index: &HashMap<PointId, usize>,
    incident: &[Vec<usize>],
    point_gone: &mut [bool],
    cell_gone: &mut [bool],
) {
    let n = point_gone.len();
    let mut visited = vec![false; n];
    for start in 0..n {
        if !point_gone[start] || visited[start] {
            continue;
        }
        let mut cluster = vec![start];
        let mut anchors = HashSet::new();
        visited[start] = true;
        let mut k = 0;
        while k < cluster.len() {
            let i = cluster[k];
            k += 1;
            for &ci in &incident[i] {
                for node in &model.cells[ci].nodes {
                    let Some(&j) = index.get(node) else { continue };
                    if !point_gone[j] {
                        anchors.insert(j);
                    } else if !visited[j] {
                        visited[j] = true;
                        cluster.push(j);
                    }
                }
            }
        }
        if anchors.len() >= 2 {
            for &i in &cluster {
                point_gone[i] = false;
                for &ci in &incident[i] {
                    cell_gone[ci] = false;
                }
            }
        }
    }
}
