use std::collections::HashSet;

use super::union_find::DisjointSet;
use super::{RemovedComponent, RepairReport};
use crate::model::{CellId, PointId, StructuralModel};

/// Connected components over cells and rigid links.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentLabels {
    /// Component of each point, by position in `model.points`.
    pub point_label: Vec<usize>,
    /// Component of each cell by position, `None` if no endpoint resolves.
    pub cell_label: Vec<Option<usize>>,
    pub representative: Vec<PointId>,
    pub point_count: Vec<usize>,
    pub cell_count: Vec<usize>,
}

impl ComponentLabels {
    pub fn len(&self) -> usize {
        self.representative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representative.is_empty()
    }

    /// Largest component by cell count, ties to the lowest representative.
    pub fn main(&self) -> Option<usize> {
        (0..self.len()).min_by_key(|&c| (std::cmp::Reverse(self.cell_count[c]), self.representative[c]))
    }
}

/// Labels are numbered in ascending order of each component's lowest point id.
pub fn component_labels(model: &StructuralModel) -> ComponentLabels {
    let index = model.point_index();
    let n = model.points.len();
    let mut sets = DisjointSet::new(n);
    let pairs = model
        .cells
        .iter()
        .map(|c| (c.nodes[0], c.nodes[1]))
        .chain(model.rigid_links.iter().map(|l| (l.master, l.slave)));
    for (a, b) in pairs {
        if let (Some(&i), Some(&j)) = (index.get(&a), index.get(&b)) {
            sets.union(i, j);
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| model.points[i].id);
    let mut root_label = vec![usize::MAX; n];
    let mut point_label = vec![0; n];
    let mut representative = Vec::new();
    let mut point_count = Vec::new();
    for i in order {
        let root = sets.find(i);
        if root_label[root] == usize::MAX {
            root_label[root] = representative.len();
            representative.push(model.points[i].id);
            point_count.push(0);
        }
        point_label[i] = root_label[root];
        point_count[point_label[i]] += 1;
    }

    let mut cell_count = vec![0; representative.len()];
    let cell_label = model
        .cells
        .iter()
        .map(|c| {
            let label = c.nodes.iter().find_map(|n| index.get(n)).map(|&i| point_label[i]);
            if let Some(l) = label {
                cell_count[l] += 1;
            }
            label
        })
        .collect();

    ComponentLabels {
        point_label,
        cell_label,
        representative,
        point_count,
        cell_count,
    }
}

/// Keep only the main body: the component with the most cells.
pub fn remove_detached_components(model: &mut StructuralModel) -> RepairReport {
    let mut report = RepairReport::starting_from(model);
    let labels = component_labels(model);
    let Some(main) = labels.main() else {
        return report.finish();
    };
    if labels.len() == 1 {
        return report.finish();
    }

    for c in 0..labels.len() {
        if c != main {
            report.removed_components.push(RemovedComponent {
                representative: labels.representative[c],
                points: labels.point_count[c],
                cells: labels.cell_count[c],
            });
        }
    }

    let mut removed_cells: Vec<CellId> = model
        .cells
        .iter()
        .zip(&labels.cell_label)
        .filter(|(_, l)| **l != Some(main))
        .map(|(c, _)| c.id)
        .collect();
    removed_cells.sort();

    let keep_points: HashSet<PointId> = model
        .points
        .iter()
        .zip(&labels.point_label)
        .filter(|(_, &l)| l == main)
        .map(|(p, _)| p.id)
        .collect();

    let mut i = 0;
    model.cells.retain(|_| {
        let keep = labels.cell_label[i] == Some(main);
        i += 1;
        keep
    });
    model.points.retain(|p| keep_points.contains(&p.id));
    model
        .rigid_links
        .retain(|l| keep_points.contains(&l.master) && keep_points.contains(&l.slave));

    report.removed_component_cells = removed_cells;
    report.finish()
}
