use super::components::component_labels;
use crate::model::{PointId, StructuralModel};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnsupportedComponent {
    /// Point ids of the component, ascending.
    pub points: Vec<PointId>,
    pub fixed_dofs: usize,
}

/// Components (with at least one cell or rigid link) that hold no constrained
/// point or fewer than six fixed DOFs in total.
///
/// This is a counting check only; mechanisms inside a sufficiently fixed
/// component surface as zero pivots during factorisation.
pub fn check_support_reachability(model: &StructuralModel) -> Vec<UnsupportedComponent> {
    let labels = component_labels(model);
    let mut fixed = vec![0; labels.len()];
    let mut members: Vec<Vec<PointId>> = vec![Vec::new(); labels.len()];
    let mut linked = vec![false; labels.len()];
    let index = model.point_index();
    for link in &model.rigid_links {
        if let Some(&i) = index.get(&link.master) {
            linked[labels.point_label[i]] = true;
        }
    }
    for (p, &l) in model.points.iter().zip(&labels.point_label) {
        fixed[l] += p.fixed_count();
        members[l].push(p.id);
    }
    (0..labels.len())
        .filter(|&c| labels.cell_count[c] > 0 || linked[c])
        .filter(|&c| fixed[c] < 6)
        .map(|c| {
            let mut points = std::mem::take(&mut members[c]);
            points.sort();
            UnsupportedComponent {
                points,
                fixed_dofs: fixed[c],
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Cell, Point};

    fn bar() -> StructuralModel {
        let mut m = StructuralModel::new();
        m.points.push(Point::new(0, [0.0; 3]));
        m.points.push(Point::new(1, [1000.0, 0.0, 0.0]));
        m.cells.push(Cell::beam(0, 0, 1, 1, 1));
        m
    }

    #[test]
    fn clamped_cantilever_is_supported() {
        let mut m = bar();
        m.points[0].fixed = [true; 6];
        assert!(check_support_reachability(&m).is_empty());
    }

    #[test]
    fn free_floating_line() {
        let r = check_support_reachability(&bar());
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].points, vec![PointId(0), PointId(1)]);
        assert_eq!(r[0].fixed_dofs, 0);
    }

    #[test]
    fn single_pin_is_not_enough() {
        let mut m = bar();
        m.points[0].fixed = [true, true, true, false, false, false];
        let r = check_support_reachability(&m);
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].fixed_dofs, 3);
    }

    #[test]
    fn orphan_points_are_ignored() {
        let mut m = bar();
        m.points[0].fixed = [true; 6];
        m.points.push(Point::new(5, [9.0; 3]));
        assert!(check_support_reachability(&m).is_empty());
    }
}
