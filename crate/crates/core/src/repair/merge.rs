use std::collections::HashMap;

use super::union_find::DisjointSet;
use super::{RepairError, RepairReport};
use crate::model::{distance, PointId, StructuralModel};

fn grid_key(coords: &[f64; 3], tol: f64) -> [i64; 3] {
    if tol > 0.0 {
        coords.map(|c| (c / tol).floor() as i64)
    } else {
        // exact coincidence; -0.0 and 0.0 share a key
        coords.map(|c| (c + 0.0).to_bits() as i64)
    }
}

/// Union-find classes of points lying within `tol` of each other, found with
/// a uniform hash grid of cell size `tol`.
fn coincident_classes(model: &StructuralModel, tol: f64) -> DisjointSet {
    let n = model.points.len();
    let mut sets = DisjointSet::new(n);
    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::with_capacity(n);
    for (i, p) in model.points.iter().enumerate() {
        if p.coords.iter().all(|c| c.is_finite()) {
            grid.entry(grid_key(&p.coords, tol)).or_default().push(i);
        }
    }
    for (key, members) in &grid {
        if tol == 0.0 {
            for &j in &members[1..] {
                sets.union(members[0], j);
            }
            continue;
        }
        for dx in -1..=1i64 {
            for dy in -1..=1i64 {
                for dz in -1..=1i64 {
                    let other = [
                        key[0].saturating_add(dx),
                        key[1].saturating_add(dy),
                        key[2].saturating_add(dz),
                    ];
                    let Some(neighbours) = grid.get(&other) else {
                        continue;
                    };
                    for &i in members {
                        for &j in neighbours {
                            if i < j && distance(&model.points[i].coords, &model.points[j].coords) <= tol {
                                sets.union(i, j);
                            }
                        }
                    }
                }
            }
        }
    }
    sets
}

/// Merge points closer than `tol` (inclusive, transitively). The lowest id of
/// each cluster survives with its own coordinates; constraint masks are
/// OR-combined and at most one point of a cluster may carry a load.
pub fn merge_duplicate_nodes(model: &mut StructuralModel, tol: f64) -> Result<RepairReport, RepairError> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(RepairError::BadTolerance(tol));
    }
    let mut report = RepairReport::starting_from(model);
    let mut sets = coincident_classes(model, tol);

    let n = model.points.len();
    // root -> position of the lowest-id member
    let mut survivor_of_root: HashMap<usize, usize> = HashMap::new();
    for i in 0..n {
        let root = sets.find(i);
        survivor_of_root
            .entry(root)
            .and_modify(|s| {
                if model.points[i].id < model.points[*s].id {
                    *s = i;
                }
            })
            .or_insert(i);
    }

    let mut survivor = vec![0; n];
    for (i, s) in survivor.iter_mut().enumerate() {
        *s = survivor_of_root[&sets.find(i)];
    }

    let mut fixed = model.points.iter().map(|p| p.fixed).collect::<Vec<_>>();
    let mut bc = model.points.iter().map(|p| p.bc_id).collect::<Vec<_>>();
    let mut bc_owner: Vec<usize> = (0..n).collect();
    for i in 0..n {
        let s = survivor[i];
        if s == i {
            continue;
        }
        for k in 0..6 {
            fixed[s][k] |= model.points[i].fixed[k];
        }
        let load = model.points[i].bc_id;
        if load != 0 {
            if bc[s] != 0 {
                return Err(RepairError::LoadConflict {
                    survivor: model.points[bc_owner[s]].id,
                    other: model.points[i].id,
                    first: bc[s],
                    second: load,
                });
            }
            bc[s] = load;
            bc_owner[s] = i;
        }
        report.merged_point_pairs.push((model.points[s].id, model.points[i].id));
    }
    if report.merged_point_pairs.is_empty() {
        return Ok(report.finish());
    }
    report.merged_point_pairs.sort();

    let rename: HashMap<PointId, PointId> = (0..n)
        .filter(|&i| survivor[i] != i)
        .map(|i| (model.points[i].id, model.points[survivor[i]].id))
        .collect();
    let map = |id: PointId| rename.get(&id).copied().unwrap_or(id);

    for cell in &mut model.cells {
        cell.nodes = cell.nodes.map(map);
    }
    for link in &mut model.rigid_links {
        link.master = map(link.master);
        link.slave = map(link.slave);
    }
    model.rigid_links.retain(|l| l.master != l.slave);

    let mut i = 0;
    model.points.retain_mut(|p| {
        let keep = survivor[i] == i;
        if keep {
            p.fixed = fixed[i];
            p.bc_id = bc[i];
        }
        i += 1;
        keep
    });
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Cell, Point};
    use proptest::prelude::*;

    #[test]
    fn merges_nearby_pair_and_rewires() {
        let mut m = StructuralModel::new();
        m.points.push(Point::new(0, [0.0, 0.0, 0.0]));
        m.points.push(Point::new(1, [0.0, 0.0, 1e-9]));
        m.points.push(Point::new(2, [10.0, 0.0, 0.0]));
        m.points[1].fixed[2] = true;
        m.points[1].bc_id = 3;
        m.cells.push(Cell::beam(0, 1, 2, 1, 1));
        let r = merge_duplicate_nodes(&mut m, 1e-6).unwrap();
        assert_eq!(r.merged_point_pairs, vec![(PointId(0), PointId(1))]);
        assert_eq!(m.points.len(), 2);
        assert_eq!(m.cells[0].nodes, [PointId(0), PointId(2)]);
        assert!(m.points[0].fixed[2]);
        assert_eq!(m.points[0].bc_id, 3);
    }

    #[test]
    fn conflicting_loads_leave_model_untouched() {
        let mut m = StructuralModel::new();
        m.points.push(Point::new(0, [0.0; 3]));
        m.points.push(Point::new(1, [0.0; 3]));
        m.points[0].bc_id = 1;
        m.points[1].bc_id = 2;
        let before = m.clone();
        assert!(matches!(
            merge_duplicate_nodes(&mut m, 0.0),
            Err(RepairError::LoadConflict { .. })
        ));
        assert_eq!(m, before);
    }

    #[test]
    fn junction_multiplicities_collapse() {
        // a girder end meeting three coincident copies of the same node
        let mut m = StructuralModel::new();
        for i in 0..4 {
            m.points.push(Point::new(i, [500.0, 0.0, 0.0]));
        }
        m.points.push(Point::new(4, [0.0; 3]));
        for i in 0..4 {
            m.cells.push(Cell::beam(i, 4, i, 1, 1));
        }
        merge_duplicate_nodes(&mut m, 0.0).unwrap();
        assert_eq!(m.points.len(), 2);
        assert!(m.cells.iter().all(|c| c.nodes == [PointId(4), PointId(0)]));
    }

    #[test]
    fn rejects_negative_tolerance() {
        let mut m = StructuralModel::new();
        assert_eq!(
            merge_duplicate_nodes(&mut m, -1.0),
            Err(RepairError::BadTolerance(-1.0))
        );
    }

    proptest! {
        #[test]
        fn survivors_are_farther_apart_than_tol(
            coords in prop::collection::vec(prop::array::uniform3(0.0f64..10.0), 1..120),
            tol in 0.0f64..1.5,
        ) {
            let mut m = StructuralModel::new();
            for (i, c) in coords.iter().enumerate() {
                m.points.push(Point::new(i as u32, *c));
            }
            merge_duplicate_nodes(&mut m, tol).unwrap();
            for (i, a) in m.points.iter().enumerate() {
                for b in &m.points[i + 1..] {
                    prop_assert!(distance(&a.coords, &b.coords) > tol);
                }
            }
        }
    }
}
