//! Vertex-to-cell incidence and cell adjacency over a model.

use std::collections::HashMap;

use crate::model::{CellId, PointId, StructuralModel};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Topology {
    /// Point ids in model storage order; positions index `vertex_to_cells`.
    pub point_ids: Vec<PointId>,
    /// Cell ids in model storage order; positions index `cell_adjacency`.
    pub cell_ids: Vec<CellId>,
    pub vertex_to_cells: Vec<Vec<CellId>>,
    /// Cells sharing at least one vertex, ascending, excluding the cell itself.
    pub cell_adjacency: Vec<Vec<CellId>>,
    point_pos: HashMap<PointId, usize>,
    cell_pos: HashMap<CellId, usize>,
}

impl Topology {
    pub fn cells_at(&self, point: PointId) -> &[CellId] {
        self.point_pos
            .get(&point)
            .map(|&i| self.vertex_to_cells[i].as_slice())
            .unwrap_or(&[])
    }

    pub fn neighbours(&self, cell: CellId) -> &[CellId] {
        self.cell_pos
            .get(&cell)
            .map(|&i| self.cell_adjacency[i].as_slice())
            .unwrap_or(&[])
    }

    pub fn degree(&self, point: PointId) -> usize {
        self.cells_at(point).len()
    }
}

/// Endpoints that do not resolve to a point are ignored.
pub fn build_topology(model: &StructuralModel) -> Topology {
    let point_pos = model.point_index();
    let cell_pos: HashMap<CellId, usize> = model.cells.iter().enumerate().map(|(i, c)| (c.id, i)).collect();

    let mut vertex_to_cells = vec![Vec::new(); model.points.len()];
    for cell in &model.cells {
        for (k, n) in cell.nodes.iter().enumerate() {
            // a cell whose endpoints coincide is incident once
            if k == 1 && cell.nodes[0] == *n {
                continue;
            }
            if let Some(&i) = point_pos.get(n) {
                vertex_to_cells[i].push(cell.id);
            }
        }
    }

    let cell_adjacency = model
        .cells
        .iter()
        .map(|cell| {
            let mut adj: Vec<CellId> = cell
                .nodes
                .iter()
                .filter_map(|n| point_pos.get(n))
                .flat_map(|&i| vertex_to_cells[i].iter().copied())
                .filter(|&other| other != cell.id)
                .collect();
            adj.sort_unstable();
            adj.dedup();
            adj
        })
        .collect();

    Topology {
        point_ids: model.points.iter().map(|p| p.id).collect(),
        cell_ids: model.cells.iter().map(|c| c.id).collect(),
        vertex_to_cells,
        cell_adjacency,
        point_pos,
        cell_pos,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Cell, Point};

    fn chain(n_points: u32) -> StructuralModel {
        let mut m = StructuralModel::new();
        for i in 0..n_points {
            m.points.push(Point::new(i, [i as f64, 0.0, 0.0]));
        }
        for i in 0..n_points - 1 {
            m.cells.push(Cell::beam(i, i, i + 1, 1, 1));
        }
        m
    }

    #[test]
    fn single_cell() {
        let t = build_topology(&chain(2));
        assert_eq!(t.cells_at(PointId(0)), &[CellId(0)]);
        assert!(t.neighbours(CellId(0)).is_empty());
    }

    #[test]
    fn empty() {
        let t = build_topology(&StructuralModel::new());
        assert!(t.vertex_to_cells.is_empty());
        assert!(t.cell_adjacency.is_empty());
    }

    #[test]
    fn three_cell_chain() {
        let t = build_topology(&chain(4));
        assert_eq!(t.neighbours(CellId(1)), &[CellId(0), CellId(2)]);
        assert_eq!(t.neighbours(CellId(0)), &[CellId(1)]);
        assert_eq!(t.degree(PointId(1)), 2);
    }

    #[test]
    fn adjacency_is_symmetric() {
        let mut m = chain(6);
        m.cells.push(Cell::beam(10, 0, 3, 1, 1));
        m.cells.push(Cell::beam(11, 3, 5, 1, 1));
        let t = build_topology(&m);
        for (i, adj) in t.cell_adjacency.iter().enumerate() {
            for b in adj {
                assert!(t.neighbours(*b).contains(&t.cell_ids[i]));
            }
        }
    }
}
