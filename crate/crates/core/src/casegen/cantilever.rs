use super::{positive, GenError};
use crate::model::{BoundaryCondition, Cell, Material, Point, StructuralModel};
use crate::section::{CrossSection, LocalAxis, RefNode, SectionShape};

/// Straight steel cantilever along +x, clamped at the origin, with a
/// downward tip force.
#[derive(Debug, Clone, PartialEq)]
pub struct CantileverSpec {
    /// mm
    pub length: f64,
    /// mm
    pub diameter: f64,
    /// Downward tip force, N (27 kg under standard gravity).
    pub tip_force: f64,
    pub n_elements: usize,
    pub material: Material,
    pub self_weight: bool,
}

impl Default for CantileverSpec {
    fn default() -> Self {
        CantileverSpec {
            length: 1000.0,
            diameter: 20.0,
            tip_force: 264.777,
            n_elements: 1,
            material: Material::steel(),
            self_weight: true,
        }
    }
}

/// Catalogs follow the classic two-node example file: section 1 is a spare
/// rectangle, section 2 the circle used by every cell.
pub fn gen_cantilever(spec: &CantileverSpec) -> Result<StructuralModel, GenError> {
    positive("length", spec.length)?;
    positive("diameter", spec.diameter)?;
    if spec.n_elements == 0 {
        return Err(GenError::Parameter {
            name: "n_elements",
            requirement: "at least 1",
            value: 0.0,
        });
    }
    if !spec.tip_force.is_finite() {
        return Err(GenError::Parameter {
            name: "tip_force",
            requirement: "finite",
            value: spec.tip_force,
        });
    }

    let mut m = StructuralModel::new();
    m.comment = "example - cantilever".into();
    m.self_weight = spec.self_weight;
    let n = spec.n_elements as u32;
    for i in 0..=n {
        let x = spec.length * i as f64 / n as f64;
        m.points.push(Point::new(i, [x, 0.0, 0.0]));
    }
    m.points[0].fixed = [true; 6];
    m.points[n as usize].bc_id = 1;
    for i in 0..n {
        m.cells.push(Cell::beam(i, i, i + 1, 2, 1));
    }
    m.cross_sections.insert(
        1,
        CrossSection {
            shape: SectionShape::Rectangle {
                width: 100.0,
                height: 200.0,
                ref_node: Some(RefNode {
                    axis: LocalAxis::Y,
                    code: -2,
                }),
            },
            extra: Vec::new(),
        },
    );
    m.cross_sections.insert(2, CrossSection::circle(spec.diameter));
    m.materials.insert(1, spec.material.clone());
    m.bcs.insert(
        1,
        BoundaryCondition::nodal_load([0.0, 0.0, -spec.tip_force, 0.0, 0.0, 0.0]),
    );
    Ok(m)
}
