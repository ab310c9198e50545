use nalgebra::{Matrix3, SMatrix, SVector, Vector3};

use super::SolverError;
use crate::model::{Cell, CellId, CellKind, StructuralModel};
use crate::section::{LocalAxis, SectionProperties};

pub type Mat12 = SMatrix<f64, 12, 12>;
pub type Vec12 = SVector<f64, 12>;

/// Member axis closer to global Z than this (in sine) counts as vertical.
const VERTICAL_SINE: f64 = 1e-6;

/// Orientation reference for the local triad.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reference {
    /// Local z follows global Z; global X for vertical members.
    Default,
    /// `axis` is aligned with `direction` projected perpendicular to the member.
    Toward { axis: LocalAxis, direction: [f64; 3] },
}

/// Rows of the result are the local x, y, z unit vectors in global components.
pub fn local_axes(a: [f64; 3], b: [f64; 3], reference: Reference) -> Option<Matrix3<f64>> {
    let d = Vector3::from(b) - Vector3::from(a);
    let length = d.norm();
    if !(length > 0.0 && length.is_finite()) {
        return None;
    }
    let ex = d / length;
    let project = |r: Vector3<f64>| {
        let p = r - ex * ex.dot(&r);
        let n = p.norm();
        (n > VERTICAL_SINE * r.norm()).then(|| p / n)
    };
    let (ey, ez) = match reference {
        Reference::Default => {
            let ez = project(Vector3::z()).or_else(|| project(Vector3::x()))?;
            (ez.cross(&ex), ez)
        }
        Reference::Toward { axis, direction } => {
            let r = project(Vector3::from(direction))?;
            match axis {
                LocalAxis::Z => (r.cross(&ex), r),
                LocalAxis::Y => (r, ex.cross(&r)),
            }
        }
    };
    Some(Matrix3::from_rows(&[ex.transpose(), ey.transpose(), ez.transpose()]))
}

/// Euler–Bernoulli 3D beam in local axes, DOFs `[u v w θx θy θz]` per end.
pub fn beam_stiffness_local(p: &SectionProperties, e: f64, g: f64, length: f64) -> Mat12 {
    let l = length;
    let mut k = Mat12::zeros();
    let ea = e * p.area / l;
    let gj = g * p.torsion / l;
    for (i, j, v) in [(0, 0, ea), (0, 6, -ea), (6, 6, ea), (3, 3, gj), (3, 9, -gj), (9, 9, gj)] {
        k[(i, j)] = v;
    }

    // bending in the x-y plane: v, θz about local z
    let b = e * p.iz;
    let (v1, t1, v2, t2) = (1, 5, 7, 11);
    let ez = [
        (v1, v1, 12.0 * b / l.powi(3)),
        (v1, t1, 6.0 * b / l.powi(2)),
        (v1, v2, -12.0 * b / l.powi(3)),
        (v1, t2, 6.0 * b / l.powi(2)),
        (t1, t1, 4.0 * b / l),
        (t1, v2, -6.0 * b / l.powi(2)),
        (t1, t2, 2.0 * b / l),
        (v2, v2, 12.0 * b / l.powi(3)),
        (v2, t2, -6.0 * b / l.powi(2)),
        (t2, t2, 4.0 * b / l),
    ];
    // bending in the x-z plane: w, θy about local y (θy = -dw/dx)
    let b = e * p.iy;
    let (w1, r1, w2, r2) = (2, 4, 8, 10);
    let ey = [
        (w1, w1, 12.0 * b / l.powi(3)),
        (w1, r1, -6.0 * b / l.powi(2)),
        (w1, w2, -12.0 * b / l.powi(3)),
        (w1, r2, -6.0 * b / l.powi(2)),
        (r1, r1, 4.0 * b / l),
        (r1, w2, 6.0 * b / l.powi(2)),
        (r1, r2, 2.0 * b / l),
        (w2, w2, 12.0 * b / l.powi(3)),
        (w2, r2, 6.0 * b / l.powi(2)),
        (r2, r2, 4.0 * b / l),
    ];
    for (i, j, v) in ez.into_iter().chain(ey) {
        k[(i, j)] = v;
    }
    k.fill_lower_triangle_with_upper_triangle();
    k
}

/// Axial-only bar in local axes; rotational and transverse rows are zero.
pub fn truss_stiffness_local(p: &SectionProperties, e: f64, length: f64) -> Mat12 {
    let ea = e * p.area / length;
    let mut k = Mat12::zeros();
    k[(0, 0)] = ea;
    k[(6, 6)] = ea;
    k[(0, 6)] = -ea;
    k[(6, 0)] = -ea;
    k
}

/// Consistent nodal loads of a uniform line load `q` (N/mm, local axes).
/// A truss carries the transverse part as simple end reactions only.
pub fn uniform_load_local(q: Vector3<f64>, length: f64, kind: CellKind) -> Vec12 {
    let l = length;
    let mut f = Vec12::zeros();
    for k in 0..3 {
        f[k] = q[k] * l / 2.0;
        f[6 + k] = q[k] * l / 2.0;
    }
    if kind == CellKind::Beam {
        f[5] = q[1] * l * l / 12.0;
        f[11] = -q[1] * l * l / 12.0;
        f[4] = -q[2] * l * l / 12.0;
        f[10] = q[2] * l * l / 12.0;
    }
    f
}

pub(crate) fn block_rotation(r: &Matrix3<f64>) -> Mat12 {
    let mut t = Mat12::zeros();
    for b in 0..4 {
        t.fixed_view_mut::<3, 3>(3 * b, 3 * b).copy_from(r);
    }
    t
}

/// Everything about one cell that assembly and force recovery need.
#[derive(Debug, Clone)]
pub struct ElementData {
    pub cell: CellId,
    pub kind: CellKind,
    /// Positions of the end points in `model.points`.
    pub nodes: [usize; 2],
    pub length: f64,
    pub rotation: Matrix3<f64>,
    pub props: SectionProperties,
    pub k_local: Mat12,
    /// Equivalent nodal loads of the element line load, local axes.
    pub load_local: Vec12,
}

impl ElementData {
    pub fn transformation(&self) -> Mat12 {
        block_rotation(&self.rotation)
    }

    pub fn k_global(&self) -> Mat12 {
        let t = self.transformation();
        let k = t.transpose() * self.k_local * t;
        // exact symmetry regardless of rounding in the triple product
        (k + k.transpose()) * 0.5
    }

    pub fn load_global(&self) -> Vec12 {
        self.transformation().transpose() * self.load_local
    }
}

pub(crate) fn element_data(
    model: &StructuralModel,
    cell: &Cell,
    index: &std::collections::HashMap<crate::model::PointId, usize>,
) -> Result<ElementData, SolverError> {
    let node = |k: usize| {
        index
            .get(&cell.nodes[k])
            .copied()
            .ok_or_else(|| SolverError::InvalidModel(format!("cell {} references a missing point", cell.id)))
    };
    let nodes = [node(0)?, node(1)?];
    let a = model.points[nodes[0]].coords;
    let b = model.points[nodes[1]].coords;
    let length = crate::model::distance(&a, &b);
    if !(length > 0.0) || cell.nodes[0] == cell.nodes[1] {
        return Err(SolverError::ZeroLength(cell.id));
    }
    let cs = model.cross_sections.get(&cell.cs_id).ok_or_else(|| {
        SolverError::InvalidModel(format!(
            "cell {} references missing cross-section {}",
            cell.id, cell.cs_id
        ))
    })?;
    let mat = model.materials.get(&cell.mat_id).ok_or_else(|| {
        SolverError::InvalidModel(format!("cell {} references missing material {}", cell.id, cell.mat_id))
    })?;
    let props = cs
        .properties()
        .map_err(|source| SolverError::Section { cell: cell.id, source })?;

    let reference = match cs.ref_node() {
        None => Reference::Default,
        Some(r) if r.code < 0 => {
            let mut direction = [0.0; 3];
            direction[(-r.code - 1) as usize] = 1.0;
            Reference::Toward {
                axis: r.axis,
                direction,
            }
        }
        Some(r) => {
            let target = u32::try_from(r.code)
                .ok()
                .and_then(|id| model.point(crate::model::PointId(id)))
                .ok_or_else(|| SolverError::Orientation {
                    cell: cell.id,
                    reason: format!("refNode point {} does not exist", r.code),
                })?;
            let c = target.coords;
            Reference::Toward {
                axis: r.axis,
                direction: [c[0] - a[0], c[1] - a[1], c[2] - a[2]],
            }
        }
    };
    let rotation = local_axes(a, b, reference).ok_or_else(|| SolverError::Orientation {
        cell: cell.id,
        reason: "reference direction is parallel to the member".into(),
    })?;

    let k_local = match cell.kind {
        CellKind::Beam => beam_stiffness_local(&props, mat.e, mat.shear_modulus(), length),
        CellKind::Truss => truss_stiffness_local(&props, mat.e, length),
    };
    let load_local = if model.self_weight && mat.density > 0.0 {
        // kg/mm³ · mm² · mm/s² is kg·mm/s² per mm, i.e. mN/mm
        let q = Vector3::from(model.gravity) * (mat.density * props.area * 1e-3);
        uniform_load_local(rotation * q, length, cell.kind)
    } else {
        Vec12::zeros()
    };
    Ok(ElementData {
        cell: cell.id,
        kind: cell.kind,
        nodes,
        length,
        rotation,
        props,
        k_local,
        load_local,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::section::{section_properties, SectionShape};
    use nalgebra::DMatrix;

    fn circle20() -> SectionProperties {
        section_properties(&SectionShape::Circle { diameter: 20.0 }).unwrap()
    }

    #[test]
    fn default_axes_for_horizontal_and_vertical_members() {
        let r = local_axes([0.0; 3], [10.0, 0.0, 0.0], Reference::Default).unwrap();
        assert_eq!(r.row(1), Vector3::y().transpose());
        assert_eq!(r.row(2), Vector3::z().transpose());
        let r = local_axes([0.0; 3], [0.0, 0.0, 5.0], Reference::Default).unwrap();
        assert_eq!(r.row(2), Vector3::x().transpose());
        assert!((r.determinant() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reference_axis_names_local_y() {
        let r = local_axes(
            [0.0; 3],
            [10.0, 0.0, 0.0],
            Reference::Toward {
                axis: LocalAxis::Y,
                direction: [0.0, 0.0, 1.0],
            },
        )
        .unwrap();
        assert_eq!(r.row(1), Vector3::z().transpose());
        assert!((r.determinant() - 1.0).abs() < 1e-15);
        assert!(local_axes(
            [0.0; 3],
            [10.0, 0.0, 0.0],
            Reference::Toward {
                axis: LocalAxis::Z,
                direction: [2.0, 0.0, 0.0]
            },
        )
        .is_none());
    }

    #[test]
    fn beam_has_six_rigid_body_modes() {
        let p = circle20();
        let r = local_axes([0.0; 3], [300.0, 400.0, 1200.0], Reference::Default).unwrap();
        let t = block_rotation(&r);
        let k = t.transpose() * beam_stiffness_local(&p, 210e3, 87.5e3, 1300.0) * t;
        let dk = DMatrix::from_column_slice(12, 12, k.as_slice());
        let eig = dk.symmetric_eigen().eigenvalues;
        let scale = eig.amax();
        let zeros = eig.iter().filter(|v| v.abs() <= 1e-9 * scale).count();
        assert_eq!(zeros, 6);
        assert!(eig.iter().all(|&v| v > -1e-9 * scale));
    }

    #[test]
    fn unit_bar_block() {
        let p = SectionProperties {
            area: 1.0,
            iy: 1.0,
            iz: 1.0,
            torsion: 1.0,
            wy: 1.0,
            wz: 1.0,
            wt: 1.0,
        };
        let k = truss_stiffness_local(&p, 1.0, 1.0);
        assert_eq!(k[(0, 0)], 1.0);
        assert_eq!(k[(0, 6)], -1.0);
        assert_eq!(k.iter().filter(|v| **v != 0.0).count(), 4);
    }

    #[test]
    fn bar_at_45_degrees_is_the_direction_outer_product() {
        let p = SectionProperties {
            area: 2.0,
            iy: 1.0,
            iz: 1.0,
            torsion: 1.0,
            wy: 1.0,
            wz: 1.0,
            wt: 1.0,
        };
        let l = 2f64.sqrt();
        let r = local_axes([0.0; 3], [1.0, 1.0, 0.0], Reference::Default).unwrap();
        let t = block_rotation(&r);
        let k = t.transpose() * truss_stiffness_local(&p, 3.0, l) * t;
        // EA/L · [c²  cs; cs s²] with c = s = 1/√2
        let expect = 3.0 * 2.0 / l * 0.5;
        for (i, j, sign) in [
            (0, 0, 1.0),
            (0, 1, 1.0),
            (1, 1, 1.0),
            (0, 6, -1.0),
            (1, 7, -1.0),
            (0, 7, -1.0),
        ] {
            assert!((k[(i, j)] - sign * expect).abs() < 1e-14, "k[{i},{j}]");
        }
        assert!(k[(2, 2)].abs() < 1e-15);
    }

    #[test]
    fn uniform_load_resultant() {
        let f = uniform_load_local(Vector3::new(0.0, -2.0, 3.0), 6.0, CellKind::Beam);
        assert_eq!(f[1] + f[7], -12.0);
        assert_eq!(f[2] + f[8], 18.0);
        assert_eq!(f[5], -6.0);
        assert_eq!(f[4], -9.0);
    }
}
