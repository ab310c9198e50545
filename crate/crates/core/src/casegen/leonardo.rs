use super::{positive, GenError};
use crate::model::{BoundaryCondition, Cell, Material, Point, StructuralModel};
use crate::section::{CrossSection, LocalAxis, RefNode, SectionShape};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeonardoVariant {
    /// Without the closing chords at the supports.
    Open,
    Closed,
    /// Closed, with the horizontal support released at the far end.
    ClosedMobile,
}

impl LeonardoVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            LeonardoVariant::Open => "open",
            LeonardoVariant::Closed => "closed",
            LeonardoVariant::ClosedMobile => "closed_mobile",
        }
    }
}

impl std::str::FromStr for LeonardoVariant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "open" => Ok(LeonardoVariant::Open),
            "closed" => Ok(LeonardoVariant::Closed),
            "closed_mobile" | "closed-mobile" => Ok(LeonardoVariant::ClosedMobile),
            other => Err(format!("unknown variant `{other}` (open, closed, closed_mobile)")),
        }
    }
}

/// Planar self-supporting arch of interleaved straight timber beams in the
/// x–z plane.
///
/// The upper layer ("A" beams) spans between arch nodes `a_0 … a_n` on a
/// parabola, each beam split at its midpoint `m_i`. The lower layer ("B"
/// beams) runs from `m_{i-1}` through its own midpoint `b_i` to `m_i`, so
/// each B beam overlaps two A beams by half their length; a short bearer
/// joins `a_i` to `b_i` where the beams rest on each other. At the supports
/// the outer B beams run down to `a_0` and `a_n`; the closed variant adds the
/// outer A beams `a_0–m_0–a_1` and `a_{n-1}–m_{n-1}–a_n`, closing the end
/// triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct LeonardoSpec {
    /// mm
    pub span: f64,
    /// mm
    pub height: f64,
    pub n_segments: usize,
    /// Out-of-plane width, mm.
    pub beam_b: f64,
    /// In-plane depth, mm.
    pub beam_h: f64,
    pub variant: LeonardoVariant,
    /// Per loaded node, N.
    pub roof_dead_load: f64,
    /// Per loaded node, N.
    pub snow_load: f64,
    pub material: Material,
    pub self_weight: bool,
}

impl Default for LeonardoSpec {
    fn default() -> Self {
        LeonardoSpec {
            span: 35_000.0,
            height: 13_000.0,
            n_segments: 8,
            beam_b: 300.0,
            beam_h: 500.0,
            variant: LeonardoVariant::Closed,
            roof_dead_load: 6_000.0,
            snow_load: 9_000.0,
            material: Material {
                e: 11_000.0,
                nu: 0.3,
                t_alpha: 5e-6,
                density: 420e-9,
                yield_stress: 24.0,
                extra: Vec::new(),
            },
            self_weight: true,
        }
    }
}

pub fn gen_leonardo(spec: &LeonardoSpec) -> Result<StructuralModel, GenError> {
    positive("span", spec.span)?;
    positive("height", spec.height)?;
    positive("beam_b", spec.beam_b)?;
    positive("beam_h", spec.beam_h)?;
    if spec.n_segments < 3 {
        return Err(GenError::Parameter {
            name: "n_segments",
            requirement: "at least 3",
            value: spec.n_segments as f64,
        });
    }
    for (name, v) in [("roof_dead_load", spec.roof_dead_load), ("snow_load", spec.snow_load)] {
        if !v.is_finite() {
            return Err(GenError::Parameter {
                name,
                requirement: "finite",
                value: v,
            });
        }
    }

    let n = spec.n_segments;
    let arch = |i: usize| {
        let x = spec.span * i as f64 / n as f64;
        let z = 4.0 * spec.height * x * (spec.span - x) / (spec.span * spec.span);
        [x, 0.0, z]
    };
    let mid = |p: [f64; 3], q: [f64; 3]| [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0, (p[2] + q[2]) / 2.0];

    let mut m = StructuralModel::new();
    m.comment = format!("leonardo arch - {}", spec.variant.as_str());
    m.self_weight = spec.self_weight;

    // ids: a_i = i, m_i = n + 1 + i, b_i = 2n + i
    let a_id = |i: usize| i as u32;
    let m_id = |i: usize| (n + 1 + i) as u32;
    let b_id = |i: usize| (2 * n + i) as u32;
    let closed = spec.variant != LeonardoVariant::Open;
    for i in 0..=n {
        m.points.push(Point::new(a_id(i), arch(i)));
    }
    for i in 0..n {
        if closed || (i != 0 && i != n - 1) {
            m.points.push(Point::new(m_id(i), mid(arch(i), arch(i + 1))));
        }
    }
    for i in 1..n {
        let b = mid(mid(arch(i - 1), arch(i)), mid(arch(i), arch(i + 1)));
        m.points.push(Point::new(b_id(i), b));
    }

    let mut cells = Vec::new();
    // the lower beams at the ends rest on the supports
    cells.push((a_id(0), b_id(1)));
    cells.push((b_id(1), m_id(1)));
    for i in 1..n - 1 {
        cells.push((a_id(i), m_id(i)));
        cells.push((m_id(i), a_id(i + 1)));
    }
    for i in 2..n - 1 {
        cells.push((m_id(i - 1), b_id(i)));
        cells.push((b_id(i), m_id(i)));
    }
    cells.push((m_id(n - 2), b_id(n - 1)));
    cells.push((b_id(n - 1), a_id(n)));
    for i in 1..n {
        cells.push((a_id(i), b_id(i)));
    }
    if closed {
        // upper end beams closing the triangles at the supports
        cells.push((a_id(0), m_id(0)));
        cells.push((m_id(0), a_id(1)));
        cells.push((a_id(n - 1), m_id(n - 1)));
        cells.push((m_id(n - 1), a_id(n)));
    }
    for (k, (p, q)) in cells.into_iter().enumerate() {
        m.cells.push(Cell::beam(k as u32, p, q, 1, 1));
    }

    // planar frame: out-of-plane translation and in-plane-normal rotations held
    for p in &mut m.points {
        p.fixed[1] = true;
        p.fixed[3] = true;
        p.fixed[5] = true;
    }
    for (i, release) in [(0, false), (n, spec.variant == LeonardoVariant::ClosedMobile)] {
        let p = &mut m.points[i];
        p.fixed[0] = !release;
        p.fixed[2] = true;
    }
    for i in 1..n {
        m.points[i].bc_id = 1;
    }

    // local z out of plane: width b along global Y, depth h in plane
    m.cross_sections.insert(
        1,
        CrossSection {
            shape: SectionShape::Rectangle {
                width: spec.beam_b,
                height: spec.beam_h,
                ref_node: Some(RefNode {
                    axis: LocalAxis::Z,
                    code: -2,
                }),
            },
            extra: Vec::new(),
        },
    );
    m.materials.insert(1, spec.material.clone());
    let w = spec.roof_dead_load + spec.snow_load;
    m.bcs
        .insert(1, BoundaryCondition::nodal_load([0.0, 0.0, -w, 0.0, 0.0, 0.0]));
    Ok(m)
}
