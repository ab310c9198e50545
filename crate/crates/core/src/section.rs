//! Cross-section catalog entries and their derived properties.

use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SectionError {
    #[error("cross-section dimension `{name}` must be positive and finite, got {value}")]
    NonPositiveDimension { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalAxis {
    Y,
    Z,
}

impl LocalAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            LocalAxis::Y => "y",
            LocalAxis::Z => "z",
        }
    }
}

/// Orientation hint `refNode <axis> <code>`.
///
/// Codes -1, -2, -3 name the global x, y, z axis;
/// non-negative codes are point ids whose position, relative to the first
/// cell node, gives the reference direction for `axis`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RefNode {
    pub axis: LocalAxis,
    pub code: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SectionShape {
    /// `width` runs along local z, `height` along local y.
    Rectangle {
        width: f64,
        height: f64,
        ref_node: Option<RefNode>,
    },
    Circle {
        diameter: f64,
    },
    /// Homogenised section given directly by its properties.
    Generic(SectionProperties),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionProperties {
    /// mm²
    pub area: f64,
    /// Second moment about local y, mm⁴.
    pub iy: f64,
    /// Second moment about local z, mm⁴.
    pub iz: f64,
    /// Torsion constant, mm⁴.
    pub torsion: f64,
    /// Section moduli, mm³.
    pub wy: f64,
    pub wz: f64,
    /// Torsional modulus (τ_max = T / Wt), mm³.
    pub wt: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossSection {
    pub shape: SectionShape,
    pub extra: Vec<(String, String)>,
}

impl CrossSection {
    pub fn circle(diameter: f64) -> Self {
        CrossSection {
            shape: SectionShape::Circle { diameter },
            extra: Vec::new(),
        }
    }

    pub fn rectangle(width: f64, height: f64) -> Self {
        CrossSection {
            shape: SectionShape::Rectangle {
                width,
                height,
                ref_node: None,
            },
            extra: Vec::new(),
        }
    }

    pub fn generic(props: SectionProperties) -> Self {
        CrossSection {
            shape: SectionShape::Generic(props),
            extra: Vec::new(),
        }
    }

    pub fn ref_node(&self) -> Option<RefNode> {
        match self.shape {
            SectionShape::Rectangle { ref_node, .. } => ref_node,
            _ => None,
        }
    }

    pub fn properties(&self) -> Result<SectionProperties, SectionError> {
        section_properties(&self.shape)
    }
}

// Saint-Venant torsion of a solid a×t rectangle (a ≥ t): J = β·a·t³,
// τ_max = T / (α·a·t²). Timoshenko & Goodier table, linear interpolation.
const TORSION_RATIO: [f64; 9] = [1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 10.0];
const TORSION_BETA: [f64; 9] = [0.1406, 0.196, 0.229, 0.249, 0.263, 0.281, 0.291, 0.299, 0.312];
const TORSION_ALPHA: [f64; 9] = [0.208, 0.231, 0.246, 0.258, 0.267, 0.282, 0.291, 0.299, 0.312];

fn torsion_coefficients(ratio: f64) -> (f64, f64) {
    let last = TORSION_RATIO.len() - 1;
    if ratio >= TORSION_RATIO[last] {
        // Interpolate in t/a towards the thin-strip limit 1/3.
        let s = (TORSION_RATIO[last] / ratio).clamp(0.0, 1.0);
        let lerp = |v: f64| 1.0 / 3.0 + (v - 1.0 / 3.0) * s;
        return (lerp(TORSION_BETA[last]), lerp(TORSION_ALPHA[last]));
    }
    let k = TORSION_RATIO.windows(2).position(|w| ratio <= w[1]).unwrap_or(last - 1);
    let s = (ratio - TORSION_RATIO[k]) / (TORSION_RATIO[k + 1] - TORSION_RATIO[k]);
    let lerp = |t: &[f64; 9]| t[k] + (t[k + 1] - t[k]) * s;
    (lerp(&TORSION_BETA), lerp(&TORSION_ALPHA))
}

fn positive(name: &'static str, value: f64) -> Result<f64, SectionError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(SectionError::NonPositiveDimension { name, value })
    }
}

pub fn section_properties(shape: &SectionShape) -> Result<SectionProperties, SectionError> {
    match *shape {
        SectionShape::Circle { diameter } => {
            let d = positive("diameter", diameter)?;
            let i = PI * d.powi(4) / 64.0;
            let w = PI * d.powi(3) / 32.0;
            Ok(SectionProperties {
                area: PI * d * d / 4.0,
                iy: i,
                iz: i,
                torsion: 2.0 * i,
                wy: w,
                wz: w,
                wt: 2.0 * w,
            })
        }
        SectionShape::Rectangle { width, height, .. } => {
            let b = positive("width", width)?;
            let h = positive("height", height)?;
            let (long, short) = if b >= h { (b, h) } else { (h, b) };
            let (beta, alpha) = torsion_coefficients(long / short);
            Ok(SectionProperties {
                area: b * h,
                iy: h * b.powi(3) / 12.0,
                iz: b * h.powi(3) / 12.0,
                torsion: beta * long * short.powi(3),
                wy: h * b * b / 6.0,
                wz: b * h * h / 6.0,
                wt: alpha * long * short * short,
            })
        }
        SectionShape::Generic(p) => {
            positive("A", p.area)?;
            positive("Iy", p.iy)?;
            positive("Iz", p.iz)?;
            positive("J", p.torsion)?;
            positive("Wy", p.wy)?;
            positive("Wz", p.wz)?;
            positive("Wt", p.wt)?;
            Ok(p)
        }
    }
}
