#![allow(dead_code)]

pub mod oracles;

use formpipe_core::casegen::{gen_cantilever, gen_random, CantileverSpec, RandomSpec};
use formpipe_core::model::{CellKind, StructuralModel};
use formpipe_core::section::section_properties;
use formpipe_core::SectionShape;

pub const F: f64 = 264.777;
pub const L: f64 = 1000.0;
pub const E: f64 = 210e3;

pub fn circle20() -> formpipe_core::SectionProperties {
    section_properties(&SectionShape::Circle { diameter: 20.0 }).unwrap()
}

/// Self-weight line load of the 20 mm steel bar, N/mm.
pub fn bar_weight() -> f64 {
    7850e-9 * 9806.65e-3 * circle20().area
}

pub fn cantilever(n_elements: usize, self_weight: bool) -> StructuralModel {
    gen_cantilever(&CantileverSpec {
        n_elements,
        self_weight,
        ..Default::default()
    })
    .unwrap()
}

/// `F L³/3EI` plus, with self-weight, `w L⁴/8EI`.
pub fn cantilever_tip_deflection(self_weight: bool) -> f64 {
    let i = circle20().iy;
    let force = F * L.powi(3) / (3.0 * E * i);
    if self_weight {
        force + bar_weight() * L.powi(4) / (8.0 * E * i)
    } else {
        force
    }
}

/// Clean random frame with every cell turned into a beam, so it has no
/// pin-jointed mechanisms.
pub fn beam_frame(seed: u64, max_points: usize, rigid_links: bool) -> StructuralModel {
    let mut m = gen_random(
        seed,
        &RandomSpec {
            max_points,
            rigid_links,
            ..Default::default()
        },
    );
    for c in &mut m.cells {
        c.kind = CellKind::Beam;
    }
    m
}

pub fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// `‖a − b‖ / ‖b‖` over all six components of every point.
pub fn rel_diff(a: &[[f64; 6]], b: &[[f64; 6]]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in a.iter().zip(b) {
        for k in 0..6 {
            num += (x[k] - y[k]).powi(2);
            den += y[k].powi(2);
        }
    }
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}
