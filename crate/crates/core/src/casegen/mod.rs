//! Parametric model generators: the steel cantilever, a Leonardo-style
//! interleaved timber arch, voxel lattices of touching spheres, and seeded
//! random "messy" models for exercising repair and round-tripping.
//!
//! All generators are deterministic for a given spec (and seed) and emit
//! models with dense ids.

mod cantilever;
mod lattice;
mod leonardo;
mod random;

pub use cantilever::{gen_cantilever, CantileverSpec};
pub use lattice::{gen_sphere_lattice, ArchShape, LatticeModel, LatticeSpec, LatticeTruth, Occupancy};
pub use leonardo::{gen_leonardo, LeonardoSpec, LeonardoVariant};
pub use random::{gen_random, RandomSpec};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("{name} must be {requirement}, got {value}")]
    Parameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("the occupancy is empty after trimming")]
    EmptyLattice,
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<(), GenError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(GenError::Parameter {
            name,
            requirement: "positive",
            value,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{analyze, AnalysisOptions};
    use crate::model::PointId;
    use crate::validate::validate;

    #[test]
    fn cantilever_matches_the_example_file() {
        let m = gen_cantilever(&CantileverSpec::default()).unwrap();
        assert_eq!(m.points.len(), 2);
        assert_eq!(m.cells.len(), 1);
        assert_eq!(m.points[0].fixed, [true; 6]);
        assert_eq!(m.points[1].bc_id, 1);
        assert_eq!(m.bcs[&1].components[2], -264.777);
        assert_eq!(m.cells[0].cs_id, 2);
        assert_eq!(m.cross_sections.len(), 2);
        assert!(validate(&m).ok());
        assert!(gen_cantilever(&CantileverSpec {
            n_elements: 0,
            ..Default::default()
        })
        .is_err());
    }

    #[test]
    fn small_lattices() {
        let two = gen_sphere_lattice(&LatticeSpec::block(2, 1, 1)).unwrap();
        assert_eq!((two.model.points.len(), two.model.cells.len()), (2, 1));
        let cube = gen_sphere_lattice(&LatticeSpec::block(5, 5, 5)).unwrap();
        assert_eq!((cube.model.points.len(), cube.model.cells.len()), (125, 300));
        assert!(validate(&cube.model).ok());
    }

    #[test]
    fn default_lattice_is_reproducible_and_lightly_polluted() {
        let a = gen_sphere_lattice(&LatticeSpec::default()).unwrap();
        let b = gen_sphere_lattice(&LatticeSpec::default()).unwrap();
        assert_eq!(a, b);
        assert!(validate(&a.model).ok());
        let f = a.truth.injected_fraction();
        assert!(f > 0.005 && f < 0.02, "{f}");
        assert!(a.model.points.len() > 500, "{}", a.model.points.len());
    }

    #[test]
    fn leonardo_is_symmetric_and_valid() {
        let m = gen_leonardo(&LeonardoSpec::default()).unwrap();
        assert!(validate(&m).ok());
        let xs: Vec<_> = m.points.iter().map(|p| p.coords).collect();
        let span = LeonardoSpec::default().span;
        for c in &xs {
            let mirror = [span - c[0], c[1], c[2]];
            assert!(
                xs.iter().any(|d| (0..3).all(|k| (d[k] - mirror[k]).abs() < 1e-6)),
                "{c:?} has no mirror image"
            );
        }
    }

    #[test]
    fn closing_the_leonardo_arch_stiffens_it() {
        let run = |variant| {
            let m = gen_leonardo(&LeonardoSpec {
                variant,
                ..Default::default()
            })
            .unwrap();
            analyze(&m, &AnalysisOptions::default()).unwrap()
        };
        let open = run(LeonardoVariant::Open);
        let closed = run(LeonardoVariant::Closed);
        assert!(open.summary.max_total_displacement > closed.summary.max_total_displacement);
        assert!(open.summary.max_u_el > closed.summary.max_u_el);

        let mobile = run(LeonardoVariant::ClosedMobile);
        let n = LeonardoSpec::default().n_segments as u32;
        let released = mobile.reactions.iter().find(|r| r.point == PointId(n)).unwrap();
        assert!(released.components[0].abs() < 1e-6, "{:?}", released.components);
        assert!(mobile.summary.max_total_displacement > closed.summary.max_total_displacement);
    }

    #[test]
    fn bad_parameters_are_reported() {
        let e = gen_leonardo(&LeonardoSpec {
            span: -1.0,
            ..Default::default()
        })
        .unwrap_err();
        assert!(matches!(e, GenError::Parameter { name: "span", .. }));
    }
}
