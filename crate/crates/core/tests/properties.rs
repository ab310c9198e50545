//! Model-level invariants as property tests over generated inputs.

mod common;

use std::collections::HashSet;

use common::oracles::messy;
use common::*;
use formpipe_core::analysis::{analyze, AnalysisOptions};
use formpipe_core::casegen::{gen_leonardo, gen_random, gen_sphere_lattice, LatticeSpec, LeonardoSpec, RandomSpec};
use formpipe_core::exchange::{parse_model, write_model};
use formpipe_core::model::PointId;
use formpipe_core::repair::*;
use formpipe_core::solver::assemble;
use formpipe_core::validate;
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 48,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn validation_is_repeatable(seed in 0u64..10_000) {
        let m = messy(seed);
        let before = m.clone();
        let first = validate(&m);
        prop_assert_eq!(validate(&m), first);
        prop_assert_eq!(m, before);
    }

    #[test]
    fn writer_is_deterministic(seed in 0u64..10_000, messy in any::<bool>(), sparse in any::<bool>()) {
        let spec = RandomSpec { max_points: 120, messy, sparse_ids: sparse, rigid_links: true };
        let m = gen_random(seed, &spec);
        prop_assert_eq!(write_model(&m), write_model(&m.clone()));
        prop_assert_eq!(gen_random(seed, &spec), m);
    }

    #[test]
    fn parser_is_total_on_damaged_documents(
        seed in 0u64..1_000,
        cut in 0.0f64..1.0,
        at in 0.0f64..1.0,
        byte in prop::sample::select(b"<>/\"=_ 0123456789.-eE\nxyz".to_vec()),
    ) {
        let text = write_model(&gen_random(seed, &RandomSpec { max_points: 30, ..Default::default() }));
        let mut damaged = text.clone().into_bytes();
        let i = ((damaged.len() - 1) as f64 * at) as usize;
        damaged[i] = byte;
        damaged.truncate(((damaged.len() as f64) * (0.5 + cut / 2.0)) as usize + 1);
        // either a model or an error; never a panic
        let _ = parse_model(&String::from_utf8_lossy(&damaged));
        let _ = parse_model(&text[..(text.len() as f64 * cut) as usize]);
    }

    #[test]
    fn pruning_keeps_protected_points(seed in 0u64..10_000, degree in 1usize..=3) {
        let mut m = messy(seed);
        merge_duplicate_nodes(&mut m, 1e-6).unwrap();
        remove_degenerate_cells(&mut m, 1e-6).unwrap();
        let protected = m.protected_points();
        if prune_dead_arms(&mut m, degree).is_ok() {
            let kept: HashSet<PointId> = m.points.iter().map(|p| p.id).collect();
            prop_assert!(protected.iter().all(|p| kept.contains(p)));
        }
    }

    #[test]
    fn pipeline_output_is_valid_single_and_stable(seed in 0u64..10_000, degree in 1usize..=3) {
        let mut m = messy(seed);
        let config = RepairConfig { prune_degree: degree, ..Default::default() };
        match repair_pipeline(&mut m, &config) {
            Err(RepairError::WouldEmpty) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
            Ok(_) => {}
        }
        prop_assert!(validate(&m).ok());
        prop_assert_eq!(component_labels(&m).len(), 1);
        let once = m.clone();
        let again = repair_pipeline(&mut m, &config).unwrap();
        prop_assert!(again.is_empty());
        prop_assert_eq!(m, once);
    }

    #[test]
    fn ratios_scale_with_the_loads(seed in 0u64..10_000, alpha in 0.05f64..20.0) {
        let mut m = beam_frame(seed, 40, seed % 2 == 0);
        m.self_weight = false;
        let base = analyze(&m, &AnalysisOptions::default()).unwrap();
        for bc in m.bcs.values_mut() {
            bc.components = bc.components.map(|v| alpha * v);
        }
        let scaled = analyze(&m, &AnalysisOptions::default()).unwrap();
        // measured against the largest ratio: unloaded cells sit at round-off level
        let top = alpha * base.results.max_u_el.max(1e-12);
        for (u, v) in base.results.u_el.iter().zip(&scaled.results.u_el) {
            prop_assert!((v - alpha * u).abs() <= 1e-12 * top);
        }
    }

    #[test]
    fn ratios_ignore_rigid_translation(
        seed in 0u64..10_000,
        shift in prop::array::uniform3(-1e4f64..1e4),
    ) {
        let m = beam_frame(seed, 40, seed % 2 == 0);
        let base = analyze(&m, &AnalysisOptions::default()).unwrap();
        let mut moved = m.clone();
        for p in &mut moved.points {
            for k in 0..3 {
                p.coords[k] += shift[k];
            }
        }
        let after = analyze(&moved, &AnalysisOptions::default()).unwrap();
        let top = base.results.max_u_el.max(1e-12);
        for (u, v) in base.results.u_el.iter().zip(&after.results.u_el) {
            prop_assert!((u - v).abs() <= 1e-8 * top);
        }
    }

    #[test]
    fn stiffness_is_symmetric_and_loads_balance(seed in 0u64..10_000, self_weight in any::<bool>()) {
        let mut m = beam_frame(seed, 60, true);
        m.self_weight = self_weight;
        let k = assemble(&m).unwrap().system.k;
        prop_assert!(k.symmetry_error() <= 1e-12 * k.max_abs());
        let a = analyze(&m, &AnalysisOptions::default()).unwrap();
        prop_assert!(a.equilibrium_error <= 1e-8);
    }

    #[test]
    fn generated_cases_are_valid_and_reproducible(
        seed in 0u64..1_000,
        segments in 3usize..12,
        nx in 1usize..5, ny in 1usize..5, nz in 1usize..5,
    ) {
        let leo = LeonardoSpec { n_segments: segments, ..Default::default() };
        let a = gen_leonardo(&leo).unwrap();
        prop_assert!(validate(&a).ok());
        prop_assert_eq!(gen_leonardo(&leo).unwrap(), a);

        let block = gen_sphere_lattice(&LatticeSpec::block(nx, ny, nz)).unwrap().model;
        prop_assert!(validate(&block).ok());
        prop_assert_eq!(block.points.len(), nx * ny * nz);
        prop_assert_eq!(block.cells.len(), (nx - 1) * ny * nz + nx * (ny - 1) * nz + nx * ny * (nz - 1));

        let r = gen_random(seed, &RandomSpec { max_points: 80, ..Default::default() });
        prop_assert!(validate(&r).ok());
    }
}
