mod common;

use common::cantilever;
use formpipe_core::analysis::{analyze, AnalysisOptions};
use formpipe_core::casegen::{gen_leonardo, gen_random, gen_sphere_lattice, LatticeSpec, LeonardoSpec, RandomSpec};
use formpipe_core::exchange::{parse_model, write_model, write_results_vtk, ExchangeError};
use formpipe_core::model::StructuralModel;
use formpipe_core::post::ResultSet;

const EXAMPLE: &str = include_str!("fixtures/cantilever_example.vtp");

fn assert_round_trip(m: &StructuralModel, what: &str) {
    let text = write_model(m);
    let back = parse_model(&text).unwrap_or_else(|e| panic!("{what}: {e}\n{text}"));
    assert_eq!(&back, m, "{what}");
    assert_eq!(write_model(&back), text, "{what}: rewrite differs");
}

#[test]
fn example_file_round_trips() {
    let m = parse_model(EXAMPLE).unwrap();
    assert_eq!(m.points.len(), 2);
    assert_round_trip(&m, "example file");
}

#[test]
fn randomized_models_round_trip() {
    for seed in 0..500u64 {
        let spec = RandomSpec {
            max_points: 5 + (seed as usize * 7919) % 1000,
            messy: seed % 2 == 1,
            sparse_ids: false,
            rigid_links: seed.is_multiple_of(3),
        };
        assert_round_trip(&gen_random(seed, &spec), &format!("seed {seed}"));
    }
}

#[test]
fn sparse_ids_come_back_compacted() {
    for seed in 0..20 {
        let m = gen_random(
            seed,
            &RandomSpec {
                sparse_ids: true,
                messy: true,
                ..Default::default()
            },
        );
        let back = parse_model(&write_model(&m)).unwrap();
        assert_eq!(back, m.compacted());
    }
}

#[test]
fn generated_cases_round_trip() {
    assert_round_trip(&cantilever(8, true), "cantilever");
    assert_round_trip(&gen_leonardo(&LeonardoSpec::default()).unwrap(), "leonardo");
    assert_round_trip(&gen_sphere_lattice(&LatticeSpec::default()).unwrap().model, "lattice");
    assert_round_trip(&StructuralModel::new(), "empty");
}

fn section<'a>(text: &'a str, header: &str) -> Vec<&'a str> {
    text.lines()
        .skip_while(|l| !l.starts_with(header))
        .skip(1)
        .take_while(|l| !l.chars().next().is_some_and(|c| c.is_ascii_uppercase()))
        .collect()
}

#[test]
fn cantilever_results_file() {
    let m = cantilever(1, true);
    let a = analyze(&m, &AnalysisOptions::default()).unwrap();
    let text = write_results_vtk(&m, &a.results, 0.0).unwrap();
    assert!(text.starts_with("# vtk DataFile Version 3.0\n"));
    assert!(text.contains("ASCII\nDATASET POLYDATA\nPOINTS 2 double\n0.0 0.0 0.0\n1000.0 0.0 0.0\n"));
    assert!(text.contains("LINES 1 3\n2 0 1\n"));
    assert!(text.contains("VECTORS displacement double"));
    let ratio: Vec<f64> = section(&text, "LOOKUP_TABLE")
        .iter()
        .map(|v| v.parse().unwrap())
        .collect();
    assert!((ratio[0] - 1.175).abs() < 5e-3);
    assert!(text.ends_with("SCALARS exceeded int 1\nLOOKUP_TABLE default\n1\n"));

    let deformed = write_results_vtk(&m, &a.results, 1.0).unwrap();
    let tip: Vec<f64> = section(&deformed, "POINTS")[1]
        .split(' ')
        .map(|v| v.parse().unwrap())
        .collect();
    assert!((tip[2] - a.results.displacements[1][2]).abs() < 1e-12);
}

#[test]
fn unloaded_results_are_all_zero() {
    let mut m = cantilever(2, false);
    m.bcs.clear();
    for p in &mut m.points {
        p.bc_id = 0;
    }
    let a = analyze(&m, &AnalysisOptions::default()).unwrap();
    let text = write_results_vtk(&m, &a.results, 1.0).unwrap();
    assert!(text.contains("SCALARS resistance_ratio double 1\nLOOKUP_TABLE default\n0.0\n0.0\n"));
    assert!(text.ends_with("LOOKUP_TABLE default\n0\n0\n"));
}

#[test]
fn mismatched_results_are_refused() {
    let m = cantilever(2, false);
    let r = ResultSet::new(vec![[0.0; 6]; 2], vec![], &[], &[], 1.0);
    assert!(matches!(
        write_results_vtk(&m, &r, 1.0),
        Err(ExchangeError::LengthMismatch { .. })
    ));
}
