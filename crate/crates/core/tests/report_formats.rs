use std::path::PathBuf;

use nk_core::report::{write_csv, write_json, ReportTable};
use nk_core::{
    compare_grid, dock, robustness_sweep, ComparisonTable, DependencyScheme, DockingTable,
    ExperimentSpec, GridSpec, Landscape, RobustnessSpec, Summarize, SweepOrder,
};
use proptest::prelude::*;
use serde_json::Value;

fn schema(name: &str) -> jsonschema::Validator {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "schema", name].iter().collect();
    let text = std::fs::read_to_string(&path).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn assert_valid(validator: &jsonschema::Validator, text: &str) {
    let value: Value = serde_json::from_str(text).unwrap();
    let errors: Vec<String> = validator.iter_errors(&value).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

fn small_grid() -> ComparisonTable {
    let spec = GridSpec {
        k_values: vec![0, 3, 7],
        t_values: vec![10, 100],
        ..GridSpec::standard(8, 200, 9)
    };
    compare_grid(&spec).unwrap()
}

#[test]
fn comparison_table_matches_schema_and_round_trips() {
    let table = small_grid();
    assert_eq!(table.rows.len(), 6);
    let json = table.to_json_string().unwrap();
    assert_valid(&schema("comparison_table.schema.json"), &json);
    assert_eq!(ComparisonTable::from_json_str(&json).unwrap(), table);

    let csv = table.to_csv_string().unwrap();
    let back = ComparisonTable::from_csv_str(&csv).unwrap();
    assert_eq!(back.metadata, table.metadata);
    assert_eq!(back.rows.len(), table.rows.len());
    for (a, b) in back.rows.iter().zip(&table.rows) {
        assert_eq!((a.n, a.k, a.t), (b.n, b.k, b.t));
        assert!((a.fitness_difference - b.fitness_difference).abs() <= 5e-7);
        assert!((a.consumption_pct_immls - b.consumption_pct_immls).abs() <= 5e-7);
        assert!((a.moves_smmls - b.moves_smmls).abs() <= 5e-7);
    }
    // Re-emitting the parsed CSV reproduces it exactly.
    assert_eq!(back.to_csv_string().unwrap(), csv);
}

#[test]
fn robustness_table_matches_schema() {
    let spec = RobustnessSpec {
        n_values: vec![6, 8],
        ..RobustnessSpec::standard(vec![10, 50], 100, 4)
    };
    let table = robustness_sweep(&spec).unwrap();
    assert_valid(&schema("comparison_table.schema.json"), &table.to_json_string().unwrap());
    assert!(table.rows.iter().all(|r| r.k_over_n <= 1.0));
}

#[test]
fn docking_table_matches_schema_and_round_trips() {
    let table = dock(50, 3).unwrap();
    let json = table.to_json_string().unwrap();
    assert_valid(&schema("docking_table.schema.json"), &json);
    assert_eq!(DockingTable::from_json_str(&json).unwrap(), table);

    let csv = table.to_csv_string().unwrap();
    let data: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "source,k_0,k_2,k_4,k_8,k_15");
    assert_eq!(data.len(), 5);
    let back = DockingTable::from_csv_str(&csv).unwrap();
    assert_eq!(back.k_values, table.k_values);
    for (a, b) in back.measured_smmls.iter().zip(&table.measured_smmls) {
        assert!((a - b).abs() <= 5e-7);
    }
    assert!(table.summarize().contains("DOCKING"));
}

#[test]
fn landscape_document_matches_schema() {
    let validator = schema("landscape.schema.json");
    for (n, k) in [(1, 0), (5, 2), (10, 9)] {
        let landscape = Landscape::generate(n, k, DependencyScheme::Adjacent, u64::MAX - 1).unwrap();
        let json = landscape.to_json().unwrap();
        assert_valid(&validator, &json);
        let back = Landscape::from_json(&json).unwrap();
        assert_eq!(back.to_document(), landscape.to_document());
    }
}

#[test]
fn experiment_spec_matches_schema() {
    let validator = schema("experiment_spec.schema.json");
    let text = r#"{"n": 16, "k": 4, "scheme": "random", "algorithm": "both",
                   "budget_T": 100, "iterations": 10, "master_seed": "42", "order_mode": "permuted"}"#;
    assert_valid(&validator, text);
    let spec = ExperimentSpec::from_json(text).unwrap();
    assert_eq!(spec.order_mode, SweepOrder::Permuted);
    assert_valid(&validator, &serde_json::to_string(&spec).unwrap());
}

#[test]
fn files_written_to_disk_agree_across_formats() {
    let table = small_grid();
    let dir = tempfile::tempdir().unwrap();
    let (csv_path, json_path) = (dir.path().join("t.csv"), dir.path().join("t.json"));
    write_csv(&table, &csv_path).unwrap();
    write_json(&table, &json_path).unwrap();
    let from_csv = ComparisonTable::from_csv_str(&std::fs::read_to_string(&csv_path).unwrap()).unwrap();
    let from_json = ComparisonTable::from_json_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    for (a, b) in from_csv.rows.iter().zip(&from_json.rows) {
        assert!((a.final_fitness_smmls - b.final_fitness_smmls).abs() <= 5e-7);
        assert!((a.improvement_immls - b.improvement_immls).abs() <= 5e-7);
    }
    assert!(write_csv(&table, dir.path().join("missing").join("t.csv")).is_err());
}

#[test]
fn non_finite_values_are_refused() {
    let mut table = small_grid();
    table.rows[0].fitness_difference = f64::NAN;
    assert!(table.to_json_string().is_err());
    assert!(table.to_csv_string().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn arbitrary_rows_survive_json(diff in -1.0f64..1.0, fit in 0.0001f64..0.9999, pct in 0.0f64..100.0, seed in any::<u64>()) {
        let mut table = small_grid();
        table.metadata.master_seed = seed;
        table.rows[1].fitness_difference = diff;
        table.rows[1].final_fitness_immls = fit;
        table.rows[1].consumption_pct_immls = pct;
        let json = table.to_json_string().unwrap();
        prop_assert_eq!(ComparisonTable::from_json_str(&json).unwrap(), table.clone());
        let back = ComparisonTable::from_csv_str(&table.to_csv_string().unwrap()).unwrap();
        prop_assert_eq!(back.metadata.master_seed, seed);
        prop_assert!((back.rows[1].fitness_difference - diff).abs() <= 5e-7);
    }
}
