//! The summary.json artifact of every experiment validates against the
//! published schema, and the schema is strict enough to reject malformed
//! summaries.

use std::path::Path;

use serde_json::{json, Value};

use snlab::config::{CommandName, CommandParams, RunConfig};
use snlab::experiments::report::Summary;
use snlab::runner;

fn schema() -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas/summary.schema.json");
    let text = std::fs::read_to_string(path).expect("schema file");
    serde_json::from_str(&text).expect("schema parses")
}

fn validator() -> jsonschema::Validator {
    jsonschema::validator_for(&schema()).expect("schema compiles")
}

/// Small but real run of one command, returned as a summary value.
fn summary_for(command: CommandName, params: Value) -> Value {
    let config = RunConfig {
        seed: 1,
        out_dir: None,
        params: CommandParams::from_json(command, params).unwrap(),
    };
    let report = runner::run(&config).unwrap();
    serde_json::to_value(&report.summary).unwrap()
}

#[test]
fn all_experiment_summaries_validate() {
    let validator = validator();
    let cases = vec![
        (
            CommandName::SimulateField,
            json!({"lambda": 40.0, "n_reps": 50, "dump_points": true}),
        ),
        (
            CommandName::AdditiveLimit,
            json!({"lambda_list": [20.0, 80.0], "n_reps": 300, "t_grid": [0.1, 0.5]}),
        ),
        (
            CommandName::JointLimit,
            json!({"lambda_list": [20.0, 80.0], "n_reps": 300}),
        ),
        (
            CommandName::ExtremalLimit,
            json!({"lambda": 200.0, "n_reps": 400, "ks_tol": 0.2}),
        ),
        (
            CommandName::GaussianClt,
            json!({"lambda": 30.0, "n_reps": 500}),
        ),
        (
            CommandName::SirTail,
            json!({"lambda_list": [10.0, 40.0], "n_reps": 400, "oracle_draws": 4000}),
        ),
        (
            CommandName::SinrChain,
            json!({"lambda": 50.0, "n_reps": 400, "oracle_draws": 4000, "c_list": [0.1, 1e-4]}),
        ),
        (
            CommandName::Percolation,
            json!({"lattice_size": 8, "n_reps": 20, "lambda_list": [1.0, 8.0]}),
        ),
    ];
    for (command, params) in cases {
        let summary = summary_for(command, params);
        let errors: Vec<String> = validator
            .iter_errors(&summary)
            .map(|e| e.to_string())
            .collect();
        assert!(errors.is_empty(), "{command}: {errors:?}");
    }
}

#[test]
fn schema_rejects_malformed_summaries() {
    let validator = validator();
    let good = summary_for(
        CommandName::GaussianClt,
        json!({"lambda": 20.0, "n_reps": 300}),
    );
    assert!(validator.is_valid(&good));

    let mut missing_pass = good.clone();
    missing_pass.as_object_mut().unwrap().remove("pass");
    assert!(!validator.is_valid(&missing_pass));

    let mut bad_experiment = good.clone();
    bad_experiment["experiment"] = json!("not-an-experiment");
    assert!(!validator.is_valid(&bad_experiment));

    let mut bad_comparison = good.clone();
    bad_comparison["checks"][0]["comparison"] = json!("less_than");
    assert!(!validator.is_valid(&bad_comparison));

    let mut stray_field = good.clone();
    stray_field["runtime_s"] = json!(1.5);
    assert!(!validator.is_valid(&stray_field));

    let mut nonnumeric_observed = good;
    nonnumeric_observed["checks"][0]["observed"] = json!("0.3");
    assert!(!validator.is_valid(&nonnumeric_observed));
}

#[test]
fn summary_round_trips_through_serde() {
    let value = summary_for(
        CommandName::SimulateField,
        json!({"lambda": 20.0, "n_reps": 40}),
    );
    let parsed: Summary = serde_json::from_value(value.clone()).unwrap();
    assert_eq!(serde_json::to_value(&parsed).unwrap(), value);
}
