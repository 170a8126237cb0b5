//! Worked examples replayed in canonical syntax.

mod common;

use common::goldens;

#[test]
fn redex_example_step() {
    goldens::redex_example_step().unwrap();
}

#[test]
fn intro_example_most_general_step_renames_clashing_rule_variables() {
    goldens::intro_clashing_variables().unwrap();
}

#[test]
fn intro_example_legacy_steps() {
    goldens::intro_legacy_steps().unwrap();
}

#[test]
fn intro_example_reducts_are_not_equivalent() {
    goldens::intro_reducts_not_equivalent().unwrap();
}

#[test]
fn embedding_example_most_general_reduct_subsumes_legacy_reducts() {
    goldens::embedding_subsumes_legacy_reducts().unwrap();
}

#[test]
fn second_intro_example_needs_equivalence_for_legacy_steps() {
    goldens::second_intro_needs_equivalence().unwrap();
}

#[test]
fn variable_tracing_example() {
    goldens::variable_tracing().unwrap();
}

#[test]
fn ext_and_rmv_example() {
    goldens::ext_and_rmv().unwrap();
}

#[test]
fn left_value_free_example() {
    goldens::left_value_free().unwrap();
}

#[test]
fn golden_files_round_trip() {
    goldens::golden_files_round_trip().unwrap();
}
