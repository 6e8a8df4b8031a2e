//! One test per verification criterion, each printing a single PASS/FAIL
//! line.

use zonobal_verify::run_serial;

fn check(id: u32) {
    let r = run_serial(id);
    assert!(r.passed, "{}", r.line());
}

#[test]
fn criterion_01_strip_tail_bound_grid() {
    check(1);
}

#[test]
fn criterion_02_section_measure_sweep() {
    check(2);
}

#[test]
fn criterion_03_cube_measure_exactness() {
    check(3);
}

#[test]
fn criterion_04_lewis_weights() {
    check(4);
}

#[test]
fn criterion_05_normalization_sandwich() {
    check(5);
}

#[test]
fn criterion_06_partial_coloring_contract() {
    check(6);
}

#[test]
fn criterion_07_hadamard_obstruction() {
    check(7);
}

#[test]
fn criterion_08_pipeline_end_to_end() {
    check(8);
}

#[test]
fn criterion_09_gram_schmidt_walk() {
    check(9);
}

#[test]
fn criterion_10_lsv_reduction() {
    check(10);
}

#[test]
fn criterion_11_two_way_split_existence() {
    check(11);
}

#[test]
fn criterion_12_halving_recursion() {
    check(12);
}

#[test]
fn criterion_13_oracle_self_consistency() {
    check(13);
}
