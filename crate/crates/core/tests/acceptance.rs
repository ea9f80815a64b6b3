//! Acceptance suite: runs every criterion of the self-test battery and
//! prints one pass/fail line per criterion. All must pass.

use linlog_core::selftest;

fn run(id: u32) {
    let r = selftest::run_criterion(id);
    println!(
        "[{}] criterion {:2} {:28} ({} ms / budget {} ms): {}",
        if r.passed { "PASS" } else { "FAIL" },
        r.id,
        r.name,
        r.runtime_ms,
        r.budget_ms,
        r.details
    );
    assert!(r.passed, "criterion {} ({}) failed: {}", r.id, r.name, r.details);
}

#[test]
fn criterion_01_fact_integrality() {
    run(1);
}

#[test]
fn criterion_02_product_formula() {
    run(2);
}

#[test]
fn criterion_03_height_sandwich() {
    run(3);
}

#[test]
fn criterion_04_schmidt_duality() {
    run(4);
}

#[test]
fn criterion_05_siegel_certificate() {
    run(5);
}

#[test]
fn criterion_06_multidegree_brute_force() {
    run(6);
}

#[test]
fn criterion_07_obstruction_equality() {
    run(7);
}

#[test]
fn criterion_08_rank_vs_bound() {
    run(8);
}

#[test]
fn criterion_09_interpolation_lemmas() {
    run(9);
}

#[test]
fn criterion_10_optimal_e_shape() {
    run(10);
}

#[test]
fn criterion_11_u0_monotonicity() {
    run(11);
}

#[test]
fn criterion_12_end_to_end_sanity() {
    run(12);
}
