//! Several-generation 2nd-order products against the engine, using matrix
//! units so that the two factor orders give different answers.

use ncg_hodge::linalg::{c64, matrix_unit, ComplexMatrix, Tolerance};
use ncg_hodge::sm::{second_order_closed, sm_build, SmDiracParams};
use ncg_hodge::triple::second_order;

#[derive(Clone, Copy)]
enum Slot {
    Alpha(usize, usize),
    Beta(usize, usize),
    Delta(usize, usize),
}

fn e(i: usize, j: usize) -> ComplexMatrix {
    matrix_unit(2, i, j)
}

fn set(p: &mut SmDiracParams, slot: Slot, m: ComplexMatrix) {
    match slot {
        Slot::Alpha(i, j) => p.set_alpha(i, j, m),
        Slot::Beta(i, j) => p.set_beta(i, j, m),
        Slot::Delta(i, j) => p.set_delta(i, j, m),
    }
    .unwrap();
}

fn check(entries: &[(Slot, ComplexMatrix)], expected: bool) {
    let tol = Tolerance::default();
    let mut p = SmDiracParams::zero(2).unwrap();
    for (slot, m) in entries {
        set(&mut p, *slot, m.clone());
    }
    let t = sm_build(&p, &tol).unwrap();
    let engine = second_order(t.triple(), &tol).unwrap();
    let closed = second_order_closed(&p, &tol).unwrap();
    assert_eq!(
        engine.holds, expected,
        "engine residual {}",
        engine.residual
    );
    assert_eq!(closed, expected);
}

use Slot::*;

#[test]
fn delta21_alpha_order() {
    check(&[(Delta(2, 1), e(0, 1)), (Alpha(1, 3), e(0, 0))], true);
    check(&[(Delta(2, 1), e(0, 1)), (Alpha(1, 3), e(1, 1))], false);
    check(&[(Delta(2, 1), e(0, 1)), (Alpha(1, 4), e(1, 0))], false);
    check(&[(Delta(2, 1), e(0, 1)), (Alpha(1, 4), e(0, 1))], true);
    check(&[(Delta(2, 1), e(0, 1)), (Alpha(2, 3), e(0, 0))], true);
}

#[test]
fn delta21_delta_order() {
    check(&[(Delta(2, 1), e(0, 1)), (Delta(1, 2), e(0, 0))], true);
    check(&[(Delta(2, 1), e(0, 1)), (Delta(1, 2), e(1, 1))], false);
    check(&[(Delta(2, 1), e(0, 1)), (Delta(1, 3), e(1, 0))], false);
}

#[test]
fn delta_beta_order() {
    check(&[(Delta(2, 2), e(0, 1)), (Beta(1, 3), e(0, 0))], true);
    check(&[(Delta(2, 2), e(0, 1)), (Beta(1, 3), e(1, 1))], false);
    check(&[(Delta(1, 2), e(0, 1)), (Beta(1, 4), e(1, 1))], false);
    check(&[(Delta(1, 2), e(0, 1)), (Beta(1, 4), e(0, 0))], true);
    check(&[(Delta(1, 2), e(0, 1)), (Beta(2, 3), e(0, 0))], true);
    check(&[(Delta(2, 1), e(0, 1)), (Beta(1, 3), e(1, 1))], true);
}

#[test]
fn conjugation_is_entrywise() {
    let i = c64(0.0, 1.0);
    check(&[(Delta(2, 1), e(0, 0) * i), (Alpha(1, 3), e(0, 0))], false);
    check(
        &[(Delta(2, 1), e(0, 1) * i), (Alpha(1, 3), e(0, 0) * i)],
        true,
    );
}
