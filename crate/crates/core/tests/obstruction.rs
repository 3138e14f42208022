//! Lift systems found by the block-model searches are re-checked here on
//! explicit matrices over `GF(q)`: each lift must be an isometry of
//! determinant one with square spinor norm, and the generated matrix group
//! must meet the torus only in `±I`, i.e. have order `|S|·|⟨lifts⟩ ∩ {±I}|`.

use std::collections::{HashSet, VecDeque};

use torus_split::signedperm::ortho::{det, identity, mat_mul, FMatrix};
use torus_split::signedperm::{
    complement_lifts, obstruction_check, obstruction_lifts, obstruction_report, CycleType,
    LemmaCase, LiftMatrices, SpinorClass,
};
use torus_split::{Error, Exec};

fn closure(lifts: &LiftMatrices, cap: usize) -> Vec<FMatrix> {
    let f = lifts.space.field();
    let id = identity(lifts.space.dim());
    let mut seen: HashSet<FMatrix> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    let mut out = Vec::new();
    while let Some(x) = queue.pop_front() {
        for g in &lifts.matrices {
            let y = mat_mul(f, &x, g);
            if seen.insert(y.clone()) {
                assert!(seen.len() <= cap, "matrix closure exceeded {cap}");
                queue.push_back(y);
            }
        }
        out.push(x);
    }
    out
}

/// Independent validity check of a lift system.
fn lifts_are_valid(lifts: &LiftMatrices) -> bool {
    let space = &lifts.space;
    let f = space.field();
    let d = space.dim();
    for m in &lifts.matrices {
        if !space.preserves(m) || det(f, m) != f.one() {
            return false;
        }
        if space.spinor_norm(m).unwrap().0 != SpinorClass::Square {
            return false;
        }
    }
    let group = closure(lifts, 50_000);
    let mut minus = identity(d);
    for (i, row) in minus.iter_mut().enumerate() {
        row[i] = f.from_int(-1);
    }
    let scalars = group
        .iter()
        .filter(|g| **g == identity(d) || **g == minus)
        .count();
    group.len() == lifts.subgroup_order * scalars
}

fn ct(parts: &[i64]) -> CycleType {
    CycleType::from_signed(parts).unwrap()
}

#[test]
fn lemma_shapes_are_detected() {
    assert_eq!(LemmaCase::detect(&ct(&[-2, 1, 1, 2])), Some(LemmaCase::M4));
    assert_eq!(
        LemmaCase::detect(&ct(&[-2, -1, -1, 2])),
        Some(LemmaCase::M4)
    );
    assert_eq!(LemmaCase::detect(&ct(&[1, 1, -2])), Some(LemmaCase::M3));
    assert_eq!(LemmaCase::detect(&ct(&[-1, -1, -2])), Some(LemmaCase::M3));
    assert_eq!(LemmaCase::detect(&ct(&[-2, 2])), Some(LemmaCase::M2));
    assert_eq!(LemmaCase::detect(&ct(&[-3, 1])), None);
}

#[test]
fn obstruction_answers_agree_with_matrix_oracle() {
    let cases: &[(&[i64], u64, LemmaCase)] = &[
        (&[-2, 1, 1, 2], 3, LemmaCase::M4),
        (&[-2, 1, 1, 2], 5, LemmaCase::M4),
        (&[-2, -1, -1, 2], 3, LemmaCase::M4),
        (&[1, 1, -2], 3, LemmaCase::M3),
        (&[1, 1, -2], 7, LemmaCase::M3),
        (&[-1, -1, -2], 3, LemmaCase::M3),
        (&[-2, 2], 3, LemmaCase::M2),
        (&[-2, 2], 5, LemmaCase::M2),
    ];
    for &(parts, q, case) in cases {
        let c = ct(parts);
        let obstruction = obstruction_check(&c, q, case).unwrap();
        match obstruction_lifts(&c, q, case, Exec::Sequential).unwrap() {
            Some(lifts) => {
                assert!(
                    lifts_are_valid(&lifts),
                    "{c} q={q}: witness fails the matrix check"
                );
                assert!(!obstruction, "{c} q={q}");
            }
            None => assert!(obstruction, "{c} q={q}"),
        }
    }
}

#[test]
fn no_obstruction_when_q_is_1_mod_4() {
    for (parts, case) in [
        (&[-2i64, 1, 1, 2][..], LemmaCase::M4),
        (&[1, 1, -2], LemmaCase::M3),
        (&[-2, 2], LemmaCase::M2),
    ] {
        assert!(!obstruction_check(&ct(parts), 5, case).unwrap());
    }
}

#[test]
fn obstruction_rejects_unmet_hypotheses() {
    assert!(matches!(
        obstruction_check(&ct(&[-3, 1]), 3, LemmaCase::M2),
        Err(Error::HypothesesNotMet(_))
    ));
    assert!(obstruction_check(&ct(&[-4, 4]), 3, LemmaCase::M2).is_err());
    assert!(obstruction_check(&ct(&[-2, 2]), 11, LemmaCase::M2).is_err());
    assert!(obstruction_check(&ct(&[-2, 2]), 9, LemmaCase::M2).is_err());
}

#[test]
fn report_records_relation_and_spinor_levels() {
    let r = obstruction_report(&ct(&[1, 1, -2]), 3, LemmaCase::M3, Exec::Sequential).unwrap();
    assert_eq!(r.generators, vec!["chi1", "varpi3tau1"]);
    assert_eq!(r.torus_order, 2 * 2 * 10);
    assert!(r.relations_solvable || !r.omega_solvable);
    assert_eq!(r.obstruction, !r.omega_solvable);
}

#[test]
fn complements_found_pass_the_matrix_oracle() {
    for (parts, q) in [
        (&[-2i64, 1, 1][..], 3u64),
        (&[-1, 1, 1, 1], 3),
        (&[-1, 2, 1], 5),
        (&[-3, 1], 3),
        (&[-2, -1, -1], 3),
        (&[-1, -1, -1, 1], 7),
        (&[-2, 2], 3),
    ] {
        let c = ct(parts);
        let lifts = complement_lifts(&c, q, Exec::default()).unwrap();
        let lifts = lifts.unwrap_or_else(|| panic!("{c} q={q}: no complement"));
        assert!(lifts_are_valid(&lifts), "{c} q={q}");
    }
}
