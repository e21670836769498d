use zomat_core::extremal::{ex_branch_and_bound, ex_exhaustive, DEFAULT_BUDGET};
use zomat_core::{ex_exact, ex_lower_random, ExtremalCertificate, Matrix01, Pattern, ProofMode};

fn corpus() -> Vec<Pattern> {
    [
        "1", "11", "1\n1", "10\n01", "01\n10", "11\n11", "11\n10", "111", "101\n010", "101\n011\n110",
        "100\n010\n001", "110\n001",
    ]
    .iter()
    .map(|s| Pattern::parse(s).unwrap())
    .collect()
}

#[test]
fn modes_agree_for_small_n() {
    for p in corpus() {
        for n in 1..=3 {
            let ex = ex_exhaustive(n, &p, DEFAULT_BUDGET).unwrap();
            let bb = ex_branch_and_bound(n, &p, DEFAULT_BUDGET).unwrap();
            assert_eq!(ex.value, bb.value, "pattern {p:?} at n = {n}");
            assert_eq!(ex.mode, ProofMode::Exhaustive);
            assert_eq!(bb.mode, ProofMode::BranchAndBound);
            assert!(ex.value <= n * n);
        }
    }
}

#[test]
fn two_nonempty_rows_allow_a_full_row() {
    for p in corpus() {
        let nonempty = (0..p.rows()).filter(|&u| p.matrix().row_weight(u) > 0).count();
        if nonempty < 2 {
            continue;
        }
        for n in 1..=4 {
            let full_row = Matrix01::from_fn(n, n, |i, _| i == 0);
            assert!(zomat_core::find_embedding(&full_row, &p).unwrap().is_none());
            assert!(ex_exact(n, &p, DEFAULT_BUDGET).unwrap().value >= n);
        }
    }
}

#[test]
fn single_one_pattern_is_zero() {
    assert_eq!(ex_exact(5, &Pattern::parse("1").unwrap(), DEFAULT_BUDGET).unwrap().value, 0);
}

#[test]
fn certificates_revalidate_after_round_trip() {
    for p in corpus().into_iter().take(6) {
        let cert = ex_exact(4, &p, DEFAULT_BUDGET).unwrap();
        let back = ExtremalCertificate::from_text(&cert.to_text()).unwrap();
        assert_eq!(back.value, cert.value);
        assert_eq!(back.witness, cert.witness);
        back.validate().unwrap();
    }
}

#[test]
fn random_lower_bound_replays() {
    let p = Pattern::parse("11\n11").unwrap();
    let a = ex_lower_random(16, &p, 0.4, 50, 7).unwrap();
    let b = ex_lower_random(16, &p, 0.4, 50, 7).unwrap();
    assert_eq!(a.witness, b.witness);
    assert_eq!(a.mode, ProofMode::LowerBoundOnly);
    a.validate().unwrap();
    assert!(a.value >= ex_exact(4, &p, DEFAULT_BUDGET).unwrap().value);
}
