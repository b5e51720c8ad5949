mod common;

use common::props;
use common::{small_matrix, two_stage};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn differential_squares_to_zero(s in two_stage()) {
        props::differential_squares_to_zero(&s)?;
    }

    #[test]
    fn boundary_of_boundary_vanishes(s in two_stage()) {
        props::boundary_of_boundary_vanishes(&s)?;
    }

    #[test]
    fn koszul_double_swap(s in two_stage(), picks in prop::collection::vec(0usize..5, 6)) {
        props::koszul_double_swap(&s, &picks)?;
    }

    #[test]
    fn rank_nullity(rows in small_matrix()) {
        props::rank_nullity(&rows)?;
    }

    #[test]
    fn rref_is_idempotent(rows in small_matrix()) {
        props::rref_is_idempotent(&rows)?;
    }

    #[test]
    fn dense_and_sparse_elimination_agree(rows in small_matrix()) {
        props::dense_and_sparse_elimination_agree(&rows)?;
    }

    #[test]
    fn kunneth(a in two_stage(), b in two_stage()) {
        props::kunneth(&a, &b)?;
    }

    #[test]
    fn builder_gates(s in two_stage(), kill in prop::collection::vec(any::<bool>(), 3), pick in 0usize..8, c in -3i64..=3) {
        props::builder_gates(&s, &kill, pick, c, false)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn classify_reports_respect_the_chain(s in two_stage(), kill in prop::collection::vec(any::<bool>(), 3)) {
        props::classify_reports_respect_the_chain(&s, &kill)?;
    }
}
