//! Randomized algebraic laws of the kernel. Every comparison is exact.

mod support;

use proptest::prelude::*;
use support::exprs::*;

proptest! {
    #![proptest_config(config())]

    #[test]
    fn field_axioms_hold(x in node(), y in node(), z in node()) {
        field_axioms(&x, &y, &z)?;
    }

    #[test]
    fn radicals_square_to_radicands(p in radicand(), x in node(), y in node()) {
        radical_contract(&p, &x, &y)?;
    }

    #[test]
    fn product_and_quotient_rules_hold(x in node(), y in node(), s in 0usize..3) {
        product_and_quotient_rules(&x, &y, s)?;
    }

    #[test]
    fn derivatives_match_finite_differences(x in node(), s in 0usize..3, pt in [1u32..9, 1u32..9, 1u32..9]) {
        derivative_matches_finite_difference(&x, s, pt)?;
    }

    #[test]
    fn substitution_commutes_with_arithmetic(x in node(), y in node(), vals in [1i64..7, 1i64..7], partial in any::<bool>()) {
        substitution_commutes(&x, &y, vals, partial)?;
    }

    #[test]
    fn rendering_round_trips(x in node()) {
        parse_render_round_trip(&x)?;
    }
}
