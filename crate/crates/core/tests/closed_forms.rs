use zhelo_core::context::Context;
use zhelo_core::monoid::check_closed_forms;

/// Orthogonal, simple and triple bonds satisfy the rank-two closed forms as
/// written; the double bond holds with the opposite sign.
#[test]
fn rank_two_closed_forms_by_bond() {
    for tag in ["A2", "A3", "B2", "B3", "C3", "D4", "F4", "G2"] {
        let ctx = Context::from_tag(tag).unwrap();
        for g in ctx.generators().unwrap() {
            let forms = check_closed_forms(&ctx.rd, &g.invariant.big_p);
            assert!(!forms.is_empty());
            for f in forms {
                // P is constant for m = 1, so both sides vanish and either sign fits
                let expected = if f.m == 2 && g.m > 1 { -1 } else { 1 };
                assert_eq!(
                    f.observed_sign,
                    expected,
                    "{tag} generator m={} pair ({}, {}) bond {}",
                    g.m,
                    f.i + 1,
                    f.j + 1,
                    f.m
                );
            }
        }
    }
}
