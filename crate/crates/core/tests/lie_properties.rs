use std::sync::Arc;

use engelkit::hall_lie::{CoefficientRing, LieContext, LieElement};
use num_bigint::BigInt;
use proptest::prelude::*;

fn ctx(ring: CoefficientRing) -> Arc<LieContext> {
    LieContext::new(3, 6, ring).unwrap()
}

/// Random combination of basis elements of weight at most 2.
fn element(ctx: &Arc<LieContext>, coeffs: &[i64]) -> LieElement {
    let n = ctx.hall().layer(1).len() + ctx.hall().layer(2).len();
    ctx.from_coords(coeffs.iter().take(n).enumerate().map(|(i, &c)| (i, BigInt::from(c))))
}

fn coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, 6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bracket_is_alternating(u in coeffs(), v in coeffs()) {
        for ring in [CoefficientRing::Integers, CoefficientRing::Prime(2), CoefficientRing::Prime(3)] {
            let c = ctx(ring);
            let (x, y) = (element(&c, &u), element(&c, &v));
            prop_assert!(x.bracket(&x).unwrap().is_zero());
            prop_assert_eq!(x.bracket(&y).unwrap(), y.bracket(&x).unwrap().neg());
        }
    }

    #[test]
    fn jacobi_identity(u in coeffs(), v in coeffs(), w in coeffs()) {
        let c = ctx(CoefficientRing::Integers);
        let (x, y, z) = (element(&c, &u), element(&c, &v), element(&c, &w));
        let j = |a: &LieElement, b: &LieElement, d: &LieElement| a.bracket(&b.bracket(d).unwrap()).unwrap();
        let sum = j(&x, &y, &z).add(&j(&y, &z, &x)).unwrap().add(&j(&z, &x, &y)).unwrap();
        prop_assert!(sum.is_zero());
    }

    #[test]
    fn bracket_is_bilinear(u in coeffs(), v in coeffs(), w in coeffs(), k in -4i64..=4) {
        let c = ctx(CoefficientRing::Integers);
        let (x, y, z) = (element(&c, &u), element(&c, &v), element(&c, &w));
        let lhs = x.add(&y.scale(&BigInt::from(k))).unwrap().bracket(&z).unwrap();
        let rhs = x.bracket(&z).unwrap().add(&y.bracket(&z).unwrap().scale(&BigInt::from(k))).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_adds_degrees(u in coeffs(), v in coeffs()) {
        let c = ctx(CoefficientRing::Integers);
        let (x, y) = (element(&c, &u), element(&c, &v));
        let b = x.bracket(&y).unwrap();
        let max = x.degrees().iter().max().copied().unwrap_or(0) + y.degrees().iter().max().copied().unwrap_or(0);
        prop_assert!(b.degrees().iter().all(|&d| (2..=max).contains(&d)));
    }
}
