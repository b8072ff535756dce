use proptest::prelude::*;
use venlab::parse::parse_expr;
use venlab::poly::Images;
use venlab::stable::{build_coeff_table, solve_moments, QSpec};
use venlab::{Coeff, Derivation, Monomial, MultiPoly, PolyMap, Var};

const YZU: [Var; 3] = [Var::Y, Var::Z, Var::U];

fn coeff() -> impl Strategy<Value = Coeff> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Coeff::new(n, d))
}

fn monomial(laurent: bool) -> impl Strategy<Value = Monomial> {
    let xr = if laurent { -2i32..=2 } else { 0i32..=2 };
    (xr, 0u32..=2, 0u32..=2, 0u32..=2, 0u32..=1, 0u32..=1)
        .prop_map(|(x, y, z, u, t, c)| Monomial::new(x, y, z, u, t, c))
}

fn poly_with(laurent: bool, max_terms: usize) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((monomial(laurent), coeff()), 0..=max_terms).prop_map(MultiPoly::from_terms)
}

fn poly() -> impl Strategy<Value = MultiPoly> {
    poly_with(true, 5)
}

/// Images for `y, z, u`, integral in x so that composites stay small.
fn map3() -> impl Strategy<Value = PolyMap> {
    (poly_with(false, 3), poly_with(false, 3), poly_with(false, 3))
        .prop_map(|(a, b, c)| PolyMap::from_images([(Var::Y, a), (Var::Z, b), (Var::U, c)]))
}

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cases(1000))]

    #[test]
    fn ring_axioms(f in poly(), g in poly(), h in poly()) {
        prop_assert_eq!(&f + &g, &g + &f);
        prop_assert_eq!(&f * &g, &g * &f);
        prop_assert_eq!(&(&f + &g) + &h, &f + &(&g + &h));
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
        prop_assert_eq!(&f * &MultiPoly::one(), f.clone());
        prop_assert!((&f + &(-f.clone())).is_zero());
        prop_assert_eq!(&f + &MultiPoly::zero(), f.clone());
    }

    #[test]
    fn leibniz(f in poly(), g in poly(), dy in poly(), dz in poly(), du in poly(), dt in poly()) {
        let d = Derivation::from_images([(Var::Y, dy), (Var::Z, dz), (Var::U, du), (Var::T, dt)]);
        prop_assert_eq!(d.apply(&(&f * &g)), &(&d.apply(&f) * &g) + &(&f * &d.apply(&g)));
        prop_assert_eq!(d.apply(&(&f + &g)), &d.apply(&f) + &d.apply(&g));
    }

    #[test]
    fn substitution_is_a_homomorphism(f in poly(), g in poly(), a in poly(), b in poly()) {
        let mut im = Images::new();
        im.insert(Var::Y, a);
        im.insert(Var::U, b);
        im.insert(Var::X, MultiPoly::var(Var::X).scale(&Coeff::new(-2, 3)));
        let s = |p: &MultiPoly| p.substitute(&im).unwrap();
        prop_assert_eq!(s(&(&f + &g)), &s(&f) + &s(&g));
        prop_assert_eq!(s(&(&f * &g)), &s(&f) * &s(&g));
        prop_assert_eq!(s(&MultiPoly::one()), MultiPoly::one());
    }

    #[test]
    fn valuation_is_additive(f in poly(), g in poly()) {
        prop_assume!(!f.is_zero() && !g.is_zero());
        let (vf, vg) = (f.x_valuation().unwrap(), g.x_valuation().unwrap());
        prop_assert_eq!((&f * &g).x_valuation(), Some(vf + vg));
        if let Some(vs) = (&f + &g).x_valuation() {
            prop_assert!(vs >= vf.min(vg));
        }
    }

    #[test]
    fn jacobian_chain_rule(f in map3(), g in map3()) {
        let h = f.compose(&g).unwrap();
        let lhs = h.jacobian_det(&YZU);
        let rhs = &g.apply(&f.jacobian_det(&YZU)).unwrap() * &g.jacobian_det(&YZU);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn stable_table_invariants(
        terms in prop::collection::btree_map((0u32..=3, 0u32..=3, 0u32..=2), coeff(), 1..=3)
    ) {
        let terms: Vec<_> = terms
            .into_iter()
            .filter(|((a, b, _), c)| a + b > 0 && !c.is_zero())
            .collect();
        prop_assume!(!terms.is_empty());
        let q = QSpec::new(terms).unwrap();
        let table = solve_moments(build_coeff_table(&q).unwrap()).unwrap();
        for (name, r) in table.quick_check_residuals().into_iter().chain(table.moment_residuals()) {
            prop_assert!(r.is_zero(), "{} = {}", name, r);
        }
    }
}

proptest! {
    #![proptest_config(cases(500))]

    #[test]
    fn render_parse_round_trip(f in poly()) {
        prop_assert_eq!(parse_expr(&f.to_string()).unwrap(), f);
    }
}
