//! Property tests for the arithmetic and serialization invariants.

use proptest::prelude::*;

use sacfactor::certify::{recompose, replay, Certificate};
use sacfactor::engine::{apply_step, decide, reducing_moves, MorphismPair, Outcome};
use sacfactor::poly2::{Monomial, Poly2};
use sacfactor::ring::{CoeffRing, Degree, Rat, QQ};
use sacfactor::text::{parse_poly, render_poly};
use sacfactor::tower::{rational_roots, FieldCtx, Mode};
use sacfactor::unipoly::UniPoly;

fn arb_rat() -> impl Strategy<Value = Rat> {
    (-30i64..=30, 1i64..=6).prop_map(|(n, d)| Rat::new(n.into(), d.into()))
}

fn arb_poly(max_deg: u32, max_terms: usize) -> impl Strategy<Value = Poly2<Rat>> {
    proptest::collection::vec((0..=max_deg, 0..=max_deg, arb_rat()), 0..=max_terms).prop_map(
        move |terms| {
            Poly2::from_terms(
                &QQ,
                terms.into_iter().map(|(ex, mut ey, c)| {
                    if ex + ey > max_deg {
                        ey = max_deg - ex;
                    }
                    (Monomial::new(ex, ey), c)
                }),
            )
        },
    )
}

fn arb_unipoly(max_deg: usize) -> impl Strategy<Value = UniPoly<Rat>> {
    proptest::collection::vec(arb_rat(), 0..=max_deg + 1)
        .prop_map(|coeffs| UniPoly::from_coeffs(&QQ, coeffs))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn division_identity_and_reduced_remainder(
        p in arb_poly(6, 8),
        d in arb_poly(3, 4),
    ) {
        prop_assume!(!d.is_zero());
        let (q, r) = p.divide_by(&QQ, &d).unwrap();
        prop_assert_eq!(q.mul(&QQ, &d).add(&QQ, &r), p);
        let dlm = d.leading_monomial().unwrap();
        prop_assert!(r.terms().all(|(m, _)| !dlm.divides(m)));
    }

    #[test]
    fn zero_remainder_characterizes_divisibility(
        q in arb_poly(3, 4),
        d in arb_poly(3, 4),
    ) {
        prop_assume!(!d.is_zero());
        let p = q.mul(&QQ, &d);
        let (got_q, got_r) = p.divide_by(&QQ, &d).unwrap();
        prop_assert!(got_r.is_zero());
        prop_assert_eq!(got_q, q);
    }

    #[test]
    fn identity_substitution(p in arb_poly(6, 8)) {
        let x = Poly2::var_x(&QQ);
        let y = Poly2::var_y(&QQ);
        prop_assert_eq!(p.substitute(&QQ, &x, &y), p.clone());
    }

    #[test]
    fn degree_and_leading_form_are_multiplicative(
        p in arb_poly(5, 6),
        q in arb_poly(5, 6),
    ) {
        prop_assume!(!p.is_zero() && !q.is_zero());
        let prod = p.mul(&QQ, &q);
        prop_assert_eq!(prod.total_degree(), p.total_degree() + q.total_degree());
        let lf = prod.leading_form().unwrap();
        let expected = p
            .leading_form()
            .unwrap()
            .mul(&QQ, &q.leading_form().unwrap());
        prop_assert_eq!(lf, expected);
    }

    #[test]
    fn canonical_form_is_idempotent(p in arb_poly(6, 10)) {
        let rebuilt = Poly2::from_terms(&QQ, p.terms().map(|(m, c)| (*m, c.clone())));
        prop_assert_eq!(&rebuilt, &p);
        prop_assert_eq!(rebuilt.renormalize(&QQ), p);
    }

    #[test]
    fn parse_render_identity(p in arb_poly(12, 20)) {
        let rendered = render_poly(&p);
        prop_assert_eq!(parse_poly(&rendered).unwrap(), p);
    }

    #[test]
    fn render_is_injective(p in arb_poly(5, 6), q in arb_poly(5, 6)) {
        if p != q {
            prop_assert_ne!(render_poly(&p), render_poly(&q));
        }
    }

    #[test]
    fn unipoly_division_identity(f in arb_unipoly(6), d in arb_unipoly(3)) {
        prop_assume!(!d.is_zero());
        let (q, r) = f.div_rem(&QQ, &d).unwrap();
        prop_assert_eq!(q.mul(&QQ, &d).add(&QQ, &r), f);
        prop_assert!(r.deg() < d.deg() || r.is_zero());
    }

    #[test]
    fn planted_rational_roots_are_found(
        roots in proptest::collection::btree_set((-9i64..=9, 1i64..=4), 1..=3),
        with_irreducible in any::<bool>(),
    ) {
        let planted: Vec<Rat> = roots
            .iter()
            .map(|&(p, q)| Rat::new(p.into(), q.into()))
            .collect();
        let mut f = UniPoly::constant(&QQ, QQ.one());
        for r in &planted {
            // q*t - p vanishes at p/q
            let factor = UniPoly::from_coeffs(&QQ, vec![-r.clone(), QQ.one()]);
            f = f.mul(&QQ, &factor);
        }
        if with_irreducible {
            let sq = UniPoly::from_coeffs(&QQ, vec![QQ.one(), QQ.zero(), QQ.one()]);
            f = f.mul(&QQ, &sq);
        }
        let mut expected: Vec<Rat> = planted.into_iter().collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        expected.sort();
        prop_assert_eq!(rational_roots(&f), expected);
    }

    #[test]
    fn moves_replay_through_apply_step(
        u in arb_poly(3, 4),
        v in arb_poly(3, 4),
    ) {
        prop_assume!(!u.is_constant() && !v.is_constant());
        let pair = MorphismPair::from_q(FieldCtx::rational(), &u, &v).unwrap();
        for (step, successor) in reducing_moves(&pair, Mode::Rational).unwrap() {
            let applied = apply_step(&pair, &step).unwrap();
            prop_assert_eq!(&applied.u, &successor.u);
            prop_assert_eq!(&applied.v, &successor.v);
        }
    }
}

#[test]
fn degree_of_zero_is_absorbing() {
    assert_eq!(Poly2::<Rat>::zero().total_degree(), Degree::NegInf);
    assert_eq!(Degree::NegInf + Degree::Fin(7), Degree::NegInf);
}

// ----- certificate tamper detection ------------------------------------------------

fn yes_certificate(u: &str, v: &str) -> Certificate {
    let pu = parse_poly(u).unwrap();
    let pv = parse_poly(v).unwrap();
    let d = decide(&pu, &pv, Mode::Closure, None).unwrap();
    assert_eq!(d.outcome, Outcome::Yes);
    Certificate::from_decision(&pu, &pv, Mode::Closure, &d)
}

fn verifies(cert: &Certificate) -> bool {
    matches!(replay(cert), Ok(true)) && matches!(recompose(cert), Ok(true))
}

#[test]
fn single_field_mutations_break_verification() {
    let certs = [
        yes_certificate("x", "y x^2 + y"),
        yes_certificate("x y + 1", "x^2 y + x"),
        yes_certificate("x + y^2", "y"),
        yes_certificate("x y - 2x + 1", "x"),
    ];
    for cert in &certs {
        assert!(verifies(cert));
        for i in 0..cert.trace.len() {
            // shift each numeric parameter, flip sides, drop the step
            let mut m = cert.clone();
            if let Some(a) = &cert.trace[i].a {
                m.trace[i].a = Some(format!("({}) + 1", a));
                assert!(!verifies(&m), "a-shift must break step {}", i);
            }
            let mut m = cert.clone();
            if let Some(b) = &cert.trace[i].b {
                m.trace[i].b = Some(format!("({}) + 1", b));
                assert!(!verifies(&m), "b-shift must break step {}", i);
            }
            // A mutation must change the mathematical content: gentle
            // q-shifts can produce a different but equally valid
            // reduction, which the verifier rightly accepts, so the
            // tamper here jumps the degree.
            let mut m = cert.clone();
            if let Some(q) = &cert.trace[i].q {
                m.trace[i].q = Some(format!("({}) + t^7", q));
                assert!(!verifies(&m), "q-tamper must break step {}", i);
            }
            let mut m = cert.clone();
            if let Some(side) = cert.trace[i].side {
                use sacfactor::certify::StepSide;
                m.trace[i].side = Some(match side {
                    StepSide::U => StepSide::V,
                    StepSide::V => StepSide::U,
                });
                assert!(!verifies(&m), "side flip must break step {}", i);
            }
            let mut m = cert.clone();
            m.trace.remove(i);
            assert!(!verifies(&m), "dropping step {} must break the chain", i);
        }
    }
}

#[test]
fn serialization_round_trip_on_varied_outcomes() {
    for (u, v, mode) in [
        ("x", "y", Mode::Closure),
        ("x", "y x^2 + y", Mode::Rational),
        ("x", "y x^2 + y", Mode::Closure),
        ("x y + 1", "x^2 y + x", Mode::Closure),
    ] {
        let pu = parse_poly(u).unwrap();
        let pv = parse_poly(v).unwrap();
        let d = decide(&pu, &pv, mode, None).unwrap();
        let cert = Certificate::from_decision(&pu, &pv, mode, &d);
        let decoded = Certificate::decode(&cert.encode()).unwrap();
        assert_eq!(decoded, cert);
        assert_eq!(decoded.encode(), cert.encode());
    }
}
