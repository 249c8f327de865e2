//! Property suites for the library invariants, checked against independent
//! oracles wherever one exists.

use npival::numeric::rat;
use npival::*;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn exp_rat(n: i64, d: i64) -> ExtendedExponent {
    ExtendedExponent::Rational(rat(n, d))
}

/// Interior exponent q/p with 2 <= p <= 7, p < q <= 30, reduced.
fn arb_interior() -> impl Strategy<Value = (i64, i64)> {
    (2i64..=7, 2i64..=30)
        .prop_filter_map("coprime and above the denominator", |(p, q)| {
            if q > p && q.gcd(&p) == 1 {
                Some((q, p))
            } else {
                None
            }
        })
}

#[derive(Debug, Clone)]
enum Tail {
    Integer(i64),
    Phi,
    Sqrt2,
}

fn arb_tail() -> impl Strategy<Value = Tail> {
    prop_oneof![
        6 => (1i64..=30).prop_map(Tail::Integer),
        1 => Just(Tail::Phi),
        1 => Just(Tail::Sqrt2),
    ]
}

fn tail_exponent(t: &Tail) -> ExtendedExponent {
    match t {
        Tail::Integer(m) => exp_rat(*m, 1),
        Tail::Phi => ExtendedExponent::from_constant(CertifiedIrrational::golden_ratio()),
        Tail::Sqrt2 => ExtendedExponent::from_constant(CertifiedIrrational::sqrt(rat(2, 1)).unwrap()),
    }
}

prop_compose! {
    fn arb_class()(g in 0usize..=3)(
        g in Just(g),
        interiors in proptest::collection::vec(arb_interior(), g),
        tail in arb_tail(),
    ) -> DiscreteClass {
        let mut exps: Vec<ExtendedExponent> =
            interiors.iter().map(|(q, p)| exp_rat(*q, *p)).collect();
        exps.push(tail_exponent(&tail));
        DiscreteClass::new(g, exps).expect("generated class is valid")
    }
}

prop_compose! {
    fn arb_divisorial_class()(g in 0usize..=3)(
        g in Just(g),
        interiors in proptest::collection::vec(arb_interior(), g),
        m in 1i64..=30,
    ) -> DiscreteClass {
        let mut exps: Vec<ExtendedExponent> =
            interiors.iter().map(|(q, p)| exp_rat(*q, *p)).collect();
        exps.push(exp_rat(m, 1));
        DiscreteClass::new(g, exps).expect("generated class is valid")
    }
}

// Seed classes for the generator: divisorial with trailing exponent 1
// (genus >= 1), or (0, 1, m).
prop_compose! {
    fn arb_seed()(g in 0usize..=3)(
        g in Just(g),
        interiors in proptest::collection::vec(arb_interior(), g),
        m in 1i64..=9,
    ) -> DiscreteClass {
        let mut exps: Vec<ExtendedExponent> =
            interiors.iter().map(|(q, p)| exp_rat(*q, *p)).collect();
        if g == 0 {
            exps.push(exp_rat(m, 1));
        } else {
            exps.push(exp_rat(1, 1));
        }
        DiscreteClass::new(g, exps).expect("generated seed is valid")
    }
}

fn arb_context() -> impl Strategy<Value = SurfaceContext> {
    prop_oneof![
        Just(SurfaceContext::Projective),
        (0u64..=5).prop_map(SurfaceContext::special),
        (1u64..=5).prop_map(SurfaceContext::non_special),
    ]
}

proptest! {
    // -- numeric ---------------------------------------------------------

    #[test]
    fn cf_round_trip(n in 1i64..=10_000, d in 1i64..=10_000) {
        prop_assume!(n >= d);
        let x = rat(n, d);
        let digits = cf_expand(&x).unwrap();
        prop_assert_eq!(cf_eval(&digits), x);
    }

    #[test]
    fn cf_canonicity(n in 1i64..=10_000, d in 1i64..=10_000) {
        prop_assume!(n >= d);
        let digits = cf_expand(&rat(n, d)).unwrap();
        let ds = digits.digits();
        if ds.len() > 1 {
            prop_assert!(ds[ds.len() - 1] >= BigInt::from(2));
        }
        prop_assert!(ds.iter().all(|a| a.is_positive()));
    }

    #[test]
    fn sqrt_refinement_soundness(p in 2i64..=60, q in 1i64..=10) {
        let r = rat(p, q);
        let Ok(c) = CertifiedIrrational::sqrt(r.clone()) else {
            return Ok(()); // perfect square, out of scope
        };
        let mut cur = c;
        for _ in 0..30 {
            let next = cur.refine();
            let (lo, hi) = (next.enclosure().0.clone(), next.enclosure().1.clone());
            prop_assert!(lo < hi);
            prop_assert!(&lo >= cur.enclosure().0 && &hi <= cur.enclosure().1);
            prop_assert!(next.width() * rat(2, 1) <= cur.width());
            // the true square root stays inside: lo^2 < r < hi^2
            prop_assert!(&lo * &lo < r && r < &hi * &hi);
            cur = next;
        }
    }

    #[test]
    fn comparison_monotone_in_budget(num in 1i64..=64, den in 1i64..=32, extra in 0u32..=64) {
        prop_assume!(num > den);
        let target = rat(num, den);
        let phi = ExtendedExponent::from_constant(CertifiedIrrational::golden_ratio());
        let first = ext_compare(&phi, &target, 8);
        if !first.lt.is_unknown() {
            let again = ext_compare(&phi, &target, 8 + extra);
            prop_assert_eq!(first.lt, again.lt);
            prop_assert_eq!(first.gt, again.gt);
        }
    }

    // -- discrete classes -------------------------------------------------

    #[test]
    fn gcd_ladder_law(t in arb_divisorial_class()) {
        let data = contact_data(&t);
        let mut running: Option<BigInt> = None;
        for (j, bb) in data.beta_bar.iter().enumerate() {
            running = Some(match running {
                None => bb.clone(),
                Some(acc) => acc.gcd(bb),
            });
            prop_assert_eq!(running.clone().unwrap(), data.e[j].clone(), "e_{} = gcd ladder", j);
        }
    }

    #[test]
    fn lemma_closed_form_equivalence(t in arb_class()) {
        let via_recursion = contact_data(&t).beta_bar_last;
        let via_closed_form = last_contact_closed_form(&t);
        prop_assert_eq!(via_recursion, via_closed_form);
    }

    #[test]
    fn normalized_ratio_consistency(t in arb_class()) {
        let data = contact_data(&t);
        let e0 = Rational::from_integer(data.beta_bar[0].clone());
        let direct = data.beta_bar_last.mul_rational(&(&e0 * &e0).recip());
        prop_assert_eq!(normalized_ratio(&t), direct);
    }

    #[test]
    fn weight_scaling(t in arb_class()) {
        let data = contact_data(&t);
        prop_assert_eq!(data.w[0].clone(), rat(1, 1));
        for j in 1..data.w.len() {
            prop_assert!(data.w[j] < data.w[j - 1], "weights strictly decrease");
        }
        let e0 = Rational::from_integer(data.e[0].clone());
        prop_assert_eq!(data.w[t.g()].clone(), e0.recip());
    }

    // -- classifier --------------------------------------------------------

    #[test]
    fn forms_agree(t in arb_class(), ctx in arb_context()) {
        let a = classify(&t, &ctx, 256);
        let b = classify_dual_form(&t, &ctx, 256);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                if t.kind() == ValuationKind::Divisorial {
                    prop_assert!(!a.member.is_unknown());
                }
                prop_assert_eq!(a.member, b.member);
                prop_assert_eq!(a.strict, b.strict);
            }
            (Err(Error::Unsupported(_)), Err(Error::Unsupported(_))) => {}
            (a, b) => prop_assert!(false, "outcome mismatch: {a:?} vs {b:?}"),
        }
    }

    #[test]
    fn genus_zero_law(m in 1u64..=40, delta in 0u64..=10) {
        let t = DiscreteClass::new(0, vec![exp_rat(m as i64, 1)]).unwrap();
        let p2 = classify(&t, &SurfaceContext::Projective, 256).unwrap();
        prop_assert!(p2.member.is_true());
        let sp = classify(&t, &SurfaceContext::special(delta), 256).unwrap();
        prop_assert!(sp.member.is_true());
        if delta >= 1 {
            let ns = classify(&t, &SurfaceContext::non_special(delta), 256).unwrap();
            prop_assert_eq!(ns.member.is_true(), m >= delta);
        }
    }

    #[test]
    fn threshold_functions_agree_with_classify(t in arb_divisorial_class()) {
        let dmin = special_min_delta(&t, 256).unwrap();
        if let Ok(d) = u64::try_from(dmin.clone()) {
            if d > 0 && d <= 64 {
                let below = classify(&t, &SurfaceContext::special(d - 1), 256).unwrap();
                prop_assert!(below.member.is_false());
            }
            let at = classify(&t, &SurfaceContext::HirzebruchSpecial { delta: dmin }, 256).unwrap();
            prop_assert!(at.member.is_true());
        }
        match nonspecial_max_delta(&t, 256).unwrap() {
            None => {
                let one = classify(&t, &SurfaceContext::non_special(1), 256).unwrap();
                prop_assert!(one.member.is_false());
            }
            Some(d) => {
                let at = classify(
                    &t,
                    &SurfaceContext::HirzebruchNonSpecial { delta: d.clone() },
                    256,
                )
                .unwrap();
                prop_assert!(at.member.is_true());
                let above = classify(
                    &t,
                    &SurfaceContext::HirzebruchNonSpecial { delta: d + 1u32 },
                    256,
                )
                .unwrap();
                prop_assert!(above.member.is_false());
            }
        }
    }

    // -- dual graphs -------------------------------------------------------

    #[test]
    fn graph_laws(t in arb_class()) {
        // the builder aborts on any internal invariant breach, so success
        // already certifies tree shape, digit law, census and proximity
        let (g, stats) = build_with_stats(&t, 4, 512).unwrap();
        prop_assert_eq!(stats.tie_breaks, 0, "capacity tie-break fired");

        let n = g.vertex_count();
        prop_assert_eq!(g.edges().len(), n - 1);
        for v in 1..=n as u32 {
            prop_assert!(g.degree(v) <= 3);
        }

        // digit law, re-checked externally against cf_expand
        for j in 1..=t.g() {
            let runs = g.digit_runs(j).unwrap();
            let expect = cf_expand(&t.beta_prime_rat(j)).unwrap();
            prop_assert_eq!(&runs[..], expect.digits());
        }
        if let Some(m) = t.last().as_rational() {
            let runs = g.digit_runs(t.g() + 1).unwrap();
            prop_assert_eq!(runs, vec![m.to_integer()]);

            // tail free-point law for divisorial classes
            if t.g() >= 1 {
                let tail_free = (1..=n as u32)
                    .filter(|&v| g.stage_of(v) as usize == t.g() + 1 && g.is_free(v))
                    .count();
                let m_int: i64 = m.to_integer().try_into().unwrap();
                prop_assert_eq!(tail_free as i64, m_int - 1);
            }

            // junction census: g junctions if the tail is nonempty, g-1 if not
            let degree3 = (1..=n as u32).filter(|&v| g.degree(v) == 3).count();
            let m_is_one = m.is_one();
            let expected = if t.g() == 0 {
                0
            } else if m_is_one {
                t.g() - 1
            } else {
                t.g()
            };
            prop_assert_eq!(degree3, expected);

            // independent vertex-count formula from digit sums
            let mut expect_n = BigInt::zero();
            for j in 1..=t.g() {
                let s = cf_expand(&t.beta_prime_rat(j)).unwrap().digit_sum();
                expect_n += if j == 1 { s } else { s - BigInt::one() };
            }
            if t.g() == 0 {
                expect_n = m.to_integer();
            } else {
                expect_n += m.to_integer() - BigInt::one();
            }
            prop_assert_eq!(expect_n, BigInt::from(n));
        }
    }

    #[test]
    fn graph_structured_round_trip(t in arb_class()) {
        let g = build(&t, 3, 512).unwrap();
        let text = g.render(RenderFormat::Structured);
        let back = DualGraph::parse_structured(&text).unwrap();
        prop_assert_eq!(back, g);
    }

    // -- generator ---------------------------------------------------------

    #[test]
    fn generator_soundness_and_order(seed in arb_seed(), ctx in arb_context()) {
        let line = match check_input(&seed, &ctx) {
            Ok(line) => line,
            Err(Error::NotExtensible { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
        };
        prop_assert!(line.bound > rat(1, 1));

        let emissions = output1_stream(
            &seed,
            &ctx,
            &ChoiceStrategy::EnumerateByDenominator { max_denominator: Some(4) },
            256,
            12,
        ).unwrap();
        let mut previous: Option<(BigInt, BigInt)> = None;
        for c in &emissions {
            let v = classify(c, &ctx, 256).unwrap();
            prop_assert!(v.member.is_true(), "emitted class {c} must be NPI");
            let x = c.beta_prime(c.g());
            let x = x.as_rational().unwrap();
            prop_assert!(*x > rat(1, 1) && *x <= line.bound);
            let key = (x.denom().clone(), x.numer().clone());
            if let Some(prev) = previous {
                prop_assert!(prev < key, "stream ordered by (denominator, numerator)");
            }
            previous = Some(key);
        }

        // anything strictly above the budget is rejected
        let over = &line.bound + rat(1, 2);
        let err = output1(&seed, &ctx, &ChoiceStrategy::Single(over), 256);
        prop_assert!(matches!(err, Err(Error::ChoiceRejected(_))));
    }

    #[test]
    fn generator_determinism(seed in arb_seed(), ctx in arb_context()) {
        let s = ChoiceStrategy::EnumerateByDenominator { max_denominator: Some(3) };
        let a = output1_stream(&seed, &ctx, &s, 256, 8);
        let b = output1_stream(&seed, &ctx, &s, 256, 8);
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "nondeterministic outcome"),
        }
    }
}
