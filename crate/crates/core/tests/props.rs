mod common;

use common::*;
use ittm_core::asm::{assemble, disassemble};
use ittm_core::engine::{run, Budget, RunOutcome};
use ittm_core::lab::{decision_time, gaps_of, InputFamily, Verdict};
use ittm_core::stdlib::{dovetailer, Layout};
use ittm_core::{Config, LimitConvention, Ordinal, Program, RealTape};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const LIMINF: LimitConvention = LimitConvention::LiminfCells;

fn cnf() -> impl Strategy<Value = Cnf> {
    proptest::collection::vec(0u64..6, 5).prop_map(|mut v| {
        v.resize(CNF_LEN, 0);
        v
    })
}

fn program(max_states: usize, halt_p: f64) -> impl Strategy<Value = Program> {
    (any::<u64>(), 1..=max_states)
        .prop_map(move |(seed, n)| random_program(&mut ChaCha8Rng::seed_from_u64(seed), n, halt_p))
}

fn small_budget() -> Budget {
    Budget {
        max_successor_steps_per_segment: 5_000,
        max_limits_per_order: 64,
        ..Budget::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ordinal_text_round_trips(x in cnf()) {
        let a = to_ordinal(&x);
        prop_assert_eq!(a.to_string().parse::<Ordinal>().unwrap(), a);
    }

    #[test]
    fn ordinal_ops_match_coefficient_vectors(x in cnf(), y in cnf()) {
        let (a, b) = (to_ordinal(&x), to_ordinal(&y));
        prop_assert_eq!(a.cmp(&b), cnf_cmp(&x, &y));
        prop_assert_eq!(from_ordinal(&a.add(&b)), cnf_add(&x, &y));
        prop_assert_eq!(from_ordinal(&a.mul(&b)), cnf_mul(&x, &y));
    }

    #[test]
    fn ordinal_algebra(x in cnf(), y in cnf(), z in cnf()) {
        let [a, b, c] = [&x, &y, &z].map(to_ordinal);
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.add(&b) >= b);
        prop_assert!(a.succ() > a);
        if b < c {
            prop_assert!(a.add(&b) < a.add(&c));
            prop_assert!(b.add(&a) <= c.add(&a));
        }
    }

    #[test]
    fn assembler_round_trips(p in program(5, 0.1)) {
        let text = disassemble(&p);
        let q = assemble(&text).unwrap();
        prop_assert_eq!(disassemble(&q), text);
        prop_assert_eq!(q, p);
    }

    #[test]
    fn gaps_are_exactly_the_non_adjacent_pairs(xs in proptest::collection::vec(cnf(), 0..8)) {
        let mut stages: Vec<Ordinal> = xs.iter().map(to_ordinal).collect();
        stages.sort();
        stages.dedup();
        let gaps = gaps_of(&stages);
        for w in stages.windows(2) {
            let has_room = w[0].succ() != w[1];
            prop_assert_eq!(gaps.contains(&(w[0].clone(), w[1].clone())), has_room);
        }
        prop_assert!(gaps.len() < stages.len().max(1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn engine_limits_match_the_unroller(p in program(3, 0.05), cells in proptest::collection::btree_set(0usize..6, 0..4)) {
        let x = RealTape::fin_support(cells);
        let (o, t) = run(&p, &x, &small_budget(), LIMINF).unwrap();
        let mut u = Unroller::new(&p, &x, LIMINF, 500_000);
        if matches!(o, RunOutcome::BudgetExceeded { .. })
            || t.milestones.iter().any(|m| m.stage > Ordinal::omega_pow_n(2))
            || u.block(2, &Ordinal::zero(), Config::initial()).is_err()
        {
            return Ok(());
        }
        for m in t.limits() {
            prop_assert_eq!(&u.limits[&m.stage].config, &m.configs[0]);
        }
        if let RunOutcome::Halted { stage, .. } = &o {
            prop_assert_eq!(Some(stage), u.halted.as_ref().map(|h| &h.0));
        }
    }

    #[test]
    fn sup_ignores_family_order(p in program(3, 0.3), seed in any::<u64>()) {
        let f = InputFamily::random_fin_support(seed, 5, 6, 0.4);
        let mut g = f.clone();
        g.members.reverse();
        let b = small_budget();
        let (a, r) = (decision_time(&p, &f, &b).unwrap(), decision_time(&p, &g, &b).unwrap());
        match (&a, &r) {
            (Verdict::Sup { stage: s, .. }, Verdict::Sup { stage: t, .. }) => prop_assert_eq!(s, t),
            _ => prop_assert_eq!(std::mem::discriminant(&a), std::mem::discriminant(&r)),
        }
    }

    #[test]
    fn sup_is_monotone_in_the_family(p in program(3, 0.3), seed in any::<u64>()) {
        let f = InputFamily::random_fin_support(seed, 6, 6, 0.4);
        let mut sub = f.clone();
        sub.members.truncate(3);
        let b = small_budget();
        if let (Verdict::Sup { stage: big, .. }, Verdict::Sup { stage: small, .. }) =
            (decision_time(&p, &f, &b).unwrap(), decision_time(&p, &sub, &b).unwrap())
        {
            prop_assert!(small <= big);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dovetailer_follows_its_member(
        members in proptest::collection::vec(program(3, 0.25), 1..=2),
        pick in any::<proptest::sample::Index>(),
        cells in proptest::collection::btree_set(0usize..4, 0..3),
    ) {
        let d = pick.index(members.len());
        let y = RealTape::fin_support(cells);
        let (alone, _) = run(&members[d], &y, &small_budget(), LIMINF).unwrap();
        let lay = Layout::for_table(&members);
        let p = dovetailer(&members, d).unwrap();
        match alone {
            RunOutcome::Halted { stage, output } if output.extent() < 16 => {
                let (o, _) = run(&p, &lay.input_for(y), &Budget::default(), LIMINF).unwrap();
                match o {
                    RunOutcome::Halted { stage: s, output: out } => {
                        prop_assert_eq!(s.is_finite(), stage.is_finite());
                        prop_assert_eq!(lay.result(&out), output);
                    }
                    other => prop_assert!(false, "dovetailer did not halt: {:?}", other),
                }
            }
            RunOutcome::FinalLoop { .. } => {
                let (o, _) = run(&p, &lay.input_for(y), &small_budget(), LIMINF).unwrap();
                prop_assert!(!matches!(o, RunOutcome::Halted { .. }), "{:?}", o);
            }
            _ => {}
        }
    }
}
