use ittm_core::asm::assemble;
use ittm_core::engine::{run, Budget, RunOutcome};
use ittm_core::lab::{
    classify_outputs, decision_time, gaps_of, halting_spectrum, InputFamily, OutputClass, Scope,
    Verdict,
};
use ittm_core::stdlib::{flasher, omega_clock, succ_clock, wo_check};
use ittm_core::{LimitConvention, Ordinal, Overlay, RealTape};

fn ord(s: &str) -> Ordinal {
    s.parse().unwrap()
}

fn ords(v: &[&str]) -> Vec<Ordinal> {
    v.iter().map(|s| ord(s)).collect()
}

#[test]
fn clock_decision_time() {
    let f = InputFamily::random_fin_support(7, 5, 12, 0.3);
    assert_eq!(
        decision_time(&succ_clock(9), &f, &Budget::default()).unwrap(),
        Verdict::Sup {
            stage: ord("9"),
            scope: Scope::FamilyRelative
        }
    );
}

#[test]
fn wo_check_decision_time_is_the_max_stage() {
    let f = InputFamily::random_relations(11, 10, 4, 0.3);
    let p = wo_check();
    let b = Budget::default();
    let max = f
        .members
        .iter()
        .map(|m| {
            run(&p, &m.tape, &b, LimitConvention::LiminfCells)
                .unwrap()
                .0
        })
        .map(|o| o.halting_stage().cloned().expect("wo_check halts"))
        .max()
        .unwrap();
    match decision_time(&p, &f, &b).unwrap() {
        Verdict::Sup { stage, .. } => assert_eq!(stage, max),
        v => panic!("{v:?}"),
    }
}

#[test]
fn flasher_is_not_total() {
    match decision_time(
        &flasher(),
        &InputFamily::random_fin_support(1, 3, 8, 0.5),
        &Budget::default(),
    )
    .unwrap()
    {
        Verdict::NotTotal { witness, outcome } => {
            assert_eq!(witness, 0);
            assert!(matches!(outcome, RunOutcome::FinalLoop { .. }));
        }
        v => panic!("{v:?}"),
    }
}

#[test]
fn budget_trips_give_unknown() {
    let mover = assemble("r *** -> 1_ R r\n").unwrap();
    let b = Budget {
        max_successor_steps_per_segment: 100,
        ..Budget::default()
    };
    assert!(matches!(
        decision_time(&mover, &InputFamily::zero(), &b).unwrap(),
        Verdict::Unknown { witness: 0, .. }
    ));
}

#[test]
fn empty_family_is_rejected() {
    let f = InputFamily::explicit("none", []);
    assert!(decision_time(&flasher(), &f, &Budget::default()).is_err());
}

#[test]
fn spectrum_examples() {
    let z = InputFamily::zero();
    let b = Budget::default();
    let r = halting_spectrum(&[succ_clock(2), succ_clock(5)], &z, &b).unwrap();
    assert_eq!(r.stages, ords(&["2", "5"]));
    assert_eq!(r.gaps, vec![(ord("2"), ord("5"))]);

    let clocks: Vec<_> = (1..=10).map(succ_clock).collect();
    let r = halting_spectrum(&clocks, &z, &b).unwrap();
    assert_eq!(
        r.stages,
        (1..=10).map(Ordinal::from_u64).collect::<Vec<_>>()
    );
    assert!(r.gaps.is_empty());

    let r = halting_spectrum(&[succ_clock(3), omega_clock()], &z, &b).unwrap();
    assert_eq!(r.stages, ords(&["3", "w+1"]));
    assert_eq!(r.gaps, vec![(ord("3"), ord("w+1"))]);
}

#[test]
fn spectrum_ignores_non_halting_runs() {
    let r = halting_spectrum(
        &[flasher(), succ_clock(4)],
        &InputFamily::zero(),
        &Budget::default(),
    )
    .unwrap();
    assert_eq!(r.stages, ords(&["4"]));
    assert!(matches!(r.verdicts[0], Verdict::NotTotal { .. }));
}

#[test]
fn gaps_between_limits() {
    assert_eq!(
        gaps_of(&ords(&["w", "w+1", "w*2", "w^2"])),
        vec![(ord("w+1"), ord("w*2")), (ord("w*2"), ord("w^2"))]
    );
    assert!(gaps_of(&ords(&["7"])).is_empty());
}

#[test]
fn classify_examples() {
    let b = Budget::default();
    let z = RealTape::zero();
    let writer = assemble("w *** -> _1 L HALT\n").unwrap();
    assert_eq!(
        classify_outputs(&writer, &z, &b).unwrap(),
        OutputClass::HaltingOutput(Overlay::from_cells([0]))
    );
    let settle = assemble("a *** -> 11 L b\nb *** -> 0_ L c\nc *** -> 1_ L b\n").unwrap();
    assert_eq!(
        classify_outputs(&settle, &z, &b).unwrap(),
        OutputClass::StabilizedOutput(Overlay::from_cells([0]))
    );
    assert_eq!(
        classify_outputs(&flasher(), &z, &b).unwrap(),
        OutputClass::TransientOutputs(vec![Overlay::new(), Overlay::from_cells([0])])
    );
}

#[test]
fn report_is_deterministic() {
    let f = InputFamily::random_relations(5, 6, 3, 0.4);
    let ps = [wo_check(), succ_clock(3), flasher()];
    let a = halting_spectrum(&ps, &f, &Budget::default()).unwrap();
    let b = halting_spectrum(&ps, &f, &Budget::default()).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}
