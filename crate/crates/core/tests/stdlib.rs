use ittm_core::asm::{assemble, disassemble};
use ittm_core::engine::{race, run, Budget, RaceWinner, RunOutcome};
use ittm_core::stdlib::{
    self, dovetailer, flasher, immediate_halt, omega_clock, succ_clock, wo_check, DovetailError,
    Layout, RelationCode,
};
use ittm_core::{LimitConvention, Ordinal, Overlay, Program, RealTape};

fn outcome(p: &Program, x: &RealTape) -> RunOutcome {
    run(p, x, &Budget::default(), LimitConvention::LiminfCells)
        .unwrap()
        .0
}

fn halted_at(o: &RunOutcome) -> Ordinal {
    o.halting_stage()
        .cloned()
        .unwrap_or_else(|| panic!("expected a halt, got {o:?}"))
}

fn ord(s: &str) -> Ordinal {
    s.parse().unwrap()
}

#[test]
fn immediate_halt_is_one_working_state() {
    let p = immediate_halt();
    let working = (0..p.state_count()).filter(|&s| !p.is_halting(s)).count();
    assert_eq!(working, 1);
    assert_eq!(halted_at(&outcome(&p, &RealTape::zero())), ord("1"));
}

#[test]
fn flasher_loops_from_omega() {
    let p = flasher();
    assert_eq!(p.state_count(), 2);
    assert_eq!(
        outcome(&p, &RealTape::zero()),
        RunOutcome::FinalLoop {
            start: ord("w"),
            period: ord("w")
        }
    );
}

#[test]
fn omega_clock_halts_at_omega_plus_one() {
    let p = omega_clock();
    assert!(p.ignores_input());
    for x in [
        RealTape::zero(),
        RealTape::fin_support([0, 3, 9]),
        RealTape::from_bits(&[true; 12]),
    ] {
        assert_eq!(halted_at(&outcome(&p, &x)), ord("w+1"));
    }
}

#[test]
fn succ_clocks_halt_on_time() {
    for n in [1, 2, 7, 1000] {
        assert_eq!(
            halted_at(&outcome(&succ_clock(n), &RealTape::zero())),
            Ordinal::from_u64(n as u64)
        );
    }
}

#[test]
fn clocks_race() {
    let r = race(
        &omega_clock(),
        &succ_clock(5),
        &RealTape::zero(),
        &Budget::default(),
    )
    .unwrap();
    assert_eq!(r.winner, RaceWinner::Second);
    assert_eq!(r.stage, Some(ord("5")));
}

#[test]
fn stdlib_programs_round_trip() {
    let mut programs = vec![
        immediate_halt(),
        flasher(),
        omega_clock(),
        succ_clock(1),
        succ_clock(13),
        wo_check(),
    ];
    programs.push(dovetailer(&[succ_clock(3), flasher()], 0).unwrap());
    programs.push(dovetailer(&[flasher(), flasher()], 1).unwrap());
    for p in programs {
        let text = disassemble(&p);
        assert_eq!(assemble(&text).unwrap(), p);
    }
}

#[test]
fn catalog_lookup() {
    assert_eq!(stdlib::by_name("succ_clock:4"), Some(succ_clock(4)));
    assert_eq!(stdlib::by_name("flasher"), Some(flasher()));
    assert_eq!(stdlib::by_name("succ_clock:0"), None);
    assert_eq!(stdlib::by_name("nope"), None);
}

fn wo_output(r: &RelationCode) -> (bool, RunOutcome) {
    let o = outcome(&wo_check(), &r.to_tape());
    let out = match &o {
        RunOutcome::Halted { output, .. } => output.get(0),
        other => panic!("wo_check did not halt: {other:?}"),
    };
    (out, o)
}

#[test]
fn wo_check_examples() {
    assert!(wo_output(&RelationCode::new([0, 1, 2], [])).0);
    assert!(!wo_output(&RelationCode::new([0, 1, 2], [(0, 1), (1, 2), (2, 0)])).0);
    assert!(wo_output(&RelationCode::new([0, 1, 2], [(0, 1), (1, 2), (0, 2)])).0);
    assert!(!wo_output(&RelationCode::new([4], [(4, 4)])).0);
    assert!(wo_output(&RelationCode::new([], [])).0);
}

#[test]
fn wo_check_flags_support_overflow() {
    let x = RealTape::fin_support(
        RelationCode::new([0, 1], [(0, 1)])
            .cells()
            .into_iter()
            .chain([2 * 8 + 2]),
    );
    match outcome(&wo_check(), &x) {
        RunOutcome::Halted { output, .. } => assert!(!output.get(0)),
        other => panic!("{other:?}"),
    }
}

fn dove_run(table: &[Program], d: usize, y: RealTape) -> (RunOutcome, Layout) {
    let lay = Layout::for_table(table);
    let p = dovetailer(table, d).unwrap();
    (outcome(&p, &lay.input_for(y)), lay)
}

#[test]
fn dovetailer_of_immediate_halt() {
    let (o, lay) = dove_run(&[immediate_halt()], 0, RealTape::zero());
    let stage = halted_at(&o).to_u64().unwrap();
    assert!(
        stage <= lay.setup_bound() + lay.round_bound(1) + lay.copy_bound(1),
        "stage {stage}"
    );
}

#[test]
fn dovetailer_follows_the_designated_member() {
    let table = [succ_clock(3), flasher()];
    let (o, lay) = dove_run(&table, 0, RealTape::zero());
    let stage = halted_at(&o).to_u64().unwrap();
    assert!(
        stage <= lay.setup_bound() + 3 * lay.round_bound(1) + lay.copy_bound(1),
        "stage {stage}"
    );
}

#[test]
fn dovetailer_of_flashers_loops() {
    let (o, _) = dove_run(&[flasher(), flasher()], 0, RealTape::zero());
    assert!(matches!(o, RunOutcome::FinalLoop { .. }), "{o:?}");
}

#[test]
fn dovetailer_passes_limits_to_members() {
    let (o, _) = dove_run(&[omega_clock()], 0, RealTape::zero());
    let stage = halted_at(&o);
    assert!(stage > ord("w") && stage < ord("w*2"), "{stage}");
    let (o, _) = dove_run(&[flasher(), omega_clock()], 1, RealTape::zero());
    assert!(o.halting_stage().is_some(), "{o:?}");
}

#[test]
fn dovetailer_copies_output() {
    let writer = assemble("a *** -> _1 R b\nb *** -> _1 R c\nc *** -> __ L HALT\n").unwrap();
    let (o, lay) = dove_run(&[flasher(), writer], 1, RealTape::zero());
    match o {
        RunOutcome::Halted { output, .. } => {
            assert_eq!(lay.result(&output), Overlay::from_cells([0, 1]))
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn dovetailer_rejects_bad_tables() {
    assert_eq!(dovetailer(&[], 0), Err(DovetailError::EmptyTable));
    assert!(matches!(
        dovetailer(&vec![flasher(); 5], 0),
        Err(DovetailError::TableTooLarge { .. })
    ));
    assert!(matches!(
        dovetailer(&[succ_clock(40)], 0),
        Err(DovetailError::TableTooLarge { .. })
    ));
    assert_eq!(
        dovetailer(&[flasher()], 1),
        Err(DovetailError::NoSuchMember(1))
    );
}

#[test]
fn shipped_generated_sources_are_current() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("programs");
    for (file, p) in [
        ("succ_clock_3.itm", succ_clock(3)),
        ("wo_check.itm", wo_check()),
    ] {
        let path = dir.join(file);
        let text = disassemble(&p);
        if std::env::var_os("ITTM_BLESS").is_some() {
            std::fs::write(&path, &text).unwrap();
        }
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            text,
            "{file} is stale; rerun with ITTM_BLESS=1"
        );
        assert_eq!(assemble(&text).unwrap(), p);
    }
}
