use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use ittm_core::asm::{assemble, disassemble};
use ittm_core::engine::{race, run, Budget};
use ittm_core::lab::{halting_spectrum, InputFamily};
use ittm_core::stdlib::{
    dovetailer, flasher, omega_clock, succ_clock, wo_check, Layout, RelationCode,
};
use ittm_core::{LimitConvention, Ordinal, RealTape};

const LIMINF: LimitConvention = LimitConvention::LiminfCells;

fn engine(c: &mut Criterion) {
    let b = Budget::default();
    let z = RealTape::zero();
    let (omega, flash, clock) = (omega_clock(), flasher(), succ_clock(1000));
    c.bench_function("run omega_clock", |bn| {
        bn.iter(|| run(&omega, &z, &b, LIMINF).unwrap())
    });
    c.bench_function("run flasher to final loop", |bn| {
        bn.iter(|| run(&flash, &z, &b, LIMINF).unwrap())
    });
    c.bench_function("run succ_clock(1000)", |bn| {
        bn.iter(|| run(&clock, &z, &b, LIMINF).unwrap())
    });
    c.bench_function("race omega_clock vs succ_clock(1000)", |bn| {
        bn.iter(|| race(&omega, &clock, &z, &b).unwrap())
    });

    let wo = wo_check();
    let chain = RelationCode::new(0..8, (0..7).map(|a| (a, a + 1))).to_tape();
    c.bench_function("wo_check on an 8-element chain", |bn| {
        bn.iter(|| run(&wo, &chain, &b, LIMINF).unwrap())
    });

    let table = [succ_clock(3), flasher()];
    let dove = dovetailer(&table, 0).unwrap();
    let x = Layout::for_table(&table).input_for(RealTape::zero());
    c.bench_function("dovetailer of two members", |bn| {
        bn.iter(|| run(&dove, &x, &b, LIMINF).unwrap())
    });
}

fn lab(c: &mut Criterion) {
    let b = Budget::default();
    let ps = [wo_check(), succ_clock(5), flasher()];
    let f = InputFamily::random_relations(1, 16, 5, 0.3);
    c.bench_function("spectrum of 3 programs over 16 relations", |bn| {
        bn.iter(|| halting_spectrum(&ps, &f, &b).unwrap())
    });
}

fn tools(c: &mut Criterion) {
    let src = disassemble(&wo_check());
    c.bench_function("assemble wo_check", |bn| {
        bn.iter(|| assemble(black_box(&src)).unwrap())
    });
    let a: Ordinal = "w^3*4+w^2+w*7+3".parse().unwrap();
    let o: Ordinal = "w^2*2+w+5".parse().unwrap();
    c.bench_function("ordinal mul", |bn| {
        bn.iter(|| black_box(&a).mul(black_box(&o)))
    });
}

criterion_group!(benches, engine, lab, tools);
criterion_main!(benches);
