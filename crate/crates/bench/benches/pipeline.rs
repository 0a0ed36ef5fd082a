use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use mjv_bench::{diamond_chain, mixed_unit};
use mjv_core::driver;
use mjv_core::frontend::parse_unit;
use mjv_core::rac::{exhaustive_test, InputRanges};
use mjv_core::typecheck::check_program;
use mjv_core::vcgen::{build_cfg, compact_vc, passify};
use mjv_core::weave::weave_program;
use mjv_core::{ArithmeticMode, Rac, SourceUnit};

fn front_half(c: &mut Criterion) {
    let unit = SourceUnit::new("mixed.mjml", mixed_unit(20));
    c.bench_function("parse/mixed20", |b| b.iter(|| parse_unit(black_box(&unit)).unwrap()));
    let ast = parse_unit(&unit).unwrap();
    c.bench_function("typecheck/mixed20", |b| {
        b.iter(|| check_program(black_box(&ast)).unwrap())
    });
    let typed = check_program(&ast).unwrap().0;
    c.bench_function("weave/mixed20", |b| {
        b.iter(|| weave_program(black_box(&typed), ArithmeticMode::Safe))
    });
}

fn vc_scaling(c: &mut Criterion) {
    let mut group = c.benchmark_group("vcgen/diamonds");
    for n in [4, 8, 16, 32] {
        let typed = mjv_core::load(&SourceUnit::new("chain.mjml", diamond_chain(n)))
            .unwrap()
            .0;
        let body = weave_program(&typed, ArithmeticMode::Bigint).remove(0).1.unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &body, |b, body| {
            b.iter(|| {
                let cfg = build_cfg(body);
                let graph = passify(body, &cfg);
                compact_vc(&graph).node_count()
            })
        });
    }
    group.finish();
}

fn emit(c: &mut Criterion) {
    let typed = mjv_core::load(&SourceUnit::new("chain.mjml", diamond_chain(16)))
        .unwrap()
        .0;
    let m = typed.method("chain").unwrap();
    let prepared = driver::prepare(&typed, m, ArithmeticMode::Safe).unwrap();
    c.bench_function("emit/diamonds16", |b| {
        b.iter(|| prepared.main_script(None).unwrap().text().len())
    });
}

fn rac(c: &mut Criterion) {
    let typed = mjv_core::load(&SourceUnit::new("mixed.mjml", mixed_unit(1))).unwrap().0;
    let rac = Rac::new(&typed, ArithmeticMode::Safe);
    c.bench_function("rac/exhaustive-bump", |b| {
        b.iter(|| exhaustive_test(&rac, "bump0", &InputRanges::default()).runs)
    });
}

criterion_group!(benches, front_half, vc_scaling, emit, rac);
criterion_main!(benches);
