//! Sequential vs parallel bounded-enumeration comparison.
//!
//! The workload is a `Holds` case (a fence-hardened bounds-check victim)
//! so both backends scan the full assignment space — early-exit on a
//! violation would make the comparison meaningless.

use criterion::{criterion_group, criterion_main, Criterion};
use lang_core::{parse_attacker, parse_component, plug, Mode, WholeProgram};
use security::{check_sni_bounded_seq, PrivDomain, Semantics};

fn fenced_program() -> WholeProgram {
    let c = parse_component(
        "component {
            private {
                -2 = 1 :U;
                -3 = 0 :U;
                -4 = 2 :U;
                -5 = 1 :U;
                -10 = 2 :U;
            }
            fn get(y) {
                let size = read(1) in
                if0 y < size {
                    lfence;
                    let x = readp(2 + y) in
                    let temp = read(10 + x) in
                    skip
                } else {
                    lfence;
                    skip
                }
            }
        }",
    )
    .unwrap();
    let a = parse_attacker(
        "attacker {
            public { 1 = 4; }
            fn main(x) { call get 8; ret }
        }",
    )
    .unwrap();
    plug(a, c).unwrap()
}

fn bench_enumeration(c: &mut Criterion) {
    let w = fenced_program();
    // 4^5 = 1024 assignments, each a pair of speculative runs.
    let dom = PrivDomain::declared(&w.component, 0..4);
    let sem = Semantics::Spec { omega: 16 };
    let budget = 100_000;

    let mut group = c.benchmark_group("sni_bounded");
    group.bench_function("seq", |b| {
        b.iter(|| check_sni_bounded_seq(&w, &dom, sem, Mode::Strong, budget).unwrap())
    });
    #[cfg(feature = "parallel")]
    group.bench_function("par", |b| {
        b.iter(|| security::check_sni_bounded_par(&w, &dom, sem, Mode::Strong, budget).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_enumeration);
criterion_main!(benches);
