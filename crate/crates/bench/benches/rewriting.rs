use criterion::{black_box, criterion_group, criterion_main, Criterion};
use lctrs_core::constraints::Solver;
use lctrs_core::equivalence::equiv_general;
use lctrs_core::harness::{gen_ecterm, gen_equiv_pair, gen_lctrs, GenConfig};
use lctrs_core::rewriting::all_successors;

fn steps(c: &mut Criterion) {
    let cases: Vec<_> = (0..20)
        .map(|seed| {
            let cfg = GenConfig { seed, ..GenConfig::default() };
            (gen_lctrs(&cfg, false).1, gen_ecterm(&cfg, false).unwrap())
        })
        .collect();
    let solver = Solver::builtin();
    c.bench_function("successors_20_generated", |b| {
        b.iter(|| {
            for (rules, t) in &cases {
                black_box(all_successors(t, rules, &solver).unwrap());
            }
        })
    });
}

fn equivalence(c: &mut Criterion) {
    let pairs: Vec<_> = (0..20)
        .map(|seed| gen_equiv_pair(&GenConfig { seed, ..GenConfig::default() }).unwrap())
        .collect();
    let solver = Solver::builtin();
    c.bench_function("equiv_general_20_pairs", |b| {
        b.iter(|| {
            for (a, t) in &pairs {
                black_box(equiv_general(a, t, &solver).unwrap());
            }
        })
    });
}

criterion_group!(benches, steps, equivalence);
criterion_main!(benches);
