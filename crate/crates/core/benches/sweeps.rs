use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use twistcalc_core::algebra::{Algebra, PolyAlgebra};
use twistcalc_core::arith::{Field, Scalar, XPoly};
use twistcalc_core::deriv::presets;
use twistcalc_core::geometry::commutative::{
    monomial_triples, CommutativeConnection, CommutativeLie,
};
use twistcalc_core::hochschild::TwistedBimodule;
use twistcalc_core::sweep;

fn leibniz_sweep(c: &mut Criterion) {
    let x = presets::jackson();
    let pair = &x.pair;
    let basis = PolyAlgebra.basis(12);
    let cases = sweep::pairs(basis.len());
    let check = |&(i, j): &(usize, usize)| {
        let (f, g) = (&basis[i], &basis[j]);
        let lhs = x.apply(&(f * g));
        let rhs = &(&pair.sigma_of(f) * &x.apply(g)) + &(&x.apply(f) * &pair.tau_of(g));
        lhs == rhs
    };
    let mut group = c.benchmark_group("leibniz_sweep");
    group.bench_function("sequential", |b| b.iter(|| sweep::seq::all(&cases, check)));
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| b.iter(|| sweep::par::all(&cases, check)));
    group.finish();
}

fn differential_assembly(c: &mut Criterion) {
    let m = TwistedBimodule::new(presets::matrix_pair(), 1).unwrap();
    let mut group = c.benchmark_group("differential_assembly");
    group.sample_size(10);
    for parallel in [false, true] {
        let label = if parallel { "parallel" } else { "sequential" };
        group.bench_with_input(BenchmarkId::new(label, 3), &parallel, |b, &p| {
            b.iter(|| m.build_differential_with(3, p).unwrap())
        });
    }
    group.finish();
}

fn flat_curvature_sweep(c: &mut Criterion) {
    let lie = CommutativeLie::new(presets::translation_pair(Scalar::from_int(1))).unwrap();
    let triples = monomial_triples(6);
    let flat = |(f, g, h): &(XPoly, XPoly, XPoly)| {
        CommutativeConnection::Canonical
            .curvature(&lie, f, g, h)
            .is_ok_and(|r| r.is_zero())
    };
    let mut group = c.benchmark_group("flat_curvature_sweep");
    group.sample_size(10);
    group.bench_function("sequential", |b| b.iter(|| sweep::seq::all(&triples, flat)));
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| b.iter(|| sweep::par::all(&triples, flat)));
    group.finish();
}

criterion_group!(
    benches,
    leibniz_sweep,
    differential_assembly,
    flat_curvature_sweep
);
criterion_main!(benches);
