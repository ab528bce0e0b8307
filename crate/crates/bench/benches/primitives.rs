use ark_ff::UniformRand;
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use svc_bench::{lattice, rng, scalars};
use svc_core::amt::LagrangeAmtParams;
use svc_core::pairing::{g1_generator, msm, G1Affine};
use svc_core::{OpCounter, Scalar};

fn exponentiation(c: &mut Criterion) {
    let mut r = rng();
    let base: G1Affine = (g1_generator() * Scalar::rand(&mut r)).into();
    let s = Scalar::rand(&mut r);
    c.bench_function("g1_exp", |b| b.iter(|| black_box(base) * black_box(s)));
}

fn multi_scalar(c: &mut Criterion) {
    let mut g = c.benchmark_group("g1_msm");
    let mut r = rng();
    for n in [16usize, 256, 4096] {
        let bases: Vec<G1Affine> = (0..n).map(|_| (g1_generator() * Scalar::rand(&mut r)).into()).collect();
        let s = scalars(&mut r, n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| b.iter(|| msm(&bases, &s)));
    }
    g.finish();
}

fn partial_digests(c: &mut Criterion) {
    let mut g = c.benchmark_group("partial_digest");
    let params = LagrangeAmtParams::generate_subset(1 << 10, b"bench", &[3], &[3]).unwrap();
    let delta = Scalar::rand(&mut rng());
    g.bench_function("amt_depth5", |b| {
        b.iter(|| svc_core::amt::partial_digest(&params, 3, 5, Some(true), &delta).unwrap())
    });
    let l = lattice(256, 1, svc_core::Nu::HALF);
    for j in [0u8, 4, 7] {
        g.bench_with_input(BenchmarkId::new("lattice_h8", j), &j, |b, &j| {
            b.iter(|| svc_core::lattice::partial_digest(&l.params, 8, 17, j, 99, &mut OpCounter::default()).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, exponentiation, multi_scalar, partial_digests);
criterion_main!(benches);
