use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use svc_bench::{amt, lattice, merkle, verkle};
use svc_core::Nu;

fn amt_trade_off(c: &mut Criterion) {
    let mut g = c.benchmark_group("amt_proof_update_n65536_k460");
    g.sample_size(20);
    for nu in [Nu::new(1, 4).unwrap(), Nu::HALF, Nu::new(3, 4).unwrap()] {
        let f = amt(1 << 16, 460, nu);
        g.bench_with_input(BenchmarkId::new("nu", nu.to_string().replace('/', "over")), &f, |b, f| {
            b.iter(|| svc_core::amt::proof_update(&f.params, &f.proof, &f.batch, &f.info).unwrap())
        });
    }
    g.finish();
}

fn lattice_trade_off(c: &mut Criterion) {
    let mut g = c.benchmark_group("lattice_proof_update_n256_k32");
    for nu in [Nu::ZERO, Nu::HALF, Nu::ONE] {
        let f = lattice(256, 32, nu);
        g.bench_with_input(BenchmarkId::new("nu", nu.to_string().replace('/', "over")), &f, |b, f| {
            b.iter(|| svc_core::lattice::proof_update(&f.params, &f.proof, &f.batch, &f.info).unwrap())
        });
    }
    g.finish();
}

fn verkle_degrees(c: &mut Criterion) {
    let mut g = c.benchmark_group("verkle_proof_update_n4096_k32");
    g.sample_size(20);
    for deg in [2usize, 4, 16, 64] {
        let f = verkle(deg, 4096, 32);
        g.bench_with_input(BenchmarkId::from_parameter(deg), &f, |b, f| {
            b.iter(|| svc_core::verkle::proof_update(&f.params, &f.context, &f.info).unwrap())
        });
    }
    g.finish();
}

fn merkle_refresh(c: &mut Criterion) {
    let f = merkle(1 << 16, 460);
    c.bench_function("merkle_proof_update_n65536_k460", |b| b.iter(|| svc_core::merkle::proof_update(&f.proof, &f.info).unwrap()));
}

criterion_group!(benches, amt_trade_off, lattice_trade_off, verkle_degrees, merkle_refresh);
criterion_main!(benches);
