use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use lgc_core::bitcodec::{elias_delta_write, subset_write};
use lgc_core::partition::{PartitionCoder, SharedRandomness};
use lgc_core::protocols::{self, psi_from_sets, PartitionOptions};
use lgc_core::simlab::{sample, LawSpec};
use lgc_core::{groebner_basis, sigma, zeros, BitWriter, CodecKind};

fn elias(c: &mut Criterion) {
    c.bench_function("elias_delta_1_to_4096", |b| {
        b.iter(|| {
            let mut w = BitWriter::new();
            for n in 1..=4096u64 {
                elias_delta_write(&mut w, black_box(n)).unwrap();
            }
            w.finish()
        })
    });
}

fn enumerative(c: &mut Criterion) {
    let set = sample(&LawSpec::Single { p: 0.2 }, 12, 1).unwrap().inner;
    let points: Vec<u64> = set.iter().map(|i| i as u64).collect();
    c.bench_function("subset_rank_n4096_p0.2", |b| {
        b.iter(|| {
            let mut w = BitWriter::new();
            subset_write(&mut w, 4096, black_box(&points)).unwrap();
            w.finish()
        })
    });
    let s = sigma(&set);
    c.bench_function("t1_encode_m12", |b| b.iter(|| protocols::t1_encode(black_box(&s)).unwrap()));
    c.bench_function("zeros_sigma_m12", |b| b.iter(|| zeros(&sigma(black_box(&set))).unwrap()));
}

fn partition(c: &mut Criterion) {
    let mut group = c.benchmark_group("partition_encode");
    for (kind, m) in [(CodecKind::Linear, 10), (CodecKind::Linear, 12), (CodecKind::Random, 4), (CodecKind::Naive, 12)] {
        let draw = sample(&LawSpec::Nested { inner: 0.25, outer: 0.75 }, m, 2).unwrap();
        let x = psi_from_sets(&draw.inner, draw.outer.as_ref().unwrap()).unwrap();
        let coder = PartitionCoder::new(kind, SharedRandomness::for_law(9, 0.25, 0.25));
        group.bench_with_input(BenchmarkId::new(kind.name(), 1usize << m), &x, |b, x| {
            b.iter(|| {
                let mut w = BitWriter::new();
                coder.encode(x, &mut w).unwrap();
                w.finish()
            })
        });
    }
    group.finish();

    let draw = sample(&LawSpec::Nested { inner: 0.25, outer: 0.75 }, 12, 3).unwrap();
    let (s, q) = (sigma(&draw.inner), sigma(draw.outer.as_ref().unwrap()));
    c.bench_function("t4_encode_linear_m12", |b| {
        b.iter(|| protocols::t4_encode(&s, &q, PartitionOptions::new(CodecKind::Linear, 5)).unwrap())
    });
}

fn groebner(c: &mut Criterion) {
    let mut group = c.benchmark_group("groebner_basis_of_sigma");
    group.sample_size(10);
    for m in [6, 8, 10] {
        let s = sigma(&sample(&LawSpec::Single { p: 0.3 }, m, 4).unwrap().inner);
        group.bench_with_input(BenchmarkId::from_parameter(m), &s, |b, s| b.iter(|| groebner_basis(s).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, elias, enumerative, partition, groebner);
criterion_main!(benches);
