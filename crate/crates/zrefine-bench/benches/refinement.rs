//! Compares refinement strategies and codec throughput.
//!
//! `refine_scan` visits every in-region z-value, so it only runs in the
//! small space. Exact `refine_jump` is also confined there: in six
//! dimensions the number of exact runs explodes, which is the case the
//! widened variant exists for.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use zrefine::{approximate, refine_jump, refine_scan, ApproxParams, SpaceConfig};
use zrefine_bench::{sample_points, sample_regions};

fn codec(c: &mut Criterion) {
    let cfg = SpaceConfig::new(6, 10).expect("valid space");
    let points = sample_points(cfg, 1024, 0x5EED);
    c.bench_function("codec/encode_decode_1024_points_6d10b", |b| {
        b.iter(|| {
            let mut acc: u128 = 0;
            for point in &points {
                let z = cfg.encode(point).expect("point on the grid");
                acc ^= z ^ cfg.decode(z).expect("z on the grid")[0];
            }
            acc
        })
    });
}

fn small_space(c: &mut Criterion) {
    let cfg = SpaceConfig::new(3, 8).expect("valid space");
    let regions = sample_regions(cfg, 16, 16, 0xA11);
    let mut group = c.benchmark_group("refine_3d8b_side16");
    group.sample_size(20);
    group.bench_function("scan", |b| {
        b.iter(|| {
            for region in &regions {
                black_box(refine_scan(region.to_z_range(), region));
            }
        })
    });
    group.bench_function("jump", |b| {
        b.iter(|| {
            for region in &regions {
                black_box(refine_jump(region.to_z_range(), region));
            }
        })
    });
    group.bench_function("approx_then_jump", |b| {
        b.iter(|| {
            for region in &regions {
                let widened = approximate(region, &ApproxParams::with_threshold(500.0));
                black_box(refine_jump(region.to_z_range(), &widened));
            }
        })
    });
    group.finish();
}

fn wide_space(c: &mut Criterion) {
    let cfg = SpaceConfig::new(6, 10).expect("valid space");
    let regions = sample_regions(cfg, 324, 8, 0xB22);
    let mut group = c.benchmark_group("approx_6d10b_side324");
    group.sample_size(10);
    for threshold in [100.0, 500.0, 2000.0] {
        group.bench_function(format!("threshold_{threshold}"), |b| {
            b.iter(|| {
                for region in &regions {
                    let widened = approximate(region, &ApproxParams::with_threshold(threshold));
                    black_box(refine_jump(region.to_z_range(), &widened));
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, codec, small_space, wide_space);
criterion_main!(benches);
