//! Data-parallel batch operations against sequential equivalents of the
//! same workload.
//!
//! With the default `parallel` feature the library entry points fan out
//! over a rayon pool; the `sequential` variants run the identical
//! per-point work (sampling included) in a plain loop. Building with
//! `--no-default-features` makes the library paths sequential too, which
//! is a useful sanity check that rayon dispatch is the only difference.
//! On a single-core host the parallel variants show pure dispatch
//! overhead; the comparison only becomes a speedup with real cores.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use gtic::barrier::{self, BarrierModel, Side};
use gtic::classify::{piece_ell, LayerConfig};
use gtic::sim::{self, OracleConfig};
use gtic::{State, SurfaceFamily};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FAMILIES: [SurfaceFamily; 3] = [
    SurfaceFamily::Primary,
    SurfaceFamily::TributarySame,
    SurfaceFamily::TributaryDiff,
];

/// Rejection-samples one in-domain point, mirroring the sweep's draw.
fn draw_point(model: &BarrierModel, family: SurfaceFamily, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let sup = model.vartheta_sup(family);
    loop {
        let vs = rng.gen_range(1e-7..sup - 1e-7);
        let Ok(cap) = model.tau_max(family, vs) else {
            continue;
        };
        let lo = model.tau_min(family, vs) + 1e-7;
        if cap - 1e-7 <= lo {
            continue;
        }
        return (lo + (cap - 1e-7 - lo) * rng.gen::<f64>(), vs);
    }
}

fn eval_residual(
    model: &BarrierModel,
    family: SurfaceFamily,
    side: Side,
    tau: f64,
    vs: f64,
) -> f64 {
    let ell = model.ell();
    let (z, nu) = match family {
        SurfaceFamily::Primary => (
            barrier::primary(ell, side, tau, vs),
            barrier::primary_normal(ell, side, tau, vs),
        ),
        SurfaceFamily::TributarySame => (
            barrier::tributary_same(ell, side, tau, vs),
            barrier::tributary_same_normal(ell, side, tau, vs),
        ),
        SurfaceFamily::TributaryDiff => (
            barrier::tributary_diff(ell, side, tau, vs),
            barrier::tributary_diff_normal(ell, side, tau, vs),
        ),
    };
    sim::semipermeability_residual(&z, &nu).abs()
}

fn bench_semipermeability(c: &mut Criterion) {
    let model = BarrierModel::build(0.5).unwrap();
    let mut group = c.benchmark_group("semipermeability_sweep");
    for &n in &[1_000usize, 5_000] {
        group.bench_with_input(BenchmarkId::new("parallel_batch", n), &n, |b, &n| {
            b.iter(|| black_box(sim::semipermeability_sweep(&model, n, 42)))
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, &n| {
            b.iter(|| {
                // Same piece coverage as the batch call: three surface
                // families on both sides, n points each, sampling
                // included.
                let mut worst: f64 = 0.0;
                let mut rng = ChaCha8Rng::seed_from_u64(42);
                for side in Side::BOTH {
                    for family in FAMILIES {
                        for _ in 0..n {
                            let (tau, vs) = draw_point(&model, family, &mut rng);
                            worst = worst.max(eval_residual(&model, family, side, tau, vs));
                        }
                    }
                }
                black_box(worst)
            })
        });
    }
    group.finish();
}

fn bench_round_trip(c: &mut Criterion) {
    let model = BarrierModel::build(1.0).unwrap();
    let cfg = LayerConfig::default();
    let mut group = c.benchmark_group("round_trip_sweep");
    let n = 2_000usize;
    group.bench_function("parallel_batch", |b| {
        b.iter(|| black_box(sim::round_trip_sweep(&model, &cfg, n, 7)))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            let mut worst: f64 = 0.0;
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            for side in Side::BOTH {
                for family in FAMILIES {
                    for _ in 0..n {
                        let (tau, vs) = draw_point(&model, family, &mut rng);
                        let z = match family {
                            SurfaceFamily::Primary => barrier::primary(1.0, side, tau, vs),
                            SurfaceFamily::TributarySame => {
                                barrier::tributary_same(1.0, side, tau, vs)
                            }
                            SurfaceFamily::TributaryDiff => {
                                barrier::tributary_diff(1.0, side, tau, vs)
                            }
                        };
                        let rec = piece_ell(family, side, &z).unwrap();
                        worst = worst.max((rec - 1.0).abs());
                    }
                }
            }
            black_box(worst)
        })
    });
    group.finish();
}

fn bench_slice(c: &mut Criterion) {
    let model = BarrierModel::build(0.5).unwrap();
    let mut group = c.benchmark_group("slice_sampling");
    let n = 2_000usize;
    group.bench_function("parallel_batch", |b| {
        b.iter(|| black_box(model.slice(2.0, n)))
    });
    group.bench_function("sequential", |b| {
        // The same slice pieces sampled one after another.
        b.iter(|| {
            let theta: f64 = 2.0;
            let mut acc = 0.0f64;
            for side in Side::BOTH {
                let v = side.sign();
                let for_primary = (1.0 - v) * std::f64::consts::PI + v * theta;
                let for_up = (1.0 + v) * std::f64::consts::PI - v * theta;
                for family in FAMILIES {
                    let vs = if family == SurfaceFamily::Primary {
                        for_primary
                    } else {
                        for_up
                    };
                    let Ok(cap) = model.tau_max(family, vs) else {
                        continue;
                    };
                    let lo = model.tau_min(family, vs) + 1e-9;
                    for i in 0..n {
                        let tau = lo + (cap - 1e-9 - lo) * i as f64 / (n - 1) as f64;
                        acc += eval_residual(&model, family, side, tau, vs);
                    }
                }
            }
            black_box(acc)
        })
    });
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let cfg = OracleConfig {
        stages: 4,
        stage_dt: 0.8,
        ..Default::default()
    };
    let z = State::new(0.1, 0.8, 2.4);
    c.bench_function("game_oracle_probe", |b| {
        b.iter(|| black_box(sim::game_oracle(&z, 0.5, &cfg).unwrap().outcome))
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_semipermeability, bench_round_trip, bench_slice, bench_oracle
}
criterion_main!(benches);
