use criterion::{criterion_group, criterion_main, Criterion};
use sharpcert::schrod::cm_sum;
use sharpcert::specfun::bessel_j;
use sharpcert::sphere::{ck_truncated, DEFAULT_R};
use sharpcert::{SchrodParams, SphereParams};
use std::hint::black_box;

fn bessel(c: &mut Criterion) {
    c.bench_function("bessel_j order 0.5..40 at x=1..2000", |b| {
        b.iter(|| {
            let mut s = 0.0;
            for two_nu in (1..=80).step_by(7) {
                for x in [1.0, 37.5, 640.0, 2000.0] {
                    s += bessel_j(black_box(two_nu as f64 / 2.0), black_box(x)).unwrap();
                }
            }
            s
        })
    });
}

fn sphere_coefficient(c: &mut Criterion) {
    let mut g = c.benchmark_group("ck_truncated");
    g.sample_size(10);
    for d in [3u32, 20] {
        let params = SphereParams::new(d).unwrap();
        g.bench_function(format!("d={d} k=2"), |b| {
            b.iter(|| ck_truncated(black_box(&params), 2, DEFAULT_R, 1e-9).unwrap().value)
        });
    }
    g.finish();
}

fn schrodinger_coefficient(c: &mut Criterion) {
    let params = SchrodParams::new(3).unwrap();
    c.bench_function("cm_sum d=3 m=500", |b| b.iter(|| cm_sum(black_box(&params), black_box(500))));
}

criterion_group!(kernels, bessel, sphere_coefficient, schrodinger_coefficient);
criterion_main!(kernels);
