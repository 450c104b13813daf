use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use hplanar_core::connection::{integrate_geodesic, weyl_connection};
use hplanar_core::planar::{decompose_a1, make_a1, AStructure, OneFormList};
use hplanar_core::quaternion::{QuatCovector, Quaternion};
use hplanar_core::rng::{gaussian_vector, seeded};
use hplanar_core::{tau, Vector};

fn exterior(c: &mut Criterion) {
    let q = AStructure::quaternionic(2).unwrap();
    let x = gaussian_vector(&mut seeded(1), 8);
    c.bench_function("tau quaternionic R^8", |b| b.iter(|| tau(black_box(&x), q.affinors()).unwrap()));
}

fn decompose(c: &mut Criterion) {
    let q = AStructure::quaternionic(2).unwrap();
    let mut rng = seeded(2);
    let forms = OneFormList((0..4).map(|_| gaussian_vector(&mut rng, 8)).collect());
    let p = make_a1(&forms, &q).unwrap();
    c.bench_function("decompose_a1 quaternionic R^8", |b| {
        b.iter(|| decompose_a1(black_box(&p), &q, 3).unwrap())
    });
}

fn geodesic(c: &mut Criterion) {
    let u = QuatCovector(vec![Quaternion::new(0.3, 0.1, -0.2, 0.05), Quaternion::new(-0.1, 0.2, 0.0, 0.1)]);
    let conn = weyl_connection(&u, 2).unwrap();
    let x0 = Vector::zeros(8);
    let v0 = Vector::from_fn(8, |r, _| if r == 0 { 1.0 } else { 0.0 });
    c.bench_function("rk4 weyl geodesic 1000 steps", |b| {
        b.iter(|| integrate_geodesic(&conn, black_box(&x0), &v0, 1.0, 1e-3).unwrap())
    });
}

criterion_group!(benches, exterior, decompose, geodesic);
criterion_main!(benches);
