//! Oracles and generators shared by the integration tests.
//!
//! The quadrature here is computed from scratch so that it shares nothing
//! with the library's own rules.

#![allow(dead_code)]

use std::f64::consts::PI;

use axivem::mesh::{ElementGeometry, Vertex};
use rand::rngs::StdRng;
use rand::Rng;

/// Gauss-Legendre nodes and weights on `[0, 1]`, roots found by Newton's
/// method on the three-term recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 + x), 0.5 * w));
    }
    out
}

/// `∫_0^1 f(s) ds` with 16 Gauss points.
pub fn line16<F: FnMut(f64) -> f64>(mut f: F) -> f64 {
    gauss_legendre(16).into_iter().map(|(s, w)| w * f(s)).sum()
}

/// `∫_T f dA` via the collapsed square `x = a + u((b - a) + v(c - b))`,
/// 16×16 Gauss points.
pub fn triangle16<F: FnMut(Vertex) -> f64>(a: Vertex, b: Vertex, c: Vertex, mut f: F) -> f64 {
    let twice_area = ((b.r - a.r) * (c.z - a.z) - (c.r - a.r) * (b.z - a.z)).abs();
    let rule = gauss_legendre(16);
    let mut sum = 0.0;
    for &(u, wu) in &rule {
        for &(v, wv) in &rule {
            let x = Vertex::new(
                a.r + u * ((b.r - a.r) + v * (c.r - b.r)),
                a.z + u * ((b.z - a.z) + v * (c.z - b.z)),
            );
            sum += wu * wv * u * f(x);
        }
    }
    twice_area * sum
}

/// `∫_E f dA` over a convex polygon, triangulated from its first vertex.
pub fn polygon16<F: FnMut(Vertex) -> f64>(vertices: &[Vertex], mut f: F) -> f64 {
    (1..vertices.len() - 1)
        .map(|i| triangle16(vertices[0], vertices[i], vertices[i + 1], &mut f))
        .sum()
}

/// Counter-clockwise convex polygon with 3 to 8 vertices on a rotated
/// ellipse, entirely in `r ≥ 0.5`.
pub fn random_convex_polygon(rng: &mut StdRng) -> Vec<Vertex> {
    let m = rng.gen_range(3..=8);
    let gaps: Vec<f64> = (0..m).map(|_| rng.gen_range(0.4..1.0)).collect();
    let total: f64 = gaps.iter().sum();
    let a = rng.gen_range(0.1..1.0);
    let b = a * rng.gen_range(0.4..1.0);
    let tilt = rng.gen_range(0.0..PI);
    let rc = 0.5 + a + rng.gen_range(0.0..2.0);
    let zc = rng.gen_range(-1.0..1.0);
    let mut theta = rng.gen_range(0.0..2.0 * PI);
    let mut out = Vec::with_capacity(m);
    for g in gaps {
        let (x, y) = (a * theta.cos(), b * theta.sin());
        out.push(Vertex::new(
            rc + x * tilt.cos() - y * tilt.sin(),
            zc + x * tilt.sin() + y * tilt.cos(),
        ));
        theta += 2.0 * PI * g / total;
    }
    out
}

pub fn random_geometry(rng: &mut StdRng) -> ElementGeometry {
    ElementGeometry::from_vertices(&random_convex_polygon(rng)).expect("valid polygon")
}

/// Axis-aligned rectangle `[r0, r0 + w] × [z0, z0 + h]`, counter-clockwise.
pub fn rectangle(r0: f64, z0: f64, w: f64, h: f64) -> Vec<Vertex> {
    vec![
        Vertex::new(r0, z0),
        Vertex::new(r0 + w, z0),
        Vertex::new(r0 + w, z0 + h),
        Vertex::new(r0, z0 + h),
    ]
}
