//! Edge and triangle quadrature rules.

use crate::mesh::Vertex;

/// Relative tolerance `|r1 - r2| <= tol * length_scale` for a vertical edge.
pub const VERTICAL_EDGE_TOL: f64 = 1e-12;

/// Rules on the edge parameter `s ∈ [0, 1]`; weights sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeRule {
    /// Midpoint rule, used where r is constant along the edge.
    OnePoint,
    TwoPointGauss,
}

const ONE_POINT: [(f64, f64); 1] = [(0.5, 1.0)];
// 0.5 ∓ 0.5/√3
const TWO_POINT: [(f64, f64); 2] = [(0.211_324_865_405_187_13, 0.5), (0.788_675_134_594_812_9, 0.5)];

impl EdgeRule {
    /// Picks the one-point rule on vertical edges, two-point Gauss otherwise.
    pub fn for_edge(p: Vertex, q: Vertex, length_scale: f64) -> Self {
        if is_vertical(p, q, length_scale) {
            Self::OnePoint
        } else {
            Self::TwoPointGauss
        }
    }

    /// `(s, weight)` pairs.
    pub fn points(self) -> &'static [(f64, f64)] {
        match self {
            Self::OnePoint => &ONE_POINT,
            Self::TwoPointGauss => &TWO_POINT,
        }
    }
}

pub fn is_vertical(p: Vertex, q: Vertex, length_scale: f64) -> bool {
    (p.r - q.r).abs() <= VERTICAL_EDGE_TOL * length_scale
}

/// Point on the segment p→q at parameter s.
pub fn lerp(p: Vertex, q: Vertex, s: f64) -> Vertex {
    Vertex::new(p.r + s * (q.r - p.r), p.z + s * (q.z - p.z))
}

/// Degree-4 symmetric rule (6 points): barycentric coordinates and weights
/// normalized to sum to one.
#[allow(clippy::excessive_precision)]
pub const TRIANGLE_DEGREE4: [([f64; 3], f64); 6] = {
    const A1: f64 = 0.445_948_490_915_964_886;
    const B1: f64 = 0.108_103_018_168_070_227;
    const W1: f64 = 0.223_381_589_678_011_466;
    const A2: f64 = 0.091_576_213_509_770_743;
    const B2: f64 = 0.816_847_572_980_458_513;
    const W2: f64 = 0.109_951_743_655_321_867;
    [
        ([A1, A1, B1], W1),
        ([A1, B1, A1], W1),
        ([B1, A1, A1], W1),
        ([A2, A2, B2], W2),
        ([A2, B2, A2], W2),
        ([B2, A2, A2], W2),
    ]
};

/// Integrates `f` over the triangle (a, b, c) with the degree-4 rule.
pub fn integrate_triangle<F>(a: Vertex, b: Vertex, c: Vertex, mut f: F) -> f64
where
    F: FnMut(Vertex, [f64; 3]) -> f64,
{
    let area = 0.5 * ((b.r - a.r) * (c.z - a.z) - (c.r - a.r) * (b.z - a.z)).abs();
    TRIANGLE_DEGREE4
        .iter()
        .map(|&(l, w)| {
            let p = Vertex::new(
                l[0] * a.r + l[1] * b.r + l[2] * c.r,
                l[0] * a.z + l[1] * b.z + l[2] * c.z,
            );
            w * f(p, l)
        })
        .sum::<f64>()
        * area
}
