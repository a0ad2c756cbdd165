//! Detection of overlapping tiles and self-touching boundaries.

use nalgebra::Point2;
use serde::Serialize;

use super::PlanarDomain;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OverlapWitness {
    /// Two tiles share interior points.
    Tiles { first: usize, second: usize },
    /// Two boundary edges touch away from a shared endpoint, or adjacent edges
    /// fold back onto each other.
    BoundaryContact { first_edge: usize, second_edge: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Embedding {
    Embedded,
    Overlap(OverlapWitness),
}

impl Embedding {
    pub fn is_embedded(&self) -> bool {
        matches!(self, Embedding::Embedded)
    }
}

fn cross<R: Real>(o: &Point2<R>, a: &Point2<R>, b: &Point2<R>) -> R {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Separating-axis test on two triangles; touching counts as disjoint.
fn triangles_overlap<R: Real>(a: &[Point2<R>; 3], b: &[Point2<R>; 3], slack: R) -> bool {
    for tri in [a, b] {
        for k in 0..3 {
            let p = tri[k];
            let q = tri[(k + 1) % 3];
            let axis = nalgebra::Vector2::new(q.y - p.y, p.x - q.x);
            let proj = |pts: &[Point2<R>; 3]| {
                let vals = pts.map(|v| axis.dot(&v.coords));
                let lo = vals[0].min(vals[1]).min(vals[2]);
                let hi = vals[0].max(vals[1]).max(vals[2]);
                (lo, hi)
            };
            let (alo, ahi) = proj(a);
            let (blo, bhi) = proj(b);
            if ahi <= blo + slack || bhi <= alo + slack {
                return false;
            }
        }
    }
    true
}

fn segment_distance<R: Real>(p1: &Point2<R>, p2: &Point2<R>, q1: &Point2<R>, q2: &Point2<R>) -> R {
    let d1 = cross(p1, p2, q1);
    let d2 = cross(p1, p2, q2);
    let d3 = cross(q1, q2, p1);
    let d4 = cross(q1, q2, p2);
    let zero = R::zero();
    if ((d1 > zero && d2 < zero) || (d1 < zero && d2 > zero)) && ((d3 > zero && d4 < zero) || (d3 < zero && d4 > zero)) {
        return zero;
    }
    let point_seg = |x: &Point2<R>, a: &Point2<R>, b: &Point2<R>| {
        let ab = b - a;
        let len2 = ab.norm_squared();
        let s = if len2 > zero { ((x - a).dot(&ab) / len2).max(zero).min(R::one()) } else { zero };
        (x - (a + ab * s)).norm()
    };
    point_seg(p1, q1, q2)
        .min(point_seg(p2, q1, q2))
        .min(point_seg(q1, p1, p2))
        .min(point_seg(q2, p1, p2))
}

/// Checks that the placed tiles have disjoint interiors and that the boundary
/// is a simple closed curve.
pub fn check_embedding<R: Real>(d: &PlanarDomain<R>) -> Embedding {
    let scale = d.triangle.scale();
    let tiles: Vec<[Point2<R>; 3]> = (0..d.n()).map(|t| d.tile_vertices(t)).collect();
    let slack = R::lit(1e-12).max(R::eps() * R::lit(64.0)) * scale * scale;
    for i in 0..tiles.len() {
        for j in i + 1..tiles.len() {
            if triangles_overlap(&tiles[i], &tiles[j], slack) {
                return Embedding::Overlap(OverlapWitness::Tiles { first: i, second: j });
            }
        }
    }

    let poly = &d.boundary;
    let m = poly.vertices.len();
    let fold = R::two_pi() - R::lit(1e-9).max(R::eps() * R::lit(64.0));
    for k in 0..m {
        if poly.angles[k] >= fold {
            return Embedding::Overlap(OverlapWitness::BoundaryContact { first_edge: (k + m - 1) % m, second_edge: k });
        }
    }
    let contact = R::lit(1e-9).max(R::eps() * R::lit(64.0)) * scale;
    for i in 0..m {
        for j in i + 1..m {
            if j == i + 1 || (i == 0 && j == m - 1) {
                continue;
            }
            let gap = segment_distance(
                &poly.vertices[i],
                &poly.vertices[(i + 1) % m],
                &poly.vertices[j],
                &poly.vertices[(j + 1) % m],
            );
            if gap < contact {
                return Embedding::Overlap(OverlapWitness::BoundaryContact { first_edge: i, second_edge: j });
            }
        }
    }
    Embedding::Embedded
}
