//! Euclidean realization of tilings by congruent triangles.

mod congruence;
mod embed;
mod svg;

use std::str::FromStr;

use nalgebra::{Matrix2, Point2, Vector2};
use serde::Serialize;

pub use congruence::{boundary_signature, canonical_boundary_signature, congruent};
pub use embed::{check_embedding, Embedding, OverlapWitness};
pub use svg::{export_svg, render_svg};

use crate::error::{ConeDefect, Error, Result};
use crate::scalar::Real;
use crate::tiling::{side_corners, BoundaryEdge, Tiling, VertexCycle, COLORS};

/// Angles (corner `i` opposite side `i`) and the length of side 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaseTriangle<R> {
    angles: [R; 3],
    scale: R,
}

fn angle_tolerance<R: Real>() -> R {
    R::lit(1e-12).max(R::eps() * R::lit(32.0))
}

impl<R: Real> BaseTriangle<R> {
    pub fn new(angles: [R; 3], scale: R) -> Result<Self> {
        if angles.iter().any(|&a| a <= R::zero()) {
            return Err(Error::InvalidTriangle("angles must be positive".into()));
        }
        if scale <= R::zero() {
            return Err(Error::InvalidTriangle("scale must be positive".into()));
        }
        let sum = angles[0] + angles[1] + angles[2];
        if (sum - R::pi()).abs() > angle_tolerance::<R>() {
            return Err(Error::InvalidTriangle(format!(
                "angles sum to {} instead of π",
                sum.as_f64()
            )));
        }
        Ok(BaseTriangle { angles, scale })
    }

    /// Third angle completes the sum to π.
    pub fn from_two_angles(a0: R, a1: R, scale: R) -> Result<Self> {
        Self::new([a0, a1, R::pi() - a0 - a1], scale)
    }

    pub fn equilateral(scale: R) -> Self {
        let third = R::frac_pi_3();
        BaseTriangle { angles: [third, third, third], scale }
    }

    pub fn angles(&self) -> [R; 3] {
        self.angles
    }

    pub fn angle(&self, corner: usize) -> R {
        self.angles[corner]
    }

    pub fn scale(&self) -> R {
        self.scale
    }

    pub fn scaled(&self, factor: R) -> Self {
        BaseTriangle { angles: self.angles, scale: self.scale * factor }
    }

    pub fn is_acute(&self) -> bool {
        self.angles.iter().all(|&a| a < R::frac_pi_2())
    }

    /// Length of side `c` by the law of sines.
    pub fn side_length(&self, c: usize) -> R {
        self.scale * self.angles[c].sin() / self.angles[0].sin()
    }

    pub fn area(&self) -> R {
        let v = self.vertices();
        let e1 = v[1] - v[0];
        let e2 = v[2] - v[0];
        (e1.x * e2.y - e1.y * e2.x).abs() / R::lit(2.0)
    }

    /// Corner positions in the reference frame: side 0 runs from corner 1 at
    /// the origin to corner 2 on the positive x-axis, corner 0 above it.
    pub fn vertices(&self) -> [Point2<R>; 3] {
        let v1 = Point2::origin();
        let v2 = Point2::new(self.scale, R::zero());
        let side2 = self.side_length(2);
        let v0 = Point2::new(side2 * self.angles[1].cos(), side2 * self.angles[1].sin());
        [v0, v1, v2]
    }

    /// Reflection of the reference triangle across its side `c`.
    pub fn side_reflection(&self, c: usize) -> RigidMotion<R> {
        let v = self.vertices();
        let [i, j] = side_corners(c);
        RigidMotion::reflection_across(&v[i], &v[j])
    }
}

/// Sum of given angles must be within this of π before the last angle is
/// snapped; covers inputs written with four or more decimals.
pub const ANGLE_SNAP: f64 = 5e-4;

impl FromStr for BaseTriangle<f64> {
    type Err = Error;

    /// Parses `a1,a2,a3[,scale]` in radians, or degrees with a `deg` suffix
    /// (`60,60,60deg`). `equilateral` is accepted, and the third angle may be
    /// `_` to complete the sum to π.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("equilateral") {
            return Ok(BaseTriangle::equilateral(1.0));
        }
        let (body, unit) = match s.strip_suffix("deg") {
            Some(b) => (b, std::f64::consts::PI / 180.0),
            None => (s, 1.0),
        };
        let parts: Vec<&str> = body.split(',').map(str::trim).collect();
        if parts.len() != 3 && parts.len() != 4 {
            return Err(Error::Parse(format!("triangle `{s}` needs three angles and an optional scale")));
        }
        let num = |t: &str| t.parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{t}` in `{s}`")));
        let a0 = num(parts[0])? * unit;
        let a1 = num(parts[1])? * unit;
        let a2 = match parts[2] {
            "_" => std::f64::consts::PI - a0 - a1,
            t => num(t)? * unit,
        };
        let scale = parts.get(3).map(|t| num(t)).transpose()?.unwrap_or(1.0);
        let sum = a0 + a1 + a2;
        if (sum - std::f64::consts::PI).abs() > ANGLE_SNAP {
            return Err(Error::InvalidTriangle(format!("angles sum to {sum}, not π")));
        }
        BaseTriangle::from_two_angles(a0, a1, scale)
    }
}

/// Angles at corners 0 and 1 of a triangle for which both domains of the
/// pair embed and are not congruent, chosen near the middle of the region
/// of such triangles. 13_6 has none.
const WARPS: &[(&str, f64, f64)] = &[
    ("7_1", 0.92, 1.26),
    ("7_2", 1.16, 1.18),
    ("7_3", 1.00, 1.06),
    ("13_1", 0.78, 1.28),
    ("13_2", 0.78, 1.28),
    ("13_3", 0.90, 1.44),
    ("13_4", 0.66, 1.68),
    ("13_5", 0.80, 1.82),
    ("13_7", 1.42, 0.92),
    ("13_8", 1.28, 0.78),
    ("13_9", 1.32, 0.62),
    ("15_1", 1.42, 0.92),
    ("15_2", 1.12, 1.02),
    ("15_3", 0.72, 1.50),
    ("15_4", 0.68, 1.26),
    ("21_1", 1.56, std::f64::consts::FRAC_PI_3),
];

/// A unit-scale triangle that realizes pair `id` as two planar drums.
pub fn warped_triangle(id: &str) -> Option<BaseTriangle<f64>> {
    let key = id.replace(['-', '.'], "_");
    WARPS
        .iter()
        .find(|w| w.0 == key)
        .map(|&(_, a0, a1)| BaseTriangle::from_two_angles(a0, a1, 1.0).expect("valid table entry"))
}

/// `x ↦ linear·x + translation`, with `linear` orthogonal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidMotion<R: Real> {
    pub linear: Matrix2<R>,
    pub translation: Vector2<R>,
}

impl<R: Real> RigidMotion<R> {
    pub fn identity() -> Self {
        RigidMotion { linear: Matrix2::identity(), translation: Vector2::zeros() }
    }

    pub fn translation(v: Vector2<R>) -> Self {
        RigidMotion { linear: Matrix2::identity(), translation: v }
    }

    pub fn rotation(theta: R) -> Self {
        let (s, c) = theta.sin_cos();
        RigidMotion { linear: Matrix2::new(c, -s, s, c), translation: Vector2::zeros() }
    }

    /// Mirror in the line through `p` and `q`.
    pub fn reflection_across(p: &Point2<R>, q: &Point2<R>) -> Self {
        let d = (q - p).normalize();
        let two = R::lit(2.0);
        let linear = Matrix2::new(
            two * d.x * d.x - R::one(),
            two * d.x * d.y,
            two * d.x * d.y,
            two * d.y * d.y - R::one(),
        );
        RigidMotion { linear, translation: p.coords - linear * p.coords }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        RigidMotion {
            linear: self.linear * other.linear,
            translation: self.linear * other.translation + self.translation,
        }
    }

    pub fn apply(&self, p: &Point2<R>) -> Point2<R> {
        Point2::from(self.linear * p.coords + self.translation)
    }

    pub fn is_orientation_reversing(&self) -> bool {
        self.linear.determinant() < R::zero()
    }

    pub fn max_difference(&self, other: &Self) -> R {
        (self.linear - other.linear).amax().max((self.translation - other.translation).amax())
    }
}

/// Position of one tile: the motion carrying the reference triangle onto it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Placement<R: Real> {
    pub motion: RigidMotion<R>,
    pub reflected: bool,
}

/// The boundary as one closed loop; `vertices[k]` starts `edges[k]`.
#[derive(Clone, Debug)]
pub struct BoundaryPolygon<R: Real> {
    pub vertices: Vec<Point2<R>>,
    pub edges: Vec<BoundaryEdge>,
    /// Interior angle at `vertices[k]`, from the tile corners meeting there.
    pub angles: Vec<R>,
}

impl<R: Real> BoundaryPolygon<R> {
    pub fn colors(&self) -> Vec<usize> {
        self.edges.iter().map(|e| e.color).collect()
    }

    /// Shoelace area (positive for counter-clockwise loops).
    pub fn signed_area(&self) -> R {
        let n = self.vertices.len();
        let mut twice = R::zero();
        for k in 0..n {
            let (a, b) = (self.vertices[k], self.vertices[(k + 1) % n]);
            twice += a.x * b.y - a.y * b.x;
        }
        twice / R::lit(2.0)
    }
}

#[derive(Serialize)]
struct PolygonJson {
    vertices: Vec<[f64; 2]>,
    colors: Vec<usize>,
}

/// A tiling laid out in the plane.
#[derive(Clone, Debug)]
pub struct PlanarDomain<R: Real> {
    pub triangle: BaseTriangle<R>,
    pub placements: Vec<Placement<R>>,
    /// Neighbor of each tile across each side, `None` on the boundary.
    pub neighbors: Vec<[Option<usize>; 3]>,
    pub boundary: BoundaryPolygon<R>,
    /// Interior vertices, in the order of `interior_vertices`.
    pub special_points: Vec<Point2<R>>,
    pub interior_vertices: Vec<VertexCycle>,
}

impl<R: Real> PlanarDomain<R> {
    pub fn n(&self) -> usize {
        self.placements.len()
    }

    /// Corner positions of tile `t`, corner `i` first at index `i`.
    pub fn tile_vertices(&self, t: usize) -> [Point2<R>; 3] {
        let m = &self.placements[t].motion;
        self.triangle.vertices().map(|v| m.apply(&v))
    }

    pub fn corner_position(&self, tile: usize, corner: usize) -> Point2<R> {
        self.tile_vertices(tile)[corner]
    }

    /// Sum of tile areas.
    pub fn area(&self) -> R {
        self.triangle.area() * R::lit(self.n() as f64)
    }

    /// Moves every placement by `g`.
    pub fn transformed(&self, g: &RigidMotion<R>) -> Self {
        let mut out = self.clone();
        for p in &mut out.placements {
            p.motion = g.compose(&p.motion);
            p.reflected = p.motion.is_orientation_reversing();
        }
        for v in &mut out.boundary.vertices {
            *v = g.apply(v);
        }
        for v in &mut out.special_points {
            *v = g.apply(v);
        }
        out
    }

    pub fn boundary_json(&self) -> serde_json::Value {
        let poly = PolygonJson {
            vertices: self.boundary.vertices.iter().map(|p| [p.x.as_f64(), p.y.as_f64()]).collect(),
            colors: self.boundary.colors(),
        };
        serde_json::to_value(poly).expect("serializable")
    }
}

/// The unit square as two right isosceles tiles glued along the hypotenuse.
pub fn unit_square<R: Real>() -> (Tiling, PlanarDomain<R>) {
    let glue = [
        crate::catalog::Permutation::from_images(vec![1, 0]).expect("transposition"),
        crate::catalog::Permutation::identity(2),
        crate::catalog::Permutation::identity(2),
    ];
    let t = crate::tiling::build_tiling(&glue).expect("two tiles glued once");
    let tri = BaseTriangle::new([R::frac_pi_2(), R::frac_pi_4(), R::frac_pi_4()], R::lit(2.0).sqrt()).expect("right isosceles");
    let d = realize(&t, &tri, &default_pose()).expect("flat");
    (t, d)
}

/// Default pose: tile 0 coincides with the reference triangle.
pub fn default_pose<R: Real>() -> RigidMotion<R> {
    RigidMotion::identity()
}

/// Places tile 0 at `pose0` and every other tile by reflecting across shared
/// sides along a breadth-first spanning tree.
///
/// Interior vertices where `2m` tiles meet at corner `i` need `angles[i] = π/m`;
/// otherwise the result is a cone manifold and is reported, not developed.
pub fn realize<R: Real>(t: &Tiling, tri: &BaseTriangle<R>, pose0: &RigidMotion<R>) -> Result<PlanarDomain<R>> {
    let tol = R::lit(1e-9).max(R::eps() * R::lit(1e3));
    let interior = t.interior_cycles();
    let defects: Vec<ConeDefect> = interior
        .iter()
        .filter_map(|c| {
            let total = tri.angle(c.corner) * R::lit(c.tiles.len() as f64);
            let deficit = R::two_pi() - total;
            (deficit.abs() > tol).then(|| ConeDefect { corner: c.corner, tiles: c.tiles.clone(), deficit: deficit.as_f64() })
        })
        .collect();
    if !defects.is_empty() {
        return Err(Error::ConeManifold(defects));
    }

    let reflections: [RigidMotion<R>; 3] = [0, 1, 2].map(|c| tri.side_reflection(c));
    let n = t.n();
    let mut motions: Vec<Option<RigidMotion<R>>> = vec![None; n];
    motions[0] = Some(*pose0);
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        let m = motions[u].expect("queued tiles are placed");
        for c in 0..COLORS {
            if let Some(v) = t.neighbor(u, c) {
                if motions[v].is_none() {
                    motions[v] = Some(m.compose(&reflections[c]));
                    queue.push_back(v);
                }
            }
        }
    }
    let motions: Vec<RigidMotion<R>> = motions.into_iter().map(|m| m.expect("tiling is connected")).collect();

    let holonomy_tol = tol * (R::one() + tri.scale());
    for u in 0..n {
        for c in 0..COLORS {
            if let Some(v) = t.neighbor(u, c) {
                let expected = motions[u].compose(&reflections[c]);
                if expected.max_difference(&motions[v]) > holonomy_tol {
                    return Err(Error::InconsistentRealization { tile: u, color: c });
                }
            }
        }
    }

    let placements: Vec<Placement<R>> = motions
        .iter()
        .map(|m| Placement { motion: *m, reflected: m.is_orientation_reversing() })
        .collect();
    let neighbors = (0..n).map(|u| [0, 1, 2].map(|c| t.neighbor(u, c))).collect();
    let base = tri.vertices();
    let corner_at = |tile: usize, corner: usize| placements[tile].motion.apply(&base[corner]);

    let loops = t.boundary_loops();
    let outer = loops.into_iter().next().expect("a finite tiling has boundary");
    let m = outer.edges.len();
    let vertices = outer.edges.iter().map(|e| corner_at(e.tile, e.start_corner)).collect();
    let angles = (0..m)
        .map(|k| {
            let chain = &outer.corners[(k + m - 1) % m];
            tri.angle(chain.corner) * R::lit(chain.tiles.len() as f64)
        })
        .collect();
    let special_points = interior.iter().map(|c| corner_at(c.tiles[0], c.corner)).collect();
    Ok(PlanarDomain {
        triangle: *tri,
        placements,
        neighbors,
        boundary: BoundaryPolygon { vertices, edges: outer.edges, angles },
        special_points,
        interior_vertices: interior,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::find;
    use crate::tiling::build_tiling;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn tiling(id: &str, left: bool) -> Tiling {
        let ex = find(id).unwrap();
        build_tiling(if left { &ex.left } else { &ex.right }).unwrap()
    }

    #[test]
    fn triangle_validation() {
        assert!(BaseTriangle::new([1.0, 1.0, 1.0], 1.0).is_err());
        assert!(BaseTriangle::new([-0.1, 1.0, PI - 0.9], 1.0).is_err());
        let t = BaseTriangle::new([PI / 2.0, PI / 4.0, PI / 4.0], 2f64.sqrt()).unwrap();
        assert_relative_eq!(t.area(), 0.5, epsilon = 1e-15);
        let v = t.vertices();
        assert_relative_eq!((v[1] - v[0]).dot(&(v[2] - v[0])), 0.0, epsilon = 1e-15);
        assert_relative_eq!((v[1] - v[2]).norm(), 2f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(t.side_length(1), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn triangle_parsing() {
        let t: BaseTriangle<f64> = "60,60,60deg".parse().unwrap();
        assert_relative_eq!(t.angle(2), PI / 3.0, epsilon = 1e-15);
        let t: BaseTriangle<f64> = "0.9,1.1,1.1416".parse().unwrap();
        assert_relative_eq!(t.angle(2), PI - 2.0, epsilon = 1e-15);
        let t: BaseTriangle<f64> = "0.9,1.1,_,2".parse().unwrap();
        assert_eq!(t.scale(), 2.0);
        assert!("1,1,1".parse::<BaseTriangle<f64>>().is_err());
        assert!("1,1".parse::<BaseTriangle<f64>>().is_err());
        assert!("equilateral".parse::<BaseTriangle<f64>>().unwrap().is_acute());
    }

    #[test]
    fn reflections_fix_their_side() {
        let tri = BaseTriangle::new([0.9, 1.1, PI - 2.0], 1.3).unwrap();
        let v = tri.vertices();
        for c in 0..3 {
            let r = tri.side_reflection(c);
            for i in side_corners(c) {
                assert!((r.apply(&v[i]) - v[i]).norm() < 1e-14);
            }
            assert!(r.is_orientation_reversing());
            assert!(r.compose(&r).max_difference(&RigidMotion::identity()) < 1e-14);
        }
    }

    #[test]
    fn propeller_realizes_with_matching_parity() {
        let t = tiling("7_1", true);
        let tri = BaseTriangle::new([0.9, 1.1, PI - 2.0], 1.0).unwrap();
        let d = realize(&t, &tri, &default_pose()).unwrap();
        assert_eq!(d.boundary.vertices.len(), 9);
        for (u, p) in d.placements.iter().enumerate() {
            assert_eq!(p.reflected, t.parity(u) < 0);
        }
        // glued tiles share their common side pointwise
        for u in 0..7 {
            for c in 0..3 {
                if let Some(v) = t.neighbor(u, c) {
                    for i in side_corners(c) {
                        assert!((d.corner_position(u, i) - d.corner_position(v, i)).norm() < 1e-12);
                    }
                }
            }
        }
        assert_relative_eq!(d.boundary.signed_area().abs(), d.area(), max_relative = 1e-12);
    }

    #[test]
    fn homophonic_pair_needs_third_of_pi() {
        let t = tiling("21_1", true);
        let corner = t.interior_cycles()[0].corner;
        assert_eq!(corner, 1);
        let good = BaseTriangle::from_two_angles(1.2, PI / 3.0, 1.0).unwrap();
        let d = realize(&t, &good, &default_pose()).unwrap();
        assert_eq!(d.special_points.len(), 1);
        let bad = BaseTriangle::from_two_angles(1.2, 1.0, 1.0).unwrap();
        match realize(&t, &bad, &default_pose()) {
            Err(Error::ConeManifold(defects)) => {
                assert_eq!(defects.len(), 1);
                assert_relative_eq!(defects[0].deficit, 2.0 * PI - 6.0, epsilon = 1e-12);
            }
            other => panic!("expected cone manifold, got {other:?}"),
        }
    }

    #[test]
    fn realization_is_equivariant() {
        let t = tiling("7_2", false);
        let tri = BaseTriangle::new([0.8, 1.2, PI - 2.0], 1.0).unwrap();
        let g = RigidMotion::rotation(0.7).compose(&RigidMotion::translation(Vector2::new(3.0, -1.0)));
        let a = realize(&t, &tri, &default_pose()).unwrap().transformed(&g);
        let b = realize(&t, &tri, &g).unwrap();
        for (p, q) in a.placements.iter().zip(&b.placements) {
            assert!(p.motion.max_difference(&q.motion) < 1e-12);
        }
    }

    #[test]
    fn f32_realization() {
        let t = tiling("7_1", true);
        let tri = BaseTriangle::<f32>::from_two_angles(0.9, 1.1, 1.0).unwrap();
        let d = realize(&t, &tri, &default_pose()).unwrap();
        assert!((d.boundary.signed_area().abs() - d.area()).abs() < 1e-5);
    }
}
