//! Congruence of planar domains via their boundary polygons.

use nalgebra::Point2;

use super::PlanarDomain;
use crate::scalar::Real;

/// Counter-clockwise boundary as (edge length, interior angle at its end)
/// pairs, with straight vertices removed.
pub fn boundary_signature<R: Real>(d: &PlanarDomain<R>) -> Vec<(R, R)> {
    let mut pts: Vec<Point2<R>> = d.boundary.vertices.clone();
    if d.boundary.signed_area() < R::zero() {
        pts.reverse();
    }
    let straight = R::lit(1e-9);
    let turn = |a: &Point2<R>, b: &Point2<R>, c: &Point2<R>| {
        let u = b - a;
        let v = c - b;
        (u.x * v.y - u.y * v.x).atan2(u.dot(&v))
    };
    loop {
        let m = pts.len();
        let drop = (0..m).find(|&k| turn(&pts[(k + m - 1) % m], &pts[k], &pts[(k + 1) % m]).abs() < straight);
        match drop {
            Some(k) if m > 3 => {
                pts.remove(k);
            }
            _ => break,
        }
    }
    let m = pts.len();
    (0..m)
        .map(|k| {
            let (a, b, c) = (&pts[k], &pts[(k + 1) % m], &pts[(k + 2) % m]);
            ((b - a).norm(), R::pi() - turn(a, b, c))
        })
        .collect()
}

fn interleave<R: Real>(sig: &[(R, R)]) -> Vec<R> {
    sig.iter().flat_map(|&(l, a)| [l, a]).collect()
}

/// Cyclic shifts of `s` and of its reversal that begin with an edge length.
fn dihedral_images<R: Real>(s: &[R]) -> Vec<Vec<R>> {
    let n = s.len();
    let mut rev: Vec<R> = s.iter().rev().copied().collect();
    rev.rotate_left(1);
    let mut out = Vec::with_capacity(n);
    for base in [s.to_vec(), rev] {
        for shift in (0..n).step_by(2) {
            let mut r = base.clone();
            r.rotate_left(shift);
            out.push(r);
        }
    }
    out
}

/// Whether some rigid motion (reflections allowed) carries one boundary
/// onto the other, comparing lengths relative to the larger scale at 1e-9.
pub fn congruent<R: Real>(a: &PlanarDomain<R>, b: &PlanarDomain<R>) -> bool {
    let sa = interleave(&boundary_signature(a));
    let sb = interleave(&boundary_signature(b));
    if sa.len() != sb.len() {
        return false;
    }
    let tol = R::lit(1e-9).max(R::eps() * R::lit(1e3)) * (R::one() + a.triangle.scale().max(b.triangle.scale()));
    dihedral_images(&sb).iter().any(|img| img.iter().zip(&sa).all(|(x, y)| (*x - *y).abs() <= tol))
}

/// Lexicographically least dihedral image of the boundary signature, rounded
/// to integer multiples of 1e-9.
pub fn canonical_boundary_signature<R: Real>(d: &PlanarDomain<R>) -> Vec<i64> {
    let s = interleave(&boundary_signature(d));
    dihedral_images(&s)
        .into_iter()
        .map(|img| img.iter().map(|x| (x.as_f64() * 1e9).round() as i64).collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reversal_keeps_pairs_aligned() {
        let s = [1.0, 10.0, 2.0, 20.0, 3.0, 30.0];
        let images = dihedral_images(&s);
        assert!(images.contains(&vec![3.0, 20.0, 2.0, 10.0, 1.0, 30.0]));
        assert_eq!(images.len(), 6);
    }
}
