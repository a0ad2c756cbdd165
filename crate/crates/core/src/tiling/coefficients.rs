use std::fmt;
use std::ops::{Add, Neg};

use nalgebra::{DMatrix, Scalar};
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{BoundaryCondition, Tiling, TransplantMap, VertexCycle};
use crate::error::{Error, Result};
use crate::scalar::Rational;

/// `a·Tk + b·Tm` over any scalar ring.
pub fn combine<S>(a: S, tk: &TransplantMap, b: S, tm: &TransplantMap) -> DMatrix<S>
where
    S: Scalar + Zero + One + Neg<Output = S> + Add<Output = S> + std::ops::Mul<Output = S> + Copy,
{
    let k: DMatrix<S> = tk.into();
    let m: DMatrix<S> = tm.into();
    k.map(|x| x * a).zip_map(&m, |x, y| x + y * b)
}

/// The two quadratic conditions for `a·Tk + b·Tm` to be orthogonal:
/// `diagonal · (a², ab, b²) = 1` and `off_diagonal · (a², ab, b²) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NormPreservingSystem {
    pub diagonal: [i64; 3],
    pub off_diagonal: [i64; 3],
}

impl fmt::Display for NormPreservingSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn quad(c: [i64; 3]) -> String {
            let mut parts = Vec::new();
            for (coef, mono) in c.iter().zip(["a²", "ab", "b²"]) {
                match coef {
                    0 => {}
                    1 => parts.push(mono.to_string()),
                    _ => parts.push(format!("{coef}{mono}")),
                }
            }
            if parts.is_empty() { "0".into() } else { parts.join(" + ") }
        }
        write!(f, "{} = 1, {} = 0", quad(self.diagonal), quad(self.off_diagonal))
    }
}

/// One real solution `(a, b)`.
#[derive(Clone, Debug, Serialize)]
pub struct NormPreservingPair {
    pub a: f64,
    pub b: f64,
    /// Present when both coefficients are rational.
    #[serde(serialize_with = "ser_exact")]
    pub exact: Option<(Rational, Rational)>,
    /// max |(aTk + bTm)ᵀ(aTk + bTm) − I|
    pub orthogonality_error: f64,
}

fn ser_exact<S: serde::Serializer>(v: &Option<(Rational, Rational)>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some((a, b)) => s.collect_seq([a.to_string(), b.to_string()]),
        None => s.serialize_none(),
    }
}

/// `(δ, ω)` when `g = δ·I + ω·(J − I)`.
fn two_value_pattern(g: &DMatrix<i64>) -> Result<(i64, i64)> {
    let n = g.nrows();
    let d = g[(0, 0)];
    let w = if n > 1 { g[(0, 1)] } else { 0 };
    for i in 0..n {
        for j in 0..n {
            if g[(i, j)] != if i == j { d } else { w } {
                return Err(Error::NotReducible);
            }
        }
    }
    Ok((d, w))
}

/// Reduces the Gram matrix of `a·Tk + b·Tm` to two scalar equations.
///
/// Parity signs conjugate the Gram matrix by a diagonal ±1 matrix, which
/// does not affect orthogonality, so the unsigned supports are used.
pub fn norm_preserving_system(tk: &TransplantMap, tm: &TransplantMap) -> Result<NormPreservingSystem> {
    if tk.n() != tm.n() {
        return Err(Error::DegreeMismatch { expected: tk.n(), found: tm.n() });
    }
    let a = tk.matrix().map(i64::abs);
    let b = tm.matrix().map(i64::abs);
    let (da, wa) = two_value_pattern(&(a.transpose() * &a))?;
    let (db, wb) = two_value_pattern(&(b.transpose() * &b))?;
    let cross = a.transpose() * &b;
    let (dx, wx) = two_value_pattern(&(&cross + cross.transpose()))?;
    Ok(NormPreservingSystem { diagonal: [da, dx, db], off_diagonal: [wa, wx, wb] })
}

fn rational_sqrt(r: Rational) -> Option<Rational> {
    fn isqrt(x: i64) -> Option<i64> {
        if x < 0 {
            return None;
        }
        let s = (x as f64).sqrt().round() as i64;
        (s - 1..=s + 1).find(|&c| c >= 0 && c * c == x)
    }
    Some(Rational::new(isqrt(*r.numer())?, isqrt(*r.denom())?))
}

/// All real `(a, b)` making `a·Tk + b·Tm` norm-preserving.
pub fn norm_preserving_coefficients(tk: &TransplantMap, tm: &TransplantMap) -> Result<Vec<NormPreservingPair>> {
    let sys = norm_preserving_system(tk, tm)?;
    let [wa, wx, wb] = sys.off_diagonal;
    let diag = |u: Rational, v: Rational| {
        let [da, dx, db] = sys.diagonal.map(Rational::from_integer);
        da * u * u + dx * u * v + db * v * v
    };

    // Directions (u, v) along which the off-diagonal form vanishes; each is
    // either exact or only available in floating point.
    enum Direction {
        Exact(Rational, Rational),
        Float(f64, f64),
    }
    let mut directions = Vec::new();
    if wa == 0 && wx == 0 && wb == 0 {
        return Err(Error::NotReducible);
    }
    if wa == 0 {
        directions.push(Direction::Exact(Rational::one(), Rational::zero()));
        if wx != 0 {
            directions.push(Direction::Exact(Rational::new(-wb, wx), Rational::one()));
        }
    } else {
        let disc = wx * wx - 4 * wa * wb;
        if disc < 0 {
            return Err(Error::NoSolution);
        }
        let roots: Vec<i64> = if disc == 0 { vec![0] } else { vec![1, -1] };
        match rational_sqrt(Rational::from_integer(disc)) {
            Some(s) => {
                for sign in roots {
                    let t = (Rational::from_integer(-wx) + s * sign) / Rational::from_integer(2 * wa);
                    directions.push(Direction::Exact(t, Rational::one()));
                }
            }
            None => {
                for sign in roots {
                    let t = (-wx as f64 + sign as f64 * (disc as f64).sqrt()) / (2 * wa) as f64;
                    directions.push(Direction::Float(t, 1.0));
                }
            }
        }
    }

    let gram_error = |a: f64, b: f64| {
        let m = combine(a, tk, b, tm);
        (m.transpose() * &m - DMatrix::<f64>::identity(tk.n(), tk.n())).amax()
    };
    let mut out = Vec::new();
    for d in directions {
        let (u, v, exact) = match d {
            Direction::Exact(u, v) => {
                let q = diag(u, v);
                if !q.is_positive() {
                    continue;
                }
                let scale = rational_sqrt(q.recip());
                let (uf, vf) = (to_f64(u), to_f64(v));
                let s = 1.0 / to_f64(q).sqrt();
                (uf * s, vf * s, scale.map(|s| (u * s, v * s)))
            }
            Direction::Float(u, v) => {
                let [da, dx, db] = sys.diagonal.map(|x| x as f64);
                let q = da * u * u + dx * u * v + db * v * v;
                if q <= 0.0 {
                    continue;
                }
                (u / q.sqrt(), v / q.sqrt(), None)
            }
        };
        for sign in [1.0, -1.0] {
            let (a, b) = (sign * u, sign * v);
            out.push(NormPreservingPair {
                a,
                b,
                exact: exact.map(|(ea, eb)| if sign > 0.0 { (ea, eb) } else { (-ea, -eb) }),
                orthogonality_error: gram_error(a, b),
            });
        }
    }
    if out.is_empty() {
        return Err(Error::NoSolution);
    }
    Ok(out)
}

fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Factor by which a Dirichlet transplantation scales the common value at an
/// interior vertex: the signed count of labels of `left_point` in each row of
/// `right_point`. Every other label must sit on a boundary vertex, where the
/// eigenfunction vanishes.
pub fn special_value_multiplier_of<S>(
    matrix: &DMatrix<S>,
    bc: BoundaryCondition,
    left: &Tiling,
    right: &Tiling,
    left_point: &VertexCycle,
    right_point: &VertexCycle,
) -> Result<S>
where
    S: Scalar + Zero + Add<Output = S> + Copy,
{
    let fail = |m: &str| Err(Error::NotHomophonicMap(m.into()));
    if bc != BoundaryCondition::Dirichlet {
        return fail("special values are only preserved for Dirichlet maps");
    }
    if !left_point.interior || !right_point.interior {
        return fail("special points must be interior vertices");
    }
    if left_point.tiles.len() != right_point.tiles.len() || left_point.corner != right_point.corner {
        return fail("special points have different vertex types");
    }
    if matrix.shape() != (right.n(), left.n()) {
        return Err(Error::DegreeMismatch { expected: right.n(), found: matrix.nrows() });
    }
    let corner = left_point.corner;
    let mut at_point = vec![false; left.n()];
    for &l in &left_point.tiles {
        at_point[l] = true;
    }
    let mut multiplier: Option<S> = None;
    for &r in &right_point.tiles {
        let mut mu = S::zero();
        for l in 0..left.n() {
            let x = matrix[(r, l)];
            if x == S::zero() {
                continue;
            }
            if at_point[l] {
                mu = mu + x;
            } else if left.cycle_at(l, corner).interior {
                return fail(&format!("label {l} in right tile {r} sits at another interior vertex"));
            }
        }
        match multiplier {
            None => multiplier = Some(mu),
            Some(m) if m == mu => {}
            Some(_) => return fail("multiplier differs around the special point"),
        }
    }
    multiplier.ok_or(Error::NotHomophonicMap("empty vertex cycle".into()))
}

/// Integer multiplier of a transplantation map.
pub fn special_value_multiplier(
    t: &TransplantMap,
    left: &Tiling,
    right: &Tiling,
    left_point: &VertexCycle,
    right_point: &VertexCycle,
) -> Result<i64> {
    special_value_multiplier_of(t.matrix(), t.bc(), left, right, left_point, right_point)
}
