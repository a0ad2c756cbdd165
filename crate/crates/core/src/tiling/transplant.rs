use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use nalgebra::{DMatrix, Scalar};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{Tiling, COLORS};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

impl BoundaryCondition {
    /// Sign picked up by a function element reflected across a boundary edge.
    pub fn reflection_sign(self) -> i8 {
        match self {
            BoundaryCondition::Dirichlet => -1,
            BoundaryCondition::Neumann => 1,
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Neumann => "neumann",
        })
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dirichlet" | "d" => Ok(BoundaryCondition::Dirichlet),
            "neumann" | "n" => Ok(BoundaryCondition::Neumann),
            other => Err(Error::Parse(format!("unknown boundary condition `{other}`"))),
        }
    }
}

/// Signed permutation matrix `B_c` continuing function elements across
/// edges of color `c`: entry `(j, i)` is 1 when tile `i` is glued to `j ≠ i`,
/// and the diagonal entry of a boundary tile is the reflection sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuationOperator {
    pub color: usize,
    pub bc: BoundaryCondition,
    target: Vec<usize>,
    sign: Vec<i8>,
}

impl ContinuationOperator {
    pub fn new(tiling: &Tiling, color: usize, bc: BoundaryCondition) -> Self {
        let g = tiling.glue(color);
        let target: Vec<usize> = g.images().collect();
        let sign = target
            .iter()
            .enumerate()
            .map(|(i, &j)| if i == j { bc.reflection_sign() } else { 1 })
            .collect();
        ContinuationOperator { color, bc, target, sign }
    }

    pub fn n(&self) -> usize {
        self.target.len()
    }

    pub fn matrix(&self) -> DMatrix<i64> {
        let mut m = DMatrix::zeros(self.n(), self.n());
        for (i, (&j, &s)) in self.target.iter().zip(&self.sign).enumerate() {
            m[(j, i)] = s as i64;
        }
        m
    }

    /// `m · B`.
    pub fn right_multiply<S>(&self, m: &DMatrix<S>) -> DMatrix<S>
    where
        S: Scalar + Neg<Output = S>,
    {
        DMatrix::from_fn(m.nrows(), m.ncols(), |r, i| signed(m[(r, self.target[i])].clone(), self.sign[i]))
    }

    /// `B · m`.
    pub fn left_multiply<S>(&self, m: &DMatrix<S>) -> DMatrix<S>
    where
        S: Scalar + Neg<Output = S>,
    {
        DMatrix::from_fn(m.nrows(), m.ncols(), |r, i| signed(m[(self.target[r], i)].clone(), self.sign[r]))
    }
}

fn signed<S: Neg<Output = S>>(x: S, sign: i8) -> S {
    if sign < 0 { -x } else { x }
}

/// Exact check of `T · B_c(left) = B_c(right) · T` for all three colors.
pub fn check_intertwining<S>(t: &DMatrix<S>, left: &Tiling, right: &Tiling, bc: BoundaryCondition) -> bool
where
    S: Scalar + Neg<Output = S>,
{
    if t.nrows() != right.n() || t.ncols() != left.n() {
        return false;
    }
    (0..COLORS).all(|c| {
        ContinuationOperator::new(left, c, bc).right_multiply(t)
            == ContinuationOperator::new(right, c, bc).left_multiply(t)
    })
}

/// Largest entry of `T · B_c(left) − B_c(right) · T` over the three colors.
pub fn intertwining_residual<R: Real>(t: &DMatrix<R>, left: &Tiling, right: &Tiling, bc: BoundaryCondition) -> R {
    (0..COLORS)
        .map(|c| {
            let a = ContinuationOperator::new(left, c, bc).right_multiply(t);
            let b = ContinuationOperator::new(right, c, bc).left_multiply(t);
            (a - b).amax()
        })
        .fold(R::zero(), |m, x| m.max(x))
}

/// Exact determinant by fraction-free elimination.
pub fn integer_determinant(m: &DMatrix<i64>) -> i128 {
    assert_eq!(m.nrows(), m.ncols(), "determinant of a non-square matrix");
    let n = m.nrows();
    let mut a: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| m[(i, j)] as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| a[i][k] != 0) else {
            return 0;
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    if n == 0 { 1 } else { sign * a[n - 1][n - 1] }
}

/// Starting placement for the propagation: left `label` goes into right `tile`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Seed {
    pub right_tile: usize,
    pub left_label: usize,
}

/// A transplantation: right tile `r` receives `Σ_l T[r, l] · f_l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransplantMap {
    matrix: DMatrix<i64>,
    stencil: usize,
    bc: BoundaryCondition,
    /// `T[r, l] = row_signs[r] · col_signs[l]` on the support, when the sign
    /// pattern factors this way.
    signs: Option<(Vec<i8>, Vec<i8>)>,
}

#[derive(Serialize)]
struct TransplantJson<'a> {
    n: usize,
    k: usize,
    bc: BoundaryCondition,
    entries: Vec<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    determinant: Option<&'a str>,
}

impl TransplantMap {
    /// Validates a user supplied matrix with entries in {−1, 0, 1} and a
    /// uniform number of nonzeros per row and column.
    pub fn from_matrix(matrix: DMatrix<i64>, bc: BoundaryCondition) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::NoTransplant("matrix must be square and nonempty".into()));
        }
        if matrix.iter().any(|&x| !(-1..=1).contains(&x)) {
            return Err(Error::NoTransplant("entries must lie in {-1, 0, 1}".into()));
        }
        let stencil = uniform_stencil(&matrix)
            .ok_or_else(|| Error::NoTransplant("rows and columns have unequal stencils".into()))?;
        let signs = factor_signs(&matrix);
        Ok(TransplantMap { matrix, stencil, bc, signs })
    }

    pub fn matrix(&self) -> &DMatrix<i64> {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn stencil(&self) -> usize {
        self.stencil
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    /// Signed labels placed in right tile `r`, in increasing label order.
    pub fn row(&self, r: usize) -> Vec<(usize, i64)> {
        (0..self.n()).filter_map(|l| (self.matrix[(r, l)] != 0).then(|| (l, self.matrix[(r, l)]))).collect()
    }

    /// Renders a row as e.g. `0 + 5 - 4`, positive terms first.
    pub fn row_expression(&self, r: usize) -> String {
        let mut terms = self.row(r);
        terms.sort_by_key(|&(l, s)| (-s, l));
        let mut out = String::new();
        for (i, (l, s)) in terms.iter().enumerate() {
            match (i, *s) {
                (0, 1) => out.push_str(&l.to_string()),
                (0, _) => out.push_str(&format!("-{l}")),
                (_, 1) => out.push_str(&format!(" + {l}")),
                _ => out.push_str(&format!(" - {l}")),
            }
        }
        out
    }

    pub fn negated(&self) -> Self {
        TransplantMap {
            matrix: -&self.matrix,
            stencil: self.stencil,
            bc: self.bc,
            signs: self.signs.as_ref().map(|(r, c)| (r.iter().map(|s| -s).collect(), c.clone())),
        }
    }

    /// The map with the complementary support and the same sign rule.
    pub fn complement(&self) -> Result<Self> {
        let (rows, cols) = self
            .signs
            .as_ref()
            .ok_or_else(|| Error::NoTransplant("sign pattern does not factor into parities".into()))?;
        let n = self.n();
        if self.stencil == n {
            return Err(Error::NoTransplant("complement of a full stencil is empty".into()));
        }
        let matrix = DMatrix::from_fn(n, n, |r, l| {
            if self.matrix[(r, l)] == 0 { (rows[r] * cols[l]) as i64 } else { 0 }
        });
        Ok(TransplantMap { matrix, stencil: n - self.stencil, bc: self.bc, signs: self.signs.clone() })
    }

    /// The same support with every sign replaced by +.
    pub fn to_neumann(&self) -> Self {
        let n = self.n();
        TransplantMap {
            matrix: self.matrix.map(|x| x.abs()),
            stencil: self.stencil,
            bc: BoundaryCondition::Neumann,
            signs: Some((vec![1; n], vec![1; n])),
        }
    }

    pub fn to_real<R: Real>(&self) -> DMatrix<R> {
        self.matrix.map(|x| R::lit(x as f64))
    }

    pub fn determinant(&self) -> i128 {
        integer_determinant(&self.matrix)
    }

    pub fn intertwines(&self, left: &Tiling, right: &Tiling) -> bool {
        check_intertwining(&self.matrix, left, right, self.bc)
    }

    /// Whitespace-separated integer rows.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in 0..self.n() {
            let row: Vec<String> = (0..self.n()).map(|l| format!("{:>2}", self.matrix[(r, l)])).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries = (0..self.n()).map(|r| (0..self.n()).map(|l| self.matrix[(r, l)]).collect()).collect();
        let det = self.determinant().to_string();
        serde_json::to_value(TransplantJson {
            n: self.n(),
            k: self.stencil,
            bc: self.bc,
            entries,
            determinant: Some(&det),
        })
        .expect("serializable")
    }
}

fn uniform_stencil(m: &DMatrix<i64>) -> Option<usize> {
    let k = m.row(0).iter().filter(|&&x| x != 0).count();
    let rows_ok = m.row_iter().all(|r| r.iter().filter(|&&x| x != 0).count() == k);
    let cols_ok = m.column_iter().all(|c| c.iter().filter(|&&x| x != 0).count() == k);
    (rows_ok && cols_ok).then_some(k)
}

/// Finds ±1 vectors with `m[r, l] = rows[r] · cols[l]` on the support.
fn factor_signs(m: &DMatrix<i64>) -> Option<(Vec<i8>, Vec<i8>)> {
    let (nr, nc) = m.shape();
    let mut rows = vec![0i8; nr];
    let mut cols = vec![0i8; nc];
    for start in 0..nr {
        if rows[start] != 0 {
            continue;
        }
        rows[start] = 1;
        let mut stack = vec![(true, start)];
        while let Some((is_row, i)) = stack.pop() {
            if is_row {
                for l in 0..nc {
                    let x = m[(i, l)] as i8;
                    if x == 0 {
                        continue;
                    }
                    let want = x * rows[i];
                    if cols[l] == 0 {
                        cols[l] = want;
                        stack.push((false, l));
                    } else if cols[l] != want {
                        return None;
                    }
                }
            } else {
                for r in 0..nr {
                    let x = m[(r, i)] as i8;
                    if x == 0 {
                        continue;
                    }
                    let want = x * cols[i];
                    if rows[r] == 0 {
                        rows[r] = want;
                        stack.push((true, r));
                    } else if rows[r] != want {
                        return None;
                    }
                }
            }
        }
    }
    cols.iter_mut().filter(|c| **c == 0).for_each(|c| *c = 1);
    Some((rows, cols))
}

/// Seed-and-propagate derivation of a transplantation.
///
/// The seed label is placed in the seed tile; whenever label set `S` sits in
/// right tile `r`, its continuation across color `c` must sit in the
/// neighbor of `r` (or in `r` itself when that edge is boundary). The sets
/// grow until consistent. Dirichlet signs then come from the black/white
/// coloring of both tilings, normalized so the seed entry is +1.
pub fn derive_transplant(left: &Tiling, right: &Tiling, seed: Seed, bc: BoundaryCondition) -> Result<TransplantMap> {
    let n = left.n();
    if right.n() != n {
        return Err(Error::DegreeMismatch { expected: n, found: right.n() });
    }
    if seed.right_tile >= n || seed.left_label >= n {
        return Err(Error::NoTransplant(format!("seed {seed:?} out of range")));
    }
    let mut sets = vec![vec![false; n]; n];
    sets[seed.right_tile][seed.left_label] = true;
    let mut queue = vec![seed.right_tile];
    let mut queued = vec![false; n];
    queued[seed.right_tile] = true;
    while let Some(r) = queue.pop() {
        queued[r] = false;
        for c in 0..COLORS {
            let target = right.glue(c).apply(r);
            let mut grew = false;
            for l in 0..n {
                if sets[r][l] {
                    let image = left.glue(c).apply(l);
                    if !sets[target][image] {
                        sets[target][image] = true;
                        grew = true;
                    }
                }
            }
            if grew && !queued[target] {
                queued[target] = true;
                queue.push(target);
            }
        }
    }

    let support = DMatrix::from_fn(n, n, |r, l| sets[r][l] as i64);
    let stencil = uniform_stencil(&support)
        .ok_or_else(|| Error::NoTransplant("propagation produced an irregular stencil".into()))?;
    if stencil == n && n > 1 {
        return Err(Error::NoTransplant("propagation filled every tile with every label".into()));
    }

    let (rows, cols): (Vec<i8>, Vec<i8>) = match bc {
        BoundaryCondition::Neumann => (vec![1; n], vec![1; n]),
        BoundaryCondition::Dirichlet => {
            let norm = left.parity(seed.left_label) * right.parity(seed.right_tile);
            (
                (0..n).map(|r| right.parity(r) * norm).collect(),
                (0..n).map(|l| left.parity(l)).collect(),
            )
        }
    };
    let matrix = DMatrix::from_fn(n, n, |r, l| support[(r, l)] * (rows[r] * cols[l]) as i64);
    for c in 0..COLORS {
        let lhs = ContinuationOperator::new(left, c, bc).right_multiply(&matrix);
        let rhs = ContinuationOperator::new(right, c, bc).left_multiply(&matrix);
        if lhs != rhs {
            return Err(match bc {
                BoundaryCondition::Dirichlet => Error::SignObstruction { color: c },
                BoundaryCondition::Neumann => Error::NoTransplant(format!("color {c} fails to intertwine")),
            });
        }
    }
    Ok(TransplantMap { matrix, stencil, bc, signs: Some((rows, cols)) })
}

/// Complement of `t`, checked against the two tilings.
pub fn complement_map(t: &TransplantMap, left: &Tiling, right: &Tiling) -> Result<TransplantMap> {
    let c = t.complement()?;
    if !c.intertwines(left, right) {
        return Err(Error::NoTransplant("complement does not intertwine".into()));
    }
    Ok(c)
}

/// Every seed into `right_tile` that converges to a transplantation.
pub fn derive_all(left: &Tiling, right: &Tiling, right_tile: usize, bc: BoundaryCondition) -> Vec<(Seed, TransplantMap)> {
    (0..left.n())
        .filter_map(|l| {
            let seed = Seed { right_tile, left_label: l };
            derive_transplant(left, right, seed, bc).ok().map(|t| (seed, t))
        })
        .collect()
}

/// The converging seed with the smallest stencil (lowest label on ties),
/// seeding the right tiling's central tile when it has one.
pub fn derive_minimal(left: &Tiling, right: &Tiling, bc: BoundaryCondition) -> Result<(Seed, TransplantMap)> {
    let tile = right.central_tile().unwrap_or(0);
    derive_all(left, right, tile, bc)
        .into_iter()
        .min_by_key(|(s, t)| (t.stencil(), s.left_label))
        .ok_or_else(|| Error::NoTransplant("no seed converges".into()))
}

impl<S: Scalar + Zero + One + Neg<Output = S>> From<&TransplantMap> for DMatrix<S> {
    fn from(t: &TransplantMap) -> Self {
        t.matrix.map(|x| match x {
            0 => S::zero(),
            1 => S::one(),
            _ => -S::one(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::find;
    use crate::tiling::build_tiling;

    fn propellers() -> (Tiling, Tiling) {
        let ex = find("7_1").unwrap();
        (build_tiling(&ex.left).unwrap(), build_tiling(&ex.right).unwrap())
    }

    #[test]
    fn continuation_operators_are_signed_involutions() {
        let (l, _) = propellers();
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
            for c in 0..3 {
                let b = ContinuationOperator::new(&l, c, bc).matrix();
                assert_eq!(&b * &b, DMatrix::identity(7, 7));
                for row in b.row_iter() {
                    assert_eq!(row.iter().filter(|&&x| x != 0).count(), 1);
                }
            }
        }
    }

    #[test]
    fn propeller_map_from_central_seed() {
        let (l, r) = propellers();
        let seed = Seed { right_tile: 0, left_label: 1 };
        let t3 = derive_transplant(&l, &r, seed, BoundaryCondition::Dirichlet).unwrap();
        assert_eq!(t3.stencil(), 3);
        assert_eq!(t3.row_expression(0), "1 + 2 + 4");
        // right tile 4 is across the dotted edge of the center
        assert_eq!(r.neighbor(0, 0), Some(4));
        assert_eq!(t3.row_expression(4), "0 + 5 - 4");
        assert!(t3.intertwines(&l, &r));
        assert_ne!(t3.determinant(), 0);
    }

    #[test]
    fn complementary_seed_gives_four_labels() {
        let (l, r) = propellers();
        let t3 = derive_transplant(&l, &r, Seed { right_tile: 0, left_label: 1 }, BoundaryCondition::Dirichlet).unwrap();
        let t4 = derive_transplant(&l, &r, Seed { right_tile: 0, left_label: 0 }, BoundaryCondition::Dirichlet).unwrap();
        assert_eq!(t4.stencil(), 4);
        for row in 0..7 {
            for lab in 0..7 {
                assert_eq!(t3.matrix()[(row, lab)] == 0, t4.matrix()[(row, lab)] != 0);
            }
        }
        assert_eq!(t3.complement().unwrap().matrix().map(i64::abs), t4.matrix().map(i64::abs));
        let back = t3.complement().unwrap().complement().unwrap();
        assert_eq!(back, t3);
    }

    #[test]
    fn neumann_variant_intertwines() {
        let (l, r) = propellers();
        let t3 = derive_transplant(&l, &r, Seed { right_tile: 0, left_label: 1 }, BoundaryCondition::Dirichlet).unwrap();
        let plus = t3.to_neumann();
        assert!(check_intertwining(plus.matrix(), &l, &r, BoundaryCondition::Neumann));
        assert!(!check_intertwining(plus.matrix(), &l, &r, BoundaryCondition::Dirichlet));
    }

    #[test]
    fn identity_does_not_intertwine_propellers() {
        let (l, r) = propellers();
        let id = DMatrix::<i64>::identity(7, 7);
        assert!(!check_intertwining(&id, &l, &r, BoundaryCondition::Dirichlet));
        assert!(check_intertwining(&id, &l, &l, BoundaryCondition::Dirichlet));
    }

    #[test]
    fn determinant_matches_small_cases() {
        let m = DMatrix::from_row_slice(3, 3, &[2, 0, 1, 1, 3, 2, 1, 1, 2]);
        assert_eq!(integer_determinant(&m), 6);
        let m = DMatrix::from_row_slice(3, 3, &[0, 2, 1, 1, 3, 2, 1, 1, 2]);
        assert_eq!(integer_determinant(&m), -2);
        let m = DMatrix::from_row_slice(2, 2, &[0, 1, 1, 0]);
        assert_eq!(integer_determinant(&m), -1);
        let m = DMatrix::from_row_slice(2, 2, &[1, 1, 1, 1]);
        assert_eq!(integer_determinant(&m), 0);
    }

    #[test]
    fn from_matrix_validation() {
        let bad = DMatrix::from_row_slice(2, 2, &[1, 1, 0, 1]);
        assert!(TransplantMap::from_matrix(bad, BoundaryCondition::Neumann).is_err());
        let two = DMatrix::from_row_slice(2, 2, &[2, 0, 0, 2]);
        assert!(TransplantMap::from_matrix(two, BoundaryCondition::Neumann).is_err());
        let ok = DMatrix::from_row_slice(2, 2, &[1, -1, 1, 1]);
        let t = TransplantMap::from_matrix(ok, BoundaryCondition::Neumann).unwrap();
        assert_eq!(t.stencil(), 2);
        // sign pattern with odd number of minus signs does not factor
        assert!(t.complement().is_err());
    }

    #[test]
    fn text_and_json_exports() {
        let (l, r) = propellers();
        let t3 = derive_transplant(&l, &r, Seed { right_tile: 0, left_label: 1 }, BoundaryCondition::Dirichlet).unwrap();
        assert_eq!(t3.to_text().lines().count(), 7);
        let j = t3.to_json();
        assert_eq!(j["n"], 7);
        assert_eq!(j["k"], 3);
        assert_eq!(j["bc"], "dirichlet");
        assert_eq!(j["entries"][0][1], 1);
    }
}
