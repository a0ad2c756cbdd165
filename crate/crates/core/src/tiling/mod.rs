//! Tilings by congruent triangles glued along three edge colors.
//!
//! Color `c` labels side `c` of the base triangle, and corner `i` is the
//! corner opposite side `i`. Reflections preserve these labels, so every
//! tile carries the same corner/side labeling as the base triangle.

mod coefficients;
mod transplant;

use serde::Serialize;

pub use coefficients::{
    combine, norm_preserving_coefficients, norm_preserving_system, special_value_multiplier,
    special_value_multiplier_of, NormPreservingPair, NormPreservingSystem,
};
pub use transplant::{
    check_intertwining, complement_map, derive_all, derive_minimal, derive_transplant,
    integer_determinant, intertwining_residual, BoundaryCondition, ContinuationOperator, Seed,
    TransplantMap,
};

use crate::catalog::Permutation;
use crate::error::{Error, Result};
use crate::permgroup::{orbits, OrbifoldSignature};

pub const COLORS: usize = 3;

/// The two edge colors meeting at corner `i`, in increasing order.
pub fn corner_colors(corner: usize) -> [usize; 2] {
    match corner {
        0 => [1, 2],
        1 => [0, 2],
        2 => [0, 1],
        _ => panic!("corner index {corner} out of range"),
    }
}

/// The two corners at the ends of side `color`, in increasing order.
pub fn side_corners(color: usize) -> [usize; 2] {
    corner_colors(color)
}

/// `n` triangular tiles; `glue[c]` maps each tile to its neighbor across
/// side `c`, fixing tiles whose side `c` lies on the boundary.
#[derive(Clone, Debug)]
pub struct Tiling {
    glue: [Permutation; 3],
    parity: Vec<i8>,
}

/// Validates the three gluing involutions and computes the black/white coloring.
pub fn build_tiling(gens: &[Permutation; 3]) -> Result<Tiling> {
    let n = gens[0].degree();
    for g in gens.iter() {
        if g.degree() != n {
            return Err(Error::DegreeMismatch { expected: n, found: g.degree() });
        }
    }
    if let Some(color) = gens.iter().position(|g| !g.is_involution()) {
        return Err(Error::BadGluing { color });
    }
    if n == 0 || orbits(n, gens).len() != 1 {
        return Err(Error::Disconnected);
    }
    let mut parity = vec![0i8; n];
    parity[0] = 1;
    let mut stack = vec![0];
    while let Some(t) = stack.pop() {
        for g in gens.iter() {
            let u = g.apply(t);
            if u == t {
                continue;
            }
            if parity[u] == 0 {
                parity[u] = -parity[t];
                stack.push(u);
            } else if parity[u] == parity[t] {
                return Err(Error::NotBipartite);
            }
        }
    }
    Ok(Tiling { glue: gens.clone(), parity })
}

/// Maximal alternating walk around one corner type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexCycle {
    pub corner: usize,
    /// Tiles around the vertex in walking order.
    pub tiles: Vec<usize>,
    /// Closed walk (interior vertex) vs. chain between two boundary edges.
    pub interior: bool,
}

impl VertexCycle {
    pub fn corner_colors(&self) -> [usize; 2] {
        corner_colors(self.corner)
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }
}

/// A boundary edge traversed from `start_corner` to `end_corner` of `tile`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryEdge {
    pub tile: usize,
    pub color: usize,
    pub start_corner: usize,
    pub end_corner: usize,
}

/// One closed boundary component. `corners[k]` is the vertex between
/// `edges[k]` and `edges[k + 1]`, given as the chain of tiles meeting there.
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryLoop {
    pub edges: Vec<BoundaryEdge>,
    pub corners: Vec<VertexCycle>,
}

impl Tiling {
    pub fn n(&self) -> usize {
        self.parity.len()
    }

    pub fn glue(&self, color: usize) -> &Permutation {
        &self.glue[color]
    }

    pub fn gluings(&self) -> &[Permutation; 3] {
        &self.glue
    }

    pub fn neighbor(&self, tile: usize, color: usize) -> Option<usize> {
        let u = self.glue[color].apply(tile);
        (u != tile).then_some(u)
    }

    pub fn is_boundary(&self, tile: usize, color: usize) -> bool {
        self.glue[color].is_fixed(tile)
    }

    /// ±1, with tile 0 colored +1.
    pub fn parity(&self, tile: usize) -> i8 {
        self.parity[tile]
    }

    pub fn parities(&self) -> &[i8] {
        &self.parity
    }

    pub fn boundary_edges(&self) -> Vec<(usize, usize)> {
        (0..self.n())
            .flat_map(|t| (0..COLORS).map(move |c| (t, c)))
            .filter(|&(t, c)| self.is_boundary(t, c))
            .collect()
    }

    pub fn interior_edge_count(&self) -> usize {
        (3 * self.n() - self.boundary_edges().len()) / 2
    }

    /// The unique tile with no boundary edge, if there is exactly one.
    pub fn central_tile(&self) -> Option<usize> {
        let mut inner = (0..self.n()).filter(|&t| (0..COLORS).all(|c| !self.is_boundary(t, c)));
        match (inner.next(), inner.next()) {
            (Some(t), None) => Some(t),
            _ => None,
        }
    }

    /// Order of the rotation `glue[j] ∘ glue[k]` about each corner.
    pub fn corner_orders(&self) -> [u64; 3] {
        [0, 1, 2].map(|i| {
            let [j, k] = corner_colors(i);
            self.glue[j].compose(&self.glue[k]).order()
        })
    }

    /// Walks from `start` alternately across `first` and the other color of
    /// `corner`; returns visited tiles, whether it closed, and the color of
    /// the boundary edge where it stopped.
    fn walk(&self, start: usize, corner: usize, first: usize) -> (Vec<usize>, bool, usize) {
        let [j, k] = corner_colors(corner);
        let other = |c: usize| if c == j { k } else { j };
        let mut tiles = vec![start];
        let (mut cur, mut col) = (start, first);
        loop {
            let next = self.glue[col].apply(cur);
            if next == cur {
                return (tiles, false, col);
            }
            cur = next;
            col = other(col);
            if cur == start && col == first {
                return (tiles, true, col);
            }
            tiles.push(cur);
        }
    }

    /// The cycle or chain through the incidence (tile, corner).
    pub fn cycle_at(&self, tile: usize, corner: usize) -> VertexCycle {
        let [j, k] = corner_colors(corner);
        let (forward, closed, end_color) = self.walk(tile, corner, j);
        if closed {
            return VertexCycle { corner, tiles: forward, interior: true };
        }
        let end = *forward.last().expect("walk visits its start");
        let back = if end_color == j { k } else { j };
        let (tiles, _, _) = self.walk(end, corner, back);
        VertexCycle { corner, tiles, interior: false }
    }

    /// Every (tile, corner) incidence grouped into its vertex.
    pub fn vertex_cycles(&self) -> Vec<VertexCycle> {
        let mut seen = vec![[false; 3]; self.n()];
        let mut out = Vec::new();
        for corner in 0..3 {
            for t in 0..self.n() {
                if seen[t][corner] {
                    continue;
                }
                let cycle = self.cycle_at(t, corner);
                for &u in &cycle.tiles {
                    seen[u][corner] = true;
                }
                out.push(cycle);
            }
        }
        out
    }

    pub fn interior_cycles(&self) -> Vec<VertexCycle> {
        self.vertex_cycles().into_iter().filter(|c| c.interior).collect()
    }

    /// Boundary components, each traversed once. The first starts at the
    /// lowest (tile, color) boundary edge.
    pub fn boundary_loops(&self) -> Vec<BoundaryLoop> {
        let mut visited = vec![[false; 3]; self.n()];
        let mut loops = Vec::new();
        for (t0, c0) in self.boundary_edges() {
            if visited[t0][c0] {
                continue;
            }
            let [s0, e0] = side_corners(c0);
            let mut edge = BoundaryEdge { tile: t0, color: c0, start_corner: s0, end_corner: e0 };
            let mut edges = Vec::new();
            let mut corners = Vec::new();
            while !visited[edge.tile][edge.color] {
                visited[edge.tile][edge.color] = true;
                edges.push(edge);
                let corner = edge.end_corner;
                let other = 3 - corner - edge.color;
                let (tiles, closed, stop) = self.walk(edge.tile, corner, other);
                debug_assert!(!closed, "a boundary vertex cannot be interior");
                let last = *tiles.last().expect("nonempty chain");
                corners.push(VertexCycle { corner, tiles, interior: false });
                edge = BoundaryEdge {
                    tile: last,
                    color: stop,
                    start_corner: corner,
                    end_corner: 3 - corner - stop,
                };
            }
            loops.push(BoundaryLoop { edges, corners });
        }
        loops
    }
}

/// Reads the reflection signature of the quotient orbifold along the boundary.
///
/// `g0` must be a triangle signature `*pqr`. Its corner orders are matched to
/// the tiling's corners by the rotation orders of the gluing action; a chain
/// of `m` tiles at a corner of order `p` becomes a corner reflector of order
/// `p/m`, and reflectors of order 1 are dropped.
pub fn quotient_signature(t: &Tiling, g0: &OrbifoldSignature) -> Result<OrbifoldSignature> {
    let orders: [u32; 3] = match g0 {
        OrbifoldSignature::Reflection(c) if c.len() == 3 => [c[0], c[1], c[2]],
        _ => return Err(Error::InvalidSignature(format!("{g0} is not a triangle group"))),
    };
    let loops = t.boundary_loops();
    if loops.len() != 1 {
        return Err(Error::InconsistentTiling(format!("{} boundary components", loops.len())));
    }
    let interior = t.interior_cycles();
    let rotation = t.corner_orders();

    let assignments = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let fits = |perm: &[usize; 3], exact: bool| {
        let p = |corner: usize| orders[perm[corner]] as u64;
        (0..3).all(|i| if exact { rotation[i] == p(i) } else { p(i) % rotation[i] == 0 })
            && loops[0].corners.iter().all(|c| p(c.corner) % c.tiles.len() as u64 == 0)
            && interior.iter().all(|c| 2 * p(c.corner) == c.tiles.len() as u64)
    };
    let perm = assignments
        .iter()
        .find(|a| fits(a, true))
        .or_else(|| assignments.iter().find(|a| fits(a, false)))
        .ok_or_else(|| {
            Error::InconsistentTiling(format!("corner chains are incompatible with {g0}"))
        })?;
    let corners = loops[0]
        .corners
        .iter()
        .map(|c| orders[perm[c.corner]] / c.tiles.len() as u32)
        .filter(|&q| q > 1)
        .collect();
    OrbifoldSignature::reflection(corners)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{find, load_catalog};

    fn single_tile() -> Tiling {
        let id = Permutation::identity(1);
        build_tiling(&[id.clone(), id.clone(), id]).unwrap()
    }

    #[test]
    fn propeller_boundary_flags() {
        let t = build_tiling(&find("7_1").unwrap().left).unwrap();
        let dotted: Vec<usize> = (0..7).filter(|&i| t.is_boundary(i, 0)).collect();
        assert_eq!(dotted, vec![3, 4, 6]);
        assert_eq!(t.central_tile(), Some(0));
        assert_eq!(t.interior_edge_count(), 6);
        assert_eq!(t.boundary_edges().len(), 9);
    }

    #[test]
    fn single_tile_is_all_boundary() {
        let t = single_tile();
        assert_eq!(t.boundary_edges().len(), 3);
        let cycles = t.vertex_cycles();
        assert_eq!(cycles.len(), 3);
        assert!(cycles.iter().all(|c| !c.interior && c.tiles == vec![0]));
    }

    #[test]
    fn build_errors() {
        let p = |s: &str, n| Permutation::from_cycles(s, n).unwrap();
        let err = build_tiling(&[p("(0 1 2)", 3), p("", 3), p("", 3)]).unwrap_err();
        assert!(matches!(err, Error::BadGluing { color: 0 }));
        let err = build_tiling(&[p("(0 1)", 4), p("", 4), p("", 4)]).unwrap_err();
        assert!(matches!(err, Error::Disconnected));
        let err = build_tiling(&[p("(0 1)", 3), p("(1 2)", 3), p("(0 2)", 3)]).unwrap_err();
        assert!(matches!(err, Error::NotBipartite));
    }

    #[test]
    fn homophonic_pair_has_one_six_fold_vertex() {
        let ex = find("21_1").unwrap();
        for gens in [&ex.left, &ex.right] {
            let t = build_tiling(gens).unwrap();
            assert_eq!(t.n(), 21);
            let inner = t.interior_cycles();
            assert_eq!(inner.len(), 1);
            assert_eq!(inner[0].tiles.len(), 6);
        }
    }

    #[test]
    fn propellers_have_no_interior_vertex() {
        let ex = find("7_1").unwrap();
        assert!(build_tiling(&ex.left).unwrap().interior_cycles().is_empty());
        assert!(build_tiling(&ex.right).unwrap().interior_cycles().is_empty());
    }

    #[test]
    fn incidences_partitioned() {
        for ex in load_catalog() {
            let t = build_tiling(&ex.left).unwrap();
            let mut count = vec![[0; 3]; t.n()];
            for c in t.vertex_cycles() {
                if c.interior {
                    assert_eq!(c.tiles.len() % 2, 0);
                }
                for &u in &c.tiles {
                    count[u][c.corner] += 1;
                }
            }
            assert!(count.iter().all(|c| *c == [1, 1, 1]), "{}", ex.id);
        }
    }

    #[test]
    fn boundary_loop_is_single_and_complete() {
        for ex in load_catalog() {
            for gens in [&ex.left, &ex.right] {
                let t = build_tiling(gens).unwrap();
                let loops = t.boundary_loops();
                assert_eq!(loops.len(), 1, "{}", ex.id);
                assert_eq!(loops[0].edges.len(), 3 * t.n() - 2 * t.interior_edge_count());
            }
        }
    }

    #[test]
    fn quotient_signatures() {
        let ex = find("7_1").unwrap();
        let sig = quotient_signature(&build_tiling(&ex.left).unwrap(), &ex.signature_g0).unwrap();
        assert!(sig.equivalent(&"*424242".parse().unwrap()));

        let star: OrbifoldSignature = "*643".parse().unwrap();
        assert!(quotient_signature(&single_tile(), &star).unwrap().equivalent(&star));

        let ex = find("13_8").unwrap();
        let l = quotient_signature(&build_tiling(&ex.left).unwrap(), &ex.signature_g0).unwrap();
        let r = quotient_signature(&build_tiling(&ex.right).unwrap(), &ex.signature_g0).unwrap();
        assert!(l.equivalent(&"*63436222".parse().unwrap()));
        assert!(r.equivalent(&"*62633224".parse().unwrap()));
        assert!(!l.equivalent(&r));
    }

    #[test]
    fn quotient_signature_rejects_wrong_triangle_group() {
        let ex = find("7_1").unwrap();
        let t = build_tiling(&ex.left).unwrap();
        let err = quotient_signature(&t, &"*333".parse().unwrap()).unwrap_err();
        assert!(matches!(err, Error::InconsistentTiling(_)));
    }
}
