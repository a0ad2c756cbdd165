use std::fmt::Write as _;

use nalgebra::Point2;

use crate::error::{Error, Result};
use crate::geometry::{check_embedding, PlanarDomain};
use crate::scalar::Real;
use crate::tiling::{Tiling, COLORS};

/// Barycentric lattice of a tile subdivided `r` times: points `(a, b)` with
/// weights `N − a − b`, `a`, `b` on corners 0, 1, 2 and `N = 2^r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lattice {
    pub divisions: usize,
}

impl Lattice {
    pub fn new(level: u32) -> Self {
        Lattice { divisions: 1 << level }
    }

    pub fn len(&self) -> usize {
        let n = self.divisions;
        (n + 1) * (n + 2) / 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, a: usize, b: usize) -> usize {
        let n = self.divisions;
        a * (n + 1) - a * a.saturating_sub(1) / 2 + b
    }

    pub fn points(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.divisions;
        (0..=n).flat_map(move |a| (0..=n - a).map(move |b| (a, b)))
    }

    /// Barycentric weights on the three corners.
    pub fn weights(&self, a: usize, b: usize) -> [usize; 3] {
        [self.divisions - a - b, a, b]
    }

    pub fn corner(&self, corner: usize) -> usize {
        let n = self.divisions;
        match corner {
            0 => self.index(0, 0),
            1 => self.index(n, 0),
            _ => self.index(0, n),
        }
    }

    /// Sub-triangles as lattice index triples.
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        let n = self.divisions;
        let mut out = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n - a {
                out.push([self.index(a, b), self.index(a + 1, b), self.index(a, b + 1)]);
                if a + b + 2 <= n {
                    out.push([self.index(a + 1, b), self.index(a + 1, b + 1), self.index(a, b + 1)]);
                }
            }
        }
        out
    }
}

/// Triangle mesh of a realized domain. Nodes on glued sides are shared
/// through the tiling, never matched by coordinates.
#[derive(Clone, Debug)]
pub struct Mesh<R: Real> {
    pub vertices: Vec<Point2<R>>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary: Vec<bool>,
    pub tile_of: Vec<usize>,
    pub level: u32,
    /// Global node of each lattice point of each tile.
    pub tile_nodes: Vec<Vec<usize>>,
    /// Nodes at the interior vertices of the tiling.
    pub special_nodes: Vec<usize>,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, x: usize, y: usize) {
        let (a, b) = (self.find(x), self.find(y));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Subdivides every tile `level` times at edge midpoints.
pub fn refine<R: Real>(d: &PlanarDomain<R>, t: &Tiling, level: u32) -> Result<Mesh<R>> {
    if !check_embedding(d).is_embedded() {
        return Err(Error::RefusedOverlappingDomain);
    }
    Ok(build(d, t, level))
}

/// Like [`refine`] without the embedding check; the mesh of an overlapping
/// domain is still a valid abstract surface.
pub fn refine_unchecked<R: Real>(d: &PlanarDomain<R>, t: &Tiling, level: u32) -> Mesh<R> {
    build(d, t, level)
}

fn build<R: Real>(d: &PlanarDomain<R>, t: &Tiling, level: u32) -> Mesh<R> {
    let lat = Lattice::new(level);
    let per = lat.len();
    let n = t.n();
    let points: Vec<(usize, usize)> = lat.points().collect();
    let mut dsu = Dsu((0..n * per).collect());
    let mut on_boundary = vec![false; n * per];
    for u in 0..n {
        for c in 0..COLORS {
            let neighbor = t.neighbor(u, c);
            for &(a, b) in &points {
                if lat.weights(a, b)[c] != 0 {
                    continue;
                }
                let k = lat.index(a, b);
                match neighbor {
                    Some(v) => dsu.union(u * per + k, v * per + k),
                    None => on_boundary[u * per + k] = true,
                }
            }
        }
    }

    let mut node_of_root = vec![usize::MAX; n * per];
    let mut vertices = Vec::new();
    let mut boundary = Vec::new();
    let mut tile_nodes = vec![vec![0; per]; n];
    let step = R::one() / R::lit(lat.divisions as f64);
    for u in 0..n {
        let corners = d.tile_vertices(u);
        for &(a, b) in &points {
            let k = lat.index(a, b);
            let root = dsu.find(u * per + k);
            if node_of_root[root] == usize::MAX {
                node_of_root[root] = vertices.len();
                let w = lat.weights(a, b).map(|x| R::lit(x as f64) * step);
                vertices.push(Point2::from(corners[0].coords * w[0] + corners[1].coords * w[1] + corners[2].coords * w[2]));
                boundary.push(false);
            }
            let node = node_of_root[root];
            tile_nodes[u][k] = node;
            boundary[node] |= on_boundary[u * per + k];
        }
    }

    let local = lat.triangles();
    let mut triangles = Vec::with_capacity(n * local.len());
    let mut tile_of = Vec::with_capacity(n * local.len());
    for u in 0..n {
        for tri in &local {
            triangles.push(tri.map(|k| tile_nodes[u][k]));
            tile_of.push(u);
        }
    }
    let special_nodes = d
        .interior_vertices
        .iter()
        .map(|c| tile_nodes[c.tiles[0]][lat.corner(c.corner)])
        .collect();
    Mesh { vertices, triangles, boundary, tile_of, level, tile_nodes, special_nodes }
}

impl<R: Real> Mesh<R> {
    /// A mesh given directly; each triangle counts as one level-0 tile.
    pub fn from_raw(vertices: Vec<Point2<R>>, triangles: Vec<[usize; 3]>, boundary: Vec<bool>) -> Self {
        let lat = Lattice::new(0);
        let tile_nodes = triangles
            .iter()
            .map(|tri| {
                let mut nodes = vec![0; lat.len()];
                for (c, &v) in tri.iter().enumerate() {
                    nodes[lat.corner(c)] = v;
                }
                nodes
            })
            .collect();
        let tile_of = (0..triangles.len()).collect();
        Mesh { vertices, triangles, boundary, tile_of, level: 0, tile_nodes, special_nodes: Vec::new() }
    }

    pub fn node_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn tile_count(&self) -> usize {
        self.tile_nodes.len()
    }

    pub fn lattice(&self) -> Lattice {
        Lattice::new(self.level)
    }

    /// Node at corner `corner` of tile `tile`.
    pub fn corner_vertex(&self, tile: usize, corner: usize) -> usize {
        self.tile_nodes[tile][self.lattice().corner(corner)]
    }

    /// Distinct undirected edges with the number of triangles using each.
    pub fn edges(&self) -> std::collections::BTreeMap<(usize, usize), usize> {
        let mut out = std::collections::BTreeMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                *out.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        out
    }

    /// Object File Format text.
    pub fn to_off(&self) -> String {
        let mut s = format!("OFF\n{} {} 0\n", self.vertices.len(), self.triangles.len());
        for p in &self.vertices {
            let _ = writeln!(s, "{} {} 0", p.x.as_f64(), p.y.as_f64());
        }
        for t in &self.triangles {
            let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_layout() {
        let lat = Lattice::new(2);
        assert_eq!(lat.len(), 15);
        let idx: Vec<usize> = lat.points().map(|(a, b)| lat.index(a, b)).collect();
        assert_eq!(idx, (0..15).collect::<Vec<_>>());
        assert_eq!(lat.triangles().len(), 16);
        assert_eq!(lat.weights(1, 2), [1, 1, 2]);
        assert_eq!(lat.corner(1), lat.index(4, 0));
    }
}
