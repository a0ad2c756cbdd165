use std::fmt;

use crate::error::{Error, Result};

/// A bijection of `{0, .., n-1}` stored as its image array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation { images: (0..degree as u32).collect() }
    }

    /// Builds a permutation from its images, validating bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(Error::Parse(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Permutation { images: images.into_iter().map(|x| x as u32).collect() })
    }

    /// Parses cycle notation such as `(0 1)(2 5)` on `degree` points.
    ///
    /// Points that appear in no cycle are fixed. `()` and the empty string
    /// both denote the identity.
    pub fn from_cycles(text: &str, degree: usize) -> Result<Self> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut seen = vec![false; degree];
        let mut rest = text.trim();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .and_then(|r| r.find(')').map(|end| (&r[..end], &r[end + 1..])));
            let Some((cycle, tail)) = body else {
                return Err(Error::Parse(format!("malformed cycle notation `{text}`")));
            };
            let points = cycle
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad point `{s}` in `{text}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            for &p in &points {
                if p >= degree {
                    return Err(Error::Parse(format!("point {p} exceeds degree {degree}")));
                }
                if std::mem::replace(&mut seen[p], true) {
                    return Err(Error::Parse(format!("point {p} repeated in `{text}`")));
                }
            }
            for (i, &p) in points.iter().enumerate() {
                images[p] = points[(i + 1) % points.len()];
            }
            rest = tail.trim_start();
        }
        Self::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.images.iter().map(|&x| x as usize)
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "composing permutations of different degree");
        Permutation { images: other.images.iter().map(|&x| self.images[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    pub fn is_involution(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| self.images[x as usize] == i as u32)
    }

    pub fn is_fixed(&self, point: usize) -> bool {
        self.apply(point) == point
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.degree()).filter(|&i| self.is_fixed(i)).collect()
    }

    pub fn fixed_point_count(&self) -> usize {
        self.images.iter().enumerate().filter(|&(i, &x)| i as u32 == x).count()
    }

    /// Disjoint cycles of length at least two, each starting at its least point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut done = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if done[start] || self.is_fixed(start) {
                continue;
            }
            let mut cycle = vec![start];
            done[start] = true;
            let mut x = self.apply(start);
            while x != start {
                done[x] = true;
                cycle.push(x);
                x = self.apply(x);
            }
            out.push(cycle);
        }
        out
    }

    /// Number of 2-cycles.
    pub fn transposition_count(&self) -> usize {
        self.cycles().iter().filter(|c| c.len() == 2).count()
    }

    /// Multiplicative order.
    pub fn order(&self) -> u64 {
        self.cycles().iter().fold(1u64, |acc, c| lcm(acc, c.len() as u64))
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    a / gcd(a, b) * b
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            let body: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            write!(f, "({})", body.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{}; {}]", self.degree(), self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_cycles_and_keeps_fixed_points() {
        let a = Permutation::from_cycles("(0 1)(2 5)", 7).unwrap();
        assert_eq!(a.images().collect::<Vec<_>>(), vec![1, 0, 5, 3, 4, 2, 6]);
        assert_eq!(a.fixed_points(), vec![3, 4, 6]);
        assert!(a.is_involution());
        assert_eq!(a.to_string(), "(0 1)(2 5)");
    }

    #[test]
    fn rejects_bad_notation() {
        assert!(Permutation::from_cycles("(0 1", 3).is_err());
        assert!(Permutation::from_cycles("(0 7)", 3).is_err());
        assert!(Permutation::from_cycles("(0 1)(1 2)", 3).is_err());
        assert!(Permutation::from_images(vec![0, 0, 1]).is_err());
    }

    #[test]
    fn compose_applies_right_operand_first() {
        let a = Permutation::from_cycles("(0 1 2)", 3).unwrap();
        let b = Permutation::from_cycles("(0 1)", 3).unwrap();
        // 0 -b-> 1 -a-> 2
        assert_eq!(a.compose(&b).apply(0), 2);
        assert_eq!(a.compose(&a.inverse()), Permutation::identity(3));
        assert_eq!(a.order(), 3);
    }
}
