use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Rational;

/// Conway orbifold symbol: a reflection polygon `*p₁…p_k` or a cross-surface `×^k`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum OrbifoldSignature {
    /// Disk with mirror boundary and corner reflectors of the given orders.
    Reflection(Vec<u32>),
    /// Connected sum of `k` real projective planes.
    CrossSurface(u32),
}

impl OrbifoldSignature {
    pub fn reflection(corners: Vec<u32>) -> Result<Self> {
        if let Some(&bad) = corners.iter().find(|&&p| p < 2) {
            return Err(Error::InvalidSignature(format!("corner order {bad} < 2")));
        }
        Ok(OrbifoldSignature::Reflection(corners))
    }

    pub fn cross_surface(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidSignature("cross-surface needs at least one crosscap".into()));
        }
        Ok(OrbifoldSignature::CrossSurface(k))
    }

    pub fn corners(&self) -> &[u32] {
        match self {
            OrbifoldSignature::Reflection(c) => c,
            OrbifoldSignature::CrossSurface(_) => &[],
        }
    }

    /// Exact orbifold Euler characteristic.
    pub fn euler_characteristic(&self) -> Rational {
        match self {
            OrbifoldSignature::Reflection(corners) => {
                let k = corners.len() as i64;
                let corner_sum = corners
                    .iter()
                    .fold(Rational::zero(), |acc, &p| acc + Rational::new(1, 2 * p as i64));
                Rational::from_integer(1) - Rational::new(k, 2) + corner_sum
            }
            OrbifoldSignature::CrossSurface(k) => Rational::from_integer(2 - *k as i64),
        }
    }

    /// Equality of reflection signatures up to rotation and reversal of the
    /// corner sequence.
    pub fn equivalent(&self, other: &Self) -> bool {
        match (self, other) {
            (OrbifoldSignature::Reflection(a), OrbifoldSignature::Reflection(b)) => {
                canonical_cycle(a) == canonical_cycle(b)
            }
            _ => self == other,
        }
    }
}

/// Lexicographically least rotation of the sequence or its reverse.
pub fn canonical_cycle<T: Ord + Clone>(seq: &[T]) -> Vec<T> {
    let n = seq.len();
    let reversed: Vec<T> = seq.iter().rev().cloned().collect();
    let mut best: Option<Vec<T>> = None;
    for s in [seq, &reversed[..]] {
        for shift in 0..n.max(1) {
            let candidate: Vec<T> = s[shift.min(n)..].iter().chain(&s[..shift.min(n)]).cloned().collect();
            if best.as_ref().is_none_or(|b| candidate < *b) {
                best = Some(candidate);
            }
        }
    }
    best.unwrap_or_default()
}

/// Euler characteristic of a signature, as a free function.
pub fn orbifold_euler_characteristic(sig: &OrbifoldSignature) -> Rational {
    sig.euler_characteristic()
}

impl fmt::Display for OrbifoldSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbifoldSignature::Reflection(c) => {
                let sep = if c.iter().any(|&p| p >= 10) { "," } else { "" };
                let body: Vec<String> = c.iter().map(|p| p.to_string()).collect();
                write!(f, "*{}", body.join(sep))
            }
            OrbifoldSignature::CrossSurface(k) => write!(f, "×^{k}"),
        }
    }
}

impl FromStr for OrbifoldSignature {
    type Err = Error;

    /// Accepts `*444`, `*10,3,3`, `×^23`, `x^23` and `×23`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::InvalidSignature("empty signature".into()));
        }
        if let Some(body) = s.strip_prefix('*') {
            let corners: Result<Vec<u32>> = if body.contains(',') {
                body.split(',')
                    .map(|t| t.trim().parse().map_err(|_| Error::InvalidSignature(s.into())))
                    .collect()
            } else {
                body.chars()
                    .map(|c| c.to_digit(10).ok_or_else(|| Error::InvalidSignature(s.into())))
                    .collect()
            };
            return OrbifoldSignature::reflection(corners?);
        }
        let rest = s
            .strip_prefix('×')
            .or_else(|| s.strip_prefix('x'))
            .ok_or_else(|| Error::InvalidSignature(s.into()))?;
        let k = rest
            .trim_start_matches('^')
            .parse()
            .map_err(|_| Error::InvalidSignature(s.into()))?;
        OrbifoldSignature::cross_surface(k)
    }
}

impl Serialize for OrbifoldSignature {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi(s: &str) -> Rational {
        s.parse::<OrbifoldSignature>().unwrap().euler_characteristic()
    }

    #[test]
    fn euler_characteristics() {
        assert_eq!(chi("*444"), Rational::new(-1, 8));
        assert_eq!(chi("×^23"), Rational::from_integer(-21));
        assert_eq!(chi("x^23"), Rational::from_integer(-21));
        assert_eq!(chi("*424242"), Rational::new(-7, 8));
        assert_eq!(chi("*424242"), Rational::new(-1, 8) * 7);
        assert_eq!(chi("*644"), Rational::new(-1, 6));
        assert_eq!(chi("*633"), Rational::new(-1, 12));
        assert_eq!(chi("*"), Rational::from_integer(1));
    }

    #[test]
    fn invalid_signatures() {
        assert!("".parse::<OrbifoldSignature>().is_err());
        assert!("*41".parse::<OrbifoldSignature>().is_err());
        assert!("×^0".parse::<OrbifoldSignature>().is_err());
        assert!("444".parse::<OrbifoldSignature>().is_err());
    }

    #[test]
    fn display_round_trip() {
        for s in ["*444", "×^1682", "*10,3,3", "*"] {
            assert_eq!(s.parse::<OrbifoldSignature>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn dihedral_equivalence() {
        let a: OrbifoldSignature = "*424242".parse().unwrap();
        let b: OrbifoldSignature = "*242424".parse().unwrap();
        assert!(a.equivalent(&b));
        let c: OrbifoldSignature = "*63436222".parse().unwrap();
        let d: OrbifoldSignature = "*62226343".parse().unwrap();
        assert!(c.equivalent(&d));
        let e: OrbifoldSignature = "*62633224".parse().unwrap();
        assert!(!c.equivalent(&e));
    }
}
