//! Finite permutation groups: closure, the fixed-point form of the Sunada
//! condition, and orbifold Euler-characteristic bookkeeping.

mod signature;

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

pub use signature::{canonical_cycle, orbifold_euler_characteristic, OrbifoldSignature};

use crate::catalog::{ExampleSpec, Permutation};
use crate::error::{Error, Result};
use crate::scalar::Rational;

/// Default bound on enumerated group order.
pub const DEFAULT_GROUP_CAP: usize = 1_000_000;

/// A word in generator indices, read left to right as written and applied
/// right to left.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize)]
pub struct Word(pub Vec<usize>);

impl Word {
    /// Renders the word with the given generator names.
    pub fn display_with(&self, names: &[String]) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        self.0.iter().map(|&g| names.get(g).cloned().unwrap_or_else(|| format!("g{g}"))).collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.0.iter().map(|g| format!("g{g}")).collect();
        f.write_str(&parts.join(" "))
    }
}

/// An enumerated permutation group.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
}

impl PermGroup {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// Elements in breadth-first order from the identity.
    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.contains(p)
    }

    /// Σ over the group of fixed-point counts; equals |G| times the number of orbits.
    pub fn fixed_point_total(&self) -> usize {
        self.elements.iter().map(Permutation::fixed_point_count).sum()
    }

    /// Orbits of the action on `{0..degree}`.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        orbits(self.degree, &self.generators)
    }

    pub fn is_transitive(&self) -> bool {
        self.orbits().len() <= 1
    }
}

fn check_degrees(gens: &[Permutation]) -> Result<usize> {
    let degree = gens.first().map(Permutation::degree).unwrap_or(0);
    match gens.iter().find(|g| g.degree() != degree) {
        Some(g) => Err(Error::DegreeMismatch { expected: degree, found: g.degree() }),
        None => Ok(degree),
    }
}

/// Orbits of the group generated by `gens` on `{0..degree}`.
pub fn orbits(degree: usize, gens: &[Permutation]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; degree];
    let mut out = Vec::new();
    for start in 0..degree {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut orbit = vec![start];
        let mut i = 0;
        while i < orbit.len() {
            let x = orbit[i];
            for g in gens {
                let y = g.apply(x);
                if !std::mem::replace(&mut seen[y], true) {
                    orbit.push(y);
                }
            }
            i += 1;
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

/// Closure of `gens` under composition.
pub fn generate_group(gens: &[Permutation]) -> Result<PermGroup> {
    generate_group_with_cap(gens, DEFAULT_GROUP_CAP)
}

pub fn generate_group_with_cap(gens: &[Permutation], cap: usize) -> Result<PermGroup> {
    let degree = check_degrees(gens)?;
    let identity = Permutation::identity(degree);
    let mut index: HashMap<Permutation, ()> = HashMap::new();
    index.insert(identity.clone(), ());
    let mut elements = vec![identity];
    let mut i = 0;
    while i < elements.len() {
        for g in gens {
            let next = g.compose(&elements[i]);
            if !index.contains_key(&next) {
                if elements.len() >= cap {
                    return Err(Error::GroupTooLarge { cap });
                }
                index.insert(next.clone(), ());
                elements.push(next);
            }
        }
        i += 1;
    }
    Ok(PermGroup { degree, generators: gens.to_vec(), elements })
}

/// Outcome of the joint enumeration of two actions of one abstract group.
#[derive(Clone, Debug, Serialize)]
pub struct SunadaCertificate {
    pub order: usize,
    /// True iff every element fixes equally many points in both actions.
    pub holds: bool,
    /// First element (in breadth-first order) whose fixed-point counts differ.
    pub witness: Option<Word>,
    pub witness_fixed_points: Option<(usize, usize)>,
    /// Σ fixed points over the group, per action.
    pub fixed_point_totals: (usize, usize),
}

struct JointElement {
    left: Permutation,
    right: Permutation,
    parent: usize,
    generator: usize,
}

fn word_of(elements: &[JointElement], mut i: usize) -> Word {
    let mut letters = Vec::new();
    while i != 0 {
        letters.push(elements[i].generator);
        i = elements[i].parent;
    }
    // elements[i] = g_k ∘ … ∘ g_1, letters were collected g_k first
    Word(letters)
}

fn inverse_word(w: &Word, gens_left: &[Permutation]) -> Option<Word> {
    // Only involutive generators have letter-wise inverses.
    w.0.iter().all(|&g| gens_left[g].is_involution()).then(|| Word(w.0.iter().rev().copied().collect()))
}

/// Checks that the fixed-point counts of the two actions agree on every group
/// element, enumerating each abstract element as a (left, right) pair.
///
/// The pairing `left[i] ↔ right[i]` must extend to an isomorphism; otherwise
/// `NotSameGroup` is returned with a word acting trivially on one side only.
pub fn sunada_check(left: &[Permutation], right: &[Permutation]) -> Result<SunadaCertificate> {
    sunada_check_with_cap(left, right, DEFAULT_GROUP_CAP)
}

pub fn sunada_check_with_cap(
    left: &[Permutation],
    right: &[Permutation],
    cap: usize,
) -> Result<SunadaCertificate> {
    if left.len() != right.len() {
        return Err(Error::DegreeMismatch { expected: left.len(), found: right.len() });
    }
    let nl = check_degrees(left)?;
    let nr = check_degrees(right)?;
    if nl != nr {
        return Err(Error::DegreeMismatch { expected: nl, found: nr });
    }
    let mut elements = vec![JointElement {
        left: Permutation::identity(nl),
        right: Permutation::identity(nr),
        parent: 0,
        generator: 0,
    }];
    let mut by_left: HashMap<Permutation, usize> = HashMap::from([(elements[0].left.clone(), 0)]);
    let mut by_right: HashMap<Permutation, usize> = HashMap::from([(elements[0].right.clone(), 0)]);

    let mut i = 0;
    while i < elements.len() {
        for g in 0..left.len() {
            let l = left[g].compose(&elements[i].left);
            let r = right[g].compose(&elements[i].right);
            match (by_left.get(&l).copied(), by_right.get(&r).copied()) {
                (Some(a), Some(b)) if a == b => continue,
                (None, None) => {
                    if elements.len() >= cap {
                        return Err(Error::GroupTooLarge { cap });
                    }
                    let idx = elements.len();
                    by_left.insert(l.clone(), idx);
                    by_right.insert(r.clone(), idx);
                    elements.push(JointElement { left: l, right: r, parent: i, generator: g });
                }
                (a, b) => {
                    // w_new and w_old agree on one side only: w_old⁻¹ w_new is the witness
                    let mut new_word = word_of(&elements, i);
                    new_word.0.insert(0, g);
                    let old = a.or(b).expect("at least one side matched");
                    let word = match inverse_word(&word_of(&elements, old), left) {
                        Some(inv) => Word(inv.0.into_iter().chain(new_word.0).collect()),
                        None => new_word,
                    };
                    return Err(Error::NotSameGroup { word: word.to_string() });
                }
            }
        }
        i += 1;
    }

    let mut totals = (0, 0);
    let mut witness = None;
    for (idx, e) in elements.iter().enumerate() {
        let (fl, fr) = (e.left.fixed_point_count(), e.right.fixed_point_count());
        totals.0 += fl;
        totals.1 += fr;
        if fl != fr && witness.is_none() {
            witness = Some((word_of(&elements, idx), (fl, fr)));
        }
    }
    Ok(SunadaCertificate {
        order: elements.len(),
        holds: witness.is_none(),
        witness_fixed_points: witness.as_ref().map(|w| w.1),
        witness: witness.map(|w| w.0),
        fixed_point_totals: totals,
    })
}

/// True iff the words of even length generate the whole group, so the kernel
/// of `G₀ → G` contains orientation-reversing elements.
pub fn kernel_is_nonorientable(gens: &[Permutation]) -> Result<bool> {
    let group = generate_group(gens)?;
    let even: Vec<Permutation> = gens
        .iter()
        .flat_map(|a| gens.iter().map(move |b| a.compose(b)))
        .collect();
    let even_group = generate_group(&even)?;
    Ok(even_group.order() == group.order())
}

/// The Euler-characteristic identities tying a catalog row together.
#[derive(Clone, Debug, Serialize)]
pub struct CrosscapCheck {
    pub group_order: usize,
    #[serde(serialize_with = "ser_rational")]
    pub chi_g0: Rational,
    /// |G|·χ(G₀)
    #[serde(serialize_with = "ser_rational")]
    pub kernel_chi: Rational,
    /// 2 − k for the tabulated ×^k.
    pub expected_kernel_chi: i64,
    /// Crosscap count implied by the enumerated group order.
    #[serde(serialize_with = "ser_rational")]
    pub implied_crosscaps: Rational,
    /// n·χ(G₀)
    #[serde(serialize_with = "ser_rational")]
    pub cover_chi: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub chi_a0: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub chi_b0: Rational,
    pub kernel_identity: bool,
    pub cover_identity: bool,
}

impl CrosscapCheck {
    pub fn holds(&self) -> bool {
        self.kernel_identity && self.cover_identity
    }
}

pub(crate) fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(r)
}

/// Checks |G|·χ(G₀) = 2 − k and n·χ(G₀) = χ(A₀) = χ(B₀) in exact arithmetic.
pub fn check_crosscap_identity(spec: &ExampleSpec) -> Result<CrosscapCheck> {
    let group = generate_group(&spec.left)?;
    let chi_g0 = spec.signature_g0.euler_characteristic();
    let order = Rational::from_integer(group.order() as i64);
    let kernel_chi = order * chi_g0;
    let expected = 2 - spec.crosscap_count as i64;
    let cover_chi = Rational::from_integer(spec.degree as i64) * chi_g0;
    let chi_a0 = spec.signature_a0.euler_characteristic();
    let chi_b0 = spec.signature_b0.euler_characteristic();
    Ok(CrosscapCheck {
        group_order: group.order(),
        chi_g0,
        kernel_chi,
        expected_kernel_chi: expected,
        implied_crosscaps: Rational::from_integer(2) - kernel_chi,
        cover_chi,
        chi_a0,
        chi_b0,
        kernel_identity: kernel_chi == Rational::from_integer(expected),
        cover_identity: cover_chi == chi_a0 && cover_chi == chi_b0,
    })
}
