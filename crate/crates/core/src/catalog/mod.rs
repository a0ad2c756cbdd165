//! The seventeen isospectral pairs: generator permutations and their
//! orbifold bookkeeping.

mod permutation;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

pub use permutation::Permutation;

use crate::error::{Error, Result};
use crate::permgroup::OrbifoldSignature;

/// Raw transcription of the generator permutations.
pub const TABLE2: &str = include_str!("../../data/table2.txt");

/// A generator letter with zero or more primes, e.g. `e''`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Symbol {
    pub letter: char,
    pub primes: u8,
}

impl Symbol {
    pub fn base(letter: char) -> Self {
        Symbol { letter, primes: 0 }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter)?;
        for _ in 0..self.primes {
            f.write_str("'")?;
        }
        Ok(())
    }
}

/// A word in generator symbols, composed right to left.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GeneratorWord(pub Vec<Symbol>);

impl GeneratorWord {
    /// Parses words such as `cac`, `e'fe'` or `b'` (whitespace ignored).
    pub fn parse(text: &str) -> Result<Self> {
        let mut symbols: Vec<Symbol> = Vec::new();
        for ch in text.chars().filter(|c| !c.is_whitespace()) {
            match ch {
                '\'' | '′' => match symbols.last_mut() {
                    Some(s) => s.primes += 1,
                    None => return Err(Error::Parse(format!("word `{text}` starts with a prime"))),
                },
                c if c.is_ascii_lowercase() => symbols.push(Symbol::base(c)),
                c => return Err(Error::Parse(format!("unexpected `{c}` in word `{text}`"))),
            }
        }
        if symbols.is_empty() {
            return Err(Error::Parse("empty generator word".into()));
        }
        Ok(GeneratorWord(symbols))
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Base letters with their permutations plus the derived (primed) symbols.
#[derive(Clone, Debug, Default)]
pub struct Alphabet {
    pub base: BTreeMap<Symbol, Permutation>,
    pub definitions: BTreeMap<Symbol, GeneratorWord>,
}

impl Alphabet {
    pub fn resolve(&self, symbol: Symbol) -> Result<Permutation> {
        self.resolve_depth(symbol, 0)
    }

    fn resolve_depth(&self, symbol: Symbol, depth: usize) -> Result<Permutation> {
        if let Some(p) = self.base.get(&symbol) {
            return Ok(p.clone());
        }
        let word = self
            .definitions
            .get(&symbol)
            .filter(|_| depth <= self.definitions.len())
            .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))?;
        self.expand_depth(word, depth + 1)
    }

    fn expand_depth(&self, word: &GeneratorWord, depth: usize) -> Result<Permutation> {
        let mut acc: Option<Permutation> = None;
        for &s in word.0.iter().rev() {
            let p = self.resolve_depth(s, depth)?;
            acc = Some(match acc {
                None => p,
                Some(inner) => p.compose(&inner),
            });
        }
        acc.ok_or_else(|| Error::Parse("empty generator word".into()))
    }
}

/// Composes the letters of `word` right to left, resolving primed symbols
/// through the alphabet's definitions.
pub fn expand_word(word: &GeneratorWord, alphabet: &Alphabet) -> Result<Permutation> {
    alphabet.expand_depth(word, 0)
}

/// Point-action and line-action alphabets parsed from the transcription.
pub fn parse_table2(text: &str) -> Result<(Alphabet, Alphabet)> {
    let mut left = Alphabet::default();
    let mut right = Alphabet::default();
    let mut degree: Option<usize> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| Error::Parse(format!("table line {}: {msg}", lineno + 1));
        if let Some(d) = line.strip_prefix("degree") {
            degree = Some(d.trim().parse().map_err(|_| err("bad degree"))?);
            continue;
        }
        let (name, body) = line.split_once('=').ok_or_else(|| err("expected `x = ... / ...`"))?;
        let (point, lines) = body.split_once('/').ok_or_else(|| err("missing `/`"))?;
        let n = degree.ok_or_else(|| err("generator before any `degree` line"))?;
        let word = GeneratorWord::parse(name)?;
        let [symbol] = word.0[..] else {
            return Err(err("generator name must be a single letter"));
        };
        left.base.insert(symbol, Permutation::from_cycles(point, n)?);
        right.base.insert(symbol, Permutation::from_cycles(lines, n)?);
    }
    for (symbol, word) in DERIVED {
        let symbol = GeneratorWord::parse(symbol)?.0[0];
        let word = GeneratorWord::parse(word)?;
        left.definitions.insert(symbol, word.clone());
        right.definitions.insert(symbol, word);
    }
    Ok((left, right))
}

/// Derived generators from the notes column. Primes resolve against the whole
/// list, not only the row they are printed in.
const DERIVED: [(&str, &str); 12] = [
    ("a'", "cac"),
    ("b'", "aba"),
    ("e'", "ded"),
    ("d'", "fdf"),
    ("f'", "e'fe'"),
    ("e''", "d'e'd'"),
    ("h'", "ghg"),
    ("g'", "igi"),
    ("i'", "g'ig'"),
    ("l'", "jlj"),
    ("j'", "kjk"),
    ("k'", "l'kl'"),
];

struct Row {
    id: &'static str,
    generators: [&'static str; 3],
    crosscaps: u32,
    g0: &'static str,
    a0: &'static str,
    b0: &'static str,
    group: &'static str,
}

const fn row(
    id: &'static str,
    generators: [&'static str; 3],
    crosscaps: u32,
    g0: &'static str,
    a0: &'static str,
    b0: &'static str,
    group: &'static str,
) -> Row {
    Row { id, generators, crosscaps, g0, a0, b0, group }
}

#[rustfmt::skip]
const TABLE1: [Row; 17] = [
    row("7_1",  ["a", "b", "c"],        23,   "*444", "*424242",       "*424242",       "L3(2)"),
    row("7_2",  ["a", "b'", "c"],       16,   "*443", "*42423",        "*42423",        "L3(2)"),
    row("7_3",  ["a'", "b'", "c"],      9,    "*433", "*4233",         "*4233",         "L3(2)"),
    row("13_1", ["d", "e", "f"],        704,  "*444", "*422422422",    "*422422422",    "L3(3)"),
    row("13_2", ["d", "e'", "f"],       938,  "*644", "*6622342242",   "*6622342242",   "L3(3)"),
    row("13_3", ["d'", "e'", "f"],      1172, "*664", "*62234263662",  "*62234263662",  "L3(3)"),
    row("13_4", ["d'", "e'", "f'"],     938,  "*663", "*633626362",    "*633626362",    "L3(3)"),
    row("13_5", ["d'", "e''", "f'"],    470,  "*633", "*663332",       "*663332",       "L3(3)"),
    row("13_6", ["g", "h", "i"],        1406, "*666", "*632663266326", "*632663266326", "L3(3)"),
    row("13_7", ["g", "h'", "i"],       938,  "*663", "*632666233",    "*632666233",    "L3(3)"),
    row("13_8", ["g'", "h'", "i"],      704,  "*643", "*63436222",     "*62633224",     "L3(3)"),
    row("13_9", ["g'", "h'", "i'"],     938,  "*644", "*6262242243",   "*6262242243",   "L3(3)"),
    row("15_1", ["j", "k", "l"],        3362, "*663", "*63362333222",  "*63362333222",  "L4(2)"),
    row("15_2", ["j", "k", "l'"],       4202, "*664", "*6262234342242","*6262234342242","L4(2)"),
    row("15_3", ["j'", "k", "l'"],      3362, "*644", "*62234424242",  "*62422243442",  "L4(2)"),
    row("15_4", ["j'", "k'", "l'"],     2522, "*444", "*444222442",    "*444222442",    "L4(2)"),
    row("21_1", ["p", "q", "r"],        1682, "*633", "*63633332",     "*66333323",     "L3(4)"),
];

/// One isospectral pair: its generators in both permutation actions and the
/// orbifold data it is tabulated with.
#[derive(Clone, Debug)]
pub struct ExampleSpec {
    pub id: String,
    pub degree: usize,
    pub generator_names: [Symbol; 3],
    /// Point action; defines the left domain.
    pub left: [Permutation; 3],
    /// Line action; defines the right domain.
    pub right: [Permutation; 3],
    pub signature_g0: OrbifoldSignature,
    pub signature_a0: OrbifoldSignature,
    pub signature_b0: OrbifoldSignature,
    /// `k` in the kernel signature `×^k`.
    pub crosscap_count: u32,
    pub group_name: String,
}

impl ExampleSpec {
    pub fn generator_label(&self) -> String {
        self.generator_names.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
    }
}

fn build_catalog() -> Result<Vec<ExampleSpec>> {
    let (left_alpha, right_alpha) = parse_table2(TABLE2)?;
    TABLE1
        .iter()
        .map(|row| {
            let mut names = [Symbol::base('?'); 3];
            let mut left = Vec::with_capacity(3);
            let mut right = Vec::with_capacity(3);
            for (slot, g) in row.generators.iter().enumerate() {
                let word = GeneratorWord::parse(g)?;
                names[slot] = word.0[0];
                left.push(expand_word(&word, &left_alpha)?);
                right.push(expand_word(&word, &right_alpha)?);
            }
            let degree = left[0].degree();
            Ok(ExampleSpec {
                id: row.id.to_string(),
                degree,
                generator_names: names,
                left: left.try_into().expect("three generators"),
                right: right.try_into().expect("three generators"),
                signature_g0: row.g0.parse()?,
                signature_a0: row.a0.parse()?,
                signature_b0: row.b0.parse()?,
                crosscap_count: row.crosscaps,
                group_name: row.group.to_string(),
            })
        })
        .collect()
}

/// All seventeen pairs in table order.
pub fn load_catalog() -> &'static [ExampleSpec] {
    static CATALOG: OnceLock<Vec<ExampleSpec>> = OnceLock::new();
    CATALOG.get_or_init(|| build_catalog().expect("built-in tables are well formed"))
}

/// Looks up a pair by id; accepts `7_1`, `7-1` and `71`-style spellings.
pub fn find(id: &str) -> Result<&'static ExampleSpec> {
    let norm = id.trim().replace(['-', '.'], "_");
    load_catalog()
        .iter()
        .find(|e| e.id == norm)
        .ok_or_else(|| Error::UnknownPair(id.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seven_point_alphabet() -> Alphabet {
        parse_table2(TABLE2).unwrap().0
    }

    #[test]
    fn word_parsing() {
        let w = GeneratorWord::parse("e'fe'").unwrap();
        assert_eq!(w.0.len(), 3);
        assert_eq!(w.0[0], Symbol { letter: 'e', primes: 1 });
        assert_eq!(w.to_string(), "e'fe'");
        assert!(GeneratorWord::parse("'a").is_err());
        assert!(GeneratorWord::parse("A").is_err());
    }

    #[test]
    fn expand_aba_in_point_action() {
        let alpha = seven_point_alphabet();
        let aba = expand_word(&GeneratorWord::parse("aba").unwrap(), &alpha).unwrap();
        assert_eq!(aba, Permutation::from_cycles("(1 5)(3 4)", 7).unwrap());
        let a = expand_word(&GeneratorWord::parse("a").unwrap(), &alpha).unwrap();
        assert_eq!(a, Permutation::from_cycles("(0 1)(2 5)", 7).unwrap());
        let aa = expand_word(&GeneratorWord::parse("aa").unwrap(), &alpha).unwrap();
        assert!(aa.is_identity());
    }

    #[test]
    fn primes_resolve_across_rows() {
        let alpha = seven_point_alphabet();
        let b1 = alpha.resolve(GeneratorWord::parse("b'").unwrap().0[0]).unwrap();
        assert_eq!(b1, Permutation::from_cycles("(1 5)(3 4)", 7).unwrap());
        // e'' = d'e'd' needs d' = fdf and e' = ded
        let e2 = alpha.resolve(GeneratorWord::parse("e''").unwrap().0[0]).unwrap();
        assert!(e2.is_involution());
    }

    #[test]
    fn unknown_symbol() {
        let alpha = seven_point_alphabet();
        let err = expand_word(&GeneratorWord::parse("az").unwrap(), &alpha).unwrap_err();
        assert!(matches!(err, Error::UnknownSymbol(s) if s == "z"));
        let err = alpha.resolve(GeneratorWord::parse("a''").unwrap().0[0]).unwrap_err();
        assert!(matches!(err, Error::UnknownSymbol(_)));
    }

    #[test]
    fn self_referential_definitions_terminate() {
        let mut alpha = seven_point_alphabet();
        let x = Symbol { letter: 'x', primes: 1 };
        alpha.definitions.insert(x, GeneratorWord(vec![x, Symbol::base('a')]));
        assert!(alpha.resolve(x).is_err());
    }

    #[test]
    fn catalog_rows() {
        let cat = load_catalog();
        assert_eq!(cat.len(), 17);
        let p71 = find("7_1").unwrap();
        assert_eq!(p71.signature_g0.to_string(), "*444");
        assert_eq!(p71.crosscap_count, 23);
        let p21 = find("21-1").unwrap();
        assert_eq!(p21.degree, 21);
        assert_eq!(p21.signature_a0.to_string(), "*63633332");
        assert_eq!(p21.signature_b0.to_string(), "*66333323");
        assert!(find("nope").is_err());
    }

    #[test]
    fn generators_are_involutions_with_matching_transposition_counts() {
        for ex in load_catalog() {
            for (l, r) in ex.left.iter().zip(&ex.right) {
                assert!(l.is_involution() && r.is_involution(), "{}", ex.id);
                assert_eq!(l.degree(), ex.degree);
                assert_eq!(l.transposition_count(), r.transposition_count(), "{}", ex.id);
            }
        }
    }
}
