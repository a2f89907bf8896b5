//! The marker sequence: for `l = 1, 2, 3, ..` every binary string of length
//! `l` in increasing order (most significant bit first), each block followed
//! by a single marker `x`. Filling the markers with 0 or with 1 gives the two
//! sets `S0 ⊆ S1`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::folang::{Formula, Signature, Term};
use crate::models::Theory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Zero,
    One,
    Marker,
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Symbol::Zero => "0",
            Symbol::One => "1",
            Symbol::Marker => "x",
        })
    }
}

/// Length of block `l` without its marker.
fn block_len(l: u32) -> u64 {
    (l as u64) << l
}

/// Symbol at position `k` (0-indexed).
pub fn master_symbol(k: u64) -> Symbol {
    let mut rest = k;
    let mut l = 1u32;
    loop {
        let len = block_len(l);
        if rest < len {
            let string = rest / l as u64;
            let bit = rest % l as u64;
            let shift = l as u64 - 1 - bit;
            return if string >> shift & 1 == 1 {
                Symbol::One
            } else {
                Symbol::Zero
            };
        }
        if rest == len {
            return Symbol::Marker;
        }
        rest -= len + 1;
        l += 1;
    }
}

/// Position of the `n`-th marker, counting from 1.
pub fn nth_marker(n: u32) -> u64 {
    assert!(n >= 1, "markers are counted from 1");
    (1..=n).map(|l| block_len(l) + 1).sum::<u64>() - 1
}

/// All marker positions below `bound`, ascending.
pub fn marker_positions(bound: u64) -> Vec<u64> {
    (1..)
        .map(nth_marker)
        .take_while(|&p| p < bound)
        .collect()
}

/// The built-in sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    /// The three-letter sequence itself.
    Master,
    /// Markers read as 0.
    S0,
    /// Markers read as 1.
    S1,
    /// The even numbers, a set in which `{0,1}` of length 2 never occurs.
    Evens,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Master, Variant::S0, Variant::S1, Variant::Evens];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Master => "master",
            Variant::S0 => "s0",
            Variant::S1 => "s1",
            Variant::Evens => "evens",
        }
    }

    /// The 0/1 view of a variant; the master sequence has none.
    pub fn binary(self) -> Result<Binary> {
        match self {
            Variant::Master => Err(Error::NotBinary("master")),
            v => Ok(Binary(v)),
        }
    }

    /// Display symbol at `k`; binary variants print `0`/`1`.
    pub fn symbol(self, k: u64) -> Symbol {
        match self {
            Variant::Master => master_symbol(k),
            v => {
                if Binary(v).contains(k) {
                    Symbol::One
                } else {
                    Symbol::Zero
                }
            }
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidPattern(format!("unknown variant `{s}`")))
    }
}

/// A set of naturals given by its membership predicate.
pub trait BinarySequence {
    fn contains(&self, k: u64) -> bool;
}

/// A binary built-in variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Binary(Variant);

impl Binary {
    pub fn variant(self) -> Variant {
        self.0
    }
}

impl BinarySequence for Binary {
    fn contains(&self, k: u64) -> bool {
        match self.0 {
            Variant::S0 => master_symbol(k) == Symbol::One,
            Variant::S1 => master_symbol(k) != Symbol::Zero,
            Variant::Evens => k.is_multiple_of(2),
            Variant::Master => unreachable!("constructed through Variant::binary"),
        }
    }
}

/// Adapter for user-supplied predicates.
pub struct FnSequence<F>(pub F);

impl<F: Fn(u64) -> bool> BinarySequence for FnSequence<F> {
    fn contains(&self, k: u64) -> bool {
        (self.0)(k)
    }
}

/// Membership of `k` in `S0`, `S1` or the evens.
pub fn membership(v: Variant, k: u64) -> Result<bool> {
    Ok(v.binary()?.contains(k))
}

/// Largest supported pattern length.
pub const MAX_PATTERN_LEN: usize = 63;

/// `{m < len : m ∈ members}`; bit `m` of `members` is offset `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    len: usize,
    members: u64,
}

impl Pattern {
    pub fn new(len: usize, members: &[usize]) -> Result<Self> {
        if len == 0 || len > MAX_PATTERN_LEN {
            return Err(Error::InvalidPattern(format!(
                "length {len} outside 1..={MAX_PATTERN_LEN}"
            )));
        }
        let mut bits = 0u64;
        for &m in members {
            if m >= len {
                return Err(Error::InvalidPattern(format!(
                    "member {m} not below length {len}"
                )));
            }
            bits |= 1 << m;
        }
        Ok(Pattern { len, members: bits })
    }

    pub fn from_bits(len: usize, members: u64) -> Result<Self> {
        let all: Vec<usize> = (0..64).filter(|m| members >> m & 1 == 1).collect();
        Pattern::new(len, &all)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.members == 0
    }

    pub fn bits(&self) -> u64 {
        self.members
    }

    pub fn members(&self) -> Vec<usize> {
        (0..self.len).filter(|m| self.members >> m & 1 == 1).collect()
    }

    /// All `2^len` patterns of one length, by increasing bitmask.
    pub fn all_of_len(len: usize) -> Result<Vec<Pattern>> {
        if len == 0 || len > 20 {
            return Err(Error::InvalidPattern(format!(
                "cannot list patterns of length {len}"
            )));
        }
        Ok((0..1u64 << len)
            .map(|members| Pattern { len, members })
            .collect())
    }
}

/// `m1,m2,..:n`; the empty set is `:n`.
impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members().iter().map(|m| m.to_string()).collect();
        write!(f, "{}:{}", parts.join(","), self.len)
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidPattern(format!("expected `m1,m2,..:n`, found `{s}`"));
        let (set, len) = s.trim().rsplit_once(':').ok_or_else(bad)?;
        let len: usize = len.trim().parse().map_err(|_| bad())?;
        let members = if set.trim().is_empty() {
            Vec::new()
        } else {
            set.split(',')
                .map(|m| m.trim().parse::<usize>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?
        };
        Pattern::new(len, &members)
    }
}

/// Whether `{m < len : pos + m ∈ S}` equals the pattern's set.
pub fn pattern_occurs_at(s: &dyn BinarySequence, p: &Pattern, pos: u64) -> bool {
    (0..p.len).all(|m| s.contains(pos + m as u64) == (p.members >> m & 1 == 1))
}

/// Least `pos` with `pos + len <= bound` where the pattern occurs.
pub fn find_pattern(s: &dyn BinarySequence, p: &Pattern, bound: u64) -> Option<u64> {
    let last = bound.checked_sub(p.len as u64)?;
    (0..=last).find(|&pos| pattern_occurs_at(s, p, pos))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternStats {
    pub pattern: Pattern,
    pub first: Option<u64>,
    /// Occurrences at positions `pos` with `pos + len <= bound`.
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrregularityReport {
    pub n_max: usize,
    pub bound: u64,
    /// Every pattern of length `1..=n_max`, by length then bitmask.
    pub stats: Vec<PatternStats>,
}

impl IrregularityReport {
    /// Whether every pattern was found below the bound.
    pub fn irregular(&self) -> bool {
        self.stats.iter().all(|s| s.first.is_some())
    }

    pub fn missing(&self) -> Vec<Pattern> {
        self.stats
            .iter()
            .filter(|s| s.first.is_none())
            .map(|s| s.pattern)
            .collect()
    }

    pub fn verdict(&self) -> String {
        if self.irregular() {
            format!("IRREGULAR-UP-TO({}, {})", self.n_max, self.bound)
        } else {
            format!("NOT-IRREGULAR-UP-TO({}, {})", self.n_max, self.bound)
        }
    }
}

impl fmt::Display for IrregularityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.stats {
            match s.first {
                Some(p) => writeln!(f, "pattern={} first={p} count={}", s.pattern, s.count)?,
                None => writeln!(f, "pattern={} first=none count=0", s.pattern)?,
            }
        }
        writeln!(f, "{}", self.verdict())
    }
}

/// First occurrence and occurrence count of every pattern of length up to
/// `n_max`, scanning windows inside `[0, bound)`.
pub fn irregularity_report(
    s: &dyn BinarySequence,
    n_max: usize,
    bound: u64,
) -> Result<IrregularityReport> {
    if n_max == 0 || n_max > 20 {
        return Err(Error::InvalidPattern(format!(
            "pattern length bound {n_max} outside 1..=20"
        )));
    }
    let bits: Vec<bool> = (0..bound).map(|k| s.contains(k)).collect();
    let mut stats = Vec::new();
    for len in 1..=n_max {
        let mut first = alloc::vec![None; 1 << len];
        let mut count = alloc::vec![0u64; 1 << len];
        if bits.len() >= len {
            for pos in 0..=bits.len() - len {
                let code = (0..len).fold(0usize, |acc, m| acc | (bits[pos + m] as usize) << m);
                first[code].get_or_insert(pos as u64);
                count[code] += 1;
            }
        }
        for code in 0..1usize << len {
            stats.push(PatternStats {
                pattern: Pattern {
                    len,
                    members: code as u64,
                },
                first: first[code],
                count: count[code],
            });
        }
    }
    Ok(IrregularityReport {
        n_max,
        bound,
        stats,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainStats {
    /// Length of the run of members ending just before `pos`.
    pub ones_before: u64,
    /// Length of the run of non-members starting just after `pos`.
    pub zeros_after: u64,
    /// The zero run reached `bound` and may continue.
    pub truncated: bool,
}

pub fn chain_stats(s: &dyn BinarySequence, pos: u64, bound: u64) -> Result<ChainStats> {
    if pos >= bound {
        return Err(Error::InvalidPattern(format!(
            "position {pos} not below bound {bound}"
        )));
    }
    let ones_before = (0..pos).rev().take_while(|&k| s.contains(k)).count() as u64;
    let zeros_after = (pos + 1..bound).take_while(|&k| !s.contains(k)).count() as u64;
    Ok(ChainStats {
        ones_before,
        zeros_after,
        truncated: pos + 1 + zeros_after >= bound,
    })
}

/// A finite fragment of the theory of a sequence over `{zero, suc, R}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TsAxioms {
    pub theory: Theory,
    pub depth: usize,
    /// Always true: the complete theory of the successor structure is not
    /// finitely axiomatized, only its first few consequences are included.
    pub prefix_only: bool,
}

/// Literals `R(suc^n(zero))` or their negations for `n < depth`, followed by
/// injectivity of `suc`, `zero` outside its range, and no cycles up to `depth`.
pub fn emit_ts_axioms(v: Variant, depth: usize) -> Result<TsAxioms> {
    let s = v.binary()?;
    if depth == 0 {
        return Err(Error::InvalidSize(0));
    }
    let sig = Signature::new()
        .with_constant("zero")?
        .with_function("suc", 1)?
        .with_relation("R", 1)?;
    let zero = Term::constant("zero");
    let x = || Term::var("x");
    let y = || Term::var("y");
    let suc = |t: Term| Term::app("suc", alloc::vec![t]);
    let mut axioms = Vec::new();
    for n in 0..depth {
        let atom = Formula::rel("R", alloc::vec![Term::iterate("suc", n, zero.clone())]);
        axioms.push(if s.contains(n as u64) {
            atom
        } else {
            Formula::not(atom)
        });
    }
    axioms.push(Formula::forall(
        "x",
        Formula::not(Formula::eq(suc(x()), zero.clone())),
    ));
    axioms.push(Formula::forall(
        "x",
        Formula::forall(
            "y",
            Formula::implies(Formula::eq(suc(x()), suc(y())), Formula::eq(x(), y())),
        ),
    ));
    for k in 1..=depth {
        axioms.push(Formula::forall(
            "x",
            Formula::not(Formula::eq(Term::iterate("suc", k, x()), x())),
        ));
    }
    Ok(TsAxioms {
        theory: Theory::new(sig, axioms)?,
        depth,
        prefix_only: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// Writes the blocks out literally.
    fn simulate(len: usize) -> Vec<Symbol> {
        let mut out = Vec::new();
        let mut l = 1;
        while out.len() < len {
            for s in 0..1u64 << l {
                for b in (0..l).rev() {
                    out.push(if s >> b & 1 == 1 { Symbol::One } else { Symbol::Zero });
                }
            }
            out.push(Symbol::Marker);
            l += 1;
        }
        out.truncate(len);
        out
    }

    #[test]
    fn prefix_and_markers() {
        let prefix: String = (0..15).map(|k| master_symbol(k).to_string()).collect();
        assert_eq!(prefix, "01x00011011x000");
        assert_eq!(master_symbol(36), Symbol::Marker);
        assert_eq!(master_symbol(101), Symbol::Marker);
        assert_eq!(marker_positions(12), vec![2, 11]);
        assert_eq!(marker_positions(110), vec![2, 11, 36, 101]);
        assert!(marker_positions(2).is_empty());
        let sim = simulate(5000);
        assert!((0..5000).all(|k| master_symbol(k) == sim[k as usize]));
    }

    #[test]
    fn completions() {
        assert!(!membership(Variant::S0, 2).unwrap());
        assert!(membership(Variant::S1, 2).unwrap());
        assert!(membership(Variant::S0, 1).unwrap());
        assert!(!membership(Variant::S0, 0).unwrap());
        assert_eq!(membership(Variant::Master, 0), Err(Error::NotBinary("master")));
    }

    #[test]
    fn pattern_syntax() {
        let p: Pattern = "0,1:2".parse().unwrap();
        assert_eq!(p.members(), vec![0, 1]);
        assert_eq!(p.to_string(), "0,1:2");
        let e: Pattern = ":3".parse().unwrap();
        assert!(e.is_empty());
        assert_eq!(e.to_string(), ":3");
        assert!("2:2".parse::<Pattern>().is_err());
        assert!("0,1".parse::<Pattern>().is_err());
        assert!(":0".parse::<Pattern>().is_err());
    }

    #[test]
    fn occurrences() {
        let s0 = Variant::S0.binary().unwrap();
        let evens = Variant::Evens.binary().unwrap();
        let both: Pattern = "0,1:2".parse().unwrap();
        assert!(pattern_occurs_at(&s0, &both, 6));
        assert!(!pattern_occurs_at(&s0, &both, 0));
        assert!((0..1000).all(|p| !pattern_occurs_at(&evens, &both, p)));
        assert_eq!(find_pattern(&s0, &"0:1".parse().unwrap(), 100), Some(1));
        assert_eq!(find_pattern(&s0, &":1".parse().unwrap(), 100), Some(0));
        assert_eq!(find_pattern(&s0, &both, 100), Some(6));
        assert_eq!(find_pattern(&s0, &both, 7), None);
    }

    #[test]
    fn evens_report_misses_both_constant_pairs() {
        let evens = Variant::Evens.binary().unwrap();
        let r = irregularity_report(&evens, 2, 1000).unwrap();
        assert!(!r.irregular());
        let missing: Vec<String> = r.missing().iter().map(|p| p.to_string()).collect();
        assert_eq!(missing, vec![":2", "0,1:2"]);
    }

    #[test]
    fn chain_examples() {
        let s0 = Variant::S0.binary().unwrap();
        let c = chain_stats(&s0, 2, 1000).unwrap();
        assert_eq!(c.ones_before, 1);
        assert!(c.zeros_after >= 2);
        let c = chain_stats(&s0, 11, 1000).unwrap();
        assert_eq!((c.ones_before, c.zeros_after, c.truncated), (2, 5, false));
        assert!(chain_stats(&s0, 14, 15).unwrap().truncated);
    }

    #[test]
    fn ts_literals() {
        let t = emit_ts_axioms(Variant::S0, 3).unwrap();
        let lits: Vec<String> = t.theory.axioms()[..3].iter().map(|a| a.to_string()).collect();
        assert_eq!(lits, vec!["!R(zero)", "R(suc(zero))", "!R(suc(suc(zero)))"]);
        assert_eq!(t.theory.axioms().len(), 3 + 2 + 3);
        assert!(t.prefix_only);
        let t = emit_ts_axioms(Variant::S1, 3).unwrap();
        assert_eq!(t.theory.axioms()[2].to_string(), "R(suc(suc(zero)))");
        assert!(emit_ts_axioms(Variant::Master, 3).is_err());
    }
}
