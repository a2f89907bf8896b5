//! Concrete permutation groups and base isomorphism.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::models::{find_isomorphisms, FiniteModel};

/// Step to the next permutation in lexicographic order; false after the last.
pub fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        p.reverse();
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// All permutations of `{0..n-1}` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    loop {
        out.push(Permutation(p.clone()));
        if !next_permutation(&mut p) {
            return out;
        }
    }
}

/// A bijection of `{0..n-1}` given by its image list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = alloc::vec![false; images.len()];
        for &e in &images {
            if e >= images.len() || seen[e] {
                return Err(Error::InvalidPermutation(e));
            }
            seen[e] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, a: usize) -> usize {
        self.0[a]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &e)| i == e)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&e| self.0[e]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = alloc::vec![0; self.0.len()];
        for (i, &e) in self.0.iter().enumerate() {
            inv[e] = i;
        }
        Permutation(inv)
    }

    /// `b ∘ self ∘ b⁻¹`.
    pub fn conjugate_by(&self, b: &Permutation) -> Permutation {
        let mut out = alloc::vec![0; self.0.len()];
        for (i, &e) in self.0.iter().enumerate() {
            out[b.0[i]] = b.0[e];
        }
        Permutation(out)
    }

    /// Cycle lengths in ascending order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut seen = alloc::vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 0..self.0.len() {
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i];
                len += 1;
            }
            if len > 0 {
                out.push(len);
            }
        }
        out.sort_unstable();
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("]")
    }
}

/// A permutation group on base `{0..degree-1}`, elements sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PermutationGroup {
    degree: usize,
    elements: Vec<Permutation>,
}

impl PermutationGroup {
    /// Validate identity, closure and inverses.
    pub fn new(degree: usize, mut elements: Vec<Permutation>) -> Result<Self> {
        elements.sort();
        elements.dedup();
        if let Some(p) = elements.iter().find(|p| p.degree() != degree) {
            return Err(Error::NotAGroup(format!(
                "{p} does not act on {degree} points"
            )));
        }
        let g = PermutationGroup { degree, elements };
        if !g.contains(&Permutation::identity(degree)) {
            return Err(Error::NotAGroup("identity missing".into()));
        }
        for a in &g.elements {
            if !g.contains(&a.inverse()) {
                return Err(Error::NotAGroup(format!("inverse of {a} missing")));
            }
            for b in &g.elements {
                let c = a.compose(b);
                if !g.contains(&c) {
                    return Err(Error::NotAGroup(format!("{a} ∘ {b} = {c} missing")));
                }
            }
        }
        Ok(g)
    }

    fn from_sorted(degree: usize, elements: Vec<Permutation>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        PermutationGroup { degree, elements }
    }

    pub fn trivial(degree: usize) -> Self {
        Self::from_sorted(degree, alloc::vec![Permutation::identity(degree)])
    }

    pub fn symmetric(degree: usize) -> Self {
        Self::from_sorted(degree, all_permutations(degree))
    }

    /// Closure of `gens` under composition.
    pub fn generated_by(degree: usize, gens: &[Permutation]) -> Result<Self> {
        if let Some(p) = gens.iter().find(|p| p.degree() != degree) {
            return Err(Error::NotAGroup(format!(
                "{p} does not act on {degree} points"
            )));
        }
        let mut elements = alloc::vec![Permutation::identity(degree)];
        let mut frontier = elements.clone();
        while let Some(p) = frontier.pop() {
            for g in gens {
                let q = g.compose(&p);
                if let Err(pos) = elements.binary_search(&q) {
                    elements.insert(pos, q.clone());
                    frontier.push(q);
                }
            }
        }
        Ok(Self::from_sorted(degree, elements))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    /// `{b ∘ g ∘ b⁻¹ : g ∈ G}`.
    pub fn conjugate_by(&self, b: &Permutation) -> PermutationGroup {
        let mut elements: Vec<Permutation> =
            self.elements.iter().map(|g| g.conjugate_by(b)).collect();
        elements.sort();
        Self::from_sorted(self.degree, elements)
    }

    fn cycle_types(&self) -> Vec<Vec<usize>> {
        let mut t: Vec<Vec<usize>> = self.elements.iter().map(|g| g.cycle_type()).collect();
        t.sort();
        t
    }
}

/// Printed as the sorted list of image lists, e.g. `[[0,1],[1,0]]`.
impl fmt::Display for PermutationGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, p) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("]")
    }
}

/// The concrete automorphism group of `m`.
pub fn automorphism_group(m: &FiniteModel) -> PermutationGroup {
    let isos = find_isomorphisms(m, m).expect("a model shares its own signature");
    PermutationGroup::from_sorted(m.size(), isos.into_iter().map(Permutation).collect())
}

fn base_isomorphism_candidates(g: &PermutationGroup, h: &PermutationGroup) -> bool {
    g.degree == h.degree && g.order() == h.order() && g.cycle_types() == h.cycle_types()
}

/// All bijections `b` of the base with `b G b⁻¹ = H`, in lexicographic order.
pub fn base_isomorphisms(g: &PermutationGroup, h: &PermutationGroup) -> Vec<Permutation> {
    if !base_isomorphism_candidates(g, h) {
        return Vec::new();
    }
    all_permutations(g.degree)
        .into_iter()
        .filter(|b| g.elements.iter().all(|x| h.contains(&x.conjugate_by(b))))
        .collect()
}

pub fn are_base_isomorphic(g: &PermutationGroup, h: &PermutationGroup) -> bool {
    if !base_isomorphism_candidates(g, h) {
        return false;
    }
    let mut b: Vec<usize> = (0..g.degree).collect();
    loop {
        let p = Permutation(b.clone());
        if g.elements.iter().all(|x| h.contains(&x.conjugate_by(&p))) {
            return true;
        }
        if !next_permutation(&mut b) {
            return false;
        }
    }
}

/// Identifier of a base-isomorphism class: the least sorted conjugate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupKey(Vec<u8>);

impl GroupKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0[0] as usize
    }

    /// The canonical representative group this key encodes.
    pub fn group(&self) -> PermutationGroup {
        let n = self.degree();
        let elements = self.0[1..]
            .chunks(n.max(1))
            .map(|c| Permutation(c.iter().map(|&e| e as usize).collect()))
            .collect();
        PermutationGroup::from_sorted(n, elements)
    }
}

fn encode_group(g: &PermutationGroup) -> Vec<u8> {
    let mut out = alloc::vec![g.degree as u8];
    for p in &g.elements {
        out.extend(p.0.iter().map(|&e| e as u8));
    }
    out
}

/// Encoding of the lexicographically least conjugate of `g`.
pub fn group_key(g: &PermutationGroup) -> GroupKey {
    let n = g.degree;
    let factorial: usize = (1..=n).product();
    if g.order() == factorial || g.order() == 1 {
        // normal in the symmetric group: every conjugate is itself
        return GroupKey(encode_group(g));
    }
    let mut best = g.clone();
    let mut b: Vec<usize> = (0..n).collect();
    while next_permutation(&mut b) {
        let c = g.conjugate_by(&Permutation(b.clone()));
        if c.elements < best.elements {
            best = c;
        }
    }
    GroupKey(encode_group(&best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folang::Signature;
    use alloc::string::ToString;
    use alloc::vec;

    fn perm(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    fn e_r_sig() -> Signature {
        Signature::new()
            .with_relation("E", 2)
            .unwrap()
            .with_relation("R", 2)
            .unwrap()
    }

    #[test]
    fn automorphism_examples() {
        let bare = FiniteModel::new(Signature::new(), 3).unwrap();
        assert_eq!(automorphism_group(&bare).order(), 6);
        let m = FiniteModel::builder(e_r_sig(), 2)
            .unwrap()
            .relation("R", &[&[0, 1]])
            .unwrap()
            .build();
        assert!(automorphism_group(&m).is_trivial());
        let sym = FiniteModel::builder(e_r_sig(), 2)
            .unwrap()
            .relation("R", &[&[0, 1], &[1, 0]])
            .unwrap()
            .build();
        assert_eq!(automorphism_group(&sym).order(), 2);
        assert_eq!(automorphism_group(&sym).to_string(), "[[0,1],[1,0]]");
    }

    #[test]
    fn base_isomorphism_examples() {
        let t2 = PermutationGroup::trivial(2);
        assert_eq!(base_isomorphisms(&t2, &t2).len(), 2);
        assert!(base_isomorphisms(&PermutationGroup::symmetric(2), &t2).is_empty());
        let g = PermutationGroup::generated_by(3, &[perm(&[1, 0, 2])]).unwrap();
        let h = PermutationGroup::generated_by(3, &[perm(&[0, 2, 1])]).unwrap();
        let bs = base_isomorphisms(&g, &h);
        assert!(bs.contains(&perm(&[1, 2, 0])));
        assert!(bs.iter().all(|b| g.conjugate_by(b) == h));
        assert!(are_base_isomorphic(&g, &h));
    }

    #[test]
    fn group_keys() {
        let t = PermutationGroup::trivial(2);
        assert_eq!(group_key(&t), group_key(&t.conjugate_by(&perm(&[1, 0]))));
        assert_ne!(group_key(&t), group_key(&PermutationGroup::symmetric(2)));
        let g = PermutationGroup::generated_by(3, &[perm(&[0, 2, 1])]).unwrap();
        let key = group_key(&g);
        assert_eq!(key.group().to_string(), "[[0,1,2],[0,2,1]]");
        assert_eq!(group_key(&key.group()), key);
    }

    #[test]
    fn validation_rejects_non_groups() {
        assert_eq!(Permutation::new(vec![0, 0]), Err(Error::InvalidPermutation(0)));
        assert!(PermutationGroup::new(2, vec![perm(&[1, 0])]).is_err());
        assert!(PermutationGroup::new(3, vec![perm(&[0, 1, 2]), perm(&[1, 2, 0])]).is_err());
        let c3 = PermutationGroup::generated_by(3, &[perm(&[1, 2, 0])]).unwrap();
        assert_eq!(PermutationGroup::new(3, c3.elements().to_vec()), Ok(c3));
    }

    #[test]
    fn permutation_algebra() {
        let a = perm(&[1, 2, 0]);
        let b = perm(&[1, 0, 2]);
        assert_eq!(a.compose(&a.inverse()), Permutation::identity(3));
        assert_eq!(a.compose(&b).images(), &[2, 1, 0]);
        assert_eq!(
            a.conjugate_by(&b),
            b.compose(&a).compose(&b.inverse())
        );
        assert_eq!(a.cycle_type(), vec![3]);
        assert_eq!(b.cycle_type(), vec![1, 2]);
        assert_eq!(all_permutations(3).len(), 6);
    }
}
