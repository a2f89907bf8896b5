use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{decode_tuple, tuple_code, FiniteModel};
use crate::groups::next_permutation;

/// Opaque isomorphism-class identifier: the least encoding in the orbit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

/// Writes the encoding of `sigma(M)` cell by cell and stops as soon as it
/// exceeds the best encoding seen so far.
struct Writer<'a> {
    best: Option<&'a [u8]>,
    out: Vec<u8>,
    ord: Ordering,
}

impl Writer<'_> {
    fn push(&mut self, v: u8) -> bool {
        let i = self.out.len();
        self.out.push(v);
        if self.ord == Ordering::Equal {
            if let Some(b) = self.best {
                self.ord = v.cmp(&b[i]);
            }
        }
        self.ord != Ordering::Greater
    }
}

fn encode_image(m: &FiniteModel, sigma: &[usize], inv: &[usize], w: &mut Writer<'_>) -> bool {
    let n = m.size();
    if !w.push(n as u8) {
        return false;
    }
    let mut buf = Vec::new();
    for (idx, (_, arity)) in m.sig().relations().enumerate() {
        buf.resize(arity, 0);
        let table = m.relation_table(idx);
        for code in 0..table.len() {
            decode_tuple(n, code, &mut buf);
            buf.iter_mut().for_each(|e| *e = inv[*e]);
            if !w.push(table[tuple_code(n, &buf)] as u8) {
                return false;
            }
        }
    }
    for (idx, (_, arity)) in m.sig().functions().enumerate() {
        buf.resize(arity, 0);
        let table = m.function_table(idx);
        for code in 0..table.len() {
            decode_tuple(n, code, &mut buf);
            buf.iter_mut().for_each(|e| *e = inv[*e]);
            if !w.push(sigma[table[tuple_code(n, &buf)]] as u8) {
                return false;
            }
        }
    }
    for &c in m.constant_values() {
        if !w.push(sigma[c] as u8) {
            return false;
        }
    }
    true
}

/// Least byte encoding of `sigma(M)` over all permutations `sigma`.
pub fn canonical_key(m: &FiniteModel) -> CanonicalKey {
    let n = m.size();
    let mut sigma: Vec<usize> = (0..n).collect();
    let mut inv = sigma.clone();
    let mut best: Vec<u8> = m.encoding();
    loop {
        for (a, &s) in sigma.iter().enumerate() {
            inv[s] = a;
        }
        let mut w = Writer {
            best: Some(&best),
            out: Vec::with_capacity(best.len()),
            ord: Ordering::Equal,
        };
        if encode_image(m, &sigma, &inv, &mut w) && w.ord == Ordering::Less {
            best = w.out;
        }
        if !next_permutation(&mut sigma) {
            break;
        }
    }
    CanonicalKey(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folang::Signature;

    fn p_model(p: &[&[usize]]) -> FiniteModel {
        let sig = Signature::new().with_relation("P", 1).unwrap();
        FiniteModel::builder(sig, 2)
            .unwrap()
            .relation("P", p)
            .unwrap()
            .build()
    }

    #[test]
    fn unary_keys() {
        assert_eq!(canonical_key(&p_model(&[&[0]])), canonical_key(&p_model(&[&[1]])));
        assert_ne!(canonical_key(&p_model(&[])), canonical_key(&p_model(&[&[0]])));
    }

    #[test]
    fn key_is_least_encoding_in_orbit() {
        let sig = Signature::new()
            .with_relation("R", 2)
            .unwrap()
            .with_function("f", 1)
            .unwrap();
        let m = FiniteModel::builder(sig, 3)
            .unwrap()
            .relation("R", &[&[0, 1], &[2, 2]])
            .unwrap()
            .function("f", &[2, 0, 0])
            .unwrap()
            .build();
        let mut sigma = [0, 1, 2];
        let mut least = m.encoding();
        loop {
            let e = m.permuted(&sigma).encoding();
            if e < least {
                least = e;
            }
            if !next_permutation(&mut sigma) {
                break;
            }
        }
        assert_eq!(canonical_key(&m).as_bytes(), &least[..]);
        assert_eq!(canonical_key(&m.permuted(&[1, 2, 0])), canonical_key(&m));
    }
}
