use alloc::format;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use super::{decode_tuple, tuple_code, FiniteModel};
use crate::error::{Error, Result};

/// Per-element counts that every isomorphism must preserve.
fn invariants(m: &FiniteModel) -> Vec<Vec<u32>> {
    let n = m.size();
    let sig = m.sig();
    let mut slots = 0;
    for (_, a) in sig.relations() {
        slots += a + 1;
    }
    slots += 2 * sig.function_count() + sig.constant_count();
    let mut inv = alloc::vec![alloc::vec![0u32; slots]; n];
    let mut buf = Vec::new();
    let mut base = 0;
    for (idx, (_, arity)) in sig.relations().enumerate() {
        buf.resize(arity, 0);
        for (code, &b) in m.relation_table(idx).iter().enumerate() {
            if !b {
                continue;
            }
            decode_tuple(n, code, &mut buf);
            for (p, &e) in buf.iter().enumerate() {
                inv[e][base + p] += 1;
            }
            if buf.iter().all(|&e| e == buf[0]) {
                inv[buf[0]][base + arity] += 1;
            }
        }
        base += arity + 1;
    }
    for (idx, (_, arity)) in sig.functions().enumerate() {
        buf.resize(arity, 0);
        for (code, &v) in m.function_table(idx).iter().enumerate() {
            inv[v][base] += 1;
            decode_tuple(n, code, &mut buf);
            if buf.iter().all(|&e| e == v) {
                inv[v][base + 1] += 1;
            }
        }
        base += 2;
    }
    for &c in m.constant_values() {
        inv[c][base] += 1;
        base += 1;
    }
    inv
}

struct Search<'a> {
    m: &'a FiniteModel,
    n: &'a FiniteModel,
    inv_m: Vec<Vec<u32>>,
    inv_n: Vec<Vec<u32>>,
    h: Vec<usize>,
    used: Vec<bool>,
    src: Vec<usize>,
    dst: Vec<usize>,
}

impl Search<'_> {
    /// Relations agree on every tuple over `{0..=i}` that contains `i`.
    fn consistent(&mut self, i: usize) -> bool {
        let size = self.m.size();
        let sub = i + 1;
        for (idx, (_, arity)) in self.m.sig().relations().enumerate() {
            self.src.resize(arity, 0);
            self.dst.resize(arity, 0);
            for code in 0..sub.pow(arity as u32) {
                decode_tuple(sub, code, &mut self.src);
                if !self.src.contains(&i) {
                    continue;
                }
                for (d, &s) in self.dst.iter_mut().zip(self.src.iter()) {
                    *d = self.h[s];
                }
                let a = self.m.relation_table(idx)[tuple_code(size, &self.src)];
                let b = self.n.relation_table(idx)[tuple_code(size, &self.dst)];
                if a != b {
                    return false;
                }
            }
        }
        true
    }

    fn run<F>(&mut self, i: usize, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        let size = self.m.size();
        if i == size {
            if is_isomorphism(self.m, self.n, &self.h) {
                return visit(&self.h);
            }
            return ControlFlow::Continue(());
        }
        for t in 0..size {
            if self.used[t] || self.inv_m[i] != self.inv_n[t] {
                continue;
            }
            self.h[i] = t;
            if !self.consistent(i) {
                continue;
            }
            self.used[t] = true;
            let flow = self.run(i + 1, visit);
            self.used[t] = false;
            flow?;
        }
        ControlFlow::Continue(())
    }
}

fn same_signature(m: &FiniteModel, n: &FiniteModel) -> Result<()> {
    if m.sig() == n.sig() {
        Ok(())
    } else {
        Err(Error::SignatureMismatch(format!(
            "{} vs {}",
            m.sig(),
            n.sig()
        )))
    }
}

/// Visit every isomorphism `m -> n` in lexicographic order of image lists.
pub fn for_each_isomorphism<F>(m: &FiniteModel, n: &FiniteModel, mut visit: F) -> Result<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    same_signature(m, n)?;
    if m.size() != n.size() {
        return Ok(());
    }
    let inv_m = invariants(m);
    let inv_n = invariants(n);
    let mut a = inv_m.clone();
    let mut b = inv_n.clone();
    a.sort_unstable();
    b.sort_unstable();
    if a != b {
        return Ok(());
    }
    let size = m.size();
    let mut search = Search {
        m,
        n,
        inv_m,
        inv_n,
        h: alloc::vec![0; size],
        used: alloc::vec![false; size],
        src: Vec::new(),
        dst: Vec::new(),
    };
    let _ = search.run(0, &mut visit);
    Ok(())
}

/// All isomorphisms `m -> n` as image lists, lexicographically ordered.
pub fn find_isomorphisms(m: &FiniteModel, n: &FiniteModel) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for_each_isomorphism(m, n, |h| {
        out.push(h.to_vec());
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// The lexicographically least isomorphism, if any.
pub fn first_isomorphism(m: &FiniteModel, n: &FiniteModel) -> Result<Option<Vec<usize>>> {
    let mut out = None;
    for_each_isomorphism(m, n, |h| {
        out = Some(h.to_vec());
        ControlFlow::Break(())
    })?;
    Ok(out)
}

pub fn are_isomorphic(m: &FiniteModel, n: &FiniteModel) -> Result<bool> {
    Ok(first_isomorphism(m, n)?.is_some())
}

/// Whether `h` is a bijection `m -> n` preserving every table in both directions.
pub fn is_isomorphism(m: &FiniteModel, n: &FiniteModel, h: &[usize]) -> bool {
    let size = m.size();
    if m.sig() != n.sig() || size != n.size() || h.len() != size {
        return false;
    }
    let mut seen = alloc::vec![false; size];
    for &e in h {
        if e >= size || seen[e] {
            return false;
        }
        seen[e] = true;
    }
    let mut buf = Vec::new();
    for (idx, (_, arity)) in m.sig().relations().enumerate() {
        buf.resize(arity, 0);
        for (code, &b) in m.relation_table(idx).iter().enumerate() {
            decode_tuple(size, code, &mut buf);
            buf.iter_mut().for_each(|e| *e = h[*e]);
            if n.relation_table(idx)[tuple_code(size, &buf)] != b {
                return false;
            }
        }
    }
    for (idx, (_, arity)) in m.sig().functions().enumerate() {
        buf.resize(arity, 0);
        for (code, &v) in m.function_table(idx).iter().enumerate() {
            decode_tuple(size, code, &mut buf);
            buf.iter_mut().for_each(|e| *e = h[*e]);
            if n.function_table(idx)[tuple_code(size, &buf)] != h[v] {
                return false;
            }
        }
    }
    m.constant_values()
        .iter()
        .zip(n.constant_values())
        .all(|(&a, &b)| h[a] == b)
}
