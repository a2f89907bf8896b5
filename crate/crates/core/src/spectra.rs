//! Spectra of concrete automorphism groups, and concrete bijections between
//! model classes with equal spectra.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::groups::{automorphism_group, base_isomorphisms, group_key, GroupKey, PermutationGroup};
use crate::models::{
    canonical_key, find_isomorphisms, first_isomorphism, for_each_isomorphism, for_each_model,
    is_model, Budget, CanonicalKey, FiniteModel, Theory,
};
use crate::ultra::{ultraproduct, Ultrafilter};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumEntry {
    /// Canonical representative of the base-isomorphism class.
    pub group: PermutationGroup,
    /// Isomorphism classes of models whose automorphism group lies in the class.
    pub classes: usize,
    /// Raw models on `{0..n-1}` whose automorphism group lies in the class.
    pub models: usize,
}

/// Per universe size, the groups that occur as automorphism groups of models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spectrum {
    max_size: usize,
    entries: BTreeMap<(usize, GroupKey), SpectrumEntry>,
}

impl Spectrum {
    pub fn max_size(&self) -> usize {
        self.max_size
    }

    /// Entries sorted by size, then key bytes.
    pub fn entries(&self) -> impl Iterator<Item = (usize, &GroupKey, &SpectrumEntry)> {
        self.entries.iter().map(|((n, k), e)| (*n, k, e))
    }

    pub fn get(&self, size: usize, key: &GroupKey) -> Option<&SpectrumEntry> {
        self.entries.get(&(size, key.clone()))
    }

    pub fn total_models(&self, size: usize) -> usize {
        self.entries().filter(|e| e.0 == size).map(|e| e.2.models).sum()
    }

    pub fn total_classes(&self, size: usize) -> usize {
        self.entries().filter(|e| e.0 == size).map(|e| e.2.classes).sum()
    }

    /// Restriction to sizes `1..=max_size`.
    pub fn truncated(&self, max_size: usize) -> Spectrum {
        Spectrum {
            max_size: max_size.min(self.max_size),
            entries: self
                .entries
                .iter()
                .filter(|((n, _), _)| *n <= max_size)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }
}

/// One report line per entry: `size=.. group=.. order=.. classes=.. models=..`.
impl fmt::Display for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, _, e) in self.entries() {
            writeln!(
                f,
                "size={n} group={} order={} classes={} models={}",
                e.group,
                e.group.order(),
                e.classes,
                e.models
            )?;
        }
        Ok(())
    }
}

/// A differing spectrum entry; absent entries count as `0/0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumDiff {
    pub size: usize,
    pub key: GroupKey,
    pub group: PermutationGroup,
    /// `(models, classes)` on the left.
    pub left: (usize, usize),
    /// `(models, classes)` on the right.
    pub right: (usize, usize),
}

impl fmt::Display for SpectrumDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "size={} group={} order={} models/classes {}/{} vs {}/{}",
            self.size,
            self.group,
            self.group.order(),
            self.left.0,
            self.left.1,
            self.right.0,
            self.right.1
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Comparison {
    Equal,
    Witness(SpectrumDiff),
}

/// Caches group keys; conjugate search is the expensive step.
#[derive(Default)]
struct KeyCache(BTreeMap<PermutationGroup, GroupKey>);

impl KeyCache {
    fn key(&mut self, g: &PermutationGroup) -> GroupKey {
        if let Some(k) = self.0.get(g) {
            return k.clone();
        }
        let k = group_key(g);
        self.0.insert(g.clone(), k.clone());
        k
    }
}

pub fn aut_spec(t: &Theory, max_size: usize) -> Result<Spectrum> {
    aut_spec_with(t, max_size, &Budget::default())
}

pub fn aut_spec_with(t: &Theory, max_size: usize, budget: &Budget) -> Result<Spectrum> {
    let mut cache = KeyCache::default();
    let mut classes: BTreeMap<(usize, GroupKey), (BTreeSet<CanonicalKey>, usize)> =
        BTreeMap::new();
    for n in 1..=max_size {
        for_each_model(t, n, budget, |m| {
            let key = cache.key(&automorphism_group(m));
            let slot = classes.entry((n, key)).or_default();
            slot.0.insert(canonical_key(m));
            slot.1 += 1;
            ControlFlow::Continue(())
        })?;
    }
    let entries = classes
        .into_iter()
        .map(|((n, key), (c, models))| {
            let group = key.group();
            (
                (n, key),
                SpectrumEntry {
                    group,
                    classes: c.len(),
                    models,
                },
            )
        })
        .collect();
    Ok(Spectrum { max_size, entries })
}

/// Every differing entry in (size, key) order.
pub fn spectrum_differences(s1: &Spectrum, s2: &Spectrum) -> Result<Vec<SpectrumDiff>> {
    if s1.max_size != s2.max_size {
        return Err(Error::SizeRangeMismatch(s1.max_size, s2.max_size));
    }
    let keys: BTreeSet<&(usize, GroupKey)> = s1.entries.keys().chain(s2.entries.keys()).collect();
    let counts = |e: Option<&SpectrumEntry>| e.map_or((0, 0), |e| (e.models, e.classes));
    let mut out = Vec::new();
    for k in keys {
        let a = s1.entries.get(k);
        let b = s2.entries.get(k);
        if counts(a) != counts(b) {
            out.push(SpectrumDiff {
                size: k.0,
                key: k.1.clone(),
                group: k.1.group(),
                left: counts(a),
                right: counts(b),
            });
        }
    }
    Ok(out)
}

/// `Equal`, or the first differing entry.
pub fn compare_spectra(s1: &Spectrum, s2: &Spectrum) -> Result<Comparison> {
    Ok(spectrum_differences(s1, s2)?
        .into_iter()
        .next()
        .map_or(Comparison::Equal, Comparison::Witness))
}

/// A universe-preserving pairing of the models of one theory with those of another.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcreteBijection {
    max_size: usize,
    map: BTreeMap<Vec<u8>, (FiniteModel, FiniteModel)>,
    representatives: Vec<(FiniteModel, FiniteModel)>,
}

impl ConcreteBijection {
    /// Arbitrary pairing; validity is the verifier's job.
    pub fn from_pairs(
        max_size: usize,
        pairs: impl IntoIterator<Item = (FiniteModel, FiniteModel)>,
    ) -> Self {
        ConcreteBijection {
            max_size,
            map: pairs
                .into_iter()
                .map(|(a, b)| (a.encoding(), (a, b)))
                .collect(),
            representatives: Vec::new(),
        }
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    pub fn get(&self, m: &FiniteModel) -> Option<&FiniteModel> {
        self.map
            .get(&m.encoding())
            .filter(|(a, _)| a == m)
            .map(|(_, b)| b)
    }

    /// Pairs in order of the source model's encoding.
    pub fn pairs(&self) -> impl Iterator<Item = (&FiniteModel, &FiniteModel)> {
        self.map.values().map(|(a, b)| (a, b))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Representative pairs `(M(G,i), M'(G,i))` used by the construction.
    pub fn representatives(&self) -> &[(FiniteModel, FiniteModel)] {
        &self.representatives
    }
}

type Classes = BTreeMap<GroupKey, BTreeMap<CanonicalKey, Vec<FiniteModel>>>;

fn classify(t: &Theory, n: usize, budget: &Budget, cache: &mut KeyCache) -> Result<Classes> {
    let mut out: Classes = BTreeMap::new();
    for_each_model(t, n, budget, |m| {
        let key = cache.key(&automorphism_group(m));
        out.entry(key)
            .or_default()
            .entry(canonical_key(m))
            .or_default()
            .push(m.clone());
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// A class member whose automorphism group is literally `g`; the least
/// encoding among those, else a conjugated copy of the least member.
fn representative(members: &[FiniteModel], g: &PermutationGroup) -> Result<FiniteModel> {
    let literal = members
        .iter()
        .filter(|m| automorphism_group(m) == *g)
        .min_by_key(|m| m.encoding());
    if let Some(m) = literal {
        return Ok(m.clone());
    }
    let m = members
        .iter()
        .min_by_key(|m| m.encoding())
        .ok_or_else(|| Error::RepresentativeSelection("empty class".into()))?;
    let b = base_isomorphisms(&automorphism_group(m), g)
        .into_iter()
        .next()
        .ok_or_else(|| {
            Error::RepresentativeSelection(format!("no conjugate of Aut({m}) equals {g}"))
        })?;
    Ok(m.permuted(b.images()))
}

pub fn build_concrete_iso(t1: &Theory, t2: &Theory, max_size: usize) -> Result<ConcreteBijection> {
    build_concrete_iso_with(t1, t2, max_size, &Budget::default())
}

/// Pairs the `i`-th class (by canonical key) of each group key on both
/// sides through representatives with identical automorphism groups, then
/// transports: `b(M) = f(M'(G,i))` for the least isomorphism `f: M(G,i) -> M`.
pub fn build_concrete_iso_with(
    t1: &Theory,
    t2: &Theory,
    max_size: usize,
    budget: &Budget,
) -> Result<ConcreteBijection> {
    let s1 = aut_spec_with(t1, max_size, budget)?;
    let s2 = aut_spec_with(t2, max_size, budget)?;
    if let Comparison::Witness(w) = compare_spectra(&s1, &s2)? {
        return Err(Error::SpectraMismatch(alloc::boxed::Box::new(w)));
    }
    let mut cache = KeyCache::default();
    let mut map = BTreeMap::new();
    let mut representatives = Vec::new();
    for n in 1..=max_size {
        let c1 = classify(t1, n, budget, &mut cache)?;
        let c2 = classify(t2, n, budget, &mut cache)?;
        for (key, classes1) in &c1 {
            let g = key.group();
            let classes2 = c2.get(key).ok_or_else(|| {
                Error::RepresentativeSelection(format!("group {g} missing on the right"))
            })?;
            for (members1, members2) in classes1.values().zip(classes2.values()) {
                let r1 = representative(members1, &g)?;
                let r2 = representative(members2, &g)?;
                for m in members1 {
                    let f = first_isomorphism(&r1, m)?
                        .expect("members of a class are isomorphic");
                    map.insert(m.encoding(), (m.clone(), r2.permuted(&f)));
                }
                representatives.push((r1, r2));
            }
        }
    }
    Ok(ConcreteBijection {
        max_size,
        map,
        representatives,
    })
}

/// A model `M` and two isomorphisms `f, g: M(G,i) -> M` transporting the
/// partner representative to different models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WellDefinednessViolation {
    pub model: FiniteModel,
    pub first: Vec<usize>,
    pub second: Vec<usize>,
}

/// Checks that `f(M'(G,i))` does not depend on the choice of `f`, over every
/// isomorphism from each representative to each model of its class.
pub fn well_definedness_violation(
    b: &ConcreteBijection,
) -> Result<Option<WellDefinednessViolation>> {
    for (m, _) in b.pairs() {
        for (r1, r2) in &b.representatives {
            if r1.size() != m.size() || canonical_key(r1) != canonical_key(m) {
                continue;
            }
            let mut first: Option<(Vec<usize>, FiniteModel)> = None;
            let mut bad = None;
            for_each_isomorphism(r1, m, |f| {
                let image = r2.permuted(f);
                match &first {
                    None => first = Some((f.to_vec(), image)),
                    Some((g, img)) if *img != image => {
                        bad = Some(WellDefinednessViolation {
                            model: m.clone(),
                            first: g.clone(),
                            second: f.to_vec(),
                        });
                        return ControlFlow::Break(());
                    }
                    _ => {}
                }
                ControlFlow::Continue(())
            })?;
            if bad.is_some() {
                return Ok(bad);
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Universe {
        model: FiniteModel,
        image: FiniteModel,
    },
    /// `h: m -> n` is an isomorphism on exactly one side.
    Isomorphism {
        m: FiniteModel,
        n: FiniteModel,
        h: Vec<usize>,
        on_source_side: bool,
    },
    Ultraproduct {
        factors: Vec<FiniteModel>,
        point: usize,
        expected: FiniteModel,
        found: FiniteModel,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Universe { model, image } => {
                write!(f, "universe changed: {model} -> {image}")
            }
            Violation::Isomorphism {
                m,
                n,
                h,
                on_source_side,
            } => {
                let side = if *on_source_side { "source" } else { "image" };
                write!(f, "h={h:?} is an isomorphism only on the {side} side: M: {m} N: {n}")
            }
            Violation::Ultraproduct {
                factors,
                point,
                expected,
                found,
            } => {
                write!(
                    f,
                    "ultraproduct at point {point} of {} factors: b gives {expected}, product of images gives {found}",
                    factors.len()
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(Violation),
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Largest index set for ultraproducts.
    pub index_bound: usize,
    /// Factor tuples tried per (index size, principal point).
    pub max_tuples: usize,
    /// Only compare isomorphisms between distinct models.
    pub distinct_only: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            index_bound: 2,
            max_tuples: 200,
            distinct_only: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub universes: Verdict,
    pub isomorphisms: Verdict,
    pub ultraproducts: Verdict,
    pub models_checked: usize,
    pub pairs_checked: usize,
    pub tuples_checked: usize,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.universes.passed() && self.isomorphisms.passed() && self.ultraproducts.passed()
    }
}

fn models_up_to(t: &Theory, max_size: usize, budget: &Budget) -> Result<Vec<FiniteModel>> {
    crate::models::enumerate_models_up_to(t, max_size, budget)
}

/// Checks that `b` is a bijection `Mod(t1) -> Mod(t2)` on sizes up to
/// `max_size`, then evaluates the three verdicts.
pub fn verify_concrete_iso(
    b: &ConcreteBijection,
    t1: &Theory,
    t2: &Theory,
    max_size: usize,
    options: &VerifyOptions,
    budget: &Budget,
) -> Result<VerificationReport> {
    let dom = models_up_to(t1, max_size, budget)?;
    let cod = models_up_to(t2, max_size, budget)?;
    let mut image = Vec::with_capacity(dom.len());
    for (i, m) in dom.iter().enumerate() {
        let bm = b.get(m).ok_or(Error::BijectionNotTotal(i))?;
        if !is_model(bm, t2)? {
            return Err(Error::BijectionNotOnto(format!("{bm} is not a model")));
        }
        image.push(bm.clone());
    }
    let mut seen = BTreeMap::new();
    for (i, bm) in image.iter().enumerate() {
        if seen.insert(bm.clone(), i).is_some() {
            return Err(Error::BijectionNotInjective(i));
        }
    }
    if let Some(missed) = cod.iter().find(|m| !seen.contains_key(*m)) {
        return Err(Error::BijectionNotOnto(format!("{missed} has no preimage")));
    }

    let universes = dom
        .iter()
        .zip(&image)
        .find(|(m, bm)| m.size() != bm.size())
        .map_or(Verdict::Pass, |(m, bm)| {
            Verdict::Fail(Violation::Universe {
                model: m.clone(),
                image: bm.clone(),
            })
        });

    let (isomorphisms, pairs_checked) = check_isomorphisms(&dom, &image, options.distinct_only)?;
    let (ultraproducts, tuples_checked) = check_ultraproducts(&dom, b, options)?;
    Ok(VerificationReport {
        universes,
        isomorphisms,
        ultraproducts,
        models_checked: dom.len(),
        pairs_checked,
        tuples_checked,
    })
}

/// Verdict (b). Isomorphism sets are empty unless the pair is isomorphic on
/// some side, so only pairs inside a class on either side are compared.
fn check_isomorphisms(
    dom: &[FiniteModel],
    image: &[FiniteModel],
    distinct_only: bool,
) -> Result<(Verdict, usize)> {
    let mut buckets: BTreeMap<(bool, usize, CanonicalKey), Vec<usize>> = BTreeMap::new();
    for (i, (m, bm)) in dom.iter().zip(image).enumerate() {
        buckets
            .entry((false, m.size(), canonical_key(m)))
            .or_default()
            .push(i);
        buckets
            .entry((true, bm.size(), canonical_key(bm)))
            .or_default()
            .push(i);
    }
    let mut pairs = BTreeSet::new();
    for members in buckets.values() {
        for &i in members {
            for &j in members {
                if !(distinct_only && i == j) {
                    pairs.insert((i, j));
                }
            }
        }
    }
    for &(i, j) in &pairs {
        let (m, n) = (&dom[i], &dom[j]);
        let (bm, bn) = (&image[i], &image[j]);
        if m.size() != n.size() || bm.size() != bn.size() {
            continue;
        }
        let left = find_isomorphisms(m, n)?;
        let right = find_isomorphisms(bm, bn)?;
        if left != right {
            let (h, on_source_side) = match left.iter().find(|h| !right.contains(h)) {
                Some(h) => (h.clone(), true),
                None => (
                    right
                        .iter()
                        .find(|h| !left.contains(h))
                        .expect("lists differ")
                        .clone(),
                    false,
                ),
            };
            return Ok((
                Verdict::Fail(Violation::Isomorphism {
                    m: m.clone(),
                    n: n.clone(),
                    h,
                    on_source_side,
                }),
                pairs.len(),
            ));
        }
    }
    Ok((Verdict::Pass, pairs.len()))
}

/// Verdict (c): `b(∏_U M_i) = ∏_U b(M_i)` for principal `U` on index sets
/// up to the bound. All factor tuples are tried when there are at most
/// `max_tuples`; otherwise an evenly strided sample.
fn check_ultraproducts(
    dom: &[FiniteModel],
    b: &ConcreteBijection,
    options: &VerifyOptions,
) -> Result<(Verdict, usize)> {
    let mut checked = 0;
    if dom.is_empty() {
        return Ok((Verdict::Pass, 0));
    }
    let d = dom.len() as u128;
    for k in 1..=options.index_bound {
        let total = d.checked_pow(k as u32).unwrap_or(u128::MAX);
        let take = total.min(options.max_tuples as u128);
        let stride = total / take.max(1);
        for p in 0..k {
            let u = Ultrafilter::principal(p, k)?;
            for s in 0..take {
                let mut code = s * stride;
                let mut idx = alloc::vec![0usize; k];
                for slot in idx.iter_mut().rev() {
                    *slot = (code % d) as usize;
                    code /= d;
                }
                let factors: Vec<FiniteModel> = idx.iter().map(|&i| dom[i].clone()).collect();
                let images: Vec<FiniteModel> = factors
                    .iter()
                    .map(|m| b.get(m).expect("total").clone())
                    .collect();
                let q = ultraproduct(&factors, &u)?.quotient;
                let q_images = ultraproduct(&images, &u)?.quotient;
                checked += 1;
                let expected = b
                    .get(&q)
                    .expect("a principal quotient is one of the factors")
                    .clone();
                if expected != q_images {
                    return Ok((
                        Verdict::Fail(Violation::Ultraproduct {
                            factors,
                            point: p,
                            expected,
                            found: q_images,
                        }),
                        checked,
                    ));
                }
            }
        }
    }
    Ok((Verdict::Pass, checked))
}

/// Human-readable summary of a verification run.
pub fn report_lines(r: &VerificationReport) -> Vec<String> {
    let line = |name: &str, v: &Verdict| match v {
        Verdict::Pass => format!("{name}: pass"),
        Verdict::Fail(w) => format!("{name}: FAIL {w}"),
    };
    alloc::vec![
        line("universes", &r.universes),
        line("isomorphisms", &r.isomorphisms),
        line("ultraproducts", &r.ultraproducts),
        format!(
            "checked models={} pairs={} tuples={}",
            r.models_checked, r.pairs_checked, r.tuples_checked
        ),
    ]
}
