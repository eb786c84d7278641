//! Enumeration, up to GL2-conjugacy, of the subgroups all of whose elements
//! satisfy a local condition.
//!
//! Groups are grown one generator at a time: level 1 holds the cyclic groups
//! generated by conjugacy-class representatives, and level k+1 adjoins every
//! local element to every class representative found at level k. A group
//! `<g1, .., gk>` is conjugate to `<R, x gk x^-1>` with `R` the stored
//! representative of `<g1, .., g(k-1)>`, so ranging the new generator over
//! all local elements reaches every class. Adjoining `g` or any element of
//! the double coset `R g R` yields the same group, so each double coset is
//! tried once.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use rayon::prelude::*;

use super::{ClosureScratch, Fingerprint, Subgroup};
use crate::cartan::{element_local_profile, StandardTarget};
use crate::error::Error;
use crate::ff::PrimeField;
use crate::mat::{gl2_elements, pgl2_representatives, Mat2};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumConfig {
    /// Largest modulus accepted.
    pub max_ell: u32,
    /// Generators per emitted group.
    pub max_generators: usize,
    /// Also run one further level and record whether it finds anything new.
    pub check_saturation: bool,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            max_ell: 13,
            max_generators: 3,
            check_saturation: false,
        }
    }
}

/// Result of [`enumerate_local_candidates`].
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub ell: u32,
    pub target: StandardTarget,
    /// One representative per conjugacy class, in discovery order.
    pub groups: Vec<Subgroup>,
    /// Number of new classes found at each generator count.
    pub new_per_level: Vec<usize>,
    /// `Some(true)` when the extra level found no new class.
    pub saturated: Option<bool>,
}

impl Enumeration {
    /// Every emitted group is the closure of its (at most `max`) generators.
    pub fn regenerates(&self, f: &PrimeField, max: usize) -> bool {
        self.groups.iter().all(|g| {
            g.generators().len() <= max
                && super::closure(f, g.generators()).map(|c| c.elements() == g.elements())
                    == Ok(true)
        })
    }
}

/// `table[g.index(l)]` is true iff `g` is invertible and lies in some
/// conjugate of `t`.
pub fn local_element_table(f: &PrimeField, t: StandardTarget) -> Vec<bool> {
    let ell = f.ell();
    let mut table = vec![false; (ell as usize).pow(4)];
    for g in gl2_elements(f) {
        if element_local_profile(f, g).contains(t) {
            table[g.index(ell)] = true;
        }
    }
    table
}

struct ClassEntry {
    rep: Subgroup,
    canonical: Vec<Mat2>,
    fingerprint: Fingerprint,
}

/// Conjugacy classes of subgroups with exact lookup.
///
/// Every conjugate of every registered class is indexed by the hash of its
/// sorted element list together with the conjugator producing it, and a hit
/// is confirmed by recomputing that conjugate. Hash collisions fall back to
/// a full conjugacy test within the fingerprint bucket.
pub struct ConjugacyStore {
    f: PrimeField,
    conjugators: Vec<(Mat2, Mat2)>,
    classes: Vec<ClassEntry>,
    index: HashMap<u64, (u32, u32)>,
    buckets: HashMap<Fingerprint, Vec<usize>>,
}

fn set_hash(elements: &[Mat2]) -> u64 {
    let mut h = DefaultHasher::new();
    elements.hash(&mut h);
    h.finish()
}

fn conjugate_sorted(elements: &[Mat2], x: Mat2, xi: Mat2, f: &PrimeField) -> Vec<Mat2> {
    let mut v: Vec<Mat2> = elements.iter().map(|g| g.conjugate_by(x, xi, f)).collect();
    v.sort_unstable();
    v
}

impl ConjugacyStore {
    pub fn new(f: PrimeField) -> Self {
        let conjugators = pgl2_representatives(&f)
            .into_iter()
            .map(|x| (x, x.inv(&f)))
            .collect();
        ConjugacyStore {
            f,
            conjugators,
            classes: Vec::new(),
            index: HashMap::new(),
            buckets: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn representative(&self, class: usize) -> &Subgroup {
        &self.classes[class].rep
    }

    /// Lexicographically least sorted element list among the conjugates.
    pub fn canonical_key(&self, class: usize) -> &[Mat2] {
        &self.classes[class].canonical
    }

    /// Class of the subgroup with this sorted element list, if registered.
    pub fn lookup(&self, elements: &[Mat2]) -> Option<usize> {
        let f = &self.f;
        if let Some(&(class, k)) = self.index.get(&set_hash(elements)) {
            let (x, xi) = self.conjugators[k as usize];
            let rep = &self.classes[class as usize].rep;
            if rep.order() == elements.len()
                && rep
                    .elements()
                    .iter()
                    .all(|g| elements.binary_search(&g.conjugate_by(x, xi, f)).is_ok())
            {
                return Some(class as usize);
            }
        } else {
            return None;
        }
        // hash collision: exhaustive test inside the fingerprint bucket
        let probe = Subgroup::from_sorted(Vec::new(), elements.to_vec());
        let bucket = self.buckets.get(&probe.fingerprint(f))?;
        bucket.iter().copied().find(|&c| {
            let rep = self.classes[c].rep.elements();
            self.conjugators
                .iter()
                .any(|&(x, xi)| conjugate_sorted(rep, x, xi, f) == elements)
        })
    }

    /// Registers `g` unless its class is known; returns the class and whether
    /// it was new.
    pub fn insert(&mut self, g: Subgroup) -> (usize, bool) {
        if let Some(c) = self.lookup(g.elements()) {
            return (c, false);
        }
        let f = self.f;
        let class = self.classes.len();
        let orbit: Vec<(u64, Vec<Mat2>)> = self
            .conjugators
            .par_iter()
            .map(|&(x, xi)| {
                let s = conjugate_sorted(g.elements(), x, xi, &f);
                (set_hash(&s), s)
            })
            .collect();
        let mut canonical: Option<&Vec<Mat2>> = None;
        for (k, (h, s)) in orbit.iter().enumerate() {
            self.index.entry(*h).or_insert((class as u32, k as u32));
            if canonical.is_none_or(|c| s < c) {
                canonical = Some(s);
            }
        }
        let canonical = canonical.cloned().unwrap_or_else(|| g.elements().to_vec());
        let fingerprint = g.fingerprint(&f);
        self.buckets
            .entry(fingerprint.clone())
            .or_default()
            .push(class);
        self.classes.push(ClassEntry {
            rep: g,
            canonical,
            fingerprint,
        });
        (class, true)
    }

    pub fn fingerprint(&self, class: usize) -> &Fingerprint {
        &self.classes[class].fingerprint
    }

    pub fn into_groups(self) -> Vec<Subgroup> {
        self.classes.into_iter().map(|c| c.rep).collect()
    }
}

/// Lexicographically least sorted element list over all conjugates of `g`.
pub fn canonical_key(f: &PrimeField, g: &Subgroup) -> Vec<Mat2> {
    pgl2_representatives(f)
        .into_iter()
        .map(|x| conjugate_sorted(g.elements(), x, x.inv(f), f))
        .min()
        .unwrap_or_default()
}

/// Cyclic seeds: scalars and the companion matrices `(0 -n; 1 t)`, which
/// represent every non-scalar conjugacy class.
fn class_representatives(f: &PrimeField, local: &[bool]) -> Vec<Mat2> {
    let ell = f.ell();
    let mut reps: Vec<Mat2> = (1..ell).map(Mat2::scalar).collect();
    for t in 0..ell {
        for n in 1..ell {
            reps.push(Mat2::new(0, f.neg(n), 1, t));
        }
    }
    reps.retain(|g| local[g.index(ell)]);
    reps
}

/// Every local subgroup reachable by adjoining one local element to `rep`.
fn extend(
    f: &PrimeField,
    rep: &Subgroup,
    local: &[bool],
    local_list: &[Mat2],
    scratch: &mut ClosureScratch,
    store: &ConjugacyStore,
) -> Vec<Subgroup> {
    let ell = f.ell();
    let mut covered = vec![false; local.len()];
    for &h in rep.elements() {
        covered[h.index(ell)] = true;
    }
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    let mut gens = rep.generators().to_vec();
    gens.push(Mat2::IDENTITY);
    for &g in local_list {
        if covered[g.index(ell)] {
            continue;
        }
        for &h1 in rep.elements() {
            let h1g = h1.mul(g, f);
            for &h2 in rep.elements() {
                covered[h1g.mul(h2, f).index(ell)] = true;
            }
        }
        *gens.last_mut().unwrap() = g;
        let Some(elements) = scratch.close(f, &gens, Some(local)) else {
            continue;
        };
        if seen.contains(&elements) || store.lookup(&elements).is_some() {
            continue;
        }
        seen.insert(elements.clone());
        out.push(Subgroup::from_sorted(gens.clone(), elements));
    }
    out
}

/// All subgroups, up to conjugacy, generated by at most
/// `cfg.max_generators` elements and consisting entirely of elements that
/// lie in some conjugate of `t`.
pub fn enumerate_local_candidates(
    f: &PrimeField,
    t: StandardTarget,
    cfg: &EnumConfig,
) -> Result<Enumeration, Error> {
    let ell = f.ell();
    if ell > cfg.max_ell {
        return Err(Error::BoundExceeded {
            ell,
            bound: cfg.max_ell,
        });
    }
    let local = local_element_table(f, t);
    let local_list: Vec<Mat2> = gl2_elements(f)
        .into_iter()
        .filter(|g| local[g.index(ell)])
        .collect();
    let mut store = ConjugacyStore::new(*f);
    let mut scratch = ClosureScratch::new(ell);
    let mut new_per_level = Vec::new();

    let before = store.len();
    for g in class_representatives(f, &local) {
        let elements = scratch
            .close(f, &[g], Some(&local))
            .expect("powers of a local element are local");
        store.insert(Subgroup::from_sorted(vec![g], elements));
    }
    new_per_level.push(store.len() - before);
    let mut frontier = before..store.len();

    let levels = cfg.max_generators + usize::from(cfg.check_saturation);
    let mut saturated = None;
    for level in 2..=levels {
        let reps: Vec<&Subgroup> = frontier.clone().map(|c| store.representative(c)).collect();
        let found: Vec<Vec<Subgroup>> = reps
            .par_iter()
            .map_init(
                || ClosureScratch::new(ell),
                |scratch, rep| extend(f, rep, &local, &local_list, scratch, &store),
            )
            .collect();
        if level > cfg.max_generators {
            saturated = Some(found.iter().all(|v| v.is_empty()));
            break;
        }
        let before = store.len();
        for g in found.into_iter().flatten() {
            store.insert(g);
        }
        new_per_level.push(store.len() - before);
        frontier = before..store.len();
    }

    Ok(Enumeration {
        ell,
        target: t,
        groups: store.into_groups(),
        new_per_level,
        saturated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::standard_group;
    use crate::subgrp::{closure, conjugate_into, pgl_type, PglType};

    fn field(l: u64) -> PrimeField {
        PrimeField::of(l).unwrap()
    }

    #[test]
    fn store_merges_conjugates_only() {
        let f = field(5);
        let mut store = ConjugacyStore::new(f);
        let csp = standard_group(&f, StandardTarget::SplitCartan);
        let (c, new) = store.insert(csp.clone());
        assert!(new);
        let x = Mat2::new(1, 2, 3, 4);
        assert_eq!(store.insert(csp.conjugate(x, &f)), (c, false));
        let cns = standard_group(&f, StandardTarget::NonsplitCartan);
        assert!(store.insert(cns).1);
        assert_eq!(store.len(), 2);
        assert_eq!(store.canonical_key(c), canonical_key(&f, &csp).as_slice());
        assert_eq!(
            canonical_key(&f, &csp),
            canonical_key(&f, &csp.conjugate(x, &f))
        );
    }

    #[test]
    fn nonsplit_cartan_candidates_at_five() {
        let f = field(5);
        let e =
            enumerate_local_candidates(&f, StandardTarget::NonsplitCartan, &EnumConfig::default())
                .unwrap();
        let mut cyclic_orders = Vec::new();
        for g in &e.groups {
            match pgl_type(&f, g) {
                PglType::Cyclic(_) => {
                    assert!(conjugate_into(&f, g, StandardTarget::NonsplitCartan).is_some());
                    cyclic_orders.push(g.order());
                }
                // dihedral images escape C_ns but stay inside N_ns
                PglType::Dihedral(_) => {
                    assert!(conjugate_into(&f, g, StandardTarget::NonsplitCartan).is_none());
                    assert!(conjugate_into(&f, g, StandardTarget::NonsplitNormalizer).is_some());
                }
                other => panic!("unexpected type {other}"),
            }
        }
        // every subgroup of the cyclic C_ns of order 24 appears once
        cyclic_orders.sort();
        assert_eq!(cyclic_orders, vec![1, 2, 3, 4, 6, 8, 12, 24]);
        assert!(e.groups.len() > 8);
    }

    #[test]
    fn emitted_groups_are_local_and_distinct() {
        let f = field(7);
        let cfg = EnumConfig {
            check_saturation: true,
            ..EnumConfig::default()
        };
        let e = enumerate_local_candidates(&f, StandardTarget::NonsplitNormalizer, &cfg).unwrap();
        assert_eq!(e.saturated, Some(true));
        assert!(e.regenerates(&f, 3));
        let local = local_element_table(&f, StandardTarget::NonsplitNormalizer);
        let mut keys = std::collections::HashSet::new();
        for g in &e.groups {
            assert!(g.elements().iter().all(|h| local[h.index(7)]));
            assert!(keys.insert(canonical_key(&f, g)));
            assert!(!pgl_type(&f, g).is_exceptional());
        }
        // N_ns itself is among them
        let nns = standard_group(&f, StandardTarget::NonsplitNormalizer);
        let full = e.groups.iter().find(|g| g.order() == nns.order()).unwrap();
        assert!(conjugate_into(&f, full, StandardTarget::NonsplitNormalizer).is_some());
    }

    #[test]
    fn bound_is_enforced() {
        let f = field(17);
        assert_eq!(
            enumerate_local_candidates(&f, StandardTarget::SplitCartan, &EnumConfig::default())
                .unwrap_err(),
            Error::BoundExceeded { ell: 17, bound: 13 }
        );
    }

    #[test]
    fn closure_restricted_to_local_aborts() {
        let f = field(7);
        let local = local_element_table(&f, StandardTarget::SplitCartan);
        let mut scratch = ClosureScratch::new(7);
        // the swap times diag(1, 3) is (0 3; 1 0), whose charpoly X^2 - 3 is irreducible
        assert!(scratch
            .close(&f, &[Mat2::diag(1, 3), Mat2::new(0, 1, 1, 0)], Some(&local))
            .is_none());
        // with diag(1, 2) every antidiagonal element has -det a square
        assert!(scratch
            .close(&f, &[Mat2::diag(1, 2), Mat2::new(0, 1, 1, 0)], Some(&local))
            .is_some());
        let g = scratch
            .close(&f, &[Mat2::diag(1, 2)], Some(&local))
            .unwrap();
        assert_eq!(g, closure(&f, &[Mat2::diag(1, 2)]).unwrap().elements());
    }
}
