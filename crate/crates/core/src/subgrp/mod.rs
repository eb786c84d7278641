//! Finite subgroups of GL2(F_l): closure, projective-image typing,
//! containment in conjugates of the standard targets, and the search for
//! local-condition candidates up to conjugacy.

mod cache;
mod enumerate;

pub use cache::{read_cache, write_cache, CacheRecord, CACHE_HEADER};
pub use enumerate::{
    canonical_key, enumerate_local_candidates, local_element_table, ConjugacyStore, EnumConfig,
    Enumeration,
};

use std::collections::BTreeMap;
use std::fmt;

use crate::cartan::{all_frames, in_frame, CartanFrame, FrameMembership, StandardTarget};
use crate::error::Error;
use crate::ff::PrimeField;
use crate::mat::{act, all_lines, psl2_order, Mat2, ProjLine};

/// A subgroup stored as its generators and its sorted element list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup {
    generators: Vec<Mat2>,
    elements: Vec<Mat2>,
}

impl Subgroup {
    /// Wraps an element list that is already known to be a sorted subgroup.
    pub(crate) fn from_sorted(generators: Vec<Mat2>, elements: Vec<Mat2>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        Subgroup {
            generators,
            elements,
        }
    }

    /// Checks closure and builds a subgroup from an arbitrary element list.
    pub fn from_elements(
        f: &PrimeField,
        generators: Vec<Mat2>,
        mut elements: Vec<Mat2>,
    ) -> Result<Self, Error> {
        elements.sort_unstable();
        elements.dedup();
        if elements.binary_search(&Mat2::IDENTITY).is_err() {
            return Err(Error::NotASubgroup);
        }
        for &g in &elements {
            if !g.is_invertible(f) {
                return Err(Error::Singular(g.to_string()));
            }
            for &h in &elements {
                if elements.binary_search(&g.mul(h, f)).is_err() {
                    return Err(Error::NotASubgroup);
                }
            }
        }
        Ok(Subgroup {
            generators,
            elements,
        })
    }

    pub fn generators(&self) -> &[Mat2] {
        &self.generators
    }

    pub fn elements(&self) -> &[Mat2] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: Mat2) -> bool {
        self.elements.binary_search(&g).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&g| other.contains(g))
    }

    /// `x G x^-1`, with conjugated generators.
    pub fn conjugate(&self, x: Mat2, f: &PrimeField) -> Subgroup {
        let xi = x.inv(f);
        let generators = self
            .generators
            .iter()
            .map(|g| g.conjugate_by(x, xi, f))
            .collect();
        let mut elements: Vec<Mat2> = self
            .elements
            .iter()
            .map(|g| g.conjugate_by(x, xi, f))
            .collect();
        elements.sort_unstable();
        Subgroup {
            generators,
            elements,
        }
    }

    /// `+-G`; the modular curve of `G` only depends on this group.
    pub fn with_minus_identity(&self, f: &PrimeField) -> Subgroup {
        let minus = Mat2::scalar(f.neg(1));
        if self.contains(minus) {
            return self.clone();
        }
        let mut gens = self.generators.clone();
        gens.push(minus);
        closure(f, &gens).expect("generators are invertible")
    }

    /// Elements of the subgroup lying in SL2.
    pub fn sl2_part(&self, f: &PrimeField) -> Vec<Mat2> {
        self.elements
            .iter()
            .copied()
            .filter(|g| g.det(f) == 1)
            .collect()
    }

    /// Distinct images in PGL2, as projective normal forms, sorted.
    pub fn projective_image(&self, f: &PrimeField) -> Vec<Mat2> {
        let mut h: Vec<Mat2> = self
            .elements
            .iter()
            .map(|g| g.projective_normal(f))
            .collect();
        h.sort_unstable();
        h.dedup();
        h
    }

    /// Sorted image of the determinant.
    pub fn det_image(&self, f: &PrimeField) -> Vec<u32> {
        let mut d: Vec<u32> = self.elements.iter().map(|g| g.det(f)).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn fingerprint(&self, f: &PrimeField) -> Fingerprint {
        let mut traces = BTreeMap::new();
        let mut pgl_orders = BTreeMap::new();
        for &g in &self.elements {
            *traces.entry(g.trace(f)).or_insert(0usize) += 1;
            *pgl_orders.entry(g.pgl_order(f)).or_insert(0usize) += 1;
        }
        Fingerprint {
            order: self.order(),
            det_image: self.det_image(f),
            traces: traces.into_iter().collect(),
            pgl_orders: pgl_orders.into_iter().collect(),
        }
    }
}

/// Conjugation-invariant summary used to bucket subgroups before any
/// conjugacy test.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint {
    pub order: usize,
    pub det_image: Vec<u32>,
    pub traces: Vec<(u32, usize)>,
    pub pgl_orders: Vec<(u64, usize)>,
}

/// Breadth-first closure of `gens` under multiplication.
pub fn closure(f: &PrimeField, gens: &[Mat2]) -> Result<Subgroup, Error> {
    if let Some(bad) = gens.iter().find(|g| !g.is_invertible(f)) {
        return Err(Error::Singular(bad.to_string()));
    }
    let mut scratch = ClosureScratch::new(f.ell());
    let elements = scratch
        .close(f, gens, None)
        .expect("unrestricted closure always completes");
    Ok(Subgroup::from_sorted(gens.to_vec(), elements))
}

/// Reusable membership table for repeated closures at one modulus.
pub(crate) struct ClosureScratch {
    ell: u32,
    stamp: Vec<u32>,
    generation: u32,
    list: Vec<Mat2>,
}

impl ClosureScratch {
    pub(crate) fn new(ell: u32) -> Self {
        let size = (ell as usize).pow(4);
        ClosureScratch {
            ell,
            stamp: vec![0; size],
            generation: 0,
            list: Vec::new(),
        }
    }

    fn next_generation(&mut self) {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.generation = 1;
        }
    }

    /// Closure of `gens`; returns `None` as soon as an element outside
    /// `allowed` (indexed by [`Mat2::index`]) appears. The result is sorted.
    pub(crate) fn close(
        &mut self,
        f: &PrimeField,
        gens: &[Mat2],
        allowed: Option<&[bool]>,
    ) -> Option<Vec<Mat2>> {
        self.next_generation();
        let ell = self.ell;
        let generation = self.generation;
        self.list.clear();
        self.list.push(Mat2::IDENTITY);
        self.stamp[Mat2::IDENTITY.index(ell)] = generation;
        let mut i = 0;
        while i < self.list.len() {
            let g = self.list[i];
            for &s in gens {
                let h = g.mul(s, f);
                let idx = h.index(ell);
                if self.stamp[idx] != generation {
                    if let Some(ok) = allowed {
                        if !ok[idx] {
                            return None;
                        }
                    }
                    self.stamp[idx] = generation;
                    self.list.push(h);
                }
            }
            i += 1;
        }
        let mut out = self.list.clone();
        out.sort_unstable();
        Some(out)
    }
}

/// Isomorphism type of the image of a subgroup in PGL2(F_l).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PglType {
    /// Cyclic of the given order.
    Cyclic(usize),
    /// Dihedral of the given order (so `Dihedral(4)` is the Klein four-group).
    Dihedral(usize),
    A4,
    S4,
    A5,
    ContainsPSL2,
    BorelType,
}

impl PglType {
    pub fn is_exceptional(self) -> bool {
        matches!(self, PglType::A4 | PglType::S4 | PglType::A5)
    }
}

impl fmt::Display for PglType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PglType::Cyclic(n) => write!(f, "Cyclic({n})"),
            PglType::Dihedral(n) => write!(f, "Dihedral({n})"),
            PglType::A4 => f.write_str("A4"),
            PglType::S4 => f.write_str("S4"),
            PglType::A5 => f.write_str("A5"),
            PglType::ContainsPSL2 => f.write_str("ContainsPSL2"),
            PglType::BorelType => f.write_str("BorelType"),
        }
    }
}

impl std::str::FromStr for PglType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let arg = |prefix: &str| -> Option<usize> {
            s.strip_prefix(prefix)?.strip_suffix(')')?.parse().ok()
        };
        if let Some(n) = arg("Cyclic(") {
            return Ok(PglType::Cyclic(n));
        }
        if let Some(n) = arg("Dihedral(") {
            return Ok(PglType::Dihedral(n));
        }
        match s {
            "A4" => Ok(PglType::A4),
            "S4" => Ok(PglType::S4),
            "A5" => Ok(PglType::A5),
            "ContainsPSL2" => Ok(PglType::ContainsPSL2),
            "BorelType" => Ok(PglType::BorelType),
            _ => Err(Error::UnknownType(s.to_string())),
        }
    }
}

/// Classifies the image of `g` in PGL2(F_l).
pub fn pgl_type(f: &PrimeField, g: &Subgroup) -> PglType {
    let ell = f.ell() as usize;
    if g.order().is_multiple_of(ell) {
        let sl2 = g.sl2_part(f).len() as u64;
        return if sl2 == 2 * psl2_order(f) {
            PglType::ContainsPSL2
        } else {
            PglType::BorelType
        };
    }
    let image = g.projective_image(f);
    let n = image.len();
    let orders: Vec<u64> = image.iter().map(|h| h.pgl_order(f)).collect();
    let max = orders.iter().copied().max().unwrap_or(1);
    if max as usize == n {
        return PglType::Cyclic(n);
    }
    match n {
        12 if max == 3 => return PglType::A4,
        24 if max == 4 => return PglType::S4,
        60 if orders.iter().all(|o| matches!(o, 1 | 2 | 3 | 5)) => return PglType::A5,
        _ => {}
    }
    if n.is_multiple_of(2) && is_dihedral(f, &image, &orders) {
        return PglType::Dihedral(n);
    }
    panic!("projective image of order {n} is neither cyclic, dihedral nor exceptional");
}

/// A rotation subgroup of index two whose complement consists of involutions.
fn is_dihedral(f: &PrimeField, image: &[Mat2], orders: &[u64]) -> bool {
    let n = image.len();
    let Some(pos) = orders.iter().position(|&o| o as usize == n / 2) else {
        return false;
    };
    let c = image[pos];
    let mut rotations = Vec::with_capacity(n / 2);
    let mut x = Mat2::IDENTITY;
    for _ in 0..n / 2 {
        rotations.push(x);
        x = x.mul(c, f).projective_normal(f);
    }
    rotations.sort_unstable();
    image
        .iter()
        .zip(orders)
        .filter(|(h, _)| rotations.binary_search(h).is_err())
        .all(|(_, &o)| o == 2)
}

/// Where a subgroup sits inside a conjugate of a target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Witness {
    Frame(CartanFrame),
    /// A line fixed by the whole group (Borel target).
    Line(ProjLine),
}

impl fmt::Display for Witness {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Frame(fr) => write!(out, "{fr}"),
            Witness::Line(l) => write!(out, "line{l}"),
        }
    }
}

/// Searches every frame (or line, for the Borel target) for one that `g`
/// stabilizes as the target requires. `None` means no conjugate of the
/// target contains `g`.
pub fn conjugate_into(f: &PrimeField, g: &Subgroup, t: StandardTarget) -> Option<Witness> {
    conjugate_gens_into(f, g.generators(), t)
}

/// As [`conjugate_into`], for the group generated by `gens`.
pub fn conjugate_gens_into(f: &PrimeField, gens: &[Mat2], t: StandardTarget) -> Option<Witness> {
    if t == StandardTarget::Borel {
        return all_lines(f)
            .into_iter()
            .find(|&l| gens.iter().all(|&g| act(g, l, f) == l))
            .map(Witness::Line);
    }
    let want_split = matches!(
        t,
        StandardTarget::SplitCartan | StandardTarget::SplitNormalizer
    );
    let normalizer = t.is_normalizer();
    all_frames(f)
        .into_iter()
        .filter(|fr| fr.is_split() == want_split)
        .find(|fr| {
            gens.iter().all(|&g| match in_frame(f, g, fr) {
                FrameMembership::InCartan => true,
                FrameMembership::InNormalizerOnly => normalizer,
                FrameMembership::No => false,
            })
        })
        .map(Witness::Frame)
}

/// Exceptional projective images that can be searched for by presentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exceptional {
    A4,
    S4,
    A5,
}

impl Exceptional {
    fn pgl_type(self) -> PglType {
        match self {
            Exceptional::A4 => PglType::A4,
            Exceptional::S4 => PglType::S4,
            Exceptional::A5 => PglType::A5,
        }
    }

    /// Order of `xy` in the presentation `<x, y | x^2, y^3, (xy)^m>`.
    fn product_order(self) -> u64 {
        match self {
            Exceptional::A4 => 3,
            Exceptional::S4 => 4,
            Exceptional::A5 => 5,
        }
    }
}

impl fmt::Display for Exceptional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.pgl_type(), f)
    }
}

/// Finds a subgroup of GL2(F_l) whose projective image is the requested
/// exceptional group, from the presentation `<x, y | x^2, y^3, (xy)^m>`
/// with `m = 3, 4, 5`. The order-3 generator is fixed to `(0 -1; 1 -1)`;
/// the involution ranges over trace-zero matrices of determinant 1 or delta
/// in increasing order, so the result is deterministic.
pub fn find_exceptional_lift(f: &PrimeField, kind: Exceptional) -> Result<Subgroup, Error> {
    let ell = f.ell();
    let y = Mat2::from_i64(f, 0, -1, 1, -1);
    if ell > 3 {
        debug_assert_eq!(y.pgl_order(f), 3);
    }
    let want = kind.pgl_type();
    for det in [1, f.delta()] {
        for a in 0..ell {
            for b in 1..ell {
                // -a^2 - bc = det
                let c = f.mul(f.neg(f.add(f.mul(a, a), det)), f.inv(b));
                let x = Mat2::new(a, b, c, f.neg(a));
                if x.pgl_order(f) != 2 || x.mul(y, f).pgl_order(f) != kind.product_order() {
                    continue;
                }
                let g = closure(f, &[x, y])?;
                if g.order() % ell as usize != 0 && pgl_type(f, &g) == want {
                    return Ok(g);
                }
            }
        }
    }
    Err(Error::LiftNotFound(kind.to_string(), ell))
}
