//! The standard targets (Borel, split/nonsplit Cartan and their
//! normalizers), Cartan frames, and elementwise membership criteria.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::ff::{Fp2Elem, PrimeField};
use crate::mat::{act, act2, all_lines, Mat2, ProjLine, ProjLine2};
use crate::subgrp::Subgroup;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StandardTarget {
    Borel,
    SplitCartan,
    NonsplitCartan,
    SplitNormalizer,
    NonsplitNormalizer,
}

impl StandardTarget {
    pub const ALL: [StandardTarget; 5] = [
        StandardTarget::Borel,
        StandardTarget::SplitCartan,
        StandardTarget::NonsplitCartan,
        StandardTarget::SplitNormalizer,
        StandardTarget::NonsplitNormalizer,
    ];

    /// The four Cartan-type targets covered by the classification theorems.
    pub const CARTAN_TYPES: [StandardTarget; 4] = [
        StandardTarget::SplitCartan,
        StandardTarget::NonsplitCartan,
        StandardTarget::SplitNormalizer,
        StandardTarget::NonsplitNormalizer,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            StandardTarget::Borel => "Borel",
            StandardTarget::SplitCartan => "Csp",
            StandardTarget::NonsplitCartan => "Cns",
            StandardTarget::SplitNormalizer => "Nsp",
            StandardTarget::NonsplitNormalizer => "Nns",
        }
    }

    pub fn is_normalizer(self) -> bool {
        matches!(
            self,
            StandardTarget::SplitNormalizer | StandardTarget::NonsplitNormalizer
        )
    }

    fn bit(self) -> u8 {
        1 << self as u8
    }
}

impl fmt::Display for StandardTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for StandardTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "borel" | "b" => Ok(StandardTarget::Borel),
            "csp" | "splitcartan" => Ok(StandardTarget::SplitCartan),
            "cns" | "nonsplitcartan" => Ok(StandardTarget::NonsplitCartan),
            "nsp" | "splitnormalizer" => Ok(StandardTarget::SplitNormalizer),
            "nns" | "nonsplitnormalizer" => Ok(StandardTarget::NonsplitNormalizer),
            _ => Err(Error::UnknownTarget(s.to_string())),
        }
    }
}

/// The literal standard subgroup, built with the canonical delta.
pub fn standard_group(f: &PrimeField, t: StandardTarget) -> Subgroup {
    let ell = f.ell();
    let delta = f.delta();
    let mut elements = Vec::new();
    let nonzero = || 1..ell;
    match t {
        StandardTarget::Borel => {
            for a in nonzero() {
                for b in 0..ell {
                    for d in nonzero() {
                        elements.push(Mat2::new(a, b, 0, d));
                    }
                }
            }
        }
        StandardTarget::SplitCartan | StandardTarget::SplitNormalizer => {
            for a in nonzero() {
                for d in nonzero() {
                    elements.push(Mat2::diag(a, d));
                    if t == StandardTarget::SplitNormalizer {
                        elements.push(Mat2::new(0, a, d, 0));
                    }
                }
            }
        }
        StandardTarget::NonsplitCartan | StandardTarget::NonsplitNormalizer => {
            for a in 0..ell {
                for b in 0..ell {
                    if a == 0 && b == 0 {
                        continue;
                    }
                    elements.push(Mat2::new(a, f.mul(delta, b), b, a));
                    if t == StandardTarget::NonsplitNormalizer {
                        elements.push(Mat2::new(a, f.neg(f.mul(delta, b)), b, f.neg(a)));
                    }
                }
            }
        }
    }
    elements.sort_unstable();
    Subgroup::from_sorted(standard_generators(f, t), elements)
}

fn standard_generators(f: &PrimeField, t: StandardTarget) -> Vec<Mat2> {
    let g = f.primitive_root();
    let split = vec![Mat2::diag(g, 1), Mat2::diag(1, g)];
    let nonsplit = || {
        // a generator of F_{l^2}^* in the (x, delta y; y, x) model
        let ell = f.ell();
        let n = (ell as u64).pow(2) - 1;
        (0..ell)
            .flat_map(|x| (1..ell).map(move |y| Fp2Elem::new(x, y)))
            .find(|&u| {
                crate::ff::factorize(n)
                    .iter()
                    .all(|&(p, _)| f.fp2_pow(u, n / p) != Fp2Elem::ONE)
            })
            .map(|u| Mat2::new(u.x, f.mul(f.delta(), u.y), u.y, u.x))
            .expect("F_{l^2}^* is cyclic")
    };
    match t {
        StandardTarget::Borel => vec![Mat2::diag(g, 1), Mat2::diag(1, g), Mat2::new(1, 1, 0, 1)],
        StandardTarget::SplitCartan => split,
        StandardTarget::SplitNormalizer => {
            let mut v = split;
            v.push(Mat2::new(0, 1, 1, 0));
            v
        }
        StandardTarget::NonsplitCartan => vec![nonsplit()],
        StandardTarget::NonsplitNormalizer => vec![nonsplit(), Mat2::diag(1, f.neg(1))],
    }
}

/// The geometric datum of one Cartan subgroup.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CartanFrame {
    /// Two distinct rational lines, stored with `l1 < l2`.
    Split { l1: ProjLine, l2: ProjLine },
    /// The conjugate pair `[1:alpha], [1:conj(alpha)]` where alpha is a root
    /// of the irreducible `X^2 - trace_alpha X + norm_alpha`.
    Nonsplit { trace_alpha: u32, norm_alpha: u32 },
}

impl CartanFrame {
    pub fn split(l1: ProjLine, l2: ProjLine) -> Self {
        assert_ne!(l1, l2, "a split frame needs two distinct lines");
        let (l1, l2) = if l1 < l2 { (l1, l2) } else { (l2, l1) };
        CartanFrame::Split { l1, l2 }
    }

    pub fn nonsplit(f: &PrimeField, trace_alpha: u32, norm_alpha: u32) -> Result<Self, Error> {
        let disc = f.sub(f.mul(trace_alpha, trace_alpha), f.mul(4, norm_alpha));
        if f.legendre(disc) != -1 {
            return Err(Error::Precondition(format!(
                "X^2 - {trace_alpha}X + {norm_alpha} is reducible mod {}",
                f.ell()
            )));
        }
        Ok(CartanFrame::Nonsplit {
            trace_alpha,
            norm_alpha,
        })
    }

    pub fn is_split(&self) -> bool {
        matches!(self, CartanFrame::Split { .. })
    }

    /// The pair of lines over F_{l^2} this frame fixes or swaps.
    pub fn lines2(&self, f: &PrimeField) -> (ProjLine2, ProjLine2) {
        match *self {
            CartanFrame::Split { l1, l2 } => {
                (ProjLine2::from_rational(l1), ProjLine2::from_rational(l2))
            }
            CartanFrame::Nonsplit {
                trace_alpha,
                norm_alpha,
            } => {
                let (r, rb) = f.fp2_roots_irreducible(trace_alpha, norm_alpha);
                (
                    ProjLine2::new(Fp2Elem::ONE, r, f),
                    ProjLine2::new(Fp2Elem::ONE, rb, f),
                )
            }
        }
    }
}

impl fmt::Display for CartanFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CartanFrame::Split { l1, l2 } => write!(f, "split{{{l1},{l2}}}"),
            CartanFrame::Nonsplit {
                trace_alpha,
                norm_alpha,
            } => {
                write!(f, "nonsplit{{tr={trace_alpha},N={norm_alpha}}}")
            }
        }
    }
}

/// All `l(l+1)/2` split frames followed by all `(l^2-l)/2` nonsplit frames.
pub fn all_frames(f: &PrimeField) -> Vec<CartanFrame> {
    let lines = all_lines(f);
    let mut out = Vec::new();
    for (i, &l1) in lines.iter().enumerate() {
        for &l2 in &lines[i + 1..] {
            out.push(CartanFrame::split(l1, l2));
        }
    }
    for t in 0..f.ell() {
        for n in 0..f.ell() {
            if let Ok(fr) = CartanFrame::nonsplit(f, t, n) {
                out.push(fr);
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FrameMembership {
    InCartan,
    InNormalizerOnly,
    No,
}

/// Membership of `g` in the Cartan of `frame` or in its normalizer.
pub fn in_frame(f: &PrimeField, g: Mat2, frame: &CartanFrame) -> FrameMembership {
    match *frame {
        CartanFrame::Split { l1, l2 } => {
            let (m1, m2) = (act(g, l1, f), act(g, l2, f));
            if m1 == l1 && m2 == l2 {
                FrameMembership::InCartan
            } else if m1 == l2 && m2 == l1 {
                FrameMembership::InNormalizerOnly
            } else {
                FrameMembership::No
            }
        }
        CartanFrame::Nonsplit {
            trace_alpha,
            norm_alpha,
        } => {
            let Mat2 { a, b, c, d } = g;
            let in_cartan = if b == 0 {
                g.is_scalar()
            } else {
                let bi = f.inv(b);
                f.mul(f.sub(d, a), bi) == trace_alpha && f.mul(f.neg(c), bi) == norm_alpha
            };
            if in_cartan {
                FrameMembership::InCartan
            } else if g.trace(f) == 0
                && f.sub(f.add(f.mul(a, trace_alpha), f.mul(b, norm_alpha)), c) == 0
            {
                FrameMembership::InNormalizerOnly
            } else {
                FrameMembership::No
            }
        }
    }
}

/// Same decision as [`in_frame`], read off the action on P^1(F_{l^2}).
pub fn in_frame_geometric(f: &PrimeField, g: Mat2, frame: &CartanFrame) -> FrameMembership {
    let (p, q) = frame.lines2(f);
    let (gp, gq) = (act2(g, p, f), act2(g, q, f));
    if gp == p && gq == q {
        FrameMembership::InCartan
    } else if gp == q && gq == p {
        FrameMembership::InNormalizerOnly
    } else {
        FrameMembership::No
    }
}

/// Set of targets having some conjugate that contains an element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct TargetSet(u8);

impl TargetSet {
    pub fn empty() -> Self {
        TargetSet(0)
    }

    pub fn insert(&mut self, t: StandardTarget) {
        self.0 |= t.bit();
    }

    pub fn contains(self, t: StandardTarget) -> bool {
        self.0 & t.bit() != 0
    }

    pub fn iter(self) -> impl Iterator<Item = StandardTarget> {
        StandardTarget::ALL
            .into_iter()
            .filter(move |&t| self.contains(t))
    }
}

impl FromIterator<StandardTarget> for TargetSet {
    fn from_iter<I: IntoIterator<Item = StandardTarget>>(iter: I) -> Self {
        let mut s = TargetSet::empty();
        for t in iter {
            s.insert(t);
        }
        s
    }
}

/// Which targets contain `g` up to conjugacy, decided from the trace and
/// the discriminant of the characteristic polynomial.
pub fn element_local_profile(f: &PrimeField, g: Mat2) -> TargetSet {
    let disc = g.charpoly_disc(f);
    let chi = f.legendre(disc);
    let scalar = g.is_scalar();
    let trace_zero = g.trace(f) == 0;
    let split = scalar || chi == 1;
    let nonsplit = scalar || chi == -1;
    let mut s = TargetSet::empty();
    if chi >= 0 {
        s.insert(StandardTarget::Borel);
    }
    if split {
        s.insert(StandardTarget::SplitCartan);
    }
    if nonsplit {
        s.insert(StandardTarget::NonsplitCartan);
    }
    if split || trace_zero {
        s.insert(StandardTarget::SplitNormalizer);
    }
    if nonsplit || trace_zero {
        s.insert(StandardTarget::NonsplitNormalizer);
    }
    s
}

/// The same profile computed by searching every frame and line.
pub fn local_profile_by_frames(f: &PrimeField, g: Mat2, frames: &[CartanFrame]) -> TargetSet {
    let mut s = TargetSet::empty();
    if all_lines(f).into_iter().any(|l| act(g, l, f) == l) {
        s.insert(StandardTarget::Borel);
    }
    for fr in frames {
        let (cartan, normalizer) = if fr.is_split() {
            (StandardTarget::SplitCartan, StandardTarget::SplitNormalizer)
        } else {
            (
                StandardTarget::NonsplitCartan,
                StandardTarget::NonsplitNormalizer,
            )
        };
        match in_frame(f, g, fr) {
            FrameMembership::InCartan => {
                s.insert(cartan);
                s.insert(normalizer);
            }
            FrameMembership::InNormalizerOnly => s.insert(normalizer),
            FrameMembership::No => {}
        }
    }
    s
}

/// At l = 2 the conjugacy classes of the split and nonsplit Cartan each
/// consist of a single subgroup. Returns the two class sizes, computed by
/// conjugating through all of GL2(F_2).
pub fn char2_cartan_class_sizes() -> (usize, usize) {
    type M = [u8; 4];
    let mul = |x: M, y: M| -> M {
        [
            (x[0] * y[0] + x[1] * y[2]) % 2,
            (x[0] * y[1] + x[1] * y[3]) % 2,
            (x[2] * y[0] + x[3] * y[2]) % 2,
            (x[2] * y[1] + x[3] * y[3]) % 2,
        ]
    };
    let gl2: Vec<M> = (0u8..16)
        .map(|i| [i >> 3 & 1, i >> 2 & 1, i >> 1 & 1, i & 1])
        .filter(|m| (m[0] * m[3] + m[1] * m[2]) % 2 == 1)
        .collect();
    assert_eq!(gl2.len(), 6);
    // inverse by search; the group is tiny
    let inv = |x: M| *gl2.iter().find(|&&y| mul(x, y) == [1, 0, 0, 1]).unwrap();
    let identity: M = [1, 0, 0, 1];
    // F_2^* is trivial, so the diagonal Cartan is {I}
    let c_sp = vec![identity];
    // multiplication by F_4^* on the basis {1, alpha}, alpha^2 = alpha + 1
    let companion: M = [0, 1, 1, 1];
    let c_ns = vec![identity, companion, mul(companion, companion)];
    let class_size = |h: &[M]| {
        let mut conjugates: Vec<Vec<M>> = gl2
            .iter()
            .map(|&x| {
                let xi = inv(x);
                let mut s: Vec<M> = h.iter().map(|&g| mul(mul(x, g), xi)).collect();
                s.sort();
                s
            })
            .collect();
        conjugates.sort();
        conjugates.dedup();
        conjugates.len()
    };
    (class_size(&c_sp), class_size(&c_ns))
}
