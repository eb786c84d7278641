//! Elementwise local condition versus global containment, and the case
//! analysis for groups that satisfy the first but not the second.
//!
//! [`classify`] sorts a locally-`t` group into one of the cases of the
//! classification theorems for the four Cartan-type targets and checks the
//! congruence and determinant conditions attached to that case. A group
//! matching no case, or matching one whose conditions fail, is reported
//! rather than asserted away; [`verify_theorem`] runs this over every
//! candidate produced by the enumeration.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::cartan::{element_local_profile, standard_group, StandardTarget};
use crate::error::Error;
use crate::ff::PrimeField;
use crate::mat::Mat2;
use crate::subgrp::{
    conjugate_into, enumerate_local_candidates, local_element_table, pgl_type, ClosureScratch,
    EnumConfig, PglType, Subgroup,
};

/// Every element of `g` lies in some conjugate of `t`.
pub fn satisfies_local(f: &PrimeField, g: &Subgroup, t: StandardTarget) -> bool {
    g.elements()
        .iter()
        .all(|&h| element_local_profile(f, h).contains(t))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldCondition {
    None,
    /// The field must contain the quadratic subfield of Q(zeta_l).
    ContainsSqrtLStar,
}

impl fmt::Display for FieldCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldCondition::None => "None",
            FieldCondition::ContainsSqrtLStar => "ContainsSqrtLStar",
        })
    }
}

impl FromStr for FieldCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "None" => Ok(FieldCondition::None),
            "ContainsSqrtLStar" => Ok(FieldCondition::ContainsSqrtLStar),
            _ => Err(Error::Record(format!("unknown field condition `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DetReport {
    pub det_image_order: u32,
    pub surjective: bool,
    /// The determinant lands in the squares of F_l^*.
    pub in_squares: bool,
    pub field_condition: FieldCondition,
}

pub fn det_analysis(f: &PrimeField, g: &Subgroup) -> DetReport {
    let ell = f.ell();
    let order = g.det_image(f).len() as u32;
    let in_squares = ((ell - 1) / 2).is_multiple_of(order);
    DetReport {
        det_image_order: order,
        surjective: order == ell - 1,
        in_squares,
        field_condition: if in_squares {
            FieldCondition::ContainsSqrtLStar
        } else {
            FieldCondition::None
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseTag {
    Global,
    /// In the normalizer of the target's Cartan but not the Cartan.
    NormalizerEscape,
    /// Locally in a split normalizer, globally only in a nonsplit one.
    KleinFour,
    ExcA4,
    ExcS4,
    ExcA5,
    Violation,
}

impl CaseTag {
    const ALL: [CaseTag; 7] = [
        CaseTag::Global,
        CaseTag::NormalizerEscape,
        CaseTag::KleinFour,
        CaseTag::ExcA4,
        CaseTag::ExcS4,
        CaseTag::ExcA5,
        CaseTag::Violation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseTag::Global => "Global",
            CaseTag::NormalizerEscape => "NormalizerEscape",
            CaseTag::KleinFour => "KleinFour",
            CaseTag::ExcA4 => "ExcA4",
            CaseTag::ExcS4 => "ExcS4",
            CaseTag::ExcA5 => "ExcA5",
            CaseTag::Violation => "Violation",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        CaseTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Record(format!("unknown case tag `{s}`")))
    }
}

const IMAGINARY_FIELD: &str = "assumes K has no real embedding";
const KLEIN_FOUR_BOUND: &str = "requires l <= 6d + 1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TheoremCase {
    pub tag: CaseTag,
    pub congruence_ok: bool,
    pub det_report: DetReport,
    /// Target whose theorem produced the case. Differs from the requested
    /// target when a normalizer group is locally in the Cartan itself.
    pub theorem: StandardTarget,
    pub caveat: Option<&'static str>,
}

impl TheoremCase {
    /// A case that contradicts the classification as implemented.
    pub fn is_violation(&self) -> bool {
        self.tag == CaseTag::Violation || !self.congruence_ok
    }
}

impl fmt::Display for TheoremCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = &self.det_report;
        write!(
            f,
            "{} congruence_ok={} theorem={} det_order={} surjective={} in_squares={} field={}",
            self.tag,
            self.congruence_ok,
            self.theorem,
            d.det_image_order,
            d.surjective,
            d.in_squares,
            d.field_condition
        )?;
        if let Some(c) = self.caveat {
            write!(f, " caveat=\"{c}\"")?;
        }
        Ok(())
    }
}

fn exceptional_tag(ty: PglType) -> Option<CaseTag> {
    match ty {
        PglType::A4 => Some(CaseTag::ExcA4),
        PglType::S4 => Some(CaseTag::ExcS4),
        PglType::A5 => Some(CaseTag::ExcA5),
        _ => None,
    }
}

/// Residue of `l` modulo 12, 24 or 60 required for an exceptional image,
/// and whether the determinant must be a square.
pub(crate) fn exceptional_condition(theorem: StandardTarget, tag: CaseTag) -> (u32, u32, bool) {
    use CaseTag::*;
    use StandardTarget::*;
    match (theorem, tag) {
        (SplitCartan, ExcA4) => (12, 1, true),
        (SplitCartan, ExcS4) => (24, 1, true),
        (SplitCartan, ExcA5) => (60, 1, true),
        (NonsplitCartan, ExcA4) => (12, 11, true),
        (NonsplitCartan, ExcS4) => (24, 23, true),
        (NonsplitCartan, ExcA5) => (60, 59, true),
        (SplitNormalizer, ExcA4) => (12, 7, true),
        (SplitNormalizer, ExcS4) => (24, 13, false),
        (SplitNormalizer, ExcA5) => (60, 31, true),
        (NonsplitNormalizer, ExcA4) => (12, 5, true),
        (NonsplitNormalizer, ExcS4) => (24, 11, false),
        (NonsplitNormalizer, ExcA5) => (60, 29, true),
        _ => unreachable!("no exceptional case for {theorem} / {tag}"),
    }
}

/// Sorts a locally-`t` group into the case list of the classification.
///
/// Only the four Cartan-type targets are supported.
pub fn classify(f: &PrimeField, g: &Subgroup, t: StandardTarget) -> Result<TheoremCase, Error> {
    if t == StandardTarget::Borel {
        return Err(Error::UnsupportedTarget(t.to_string()));
    }
    if !satisfies_local(f, g, t) {
        return Err(Error::Precondition(format!("group is not locally {t}")));
    }
    let det_report = det_analysis(f, g);
    let case = |tag, congruence_ok, theorem, caveat| TheoremCase {
        tag,
        congruence_ok,
        det_report,
        theorem,
        caveat,
    };
    if conjugate_into(f, g, t).is_some() {
        return Ok(case(CaseTag::Global, true, t, None));
    }
    // a normalizer group that is locally in the Cartan falls under the
    // Cartan's theorem
    let theorem = match t {
        StandardTarget::SplitNormalizer if satisfies_local(f, g, StandardTarget::SplitCartan) => {
            StandardTarget::SplitCartan
        }
        StandardTarget::NonsplitNormalizer
            if satisfies_local(f, g, StandardTarget::NonsplitCartan) =>
        {
            StandardTarget::NonsplitCartan
        }
        _ => t,
    };
    let caveat = (theorem == StandardTarget::NonsplitCartan).then_some(IMAGINARY_FIELD);
    let ell = f.ell();
    let ty = pgl_type(f, g);
    let d = &det_report;

    if let Some(tag) = exceptional_tag(ty) {
        let (m, r, squares) = exceptional_condition(theorem, tag);
        let ok = ell % m == r && (!squares || d.in_squares);
        return Ok(case(tag, ok, theorem, caveat));
    }
    let tag = match theorem {
        StandardTarget::SplitCartan if t == theorem => {
            if conjugate_into(f, g, StandardTarget::SplitNormalizer).is_some() {
                // over a field with surjective determinant only l = 3 mod 4;
                // at l = 1 mod 4 the determinant is a square
                let ok = ell % 4 == 3 || d.in_squares;
                return Ok(case(CaseTag::NormalizerEscape, ok, theorem, caveat));
            }
            CaseTag::Violation
        }
        StandardTarget::NonsplitCartan if t == theorem => {
            if conjugate_into(f, g, StandardTarget::NonsplitNormalizer).is_some() {
                let ok = ell % 4 == 1 || d.in_squares;
                return Ok(case(CaseTag::NormalizerEscape, ok, theorem, caveat));
            }
            CaseTag::Violation
        }
        StandardTarget::SplitNormalizer if t == theorem => {
            if conjugate_into(f, g, StandardTarget::NonsplitNormalizer).is_some() {
                let ok = ell % 4 == 3 && d.in_squares && ty == PglType::Dihedral(4);
                return Ok(case(
                    CaseTag::KleinFour,
                    ok,
                    theorem,
                    Some(KLEIN_FOUR_BOUND),
                ));
            }
            CaseTag::Violation
        }
        _ => CaseTag::Violation,
    };
    Ok(case(tag, false, theorem, caveat))
}

/// One classified group, in the stable record form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseRecord {
    pub ell: u32,
    pub target: StandardTarget,
    pub order: usize,
    pub pgl_type: PglType,
    pub tag: CaseTag,
    pub congruence_ok: bool,
    pub det_image_order: u32,
    pub surjective: bool,
    pub in_squares: bool,
    pub field_condition: FieldCondition,
    pub generators: Vec<Mat2>,
}

pub const CASE_COLUMNS: &str =
    "ell,target,order,pgl_type,tag,congruence_ok,det_order,surjective,in_squares,field,generators";

impl CaseRecord {
    pub fn new(f: &PrimeField, t: StandardTarget, g: &Subgroup, case: &TheoremCase) -> Self {
        CaseRecord {
            ell: f.ell(),
            target: t,
            order: g.order(),
            pgl_type: pgl_type(f, g),
            tag: case.tag,
            congruence_ok: case.congruence_ok,
            det_image_order: case.det_report.det_image_order,
            surjective: case.det_report.surjective,
            in_squares: case.det_report.in_squares,
            field_condition: case.det_report.field_condition,
            generators: g.generators().to_vec(),
        }
    }

    /// Generators are separated by `;`.
    pub fn to_line(&self) -> String {
        let gens: Vec<String> = self.generators.iter().map(|g| g.to_string()).collect();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.ell,
            self.target,
            self.order,
            self.pgl_type,
            self.tag,
            self.congruence_ok,
            self.det_image_order,
            self.surjective,
            self.in_squares,
            self.field_condition,
            gens.join(";")
        )
    }

    pub fn parse_line(line: &str) -> Result<Self, Error> {
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 11 {
            return Err(Error::Record(format!("expected 11 fields in `{line}`")));
        }
        let num = |s: &str| {
            s.parse::<u64>()
                .map_err(|_| Error::Record(format!("bad number `{s}`")))
        };
        let flag = |s: &str| {
            s.parse::<bool>()
                .map_err(|_| Error::Record(format!("bad flag `{s}`")))
        };
        let generators = if fields[10].is_empty() {
            Vec::new()
        } else {
            fields[10]
                .split(';')
                .map(str::parse)
                .collect::<Result<Vec<Mat2>, _>>()?
        };
        Ok(CaseRecord {
            ell: num(fields[0])? as u32,
            target: fields[1].parse()?,
            order: num(fields[2])? as usize,
            pgl_type: fields[3].parse()?,
            tag: fields[4].parse()?,
            congruence_ok: flag(fields[5])?,
            det_image_order: num(fields[6])? as u32,
            surjective: flag(fields[7])?,
            in_squares: flag(fields[8])?,
            field_condition: fields[9].parse()?,
            generators,
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    pub enumeration: EnumConfig,
    /// Drop candidates whose determinant is not onto F_l^* before
    /// classifying, as for curves over Q.
    pub require_surjective_det: bool,
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub ell: u32,
    pub target: StandardTarget,
    pub groups_examined: usize,
    /// Multiset of outcomes.
    pub cases: BTreeMap<TheoremCase, usize>,
    /// One record per examined group, in enumeration order.
    pub records: Vec<CaseRecord>,
    /// For the nonsplit normalizer: groups inside a split normalizer that
    /// are not inside a single nonsplit normalizer.
    pub lemma_failures: Vec<Vec<Mat2>>,
}

impl VerificationReport {
    /// Groups whose case contradicts the classification.
    pub fn violations(&self) -> usize {
        self.cases
            .iter()
            .filter(|(c, _)| c.is_violation())
            .map(|(_, n)| n)
            .sum()
    }

    /// No violations and no containment failures.
    pub fn is_clean(&self) -> bool {
        self.violations() == 0 && self.lemma_failures.is_empty()
    }

    /// Generator lists of the non-Global cases.
    pub fn witnesses(&self) -> impl Iterator<Item = &CaseRecord> {
        self.records.iter().filter(|r| r.tag != CaseTag::Global)
    }

    pub fn tag_counts(&self) -> BTreeMap<CaseTag, usize> {
        let mut out = BTreeMap::new();
        for (c, n) in &self.cases {
            *out.entry(c.tag).or_insert(0) += n;
        }
        out
    }
}

/// Classifies an explicit list of candidate groups.
pub fn verify_groups(
    f: &PrimeField,
    t: StandardTarget,
    groups: &[Subgroup],
    require_surjective_det: bool,
) -> Result<VerificationReport, Error> {
    let kept: Vec<&Subgroup> = groups
        .iter()
        .filter(|g| !require_surjective_det || det_analysis(f, g).surjective)
        .collect();
    let classified: Vec<(TheoremCase, CaseRecord, bool)> = kept
        .par_iter()
        .map(|g| {
            let case = classify(f, g, t)?;
            let record = CaseRecord::new(f, t, g, &case);
            // a Global case already sits in a nonsplit normalizer
            let lemma_ok = t != StandardTarget::NonsplitNormalizer
                || case.tag == CaseTag::Global
                || !lemma_applies(f, g);
            Ok((case, record, lemma_ok))
        })
        .collect::<Result<_, Error>>()?;
    let mut cases = BTreeMap::new();
    let mut records = Vec::with_capacity(classified.len());
    let mut lemma_failures = Vec::new();
    for (case, record, lemma_ok) in classified {
        *cases.entry(case).or_insert(0) += 1;
        if !lemma_ok {
            lemma_failures.push(record.generators.clone());
        }
        records.push(record);
    }
    Ok(VerificationReport {
        ell: f.ell(),
        target: t,
        groups_examined: kept.len(),
        cases,
        records,
        lemma_failures,
    })
}

fn lemma_applies(f: &PrimeField, g: &Subgroup) -> bool {
    conjugate_into(f, g, StandardTarget::SplitNormalizer).is_some()
}

/// Enumerates every locally-`t` candidate at `f` and classifies it.
pub fn verify_theorem(
    f: &PrimeField,
    t: StandardTarget,
    opts: &VerifyOptions,
) -> Result<VerificationReport, Error> {
    if t == StandardTarget::Borel {
        return Err(Error::UnsupportedTarget(t.to_string()));
    }
    let e = enumerate_local_candidates(f, t, &opts.enumeration)?;
    verify_groups(f, t, &e.groups, opts.require_surjective_det)
}

/// Outcome of checking every subgroup of the standard split normalizer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaReport {
    pub ell: u32,
    /// Subgroups of the standard split normalizer all of whose elements
    /// lie in some nonsplit normalizer.
    pub subgroups_checked: usize,
    pub failures: Vec<Subgroup>,
}

/// Checks, over every subgroup (not up to conjugacy) of the standard split
/// normalizer that is locally in nonsplit normalizers, that a single
/// nonsplit normalizer contains it.
pub fn check_split_normalizer_subgroups(f: &PrimeField) -> LemmaReport {
    let ell = f.ell();
    let nsp = standard_group(f, StandardTarget::SplitNormalizer);
    let local_all = local_element_table(f, StandardTarget::NonsplitNormalizer);
    let mut allowed = vec![false; local_all.len()];
    let candidates: Vec<Mat2> = nsp
        .elements()
        .iter()
        .copied()
        .filter(|g| local_all[g.index(ell)])
        .collect();
    for g in &candidates {
        allowed[g.index(ell)] = true;
    }
    // every subgroup is reached from a smaller one by adjoining an element
    let mut scratch = ClosureScratch::new(ell);
    let trivial = Subgroup::from_sorted(Vec::new(), vec![Mat2::IDENTITY]);
    let mut seen: HashSet<Vec<Mat2>> = HashSet::from([trivial.elements().to_vec()]);
    let mut all = vec![trivial];
    let mut frontier = 0..1;
    while !frontier.is_empty() {
        let start = all.len();
        for i in frontier {
            let mut gens = all[i].generators().to_vec();
            gens.push(Mat2::IDENTITY);
            for &g in &candidates {
                if all[i].contains(g) {
                    continue;
                }
                *gens.last_mut().unwrap() = g;
                if let Some(elements) = scratch.close(f, &gens, Some(&allowed)) {
                    if seen.insert(elements.clone()) {
                        all.push(Subgroup::from_sorted(gens.clone(), elements));
                    }
                }
            }
        }
        frontier = start..all.len();
    }
    let failures = all
        .par_iter()
        .filter(|g| conjugate_into(f, g, StandardTarget::NonsplitNormalizer).is_none())
        .cloned()
        .collect();
    LemmaReport {
        ell,
        subgroups_checked: all.len(),
        failures,
    }
}
