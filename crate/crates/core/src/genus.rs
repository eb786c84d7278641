//! Genus of the modular curve X_H attached to H <= GL2(F_l), from the
//! permutation action of PSL2(F_l) on the cosets of the image of H.
//!
//! With `mu` cosets, `nu2` and `nu3` fixed cosets of the elliptic elements
//! `S = (0 -1; 1 0)` and `ST = (0 -1; 1 1)`, and `nu_inf` orbits of
//! `T = (1 1; 0 1)`, Riemann-Hurwitz for X_H -> X(1) gives
//! `12 g = 12 + mu - 3 nu2 - 4 nu3 - 6 nu_inf`.

use std::fmt;

use rayon::prelude::*;

use crate::error::Error;
use crate::ff::PrimeField;
use crate::mat::{psl2_order, sl2_elements, Mat2};
use crate::subgrp::{closure, find_exceptional_lift, Exceptional, Subgroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GenusProfile {
    pub mu: u64,
    pub nu2: u64,
    pub nu3: u64,
    pub nu_inf: u64,
    pub g: u64,
}

impl fmt::Display for GenusProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "mu={} nu2={} nu3={} nu_inf={} g={}",
            self.mu, self.nu2, self.nu3, self.nu_inf, self.g
        )
    }
}

/// Representative of `{g, -g}`.
fn psl_key(g: Mat2, f: &PrimeField) -> Mat2 {
    g.min(g.neg(f))
}

/// Right cosets of the image of `H ∩ SL2` in PSL2, with the action of PSL2.
struct CosetAction<'a> {
    f: &'a PrimeField,
    /// Coset id of every PSL2 key, indexed by `Mat2::index`.
    coset_of: Vec<u32>,
    reps: Vec<Mat2>,
}

impl<'a> CosetAction<'a> {
    fn new(f: &'a PrimeField, h: &Subgroup) -> Self {
        let ell = f.ell();
        let mut hbar: Vec<Mat2> = h.sl2_part(f).into_iter().map(|g| psl_key(g, f)).collect();
        hbar.sort_unstable();
        hbar.dedup();
        let mut coset_of = vec![u32::MAX; (ell as usize).pow(4)];
        let mut reps = Vec::new();
        for g in sl2_elements(f) {
            let k = psl_key(g, f);
            if coset_of[k.index(ell)] != u32::MAX {
                continue;
            }
            let id = reps.len() as u32;
            reps.push(k);
            for &x in &hbar {
                coset_of[psl_key(x.mul(k, f), f).index(ell)] = id;
            }
        }
        CosetAction { f, coset_of, reps }
    }

    fn len(&self) -> usize {
        self.reps.len()
    }

    /// Permutation `Hg -> Hgx` of the cosets.
    fn permutation(&self, x: Mat2) -> Vec<u32> {
        let f = self.f;
        self.reps
            .iter()
            .map(|&r| self.coset_of[psl_key(r.mul(x, f), f).index(f.ell())])
            .collect()
    }

    fn fixed_points(&self, x: Mat2) -> u64 {
        self.permutation(x)
            .iter()
            .enumerate()
            .filter(|&(i, &j)| i as u32 == j)
            .count() as u64
    }

    fn orbit_count(&self, x: Mat2) -> u64 {
        let perm = self.permutation(x);
        let mut seen = vec![false; perm.len()];
        let mut orbits = 0;
        for start in 0..perm.len() {
            if seen[start] {
                continue;
            }
            orbits += 1;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = perm[i] as usize;
            }
        }
        orbits
    }
}

pub fn elliptic_s(f: &PrimeField) -> Mat2 {
    Mat2::from_i64(f, 0, -1, 1, 0)
}

pub fn elliptic_st(f: &PrimeField) -> Mat2 {
    Mat2::from_i64(f, 0, -1, 1, 1)
}

pub fn parabolic_t(f: &PrimeField) -> Mat2 {
    Mat2::from_i64(f, 1, 1, 0, 1)
}

/// Genus of X_H. `H` must contain `-I` (see [`Subgroup::with_minus_identity`]).
pub fn genus_of_modular_curve(f: &PrimeField, h: &Subgroup) -> Result<GenusProfile, Error> {
    let minus_one = Mat2::scalar(f.neg(1));
    if !h.contains(minus_one) {
        return Err(Error::MissingMinusIdentity);
    }
    let action = CosetAction::new(f, h);
    let mu = action.len() as u64;
    let nu2 = action.fixed_points(elliptic_s(f));
    let nu3 = action.fixed_points(elliptic_st(f));
    let nu_inf = action.orbit_count(parabolic_t(f));
    assert_eq!(psl2_order(f) % mu, 0);
    let twelve_g = (12 + mu) as i64 - (3 * nu2 + 4 * nu3 + 6 * nu_inf) as i64;
    assert!(
        twelve_g >= 0 && twelve_g % 12 == 0,
        "Riemann-Hurwitz gives a non-integral genus {twelve_g}/12"
    );
    Ok(GenusProfile {
        mu,
        nu2,
        nu3,
        nu_inf,
        g: twelve_g as u64 / 12,
    })
}

/// Fixed cosets of every element of PSL2 of the given projective order;
/// used to check that `nu2` and `nu3` do not depend on the chosen
/// elliptic element.
pub fn fixed_point_counts_by_order(f: &PrimeField, h: &Subgroup, order: u64) -> Vec<u64> {
    let action = CosetAction::new(f, h);
    let mut counts: Vec<u64> = sl2_elements(f)
        .into_iter()
        .filter(|g| g.pgl_order(f) == order)
        .map(|g| action.fixed_points(g))
        .collect();
    counts.sort_unstable();
    counts.dedup();
    counts
}

/// The full preimage in GL2 of the projective image of `h`: `h` with all
/// scalars adjoined.
pub fn with_scalars(f: &PrimeField, h: &Subgroup) -> Subgroup {
    let mut gens = h.generators().to_vec();
    gens.push(Mat2::scalar(f.primitive_root()));
    closure(f, &gens).expect("generators are invertible")
}

/// Rows of the genus table of exceptional modular curves.
pub const EXCEPTIONAL_TABLE: [(Exceptional, u32, u64); 11] = [
    (Exceptional::A4, 5, 0),
    (Exceptional::A4, 7, 0),
    (Exceptional::A4, 11, 1),
    (Exceptional::S4, 11, 1),
    (Exceptional::A4, 13, 3),
    (Exceptional::S4, 13, 3),
    (Exceptional::A4, 17, 9),
    (Exceptional::A4, 19, 14),
    (Exceptional::A5, 29, 11),
    (Exceptional::A5, 31, 14),
    (Exceptional::S4, 37, 142),
];

/// Genus profile of X_H for H the full preimage of an exceptional image.
pub fn exceptional_genus(ell: u32, kind: Exceptional) -> Result<GenusProfile, Error> {
    let f = PrimeField::of(ell as u64)?;
    let lift = find_exceptional_lift(&f, kind)?;
    genus_of_modular_curve(&f, &with_scalars(&f, &lift))
}

/// One computed row of the exceptional genus table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub kind: Exceptional,
    pub ell: u32,
    pub profile: GenusProfile,
}

impl TableRow {
    /// `ell,type,mu,nu2,nu3,nu_inf,g`
    pub fn to_line(&self) -> String {
        let p = &self.profile;
        format!(
            "{},{},{},{},{},{},{}",
            self.ell, self.kind, p.mu, p.nu2, p.nu3, p.nu_inf, p.g
        )
    }
}

/// Computes the given rows in parallel; the output keeps the input order.
pub fn genus_table(rows: &[(Exceptional, u32)]) -> Result<Vec<TableRow>, Error> {
    rows.par_iter()
        .map(|&(kind, ell)| {
            Ok(TableRow {
                kind,
                ell,
                profile: exceptional_genus(ell, kind)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{standard_group, StandardTarget};
    use crate::ff::legendre;
    use crate::mat::gl2_elements;

    fn field(ell: u64) -> PrimeField {
        PrimeField::of(ell).unwrap()
    }

    fn chi(a: i64, ell: u64) -> i64 {
        let f = field(ell);
        legendre(f.reduce(a), f.modulus()) as i64
    }

    /// Classical closed forms for X_0(l), X_sp^+(l) and X_ns^+(l).
    fn x0_genus(ell: u64) -> u64 {
        let twelve_g = 12 + (ell as i64 + 1) - 3 * (1 + chi(-1, ell)) - 4 * (1 + chi(-3, ell)) - 12;
        twelve_g as u64 / 12
    }

    fn xsp_plus_genus(ell: u64) -> u64 {
        let l = ell as i64;
        ((l * l - 8 * l + 11 - 4 * chi(-3, ell)) / 24) as u64
    }

    fn xns_plus_genus(ell: u64) -> u64 {
        let l = ell as i64;
        ((l * l - 10 * l + 23 + 6 * chi(-1, ell) + 4 * chi(-3, ell)) / 24) as u64
    }

    #[test]
    fn full_group_has_genus_zero() {
        let f = field(7);
        let mut all = gl2_elements(&f);
        all.sort_unstable();
        let g = Subgroup::from_sorted(Vec::new(), all);
        let p = genus_of_modular_curve(&f, &g).unwrap();
        assert_eq!((p.mu, p.g), (1, 0));
    }

    #[test]
    fn classical_curves() {
        for ell in [5u64, 7, 11, 13, 17, 19] {
            let f = field(ell);
            let b = standard_group(&f, StandardTarget::Borel);
            assert_eq!(
                genus_of_modular_curve(&f, &b).unwrap().g,
                x0_genus(ell),
                "X0({ell})"
            );
            let nsp = standard_group(&f, StandardTarget::SplitNormalizer);
            assert_eq!(
                genus_of_modular_curve(&f, &nsp).unwrap().g,
                xsp_plus_genus(ell)
            );
            let nns = standard_group(&f, StandardTarget::NonsplitNormalizer);
            assert_eq!(
                genus_of_modular_curve(&f, &nns).unwrap().g,
                xns_plus_genus(ell)
            );
        }
        assert_eq!(x0_genus(11), 1);
        assert_eq!(x0_genus(13), 0);
        assert_eq!(x0_genus(37), 2);
        let f = field(37);
        let b = standard_group(&f, StandardTarget::Borel);
        let p = genus_of_modular_curve(&f, &b).unwrap();
        assert_eq!((p.mu, p.nu_inf, p.g), (38, 2, 2));
    }

    #[test]
    fn missing_minus_identity_is_rejected() {
        let f = field(7);
        let g = closure(&f, &[Mat2::diag(1, 3)]).unwrap();
        assert!(!g.contains(Mat2::scalar(6)));
        assert_eq!(
            genus_of_modular_curve(&f, &g),
            Err(Error::MissingMinusIdentity)
        );
        assert!(genus_of_modular_curve(&f, &g.with_minus_identity(&f)).is_ok());
    }

    #[test]
    fn genus_is_conjugation_invariant() {
        let f = field(13);
        let h = with_scalars(&f, &find_exceptional_lift(&f, Exceptional::S4).unwrap());
        let p = genus_of_modular_curve(&f, &h).unwrap();
        for x in [
            Mat2::new(1, 1, 0, 1),
            Mat2::new(2, 5, 3, 7),
            Mat2::diag(1, 2),
        ] {
            assert_eq!(genus_of_modular_curve(&f, &h.conjugate(x, &f)).unwrap(), p);
        }
    }

    #[test]
    fn elliptic_counts_do_not_depend_on_representative() {
        for ell in [5u64, 7, 11] {
            let f = field(ell);
            for t in [
                StandardTarget::SplitNormalizer,
                StandardTarget::NonsplitNormalizer,
            ] {
                let h = standard_group(&f, t);
                assert_eq!(fixed_point_counts_by_order(&f, &h, 3).len(), 1);
                assert_eq!(fixed_point_counts_by_order(&f, &h, 2).len(), 1);
            }
        }
    }

    #[test]
    fn small_table_rows() {
        assert_eq!(exceptional_genus(13, Exceptional::S4).unwrap().g, 3);
        assert_eq!(exceptional_genus(11, Exceptional::S4).unwrap().g, 1);
        assert_eq!(exceptional_genus(5, Exceptional::A4).unwrap().g, 0);
    }
}
