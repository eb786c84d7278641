//! Local-global behaviour of Cartan subgroups of GL2(F_l).
//!
//! An element of GL2(F_l) can lie in some conjugate of a target subgroup
//! (a split or nonsplit Cartan, one of their normalizers, or a Borel)
//! without the group it belongs to lying in a single conjugate. This crate
//! decides the elementwise condition, enumerates every subgroup satisfying
//! it at small l, classifies the ones that escape every conjugate, computes
//! genera of the associated modular curves, and scans Frobenius traces of
//! elliptic curves over Q for the same condition.
//!
//! Modules, bottom-up: [`ff`] (field arithmetic), [`mat`] (matrices and the
//! projective line), [`cartan`] (targets and membership), [`subgrp`]
//! (subgroups and their enumeration), [`localglobal`] (classification),
//! [`inertia`] (bounds on l), [`genus`] (modular curves), [`curves`]
//! (elliptic curves and trace scans).

pub mod cartan;
pub mod curves;
pub mod error;
pub mod ff;
pub mod genus;
pub mod inertia;
pub mod localglobal;
pub mod mat;
pub mod subgrp;

pub use cartan::{element_local_profile, standard_group, CartanFrame, StandardTarget, TargetSet};
pub use error::Error;
pub use ff::{Fp2Elem, PrimeField, PrimeModulus};
pub use genus::{genus_of_modular_curve, GenusProfile};
pub use inertia::{exceptional_bound, feasible_exceptional_primes, BoundQuery, ImageType};
pub use localglobal::{
    classify, det_analysis, satisfies_local, verify_theorem, CaseTag, DetReport, TheoremCase,
    VerificationReport,
};
pub use mat::{Mat2, OrbitProfile, ProjLine, ProjLine2};
pub use subgrp::{closure, conjugate_into, pgl_type, PglType, Subgroup, Witness};
