//! Upper bounds on l for exceptional (and Klein-four) projective images,
//! from the size of the image of inertia over a field of degree d.

use std::fmt;
use std::str::FromStr;

use crate::cartan::StandardTarget;
use crate::error::Error;
use crate::ff::is_prime;
use crate::localglobal::{exceptional_condition, CaseTag};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ImageType {
    A4,
    S4,
    A5,
    KleinFour,
}

impl ImageType {
    pub const ALL: [ImageType; 4] = [
        ImageType::A4,
        ImageType::S4,
        ImageType::A5,
        ImageType::KleinFour,
    ];

    /// Largest element order in the projective image.
    pub fn max_order(self) -> u64 {
        match self {
            ImageType::A4 => 3,
            ImageType::S4 => 4,
            ImageType::A5 => 5,
            ImageType::KleinFour => 2,
        }
    }
}

impl fmt::Display for ImageType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ImageType::A4 => "A4",
            ImageType::S4 => "S4",
            ImageType::A5 => "A5",
            ImageType::KleinFour => "KleinFour",
        })
    }
}

impl FromStr for ImageType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a4" => Ok(ImageType::A4),
            "s4" => Ok(ImageType::S4),
            "a5" => Ok(ImageType::A5),
            "kleinfour" | "v4" | "klein" => Ok(ImageType::KleinFour),
            _ => Err(Error::UnknownType(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundQuery {
    /// Degree of the number field, at least 1.
    pub degree: u64,
    pub image: ImageType,
}

impl BoundQuery {
    pub fn new(degree: u64, image: ImageType) -> Result<Self, Error> {
        if degree == 0 {
            return Err(Error::Precondition("degree must be at least 1".into()));
        }
        Ok(BoundQuery { degree, image })
    }
}

/// `3 d h + 1`, where `h` is the largest element order of the image and
/// `3d` bounds the ramification index after semistable reduction.
pub fn exceptional_bound(q: BoundQuery) -> u64 {
    3 * q.degree * q.image.max_order() + 1
}

/// The residue condition on `l` for this image and target, as
/// `(modulus, residue, determinant must be a square)`; `None` when the
/// classification has no such case.
pub fn congruence(image: ImageType, target: StandardTarget) -> Option<(u32, u32, bool)> {
    let tag = match image {
        ImageType::A4 => CaseTag::ExcA4,
        ImageType::S4 => CaseTag::ExcS4,
        ImageType::A5 => CaseTag::ExcA5,
        ImageType::KleinFour => {
            return (target == StandardTarget::SplitNormalizer).then_some((4, 3, true));
        }
    };
    match target {
        StandardTarget::Borel => None,
        t => Some(exceptional_condition(t, tag)),
    }
}

/// Primes `l <= exceptional_bound` meeting the congruence for `(image, target)`.
pub fn feasible_exceptional_primes(
    degree: u64,
    image: ImageType,
    target: StandardTarget,
) -> Vec<u64> {
    let Some((m, r, _)) = congruence(image, target) else {
        return Vec::new();
    };
    let bound = exceptional_bound(BoundQuery {
        degree: degree.max(1),
        image,
    });
    (3..=bound)
        .filter(|&l| is_prime(l) && l % m as u64 == r as u64)
        .collect()
}

/// Whether the case allows a surjective determinant, as for curves over Q.
pub fn surjective_det_possible(image: ImageType, target: StandardTarget) -> bool {
    congruence(image, target).is_some_and(|(_, _, squares)| !squares)
}
