//! 2x2 matrices over F_l, their action on P^1(F_l) and P^1(F_{l^2}), and
//! orbit/sign data of projective elements.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::ff::{factorize, Fp2Elem, PrimeField};

/// Row-major `(a b; c d)` with entries reduced mod l.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2 {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1, 0, 0, 1);

    pub const fn new(a: u32, b: u32, c: u32, d: u32) -> Self {
        Mat2 { a, b, c, d }
    }

    /// Builds a matrix from signed entries, reducing mod l.
    pub fn from_i64(f: &PrimeField, a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2::new(f.reduce(a), f.reduce(b), f.reduce(c), f.reduce(d))
    }

    pub fn scalar(lambda: u32) -> Self {
        Mat2::new(lambda, 0, 0, lambda)
    }

    pub fn diag(x: u32, y: u32) -> Self {
        Mat2::new(x, 0, 0, y)
    }

    /// Packs the entries into 16-bit lanes, `a` in the high lane. The packed
    /// order agrees with the derived `Ord`.
    #[inline]
    pub fn code(self) -> u64 {
        debug_assert!(self.a < 1 << 16 && self.b < 1 << 16 && self.c < 1 << 16 && self.d < 1 << 16);
        (self.a as u64) << 48 | (self.b as u64) << 32 | (self.c as u64) << 16 | self.d as u64
    }

    pub fn from_code(code: u64) -> Self {
        let lane = |s: u32| ((code >> s) & 0xffff) as u32;
        Mat2::new(lane(48), lane(32), lane(16), lane(0))
    }

    /// Dense index in `[0, l^4)`, order-preserving.
    #[inline]
    pub fn index(self, ell: u32) -> usize {
        let l = ell as usize;
        ((self.a as usize * l + self.b as usize) * l + self.c as usize) * l + self.d as usize
    }

    pub fn from_index(mut idx: usize, ell: u32) -> Self {
        let l = ell as usize;
        let d = idx % l;
        idx /= l;
        let c = idx % l;
        idx /= l;
        let b = idx % l;
        Mat2::new((idx / l) as u32, b as u32, c as u32, d as u32)
    }

    #[inline]
    pub fn is_scalar(self) -> bool {
        self.b == 0 && self.c == 0 && self.a == self.d
    }

    #[inline]
    pub fn det(self, f: &PrimeField) -> u32 {
        f.sub(f.mul(self.a, self.d), f.mul(self.b, self.c))
    }

    #[inline]
    pub fn trace(self, f: &PrimeField) -> u32 {
        f.add(self.a, self.d)
    }

    /// `tr^2 - 4 det`.
    pub fn charpoly_disc(self, f: &PrimeField) -> u32 {
        let t = self.trace(f);
        f.sub(f.mul(t, t), f.mul(4 % f.ell(), self.det(f)))
    }

    pub fn is_invertible(self, f: &PrimeField) -> bool {
        self.det(f) != 0
    }

    #[inline]
    pub fn mul(self, o: Mat2, f: &PrimeField) -> Mat2 {
        let l = f.ell() as u64;
        let (a, b, c, d) = (self.a as u64, self.b as u64, self.c as u64, self.d as u64);
        let (e, g, h, k) = (o.a as u64, o.b as u64, o.c as u64, o.d as u64);
        Mat2::new(
            ((a * e + b * h) % l) as u32,
            ((a * g + b * k) % l) as u32,
            ((c * e + d * h) % l) as u32,
            ((c * g + d * k) % l) as u32,
        )
    }

    /// Inverse by the adjugate formula.
    pub fn inv(self, f: &PrimeField) -> Mat2 {
        let di = f.inv(self.det(f));
        Mat2::new(
            f.mul(self.d, di),
            f.mul(f.neg(self.b), di),
            f.mul(f.neg(self.c), di),
            f.mul(self.a, di),
        )
    }

    pub fn scale(self, k: u32, f: &PrimeField) -> Mat2 {
        Mat2::new(
            f.mul(k, self.a),
            f.mul(k, self.b),
            f.mul(k, self.c),
            f.mul(k, self.d),
        )
    }

    pub fn neg(self, f: &PrimeField) -> Mat2 {
        Mat2::new(f.neg(self.a), f.neg(self.b), f.neg(self.c), f.neg(self.d))
    }

    pub fn pow(self, mut e: u64, f: &PrimeField) -> Mat2 {
        let mut acc = Mat2::IDENTITY;
        let mut base = self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(base, f);
            }
            base = base.mul(base, f);
            e >>= 1;
        }
        acc
    }

    /// `x g x^-1`.
    #[inline]
    pub fn conjugate_by(self, x: Mat2, x_inv: Mat2, f: &PrimeField) -> Mat2 {
        x.mul(self, f).mul(x_inv, f)
    }

    /// Representative of the image in PGL2: scaled so the first nonzero entry
    /// (in a, b, c, d order) is 1.
    pub fn projective_normal(self, f: &PrimeField) -> Mat2 {
        let lead = [self.a, self.b, self.c, self.d]
            .into_iter()
            .find(|&x| x != 0)
            .expect("zero matrix has no projective class");
        if lead == 1 {
            self
        } else {
            self.scale(f.inv(lead), f)
        }
    }

    pub fn element_order(self, f: &PrimeField) -> u64 {
        order_by_exponent(gl2_order(f), |e| self.pow(e, f) == Mat2::IDENTITY)
    }

    /// Order of the image in PGL2.
    pub fn pgl_order(self, f: &PrimeField) -> u64 {
        order_by_exponent(gl2_order(f), |e| self.pow(e, f).is_scalar())
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.a, self.b, self.c, self.d)
    }
}

impl FromStr for Mat2 {
    type Err = Error;

    /// Parses `a:b:c:d` with already reduced, nonnegative entries.
    fn from_str(s: &str) -> Result<Self, Error> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.len() != 4 {
            return Err(Error::MalformedMatrix(s.to_string()));
        }
        let mut v = [0u32; 4];
        for (slot, p) in v.iter_mut().zip(&parts) {
            *slot = p
                .trim()
                .parse::<u32>()
                .map_err(|_| Error::MalformedMatrix(s.to_string()))?;
        }
        Ok(Mat2::new(v[0], v[1], v[2], v[3]))
    }
}

/// Parses `a:b:c:d` with arbitrary signed entries and reduces mod l.
pub fn parse_matrix(s: &str, f: &PrimeField) -> Result<Mat2, Error> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    if parts.len() != 4 {
        return Err(Error::MalformedMatrix(s.to_string()));
    }
    let mut v = [0i64; 4];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p
            .trim()
            .parse::<i64>()
            .map_err(|_| Error::MalformedMatrix(s.to_string()))?;
    }
    Ok(Mat2::from_i64(f, v[0], v[1], v[2], v[3]))
}

/// Comma-separated list of `a:b:c:d` matrices; each must be invertible.
pub fn parse_generators(s: &str, f: &PrimeField) -> Result<Vec<Mat2>, Error> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let m = parse_matrix(t, f)?;
            if !m.is_invertible(f) {
                return Err(Error::Singular(m.to_string()));
            }
            Ok(m)
        })
        .collect()
}

/// `|GL2(F_l)| = (l^2 - 1)(l^2 - l)`.
pub fn gl2_order(f: &PrimeField) -> u64 {
    let l = f.ell() as u64;
    (l * l - 1) * (l * l - l)
}

/// `|PSL2(F_l)| = l(l^2 - 1)/2`.
pub fn psl2_order(f: &PrimeField) -> u64 {
    let l = f.ell() as u64;
    l * (l * l - 1) / 2
}

fn order_by_exponent(exponent: u64, is_trivial: impl Fn(u64) -> bool) -> u64 {
    debug_assert!(is_trivial(exponent));
    let mut order = exponent;
    for (p, _) in factorize(exponent) {
        while order.is_multiple_of(p) && is_trivial(order / p) {
            order /= p;
        }
    }
    order
}

/// Every element of GL2(F_l), in increasing [`Mat2`] order.
pub fn gl2_elements(f: &PrimeField) -> Vec<Mat2> {
    let l = f.ell();
    let mut out = Vec::with_capacity(gl2_order(f) as usize);
    for a in 0..l {
        for b in 0..l {
            for c in 0..l {
                for d in 0..l {
                    let m = Mat2::new(a, b, c, d);
                    if m.is_invertible(f) {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

/// One representative per element of PGL2(F_l), namely the
/// [`Mat2::projective_normal`] forms, in increasing order.
pub fn pgl2_representatives(f: &PrimeField) -> Vec<Mat2> {
    gl2_elements(f)
        .into_iter()
        .filter(|m| m.projective_normal(f) == *m)
        .collect()
}

/// Elements of SL2(F_l).
pub fn sl2_elements(f: &PrimeField) -> Vec<Mat2> {
    gl2_elements(f)
        .into_iter()
        .filter(|m| m.det(f) == 1)
        .collect()
}

/// A point `[x : y]` of P^1(F_l), normalized so the first nonzero coordinate is 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjLine {
    pub x: u32,
    pub y: u32,
}

impl ProjLine {
    pub fn new(x: u32, y: u32, f: &PrimeField) -> Self {
        if x != 0 {
            let xi = f.inv(x);
            ProjLine {
                x: 1,
                y: f.mul(y, xi),
            }
        } else {
            assert!(y != 0, "[0:0] is not a line");
            ProjLine { x: 0, y: 1 }
        }
    }

    /// Position in [`all_lines`]: `[1:y] -> y`, `[0:1] -> l`.
    #[inline]
    pub fn index(self, f: &PrimeField) -> usize {
        if self.x == 1 {
            self.y as usize
        } else {
            f.ell() as usize
        }
    }
}

impl fmt::Display for ProjLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.x, self.y)
    }
}

/// The `l + 1` lines of P^1(F_l), indexed as in [`ProjLine::index`].
pub fn all_lines(f: &PrimeField) -> Vec<ProjLine> {
    (0..f.ell())
        .map(|y| ProjLine { x: 1, y })
        .chain(std::iter::once(ProjLine { x: 0, y: 1 }))
        .collect()
}

/// `g . [x:y] = [ax + by : cx + dy]`.
#[inline]
pub fn act(g: Mat2, line: ProjLine, f: &PrimeField) -> ProjLine {
    let x = f.add(f.mul(g.a, line.x), f.mul(g.b, line.y));
    let y = f.add(f.mul(g.c, line.x), f.mul(g.d, line.y));
    ProjLine::new(x, y, f)
}

/// A point of P^1(F_{l^2}) with the same normalization as [`ProjLine`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjLine2 {
    pub x: Fp2Elem,
    pub y: Fp2Elem,
}

impl ProjLine2 {
    pub fn new(x: Fp2Elem, y: Fp2Elem, f: &PrimeField) -> Self {
        if !x.is_zero() {
            ProjLine2 {
                x: Fp2Elem::ONE,
                y: f.fp2_mul(y, f.fp2_inv(x)),
            }
        } else {
            assert!(!y.is_zero(), "[0:0] is not a line");
            ProjLine2 {
                x: Fp2Elem::ZERO,
                y: Fp2Elem::ONE,
            }
        }
    }

    pub fn from_rational(line: ProjLine) -> Self {
        ProjLine2 {
            x: Fp2Elem::from_base(line.x),
            y: Fp2Elem::from_base(line.y),
        }
    }

    /// Coordinatewise Frobenius.
    pub fn conj(self, f: &PrimeField) -> Self {
        ProjLine2 {
            x: f.fp2_conj(self.x),
            y: f.fp2_conj(self.y),
        }
    }

    pub fn is_rational(self) -> bool {
        self.x.is_rational() && self.y.is_rational()
    }
}

/// The `l^2 + 1` lines of P^1(F_{l^2}).
pub fn all_lines2(f: &PrimeField) -> Vec<ProjLine2> {
    let l = f.ell();
    let mut out = Vec::with_capacity((l as usize).pow(2) + 1);
    for x in 0..l {
        for y in 0..l {
            out.push(ProjLine2 {
                x: Fp2Elem::ONE,
                y: Fp2Elem::new(x, y),
            });
        }
    }
    out.push(ProjLine2 {
        x: Fp2Elem::ZERO,
        y: Fp2Elem::ONE,
    });
    out
}

pub fn act2(g: Mat2, line: ProjLine2, f: &PrimeField) -> ProjLine2 {
    let e = |v: u32| Fp2Elem::from_base(v);
    let x = f.fp2_add(f.fp2_mul(e(g.a), line.x), f.fp2_mul(e(g.b), line.y));
    let y = f.fp2_add(f.fp2_mul(e(g.c), line.x), f.fp2_mul(e(g.d), line.y));
    ProjLine2::new(x, y, f)
}

/// Orbit data of the projective image of `g` acting on P^1(F_l).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrbitProfile {
    /// Order in PGL2.
    pub r: u64,
    /// Fixed lines.
    pub k: usize,
    /// Number of orbits, trivial ones included.
    pub s: usize,
    /// Sign of the permutation of P^1(F_l).
    pub sigma: i8,
}

/// The permutation of line indices induced by `g`.
pub fn line_permutation(g: Mat2, f: &PrimeField) -> Vec<usize> {
    all_lines(f)
        .into_iter()
        .map(|l| act(g, l, f).index(f))
        .collect()
}

/// Orbit sizes of `g` on P^1(F_l), in order of smallest member.
pub fn orbit_sizes(g: Mat2, f: &PrimeField) -> Vec<usize> {
    let perm = line_permutation(g, f);
    let mut seen = vec![false; perm.len()];
    let mut sizes = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        sizes.push(len);
    }
    sizes
}

/// Sign by sorting the permutation with transpositions and counting swaps.
fn transposition_sign(mut perm: Vec<usize>) -> i8 {
    let mut swaps = 0usize;
    for i in 0..perm.len() {
        while perm[i] != i {
            let j = perm[i];
            perm.swap(i, j);
            swaps += 1;
        }
    }
    if swaps.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn orbit_profile(g: Mat2, f: &PrimeField) -> OrbitProfile {
    let sizes = orbit_sizes(g, f);
    let k = sizes.iter().filter(|&&n| n == 1).count();
    let s = sizes.len();
    let sigma = transposition_sign(line_permutation(g, f));
    let parity = if s.is_multiple_of(2) { 1 } else { -1 };
    assert_eq!(sigma, parity, "sign of {g} disagrees with (-1)^s");
    OrbitProfile {
        r: g.pgl_order(f),
        k,
        s,
        sigma,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn field(l: u64) -> PrimeField {
        PrimeField::of(l).unwrap()
    }

    #[test]
    fn act_examples() {
        let f5 = field(5);
        let f7 = field(7);
        let l = ProjLine { x: 1, y: 5 };
        assert_eq!(act(Mat2::IDENTITY, l, &f7), l);
        assert_eq!(
            act(Mat2::diag(1, 4), ProjLine { x: 0, y: 1 }, &f5),
            ProjLine { x: 0, y: 1 }
        );
        // [3:1] normalized by 3^-1 = 5 mod 7
        let swap = Mat2::new(0, 1, 1, 0);
        assert_eq!(
            act(swap, ProjLine { x: 1, y: 3 }, &f7),
            ProjLine { x: 1, y: 5 }
        );
    }

    #[test]
    fn disc_examples() {
        let f = field(13);
        assert_eq!(Mat2::IDENTITY.charpoly_disc(&f), 0);
        let d = f.delta();
        let m = Mat2::new(0, d, 1, 0);
        assert_eq!(m.charpoly_disc(&f), f.mul(4, d));
        assert_eq!(f.legendre(m.charpoly_disc(&f)), -1);
        assert_eq!(Mat2::new(1, 1, 0, 1).charpoly_disc(&f), 0);
    }

    #[test]
    fn order_examples() {
        let f7 = field(7);
        assert_eq!(Mat2::IDENTITY.element_order(&f7), 1);
        assert_eq!(Mat2::IDENTITY.pgl_order(&f7), 1);
        let j = Mat2::from_i64(&f7, 0, 1, -1, 0);
        assert_eq!(j.mul(j, &f7), Mat2::scalar(6));
        assert_eq!(j.element_order(&f7), 4);
        assert_eq!(j.pgl_order(&f7), 2);
        let f13 = field(13);
        let u = Mat2::new(1, 1, 0, 1);
        assert_eq!(u.element_order(&f13), 13);
        assert_eq!(u.pgl_order(&f13), 13);
    }

    #[test]
    fn orbit_profile_examples() {
        let f5 = field(5);
        assert_eq!(
            orbit_profile(Mat2::IDENTITY, &f5),
            OrbitProfile {
                r: 1,
                k: 6,
                s: 6,
                sigma: 1
            }
        );
        assert_eq!(
            orbit_profile(Mat2::diag(1, 4), &f5),
            OrbitProfile {
                r: 2,
                k: 2,
                s: 4,
                sigma: 1
            }
        );
        let f7 = field(7);
        assert_eq!(f7.delta(), 3);
        assert_eq!(
            orbit_profile(Mat2::new(0, 3, 1, 0), &f7),
            OrbitProfile {
                r: 2,
                k: 0,
                s: 4,
                sigma: 1
            }
        );
    }

    #[test]
    fn group_orders_by_enumeration() {
        assert_eq!(gl2_elements(&field(3)).len(), 48);
        assert_eq!(gl2_elements(&field(5)).len(), 480);
        assert_eq!(pgl2_representatives(&field(5)).len(), 120);
        assert_eq!(sl2_elements(&field(5)).len(), 120);
    }

    #[test]
    fn code_and_index_roundtrip() {
        let f = field(13);
        for g in gl2_elements(&f).into_iter().step_by(97) {
            assert_eq!(Mat2::from_code(g.code()), g);
            assert_eq!(Mat2::from_index(g.index(13), 13), g);
        }
    }

    #[test]
    fn action_is_a_left_action() {
        let f = field(13);
        let elems = gl2_elements(&f);
        let lines = all_lines(&f);
        let mut rng = rand::rngs::StdRng::seed_from_u64(1);
        for _ in 0..1000 {
            let g = elems[rng.gen_range(0..elems.len())];
            let h = elems[rng.gen_range(0..elems.len())];
            let l = lines[rng.gen_range(0..lines.len())];
            assert_eq!(act(g.mul(h, &f), l, &f), act(g, act(h, l, &f), &f));
            assert_eq!(act(Mat2::IDENTITY, l, &f), l);
            assert_eq!(g.mul(g.inv(&f), &f), Mat2::IDENTITY);
        }
    }

    #[test]
    fn frobenius_on_lines2_fixes_exactly_rational_lines() {
        let f = field(7);
        let all = all_lines2(&f);
        assert_eq!(all.len(), 50);
        let fixed: Vec<_> = all.iter().filter(|l| l.conj(&f) == **l).collect();
        assert_eq!(fixed.len(), 8);
        assert!(fixed.iter().all(|l| l.is_rational()));
        for l in &all {
            assert_eq!(l.conj(&f).conj(&f), *l);
        }
    }

    #[test]
    fn parse_generators_rejects_singular() {
        let f = field(7);
        assert_eq!(
            parse_generators("1:2:3:4, 0:-1:1:0", &f).unwrap(),
            vec![Mat2::new(1, 2, 3, 4), Mat2::new(0, 6, 1, 0)]
        );
        assert!(matches!(
            parse_generators("1:2:2:4", &f),
            Err(Error::Singular(_))
        ));
        assert!(matches!(
            parse_generators("1:2:3", &f),
            Err(Error::MalformedMatrix(_))
        ));
    }
}
