//! Arithmetic in the prime field F_l and its quadratic extension F_l(alpha),
//! alpha^2 = delta, where delta is the smallest positive quadratic nonresidue.
//!
//! Residues are carried as `u32` values already reduced into `[0, l)`; all
//! products are formed in `u64`, which cannot overflow because `l < 2^31`.

use crate::error::Error;

/// An odd prime modulus `3 <= l < 2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeModulus(u32);

impl PrimeModulus {
    pub const MAX: u64 = 1 << 31;

    pub fn new(ell: u64) -> Result<Self, Error> {
        if !(3..Self::MAX).contains(&ell) || ell.is_multiple_of(2) || !is_prime(ell) {
            return Err(Error::InvalidModulus(ell));
        }
        Ok(PrimeModulus(ell as u32))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }
}

impl std::fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Deterministic trial-division primality test; moduli here are small.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// The field F_l together with its fixed nonresidue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    modulus: PrimeModulus,
    delta: u32,
}

impl PrimeField {
    pub fn new(modulus: PrimeModulus) -> Self {
        let delta = find_nonresidue(modulus);
        PrimeField { modulus, delta }
    }

    /// Convenience constructor from a raw integer.
    pub fn of(ell: u64) -> Result<Self, Error> {
        Ok(Self::new(PrimeModulus::new(ell)?))
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    #[inline]
    pub fn ell(&self) -> u32 {
        self.modulus.0
    }

    /// The fixed nonresidue delta.
    #[inline]
    pub fn delta(&self) -> u32 {
        self.delta
    }

    /// Reduces any signed integer into `[0, l)`.
    #[inline]
    pub fn reduce(&self, v: i64) -> u32 {
        v.rem_euclid(self.ell() as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        let l = self.ell() as u64;
        (if s >= l { s - l } else { s }) as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.ell() - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.ell() - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.ell() as u64) as u32
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        pow_mod(a as u64, e, self.ell() as u64) as u32
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(&self, a: u32) -> u32 {
        debug_assert!(a != 0, "inverse of zero in F_{}", self.ell());
        self.pow(a, self.ell() as u64 - 2)
    }

    pub fn legendre(&self, a: u32) -> i8 {
        legendre(a, self.modulus)
    }

    #[inline]
    pub fn is_square(&self, a: u32) -> bool {
        self.legendre(a) >= 0
    }

    /// Order of a nonzero element in the cyclic group F_l^*.
    pub fn mult_order(&self, a: u32) -> u64 {
        debug_assert!(a != 0);
        let n = self.ell() as u64 - 1;
        let mut order = n;
        for (p, _) in factorize(n) {
            while order.is_multiple_of(p) && self.pow(a, order / p) == 1 {
                order /= p;
            }
        }
        order
    }

    /// Smallest generator of F_l^*.
    pub fn primitive_root(&self) -> u32 {
        let n = self.ell() as u64 - 1;
        (1..self.ell())
            .find(|&g| self.mult_order(g) == n)
            .expect("F_l^* is cyclic")
    }
}

pub(crate) fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc
}

/// Prime factorization by trial division, ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut k = 0;
            while n.is_multiple_of(d) {
                n /= d;
                k += 1;
            }
            out.push((d, k));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Legendre symbol by Euler's criterion.
pub fn legendre(a: u32, m: PrimeModulus) -> i8 {
    let l = m.get() as u64;
    let a = a as u64 % l;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (l - 1) / 2, l) == 1 {
        1
    } else {
        -1
    }
}

/// Smallest positive quadratic nonresidue mod l.
pub fn find_nonresidue(m: PrimeModulus) -> u32 {
    (2..m.get())
        .find(|&a| legendre(a, m) == -1)
        .expect("an odd prime has nonresidues")
}

/// `x + y*alpha` in F_{l^2}, alpha^2 = delta.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp2Elem {
    pub x: u32,
    pub y: u32,
}

impl Fp2Elem {
    pub const ZERO: Fp2Elem = Fp2Elem { x: 0, y: 0 };
    pub const ONE: Fp2Elem = Fp2Elem { x: 1, y: 0 };
    pub const ALPHA: Fp2Elem = Fp2Elem { x: 0, y: 1 };

    pub fn new(x: u32, y: u32) -> Self {
        Fp2Elem { x, y }
    }

    pub fn from_base(x: u32) -> Self {
        Fp2Elem { x, y: 0 }
    }

    pub fn is_zero(self) -> bool {
        self.x == 0 && self.y == 0
    }

    /// Lies in the prime subfield.
    pub fn is_rational(self) -> bool {
        self.y == 0
    }
}

impl PrimeField {
    pub fn fp2_add(&self, u: Fp2Elem, v: Fp2Elem) -> Fp2Elem {
        Fp2Elem::new(self.add(u.x, v.x), self.add(u.y, v.y))
    }

    pub fn fp2_sub(&self, u: Fp2Elem, v: Fp2Elem) -> Fp2Elem {
        Fp2Elem::new(self.sub(u.x, v.x), self.sub(u.y, v.y))
    }

    pub fn fp2_mul(&self, u: Fp2Elem, v: Fp2Elem) -> Fp2Elem {
        let l = self.ell() as u64;
        let (ux, uy, vx, vy) = (u.x as u64, u.y as u64, v.x as u64, v.y as u64);
        let yy = uy * vy % l;
        let x = (ux * vx + self.delta as u64 * yy) % l;
        let y = (ux * vy + uy * vx) % l;
        Fp2Elem::new(x as u32, y as u32)
    }

    pub fn fp2_scale(&self, k: u32, u: Fp2Elem) -> Fp2Elem {
        Fp2Elem::new(self.mul(k, u.x), self.mul(k, u.y))
    }

    /// Frobenius `u -> u^l`, i.e. `x + y alpha -> x - y alpha`.
    pub fn fp2_conj(&self, u: Fp2Elem) -> Fp2Elem {
        Fp2Elem::new(u.x, self.neg(u.y))
    }

    /// `x^2 - delta y^2`.
    pub fn fp2_norm(&self, u: Fp2Elem) -> u32 {
        self.sub(self.mul(u.x, u.x), self.mul(self.delta, self.mul(u.y, u.y)))
    }

    /// `2x`.
    pub fn fp2_trace(&self, u: Fp2Elem) -> u32 {
        self.add(u.x, u.x)
    }

    pub fn fp2_pow(&self, u: Fp2Elem, mut e: u64) -> Fp2Elem {
        let mut acc = Fp2Elem::ONE;
        let mut base = u;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.fp2_mul(acc, base);
            }
            base = self.fp2_mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Inverse via the norm; `u` must be nonzero.
    pub fn fp2_inv(&self, u: Fp2Elem) -> Fp2Elem {
        let n_inv = self.inv(self.fp2_norm(u));
        self.fp2_scale(n_inv, self.fp2_conj(u))
    }

    /// Roots in F_{l^2} of the monic `X^2 - t X + n`, assuming the
    /// discriminant is a nonresidue. The pair is `(r, conj(r))`.
    pub fn fp2_roots_irreducible(&self, t: u32, n: u32) -> (Fp2Elem, Fp2Elem) {
        // r = t/2 + sqrt(disc)/2 with sqrt(disc) = s*alpha where disc = delta s^2.
        let disc = self.sub(self.mul(t, t), self.mul(4, n));
        debug_assert_eq!(self.legendre(disc), -1);
        let ratio = self.mul(disc, self.inv(self.delta));
        let s = self.sqrt(ratio).expect("disc/delta is a square");
        let half = self.inv(2);
        let r = Fp2Elem::new(self.mul(t, half), self.mul(s, half));
        (r, self.fp2_conj(r))
    }

    /// A square root by exhaustive search over `[0, l)`; only used for
    /// small moduli in frame construction.
    pub fn sqrt(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return Some(0);
        }
        if self.legendre(a) != 1 {
            return None;
        }
        (1..self.ell()).find(|&r| self.mul(r, r) == a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn field(l: u64) -> PrimeField {
        PrimeField::of(l).unwrap()
    }

    fn primes_upto(n: u64) -> Vec<u64> {
        (3..=n).filter(|&p| is_prime(p)).collect()
    }

    #[test]
    fn legendre_examples() {
        let m = PrimeModulus::new(13).unwrap();
        assert_eq!(legendre(0, m), 0);
        assert_eq!(legendre(4, m), 1);
        // squares mod 13 are {1,3,4,9,10,12}
        let squares: Vec<u32> = (1..13u32).map(|k| k * k % 13).collect();
        assert!(!squares.contains(&2));
        assert_eq!(legendre(2, m), -1);
    }

    #[test]
    fn nonresidue_examples() {
        for (l, d) in [(3, 2), (5, 2), (13, 2), (7, 3), (17, 3)] {
            assert_eq!(find_nonresidue(PrimeModulus::new(l).unwrap()), d, "l={l}");
        }
    }

    #[test]
    fn modulus_rejects_bad_input() {
        for bad in [0, 1, 2, 4, 9, 15, 1 << 31] {
            assert!(PrimeModulus::new(bad).is_err(), "{bad}");
        }
        assert!(PrimeModulus::new(2_147_483_647).is_ok());
    }

    #[test]
    fn euler_matches_enumeration() {
        for l in primes_upto(97) {
            let m = PrimeModulus::new(l).unwrap();
            let mut sq = vec![false; l as usize];
            for k in 1..l {
                sq[(k * k % l) as usize] = true;
            }
            let mut residues = 0;
            for a in 0..l as u32 {
                let expect = if a == 0 {
                    0
                } else if sq[a as usize] {
                    1
                } else {
                    -1
                };
                assert_eq!(legendre(a, m), expect, "a={a} l={l}");
                if expect == 1 {
                    residues += 1;
                }
            }
            assert_eq!(residues, (l - 1) / 2);
        }
    }

    #[test]
    fn fp2_alpha_trace_and_norm() {
        let f = field(13);
        assert_eq!(f.fp2_trace(Fp2Elem::ALPHA), 0);
        assert_eq!(f.fp2_norm(Fp2Elem::ALPHA), f.neg(f.delta()));
    }

    #[test]
    fn fp2_norm_is_multiplicative_and_matches_frobenius() {
        let f = field(13);
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..100 {
            let u = Fp2Elem::new(rng.gen_range(0..13), rng.gen_range(0..13));
            let v = Fp2Elem::new(rng.gen_range(0..13), rng.gen_range(0..13));
            assert_eq!(
                f.fp2_norm(f.fp2_mul(u, v)),
                f.mul(f.fp2_norm(u), f.fp2_norm(v))
            );
            // norm(u) = u * u^l
            let n = f.fp2_mul(u, f.fp2_pow(u, 13));
            assert_eq!(n, Fp2Elem::from_base(f.fp2_norm(u)));
            assert_eq!(f.fp2_pow(u, 13), f.fp2_conj(u));
        }
    }

    #[test]
    fn fp2_multiplicative_group_exponent() {
        for l in [3u64, 5, 7, 11, 13] {
            let f = field(l);
            for x in 0..l as u32 {
                for y in 0..l as u32 {
                    let u = Fp2Elem::new(x, y);
                    if u.is_zero() {
                        continue;
                    }
                    assert_eq!(f.fp2_pow(u, l * l - 1), Fp2Elem::ONE);
                    assert_eq!(f.fp2_mul(u, f.fp2_inv(u)), Fp2Elem::ONE);
                }
            }
        }
    }

    #[test]
    fn irreducible_roots_satisfy_polynomial() {
        let f = field(11);
        for t in 0..11 {
            for n in 0..11 {
                let disc = f.sub(f.mul(t, t), f.mul(4, n));
                if f.legendre(disc) != -1 {
                    continue;
                }
                let (r, rb) = f.fp2_roots_irreducible(t, n);
                assert!(!r.is_rational());
                assert_eq!(f.fp2_add(r, rb), Fp2Elem::from_base(t));
                assert_eq!(f.fp2_mul(r, rb), Fp2Elem::from_base(n));
            }
        }
    }

    #[test]
    fn primitive_root_and_orders() {
        let f = field(13);
        assert_eq!(f.primitive_root(), 2);
        assert_eq!(f.mult_order(12), 2);
        assert_eq!(f.mult_order(3), 3);
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
    }
}
