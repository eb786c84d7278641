//! Elliptic curves over Q given by their j-invariant, traces of Frobenius
//! by character sums, and scans of those traces against the elementwise
//! criteria for each target.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Pow, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::cartan::{StandardTarget, TargetSet};
use crate::error::Error;
use crate::ff::{is_prime, PrimeField};

/// Parses an exact rational written as a product of integer powers, e.g.
/// `-2^12*5^3*11*13^4/3^13`. Operators: `^`, `*`, `/`, unary `-`.
pub fn parse_rational(expr: &str) -> Result<BigRational, Error> {
    let err = |msg: &str| Error::Expression(format!("{msg} in `{expr}`"));
    let tokens: Vec<char> = expr.chars().filter(|c| !c.is_whitespace()).collect();
    let mut pos = 0;

    fn integer(tokens: &[char], pos: &mut usize) -> Option<BigInt> {
        let start = *pos;
        while *pos < tokens.len() && tokens[*pos].is_ascii_digit() {
            *pos += 1;
        }
        let digits: String = tokens[start..*pos].iter().collect();
        digits.parse().ok()
    }

    // factor := '-'* integer ('^' integer)?
    let factor = |pos: &mut usize| -> Result<BigRational, Error> {
        let mut negative = false;
        while tokens.get(*pos) == Some(&'-') {
            negative = !negative;
            *pos += 1;
        }
        let base = integer(&tokens, pos).ok_or_else(|| err("expected an integer"))?;
        let mut value = base;
        if tokens.get(*pos) == Some(&'^') {
            *pos += 1;
            let e = integer(&tokens, pos)
                .and_then(|e| e.to_u32())
                .ok_or_else(|| err("expected a small exponent"))?;
            value = Pow::pow(&value, e);
        }
        if negative {
            value = -value;
        }
        Ok(BigRational::from_integer(value))
    };

    let mut acc = factor(&mut pos)?;
    while pos < tokens.len() {
        let op = tokens[pos];
        pos += 1;
        let rhs = factor(&mut pos)?;
        match op {
            '*' => acc *= rhs,
            '/' => {
                if rhs.is_zero() {
                    return Err(err("division by zero"));
                }
                acc /= rhs
            }
            _ => return Err(err(&format!("unexpected `{op}`"))),
        }
    }
    Ok(acc)
}

/// `y^2 = x^3 + A x + B` over Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curve {
    pub a: BigRational,
    pub b: BigRational,
    pub j: BigRational,
}

impl Curve {
    /// `4A^3 + 27B^2`.
    pub fn disc_part(&self) -> BigRational {
        disc_part(&self.a, &self.b)
    }
}

fn disc_part(a: &BigRational, b: &BigRational) -> BigRational {
    let four = BigRational::from_integer(4.into());
    let tw7 = BigRational::from_integer(27.into());
    four * a * a * a + tw7 * b * b
}

/// `1728 * 4A^3 / (4A^3 + 27B^2)`.
pub fn j_invariant(a: &BigRational, b: &BigRational) -> BigRational {
    let num =
        BigRational::from_integer(1728.into()) * BigRational::from_integer(4.into()) * a * a * a;
    num / disc_part(a, b)
}

/// A curve with the given j-invariant: `A = 3j(1728 - j)`,
/// `B = 2j(1728 - j)^2`, or `(0, 1)` and `(1, 0)` for j = 0 and 1728.
pub fn curve_from_j(j: &BigRational) -> Curve {
    let r = |n: i64| BigRational::from_integer(n.into());
    let (a, b) = if j.is_zero() {
        (r(0), r(1))
    } else if *j == r(1728) {
        (r(1), r(0))
    } else {
        let k = r(1728) - j;
        (r(3) * j * &k, r(2) * j * &k * &k)
    };
    let curve = Curve {
        j: j_invariant(&a, &b),
        a,
        b,
    };
    assert_eq!(&curve.j, j, "model does not reproduce the j-invariant");
    curve
}

/// `q mod p`, or `None` when `p` divides the denominator.
pub fn reduce_mod(q: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let den = q.denom().mod_floor(&pb);
    if den.is_zero() {
        return None;
    }
    let num = q.numer().mod_floor(&pb).to_u64().unwrap();
    let den = den.to_u64().unwrap();
    let f = PrimeField::of(p).ok()?;
    Some(f.mul(num as u32, f.inv(den as u32)) as u64)
}

/// Reduction of the model at an odd prime, if it has good reduction there.
fn reduce_curve(e: &Curve, p: u64) -> Option<(u64, u64)> {
    if p == 2 {
        return None;
    }
    let a = reduce_mod(&e.a, p)?;
    let b = reduce_mod(&e.b, p)?;
    let d = (4 * a % p * a % p * a + 27 * b % p * b) % p;
    (d != 0).then_some((a, b))
}

/// `chi[x]` is the quadratic character of `x mod p`.
fn character_table(p: u64) -> Vec<i8> {
    let mut chi = vec![-1i8; p as usize];
    chi[0] = 0;
    for x in 1..p.div_ceil(2) {
        chi[(x * x % p) as usize] = 1;
    }
    chi
}

/// `-sum chi(x^3 + A x + B)`, which is `p + 1 - #E(F_p)`.
pub fn trace_by_character_sum(a: u64, b: u64, p: u64) -> i64 {
    let chi = character_table(p);
    let mut s = 0i64;
    for x in 0..p {
        let v = (x * x % p * x + a * x + b) % p;
        s += chi[v as usize] as i64;
    }
    -s
}

/// `#E(F_p)` by trying every `(x, y)`, plus the point at infinity.
pub fn naive_point_count(a: u64, b: u64, p: u64) -> u64 {
    let mut n = 1;
    for x in 0..p {
        let rhs = (x * x % p * x + a * x + b) % p;
        n += (0..p).filter(|y| y * y % p == rhs).count() as u64;
    }
    n
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ApRecord {
    pub p: u64,
    /// `None` at primes of bad reduction (and at l).
    pub ap: Option<i64>,
    pub good: bool,
    /// Targets whose elementwise criterion accepts Frobenius at `p`.
    pub compatible: TargetSet,
}

/// Trace of Frobenius at `p`, with compatibility computed modulo `f`.
pub fn trace_of_frobenius(e: &Curve, p: u64, f: &PrimeField) -> ApRecord {
    let bad = ApRecord {
        p,
        ap: None,
        good: false,
        compatible: TargetSet::empty(),
    };
    if p == f.ell() as u64 {
        return bad;
    }
    let Some((a, b)) = reduce_curve(e, p) else {
        return bad;
    };
    let ap = trace_by_character_sum(a, b, p);
    assert!(ap * ap <= 4 * p as i64, "Hasse bound fails at p = {p}");
    let compatible = StandardTarget::ALL
        .into_iter()
        .filter(|&t| frobenius_compatible(ap, p, f, t))
        .collect();
    ApRecord {
        p,
        ap: Some(ap),
        good: true,
        compatible,
    }
}

/// Whether some element of a conjugate of `t` can have characteristic
/// polynomial `X^2 - ap X + p` mod l. A zero discriminant counts as
/// compatible for every target, since the scalar case cannot be told apart.
pub fn frobenius_compatible(ap: i64, p: u64, f: &PrimeField, t: StandardTarget) -> bool {
    let tr = f.reduce(ap);
    let disc = f.sub(f.mul(tr, tr), f.mul(4, f.reduce(p as i64)));
    if disc == 0 {
        return true;
    }
    let square = f.is_square(disc);
    match t {
        StandardTarget::Borel | StandardTarget::SplitCartan => square,
        StandardTarget::NonsplitCartan => !square,
        StandardTarget::SplitNormalizer => square || tr == 0,
        StandardTarget::NonsplitNormalizer => !square || tr == 0,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanReport {
    pub ell: u32,
    pub target: StandardTarget,
    pub p_max: u64,
    pub records: Vec<ApRecord>,
}

impl ScanReport {
    pub fn good_primes(&self) -> usize {
        self.records.iter().filter(|r| r.good).count()
    }

    /// Good primes whose Frobenius fails the criterion for the target.
    pub fn incompatible(&self) -> Vec<u64> {
        self.records
            .iter()
            .filter(|r| r.good && !r.compatible.contains(self.target))
            .map(|r| r.p)
            .collect()
    }

    pub fn is_consistent(&self) -> bool {
        self.incompatible().is_empty()
    }

    pub fn verdict(&self) -> &'static str {
        if self.is_consistent() {
            "consistent"
        } else {
            "inconsistent"
        }
    }

    /// One `p,ap,good,compatible` line per prime; `ap` and `compatible`
    /// are empty at bad primes.
    pub fn record_lines(&self) -> impl Iterator<Item = String> + '_ {
        self.records.iter().map(move |r| match r.ap {
            Some(ap) => format!("{},{},true,{}", r.p, ap, r.compatible.contains(self.target)),
            None => format!("{},,false,", r.p),
        })
    }

    pub fn summary(&self) -> Summary {
        let bad = self.records.iter().filter(|r| !r.good).count();
        Summary {
            ell: self.ell,
            target: self.target,
            p_max: self.p_max,
            good: self.good_primes(),
            bad,
            incompatible: self.incompatible(),
        }
    }
}

/// Scan outcome without the per-prime records.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summary {
    pub ell: u32,
    pub target: StandardTarget,
    pub p_max: u64,
    pub good: usize,
    pub bad: usize,
    pub incompatible: Vec<u64>,
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list: Vec<String> = self.incompatible.iter().map(u64::to_string).collect();
        writeln!(f, "ell={}", self.ell)?;
        writeln!(f, "target={}", self.target)?;
        writeln!(f, "pmax={}", self.p_max)?;
        writeln!(f, "good={}", self.good)?;
        writeln!(f, "bad={}", self.bad)?;
        writeln!(f, "incompatible={}", list.join(" "))?;
        write!(
            f,
            "verdict={}",
            if self.incompatible.is_empty() {
                "consistent"
            } else {
                "inconsistent"
            }
        )
    }
}

impl Summary {
    /// Parses the `key=value` block written by `Display`.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut map = std::collections::HashMap::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Record(format!("bad summary line `{line}`")))?;
            map.insert(k.trim(), v.trim());
        }
        let get = |k: &str| {
            map.get(k)
                .copied()
                .ok_or_else(|| Error::Record(format!("missing `{k}`")))
        };
        let num = |k: &str| -> Result<u64, Error> {
            get(k)?
                .parse()
                .map_err(|_| Error::Record(format!("bad `{k}`")))
        };
        let incompatible = get("incompatible")?
            .split_whitespace()
            .map(|s| {
                s.parse()
                    .map_err(|_| Error::Record(format!("bad prime `{s}`")))
            })
            .collect::<Result<Vec<u64>, _>>()?;
        let s = Summary {
            ell: num("ell")? as u32,
            target: get("target")?.parse()?,
            p_max: num("pmax")?,
            good: num("good")? as usize,
            bad: num("bad")? as usize,
            incompatible,
        };
        let verdict = if s.incompatible.is_empty() {
            "consistent"
        } else {
            "inconsistent"
        };
        if get("verdict")? != verdict {
            return Err(Error::Record(
                "verdict disagrees with the incompatible list".into(),
            ));
        }
        Ok(s)
    }
}

/// Every prime up to `p_max`, with Frobenius tested against `t` at the good ones.
pub fn local_scan(
    e: &Curve,
    f: &PrimeField,
    t: StandardTarget,
    p_max: u64,
) -> Result<ScanReport, Error> {
    if !(50..=10_000_000).contains(&p_max) {
        return Err(Error::Precondition(format!(
            "pmax must lie in [50, 10^7], got {p_max}"
        )));
    }
    let primes: Vec<u64> = (2..=p_max).filter(|&p| is_prime(p)).collect();
    let records = primes
        .par_iter()
        .map(|&p| trace_of_frobenius(e, p, f))
        .collect();
    Ok(ScanReport {
        ell: f.ell(),
        target: t,
        p_max,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn parses_factored_rationals() {
        assert_eq!(
            q("2268945/128"),
            BigRational::new(2268945.into(), 128.into())
        );
        assert_eq!(
            q("-2^12*5^3*11*13^4/3^13"),
            -q("2^12") * q("125") * q("11") * q("28561") / q("1594323")
        );
        assert_eq!(q(" 3 "), q("3"));
        assert_eq!(q("--3"), q("3"));
        assert_eq!(q("2^4*5*13^4*17^3/3^13").numer().to_string(), "11225615440");
        for bad in ["", "2^", "3/0", "2+3", "x", "2**3"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn model_examples() {
        let e = curve_from_j(&q("0"));
        assert!(e.a.is_zero());
        let e = curve_from_j(&q("1728"));
        assert!(e.b.is_zero());
        let j = q("2268945/128");
        assert_eq!(curve_from_j(&j).j, j);
        let big = q("2^18*3^3*13^4*127^3*139^3*157^3*283^3*929/5^13/61^31");
        assert_eq!(curve_from_j(&big).j, big);
    }

    #[test]
    fn trace_examples() {
        // y^2 = x^3 + x over F_3: points (0,0), (2,1), (2,2) and infinity
        assert_eq!(naive_point_count(1, 0, 3), 4);
        assert_eq!(trace_by_character_sum(1, 0, 3), 0);
        assert_eq!(trace_by_character_sum(0, 1, 5), 0);
        assert_eq!(naive_point_count(0, 1, 5), 6);
    }

    #[test]
    fn character_sum_matches_naive_count() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let primes: Vec<u64> = (3..=100).filter(|&p| is_prime(p)).collect();
        for _ in 0..5 {
            let a: u64 = rng.gen_range(0..1000);
            let b: u64 = rng.gen_range(0..1000);
            for &p in &primes {
                let (ap, bp) = (a % p, b % p);
                if (4 * ap * ap % p * ap + 27 * bp * bp) % p == 0 {
                    continue;
                }
                let n = naive_point_count(ap, bp, p) as i64;
                assert_eq!(p as i64 + 1 - n, trace_by_character_sum(ap, bp, p));
            }
        }
    }

    #[test]
    fn compatibility_examples() {
        let f = PrimeField::of(13).unwrap();
        assert!(frobenius_compatible(
            13,
            5,
            &f,
            StandardTarget::SplitNormalizer
        ));
        assert!(frobenius_compatible(
            0,
            7,
            &f,
            StandardTarget::NonsplitNormalizer
        ));
        // D = 1 - 8 = -7 = 6, a nonsquare mod 13
        assert!(!frobenius_compatible(1, 2, &f, StandardTarget::SplitCartan));
        assert!(frobenius_compatible(
            1,
            2,
            &f,
            StandardTarget::NonsplitCartan
        ));
        // D = 4 - 4 * 14 = -52 = 0
        for t in StandardTarget::ALL {
            assert!(frobenius_compatible(2, 14, &f, t));
        }
        // p = 53 = 1 mod 13, ap = 5: D = 25 - 212 = -187 = 8, nonsquare; ap = 12: D = 144 - 212 = -68 = 10, square
        assert!(frobenius_compatible(
            12,
            53,
            &f,
            StandardTarget::SplitCartan
        ));
        assert!(!frobenius_compatible(
            5,
            53,
            &f,
            StandardTarget::SplitCartan
        ));
    }

    #[test]
    fn compatibility_is_twist_invariant() {
        let f = PrimeField::of(13).unwrap();
        let e = curve_from_j(&q("3"));
        let scan = local_scan(&e, &f, StandardTarget::SplitNormalizer, 2000).unwrap();
        for r in scan.records.iter().filter(|r| r.good) {
            let ap = r.ap.unwrap();
            for t in StandardTarget::ALL {
                assert_eq!(
                    frobenius_compatible(ap, r.p, &f, t),
                    frobenius_compatible(-ap, r.p, &f, t)
                );
            }
        }
    }

    #[test]
    fn bad_primes_are_skipped() {
        let f = PrimeField::of(7).unwrap();
        let e = curve_from_j(&q("2268945/128"));
        let scan = local_scan(&e, &f, StandardTarget::SplitCartan, 100).unwrap();
        let bad: Vec<u64> = scan
            .records
            .iter()
            .filter(|r| !r.good)
            .map(|r| r.p)
            .collect();
        assert!(bad.contains(&2) && bad.contains(&7));
        assert!(local_scan(&e, &f, StandardTarget::SplitCartan, 10).is_err());
    }

    #[test]
    fn summary_roundtrip() {
        let f = PrimeField::of(13).unwrap();
        let e = curve_from_j(&q("3"));
        let scan = local_scan(&e, &f, StandardTarget::SplitNormalizer, 200).unwrap();
        assert!(!scan.is_consistent());
        let s = scan.summary();
        assert_eq!(Summary::parse(&s.to_string()).unwrap(), s);
        assert_eq!(scan.record_lines().count(), scan.records.len());
    }
}
