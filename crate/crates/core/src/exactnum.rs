//! Exact arithmetic over `Q` and the cyclotomic fields `Q(ζ_n)`.
//!
//! Elements of `Q(ζ_n)` are stored as coefficient vectors of length `φ(n)`
//! in the power basis `1, ζ, …, ζ^{φ(n)-1}`, i.e. as the unique residue of a
//! rational polynomial modulo the cyclotomic polynomial `Φ_n`. Because the
//! representation is canonical, equality, ordering and hashing are
//! structural.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational number, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumError {
    #[error("cyclotomic order must be positive")]
    ZeroOrder,
    #[error("cyclotomic order mismatch: {left} vs {right}")]
    OrderMismatch { left: u32, right: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot lift order {from} to order {to}: {from} does not divide {to}")]
    NotADivisor { from: u32, to: u32 },
}

type PolyCache = RwLock<HashMap<u32, Arc<Vec<Rational>>>>;

fn poly_cache() -> &'static PolyCache {
    static CACHE: OnceLock<PolyCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The `n`-th cyclotomic polynomial as ascending integer coefficients
/// (stored as rationals), computed as `(x^n - 1) / ∏_{d | n, d < n} Φ_d`.
pub fn cyclotomic_polynomial(n: u32) -> Result<Arc<Vec<Rational>>, NumError> {
    if n == 0 {
        return Err(NumError::ZeroOrder);
    }
    if let Some(p) = poly_cache().read().expect("cache poisoned").get(&n) {
        return Ok(p.clone());
    }
    let mut num = vec![Rational::zero(); n as usize + 1];
    num[0] = -Rational::one();
    num[n as usize] = Rational::one();
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        let divisor = cyclotomic_polynomial(d)?;
        let (q, r) = poly_divrem(&num, &divisor);
        debug_assert!(r.is_empty());
        num = q;
    }
    let poly = Arc::new(num);
    poly_cache()
        .write()
        .expect("cache poisoned")
        .insert(n, poly.clone());
    Ok(poly)
}

/// Degree of `Φ_n`, i.e. Euler's totient `φ(n)`.
pub fn cyclotomic_degree(n: u32) -> Result<usize, NumError> {
    Ok(cyclotomic_polynomial(n)?.len() - 1)
}

fn poly_trim(p: &mut Vec<Rational>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

/// Quotient and remainder over `Q[x]`; `divisor` must be nonzero.
fn poly_divrem(num: &[Rational], divisor: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut rem = num.to_vec();
    poly_trim(&mut rem);
    let mut div = divisor.to_vec();
    poly_trim(&mut div);
    let dd = div.len() - 1;
    let lead = div[dd].clone();
    if rem.len() < div.len() {
        return (Vec::new(), rem);
    }
    let mut quot = vec![Rational::zero(); rem.len() - dd];
    while rem.len() > dd && !rem.is_empty() {
        let k = rem.len() - 1 - dd;
        let c = &rem[rem.len() - 1] / &lead;
        for (i, d) in div.iter().enumerate() {
            if !d.is_zero() {
                rem[k + i] -= &c * d;
            }
        }
        quot[k] = c;
        poly_trim(&mut rem);
    }
    poly_trim(&mut quot);
    (quot, rem)
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    poly_trim(&mut out);
    out
}

/// An element of `Q(ζ_n)` in canonical reduced form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycNum {
    order: u32,
    coeffs: Vec<Rational>,
}

/// Reduces the polynomial `Σ poly_coeffs[k] x^k` modulo `Φ_n`, giving an
/// element of `Q(ζ_n)`.
pub fn reduce_mod_cyclotomic(poly_coeffs: &[Rational], n: u32) -> Result<CycNum, NumError> {
    let phi = cyclotomic_polynomial(n)?;
    let deg = phi.len() - 1;
    let mut work = poly_coeffs.to_vec();
    // Φ_n is monic, so the leading term can be cancelled directly.
    while work.len() > deg {
        let top = work.pop().expect("nonempty");
        if top.is_zero() {
            continue;
        }
        let shift = work.len() - deg;
        for (i, c) in phi[..deg].iter().enumerate() {
            if !c.is_zero() {
                work[shift + i] -= &top * c;
            }
        }
    }
    work.resize(deg, Rational::zero());
    Ok(CycNum {
        order: n,
        coeffs: work,
    })
}

impl CycNum {
    pub fn zero(order: u32) -> Self {
        let deg = cyclotomic_degree(order).expect("positive order");
        CycNum {
            order,
            coeffs: vec![Rational::zero(); deg],
        }
    }

    pub fn one(order: u32) -> Self {
        Self::from_rational(Rational::one(), order)
    }

    /// Embeds a rational number.
    pub fn from_rational(q: Rational, order: u32) -> Self {
        let mut out = Self::zero(order);
        out.coeffs[0] = q;
        out
    }

    pub fn from_integer(k: i64, order: u32) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(k)), order)
    }

    /// `ζ_n^k`, for any integer `k`.
    pub fn zeta_pow(k: i64, order: u32) -> Self {
        let e = k.rem_euclid(order as i64) as usize;
        let mut poly = vec![Rational::zero(); e + 1];
        poly[e] = Rational::one();
        reduce_mod_cyclotomic(&poly, order).expect("positive order")
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Canonical coefficients in the power basis, length `φ(order)`.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The rational value, if this element lies in `Q`.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn check_order(&self, other: &Self) -> Result<(), NumError> {
        if self.order == other.order {
            Ok(())
        } else {
            Err(NumError::OrderMismatch {
                left: self.order,
                right: other.order,
            })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, NumError> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CycNum {
            order: self.order,
            coeffs,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, NumError> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(CycNum {
            order: self.order,
            coeffs,
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, NumError> {
        self.check_order(other)?;
        if let Some(q) = self.as_rational() {
            return Ok(other.scale(q));
        }
        if let Some(q) = other.as_rational() {
            return Ok(self.scale(q));
        }
        reduce_mod_cyclotomic(&poly_mul(&self.coeffs, &other.coeffs), self.order)
    }

    /// Multiplies by a rational scalar.
    pub fn scale(&self, q: &Rational) -> Self {
        CycNum {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// Multiplicative inverse, via the extended Euclidean algorithm against `Φ_n`.
    pub fn inv(&self) -> Result<Self, NumError> {
        if self.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(Self::from_rational(q.recip(), self.order));
        }
        let phi = cyclotomic_polynomial(self.order)?;
        let mut a = self.coeffs.clone();
        poly_trim(&mut a);
        // Invariant: r_i ≡ s_i · a (mod Φ_n).
        let (mut r0, mut r1) = (phi.to_vec(), a);
        let (mut s0, mut s1) = (Vec::<Rational>::new(), vec![Rational::one()]);
        while !r1.is_empty() {
            let (q, r) = poly_divrem(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // Φ_n is irreducible, so the gcd r0 is a nonzero constant.
        debug_assert_eq!(r0.len(), 1);
        let c = r0[0].recip();
        let scaled: Vec<Rational> = s0.iter().map(|x| x * &c).collect();
        reduce_mod_cyclotomic(&scaled, self.order)
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, NumError> {
        self.checked_mul(&other.inv()?)
    }

    /// Re-expresses this element in `Q(ζ_m)` where `order | m`, using
    /// `ζ_n = ζ_m^{m/n}`.
    pub fn lift(&self, new_order: u32) -> Result<Self, NumError> {
        if new_order == 0 {
            return Err(NumError::ZeroOrder);
        }
        if !new_order.is_multiple_of(self.order) {
            return Err(NumError::NotADivisor {
                from: self.order,
                to: new_order,
            });
        }
        let step = (new_order / self.order) as usize;
        let mut poly = vec![Rational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            poly[k * step] = c.clone();
        }
        reduce_mod_cyclotomic(&poly, new_order)
    }
}

impl Add for &CycNum {
    type Output = CycNum;
    fn add(self, rhs: &CycNum) -> CycNum {
        self.checked_add(rhs).expect("mixed cyclotomic orders")
    }
}

impl Sub for &CycNum {
    type Output = CycNum;
    fn sub(self, rhs: &CycNum) -> CycNum {
        self.checked_sub(rhs).expect("mixed cyclotomic orders")
    }
}

impl Mul for &CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &CycNum) -> CycNum {
        self.checked_mul(rhs).expect("mixed cyclotomic orders")
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        -&self
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, q: &Rational) -> fmt::Result {
    if q.is_integer() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

/// Formats in the coefficient grammar: `z` stands for `ζ_n`, e.g. `-1 - z`
/// or `1/2 + 3*z^2`.
impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let magnitude = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            first = false;
            if k == 0 {
                write_rational(f, &magnitude)?;
                continue;
            }
            if !magnitude.is_one() {
                write_rational(f, &magnitude)?;
                f.write_str("*")?;
            }
            if k == 1 {
                f.write_str("z")?;
            } else {
                write!(f, "z^{k}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNum<{}>({})", self.order, self)
    }
}
