//! Intersection lattices, Möbius values and Poincaré polynomials.
//!
//! The lattice `L(A)` is built level by level: every element of codimension
//! `k` is intersected with each hyperplane not containing it, and the
//! resulting subspaces are identified through the reduced row-echelon form of
//! the span of their defining forms.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::exponents::ExponentMultiset;
use crate::geometry::Arrangement;
use crate::linalg::EchelonBasis;

/// Fixed-size set of hyperplane indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(capacity: usize) -> Self {
        BitSet {
            words: vec![0; capacity.div_ceil(64)],
        }
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            (0..64).filter(move |b| w & (1 << b) != 0).map(move |b| k * 64 + b)
        })
    }
}

/// An element `X ∈ L(A)`.
#[derive(Clone, Debug)]
pub struct LatticeElement {
    /// RREF of the span of the forms vanishing on `X`; canonical key.
    pub defining_span: EchelonBasis,
    pub codim: usize,
    /// Indices (into the arrangement's form list) of the hyperplanes in `A_X`.
    pub members: BitSet,
    pub mobius: i64,
}

#[derive(Clone, Debug)]
pub struct IntersectionLattice {
    dim: usize,
    elements: Vec<LatticeElement>,
}

fn member_set(a: &Arrangement, span: &EchelonBasis) -> BitSet {
    let mut members = BitSet::new(a.len());
    for (i, f) in a.forms().iter().enumerate() {
        if span.contains(f.coeffs()) {
            members.insert(i);
        }
    }
    members
}

/// Flats covering `x` in the lattice, as (span, members) pairs.
fn covers(a: &Arrangement, x: &LatticeElement) -> Vec<(EchelonBasis, BitSet)> {
    let mut done = x.members.clone();
    let mut out = Vec::new();
    for (i, f) in a.forms().iter().enumerate() {
        if done.contains(i) {
            continue;
        }
        let mut span = x.defining_span.clone();
        span.insert(f.coeffs());
        let members = member_set(a, &span);
        for j in members.iter() {
            done.insert(j);
        }
        out.push((span, members));
    }
    out
}

/// Builds the complete intersection lattice, including `V` itself.
pub fn intersection_lattice(a: &Arrangement) -> IntersectionLattice {
    let top = LatticeElement {
        defining_span: EchelonBasis::new(a.dim(), a.order()),
        codim: 0,
        members: BitSet::new(a.len()),
        mobius: 1,
    };
    let mut elements = vec![top];
    let mut level_start = 0;
    loop {
        let level = &elements[level_start..];
        let found: Vec<Vec<(EchelonBasis, BitSet)>> = if level.len() > 8 {
            level.par_iter().map(|x| covers(a, x)).collect()
        } else {
            level.iter().map(|x| covers(a, x)).collect()
        };
        let codim = elements[level_start].codim + 1;
        let mut next: HashMap<EchelonBasis, BitSet> = HashMap::new();
        for (span, members) in found.into_iter().flatten() {
            next.entry(span).or_insert(members);
        }
        if next.is_empty() {
            break;
        }
        let mut next: Vec<LatticeElement> = next
            .into_iter()
            .map(|(defining_span, members)| LatticeElement {
                defining_span,
                codim,
                members,
                mobius: 0,
            })
            .collect();
        next.sort_by(|x, y| x.defining_span.cmp(&y.defining_span));
        level_start = elements.len();
        elements.extend(next);
    }
    compute_mobius(&mut elements);
    IntersectionLattice {
        dim: a.dim(),
        elements,
    }
}

/// `μ(V) = 1` and `μ(X) = −Σ_{V ≤ Y < X} μ(Y)`; elements must be sorted by
/// codimension.
fn compute_mobius(elements: &mut [LatticeElement]) {
    for k in 1..elements.len() {
        let (below, rest) = elements.split_at_mut(k);
        let x = &mut rest[0];
        let sum: i64 = below
            .iter()
            .filter(|y| y.codim < x.codim && y.members.is_subset(&x.members))
            .map(|y| y.mobius)
            .sum();
        x.mobius = -sum;
    }
}

impl IntersectionLattice {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements sorted by codimension, then by canonical key.
    pub fn elements(&self) -> &[LatticeElement] {
        &self.elements
    }

    pub fn rank(&self) -> usize {
        self.elements.last().map_or(0, |x| x.codim)
    }

    pub fn sizes_by_codim(&self) -> Vec<usize> {
        let mut out = vec![0; self.rank() + 1];
        for x in &self.elements {
            out[x.codim] += 1;
        }
        out
    }

    pub fn mobius_sums_by_codim(&self) -> Vec<i64> {
        let mut out = vec![0; self.rank() + 1];
        for x in &self.elements {
            out[x.codim] += x.mobius;
        }
        out
    }

    /// `π(A, t) = Σ_X μ(X)·(−t)^{codim X}`.
    pub fn poincare_polynomial(&self) -> IntegerPolynomial {
        let coeffs = self
            .mobius_sums_by_codim()
            .into_iter()
            .enumerate()
            .map(|(k, s)| {
                let v = BigInt::from(s);
                if k % 2 == 0 {
                    v
                } else {
                    -v
                }
            })
            .collect();
        IntegerPolynomial::new(coeffs)
    }
}

pub fn poincare_polynomial(a: &Arrangement) -> IntegerPolynomial {
    intersection_lattice(a).poincare_polynomial()
}

/// Integer polynomial with ascending coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct IntegerPolynomial {
    #[serde(serialize_with = "serialize_bigints")]
    coeffs: Vec<BigInt>,
}

fn serialize_bigints<S: serde::Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|c| c.to_string()))
}

impl IntegerPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntegerPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `∏ (1 + b·t)` over the given exponents.
    pub fn from_exponents(exps: &ExponentMultiset) -> Self {
        let mut coeffs = vec![BigInt::one()];
        for &b in exps.values() {
            let b = BigInt::from(b);
            let mut next = vec![BigInt::zero(); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i] += c;
                next[i + 1] += c * &b;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    /// Quotient by `1 + b·t`, if the division is exact.
    fn divide_linear(&self, b: &BigInt) -> Option<Self> {
        let n = self.coeffs.len();
        if n < 2 {
            return None;
        }
        let mut q = vec![BigInt::zero(); n - 1];
        let mut carry = BigInt::zero();
        for (qi, c) in q.iter_mut().zip(&self.coeffs) {
            *qi = c - b * &carry;
            carry = qi.clone();
        }
        (self.coeffs[n - 1] == b * &carry).then(|| Self::new(q))
    }
}

fn superscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).expect("digit") as usize])
        .collect()
}

/// `1 + 9t + 24t² + 16t³`
impl fmt::Display for IntegerPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}")?;
                    }
                    f.write_str("t")?;
                    if k > 1 {
                        f.write_str(&superscript(k))?;
                    }
                }
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for IntegerPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntegerPolynomial({self})")
    }
}

/// Renders `∏ (1 + b·t)` compactly, e.g. `(1+t)(1+4t)²`; zero exponents
/// contribute nothing and an empty product prints as `1`.
pub fn format_factorization(exps: &ExponentMultiset) -> String {
    let mut out = String::new();
    let values = exps.values();
    let mut i = 0;
    while i < values.len() {
        let b = values[i];
        let mut j = i;
        while j < values.len() && values[j] == b {
            j += 1;
        }
        if b > 0 {
            if b == 1 {
                out.push_str("(1+t)");
            } else {
                out.push_str(&format!("(1+{b}t)"));
            }
            if j - i > 1 {
                out.push_str(&superscript(j - i));
            }
        }
        i = j;
    }
    if out.is_empty() {
        out.push('1');
    }
    out
}

fn positive_divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if let Some(small) = n.to_u64() {
        let mut out = Vec::new();
        let mut d = 1u64;
        while d * d <= small {
            if small % d == 0 {
                out.push(d);
                if d * d != small {
                    out.push(small / d);
                }
            }
            d += 1;
        }
        out.sort_unstable();
        return out.into_iter().map(BigInt::from).collect();
    }
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if n.is_multiple_of(&d) {
            out.push(d.clone());
            let other = &n / &d;
            if other != d {
                out.push(other);
            }
        }
        d += 1;
    }
    out.sort();
    out
}

/// The multiset `{b_1, …, b_dim}` of nonnegative integers with
/// `p = ∏ (1 + b_i t)`, padded with zeros up to `dim`; `None` if `p` does not
/// split that way.
pub fn exponents_from_factorization(p: &IntegerPolynomial, dim: usize) -> Option<ExponentMultiset> {
    if p.coeff(0) != BigInt::one() {
        return None;
    }
    let deg = p.degree()?;
    if deg > dim {
        return None;
    }
    let lead = p.coeffs[deg].clone();
    if lead.is_negative() {
        return None;
    }
    let candidates = positive_divisors(&lead);
    let mut rest = p.clone();
    let mut found = Vec::with_capacity(dim);
    'outer: while rest.degree() > Some(0) {
        for b in &candidates {
            if let Some(q) = rest.divide_linear(b) {
                found.push(b.to_u64()?);
                rest = q;
                continue 'outer;
            }
        }
        return None;
    }
    found.resize(dim, 0);
    Some(ExponentMultiset::new(found))
}
