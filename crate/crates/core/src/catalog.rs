//! Named arrangements: braid and monomial reflection arrangements, the three
//! arrangements with published induction tables, exponent formulas, and the
//! inductive-freeness classification of reflection arrangements.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use thiserror::Error;

use crate::exactnum::CycNum;
use crate::exponents::ExponentMultiset;
use crate::format::TableFile;
use crate::freeness::{InductionCertificate, InductionStep};
use crate::geometry::{Arrangement, LinearForm};

const IF_NOT_HIF: &str = include_str!("../../../tables/if_not_hif.tbl");
const G26: &str = include_str!("../../../tables/g26.tbl");
const G32: &str = include_str!("../../../tables/g32.tbl");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown catalog name '{0}'")]
    UnknownName(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("no hyperplane data for {0}")]
    NoHyperplaneData(String),
    #[error("no exponent formula for {0}")]
    Uncovered(String),
}

fn coordinate_difference(dim: usize, order: u32, i: usize, j: usize, m: u32) -> Vec<CycNum> {
    let mut v = vec![CycNum::zero(order); dim];
    v[i] = CycNum::one(order);
    v[j] = -CycNum::zeta_pow(m as i64, order);
    v
}

/// `A_{ℓ−1}`: the forms `x_i − x_j`, `i < j`, in `C^ℓ`.
pub fn braid(l: usize) -> Arrangement {
    monomial_rr(1, l)
}

/// `A_ℓ(r)`: the forms `x_i` and `x_i − ζ^m x_j` (`i < j`, `0 ≤ m < r`)
/// over `Q(ζ_r)`.
pub fn monomial_full(r: u32, l: usize) -> Arrangement {
    let coords = (0..l).map(|i| LinearForm::coordinate(i, l, r).coeffs().to_vec());
    let rr = monomial_rr(r, l);
    Arrangement::from_forms(l, r, coords.chain(rr.forms().iter().map(|f| f.coeffs().to_vec())))
        .expect("valid forms")
}

/// The reflection arrangement of `G(r,r,ℓ)`: `x_i − ζ^m x_j`.
pub fn monomial_rr(r: u32, l: usize) -> Arrangement {
    let mut raw = Vec::new();
    for i in 0..l {
        for j in i + 1..l {
            for m in 0..r {
                raw.push(coordinate_difference(l, r, i, j, m));
            }
        }
    }
    Arrangement::from_forms(l, r, raw).expect("valid forms")
}

/// `{1, r+1, 2r+1, …, (ℓ−1)r+1}`.
pub fn monomial_full_exponents(r: u32, l: usize) -> ExponentMultiset {
    ExponentMultiset::new((0..l as u64).map(|i| i * r as u64 + 1).collect())
}

/// `{1, r+1, …, (ℓ−2)r+1, (ℓ−1)(r−1)}`, for `ℓ ≥ 2`.
pub fn monomial_rr_exponents(r: u32, l: usize) -> ExponentMultiset {
    let (r, l) = (r as u64, l as u64);
    let mut v: Vec<u64> = (0..l - 1).map(|i| i * r + 1).collect();
    v.push((l - 1) * (r - 1));
    ExponentMultiset::new(v)
}

/// Exponents of a restriction of the `G(r,r,ℓ)` arrangement onto one of its
/// hyperplanes: `{1, r+1, …, (ℓ−3)r+1, (ℓ−2)(r−1)+1}`, for `ℓ ≥ 3`.
pub fn monomial_rr_restriction_exponents(r: u32, l: usize) -> ExponentMultiset {
    let (r, l) = (r as u64, l as u64);
    let mut v: Vec<u64> = (0..l - 2).map(|i| i * r + 1).collect();
    v.push((l - 2) * (r - 1) + 1);
    ExponentMultiset::new(v)
}

/// The arrangements whose induction tables ship with the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedTable {
    /// A 4-arrangement of ten real hyperplanes which is inductively free but
    /// not hereditarily so.
    IfNotHif,
    G26,
    G32,
}

impl NamedTable {
    pub const ALL: [NamedTable; 3] = [NamedTable::IfNotHif, NamedTable::G26, NamedTable::G32];

    pub fn name(self) -> &'static str {
        match self {
            NamedTable::IfNotHif => "if-not-hif",
            NamedTable::G26 => "g26",
            NamedTable::G32 => "g32",
        }
    }

    /// The table file text.
    pub fn source(self) -> &'static str {
        match self {
            NamedTable::IfNotHif => IF_NOT_HIF,
            NamedTable::G26 => G26,
            NamedTable::G32 => G32,
        }
    }
}

impl FromStr for NamedTable {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NamedTable::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| CatalogError::UnknownName(s.to_string()))
    }
}

fn parsed_table(t: NamedTable) -> TableFile {
    TableFile::parse(t.source(), None).expect("embedded tables parse")
}

pub fn table_arrangement(t: NamedTable) -> Arrangement {
    table_certificate(t).arrangement()
}

pub fn table_certificate(t: NamedTable) -> InductionCertificate {
    parsed_table(t).certificate()
}

/// The full table file for `t`, including its `exp A'` column.
pub fn table_file(t: NamedTable) -> TableFile {
    parsed_table(t)
}

/// Induction table for `A_ℓ(r)`, built recursively: a table for
/// `A_{ℓ−1}(r) × Φ_1`, then `x_ℓ`, then `x_i − ζ^m x_ℓ` ascending in `i`
/// and `m`. Every restriction along the last `(ℓ−1)r + 1` rows is
/// `A_{ℓ−1}(r)` itself; nested tables are attached from `ℓ = 4` on.
pub fn monomial_certificate(r: u32, l: usize) -> InductionCertificate {
    if l == 0 {
        return InductionCertificate::empty(0, r);
    }
    let prev = monomial_certificate(r, l - 1);
    let prev_exps = prev.final_exponents.clone();
    let mut cert = prev.padded(1);
    let nested = (l - 1 > 2).then(|| Box::new(prev.clone()));
    let last = l - 1;
    let mut push = |raw: Vec<CycNum>| {
        cert.steps.push(InductionStep {
            form: LinearForm::normalize(raw).expect("nonzero"),
            restriction_exponents: prev_exps.clone(),
            restriction: nested.clone(),
        });
    };
    push(LinearForm::coordinate(last, l, r).coeffs().to_vec());
    for i in 0..last {
        for m in 0..r {
            push(coordinate_difference(l, r, i, last, m));
        }
    }
    cert.final_exponents = monomial_full_exponents(r, l);
    cert
}

/// An irreducible complex reflection group, or a product of them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupDescriptor {
    /// `Z_r` acting on `C`.
    Cyclic(u32),
    /// `S_ℓ` permuting coordinates of `C^ℓ`.
    Symmetric(usize),
    /// `G(r,p,ℓ)`.
    Monomial { r: u32, p: u32, l: usize },
    /// Shephard–Todd number 4 to 37.
    Exceptional(u32),
    Product(Vec<GroupDescriptor>),
}

/// Rank of the exceptional group `G_k`.
pub fn exceptional_rank(k: u32) -> Option<usize> {
    Some(match k {
        4..=22 => 2,
        23..=27 => 3,
        28..=32 => 4,
        33 => 5,
        34 | 35 => 6,
        36 => 7,
        37 => 8,
        _ => return None,
    })
}

/// Known data for an exceptional reflection arrangement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExceptionalData {
    pub number: u32,
    pub hyperplanes: usize,
    pub exponents: ExponentMultiset,
    /// Size of the restriction onto a hyperplane, where recorded.
    pub restriction_size: Option<usize>,
    /// True if the crate carries the hyperplanes themselves.
    pub has_forms: bool,
}

pub fn exceptional_data(k: u32) -> Option<ExceptionalData> {
    Some(match k {
        26 => ExceptionalData {
            number: 26,
            hyperplanes: 21,
            exponents: [1, 7, 13].into(),
            restriction_size: None,
            has_forms: true,
        },
        31 => ExceptionalData {
            number: 31,
            hyperplanes: 60,
            exponents: [1, 13, 17, 29].into(),
            restriction_size: Some(31),
            has_forms: false,
        },
        32 => ExceptionalData {
            number: 32,
            hyperplanes: 40,
            exponents: [1, 7, 13, 19].into(),
            restriction_size: None,
            has_forms: true,
        },
        _ => return None,
    })
}

impl GroupDescriptor {
    fn validate(self) -> Result<Self, CatalogError> {
        let bad = |m: String| Err(CatalogError::InvalidParameters(m));
        match &self {
            GroupDescriptor::Cyclic(r) if *r < 2 => return bad(format!("Z{r} has no reflections")),
            GroupDescriptor::Symmetric(0) => return bad("S0".into()),
            GroupDescriptor::Monomial { r, p, l } => {
                if *r == 0 || *p == 0 || *l == 0 || r % p != 0 {
                    return bad(format!("G({r},{p},{l}) needs r, p, ℓ ≥ 1 with p | r"));
                }
            }
            GroupDescriptor::Exceptional(k) if exceptional_rank(*k).is_none() => {
                return bad(format!("no exceptional group G{k}"))
            }
            GroupDescriptor::Product(fs) if fs.is_empty() => return bad("empty product".into()),
            _ => {}
        }
        Ok(self)
    }

    pub fn rank(&self) -> usize {
        match self {
            GroupDescriptor::Cyclic(_) => 1,
            GroupDescriptor::Symmetric(l) => l - 1,
            GroupDescriptor::Monomial { r: 1, l, .. } => l - 1,
            GroupDescriptor::Monomial { l, .. } => *l,
            GroupDescriptor::Exceptional(k) => exceptional_rank(*k).unwrap_or(0),
            GroupDescriptor::Product(fs) => fs.iter().map(Self::rank).sum(),
        }
    }

    /// The factors, with nested products flattened.
    pub fn factors(&self) -> Vec<&GroupDescriptor> {
        match self {
            GroupDescriptor::Product(fs) => fs.iter().flat_map(|f| f.factors()).collect(),
            other => vec![other],
        }
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupDescriptor::Cyclic(r) => write!(f, "Z{r}"),
            GroupDescriptor::Symmetric(l) => write!(f, "S{l}"),
            GroupDescriptor::Monomial { r, p, l } => write!(f, "G({r},{p},{l})"),
            GroupDescriptor::Exceptional(k) => write!(f, "G{k}"),
            GroupDescriptor::Product(fs) => {
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" × ")?;
                    }
                    write!(f, "{g}")?;
                }
                Ok(())
            }
        }
    }
}

fn parse_numbers(s: &str, whole: &str) -> Result<Vec<u32>, CatalogError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<u32>()
                .map_err(|_| CatalogError::UnknownName(whole.to_string()))
        })
        .collect()
}

fn parse_factor(s: &str) -> Result<GroupDescriptor, CatalogError> {
    use GroupDescriptor::*;
    let unknown = || CatalogError::UnknownName(s.to_string());
    let t = s.trim();
    if let Some((kind, args)) = t.split_once(':') {
        let n = parse_numbers(args, s)?;
        let d = match (kind.to_ascii_lowercase().as_str(), n.as_slice()) {
            ("braid" | "sym", [l]) => Symmetric(*l as usize),
            ("full", [r, l]) => Monomial { r: *r, p: 1, l: *l as usize },
            ("rr", [r, l]) => Monomial { r: *r, p: *r, l: *l as usize },
            ("cyclic", [r]) => Cyclic(*r),
            ("g", [r, p, l]) => Monomial { r: *r, p: *p, l: *l as usize },
            _ => return Err(unknown()),
        };
        return d.validate();
    }
    if let Some(inner) = t
        .strip_prefix("G(")
        .or_else(|| t.strip_prefix("g("))
        .and_then(|x| x.strip_suffix(')'))
    {
        let [r, p, l] = parse_numbers(inner, s)?[..] else {
            return Err(unknown());
        };
        return Monomial { r, p, l: l as usize }.validate();
    }
    if let Some(inner) = t.strip_prefix("I2(").and_then(|x| x.strip_suffix(')')) {
        let [m] = parse_numbers(inner, s)?[..] else {
            return Err(unknown());
        };
        return Monomial { r: m, p: m, l: 2 }.validate();
    }
    let split = t.find(|c: char| c.is_ascii_digit()).ok_or_else(unknown)?;
    let (head, digits) = t.split_at(split);
    let n: u32 = digits.parse().map_err(|_| unknown())?;
    let d = match head {
        "G" | "g" => Exceptional(n),
        "S" => Symmetric(n as usize),
        "Z" => Cyclic(n),
        "A" => Symmetric(n as usize + 1),
        "B" | "C" => Monomial { r: 2, p: 1, l: n as usize },
        "D" => Monomial { r: 2, p: 2, l: n as usize },
        "H" if n == 3 => Exceptional(23),
        "H" if n == 4 => Exceptional(30),
        "F" if n == 4 => Exceptional(28),
        "E" if (6..=8).contains(&n) => Exceptional(29 + n),
        _ => return Err(unknown()),
    };
    d.validate()
}

/// Accepts `braid:ℓ`, `sym:ℓ`, `full:r,ℓ`, `rr:r,ℓ`, `cyclic:r`, `G(r,p,ℓ)`,
/// `Gk`, Coxeter names (`A3`, `B4`, `D4`, `E6`, `F4`, `H3`, `I2(m)`, …) and
/// products joined by `*`, `×` or ` x `.
impl FromStr for GroupDescriptor {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s
            .split(['*', '×'])
            .flat_map(|p| p.split(" x "))
            .map(str::trim)
            .collect();
        if parts.iter().any(|p| p.is_empty()) {
            return Err(CatalogError::UnknownName(s.to_string()));
        }
        if parts.len() == 1 {
            return parse_factor(parts[0]);
        }
        parts
            .into_iter()
            .map(parse_factor)
            .collect::<Result<Vec<_>, _>>()
            .map(GroupDescriptor::Product)
    }
}

/// Closed-form exponents of the reflection arrangement of `g`, in its
/// natural ambient space.
pub fn exponents_formula(g: &GroupDescriptor) -> Result<ExponentMultiset, CatalogError> {
    match g {
        GroupDescriptor::Cyclic(_) => Ok([1].into()),
        GroupDescriptor::Symmetric(l) => Ok(monomial_rr_exponents(1, *l)),
        GroupDescriptor::Monomial { r, p, l } if p == r => {
            if *l == 1 {
                Ok(ExponentMultiset::zeros(1))
            } else {
                Ok(monomial_rr_exponents(*r, *l))
            }
        }
        GroupDescriptor::Monomial { r, l, .. } => Ok(monomial_full_exponents(*r, *l)),
        GroupDescriptor::Exceptional(k) => exceptional_data(*k)
            .map(|d| d.exponents)
            .ok_or_else(|| CatalogError::Uncovered(g.to_string())),
        GroupDescriptor::Product(fs) => fs
            .iter()
            .map(exponents_formula)
            .try_fold(ExponentMultiset::default(), |acc, e| Ok(acc.union(&e?))),
    }
}

/// The reflection arrangement of `g`. Products are taken over the least
/// common multiple of the factors' orders.
pub fn arrangement_for(g: &GroupDescriptor) -> Result<Arrangement, CatalogError> {
    match g {
        GroupDescriptor::Cyclic(r) => Ok(monomial_full(*r, 1)),
        GroupDescriptor::Symmetric(l) => Ok(braid(*l)),
        GroupDescriptor::Monomial { r, p, l } if p == r => Ok(monomial_rr(*r, *l)),
        GroupDescriptor::Monomial { r, l, .. } => Ok(monomial_full(*r, *l)),
        GroupDescriptor::Exceptional(26) => Ok(table_arrangement(NamedTable::G26)),
        GroupDescriptor::Exceptional(32) => Ok(table_arrangement(NamedTable::G32)),
        GroupDescriptor::Exceptional(_) => Err(CatalogError::NoHyperplaneData(g.to_string())),
        GroupDescriptor::Product(fs) => {
            let parts = fs.iter().map(arrangement_for).collect::<Result<Vec<_>, _>>()?;
            let order = parts.iter().fold(1u32, |acc, a| acc.lcm(&a.order()));
            let mut out = Arrangement::empty(0, order);
            for a in parts {
                out = out
                    .product(&a.lift_order(order).expect("order divides lcm"))
                    .expect("same order");
            }
            Ok(out)
        }
    }
}

/// Resolves a catalog identifier (`braid:4`, `full:3,2`, `rr:3,3`,
/// `table:if-not-hif`, `table:g26`, `table:g32`, or any group descriptor with
/// hyperplane data) to an arrangement.
pub fn resolve(id: &str) -> Result<Arrangement, CatalogError> {
    if let Some(name) = id.strip_prefix("table:") {
        return Ok(table_arrangement(name.parse()?));
    }
    arrangement_for(&id.parse()?)
}

const NOT_IF_EXCEPTIONAL: [u32; 6] = [24, 27, 29, 31, 33, 34];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorClass {
    pub factor: GroupDescriptor,
    pub inductively_free: bool,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub inductively_free: bool,
    pub factors: Vec<FactorClass>,
}

impl Classification {
    /// Reason of the first factor that is not inductively free, or of the
    /// whole group if every factor is.
    pub fn reason(&self) -> String {
        match self.factors.iter().find(|f| !f.inductively_free) {
            Some(f) => f.reason.clone(),
            None if self.factors.len() == 1 => self.factors[0].reason.clone(),
            None => "every irreducible factor is inductively free".into(),
        }
    }
}

fn classify_factor(g: &GroupDescriptor) -> FactorClass {
    let (free, reason): (bool, String) = match g {
        GroupDescriptor::Cyclic(_) => (true, "rank 1".into()),
        GroupDescriptor::Symmetric(_) | GroupDescriptor::Monomial { r: 1, .. } => {
            (true, "symmetric group".into())
        }
        GroupDescriptor::Monomial { r, p, l } if p == r && *r >= 3 && *l >= 3 => {
            (false, "G(r,r,ℓ), r,ℓ ≥ 3".into())
        }
        GroupDescriptor::Monomial { r, p, .. } if p != r => (true, "G(r,p,ℓ), p ≠ r".into()),
        GroupDescriptor::Monomial { r: 2, .. } => (true, "Coxeter group of type D".into()),
        GroupDescriptor::Monomial { .. } => (true, "G(r,r,ℓ) with ℓ ≤ 2".into()),
        GroupDescriptor::Exceptional(k) if NOT_IF_EXCEPTIONAL.contains(k) => {
            (false, format!("exceptional group G{k}"))
        }
        GroupDescriptor::Exceptional(k) if exceptional_rank(*k) == Some(2) => {
            (true, "rank 2".into())
        }
        GroupDescriptor::Exceptional(k) => (true, format!("exceptional group G{k}")),
        GroupDescriptor::Product(_) => unreachable!("factors are flattened"),
    };
    FactorClass {
        factor: g.clone(),
        inductively_free: free,
        reason,
    }
}

/// Whether the reflection arrangement of `g` is inductively free. A product
/// is inductively free exactly when every factor is.
pub fn classify(g: &GroupDescriptor) -> Classification {
    let factors: Vec<FactorClass> = g.factors().into_iter().map(classify_factor).collect();
    Classification {
        inductively_free: factors.iter().all(|f| f.inductively_free),
        factors,
    }
}

pub fn classification_is_if(g: &GroupDescriptor) -> bool {
    classify(g).inductively_free
}
