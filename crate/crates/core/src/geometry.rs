//! Linear forms, central arrangements and the elementary constructions on
//! them: deletion, restriction, triples, products and localization.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exactnum::{CycNum, NumError};
use crate::linalg::EchelonBasis;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("linear form is identically zero")]
    ZeroForm,
    #[error("form has {found} coefficients, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("hyperplane {0} is not in the arrangement")]
    NotMember(String),
    #[error("hyperplane {0} is already in the arrangement")]
    AlreadyMember(String),
    #[error("subspace is not an intersection of hyperplanes of the arrangement")]
    NotInLattice,
    #[error(transparent)]
    Num(#[from] NumError),
}

/// A nonzero linear form scaled so that its first nonzero coefficient is 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearForm {
    coeffs: Vec<CycNum>,
}

impl LinearForm {
    /// Scales `raw` by the inverse of its first nonzero entry.
    pub fn normalize(raw: Vec<CycNum>) -> Result<Self, GeometryError> {
        let p = raw
            .iter()
            .position(|c| !c.is_zero())
            .ok_or(GeometryError::ZeroForm)?;
        if raw[p].is_one() {
            return Ok(LinearForm { coeffs: raw });
        }
        let inv = raw[p].inv()?;
        let coeffs = raw
            .iter()
            .map(|c| c.checked_mul(&inv))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LinearForm { coeffs })
    }

    /// The coordinate form `x_{index+1}` in dimension `dim`.
    pub fn coordinate(index: usize, dim: usize, order: u32) -> Self {
        let mut coeffs = vec![CycNum::zero(order); dim];
        coeffs[index] = CycNum::one(order);
        LinearForm { coeffs }
    }

    pub fn coeffs(&self) -> &[CycNum] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn order(&self) -> u32 {
        self.coeffs[0].order()
    }

    /// Index of the first nonzero coefficient (which equals 1).
    pub fn pivot(&self) -> usize {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .expect("normalized forms are nonzero")
    }

    fn padded(&self, left: usize, right: usize) -> Self {
        let order = self.order();
        let mut coeffs = vec![CycNum::zero(order); left];
        coeffs.extend(self.coeffs.iter().cloned());
        coeffs.extend(std::iter::repeat_n(CycNum::zero(order), right));
        LinearForm { coeffs }
    }

    fn lift(&self, order: u32) -> Result<Self, GeometryError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.lift(order))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LinearForm { coeffs })
    }
}

fn single_term(c: &CycNum) -> Option<(bool, String)> {
    let nonzero: Vec<usize> = (0..c.coeffs().len())
        .filter(|&k| !c.coeffs()[k].is_zero())
        .collect();
    if nonzero.len() != 1 {
        return None;
    }
    let negative = c.coeffs()[nonzero[0]].is_negative();
    let magnitude = if negative { -c.clone() } else { c.clone() };
    Some((negative, magnitude.to_string()))
}

/// Writes the form as a linear expression in `x1 … xℓ`, e.g. `x1 - z*x3`.
impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (negative, body) = match single_term(c) {
                Some((neg, body)) if body == "1" => (neg, String::new()),
                Some((neg, body)) => (neg, format!("{body}*")),
                None => (false, format!("({c})*")),
            };
            match (first, negative) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            write!(f, "{body}x{}", i + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearForm({self})")
    }
}

impl Serialize for LinearForm {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            seq.serialize_element(&c.to_string())?;
        }
        seq.end()
    }
}

/// A central arrangement in `C^dim` whose forms live over `Q(ζ_order)`.
///
/// Forms are kept normalized, distinct and sorted, so two arrangements are
/// equal exactly when they consist of the same hyperplanes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arrangement {
    dim: usize,
    order: u32,
    forms: Vec<LinearForm>,
}

impl Arrangement {
    /// The empty arrangement `Φ_dim`.
    pub fn empty(dim: usize, order: u32) -> Self {
        Arrangement {
            dim,
            order,
            forms: Vec::new(),
        }
    }

    /// Normalizes and deduplicates raw coefficient vectors.
    pub fn from_forms(
        dim: usize,
        order: u32,
        raw_forms: impl IntoIterator<Item = Vec<CycNum>>,
    ) -> Result<Self, GeometryError> {
        let mut forms = Vec::new();
        for raw in raw_forms {
            if raw.len() != dim {
                return Err(GeometryError::LengthMismatch {
                    expected: dim,
                    found: raw.len(),
                });
            }
            if let Some(c) = raw.iter().find(|c| c.order() != order) {
                return Err(NumError::OrderMismatch {
                    left: order,
                    right: c.order(),
                }
                .into());
            }
            forms.push(LinearForm::normalize(raw)?);
        }
        Ok(Self::from_normalized(dim, order, forms))
    }

    pub(crate) fn from_normalized(dim: usize, order: u32, mut forms: Vec<LinearForm>) -> Self {
        forms.sort();
        forms.dedup();
        Arrangement { dim, order, forms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Hyperplanes in canonical sorted order.
    pub fn forms(&self) -> &[LinearForm] {
        &self.forms
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn index_of(&self, h: &LinearForm) -> Option<usize> {
        self.forms.binary_search(h).ok()
    }

    pub fn contains(&self, h: &LinearForm) -> bool {
        self.index_of(h).is_some()
    }

    fn check_form(&self, h: &LinearForm) -> Result<(), GeometryError> {
        if h.dim() != self.dim {
            return Err(GeometryError::LengthMismatch {
                expected: self.dim,
                found: h.dim(),
            });
        }
        if h.order() != self.order {
            return Err(NumError::OrderMismatch {
                left: self.order,
                right: h.order(),
            }
            .into());
        }
        Ok(())
    }

    fn require_member(&self, h: &LinearForm) -> Result<usize, GeometryError> {
        self.check_form(h)?;
        self.index_of(h)
            .ok_or_else(|| GeometryError::NotMember(h.to_string()))
    }

    /// `A ∖ {H}`.
    pub fn delete(&self, h: &LinearForm) -> Result<Self, GeometryError> {
        let i = self.require_member(h)?;
        let mut forms = self.forms.clone();
        forms.remove(i);
        Ok(Arrangement {
            dim: self.dim,
            order: self.order,
            forms,
        })
    }

    /// `A ∪ {H}`.
    pub fn add(&self, h: &LinearForm) -> Result<Self, GeometryError> {
        self.check_form(h)?;
        match self.forms.binary_search(h) {
            Ok(_) => Err(GeometryError::AlreadyMember(h.to_string())),
            Err(i) => {
                let mut forms = self.forms.clone();
                forms.insert(i, h.clone());
                Ok(Arrangement {
                    dim: self.dim,
                    order: self.order,
                    forms,
                })
            }
        }
    }

    /// The subarrangement made of the forms at the given indices.
    pub fn subarrangement(&self, indices: impl IntoIterator<Item = usize>) -> Self {
        let forms = indices.into_iter().map(|i| self.forms[i].clone()).collect();
        Self::from_normalized(self.dim, self.order, forms)
    }

    /// Restriction `A^H` onto the hyperplane `H ∈ A`, in the coordinates left
    /// after eliminating the pivot variable of `α_H`.
    pub fn restrict(&self, h: &LinearForm) -> Result<Restriction, GeometryError> {
        self.require_member(h)?;
        let map = CoordinateMap::new(h.clone());
        let forms = self
            .forms
            .iter()
            .filter(|f| *f != h)
            .filter_map(|f| map.apply(f))
            .collect();
        Ok(Restriction {
            arrangement: Self::from_normalized(self.dim - 1, self.order, forms),
            map,
        })
    }

    /// The triple `(A, A ∖ {H}, A^H)`.
    pub fn triple(&self, h: &LinearForm) -> Result<Triple, GeometryError> {
        let deleted = self.delete(h)?;
        let Restriction { arrangement, map } = self.restrict(h)?;
        Ok(Triple {
            full: self.clone(),
            deleted,
            restricted: arrangement,
            pivot: h.clone(),
            coordinate_map: map,
        })
    }

    /// `A1 × A2` in `V1 ⊕ V2`.
    pub fn product(&self, other: &Arrangement) -> Result<Self, GeometryError> {
        if self.order != other.order {
            return Err(NumError::OrderMismatch {
                left: self.order,
                right: other.order,
            }
            .into());
        }
        let forms = self
            .forms
            .iter()
            .map(|f| f.padded(0, other.dim))
            .chain(other.forms.iter().map(|f| f.padded(self.dim, 0)))
            .collect();
        Ok(Self::from_normalized(self.dim + other.dim, self.order, forms))
    }

    /// `A_X` for `X` the common kernel of `defining_forms`. With `strict`,
    /// rejects `X` that is not an intersection of hyperplanes of `A`.
    pub fn localization(
        &self,
        defining_forms: &[LinearForm],
        strict: bool,
    ) -> Result<Self, GeometryError> {
        for f in defining_forms {
            self.check_form(f)?;
        }
        let span = EchelonBasis::from_rows(
            self.dim,
            self.order,
            defining_forms.iter().map(|f| f.coeffs()),
        );
        let members: Vec<LinearForm> = self
            .forms
            .iter()
            .filter(|f| span.contains(f.coeffs()))
            .cloned()
            .collect();
        if strict {
            let member_span =
                EchelonBasis::from_rows(self.dim, self.order, members.iter().map(|f| f.coeffs()));
            if member_span != span {
                return Err(GeometryError::NotInLattice);
            }
        }
        Ok(Self::from_normalized(self.dim, self.order, members))
    }

    /// Rank of the arrangement: codimension of the intersection of all its
    /// hyperplanes.
    pub fn rank(&self) -> usize {
        EchelonBasis::from_rows(self.dim, self.order, self.forms.iter().map(|f| f.coeffs())).rank()
    }

    /// Re-expresses all forms over `Q(ζ_order)`, which must be a multiple of
    /// the current order.
    pub fn lift_order(&self, order: u32) -> Result<Self, GeometryError> {
        if order == self.order {
            return Ok(self.clone());
        }
        let forms = self
            .forms
            .iter()
            .map(|f| f.lift(order))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_normalized(self.dim, order, forms))
    }
}

/// True iff the two arrangements consist of the same normalized forms.
pub fn forms_equal_as_sets(a: &Arrangement, b: &Arrangement) -> bool {
    a.dim == b.dim && a.order == b.order && a.forms == b.forms
}

impl fmt::Debug for Arrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Arrangement(dim={}, order={}, {:?})",
            self.dim, self.order, self.forms
        )
    }
}

impl Serialize for Arrangement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Arrangement", 3)?;
        s.serialize_field("dim", &self.dim)?;
        s.serialize_field("order", &self.order)?;
        s.serialize_field("forms", &self.forms)?;
        s.end()
    }
}

/// Substitution that eliminates the pivot variable of a hyperplane.
///
/// For `α_H = x_p + Σ_{j>p} h_j x_j`, a form `f` is sent to `f − f_p·α_H`
/// with coordinate `p` dropped; the remaining coordinates keep their order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateMap {
    hyperplane: LinearForm,
    pivot: usize,
}

impl CoordinateMap {
    pub fn new(hyperplane: LinearForm) -> Self {
        let pivot = hyperplane.pivot();
        CoordinateMap { hyperplane, pivot }
    }

    pub fn hyperplane(&self) -> &LinearForm {
        &self.hyperplane
    }

    /// Index of the eliminated coordinate.
    pub fn eliminated(&self) -> usize {
        self.pivot
    }

    /// Image of `f` on the hyperplane; `None` if `f` vanishes there.
    pub fn apply(&self, f: &LinearForm) -> Option<LinearForm> {
        let fp = &f.coeffs()[self.pivot];
        let image: Vec<CycNum> = f
            .coeffs()
            .iter()
            .zip(self.hyperplane.coeffs())
            .enumerate()
            .filter(|(i, _)| *i != self.pivot)
            .map(|(_, (a, h))| {
                if fp.is_zero() || h.is_zero() {
                    a.clone()
                } else {
                    a - &(fp * h)
                }
            })
            .collect();
        LinearForm::normalize(image).ok()
    }

    /// Human-readable substitution, e.g. `x1 := z*x3`.
    pub fn describe(&self) -> String {
        let rest: Vec<CycNum> = self
            .hyperplane
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if i == self.pivot {
                    CycNum::zero(c.order())
                } else {
                    -c
                }
            })
            .collect();
        let rhs = match LinearForm::normalize(rest.clone()) {
            Err(_) => "0".to_string(),
            Ok(_) => LinearForm { coeffs: rest }.to_string(),
        };
        format!("x{} := {}", self.pivot + 1, rhs)
    }
}

/// The restricted arrangement together with the coordinate substitution used.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub arrangement: Arrangement,
    pub map: CoordinateMap,
}

#[derive(Clone, Debug)]
pub struct Triple {
    pub full: Arrangement,
    pub deleted: Arrangement,
    pub restricted: Arrangement,
    pub pivot: LinearForm,
    pub coordinate_map: CoordinateMap,
}
