//! Reduced row-echelon bases over `Q(ζ_n)`.

use crate::exactnum::CycNum;

/// A subspace of `V*` held as the rows of its reduced row-echelon form.
///
/// The RREF of a subspace is unique, so two bases compare equal exactly when
/// they span the same subspace.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EchelonBasis {
    dim: usize,
    order: u32,
    /// Rows sorted by pivot column; each pivot entry is 1 and every other
    /// row vanishes in that column.
    rows: Vec<Vec<CycNum>>,
}

impl EchelonBasis {
    pub fn new(dim: usize, order: u32) -> Self {
        EchelonBasis {
            dim,
            order,
            rows: Vec::new(),
        }
    }

    pub fn from_rows<'a>(
        dim: usize,
        order: u32,
        rows: impl IntoIterator<Item = &'a [CycNum]>,
    ) -> Self {
        let mut basis = Self::new(dim, order);
        for r in rows {
            basis.insert(r);
        }
        basis
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<CycNum>] {
        &self.rows
    }

    fn pivot(row: &[CycNum]) -> usize {
        row.iter().position(|c| !c.is_zero()).expect("nonzero row")
    }

    /// Residue of `v` after eliminating every pivot column.
    pub fn reduce(&self, v: &[CycNum]) -> Vec<CycNum> {
        debug_assert_eq!(v.len(), self.dim);
        let mut out = v.to_vec();
        for row in &self.rows {
            let p = Self::pivot(row);
            if out[p].is_zero() {
                continue;
            }
            let c = out[p].clone();
            for (o, r) in out.iter_mut().zip(row).skip(p) {
                if !r.is_zero() {
                    *o = &*o - &(&c * r);
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[CycNum]) -> bool {
        self.reduce(v).iter().all(CycNum::is_zero)
    }

    /// Adds `v` to the span; returns false if it was already contained.
    pub fn insert(&mut self, v: &[CycNum]) -> bool {
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        let inv = r[p].inv().expect("nonzero pivot");
        for c in r.iter_mut().skip(p) {
            if !c.is_zero() {
                *c = &*c * &inv;
            }
        }
        for row in &mut self.rows {
            if row[p].is_zero() {
                continue;
            }
            let c = row[p].clone();
            for (x, y) in row.iter_mut().zip(&r).skip(p) {
                if !y.is_zero() {
                    *x = &*x - &(&c * y);
                }
            }
        }
        let at = self
            .rows
            .iter()
            .position(|row| Self::pivot(row) > p)
            .unwrap_or(self.rows.len());
        self.rows.insert(at, r);
        true
    }

    pub fn order(&self) -> u32 {
        self.order
    }
}
