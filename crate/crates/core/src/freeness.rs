//! Inductive freeness: induction certificates and their replay, a memoized
//! backtracking search for certificates, hereditary checks over the
//! intersection lattice, and combinatorial obstructions to (inductive)
//! freeness.
//!
//! An arrangement `A` is inductively free if it is empty, or if some
//! `H ∈ A` has `A' = A ∖ {H}` and `A'' = A^H` inductively free with
//! `exp A'' ⊆ exp A'`; then `exp A = exp A'' ∪ {b + 1}` where `b` is the
//! element of `exp A'` left over. A certificate records one such chain from
//! `Φ_ℓ` up to `A`, one hyperplane per row.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exponents::ExponentMultiset;
use crate::geometry::{Arrangement, GeometryError, LinearForm};
use crate::lattice::{
    exponents_from_factorization, intersection_lattice, poincare_polynomial, IntegerPolynomial,
};

/// One row of an induction table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InductionStep {
    /// The hyperplane added at this step.
    pub form: LinearForm,
    /// Exponents of the restriction onto the added hyperplane.
    pub restriction_exponents: ExponentMultiset,
    /// Certificate for the restriction, in the coordinates left after pivot
    /// elimination. `None` means it is derived during replay: directly for
    /// restrictions of rank at most 2, by search otherwise.
    pub restriction: Option<Box<InductionCertificate>>,
}

/// A machine-checkable induction table, starting from `Φ_dim`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InductionCertificate {
    pub dim: usize,
    pub order: u32,
    pub steps: Vec<InductionStep>,
    pub final_exponents: ExponentMultiset,
}

impl InductionCertificate {
    pub fn empty(dim: usize, order: u32) -> Self {
        InductionCertificate {
            dim,
            order,
            steps: Vec::new(),
            final_exponents: ExponentMultiset::zeros(dim),
        }
    }

    pub fn forms(&self) -> impl Iterator<Item = &LinearForm> {
        self.steps.iter().map(|s| &s.form)
    }

    /// The arrangement enumerated by the certificate.
    pub fn arrangement(&self) -> Arrangement {
        Arrangement::from_forms(
            self.dim,
            self.order,
            self.forms().map(|f| f.coeffs().to_vec()),
        )
        .expect("certificate forms are normalized")
    }

    /// Certificate for `A × Φ_extra`, given one for `A`.
    pub fn padded(&self, extra: usize) -> Self {
        let pad = |f: &LinearForm| {
            let zeros = Arrangement::empty(extra, self.order);
            Arrangement::from_forms(self.dim, self.order, [f.coeffs().to_vec()])
                .and_then(|a| a.product(&zeros))
                .expect("valid form")
                .forms()[0]
                .clone()
        };
        let zeros = ExponentMultiset::zeros(extra);
        InductionCertificate {
            dim: self.dim + extra,
            order: self.order,
            steps: self
                .steps
                .iter()
                .map(|s| InductionStep {
                    form: pad(&s.form),
                    restriction_exponents: s.restriction_exponents.union(&zeros),
                    restriction: s.restriction.as_ref().map(|c| Box::new(c.padded(extra))),
                })
                .collect(),
            final_exponents: self.final_exponents.union(&zeros),
        }
    }
}

/// Exponents of an arrangement of rank at most 2, which is always
/// inductively free: `{0,…,0}`, `{0,…,0,1}` or `{0,…,0,1,n−1}`.
pub fn low_rank_exponents(a: &Arrangement) -> Option<ExponentMultiset> {
    let rank = a.rank();
    let d = a.dim();
    let n = a.len() as u64;
    let mut v = vec![0; d - rank];
    match rank {
        0 => {}
        1 => v.push(1),
        2 => v.extend([1, n - 1]),
        _ => return None,
    }
    Some(ExponentMultiset::new(v))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("restriction exponents {{{restriction}}} are not contained in {{{deleted}}}")]
    NotContained {
        deleted: ExponentMultiset,
        restriction: ExponentMultiset,
    },
    #[error("restriction exponents have {found} entries, expected {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error("restriction certificate is invalid: {0}")]
    RestrictionInvalid(Box<ReplayError>),
    #[error("restriction is not inductively free")]
    RestrictionNotFree,
    #[error("search budget exhausted while certifying the restriction")]
    RestrictionUndecided,
}

/// Adds `h` to `current` (with exponents `exp_current`) given that the
/// restriction onto `h` has exponents `exp_restriction`: checks
/// `exp A'' ⊆ exp A'` and returns `exp A'' ∪ {b + 1}`.
pub fn addition_exponents(
    exp_current: &ExponentMultiset,
    exp_restriction: &ExponentMultiset,
) -> Result<ExponentMultiset, StepError> {
    if exp_restriction.len() + 1 != exp_current.len() {
        return Err(StepError::WrongLength {
            expected: exp_current.len().saturating_sub(1),
            found: exp_restriction.len(),
        });
    }
    let rest = exp_current
        .difference(exp_restriction)
        .ok_or_else(|| StepError::NotContained {
            deleted: exp_current.clone(),
            restriction: exp_restriction.clone(),
        })?;
    let b = rest.values()[0];
    Ok(exp_restriction.with(b + 1))
}

/// How the exponents of a restriction were established during replay.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RestrictionSource {
    Certificate,
    LowRank,
    Searched,
}

/// Result of one successful addition step.
#[derive(Clone, Debug)]
pub struct VerifiedStep {
    pub restriction: Arrangement,
    pub restriction_exponents: ExponentMultiset,
    pub restriction_certificate: Option<InductionCertificate>,
    pub source: RestrictionSource,
    pub exponents: ExponentMultiset,
}

/// One addition step of an induction table: certifies `(current ∪ {h})^h`
/// (from `restriction_cert`, by rank, or by search) and checks the
/// containment condition.
pub fn verify_step(
    current: &Arrangement,
    exp_current: &ExponentMultiset,
    h: &LinearForm,
    restriction_cert: Option<&InductionCertificate>,
    engine: &SearchEngine,
) -> Result<VerifiedStep, StepError> {
    let full = current.add(h)?;
    let restriction = full.restrict(h)?.arrangement;
    let (exps, cert, source) = match restriction_cert {
        Some(cert) => {
            let report = replay_certificate(&restriction, cert, engine)
                .map_err(|e| StepError::RestrictionInvalid(Box::new(e)))?;
            (
                report.final_exponents,
                Some(report.certificate),
                RestrictionSource::Certificate,
            )
        }
        None => match low_rank_exponents(&restriction) {
            Some(e) => (e, None, RestrictionSource::LowRank),
            None => match engine.search(&restriction) {
                FreenessVerdict::InductivelyFree(c) => (
                    c.final_exponents.clone(),
                    Some(c),
                    RestrictionSource::Searched,
                ),
                FreenessVerdict::Unknown { .. } => return Err(StepError::RestrictionUndecided),
                _ => return Err(StepError::RestrictionNotFree),
            },
        },
    };
    let exponents = addition_exponents(exp_current, &exps)?;
    Ok(VerifiedStep {
        restriction,
        restriction_exponents: exps,
        restriction_certificate: cert,
        source,
        exponents,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("certificate is for dimension {cert} over order {cert_order}, arrangement has dimension {arr} over order {arr_order}")]
    Shape {
        cert: usize,
        cert_order: u32,
        arr: usize,
        arr_order: u32,
    },
    #[error("certificate forms do not enumerate the arrangement: {0}")]
    FormsMismatch(String),
    #[error("row {row}: {source}")]
    Step {
        row: usize,
        #[source]
        source: StepError,
    },
    #[error("row {row}: restriction exponents are {{{actual}}}, table says {{{expected}}}")]
    RestrictionMismatch {
        row: usize,
        expected: ExponentMultiset,
        actual: ExponentMultiset,
    },
    #[error("final exponents are {{{actual}}}, table says {{{expected}}}")]
    FinalMismatch {
        expected: ExponentMultiset,
        actual: ExponentMultiset,
    },
}

impl ReplayError {
    /// 1-based table row of the failure, if it is tied to a row.
    pub fn row(&self) -> Option<usize> {
        match self {
            ReplayError::Step { row, .. } | ReplayError::RestrictionMismatch { row, .. } => {
                Some(*row)
            }
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReplayRow {
    pub deleted_exponents: ExponentMultiset,
    pub form: LinearForm,
    pub restriction_exponents: ExponentMultiset,
    #[serde(skip)]
    pub restriction: Arrangement,
    pub source: RestrictionSource,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReplayReport {
    pub rows: Vec<ReplayRow>,
    pub final_exponents: ExponentMultiset,
    /// The replayed certificate with every derived restriction certificate
    /// filled in.
    #[serde(skip)]
    pub certificate: InductionCertificate,
}

/// Replays an induction table against `a`, row by row.
pub fn replay_certificate(
    a: &Arrangement,
    cert: &InductionCertificate,
    engine: &SearchEngine,
) -> Result<ReplayReport, ReplayError> {
    if cert.dim != a.dim() || cert.order != a.order() {
        return Err(ReplayError::Shape {
            cert: cert.dim,
            cert_order: cert.order,
            arr: a.dim(),
            arr_order: a.order(),
        });
    }
    if cert.steps.len() != a.len() {
        return Err(ReplayError::FormsMismatch(format!(
            "{} rows for {} hyperplanes",
            cert.steps.len(),
            a.len()
        )));
    }
    if let Some(f) = cert.forms().find(|f| !a.contains(f)) {
        return Err(ReplayError::FormsMismatch(format!("{f} is not in the arrangement")));
    }
    let mut current = Arrangement::empty(a.dim(), a.order());
    let mut exps = ExponentMultiset::zeros(a.dim());
    let mut rows = Vec::with_capacity(cert.steps.len());
    let mut completed = Vec::with_capacity(cert.steps.len());
    for (i, step) in cert.steps.iter().enumerate() {
        let row = i + 1;
        let verified = verify_step(
            &current,
            &exps,
            &step.form,
            step.restriction.as_deref(),
            engine,
        )
        .map_err(|source| ReplayError::Step { row, source })?;
        if verified.restriction_exponents != step.restriction_exponents {
            return Err(ReplayError::RestrictionMismatch {
                row,
                expected: step.restriction_exponents.clone(),
                actual: verified.restriction_exponents,
            });
        }
        rows.push(ReplayRow {
            deleted_exponents: exps.clone(),
            form: step.form.clone(),
            restriction_exponents: verified.restriction_exponents.clone(),
            restriction: verified.restriction.clone(),
            source: verified.source,
        });
        completed.push(InductionStep {
            form: step.form.clone(),
            restriction_exponents: verified.restriction_exponents,
            restriction: verified.restriction_certificate.map(Box::new),
        });
        current = current.add(&step.form).expect("checked in verify_step");
        exps = verified.exponents;
    }
    if exps != cert.final_exponents {
        return Err(ReplayError::FinalMismatch {
            expected: cert.final_exponents.clone(),
            actual: exps,
        });
    }
    debug_assert_eq!(exps.sum(), a.len() as u64);
    Ok(ReplayReport {
        rows,
        final_exponents: exps.clone(),
        certificate: InductionCertificate {
            dim: cert.dim,
            order: cert.order,
            steps: completed,
            final_exponents: exps,
        },
    })
}

/// Evidence that an arrangement is not free.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NonFreeWitness {
    /// A free arrangement has `π(A,t) = ∏(1 + b_i t)`; this one does not.
    PoincareDoesNotSplit { polynomial: IntegerPolynomial },
    /// `A ∖ {H}` and `A^H` are free but `exp A^H ⊄ exp (A ∖ {H})`.
    DeletionRestriction {
        hyperplane: LinearForm,
        deleted_exponents: ExponentMultiset,
        restriction_exponents: ExponentMultiset,
    },
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum FreenessVerdict {
    InductivelyFree(InductionCertificate),
    /// Every addition order was explored without success.
    NotInductivelyFree { nodes: u64 },
    NotFree(NonFreeWitness),
    /// The node budget ran out before the search was decided.
    Unknown { nodes: u64 },
}

impl FreenessVerdict {
    pub fn is_inductively_free(&self) -> bool {
        matches!(self, FreenessVerdict::InductivelyFree(_))
    }

    /// True if the verdict rules out inductive freeness.
    pub fn is_refuted(&self) -> bool {
        matches!(
            self,
            FreenessVerdict::NotInductivelyFree { .. } | FreenessVerdict::NotFree(_)
        )
    }

    pub fn certificate(&self) -> Option<&InductionCertificate> {
        match self {
            FreenessVerdict::InductivelyFree(c) => Some(c),
            _ => None,
        }
    }
}

/// Order in which deletion candidates are tried.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CandidateOrder {
    /// Smallest restriction first.
    #[default]
    SmallestRestriction,
    LargestRestriction,
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Maximum number of expanded search nodes; `None` for no limit.
    pub budget: Option<u64>,
    /// Worker threads for the top-level branches.
    pub threads: usize,
    /// Accept arrangements of rank at most 2 without searching.
    pub low_rank_shortcut: bool,
    /// Only try hyperplanes `H` with `|A| − |A^H| ∈ exp A`, where `exp A` is
    /// read off the Poincaré polynomial. Turning this off leaves plain
    /// backtracking over every deletion.
    pub exponent_pruning: bool,
    pub candidate_order: CandidateOrder,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: None,
            threads: 1,
            low_rank_shortcut: true,
            exponent_pruning: true,
            candidate_order: CandidateOrder::default(),
        }
    }
}

#[derive(Debug)]
enum ProofKind {
    Empty,
    LowRank,
    Addition {
        deleted: Arc<Proof>,
        form: LinearForm,
        restriction: Arc<Proof>,
    },
}

#[derive(Debug)]
struct Proof {
    arrangement: Arrangement,
    exponents: ExponentMultiset,
    kind: ProofKind,
}

#[derive(Clone, Debug)]
enum Outcome {
    Free(Arc<Proof>),
    NotFree(IntegerPolynomial),
    NotInductivelyFree,
    Unknown,
}

/// Memoized backtracking search over deletion orders.
///
/// The memo table is keyed by the canonical arrangement itself and is shared
/// by every search run through the same engine, including the nested
/// searches over restrictions.
pub struct SearchEngine {
    config: SearchConfig,
    memo: Mutex<HashMap<Arrangement, Outcome>>,
    nodes: AtomicU64,
    pool: Option<rayon::ThreadPool>,
}

impl Default for SearchEngine {
    fn default() -> Self {
        Self::new(SearchConfig::default())
    }
}

impl SearchEngine {
    pub fn new(config: SearchConfig) -> Self {
        let pool = (config.threads > 1).then(|| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(config.threads)
                .build()
                .expect("thread pool")
        });
        SearchEngine {
            config,
            memo: Mutex::new(HashMap::new()),
            nodes: AtomicU64::new(0),
            pool,
        }
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    /// Total nodes expanded so far by this engine.
    pub fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }

    /// Decides inductive freeness of `a`.
    pub fn search(&self, a: &Arrangement) -> FreenessVerdict {
        let outcome = match &self.pool {
            Some(pool) => pool.install(|| self.solve(a, true)),
            None => self.solve(a, false),
        };
        match outcome {
            Outcome::Free(proof) => FreenessVerdict::InductivelyFree(flatten(&proof)),
            Outcome::NotFree(polynomial) => {
                FreenessVerdict::NotFree(NonFreeWitness::PoincareDoesNotSplit { polynomial })
            }
            Outcome::NotInductivelyFree => FreenessVerdict::NotInductivelyFree {
                nodes: self.nodes(),
            },
            Outcome::Unknown => FreenessVerdict::Unknown {
                nodes: self.nodes(),
            },
        }
    }

    fn remember(&self, a: &Arrangement, outcome: Outcome) -> Outcome {
        if matches!(outcome, Outcome::Unknown) {
            return outcome;
        }
        self.memo
            .lock()
            .expect("memo poisoned")
            .entry(a.clone())
            .or_insert(outcome)
            .clone()
    }

    fn solve(&self, a: &Arrangement, parallel: bool) -> Outcome {
        if a.is_empty() {
            return Outcome::Free(Arc::new(Proof {
                arrangement: a.clone(),
                exponents: ExponentMultiset::zeros(a.dim()),
                kind: ProofKind::Empty,
            }));
        }
        if self.config.low_rank_shortcut {
            if let Some(exponents) = low_rank_exponents(a) {
                return Outcome::Free(Arc::new(Proof {
                    arrangement: a.clone(),
                    exponents,
                    kind: ProofKind::LowRank,
                }));
            }
        }
        if let Some(hit) = self.memo.lock().expect("memo poisoned").get(a) {
            return hit.clone();
        }
        let within_budget = self
            .nodes
            .fetch_update(Ordering::Relaxed, Ordering::Relaxed, |n| {
                self.config.budget.is_none_or(|b| n < b).then_some(n + 1)
            })
            .is_ok();
        if !within_budget {
            return Outcome::Unknown;
        }

        // IF implies free implies π(A,t) splits, and then exp A is read off
        // the factorization.
        let poly = poincare_polynomial(a);
        let Some(target) = exponents_from_factorization(&poly, a.dim()) else {
            return self.remember(a, Outcome::NotFree(poly));
        };

        // If A is IF through H then exp A = exp A^H ∪ {|A| − |A^H|}.
        let n = a.len() as u64;
        let mut candidates: Vec<(usize, LinearForm, Arrangement, u64)> = a
            .forms()
            .iter()
            .enumerate()
            .filter_map(|(i, h)| {
                let r = a.restrict(h).expect("member").arrangement;
                let b = n - r.len() as u64;
                (!self.config.exponent_pruning || target.contains(b)).then(|| (i, h.clone(), r, b))
            })
            .collect();
        match self.config.candidate_order {
            CandidateOrder::SmallestRestriction => {
                candidates.sort_by_key(|(i, _, r, _)| (r.len(), *i))
            }
            CandidateOrder::LargestRestriction => {
                candidates.sort_by_key(|(i, _, r, _)| (std::cmp::Reverse(r.len()), *i))
            }
        }

        let undecided = AtomicBool::new(false);
        let try_candidate = |(_, h, r, b): &(usize, LinearForm, Arrangement, u64)| {
            let restriction = match self.solve(r, false) {
                Outcome::Free(p) => p,
                Outcome::Unknown => {
                    undecided.store(true, Ordering::Relaxed);
                    return None;
                }
                _ => return None,
            };
            if self.config.exponent_pruning
                && Some(&restriction.exponents) != target.without(*b).as_ref()
            {
                return None;
            }
            let deleted_arr = a.delete(h).expect("member");
            let deleted = match self.solve(&deleted_arr, false) {
                Outcome::Free(p) => p,
                Outcome::Unknown => {
                    undecided.store(true, Ordering::Relaxed);
                    return None;
                }
                _ => return None,
            };
            let exponents =
                addition_exponents(&deleted.exponents, &restriction.exponents).ok()?;
            debug_assert_eq!(exponents, target);
            Some(Arc::new(Proof {
                arrangement: a.clone(),
                exponents,
                kind: ProofKind::Addition {
                    deleted,
                    form: h.clone(),
                    restriction,
                },
            }))
        };
        let found = if parallel {
            candidates.par_iter().find_map_first(try_candidate)
        } else {
            candidates.iter().find_map(try_candidate)
        };
        match found {
            Some(proof) => self.remember(a, Outcome::Free(proof)),
            None if undecided.load(Ordering::Relaxed) => Outcome::Unknown,
            None => self.remember(a, Outcome::NotInductivelyFree),
        }
    }
}

/// Search with a fresh engine.
pub fn search_if(a: &Arrangement, config: SearchConfig) -> FreenessVerdict {
    SearchEngine::new(config).search(a)
}

fn low_rank_certificate(a: &Arrangement) -> InductionCertificate {
    let mut current = Arrangement::empty(a.dim(), a.order());
    let mut exps = ExponentMultiset::zeros(a.dim());
    let mut steps = Vec::with_capacity(a.len());
    for f in a.forms() {
        let full = current.add(f).expect("distinct forms");
        let r = full.restrict(f).expect("member").arrangement;
        let re = low_rank_exponents(&r).expect("restriction of a rank ≤ 2 arrangement");
        exps = addition_exponents(&exps, &re).expect("rank ≤ 2 arrangements are IF in any order");
        steps.push(InductionStep {
            form: f.clone(),
            restriction_exponents: re,
            restriction: None,
        });
        current = full;
    }
    InductionCertificate {
        dim: a.dim(),
        order: a.order(),
        steps,
        final_exponents: exps,
    }
}

fn flatten(proof: &Proof) -> InductionCertificate {
    match &proof.kind {
        ProofKind::Empty => {
            InductionCertificate::empty(proof.arrangement.dim(), proof.arrangement.order())
        }
        ProofKind::LowRank => low_rank_certificate(&proof.arrangement),
        ProofKind::Addition {
            deleted,
            form,
            restriction,
        } => {
            let mut cert = flatten(deleted);
            let nested = (restriction.arrangement.rank() > 2)
                .then(|| Box::new(flatten(restriction)));
            cert.steps.push(InductionStep {
                form: form.clone(),
                restriction_exponents: restriction.exponents.clone(),
                restriction: nested,
            });
            cert.final_exponents = proof.exponents.clone();
            cert
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CriterionError {
    #[error("restriction exponents must have {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },
}

/// Non-inductive-freeness from exponents alone, for a reflection
/// arrangement `A` with `A^H` free: if `exp A^H ⊄ exp A` then `A ∖ {H}` is
/// not free, so `H` can never be the last hyperplane of an induction table.
///
/// With `transitive` the caller asserts the containment behaves the same for
/// every hyperplane (as it does for reflection arrangements), so a single
/// failure rules out every table. Without it the criterion stays silent.
pub fn not_if_by_restriction(
    exp_a: &ExponentMultiset,
    exp_restriction: &ExponentMultiset,
    transitive: bool,
) -> Result<bool, CriterionError> {
    if exp_restriction.len() + 1 != exp_a.len() {
        return Err(CriterionError::LengthMismatch {
            expected: exp_a.len().saturating_sub(1),
            found: exp_restriction.len(),
        });
    }
    Ok(transitive && !exp_restriction.is_submultiset_of(exp_a))
}

/// Certifies `A` not free through the triple at `h`: `A'` and `A''` are
/// certified free but `exp A'' ⊄ exp A'`.
pub fn nonfree_witness(
    a: &Arrangement,
    h: &LinearForm,
    engine: &SearchEngine,
) -> Result<Option<NonFreeWitness>, GeometryError> {
    let triple = a.triple(h)?;
    let Some(deleted_exponents) = engine.search(&triple.deleted).certificate().map(|c| c.final_exponents.clone()) else {
        return Ok(None);
    };
    let restriction_exponents = match low_rank_exponents(&triple.restricted) {
        Some(e) => e,
        None => match engine.search(&triple.restricted) {
            FreenessVerdict::InductivelyFree(c) => c.final_exponents,
            _ => return Ok(None),
        },
    };
    if restriction_exponents.is_submultiset_of(&deleted_exponents) {
        return Ok(None);
    }
    Ok(Some(NonFreeWitness::DeletionRestriction {
        hyperplane: h.clone(),
        deleted_exponents,
        restriction_exponents,
    }))
}

/// How lattice elements are checked in [`check_hif`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum HifMode {
    /// Restrictions of dimension at most 2 pass without search, and a
    /// 3-arrangement that is inductively free is accepted outright.
    #[default]
    Shortcuts,
    /// Search every restriction, including those of dimension at most 2.
    Direct,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ElementVerdict {
    /// Dimension at most 2, or covered by the 3-arrangement shortcut.
    Auto,
    InductivelyFree { exponents: ExponentMultiset },
    NotInductivelyFree,
    NotFree { witness: NonFreeWitness },
    Unknown,
}

impl ElementVerdict {
    fn failed(&self) -> bool {
        matches!(
            self,
            ElementVerdict::NotInductivelyFree | ElementVerdict::NotFree { .. }
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HifEntry {
    pub codim: usize,
    /// Hyperplanes of `A` whose intersection is `X`, one per codimension.
    pub chain: Vec<LinearForm>,
    #[serde(skip)]
    pub restriction: Arrangement,
    pub restriction_size: usize,
    pub verdict: ElementVerdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HifVerdict {
    HereditarilyInductivelyFree,
    NotHereditarilyInductivelyFree,
    Unknown,
}

#[derive(Clone, Debug, Serialize)]
pub struct HifReport {
    pub verdict: HifVerdict,
    pub lattice_size: usize,
    pub entries: Vec<HifEntry>,
}

impl HifReport {
    pub fn failures(&self) -> impl Iterator<Item = &HifEntry> {
        self.entries.iter().filter(|e| e.verdict.failed())
    }

    pub fn first_failure(&self) -> Option<&HifEntry> {
        self.failures().next()
    }
}

/// `A^X` computed by restricting along `chain`, a list of independent
/// hyperplanes of `A` cutting out `X`.
pub fn restrict_along(a: &Arrangement, chain: &[LinearForm]) -> Result<Arrangement, GeometryError> {
    let mut current = a.clone();
    let mut pending = chain.to_vec();
    while !pending.is_empty() {
        let h = pending.remove(0);
        let r = current.restrict(&h)?;
        pending = pending
            .iter()
            .map(|f| r.map.apply(f).ok_or(GeometryError::ZeroForm))
            .collect::<Result<_, _>>()?;
        current = r.arrangement;
    }
    Ok(current)
}

fn element_verdict(r: &Arrangement, engine: &SearchEngine) -> ElementVerdict {
    let verdict = engine.search(r);
    if let FreenessVerdict::InductivelyFree(c) = &verdict {
        return ElementVerdict::InductivelyFree {
            exponents: c.final_exponents.clone(),
        };
    }
    if !verdict.is_refuted() {
        return ElementVerdict::Unknown;
    }
    for h in r.forms() {
        if let Ok(Some(witness)) = nonfree_witness(r, h, engine) {
            return ElementVerdict::NotFree { witness };
        }
    }
    match verdict {
        FreenessVerdict::NotFree(witness) => ElementVerdict::NotFree { witness },
        _ => ElementVerdict::NotInductivelyFree,
    }
}

/// Checks that `A^X` is inductively free for every `X ∈ L(A)`.
pub fn check_hif(a: &Arrangement, engine: &SearchEngine, mode: HifMode) -> HifReport {
    let lattice = intersection_lattice(a);
    let mut entries = Vec::with_capacity(lattice.len());
    let mut top_is_free = false;
    for x in lattice.elements() {
        let mut span = crate::linalg::EchelonBasis::new(a.dim(), a.order());
        let chain: Vec<LinearForm> = x
            .members
            .iter()
            .map(|i| &a.forms()[i])
            .filter(|f| span.insert(f.coeffs()))
            .cloned()
            .collect();
        let restriction = restrict_along(a, &chain).expect("chain of independent members");
        let dim = restriction.dim();
        let verdict = match mode {
            HifMode::Shortcuts if dim <= 2 => ElementVerdict::Auto,
            HifMode::Shortcuts if a.dim() == 3 && x.codim > 0 && top_is_free => ElementVerdict::Auto,
            _ => element_verdict(&restriction, engine),
        };
        if x.codim == 0 {
            top_is_free = matches!(verdict, ElementVerdict::InductivelyFree { .. });
        }
        entries.push(HifEntry {
            codim: x.codim,
            chain,
            restriction_size: restriction.len(),
            restriction,
            verdict,
        });
    }
    let verdict = if entries.iter().any(|e| e.verdict.failed()) {
        HifVerdict::NotHereditarilyInductivelyFree
    } else if entries
        .iter()
        .any(|e| matches!(e.verdict, ElementVerdict::Unknown))
    {
        HifVerdict::Unknown
    } else {
        HifVerdict::HereditarilyInductivelyFree
    };
    HifReport {
        verdict,
        lattice_size: lattice.len(),
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::CycNum;

    fn arr(dim: usize, forms: &[&[i64]]) -> Arrangement {
        Arrangement::from_forms(
            dim,
            1,
            forms
                .iter()
                .map(|f| f.iter().map(|&x| CycNum::from_integer(x, 1)).collect()),
        )
        .unwrap()
    }

    fn form(xs: &[i64]) -> LinearForm {
        LinearForm::normalize(xs.iter().map(|&x| CycNum::from_integer(x, 1)).collect()).unwrap()
    }

    fn braid3() -> Arrangement {
        arr(3, &[&[1, -1, 0], &[1, 0, -1], &[0, 1, -1]])
    }

    #[test]
    fn addition_exponent_rule() {
        let e = addition_exponents(&[0, 1, 1, 1].into(), &[1, 1, 1].into()).unwrap();
        assert_eq!(e, [1, 1, 1, 1].into());
        let e = addition_exponents(&[0, 0, 0].into(), &[0, 0].into()).unwrap();
        assert_eq!(e, [0, 0, 1].into());
        let e = addition_exponents(&[1, 6, 6, 7].into(), &[1, 6, 7].into()).unwrap();
        assert_eq!(e, [1, 6, 7, 7].into());
        assert!(matches!(
            addition_exponents(&[1, 2, 2].into(), &[1, 3].into()),
            Err(StepError::NotContained { .. })
        ));
    }

    #[test]
    fn first_hyperplane_step() {
        let engine = SearchEngine::default();
        let phi = Arrangement::empty(3, 1);
        let step = verify_step(&phi, &ExponentMultiset::zeros(3), &form(&[1, 1, 0]), None, &engine)
            .unwrap();
        assert_eq!(step.restriction_exponents, [0, 0].into());
        assert_eq!(step.exponents, [0, 0, 1].into());
        assert!(verify_step(
            &braid3(),
            &[0, 1, 2].into(),
            &form(&[1, -1, 0]),
            None,
            &engine
        )
        .is_err());
    }

    #[test]
    fn search_small_cases() {
        let v = search_if(&Arrangement::empty(3, 1), SearchConfig::default());
        assert_eq!(v.certificate().unwrap().final_exponents, [0, 0, 0].into());
        let v = search_if(&braid3(), SearchConfig::default());
        assert_eq!(v.certificate().unwrap().final_exponents, [0, 1, 2].into());
    }

    #[test]
    fn searched_certificates_replay() {
        let engine = SearchEngine::default();
        let a = arr(
            3,
            &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, -1, 0], &[1, 0, -1], &[0, 1, -1]],
        );
        let cert = engine.search(&a).certificate().cloned().unwrap();
        let report = replay_certificate(&a, &cert, &engine).unwrap();
        assert_eq!(report.final_exponents, [1, 2, 3].into());
        assert_eq!(report.rows.len(), 6);
    }

    #[test]
    fn direct_search_matches_shortcut() {
        let a = arr(2, &[&[1, 0], &[0, 1], &[1, 1], &[1, 2]]);
        let direct = search_if(
            &a,
            SearchConfig {
                low_rank_shortcut: false,
                ..SearchConfig::default()
            },
        );
        assert_eq!(direct.certificate().unwrap().final_exponents, [1, 3].into());
    }

    #[test]
    fn replay_rejects_bad_tables() {
        let engine = SearchEngine::default();
        let a = braid3();
        let mut cert = engine.search(&a).certificate().cloned().unwrap();
        cert.final_exponents = [1, 1, 1].into();
        assert!(matches!(
            replay_certificate(&a, &cert, &engine),
            Err(ReplayError::FinalMismatch { .. })
        ));
        let mut cert = engine.search(&a).certificate().cloned().unwrap();
        cert.steps[1].restriction_exponents = [1, 1].into();
        let err = replay_certificate(&a, &cert, &engine).unwrap_err();
        assert_eq!(err.row(), Some(2));
        let cert = engine.search(&a).certificate().cloned().unwrap();
        assert!(matches!(
            replay_certificate(&Arrangement::empty(3, 1), &cert, &engine),
            Err(ReplayError::FormsMismatch(_))
        ));
    }

    #[test]
    fn restriction_criterion() {
        assert!(not_if_by_restriction(&[1, 4, 4].into(), &[1, 3].into(), true).unwrap());
        assert!(!not_if_by_restriction(&[1, 4, 4].into(), &[1, 3].into(), false).unwrap());
        assert!(!not_if_by_restriction(&[1, 13, 17, 29].into(), &[1, 13, 17].into(), true).unwrap());
        assert!(not_if_by_restriction(&[1, 5, 9, 9].into(), &[1, 5, 7].into(), true).unwrap());
        assert!(not_if_by_restriction(&[1, 4, 4].into(), &[1, 3, 3].into(), true).is_err());
    }

    #[test]
    fn nonfree_witness_examples() {
        let engine = SearchEngine::default();
        let b = arr(
            3,
            &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, -1, 1], &[1, 1, 1], &[1, 1, -1]],
        );
        let w = nonfree_witness(&b, &form(&[0, 0, 1]), &engine).unwrap().unwrap();
        assert_eq!(
            w,
            NonFreeWitness::DeletionRestriction {
                hyperplane: form(&[0, 0, 1]),
                deleted_exponents: [1, 2, 2].into(),
                restriction_exponents: [1, 3].into(),
            }
        );
        let two = arr(2, &[&[1, 0], &[0, 1], &[1, 1]]);
        for h in two.forms() {
            assert_eq!(nonfree_witness(&two, h, &engine).unwrap(), None);
        }
        for h in braid3().forms() {
            assert_eq!(nonfree_witness(&braid3(), h, &engine).unwrap(), None);
        }
    }

    #[test]
    fn hif_of_two_arrangement() {
        let engine = SearchEngine::default();
        let two = arr(2, &[&[1, 0], &[0, 1], &[1, 1], &[1, -1]]);
        for mode in [HifMode::Shortcuts, HifMode::Direct] {
            let report = check_hif(&two, &engine, mode);
            assert_eq!(report.verdict, HifVerdict::HereditarilyInductivelyFree);
            assert_eq!(report.lattice_size, 6);
        }
    }

    #[test]
    fn budget_exhaustion_is_unknown() {
        let b = arr(
            3,
            &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1], &[1, 2, 3], &[1, -1, 2], &[2, 1, 5]],
        );
        let v = search_if(
            &b,
            SearchConfig {
                budget: Some(1),
                ..SearchConfig::default()
            },
        );
        assert!(matches!(v, FreenessVerdict::Unknown { .. } | FreenessVerdict::NotFree(_)));
    }
}
