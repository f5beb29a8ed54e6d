//! Text and JSON rendering of command results.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use indfree::catalog::{Classification, GroupDescriptor};
use indfree::format::TableFile;
use indfree::freeness::{
    ElementVerdict, FreenessVerdict, HifEntry, HifReport, HifVerdict, NonFreeWitness,
    ReplayError, ReplayReport,
};
use indfree::lattice::{format_factorization, IntegerPolynomial, IntersectionLattice};
use indfree::{Arrangement, ExponentMultiset};

pub struct Output {
    json: Option<Value>,
    text: String,
}

impl Output {
    pub fn new(json: bool) -> Self {
        Output {
            json: json.then_some(Value::Null),
            text: String::new(),
        }
    }

    pub fn is_json(&self) -> bool {
        self.json.is_some()
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    pub fn raw(&mut self, s: &str) {
        self.text.push_str(s);
    }

    fn set(&mut self, command: &str, mut value: Value) {
        if let Some(slot) = &mut self.json {
            value["command"] = json!(command);
            *slot = value;
        }
    }

    /// Writes everything to stdout; a closed pipe is not an error.
    pub fn finish(self) {
        let mut stdout = std::io::stdout().lock();
        let _ = match self.json {
            Some(v) => writeln!(stdout, "{}", serde_json::to_string_pretty(&v).expect("serializable")),
            None => write!(stdout, "{}", self.text),
        };
    }

    pub fn build(&mut self, a: &Arrangement, target: Option<&Path>) {
        if let Some(path) = target {
            self.line(format!("wrote {} hyperplanes to {}", a.len(), path.display()));
        }
        self.set(
            "build",
            json!({
                "dim": a.dim(),
                "order": a.order(),
                "hyperplanes": a.len(),
                "forms": a.forms(),
                "out": target.map(|p| p.display().to_string()),
            }),
        );
    }

    pub fn lattice(&mut self, a: &Arrangement, lattice: &IntersectionLattice) {
        let sizes = lattice.sizes_by_codim();
        let sums = lattice.mobius_sums_by_codim();
        self.line(format!(
            "dim {}, order {}, {} hyperplanes, rank {}",
            a.dim(),
            a.order(),
            a.len(),
            lattice.rank()
        ));
        for (k, (n, s)) in sizes.iter().zip(&sums).enumerate() {
            self.line(format!("codim {k}: {}, Möbius sum {s}", plural(*n, "element")));
        }
        self.line(format!("total: {} elements", lattice.len()));
        let codims: Vec<Value> = sizes
            .iter()
            .zip(&sums)
            .enumerate()
            .map(|(k, (n, s))| json!({ "codim": k, "elements": n, "mobius_sum": s }))
            .collect();
        self.set(
            "lattice",
            json!({
                "dim": a.dim(),
                "order": a.order(),
                "hyperplanes": a.len(),
                "rank": lattice.rank(),
                "size": lattice.len(),
                "codims": codims,
            }),
        );
    }

    pub fn charpoly(&mut self, poly: &IntegerPolynomial, exps: Option<&ExponentMultiset>) {
        match exps {
            Some(e) => self.line(format!("{poly} = {}", format_factorization(e))),
            None => self.line(format!("{poly} (does not factor into linear terms over Z)")),
        }
        self.set(
            "charpoly",
            json!({
                "polynomial": poly,
                "text": poly.to_string(),
                "factorization": exps.map(format_factorization),
                "exponents": exps,
            }),
        );
    }

    pub fn check_if(&mut self, a: &Arrangement, verdict: &FreenessVerdict) {
        match verdict {
            FreenessVerdict::InductivelyFree(cert) => {
                self.line(format!("inductively free, exponents {}", cert.final_exponents));
                let table = TableFile::from_certificate(cert).write();
                self.raw(&table);
            }
            FreenessVerdict::NotInductivelyFree { nodes } => self.line(format!(
                "not inductively free: no addition order works ({})",
                plural(*nodes as usize, "search node")
            )),
            FreenessVerdict::NotFree(w) => {
                self.line(format!("not free: {}", describe_witness(w)))
            }
            FreenessVerdict::Unknown { nodes } => self.line(format!(
                "undecided: search budget exhausted after {}",
                plural(*nodes as usize, "node")
            )),
        }
        let mut value = serde_json::to_value(verdict).expect("serializable");
        value["hyperplanes"] = json!(a.len());
        if let FreenessVerdict::InductivelyFree(cert) = verdict {
            value["table"] = json!(TableFile::from_certificate(cert).write());
        }
        self.set("check-if", value);
    }

    pub fn check_hif(&mut self, report: &HifReport) {
        let failures: Vec<&HifEntry> = report.failures().collect();
        match report.verdict {
            HifVerdict::HereditarilyInductivelyFree => self.line(format!(
                "hereditarily inductively free ({} lattice elements checked)",
                report.lattice_size
            )),
            HifVerdict::NotHereditarilyInductivelyFree => self.line(format!(
                "not hereditarily inductively free ({} of {} lattice elements fail)",
                failures.len(),
                report.lattice_size
            )),
            HifVerdict::Unknown => self.line(format!(
                "undecided: search budget exhausted ({} lattice elements)",
                report.lattice_size
            )),
        }
        for entry in &failures {
            self.line(format!(
                "A^X for X = {}: {} hyperplanes, {}",
                describe_flat(entry),
                entry.restriction_size,
                describe_element(&entry.verdict)
            ));
        }
        self.set("check-hif", serde_json::to_value(report).expect("serializable"));
    }

    pub fn verify_table(
        &mut self,
        replay: &ReplayReport,
        mismatch: Option<&(usize, ExponentMultiset, ExponentMultiset)>,
    ) {
        for row in &replay.rows {
            self.line(format!(
                "{} | {} | {}",
                row.deleted_exponents, row.form, row.restriction_exponents
            ));
        }
        self.line(format!("= {}", replay.final_exponents));
        if let Some((row, listed, actual)) = mismatch {
            self.line(format!(
                "row {row}: table lists exp A' = {{{listed}}}, replay gives {{{actual}}}"
            ));
        }
        let mut value = serde_json::to_value(replay).expect("serializable");
        value["verified"] = json!(mismatch.is_none());
        if let Some((row, listed, actual)) = mismatch {
            value["mismatch"] = json!({ "row": row, "listed": listed, "actual": actual });
        }
        self.set("verify-table", value);
    }

    pub fn replay_failure(&mut self, e: &ReplayError) {
        self.line(format!("table rejected: {e}"));
        self.set(
            "verify-table",
            json!({ "verified": false, "row": e.row(), "error": e.to_string() }),
        );
    }

    pub fn classify(
        &mut self,
        g: &GroupDescriptor,
        c: &Classification,
        exps: Option<&ExponentMultiset>,
    ) {
        let status = if c.inductively_free {
            "inductively free"
        } else {
            "not inductively free"
        };
        self.line(format!("{g}: {status} ({})", c.reason()));
        if let Some(e) = exps {
            self.line(format!("exponents: {e}"));
        }
        let factors: Vec<Value> = c
            .factors
            .iter()
            .map(|f| {
                json!({
                    "factor": f.factor.to_string(),
                    "inductively_free": f.inductively_free,
                    "reason": f.reason,
                })
            })
            .collect();
        self.set(
            "classify",
            json!({
                "descriptor": g.to_string(),
                "inductively_free": c.inductively_free,
                "reason": c.reason(),
                "factors": factors,
                "exponents": exps,
            }),
        );
    }
}

fn plural(n: usize, noun: &str) -> String {
    if n == 1 {
        format!("1 {noun}")
    } else {
        format!("{n} {noun}s")
    }
}

fn describe_flat(entry: &HifEntry) -> String {
    if entry.chain.is_empty() {
        return "V".into();
    }
    entry
        .chain
        .iter()
        .map(|f| format!("ker({f})"))
        .collect::<Vec<_>>()
        .join(" ∩ ")
}

fn describe_witness(w: &NonFreeWitness) -> String {
    match w {
        NonFreeWitness::PoincareDoesNotSplit { polynomial } => {
            format!("Poincaré polynomial {polynomial} does not factor into linear terms")
        }
        NonFreeWitness::DeletionRestriction {
            hyperplane,
            deleted_exponents,
            restriction_exponents,
        } => format!(
            "deleting {hyperplane} leaves exp = {{{deleted_exponents}}}, \
             but the restriction has exp = {{{restriction_exponents}}}"
        ),
    }
}

fn describe_element(v: &ElementVerdict) -> String {
    match v {
        ElementVerdict::NotFree { witness } => format!("not free: {}", describe_witness(witness)),
        ElementVerdict::NotInductivelyFree => "not inductively free".into(),
        ElementVerdict::Unknown => "undecided".into(),
        ElementVerdict::Auto => "inductively free".into(),
        ElementVerdict::InductivelyFree { exponents } => {
            format!("inductively free, exponents {exponents}")
        }
    }
}
