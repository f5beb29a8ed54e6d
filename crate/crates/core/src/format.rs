//! Plain-text file formats for arrangements and induction tables.
//!
//! Arrangement files:
//!
//! ```text
//! # B_2
//! dim 2
//! order 1
//! form 1, 0
//! form 0, 1
//! form 1, -1
//! form 1, 1
//! ```
//!
//! `form` lines take comma-separated coefficients or a linear expression in
//! `x1 … xℓ`. Induction tables list one hyperplane per row, either as
//! `<form> | <exp A''>` or in the three-column layout
//! `<exp A'> | <form> | <exp A''>`, and end with `= <exp A>`. A row may be
//! followed by a `{ … }` block holding an induction table for its
//! restriction, written in the coordinates left after eliminating the pivot
//! variable of the row's form.

use std::fmt::Write as _;

use crate::exactnum::CycNum;
use crate::exponents::ExponentMultiset;
use crate::freeness::{addition_exponents, InductionCertificate, InductionStep};
use crate::geometry::{Arrangement, LinearForm};
use crate::syntax::{parse_exponent_list, parse_form_text, ParseError, Span};

struct Line<'a> {
    number: usize,
    /// Text with comments stripped, not trimmed.
    text: &'a str,
}

impl Line<'_> {
    fn trimmed(&self) -> &str {
        self.text.trim()
    }

    fn indent(&self) -> usize {
        self.text.chars().count() - self.text.trim_start().chars().count()
    }

    fn error(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError::new(self.number, column, message)
    }
}

fn content_lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .map(|(i, raw)| Line {
            number: i + 1,
            text: raw.split('#').next().unwrap_or(""),
        })
        .filter(|l| !l.trimmed().is_empty())
        .collect()
}

/// Splits `s` on `sep`, returning each piece with its 1-based column offset
/// relative to `base`.
fn split_columns(s: &str, sep: char, base: usize) -> Vec<(&str, usize)> {
    let mut out = Vec::new();
    let mut col = base;
    for piece in s.split(sep) {
        out.push((piece, col));
        col += piece.chars().count() + 1;
    }
    out
}

fn leading_ws(s: &str) -> usize {
    s.chars().count() - s.trim_start().chars().count()
}

/// Parses `dim N` / `order N` header lines; returns true if `line` was one.
fn header_line(line: &Line, dim: &mut Option<usize>, order: &mut Option<u32>) -> Result<bool, ParseError> {
    let t = line.trimmed();
    let (key, rest) = t.split_once(char::is_whitespace).unwrap_or((t, ""));
    let column = line.indent() + key.chars().count() + 2;
    let value = || {
        rest.trim()
            .parse::<u32>()
            .map_err(|_| line.error(column, format!("expected a positive integer after '{key}'")))
    };
    match key {
        "dim" => {
            let v = value()?;
            if v == 0 {
                return Err(line.error(column, "dimension must be positive"));
            }
            *dim = Some(v as usize);
        }
        "order" => {
            let v = value()?;
            if v == 0 {
                return Err(line.error(column, "order must be positive"));
            }
            *order = Some(v);
        }
        _ => return Ok(false),
    }
    Ok(true)
}

fn parse_form(text: &str, dim: usize, order: u32, span: Span) -> Result<LinearForm, ParseError> {
    let raw = parse_form_text(text, dim, order, span)?;
    LinearForm::normalize(raw).map_err(|_| ParseError::new(span.line, span.column, "form is zero"))
}

/// An arrangement read from or written to an arrangement file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrangementFile {
    pub arrangement: Arrangement,
}

impl ArrangementFile {
    pub fn new(arrangement: Arrangement) -> Self {
        ArrangementFile { arrangement }
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut dim = None;
        let mut order = None;
        let mut forms = Vec::new();
        for line in content_lines(text) {
            if header_line(&line, &mut dim, &mut order)? {
                continue;
            }
            let t = line.trimmed();
            let Some(body) = t.strip_prefix("form") else {
                return Err(line.error(line.indent() + 1, format!("unexpected line '{t}'")));
            };
            let Some(d) = dim else {
                return Err(line.error(line.indent() + 1, "'form' before 'dim'"));
            };
            let column = line.indent() + 5 + leading_ws(body);
            let span = Span::new(line.number, column);
            forms.push((parse_form(body.trim(), d, order.unwrap_or(1), span)?, span));
        }
        let Some(dim) = dim else {
            return Err(ParseError::new(1, 1, "missing 'dim' header"));
        };
        let order = order.unwrap_or(1);
        if let Some((_, span)) = forms.iter().find(|(f, _)| f.order() != order) {
            return Err(ParseError::new(span.line, span.column, "'order' must precede forms"));
        }
        let arrangement = Arrangement::from_forms(
            dim,
            order,
            forms.into_iter().map(|(f, _)| f.coeffs().to_vec()),
        )
        .map_err(|e| ParseError::new(1, 1, e.to_string()))?;
        Ok(ArrangementFile { arrangement })
    }

    /// Canonical text: header, then forms in sorted order.
    pub fn write(&self) -> String {
        let a = &self.arrangement;
        let mut out = format!("dim {}\norder {}\n", a.dim(), a.order());
        for f in a.forms() {
            let coeffs: Vec<String> = f.coeffs().iter().map(CycNum::to_string).collect();
            let _ = writeln!(out, "form {}", coeffs.join(", "));
        }
        out
    }
}

/// One row of a table file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableRow {
    /// The `exp A'` column, if the row has one.
    pub deleted_exponents: Option<ExponentMultiset>,
    pub step: InductionStep,
    /// Line number of the row, for error reporting.
    pub line: usize,
}

/// An induction table as written in a table file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableFile {
    pub dim: usize,
    pub order: u32,
    pub rows: Vec<TableRow>,
    pub final_exponents: ExponentMultiset,
}

impl TableFile {
    /// Parses a table. `context` supplies the dimension and order when the
    /// file has no header (e.g. taken from the arrangement being checked).
    pub fn parse(text: &str, context: Option<(usize, u32)>) -> Result<Self, ParseError> {
        let lines = content_lines(text);
        let mut pos = 0;
        let mut dim = None;
        let mut order = None;
        while pos < lines.len() && header_line(&lines[pos], &mut dim, &mut order)? {
            pos += 1;
        }
        let dim = dim.or(context.map(|c| c.0)).ok_or_else(|| {
            ParseError::new(lines.first().map_or(1, |l| l.number), 1, "missing 'dim' header")
        })?;
        let order = order.or(context.map(|c| c.1)).unwrap_or(1);
        let table = parse_table(&lines, &mut pos, dim, order, false)?;
        if let Some(extra) = lines.get(pos) {
            return Err(extra.error(extra.indent() + 1, "unexpected content after final row"));
        }
        Ok(table)
    }

    pub fn certificate(&self) -> InductionCertificate {
        InductionCertificate {
            dim: self.dim,
            order: self.order,
            steps: self.rows.iter().map(|r| r.step.clone()).collect(),
            final_exponents: self.final_exponents.clone(),
        }
    }

    /// Table rows for a certificate, with the `exp A'` column filled in.
    pub fn from_certificate(cert: &InductionCertificate) -> Self {
        let mut current = Some(ExponentMultiset::zeros(cert.dim));
        let rows = cert
            .steps
            .iter()
            .map(|step| {
                let deleted = current.clone();
                current = current
                    .as_ref()
                    .and_then(|e| addition_exponents(e, &step.restriction_exponents).ok());
                TableRow {
                    deleted_exponents: deleted,
                    step: step.clone(),
                    line: 0,
                }
            })
            .collect();
        TableFile {
            dim: cert.dim,
            order: cert.order,
            rows,
            final_exponents: cert.final_exponents.clone(),
        }
    }

    pub fn write(&self) -> String {
        let mut out = format!("dim {}\norder {}\n", self.dim, self.order);
        let deleted: Vec<_> = self.rows.iter().map(|r| r.deleted_exponents.clone()).collect();
        write_rows(&mut out, &self.certificate(), &deleted, 0);
        out
    }
}

fn write_rows(
    out: &mut String,
    cert: &InductionCertificate,
    deleted: &[Option<ExponentMultiset>],
    depth: usize,
) {
    let pad = "  ".repeat(depth);
    for (step, deleted) in cert.steps.iter().zip(deleted) {
        match deleted {
            Some(d) => {
                let _ = writeln!(out, "{pad}{d} | {} | {}", step.form, step.restriction_exponents);
            }
            None => {
                let _ = writeln!(out, "{pad}{} | {}", step.form, step.restriction_exponents);
            }
        }
        if let Some(nested) = &step.restriction {
            let _ = writeln!(out, "{pad}{{");
            let table = TableFile::from_certificate(nested);
            let inner: Vec<_> = table.rows.into_iter().map(|r| r.deleted_exponents).collect();
            write_rows(out, nested, &inner, depth + 1);
            let _ = writeln!(out, "{pad}}}");
        }
    }
    let _ = writeln!(out, "{pad}= {}", cert.final_exponents);
}

fn parse_exponents(text: &str, line: usize, column: usize) -> Result<ExponentMultiset, ParseError> {
    let lead = leading_ws(text);
    parse_exponent_list(text, Span::new(line, column + lead)).map(ExponentMultiset::new)
}

fn parse_table(
    lines: &[Line],
    pos: &mut usize,
    dim: usize,
    order: u32,
    nested: bool,
) -> Result<TableFile, ParseError> {
    let mut rows: Vec<TableRow> = Vec::new();
    loop {
        let Some(line) = lines.get(*pos) else {
            let last = lines.last().map_or(1, |l| l.number);
            return Err(ParseError::new(last, 1, "missing final '= <exponents>' line"));
        };
        let t = line.trimmed();
        let start = line.indent() + 1;
        if let Some(rest) = t.strip_prefix('=') {
            *pos += 1;
            let final_exponents = parse_exponents(rest, line.number, start + 1)?;
            if final_exponents.len() != dim {
                return Err(line.error(start, format!("expected {dim} final exponents, found {}", final_exponents.len())));
            }
            return Ok(TableFile {
                dim,
                order,
                rows,
                final_exponents,
            });
        }
        if t == "{" {
            if dim < 2 {
                return Err(line.error(start, "no restriction table possible in dimension 1"));
            }
            let Some(prev) = rows.last_mut() else {
                return Err(line.error(start, "restriction block before any row"));
            };
            if prev.step.restriction.is_some() {
                return Err(line.error(start, "row already has a restriction block"));
            }
            *pos += 1;
            let inner = parse_table(lines, pos, dim - 1, order, true)?;
            match lines.get(*pos) {
                Some(close) if close.trimmed() == "}" => *pos += 1,
                Some(other) => return Err(other.error(other.indent() + 1, "expected '}'")),
                None => return Err(ParseError::new(line.number, start, "unclosed '{'")),
            }
            if inner.final_exponents != prev.step.restriction_exponents {
                return Err(line.error(
                    start,
                    format!(
                        "restriction block ends with {{{}}} but the row says {{{}}}",
                        inner.final_exponents, prev.step.restriction_exponents
                    ),
                ));
            }
            prev.step.restriction = Some(Box::new(inner.certificate()));
            continue;
        }
        if t == "}" {
            let message = if nested { "block ended before its final row" } else { "unmatched '}'" };
            return Err(line.error(start, message));
        }
        if t.starts_with("dim") || t.starts_with("order") {
            return Err(line.error(start, "header lines must come first"));
        }
        let cols = split_columns(line.text, '|', 1);
        let (deleted, (form_text, form_col), (exp_text, exp_col)) = match cols.as_slice() {
            [f, e] => (None, *f, *e),
            [d, f, e] => (Some(*d), *f, *e),
            _ => return Err(line.error(start, "expected '<form> | <exponents>' or '<exponents> | <form> | <exponents>'")),
        };
        let deleted_exponents = match deleted {
            Some((text, col)) => {
                let e = parse_exponents(text, line.number, col)?;
                if e.len() != dim {
                    return Err(line.error(col + leading_ws(text), format!("expected {dim} exponents, found {}", e.len())));
                }
                Some(e)
            }
            None => None,
        };
        let form = parse_form(
            form_text.trim(),
            dim,
            order,
            Span::new(line.number, form_col + leading_ws(form_text)),
        )?;
        let restriction_exponents = parse_exponents(exp_text, line.number, exp_col)?;
        if restriction_exponents.len() + 1 != dim {
            return Err(line.error(
                exp_col + leading_ws(exp_text),
                format!("expected {} restriction exponents, found {}", dim - 1, restriction_exponents.len()),
            ));
        }
        if rows.iter().any(|r| r.step.form == form) {
            return Err(line.error(form_col + leading_ws(form_text), format!("hyperplane {form} listed twice")));
        }
        rows.push(TableRow {
            deleted_exponents,
            step: InductionStep {
                form,
                restriction_exponents,
                restriction: None,
            },
            line: line.number,
        });
        *pos += 1;
    }
}
