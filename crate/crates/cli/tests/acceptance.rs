//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use serde_json::Value;

use indfree::catalog::{
    braid, classify, monomial_certificate, monomial_full, monomial_full_exponents, monomial_rr,
    table_arrangement, table_certificate, GroupDescriptor, NamedTable,
};
use indfree::exactnum::{CycNum, Rational};
use indfree::freeness::{
    check_hif, nonfree_witness, not_if_by_restriction, replay_certificate, search_if,
    FreenessVerdict, HifMode, HifVerdict, NonFreeWitness, SearchConfig, SearchEngine,
};
use indfree::geometry::forms_equal_as_sets;
use indfree::lattice::{exponents_from_factorization, intersection_lattice, poincare_polynomial};
use indfree::syntax::{parse_linear_expression, Span};
use indfree::{Arrangement, ExponentMultiset, LinearForm};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

struct Run {
    code: i32,
    stdout: String,
}

fn indfree(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_indfree"))
        .args(args)
        .current_dir(workspace())
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
    }
}

fn workspace() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn json(run: &Run) -> Result<Value, String> {
    serde_json::from_str(&run.stdout).map_err(|e| format!("bad JSON output: {e}"))
}

fn form(text: &str, dim: usize) -> LinearForm {
    let raw = parse_linear_expression(text, dim, 1, Span::new(1, 1)).expect("valid form");
    LinearForm::normalize(raw).expect("nonzero")
}

fn ms(v: &[u64]) -> ExponentMultiset {
    ExponentMultiset::new(v.to_vec())
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, format!("took {took:.1?}, limit {limit:?}"))
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let run = indfree(&["verify-table", "table:if-not-hif", "tables/if_not_hif.tbl"]);
    ensure(run.code == 0, format!("verify-table exited {}", run.code))?;
    let expected = [
        "0, 0, 0, 0", "0, 0, 0, 1", "0, 0, 1, 1", "0, 1, 1, 1", "1, 1, 1, 1", "1, 1, 1, 2",
        "1, 1, 2, 2", "1, 2, 2, 2", "1, 2, 2, 3", "1, 2, 3, 3",
    ];
    let lines: Vec<&str> = run.stdout.lines().collect();
    ensure(lines.len() == 11, format!("{} output lines", lines.len()))?;
    for (i, (line, exp)) in lines.iter().zip(expected).enumerate() {
        ensure(line.starts_with(&format!("{exp} |")), format!("row {}: '{line}'", i + 1))?;
    }
    ensure(lines[10] == "= 1, 3, 3, 3", format!("final row '{}'", lines[10]))?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("10 rows reproduced, final {{1,3,3,3}} in {:.2?}", start.elapsed()))
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let run = indfree(&["check-if", "table:if-not-hif"]);
    ensure(run.code == 0, format!("check-if exited {}", run.code))?;
    ensure(
        run.stdout.starts_with("inductively free, exponents 1, 3, 3, 3"),
        run.stdout.lines().next().unwrap_or("").to_string(),
    )?;
    let run = indfree(&["check-hif", "table:if-not-hif", "--format", "json"]);
    ensure(run.code == 1, format!("check-hif exited {}", run.code))?;
    let report = json(&run)?;
    ensure(
        report["verdict"] == "not-hereditarily-inductively-free",
        format!("verdict {}", report["verdict"]),
    )?;
    let ker_d = serde_json::to_value(form("d", 4)).unwrap();
    let entry = report["entries"]
        .as_array()
        .and_then(|es| es.iter().find(|e| e["chain"] == Value::Array(vec![ker_d.clone()])))
        .ok_or("no entry for X = ker d")?;
    let witness = &entry["verdict"]["witness"];
    ensure(entry["verdict"]["status"] == "not-free", format!("{}", entry["verdict"]))?;
    ensure(witness["kind"] == "deletion-restriction", format!("{witness}"))?;
    ensure(
        witness["hyperplane"] == serde_json::to_value(form("c", 3)).unwrap(),
        format!("witness hyperplane {}", witness["hyperplane"]),
    )?;
    ensure(
        witness["deleted_exponents"] == serde_json::json!([1, 2, 2])
            && witness["restriction_exponents"] == serde_json::json!([1, 3]),
        format!("{witness}"),
    )?;

    let a = table_arrangement(NamedTable::IfNotHif);
    let b = a.restrict(&form("d", 4)).unwrap().arrangement;
    let w = nonfree_witness(&b, &form("c", 3), &SearchEngine::default()).unwrap();
    ensure(
        w == Some(NonFreeWitness::DeletionRestriction {
            hyperplane: form("c", 3),
            deleted_exponents: ms(&[1, 2, 2]),
            restriction_exponents: ms(&[1, 3]),
        }),
        format!("library witness {w:?}"),
    )?;
    within(start, Duration::from_secs(10))?;
    Ok(format!(
        "IF with {{1,3,3,3}}; not HIF at A^(ker d), exp B' = {{1,2,2}}, exp B'' = {{1,3}} in {:.2?}",
        start.elapsed()
    ))
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let run = indfree(&["check-if", "rr:3,3"]);
    ensure(run.code == 1, format!("check-if exited {}", run.code))?;
    ensure(
        run.stdout.starts_with("not inductively free"),
        run.stdout.trim().to_string(),
    )?;
    let plain = search_if(
        &monomial_rr(3, 3),
        SearchConfig {
            exponent_pruning: false,
            low_rank_shortcut: false,
            ..SearchConfig::default()
        },
    );
    ensure(
        matches!(plain, FreenessVerdict::NotInductivelyFree { .. }),
        format!("unpruned backtracking: {plain:?}"),
    )?;
    let run = indfree(&["charpoly", "rr:3,3"]);
    ensure(
        run.stdout.trim() == "1 + 9t + 24t² + 16t³ = (1+t)(1+4t)²",
        run.stdout.trim().to_string(),
    )?;
    ensure(
        not_if_by_restriction(&ms(&[1, 4, 4]), &ms(&[1, 3]), true).unwrap(),
        "criterion silent on {1,3} vs {1,4,4}",
    )?;
    within(start, Duration::from_secs(60))?;
    let nodes = match plain {
        FreenessVerdict::NotInductivelyFree { nodes } => nodes,
        _ => 0,
    };
    Ok(format!(
        "NotIF (unpruned backtracking: {nodes} nodes); (1+t)(1+4t)²; {{1,3}} ⊄ {{1,4,4}} in {:.2?}",
        start.elapsed()
    ))
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let engine = SearchEngine::default();
    for (r, l) in [(3u32, 2usize), (4, 2), (3, 3), (4, 3)] {
        let a = monomial_full(r, l);
        let verdict = search_if(&a, SearchConfig::default());
        let found = verdict
            .certificate()
            .map(|c| c.final_exponents.clone())
            .ok_or(format!("A_{l}({r}): {verdict:?}"))?;
        ensure(
            found == monomial_full_exponents(r, l),
            format!("A_{l}({r}) exponents {found:?}"),
        )?;
        let report = replay_certificate(&a, &monomial_certificate(r, l), &engine)
            .map_err(|e| format!("A_{l}({r}) table: {e}"))?;
        // Rows of layer k restrict to A_{k-1}(r) × Φ_{l-k}.
        let mut row = 0;
        for k in 1..=l {
            let expected = monomial_full(r, k - 1)
                .product(&Arrangement::empty(l - k, r))
                .unwrap();
            for _ in 0..1 + (k - 1) * r as usize {
                ensure(
                    forms_equal_as_sets(&report.rows[row].restriction, &expected),
                    format!("A_{l}({r}) row {}", row + 1),
                )?;
                row += 1;
            }
        }
        ensure(row == a.len(), "row count")?;
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!(
        "A_2(3), A_2(4), A_3(3), A_3(4) IF with closed-form exponents; layered tables replay in {:.2?}",
        start.elapsed()
    ))
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let run = indfree(&["verify-table", "table:g26", "tables/g26.tbl"]);
    ensure(run.code == 0, format!("verify-table exited {}", run.code))?;
    let lines: Vec<&str> = run.stdout.lines().collect();
    ensure(lines.len() == 22, format!("{} output lines", lines.len()))?;
    ensure(lines[21] == "= 1, 7, 13", lines[21].to_string())?;
    let a = table_arrangement(NamedTable::G26);
    let short = check_hif(&a, &SearchEngine::default(), HifMode::Shortcuts);
    let unshortcut = SearchEngine::new(SearchConfig {
        low_rank_shortcut: false,
        ..SearchConfig::default()
    });
    let direct = check_hif(&a, &unshortcut, HifMode::Direct);
    ensure(
        short.verdict == HifVerdict::HereditarilyInductivelyFree
            && direct.verdict == HifVerdict::HereditarilyInductivelyFree,
        format!("{:?} / {:?}", short.verdict, direct.verdict),
    )?;
    within(start, Duration::from_secs(60))?;
    Ok(format!(
        "21 rows to {{1,7,13}}; HIF by shortcut and by searching all {} restrictions in {:.2?}",
        direct.lattice_size,
        start.elapsed()
    ))
}

fn criterion_6() -> Check {
    let start = Instant::now();
    let run = indfree(&["verify-table", "table:g32", "tables/g32.tbl"]);
    ensure(run.code == 0, format!("verify-table exited {}", run.code))?;
    let last = run.stdout.lines().last().unwrap_or("").to_string();
    ensure(last == "= 1, 7, 13, 19", last)?;
    let engine = SearchEngine::default();
    let a = table_arrangement(NamedTable::G32);
    let report = replay_certificate(&a, &table_certificate(NamedTable::G32), &engine)
        .map_err(|e| e.to_string())?;
    ensure(report.rows.len() == 40, "row count")?;
    let g26 = table_arrangement(NamedTable::G26);
    let g26_lattice = intersection_lattice(&g26).len();
    let target = ms(&[1, 7, 13]);
    let mut flagged = 0;
    for (i, row) in report.rows.iter().enumerate() {
        if row.restriction_exponents != target {
            continue;
        }
        flagged += 1;
        ensure(row.restriction.len() == 21, format!("row {} size", i + 1))?;
        ensure(
            intersection_lattice(&row.restriction).len() == g26_lattice,
            format!("row {} lattice", i + 1),
        )?;
        ensure(
            exponents_from_factorization(&poincare_polynomial(&row.restriction), 3)
                == Some(target.clone()),
            format!("row {} exponents", i + 1),
        )?;
    }
    within(start, Duration::from_secs(15 * 60))?;
    Ok(format!(
        "40 rows to {{1,7,13,19}}; {flagged} restrictions match G26 (21 hyperplanes, {g26_lattice} flats) in {:.2?}",
        start.elapsed()
    ))
}

fn criterion_7() -> Check {
    let start = Instant::now();
    let engine = SearchEngine::default();
    let mut corpus: Vec<(String, Arrangement)> = Vec::new();
    for l in 1..=6 {
        corpus.push((format!("braid({l})"), braid(l)));
    }
    for r in 1..=4 {
        for l in 1..=3 {
            corpus.push((format!("A_{l}({r})"), monomial_full(r, l)));
        }
    }
    corpus.push(("D4".into(), monomial_rr(2, 4)));
    corpus.push(("G(4,4,2)".into(), monomial_rr(4, 2)));
    corpus.push(("B3 x A_2(3)".into(), monomial_full(2, 3).lift_order(6).unwrap()
        .product(&monomial_full(3, 2).lift_order(6).unwrap()).unwrap()));
    let mut certified = Vec::new();
    for (name, a) in &corpus {
        if let FreenessVerdict::InductivelyFree(c) = engine.search(a) {
            certified.push((name.clone(), a.clone(), c.final_exponents));
        }
    }
    for t in NamedTable::ALL {
        let a = table_arrangement(t);
        let report = replay_certificate(&a, &table_certificate(t), &engine)
            .map_err(|e| format!("{}: {e}", t.name()))?;
        certified.push((t.name().to_string(), a, report.final_exponents));
    }
    for (name, a, exps) in &certified {
        let factored = exponents_from_factorization(&poincare_polynomial(a), a.dim());
        ensure(
            factored.as_ref() == Some(exps),
            format!("{name}: certificate {exps:?}, factorization {factored:?}"),
        )?;
    }
    Ok(format!(
        "{} certified arrangements, factorization equals certificate exponents ({:.2?})",
        certified.len(),
        start.elapsed()
    ))
}

fn criterion_8() -> Check {
    let start = Instant::now();
    let mut cases: Vec<(String, bool)> = Vec::new();
    for l in 2..=6 {
        cases.push((format!("braid:{l}"), true));
    }
    for r in 2..=6 {
        for l in 1..=6 {
            cases.push((format!("G({r},1,{l})"), true));
        }
    }
    for r in 2..=6 {
        for l in 2..=6 {
            cases.push((format!("G({r},{r},{l})"), r < 3 || l < 3));
        }
    }
    for k in 4..=37u32 {
        cases.push((format!("G{k}"), ![24, 27, 29, 31, 33, 34].contains(&k)));
    }
    for (p, expected) in [
        ("G(3,3,3) x S3", false),
        ("B3 x G26", true),
        ("G24 * A2", false),
        ("G32 × G(4,1,2)", true),
        ("D4 x E8 x H3", true),
        ("G(5,5,4) x G31", false),
    ] {
        cases.push((p.to_string(), expected));
    }
    for (desc, expected) in &cases {
        let g: GroupDescriptor = desc.parse().map_err(|e| format!("{desc}: {e}"))?;
        let got = classify(&g).inductively_free;
        ensure(got == *expected, format!("{desc}: got {got}"))?;
    }
    let run = indfree(&["classify", "rr:3,3"]);
    ensure(run.code == 1, format!("classify rr:3,3 exited {}", run.code))?;
    ensure(run.stdout.contains("G(r,r,ℓ), r,ℓ ≥ 3"), run.stdout.clone())?;
    let run = indfree(&["classify", "G32"]);
    ensure(run.code == 0, format!("classify G32 exited {}", run.code))?;
    Ok(format!("{} descriptors match in {:.2?}", cases.len(), start.elapsed()))
}

fn small_arrangement(max_dim: usize, max_forms: usize) -> impl Strategy<Value = Arrangement> {
    (1..=max_dim).prop_flat_map(move |dim| {
        prop::collection::vec(prop::collection::vec(-2i64..=2, dim), 0..=max_forms).prop_map(
            move |raw| {
                let forms = raw
                    .into_iter()
                    .filter(|v| v.iter().any(|&x| x != 0))
                    .map(|v| v.into_iter().map(|x| CycNum::from_integer(x, 1)).collect());
                Arrangement::from_forms(dim, 1, forms).unwrap()
            },
        )
    })
}

fn cycnum(order: u32) -> impl Strategy<Value = CycNum> {
    prop::collection::vec((-6i64..=6, 1i64..=4), order as usize).prop_map(move |parts| {
        let coeffs: Vec<Rational> = parts
            .into_iter()
            .map(|(n, d)| Rational::new(n.into(), d.into()))
            .collect();
        indfree::exactnum::reduce_mod_cyclotomic(&coeffs, order).unwrap()
    })
}

fn criterion_9() -> Check {
    let start = Instant::now();
    let cases = 1000;
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&(small_arrangement(3, 5), small_arrangement(2, 4)), |(a1, a2)| {
            let engine = SearchEngine::default();
            let p = a1.product(&a2).unwrap();
            prop_assert_eq!(p.len(), a1.len() + a2.len());
            prop_assert_eq!(
                intersection_lattice(&p).len(),
                intersection_lattice(&a1).len() * intersection_lattice(&a2).len()
            );
            let (v1, v2, vp) = (engine.search(&a1), engine.search(&a2), engine.search(&p));
            prop_assert_eq!(
                vp.is_inductively_free(),
                v1.is_inductively_free() && v2.is_inductively_free()
            );
            if let (Some(c1), Some(c2), Some(cp)) = (v1.certificate(), v2.certificate(), vp.certificate()) {
                prop_assert_eq!(&cp.final_exponents, &c1.final_exponents.union(&c2.final_exponents));
            }
            Ok(())
        })
        .map_err(|e| format!("product laws: {e}"))?;
    runner
        .run(
            &(prop::collection::vec(0u64..5, 0..6), prop::collection::vec(0u64..5, 0..6)),
            |(a, b)| {
                let expected = (0..5).all(|v| {
                    a.iter().filter(|&&x| x == v).count() <= b.iter().filter(|&&x| x == v).count()
                });
                prop_assert_eq!(ms(&a).is_submultiset_of(&ms(&b)), expected);
                Ok(())
            },
        )
        .map_err(|e| format!("multiset containment: {e}"))?;
    let scaled_forms = (1u32..=6).prop_flat_map(|n| (prop::collection::vec(cycnum(n), 3), cycnum(n)));
    runner
        .run(&scaled_forms, |(raw, scalar)| {
            if raw.iter().all(CycNum::is_zero) || scalar.is_zero() {
                return Ok(());
            }
            let f = LinearForm::normalize(raw.clone()).unwrap();
            let g = LinearForm::normalize(raw.iter().map(|c| &scalar * c).collect()).unwrap();
            prop_assert_eq!(f, g);
            Ok(())
        })
        .map_err(|e| format!("normalization: {e}"))?;
    within(start, Duration::from_secs(60))?;
    Ok(format!("3 suites × {cases} cases in {:.2?}", start.elapsed()))
}

type Criterion = (u32, &'static str, fn() -> Check);

fn main() {
    // The harness is `cargo test`-compatible: ignore its flags, honor a
    // criterion-number filter.
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let criteria: [Criterion; 9] = [
        (1, "four-dimensional table replay", criterion_1),
        (2, "IF but not HIF", criterion_2),
        (3, "G(3,3,3) refutation", criterion_3),
        (4, "monomial family", criterion_4),
        (5, "G26 table and HIF", criterion_5),
        (6, "G32 table", criterion_6),
        (7, "Poincaré factorization", criterion_7),
        (8, "classification", criterion_8),
        (9, "property suites", criterion_9),
    ];
    let mut failed = 0;
    for (n, name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == &n.to_string()) {
            continue;
        }
        match check() {
            Ok(detail) => println!("criterion {n} ({name}): PASS: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n} ({name}): FAIL: {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
