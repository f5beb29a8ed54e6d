use std::time::Instant;

use indfree::catalog::{
    braid, monomial_full, monomial_full_exponents, monomial_rr, monomial_rr_exponents,
    monomial_rr_restriction_exponents, table_arrangement, NamedTable,
};
use indfree::freeness::{
    check_hif, not_if_by_restriction, replay_certificate, search_if, ElementVerdict,
    FreenessVerdict, HifMode, HifVerdict, NonFreeWitness, SearchConfig, SearchEngine,
};
use indfree::lattice::{exponents_from_factorization, poincare_polynomial};
use indfree::syntax::{parse_linear_expression, Span};
use indfree::{Arrangement, LinearForm};

fn form(text: &str, dim: usize) -> LinearForm {
    LinearForm::normalize(parse_linear_expression(text, dim, 1, Span::new(1, 1)).unwrap()).unwrap()
}

fn certified(a: &Arrangement, config: SearchConfig) -> indfree::ExponentMultiset {
    let engine = SearchEngine::new(config);
    let verdict = engine.search(a);
    let cert = verdict.certificate().unwrap_or_else(|| panic!("{verdict:?}"));
    let report = replay_certificate(a, cert, &SearchEngine::default()).unwrap();
    assert_eq!(report.final_exponents, cert.final_exponents);
    assert_eq!(
        exponents_from_factorization(&poincare_polynomial(a), a.dim()),
        Some(cert.final_exponents.clone())
    );
    cert.final_exponents.clone()
}

#[test]
fn monomial_family_is_inductively_free() {
    for r in 1..=4 {
        for l in 1..=3 {
            let e = certified(&monomial_full(r, l), SearchConfig::default());
            assert_eq!(e, monomial_full_exponents(r, l), "r={r} l={l}");
        }
    }
    let plain = SearchConfig {
        exponent_pruning: false,
        low_rank_shortcut: false,
        ..SearchConfig::default()
    };
    assert_eq!(certified(&monomial_full(3, 3), plain), [1, 4, 7].into());
}

#[test]
fn braid_arrangements_are_inductively_free() {
    for l in 1..=5 {
        let e = certified(&braid(l), SearchConfig::default());
        assert_eq!(e, (0..l as u64).collect::<Vec<_>>().into());
    }
}

#[test]
fn g333_is_not_inductively_free() {
    let a = monomial_rr(3, 3);
    let verdict = search_if(&a, SearchConfig::default());
    assert!(
        matches!(verdict, FreenessVerdict::NotInductivelyFree { .. }),
        "{verdict:?}"
    );
    let plain = search_if(
        &a,
        SearchConfig {
            exponent_pruning: false,
            ..SearchConfig::default()
        },
    );
    assert!(
        matches!(plain, FreenessVerdict::NotInductivelyFree { .. }),
        "{plain:?}"
    );
    assert_eq!(
        exponents_from_factorization(&poincare_polynomial(&a), 3),
        Some(monomial_rr_exponents(3, 3))
    );
    let h = &a.forms()[0];
    let restricted = a.restrict(h).unwrap().arrangement;
    assert_eq!(restricted.len(), 4);
    assert_eq!(
        exponents_from_factorization(&poincare_polynomial(&restricted), 2),
        Some(monomial_rr_restriction_exponents(3, 3))
    );
    assert!(not_if_by_restriction(
        &monomial_rr_exponents(3, 3),
        &monomial_rr_restriction_exponents(3, 3),
        true
    )
    .unwrap());
}

#[test]
fn verdicts_agree_across_thread_counts() {
    for a in [monomial_rr(3, 3), monomial_full(3, 3), table_arrangement(NamedTable::IfNotHif)] {
        let one = search_if(&a, SearchConfig::default());
        let four = search_if(
            &a,
            SearchConfig {
                threads: 4,
                ..SearchConfig::default()
            },
        );
        assert_eq!(one.is_inductively_free(), four.is_inductively_free());
        assert_eq!(one.is_refuted(), four.is_refuted());
        if let Some(c) = four.certificate() {
            replay_certificate(&a, c, &SearchEngine::default()).unwrap();
        }
    }
}

#[test]
fn budget_produces_unknown_not_refutation() {
    let v = search_if(
        &monomial_full(3, 3),
        SearchConfig {
            budget: Some(2),
            ..SearchConfig::default()
        },
    );
    assert!(matches!(v, FreenessVerdict::Unknown { .. }), "{v:?}");
}

#[test]
fn four_dim_example_is_if_but_not_hif() {
    let start = Instant::now();
    let a = table_arrangement(NamedTable::IfNotHif);
    assert_eq!(certified(&a, SearchConfig::default()), [1, 3, 3, 3].into());
    let engine = SearchEngine::default();
    let report = check_hif(&a, &engine, HifMode::Shortcuts);
    assert_eq!(report.verdict, HifVerdict::NotHereditarilyInductivelyFree);
    let d = form("d", 4);
    let failure = report
        .failures()
        .find(|e| e.chain == vec![d.clone()])
        .expect("A^{ker d} fails");
    assert_eq!(failure.restriction_size, 6);
    match &failure.verdict {
        ElementVerdict::NotFree {
            witness:
                NonFreeWitness::DeletionRestriction {
                    hyperplane,
                    deleted_exponents,
                    restriction_exponents,
                },
        } => {
            assert_eq!(*hyperplane, form("c", 3));
            assert_eq!(*deleted_exponents, [1, 2, 2].into());
            assert_eq!(*restriction_exponents, [1, 3].into());
        }
        other => panic!("{other:?}"),
    }
    assert!(start.elapsed().as_secs() < 10);
}

#[test]
fn g26_is_hereditarily_inductively_free() {
    let a = table_arrangement(NamedTable::G26);
    let engine = SearchEngine::default();
    let short = check_hif(&a, &engine, HifMode::Shortcuts);
    let unshortcut = SearchEngine::new(SearchConfig {
        low_rank_shortcut: false,
        ..SearchConfig::default()
    });
    let direct = check_hif(&a, &unshortcut, HifMode::Direct);
    assert!(direct
        .entries
        .iter()
        .all(|e| matches!(e.verdict, ElementVerdict::InductivelyFree { .. })));
    assert_eq!(short.verdict, HifVerdict::HereditarilyInductivelyFree);
    assert_eq!(direct.verdict, HifVerdict::HereditarilyInductivelyFree);
    assert_eq!(short.lattice_size, direct.lattice_size);
}
