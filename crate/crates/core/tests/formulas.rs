//! Parser and printer round trips and syntactic classes.

use bvm_core::formula::{parse, Formula, FormulaError, Signature};
use bvm_core::gen;
use proptest::prelude::*;

fn restricted(seed: u64, depth: usize) -> Formula {
    gen::restricted_formula(&mut gen::rng(seed), depth, &["x", "y", "z"])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parse_inverts_print(seed in any::<u64>(), depth in 0usize..=5) {
        let f = restricted(seed, depth);
        prop_assert_eq!(parse(&f.to_string(), &Signature::empty()).unwrap(), f);
    }

    #[test]
    fn parse_inverts_print_with_symbols(seed in any::<u64>(), depth in 0usize..=4) {
        let sig = gen::small_signature();
        let f = gen::signature_formula(&mut gen::rng(seed), depth, &["x"], &sig);
        prop_assert_eq!(parse(&f.to_string(), &sig).unwrap(), f);
    }

    #[test]
    fn print_is_stable_up_to_whitespace(seed in any::<u64>()) {
        let text = restricted(seed, 4).to_string();
        let spaced = text.replace(' ', "  ").replace('(', "( ");
        prop_assert_eq!(parse(&spaced, &Signature::empty()).unwrap().to_string(), text);
    }

    #[test]
    fn restricted_formulas_are_closed_under_connectives(a in any::<u64>(), b in any::<u64>()) {
        let (f, g) = (restricted(a, 3), restricted(b, 3));
        prop_assert!(f.is_restricted() && g.is_restricted());
        for h in [Formula::not(f.clone()), Formula::and(f.clone(), g.clone()), Formula::or(f.clone(), g.clone()), Formula::imp(f.clone(), g.clone()), Formula::forall_in("w", "x", f.clone()), Formula::exists_in("w", "y", g.clone())] {
            prop_assert!(h.is_restricted());
        }
        prop_assert!(!Formula::forall("w", f).is_restricted());
    }
}

#[test]
fn precedence_and_associativity() {
    let sig = Signature::empty();
    let p = |s: &str| parse(s, &sig).unwrap();
    assert_eq!(p("x in y -> y in z -> z in x"), p("x in y -> (y in z -> z in x)"));
    assert_eq!(p("~x = y /\\ y in z \\/ z in x"), p("((~(x = y)) /\\ y in z) \\/ z in x"));
    assert_eq!(p("forall u in x . u in y /\\ y in z"), p("forall u in x . (u in y /\\ y in z)"));
}

#[test]
fn errors_carry_positions() {
    let sig = Signature::empty().with_predicate("le", 2);
    match parse("x in y /\\\n  ", &sig) {
        Err(FormulaError::Syntax { line, .. }) => assert_eq!(line, 2),
        other => panic!("expected a syntax error, got {other:?}"),
    }
    assert!(matches!(parse("le(x)", &sig), Err(FormulaError::Arity { expected: 2, found: 1, .. })));
    assert!(matches!(parse("g(x) = x", &sig), Err(FormulaError::UnknownSymbol { .. })));
}

#[test]
fn free_variables_respect_binding() {
    let f = parse("forall u in x . exists v in u . v = y", &Signature::empty()).unwrap();
    assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), vec!["x".to_string(), "y".to_string()]);
    assert_eq!(f.depth(), 2);
}
