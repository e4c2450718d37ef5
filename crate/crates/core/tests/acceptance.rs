//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! The fiber and transfer criteria are checked against oracles local to this file
//! as well as the library suites. Set `ACCEPTANCE_SEED` to change the seed.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bvm_core::balg::BoolAlg;
use bvm_core::evaluator::{assign, eval_bv, BvAssignment};
use bvm_core::formula::{Formula, Term};
use bvm_core::gen;
use bvm_core::hf::HfSet;
use bvm_core::suites::{self, SuiteReport};
use bvm_core::universe::{SetId, Universe};
use rand::seq::SliceRandom;
use rand::Rng;

/// Fiber of a name at one atom, by direct recursion over its entries.
fn collapse(u: &Universe, q: usize, x: SetId) -> HfSet {
    let entries = u.entries(x).unwrap();
    HfSet::from_members(entries.into_iter().filter(|(_, b)| b.has_atom(q)).map(|(y, _)| collapse(u, q, y)))
}

fn var<'a>(env: &'a BTreeMap<String, HfSet>, t: &Term) -> &'a HfSet {
    match t {
        Term::Var(v) => &env[v],
        other => panic!("restricted formulas use variables only, found {other:?}"),
    }
}

/// Classical satisfaction over hereditarily finite sets.
fn sat(f: &Formula, env: &BTreeMap<String, HfSet>) -> bool {
    let bounded = |v: &str, t: &Term, body: &Formula, all: bool| {
        let mut inner = env.clone();
        let members: Vec<HfSet> = var(env, t).members().cloned().collect();
        let mut check = |m: HfSet| {
            inner.insert(v.to_string(), m);
            sat(body, &inner)
        };
        if all {
            members.into_iter().all(&mut check)
        } else {
            members.into_iter().any(&mut check)
        }
    };
    match f {
        Formula::Mem(a, b) => var(env, b).contains(var(env, a)),
        Formula::Eq(a, b) => var(env, a) == var(env, b),
        Formula::Not(g) => !sat(g, env),
        Formula::And(g, h) => sat(g, env) && sat(h, env),
        Formula::Or(g, h) => sat(g, env) || sat(h, env),
        Formula::Imp(g, h) => !sat(g, env) || sat(h, env),
        Formula::BoundedForall(v, t, body) => bounded(v, t, body, true),
        Formula::BoundedExists(v, t, body) => bounded(v, t, body, false),
        other => panic!("not a restricted formula: {other}"),
    }
}

type Criterion<'a> = (&'a str, Box<dyn Fn() -> Outcome>);

struct Outcome {
    ok: bool,
    detail: String,
}

fn suite(name: &str, seed: u64, min_instances: usize) -> (SuiteReport, Outcome) {
    let rep = suites::run(name, seed).expect("known suite");
    let ok = rep.passed() && rep.instances >= min_instances;
    let mut detail = format!("{} instances, {} cases, {} failed", rep.instances, rep.cases, rep.failed);
    if let Some(first) = rep.failures.first() {
        detail.push_str(&format!("; first failure: {first}"));
    }
    (rep, Outcome { ok, detail })
}

fn within(o: Outcome, start: Instant, limit: Duration) -> Outcome {
    let took = start.elapsed();
    Outcome { ok: o.ok && took < limit, detail: format!("{} in {:.2?} (limit {:?})", o.detail, took, limit) }
}

fn los(seed: u64) -> Outcome {
    let start = Instant::now();
    let mut rng = gen::rng(seed);
    let worlds: Vec<(Universe, Vec<SetId>)> = (1..=3)
        .map(|n| {
            let u = Universe::new(BoolAlg::new(n).unwrap());
            let frag = u.enumerate(4, 1 << 20).unwrap();
            (u, frag)
        })
        .collect();
    let mut failed = 0;
    let cases = 500;
    for i in 0..cases {
        let (u, frag) = &worlds[i % 3];
        let b = u.algebra();
        let f = gen::restricted_formula(&mut rng, 4, &["x", "y", "z"]);
        let mut a = BvAssignment::new();
        for v in ["x", "y", "z"] {
            let x = if rng.gen_ratio(1, 4) { gen::bv_name(&mut rng, u, 3) } else { *frag.choose(&mut rng).unwrap() };
            a.insert(v.to_string(), x);
        }
        let truth = eval_bv(u, &f, &a).unwrap();
        let satisfied = (0..b.atom_count()).filter(|&q| {
            let env: BTreeMap<String, HfSet> = a.iter().map(|(k, &x)| (k.clone(), collapse(u, q, x))).collect();
            sat(&f, &env)
        });
        if truth != b.from_atoms(satisfied).unwrap() {
            failed += 1;
        }
    }
    let (_, lib) = suite("los", seed, 500);
    let o = Outcome { ok: failed == 0 && lib.ok, detail: format!("{cases} cases against local fibers, {failed} failed; library suite: {}", lib.detail) };
    within(o, start, Duration::from_secs(60))
}

fn transfer(seed: u64) -> Outcome {
    let mut rng = gen::rng(seed ^ 0x5eed);
    let universes: Vec<Universe> = (1..=3).map(|n| Universe::new(BoolAlg::new(n).unwrap())).collect();
    let cases = 200;
    let mut failed = 0;
    for i in 0..cases {
        let u = &universes[i % 3];
        let f = gen::restricted_formula(&mut rng, 4, &["x", "y"]);
        let args = assign(&[("x", gen::hf_set(&mut rng, 3)), ("y", gen::hf_set(&mut rng, 3))]);
        let names = args.iter().map(|(k, h)| (k.clone(), u.canonical_name(h))).collect();
        let truth = eval_bv(u, &f, &names).unwrap();
        if sat(&f, &args) != (truth == u.algebra().one()) {
            failed += 1;
        }
    }
    let (_, lib) = suite("transfer", seed, 200);
    Outcome { ok: failed == 0 && lib.ok, detail: format!("{cases} cases against local classical evaluation, {failed} failed; library suite: {}", lib.detail) }
}

fn main() -> ExitCode {
    let seed = std::env::var("ACCEPTANCE_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0);
    println!("acceptance, seed {seed}");
    let criteria: Vec<Criterion> = vec![
        ("fiber soundness, 1-3 atoms", Box::new(move || los(seed))),
        ("restricted transfer", Box::new(move || transfer(seed))),
        // 64 exhaustive triples over 2 atoms plus 300 random triples over 2-3 atoms
        ("equality and scaling laws", Box::new(move || suite("laws", seed, 364).1)),
        ("ascent/descent cancellation", Box::new(move || suite("escher", seed, 100).1)),
        ("mixing reconstruction", Box::new(move || suite("mixing", seed, 100).1)),
        ("band algebras and refinedness", Box::new(move || {
            let start = Instant::now();
            // 25 posets up to isomorphism on at most 5 elements plus 200 random ones
            let (_, o) = suite("posets", seed, 225);
            let o = within(o, start, Duration::from_secs(120));
            // injectivity without separation first occurs on 6 elements, so larger samples can fail
            Outcome { ok: o.ok, detail: format!("{}; note: injectivity is weaker than the other three conditions from 6 elements on", o.detail) }
        })),
        ("forcing posets", Box::new(move || suite("forcing", seed, 9).1)),
        // 1 + 2 + 6 automorphisms
        ("automorphism ultrafilters", Box::new(move || suite("psi", seed, 9).1)),
        ("two-point descent, |B| <= 8", Box::new(move || suite("two-point", seed, 3).1)),
        ("B-set realization", Box::new(move || suite("realization", seed, 50).1)),
        ("classical B-systems", Box::new(move || suite("conventional", seed, 200).1)),
        ("maximum principle", Box::new(move || suite("maximum", seed, 100).1)),
    ];
    let mut failures = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let o = run();
        failures += !o.ok as usize;
        println!("{} criterion {}: {title}: {}", if o.ok { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
