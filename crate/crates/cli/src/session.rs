//! Session state and statement execution.

use std::collections::BTreeMap;

use bvm_core::bsets::{BSet, BSystem};
use bvm_core::evaluator::{self, eval_bv, BvAssignment, HfAssignment};
use bvm_core::formula::{parse, Formula, Signature};
use bvm_core::posets::{FinPoset, DEFAULT_BAND_CAP};
use bvm_core::suites::{self, SuiteReport};
use bvm_core::{arrows, gen, BoolAlg, Elem, HfSet, SetId, Universe};
use serde::Serialize;
use serde_json::{json, Value};

use crate::script::{HfExpr, PosetSpec, SetExpr, Statement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Options {
    pub atoms: usize,
    /// Fragments hold sets of rank at most this.
    pub rank_max: usize,
    pub cap: u64,
    pub seed: u64,
    pub format: Format,
}

impl Default for Options {
    fn default() -> Self {
        Options { atoms: 2, rank_max: 3, cap: 200_000, seed: 0, format: Format::Text }
    }
}

/// Outcome of one statement.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub kind: &'static str,
    /// Verdict for checks.
    pub pass: Option<bool>,
    pub data: Value,
    pub text: String,
}

impl Record {
    fn new(kind: &'static str, data: Value, text: String) -> Self {
        Record { kind, pass: None, data, text }
    }

    fn check(kind: &'static str, pass: bool, data: Value, text: String) -> Self {
        Record { kind, pass: Some(pass), data, text: format!("{} {text}", if pass { "PASS" } else { "FAIL" }) }
    }
}

type Result<T> = std::result::Result<T, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

struct NamedBSet {
    set: BSet,
    symmdiff: bool,
}

/// Named objects over one algebra at a time.
pub struct Session {
    opts: Options,
    u: Universe,
    fragments: BTreeMap<usize, Vec<SetId>>,
    hf: BTreeMap<String, HfSet>,
    sets: BTreeMap<String, SetId>,
    bsets: BTreeMap<String, NamedBSet>,
    systems: BTreeMap<String, (BSystem, bool)>,
    posets: BTreeMap<String, FinPoset>,
}

const PREDICATE_TABLES: &[&str] = &["eq", "neq", "imp", "le", "val"];

impl Session {
    pub fn new(opts: Options) -> Result<Self> {
        let u = Universe::new(BoolAlg::new(opts.atoms).map_err(err)?);
        Ok(Session {
            opts,
            u,
            fragments: BTreeMap::new(),
            hf: BTreeMap::new(),
            sets: BTreeMap::new(),
            bsets: BTreeMap::new(),
            systems: BTreeMap::new(),
            posets: BTreeMap::new(),
        })
    }

    pub fn options(&self) -> &Options {
        &self.opts
    }

    fn alg(&self) -> &BoolAlg {
        self.u.algebra()
    }

    /// Switching algebras drops everything built over the old one.
    fn switch(&mut self, alg: BoolAlg) {
        self.u = Universe::new(alg);
        self.fragments.clear();
        self.sets.clear();
        self.bsets.clear();
        self.systems.clear();
    }

    fn fragment(&mut self, rank: usize) -> Result<Vec<SetId>> {
        if !self.fragments.contains_key(&rank) {
            let f = self.u.enumerate(rank + 1, self.opts.cap).map_err(err)?;
            self.fragments.insert(rank, f);
        }
        Ok(self.fragments[&rank].clone())
    }

    fn hf_named(&self, name: &str) -> Result<HfSet> {
        self.hf.get(name).cloned().ok_or_else(|| format!("no HF set named `{name}`"))
    }

    fn hf_of(&self, e: &HfExpr) -> Result<HfSet> {
        match e {
            HfExpr::Named(n) => self.hf_named(n),
            HfExpr::Literal(g) => HfSet::parse(g).map_err(err),
        }
    }

    fn set_of(&self, e: &SetExpr) -> Result<SetId> {
        match e {
            SetExpr::Named(n) => self.sets.get(n).copied().ok_or_else(|| format!("no set named `{n}`")),
            SetExpr::HatNamed(n) => Ok(self.u.canonical_name(&self.hf_named(n)?)),
            SetExpr::HatLiteral(g) => Ok(self.u.canonical_name(&HfSet::parse(g).map_err(err)?)),
        }
    }

    fn elem(&self, text: &str) -> Result<Elem> {
        self.alg().parse_elem(text).map_err(err)
    }

    fn literal(&self, e: Elem) -> String {
        e.literal(self.alg())
    }

    fn render(&self, x: SetId) -> Result<String> {
        self.u.render(x).map_err(err)
    }

    /// Explicit assignments, then session sets named like the remaining free variables.
    fn bv_assignment(&self, f: &Formula, pairs: &[(String, SetExpr)], skip: Option<&str>) -> Result<BvAssignment> {
        let mut a = BvAssignment::new();
        for (v, e) in pairs {
            a.insert(v.clone(), self.set_of(e)?);
        }
        for v in f.free_vars() {
            if a.contains_key(&v) || Some(v.as_str()) == skip {
                continue;
            }
            let id = self.sets.get(&v).ok_or_else(|| format!("variable `{v}` is not assigned and no set has that name"))?;
            a.insert(v, *id);
        }
        Ok(a)
    }

    fn set_formula(text: &str) -> Result<Formula> {
        parse(text, &Signature::empty()).map_err(|e| format!("in formula: {e}"))
    }

    fn per_atom_json(verdicts: &[bool]) -> Value {
        let m: serde_json::Map<String, Value> = verdicts.iter().enumerate().map(|(q, &b)| (BoolAlg::atom_name(q), Value::Bool(b))).collect();
        Value::Object(m)
    }

    fn suite_record(rep: &SuiteReport) -> Record {
        let mut text = format!("suite {} ({}): {} instances, {} cases, {} failed", rep.name, rep.title, rep.instances, rep.cases, rep.failed);
        for n in &rep.notes {
            text.push_str(&format!("\n  note: {n}"));
        }
        for f in &rep.failures {
            text.push_str(&format!("\n  failure: {f}"));
        }
        Record::check("suite", rep.passed(), serde_json::to_value(rep).expect("report serializes"), text)
    }

    pub fn execute(&mut self, st: &Statement) -> Result<Record> {
        match st {
            Statement::Algebra { name, atoms } => {
                let alg = BoolAlg::new(*atoms).map_err(err)?;
                let size = alg.size();
                self.switch(alg);
                Ok(Record::new("algebra", json!({"name": name, "atoms": atoms, "size": size.to_string()}), format!("algebra {name}: {atoms} atoms, {size} elements")))
            }
            Statement::AlgebraFrom { name, poset } => {
                let p = self.poset(poset)?;
                let comp = p.completion(DEFAULT_BAND_CAP).map_err(err)?;
                let atoms: Vec<Vec<&str>> = comp.lattice.atoms.iter().map(|&k| p.labels_of(k)).collect();
                let n = comp.alg.atom_count();
                self.switch(comp.alg);
                Ok(Record::new("algebra", json!({"name": name, "poset": poset, "atoms": n, "atom_bands": atoms}), format!("algebra {name}: completion of {poset}, {n} atoms")))
            }
            Statement::Hf { name, literal } => {
                let h = HfSet::parse(literal).map_err(err)?;
                let text = format!("hf {name} = {h} (rank {})", h.rank());
                let data = json!({"name": name, "set": h.to_string(), "rank": h.rank()});
                self.hf.insert(name.clone(), h);
                Ok(Record::new("hf", data, text))
            }
            Statement::Name { name, set } => {
                let id = self.set_of(set)?;
                self.bind(name, id)
            }
            Statement::Set { name, entries } => {
                let mut pairs = Vec::new();
                for (child, value) in entries {
                    pairs.push((self.set_of(child)?, self.elem(value)?));
                }
                let id = self.u.make(pairs).map_err(err)?;
                self.bind(name, id)
            }
            Statement::Show(e) => {
                let id = self.set_of(e)?;
                let dump = self.u.dump(id).map_err(err)?;
                let rank = self.u.rank(id).map_err(err)?;
                Ok(Record::new("show", json!({"id": id.to_string(), "rank": rank, "dump": dump}), format!("{id} = {} (rank {rank})", self.render(id)?)))
            }
            Statement::Eval { formula, assign } => {
                let f = Self::set_formula(formula)?;
                let a = self.bv_assignment(&f, assign, None)?;
                let mut data = json!({"formula": f.to_string()});
                let truth = if f.is_restricted() {
                    let r = evaluator::check_los(&self.u, &f, &a).map_err(err)?;
                    data["per_atom"] = Self::per_atom_json(&r.per_atom);
                    r.truth
                } else {
                    let carrier = self.fragment(self.opts.rank_max)?;
                    data["carrier_rank"] = json!(self.opts.rank_max);
                    evaluator::eval_bv_over(&self.u, &f, &a, Some(&carrier)).map_err(err)?
                };
                data["truth"] = json!(truth);
                Ok(Record::new("eval", data, format!("[[{f}]] = {}", self.literal(truth))))
            }
            Statement::CheckLos { formula, assign } => {
                let f = Self::set_formula(formula)?;
                let a = self.bv_assignment(&f, assign, None)?;
                let r = evaluator::check_los(&self.u, &f, &a).map_err(err)?;
                let pass = r.holds() && r.truth == r.oracle;
                let data = json!({"formula": f.to_string(), "truth": r.truth, "oracle": r.oracle, "per_atom": Self::per_atom_json(&r.per_atom)});
                Ok(Record::check("check", pass, data, format!("los {f}: value {}, satisfying atoms {}", self.literal(r.truth), self.literal(r.oracle))))
            }
            Statement::CheckTransfer { formula, assign } => {
                let f = Self::set_formula(formula)?;
                let mut args = HfAssignment::new();
                for (v, e) in assign {
                    args.insert(v.clone(), self.hf_of(e)?);
                }
                for v in f.free_vars() {
                    if !args.contains_key(&v) {
                        args.insert(v.clone(), self.hf_named(&v).map_err(|_| format!("variable `{v}` is not assigned and no HF set has that name"))?);
                    }
                }
                let r = evaluator::check_restricted_transfer(&self.u, &f, &args).map_err(err)?;
                let data = json!({"formula": f.to_string(), "classical": r.classical, "truth": r.truth});
                Ok(Record::check("check", r.holds, data, format!("transfer {f}: classically {}, value {}", r.classical, self.literal(r.truth))))
            }
            Statement::CheckValue { formula, assign, expected } => {
                let f = Self::set_formula(formula)?;
                let a = self.bv_assignment(&f, assign, None)?;
                let want = self.elem(expected)?;
                let truth = eval_bv(&self.u, &f, &a).map_err(err)?;
                let data = json!({"formula": f.to_string(), "truth": truth, "expected": want});
                Ok(Record::check("check", truth == want, data, format!("[[{f}]] = {}, expected {}", self.literal(truth), self.literal(want))))
            }
            Statement::CheckRefined(name) => {
                let p = self.poset(name)?;
                let r = p.is_refined(DEFAULT_BAND_CAP, 500, &mut gen::rng(self.opts.seed)).map_err(err)?;
                let data = json!({"poset": name, "report": r, "all_agree": r.all_agree()});
                Ok(Record::check("check", r.refined(), data, format!("{name} refined: {}", r.refined())))
            }
            Statement::Suite(name) => {
                let rep = suites::run(name, self.opts.seed).ok_or_else(|| format!("unknown suite `{name}`; known: {}", suites::names().collect::<Vec<_>>().join(", ")))?;
                Ok(Self::suite_record(&rep))
            }
            Statement::Maximize { formula, var, rank, assign } => {
                let f = Self::set_formula(formula)?;
                let a = self.bv_assignment(&f, assign, Some(var))?;
                let rank = rank.unwrap_or(self.opts.rank_max);
                let frag = self.fragment(rank)?;
                let w = evaluator::find_max_witness(&self.u, &f, var, &a, &frag).map_err(err)?;
                let data = json!({"formula": f.to_string(), "var": var, "rank": rank, "witness_id": w.witness.to_string(), "witness": self.render(w.witness)?, "value": w.value, "attained": w.attained});
                Ok(Record::new("maximize", data, format!("sup over rank <= {rank} of [[{f}]] = {}, attained at {var} = {} {}", self.literal(w.value), w.witness, self.render(w.witness)?)))
            }
            Statement::Descend { set, rank } => {
                let x = self.set_of(set)?;
                let rank = rank.unwrap_or(self.opts.rank_max);
                let frag = self.fragment(rank)?;
                let members = arrows::descent(&self.u, x, &frag).map_err(err)?;
                let listed: Vec<Value> = members.iter().map(|&m| Ok(json!({"id": m.to_string(), "set": self.render(m)?}))).collect::<Result<_>>()?;
                let mut text = format!("descent of {x} within rank <= {rank}: {} members", members.len());
                for m in &members {
                    text.push_str(&format!("\n  {m} = {}", self.render(*m)?));
                }
                Ok(Record::new("descend", json!({"set": x.to_string(), "rank": rank, "members": listed}), text))
            }
            Statement::Ascend { name, sets } => {
                let xs: Vec<SetId> = sets.iter().map(|e| self.set_of(e)).collect::<Result<_>>()?;
                let up = self.u.canonical(arrows::ascent(&self.u, &xs).map_err(err)?).map_err(err)?;
                if let Some(n) = name {
                    self.sets.insert(n.clone(), up);
                }
                Ok(Record::new("ascend", json!({"name": name, "id": up.to_string(), "set": self.render(up)?}), format!("ascent = {up} {}", self.render(up)?)))
            }
            Statement::EscherCheck { rank, samples } => {
                let rank = rank.unwrap_or(self.opts.rank_max);
                if rank == 0 {
                    return Err("escher-check needs rank at least 1 so that the fragment has a nonempty set".into());
                }
                let frag = self.fragment(rank)?;
                let rep = suites::escher_on(&[(&self.u, &frag)], samples.unwrap_or(100), self.opts.seed);
                Ok(Self::suite_record(&rep))
            }
            Statement::BSetDiscrete { name, points } => {
                let s = BSet::discrete(self.alg(), *points);
                self.bset_record(name, s, false)
            }
            Statement::BSetSymmdiff { name } => {
                let s = BSet::symmdiff(self.alg());
                self.bset_record(name, s, true)
            }
            Statement::BSystem { name, over, sig, interp } => self.bsystem(name, over, sig, interp),
            Statement::BEval { system, formula, assign } => {
                let (s, symmdiff) = self.systems.get(system).ok_or_else(|| format!("no B-system named `{system}`"))?;
                let f = parse(formula, s.signature()).map_err(|e| format!("in formula: {e}"))?;
                let mut a = BTreeMap::new();
                for (v, label) in assign {
                    a.insert(v.clone(), self.point(s.base(), *symmdiff, label)?);
                }
                let truth = s.truth(&f, &a).map_err(err)?;
                Ok(Record::new("beval", json!({"system": system, "formula": f.to_string(), "truth": truth}), format!("|{f}| = {}", self.literal(truth))))
            }
            Statement::Poset { name, spec } => {
                let mut warning = None;
                let p = match spec {
                    PosetSpec::Chain(k) => FinPoset::chain(*k),
                    PosetSpec::Antichain(k) => FinPoset::antichain(*k),
                    PosetSpec::Forcing { n, m, kappa } => {
                        if kappa.is_some_and(|k| k > *n) {
                            warning = Some(format!("domain bound {} exceeds n = {n}, so the poset is the full forcing poset; infinite-bound phenomena are out of scope", kappa.unwrap_or_default()));
                        }
                        let cap = usize::try_from(self.opts.cap).unwrap_or(usize::MAX);
                        FinPoset::forcing(*n, *m, *kappa, cap).map_err(err)?
                    }
                };
                let mut text = format!("poset {name}: {} elements", p.len());
                if let Some(w) = &warning {
                    text.push_str(&format!("\n  warning: {w}"));
                }
                let data = json!({"name": name, "elements": p.len(), "labels": p.labels(), "warning": warning});
                self.posets.insert(name.clone(), p);
                Ok(Record::new("poset", data, text))
            }
            Statement::Complete(name) => {
                let p = self.poset(name)?;
                let comp = p.completion(DEFAULT_BAND_CAP).map_err(err)?;
                let dot = p.completion_dot(DEFAULT_BAND_CAP).map_err(err)?;
                let atoms: Vec<Vec<&str>> = comp.lattice.atoms.iter().map(|&k| p.labels_of(k)).collect();
                let shown: Vec<String> = atoms.iter().map(|a| format!("{{{}}}", a.join(","))).collect();
                let data = json!({"poset": name, "atoms": comp.alg.atom_count(), "size": comp.alg.size().to_string(), "atom_bands": atoms, "dot": dot});
                Ok(Record::new("complete", data, format!("completion of {name}: {} elements, atoms {}\n{}", comp.alg.size(), shown.join(" "), dot.trim_end())))
            }
            Statement::Refined(name) => {
                let p = self.poset(name)?;
                let r = p.is_refined(DEFAULT_BAND_CAP, 500, &mut gen::rng(self.opts.seed)).map_err(err)?;
                let text = format!(
                    "{name}: refined {}; separation {}, interval {}, injective {}, dense embedding {}{}",
                    r.refined(),
                    r.separation,
                    r.interval,
                    r.injective,
                    r.dense_embedding,
                    if r.density_exhaustive { "" } else { " (density sampled)" }
                );
                Ok(Record::new("refined", json!({"poset": name, "report": r, "all_agree": r.all_agree()}), text))
            }
        }
    }

    fn bind(&mut self, name: &str, id: SetId) -> Result<Record> {
        self.sets.insert(name.to_string(), id);
        let rank = self.u.rank(id).map_err(err)?;
        let shown = self.render(id)?;
        Ok(Record::new("set", json!({"name": name, "id": id.to_string(), "rank": rank, "set": shown}), format!("{name} = {id} {shown}")))
    }

    fn poset(&self, name: &str) -> Result<FinPoset> {
        self.posets.get(name).cloned().ok_or_else(|| format!("no poset named `{name}`"))
    }

    fn bset_record(&mut self, name: &str, s: BSet, symmdiff: bool) -> Result<Record> {
        let data = json!({"name": name, "points": s.len(), "labels": s.labels()});
        let text = format!("B-set {name}: {} points", s.len());
        self.bsets.insert(name.to_string(), NamedBSet { set: s, symmdiff });
        Ok(Record::new("bset", data, text))
    }

    /// A point by label; on the algebra itself any element literal names its point.
    fn point(&self, s: &BSet, symmdiff: bool, label: &str) -> Result<usize> {
        if let Some(i) = s.index_of(label) {
            return Ok(i);
        }
        if symmdiff {
            if let Ok(e) = self.alg().parse_elem(label) {
                return Ok(e.bits() as usize);
            }
        }
        Err(format!("no point labelled `{label}`; points are {}", s.labels().join(" ")))
    }

    fn bsystem(&mut self, name: &str, over: &str, sig: &[(String, usize)], interp: &[(String, String)]) -> Result<Record> {
        let base = self.bsets.get(over).ok_or_else(|| format!("no B-set named `{over}`"))?;
        let (s, symmdiff) = (&base.set, base.symmdiff);
        let alg = *self.alg();
        let n = s.len();
        let elems: Vec<Elem> = alg.elements().collect();
        let need_symmdiff = |table: &str| if symmdiff { Ok(()) } else { Err(format!("table `{table}` needs the algebra as carrier (bset .. symmdiff)")) };
        let mut signature = Signature::empty();
        let mut ops = BTreeMap::new();
        let mut preds = BTreeMap::new();
        for (sym, arity) in sig {
            let table = interp.iter().find(|(k, _)| k == sym).map(|(_, v)| v.trim_end_matches("-table")).ok_or_else(|| format!("no interpretation for `{sym}`"))?;
            let tuples: Vec<Vec<usize>> = (0..n.pow(*arity as u32)).map(|i| (0..*arity).rev().map(|k| i / n.pow(k as u32) % n).collect()).collect();
            if PREDICATE_TABLES.contains(&table) {
                let values: Vec<Elem> = match (table, arity) {
                    ("eq", 2) => tuples.iter().map(|t| s.d(t[0], t[1]).complement(&alg).map_err(err)).collect::<Result<_>>()?,
                    ("neq", 2) => tuples.iter().map(|t| s.d(t[0], t[1])).collect(),
                    ("imp" | "le", 2) => {
                        need_symmdiff(table)?;
                        tuples.iter().map(|t| elems[t[0]].imp(elems[t[1]], &alg).map_err(err)).collect::<Result<_>>()?
                    }
                    ("val", 1) => {
                        need_symmdiff(table)?;
                        tuples.iter().map(|t| elems[t[0]]).collect()
                    }
                    _ => return Err(format!("table `{table}` does not have arity {arity}")),
                };
                signature = signature.with_predicate(sym, *arity);
                preds.insert(sym.clone(), values);
            } else {
                let values: Vec<usize> = match (table, arity) {
                    (label, 0) => vec![self.point(s, symmdiff, label)?],
                    ("ident", 1) => tuples.iter().map(|t| t[0]).collect(),
                    ("compl", 1) => {
                        need_symmdiff(table)?;
                        tuples.iter().map(|t| elems[t[0]].complement(&alg).map(|e| e.bits() as usize).map_err(err)).collect::<Result<_>>()?
                    }
                    ("meet" | "join", 2) => {
                        need_symmdiff(table)?;
                        let meet = table == "meet";
                        tuples.iter().map(|t| (if meet { elems[t[0]].meet(elems[t[1]]) } else { elems[t[0]].join(elems[t[1]]) }).map(|e| e.bits() as usize).map_err(err)).collect::<Result<_>>()?
                    }
                    _ => return Err(format!("unknown table `{table}` of arity {arity}; predicates: eq neq imp le val; operations: ident compl meet join or a point label")),
                };
                signature = signature.with_function(sym, *arity);
                ops.insert(sym.clone(), values);
            }
        }
        for (k, _) in interp {
            if !sig.iter().any(|(s, _)| s == k) {
                return Err(format!("`{k}` is interpreted but not in the signature"));
            }
        }
        let system = BSystem::new(s.clone(), signature, ops, preds).map_err(err)?;
        self.systems.insert(name.to_string(), (system, symmdiff));
        let shown: Vec<String> = sig.iter().map(|(s, a)| format!("{s}/{a}")).collect();
        Ok(Record::new("bsystem", json!({"name": name, "over": over, "signature": shown}), format!("B-system {name} over {over}: {}", shown.join(", "))))
    }
}
