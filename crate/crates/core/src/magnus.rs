//! The Magnus–Moldavanskii hierarchy of a one-relator group and the
//! recursive word problem built on it.
//!
//! Subscript convention: with stable letter `t`, the generator `x_e` stands
//! for `t^e x t^{-e}`. Scanning the relator left to right with a running
//! `t`-exponent `e`, each other letter at level `e` becomes `x_e`. The HNN
//! relations are then `t · x_e · t⁻¹ = x_{e+1}`, so in the splitting
//! convention `t · h′ · t⁻¹ = h` the lower edge list plays `H′`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Mutex;

use serde::Serialize;
use thiserror::Error;

use crate::intmat::Lattice;
use crate::presentations::{abelian_invariants, fresh_generator, OneRelatorPresentation};
use crate::splittings::{
    bounded_membership, hnn_word_problem, syntactic_member, FactorOracle, FiniteBallOracle, HnnData, Membership,
    Verdict,
};
use crate::stallings::{build_and_fold, SubgroupGraph};
use crate::words::{subgroup_symbol, Generator, Letter, Word};
use crate::Limits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "type", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BaseDescription {
    Free { rank: usize },
    FreeTimesFiniteCyclic { rank: usize, k: u64 },
}

impl fmt::Display for BaseDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseDescription::Free { rank } => write!(f, "FREE({rank})"),
            BaseDescription::FreeTimesFiniteCyclic { rank, k } => write!(f, "FREE_TIMES_FINITE_CYCLIC({rank}, {k})"),
        }
    }
}

/// Recognizes the hierarchy's terminal groups: a relator with a generator
/// occurring exactly once (eliminate it, the group is free of rank `n − 1`)
/// or a relator `a^k` (`ℤ/k` free product with a free group of rank `n − 1`).
pub fn classify_base(p: &OneRelatorPresentation) -> Option<BaseDescription> {
    let n = p.alphabet().len();
    let r = p.relator();
    if single_occurrence(r).is_some() {
        return Some(BaseDescription::Free { rank: n - 1 });
    }
    let gens = r.generators();
    if gens.len() == 1 {
        let k = r.len() as u64;
        return Some(BaseDescription::FreeTimesFiniteCyclic { rank: n - 1, k });
    }
    None
}

/// First generator in canonical order occurring exactly once in `r`.
fn single_occurrence(r: &Word) -> Option<Generator> {
    r.generators().into_iter().find(|g| r.occurrences(g) == 1)
}

/// Tietze elimination of the single-occurrence generator `x`: writing
/// `r = u x^ε v`, returns `x ↦ u⁻¹ v⁻¹` (ε = 1) or `x ↦ v u` (ε = −1).
fn eliminate(r: &Word, x: &Generator) -> Word {
    let i = r.letters().iter().position(|l| &l.gen == x).expect("x occurs");
    let u = r.slice(0, i);
    let v = r.slice(i + 1, r.len());
    if r.letters()[i].inverse {
        v.concat(&u)
    } else {
        u.inverse().concat(&v.inverse())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StepKind {
    Moldavanskii,
    Stabilized,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepKind::Moldavanskii => "MOLDAVANSKII",
            StepKind::Stabilized => "STABILIZED",
        })
    }
}

/// One level of the hierarchy: the input group (or the input group free
/// product ℤ) is the HNN extension of `base` with stable letter `stable` and
/// `stable · edge_neg[i] · stable⁻¹ = edge_pos[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchyStep {
    pub kind: StepKind,
    pub input: OneRelatorPresentation,
    pub stable: Generator,
    /// Old generators as words in the new basis; empty for Moldavanskii steps.
    pub basis_change: BTreeMap<Generator, Word>,
    /// The relator over the new basis and the stable letter.
    pub rewritten: Word,
    pub base: OneRelatorPresentation,
    /// Base generators absent from the base relator (free factors).
    pub split_free_rank: usize,
    pub edge_neg: Vec<Generator>,
    pub edge_pos: Vec<Generator>,
    /// Input generators as words over the base generators and `stable`.
    pub reconstruction: BTreeMap<Generator, Word>,
}

impl HierarchyStep {
    pub fn hnn(&self) -> HnnData {
        HnnData::new(
            self.base.presentation().clone(),
            self.stable.clone(),
            self.edge_pos.iter().map(|g| Word::letter(g.pos())).collect(),
            self.edge_neg.iter().map(|g| Word::letter(g.pos())).collect(),
        )
        .expect("stable letter is not a base generator")
    }

    /// The base with its free factors split off: the next level's input.
    pub fn next_input(&self) -> OneRelatorPresentation {
        let occurring = self.base.occurring();
        OneRelatorPresentation::new(occurring, self.base.relator().clone()).expect("base relator")
    }

    /// Image of an input word in the HNN extension.
    pub fn rewrite(&self, w: &Word) -> Word {
        w.substitute(&self.reconstruction)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hierarchy {
    pub steps: Vec<HierarchyStep>,
    pub base: BaseDescription,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialHierarchy {
    pub steps: Vec<HierarchyStep>,
    pub stuck: OneRelatorPresentation,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MagnusError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("hierarchy limits exceeded after {} steps at {}", .0.steps.len(), .0.stuck)]
    LimitExceeded(Box<PartialHierarchy>),
}

/// Plain name for a possibly subscripted generator, so that it can receive a
/// new subscript: `a` stays `a`, `a_3` becomes `a3`, `a_-2` becomes `am2`.
/// Collisions with other names are resolved by appending `x`.
fn family_names(alphabet: &[Generator], families: &[Generator]) -> BTreeMap<Generator, String> {
    let mut taken: BTreeSet<String> = BTreeSet::new();
    let mut out = BTreeMap::new();
    for g in families {
        let mut cand = match g.subscript() {
            None => g.name().to_string(),
            Some(s) if s < 0 => format!("{}m{}", g.name(), -s),
            Some(s) => format!("{}{}", g.name(), s),
        };
        while taken.contains(&cand) || alphabet.iter().any(|h| h != g && h.name() == cand) {
            cand.push('x');
        }
        taken.insert(cand.clone());
        out.insert(g.clone(), cand);
    }
    out
}

/// Subscript rewriting with respect to a stable letter of exponent sum zero.
pub fn moldavanskii_step(p: &OneRelatorPresentation, t: &Generator) -> Result<HierarchyStep, MagnusError> {
    let r = p.relator();
    if !r.contains_generator(t) {
        return Err(MagnusError::Precondition(format!("{t} does not occur in the relator")));
    }
    if r.exponent_sum(t) != 0 {
        return Err(MagnusError::Precondition(format!("exponent sum of {t} is {}", r.exponent_sum(t))));
    }
    let occurring: Vec<Generator> = p.occurring().into_iter().filter(|g| g != t).collect();
    let names = family_names(p.alphabet(), &occurring);
    let mut level = 0i64;
    let mut scanned: Vec<Letter> = Vec::new();
    for l in r.letters() {
        if &l.gen == t {
            level += l.sign();
        } else {
            let g = Generator::subscripted(&names[&l.gen], level as i32);
            scanned.push(Letter { gen: g, inverse: l.inverse });
        }
    }
    assert_eq!(level, 0, "exponent sum checked above");
    let rewritten_base = Word::from_iter(scanned);

    let mut base_alphabet = Vec::new();
    let mut edge_neg = Vec::new();
    let mut edge_pos = Vec::new();
    let mut reconstruction = BTreeMap::new();
    for g in p.alphabet() {
        if g == t {
            continue;
        }
        let Some(name) = names.get(g) else {
            base_alphabet.push(g.clone());
            reconstruction.insert(g.clone(), Word::letter(g.pos()));
            continue;
        };
        let subs: Vec<i32> = rewritten_base
            .letters()
            .iter()
            .filter(|l| l.gen.name() == name)
            .filter_map(|l| l.gen.subscript())
            .collect();
        let (m, big) = (*subs.iter().min().unwrap(), *subs.iter().max().unwrap());
        for e in m..=big {
            base_alphabet.push(Generator::subscripted(name, e));
        }
        for e in m..big {
            edge_neg.push(Generator::subscripted(name, e));
            edge_pos.push(Generator::subscripted(name, e + 1));
        }
        let c = 0.clamp(m, big);
        let image = t.pow(-(c as i64)).concat(&Word::letter(Generator::subscripted(name, c).pos())).concat(&t.pow(c as i64));
        reconstruction.insert(g.clone(), image);
    }
    reconstruction.insert(t.clone(), Word::letter(t.pos()));
    let base = OneRelatorPresentation::new(base_alphabet, rewritten_base)
        .map_err(|e| MagnusError::Precondition(e.to_string()))?;
    let split_free_rank = base.non_occurring().len();
    Ok(HierarchyStep {
        kind: StepKind::Moldavanskii,
        input: p.clone(),
        stable: t.clone(),
        basis_change: BTreeMap::new(),
        rewritten: r.clone(),
        base,
        split_free_rank,
        edge_neg,
        edge_pos,
        reconstruction,
    })
}

/// Names for the new basis: `c, d, e, …, y`, then `c1, d1, …`.
fn fresh_names(used: &BTreeSet<String>, count: usize) -> Vec<String> {
    let mut out = Vec::new();
    for round in 0.. {
        for ch in 'c'..='y' {
            let cand = if round == 0 { ch.to_string() } else { format!("{ch}{round}") };
            if !used.contains(&cand) {
                out.push(cand);
                if out.len() == count {
                    return out;
                }
            }
        }
    }
    unreachable!()
}

/// The `*ℤ` branch: adjoin a fresh `z`, change basis `a = c z^{−β}`,
/// `b = d z^{α}` for the chosen pair with exponent sums `α, β`, then perform
/// the Moldavanskii step with stable letter `z`.
pub fn stabilize_step(p: &OneRelatorPresentation) -> Result<HierarchyStep, MagnusError> {
    let r = p.relator();
    let occurring = p.occurring();
    if occurring.len() < 2 {
        return Err(MagnusError::Precondition("only one generator occurs in the relator".into()));
    }
    if let Some(g) = occurring.iter().find(|g| r.exponent_sum(g) == 0) {
        return Err(MagnusError::Precondition(format!("{g} already has exponent sum zero")));
    }
    let mut best: Option<(i64, usize, usize)> = None;
    for i in 0..occurring.len() {
        for j in i + 1..occurring.len() {
            let cost = (r.exponent_sum(&occurring[i]) * r.exponent_sum(&occurring[j])).abs();
            if best.is_none_or(|(c, _, _)| cost < c) {
                best = Some((cost, i, j));
            }
        }
    }
    let (_, i, j) = best.expect("two occurring generators");
    let (a, b) = (&occurring[i], &occurring[j]);
    let (alpha, beta) = (r.exponent_sum(a), r.exponent_sum(b));

    let used: BTreeSet<String> = p.alphabet().iter().map(|g| g.name().to_string()).collect();
    let z = fresh_generator(p.alphabet(), "z");
    let mut used_plus = used.clone();
    used_plus.insert(z.name().to_string());
    let names = fresh_names(&used_plus, 2);
    let (c, d) = (Generator::new(&names[0]), Generator::new(&names[1]));

    let mut basis_change = BTreeMap::new();
    basis_change.insert(a.clone(), Word::letter(c.pos()).concat(&z.pow(-beta)));
    basis_change.insert(b.clone(), Word::letter(d.pos()).concat(&z.pow(alpha)));
    let new_alphabet: Vec<Generator> = p
        .alphabet()
        .iter()
        .map(|g| if g == a { c.clone() } else if g == b { d.clone() } else { g.clone() })
        .chain([z.clone()])
        .collect();
    let rewritten = r.substitute(&basis_change).cyclic_reduce().0;
    assert_eq!(rewritten.exponent_sum(&z), 0, "σ_z(r′) = α(−β) + βα = 0");
    if !rewritten.contains_generator(&z) {
        return Err(MagnusError::Precondition(format!("{z} cancels from the rewritten relator")));
    }
    let stabilized = OneRelatorPresentation::new(new_alphabet, rewritten.clone())
        .map_err(|e| MagnusError::Precondition(e.to_string()))?;
    let mut step = moldavanskii_step(&stabilized, &z)?;
    let reconstruction = p
        .alphabet()
        .iter()
        .map(|g| {
            let via_basis = basis_change.get(g).cloned().unwrap_or_else(|| Word::letter(g.pos()));
            (g.clone(), via_basis.substitute(&step.reconstruction))
        })
        .collect();
    step.kind = StepKind::Stabilized;
    step.input = p.clone();
    step.basis_change = basis_change;
    step.rewritten = rewritten;
    step.reconstruction = reconstruction;
    Ok(step)
}

/// The next hierarchy step: Moldavanskii on the last occurring generator
/// (canonical order) with exponent sum zero, otherwise stabilization. For
/// ⟨a, b | a b a⁻¹ b⁻¹⟩ the stable letter is `b`.
pub fn next_step(p: &OneRelatorPresentation) -> Result<HierarchyStep, MagnusError> {
    let r = p.relator();
    match p.occurring().into_iter().rev().find(|g| r.exponent_sum(g) == 0) {
        Some(t) => moldavanskii_step(p, &t),
        None => stabilize_step(p),
    }
}

pub fn hierarchy(p: &OneRelatorPresentation, limits: &Limits) -> Result<Hierarchy, MagnusError> {
    let mut steps: Vec<HierarchyStep> = Vec::new();
    let mut current = p.clone();
    loop {
        if let Some(base) = classify_base(&current) {
            return Ok(Hierarchy { steps, base });
        }
        if steps.len() >= limits.max_depth || current.relator().len() > limits.max_relator_letters {
            return Err(MagnusError::LimitExceeded(Box::new(PartialHierarchy { steps, stuck: current })));
        }
        let step = match next_step(&current) {
            Ok(s) => s,
            Err(_) => return Err(MagnusError::LimitExceeded(Box::new(PartialHierarchy { steps, stuck: current }))),
        };
        current = step.next_input();
        steps.push(step);
    }
}

/// Outcome of the independent step checker.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepCheck {
    pub stable_sum_zero: bool,
    pub base_free_of_stable: bool,
    pub edges_consistent: bool,
    pub abelianization_matches: bool,
    /// `None` when the input relator is longer than eight letters.
    pub reconstruction_reduces: Option<bool>,
}

impl StepCheck {
    pub fn passed(&self) -> bool {
        self.stable_sum_zero
            && self.base_free_of_stable
            && self.edges_consistent
            && self.abelianization_matches
            && self.reconstruction_reduces != Some(false)
    }
}

pub fn check_step(step: &HierarchyStep, limits: &Limits) -> StepCheck {
    let rewritten = &step.rewritten;
    let stable_sum_zero = rewritten.exponent_sum(&step.stable) == 0;
    let base_free_of_stable = !step.base.relator().contains_generator(&step.stable)
        && !step.base.alphabet().contains(&step.stable);

    // Per family, recompute the occurring subscript range from the base
    // relator and compare with the edge lists.
    let mut ranges: BTreeMap<String, (i32, i32)> = BTreeMap::new();
    for l in step.base.relator().letters() {
        if let Some(s) = l.gen.subscript() {
            let e = ranges.entry(l.gen.name().to_string()).or_insert((s, s));
            e.0 = e.0.min(s);
            e.1 = e.1.max(s);
        }
    }
    let mut want_neg = Vec::new();
    let mut want_pos = Vec::new();
    for (name, (lo, hi)) in &ranges {
        for e in *lo..*hi {
            want_neg.push(Generator::subscripted(name, e));
            want_pos.push(Generator::subscripted(name, e + 1));
        }
    }
    let sorted = |v: &[Generator]| {
        let mut v = v.to_vec();
        v.sort();
        v
    };
    let shift_ok = step.edge_neg.iter().zip(&step.edge_pos).all(|(n, p)| {
        n.name() == p.name() && n.subscript().zip(p.subscript()).is_some_and(|(a, b)| b == a + 1)
    });
    let edges_consistent = step.edge_neg.len() == step.edge_pos.len()
        && sorted(&step.edge_neg) == sorted(&want_neg)
        && sorted(&step.edge_pos) == sorted(&want_pos)
        && shift_ok;

    let hnn = step.hnn();
    let mut expected = abelian_invariants(step.input.presentation());
    if step.kind == StepKind::Stabilized {
        expected.free_rank += 1;
    }
    let abelianization_matches = abelian_invariants(&hnn.presentation()) == expected;

    let reconstruction_reduces = (step.input.relator().len() <= 8).then(|| {
        let oracle = FiniteBallOracle::new(
            step.base.presentation().clone(),
            vec![hnn.h_gens.clone(), hnn.h_prime_gens.clone()],
            limits.oracle_length,
        );
        let image = step.rewrite(step.input.relator());
        hnn_word_problem(&hnn, &image, &oracle) == Verdict::Trivial
    });
    StepCheck { stable_sum_zero, base_free_of_stable, edges_consistent, abelianization_matches, reconstruction_reduces }
}

/// Exact oracle for a one-relator group with a single-occurrence generator:
/// the Tietze elimination is an isomorphism onto the free group on the
/// remaining generators, where folded graphs decide everything. Coset
/// representatives are shortlex-least among words in the remaining basis.
pub struct TietzeFreeOracle {
    eliminated: Generator,
    image: Word,
    graphs: Vec<SubgroupGraph>,
}

impl TietzeFreeOracle {
    pub fn new(p: &OneRelatorPresentation, subgroups: &[Vec<Word>]) -> Option<Self> {
        let x = single_occurrence(p.relator())?;
        let image = eliminate(p.relator(), &x);
        let basis: Vec<Generator> = p.alphabet().iter().filter(|g| **g != x).cloned().collect();
        let mut o = TietzeFreeOracle { eliminated: x, image, graphs: Vec::new() };
        o.graphs = subgroups
            .iter()
            .map(|gens| {
                let imgs: Vec<Word> = gens.iter().map(|g| o.phi(g)).collect();
                build_and_fold(&basis, &imgs)
            })
            .collect();
        Some(o)
    }

    fn phi(&self, w: &Word) -> Word {
        w.substitute_with(|g| (g == &self.eliminated).then(|| self.image.clone()))
    }
}

impl FactorOracle for TietzeFreeOracle {
    fn word_problem(&self, w: &Word) -> Verdict {
        if self.phi(w).is_empty() {
            Verdict::Trivial
        } else {
            Verdict::Nontrivial
        }
    }

    fn subgroup_member(&self, w: &Word, tag: usize) -> Membership {
        match self.graphs[tag].express(&self.phi(w)) {
            Some(e) => Membership::Yes(e),
            None => Membership::No,
        }
    }

    fn coset_rep(&self, w: &Word, tag: usize) -> Option<(Word, Word)> {
        Some(self.graphs[tag].coset_rep(&self.phi(w)))
    }

    fn canonical_word(&self, w: &Word) -> Option<Word> {
        Some(self.phi(w))
    }
}

/// Exact oracle for `⟨a | a^k⟩ * F(rest)` with subgroups generated by sets of
/// generators, via the free-product normal form with `a`-exponents in
/// `(−k/2, k/2]`.
pub struct CyclicFreeOracle {
    a: Generator,
    k: i64,
    subgroups: Vec<BTreeSet<Generator>>,
}

impl CyclicFreeOracle {
    pub fn new(p: &OneRelatorPresentation, subgroups: &[Vec<Word>]) -> Option<Self> {
        let gens = p.relator().generators();
        if gens.len() != 1 || p.relator().len() < 2 {
            return None;
        }
        let mut sets = Vec::new();
        for list in subgroups {
            let mut set = BTreeSet::new();
            for w in list {
                if w.len() != 1 {
                    return None;
                }
                set.insert(w.letters()[0].gen.clone());
            }
            sets.push(set);
        }
        Some(CyclicFreeOracle { a: gens[0].clone(), k: p.relator().len() as i64, subgroups: sets })
    }

    fn normalize(&self, e: i64) -> i64 {
        let r = e.rem_euclid(self.k);
        if 2 * r > self.k {
            r - self.k
        } else {
            r
        }
    }

    pub fn normal_form(&self, w: &Word) -> Word {
        enum Syl {
            A(i64),
            L(Letter),
        }
        let mut stack: Vec<Syl> = Vec::new();
        for l in w.letters() {
            if l.gen == self.a {
                let e = match stack.last() {
                    Some(Syl::A(e)) => {
                        let e = *e;
                        stack.pop();
                        e
                    }
                    _ => 0,
                };
                let e = self.normalize(e + l.sign());
                if e != 0 {
                    stack.push(Syl::A(e));
                }
            } else {
                match stack.last() {
                    Some(Syl::L(top)) if top.cancels(l) => {
                        stack.pop();
                    }
                    _ => stack.push(Syl::L(l.clone())),
                }
            }
        }
        let mut out = Vec::new();
        for s in stack {
            match s {
                Syl::A(e) => out.extend(self.a.pow(e).into_letters()),
                Syl::L(l) => out.push(l),
            }
        }
        Word::from_iter(out)
    }

    fn symbols(&self, tag: usize) -> BTreeMap<Generator, Word> {
        let mut map = BTreeMap::new();
        let mut seen = BTreeSet::new();
        for (i, g) in self.subgroups[tag].iter().enumerate() {
            if seen.insert(g.clone()) {
                map.insert(g.clone(), Word::letter(subgroup_symbol(i).pos()));
            }
        }
        map
    }
}

impl FactorOracle for CyclicFreeOracle {
    fn word_problem(&self, w: &Word) -> Verdict {
        if self.normal_form(w).is_empty() {
            Verdict::Trivial
        } else {
            Verdict::Nontrivial
        }
    }

    fn subgroup_member(&self, w: &Word, tag: usize) -> Membership {
        let nf = self.normal_form(w);
        if nf.letters().iter().all(|l| self.subgroups[tag].contains(&l.gen)) {
            Membership::Yes(nf.substitute(&self.symbols(tag)))
        } else {
            Membership::No
        }
    }

    fn coset_rep(&self, w: &Word, tag: usize) -> Option<(Word, Word)> {
        let nf = self.normal_form(w);
        let cut = nf.letters().iter().position(|l| !self.subgroups[tag].contains(&l.gen)).unwrap_or(nf.len());
        let head = nf.slice(0, cut).substitute(&self.symbols(tag));
        Some((head, nf.slice(cut, nf.len())))
    }

    fn canonical_word(&self, w: &Word) -> Option<Word> {
        Some(self.normal_form(w))
    }
}

/// Exact oracle for a terminal group of the hierarchy, when one applies.
pub fn base_oracle(p: &OneRelatorPresentation, subgroups: &[Vec<Word>]) -> Option<Box<dyn FactorOracle>> {
    if let Some(o) = TietzeFreeOracle::new(p, subgroups) {
        return Some(Box::new(o));
    }
    CyclicFreeOracle::new(p, subgroups).map(|o| Box::new(o) as Box<dyn FactorOracle>)
}

/// Oracle for a one-relator group with arbitrary subgroups. Terminal groups
/// get exact answers. Otherwise the word problem goes through
/// [`one_relator_wp`], and membership is decided syntactically, refuted
/// through the abelianization, or found by a short expression search; the
/// remaining cases answer `Unknown`.
pub struct OneRelatorOracle {
    p: OneRelatorPresentation,
    subgroups: Vec<Vec<Word>>,
    limits: Limits,
    exact: Option<Box<dyn FactorOracle>>,
    lattices: Vec<Lattice>,
    memo: Mutex<HashMap<Word, Verdict>>,
}

impl OneRelatorOracle {
    pub fn new(p: OneRelatorPresentation, subgroups: Vec<Vec<Word>>, limits: Limits) -> Self {
        let exact = base_oracle(&p, &subgroups);
        let pres = p.presentation();
        let lattices = subgroups
            .iter()
            .map(|gens| {
                let mut rows: Vec<Vec<i128>> = gens.iter().map(|g| pres.exponent_vector(g)).collect();
                rows.extend(pres.relation_matrix());
                Lattice::new(pres.rank(), &rows)
            })
            .collect();
        OneRelatorOracle { p, subgroups, limits, exact, lattices, memo: Mutex::new(HashMap::new()) }
    }
}

impl FactorOracle for OneRelatorOracle {
    fn word_problem(&self, w: &Word) -> Verdict {
        if let Some(o) = &self.exact {
            return o.word_problem(w);
        }
        if let Some(v) = self.memo.lock().expect("memo lock").get(w) {
            return *v;
        }
        let v = one_relator_wp(&self.p, w, &self.limits);
        self.memo.lock().expect("memo lock").insert(w.clone(), v);
        v
    }

    fn subgroup_member(&self, w: &Word, tag: usize) -> Membership {
        if let Some(o) = &self.exact {
            return o.subgroup_member(w, tag);
        }
        let gens = &self.subgroups[tag];
        if let Some(e) = syntactic_member(gens, w) {
            return Membership::Yes(e);
        }
        if !self.lattices[tag].contains(&self.p.presentation().exponent_vector(w)) {
            return Membership::No;
        }
        bounded_membership(gens, w, |x| self.word_problem(x))
    }

    fn coset_rep(&self, w: &Word, tag: usize) -> Option<(Word, Word)> {
        if let Some(o) = &self.exact {
            return o.coset_rep(w, tag);
        }
        match self.subgroup_member(w, tag) {
            Membership::Yes(e) => Some((e, Word::identity())),
            _ => None,
        }
    }

    fn canonical_word(&self, w: &Word) -> Option<Word> {
        self.exact.as_ref().and_then(|o| o.canonical_word(w))
    }
}

/// Word problem in a one-relator group: abelianization shortcut, exact
/// decision in terminal groups, otherwise rewrite through the top hierarchy
/// step and Britton-reduce with a base oracle one level down. `max_depth`
/// bounds the recursion.
pub fn one_relator_wp(p: &OneRelatorPresentation, w: &Word, limits: &Limits) -> Verdict {
    if w.is_empty() {
        return Verdict::Trivial;
    }
    if !p.presentation().abelian_image_is_zero(w) {
        return Verdict::Nontrivial;
    }
    if let Some(o) = base_oracle(p, &[]) {
        return o.word_problem(w);
    }
    if limits.max_depth == 0 {
        return Verdict::Unknown;
    }
    let Ok(step) = next_step(p) else {
        return Verdict::Unknown;
    };
    let hnn = step.hnn();
    let inner = Limits { max_depth: limits.max_depth - 1, ..*limits };
    let oracle = OneRelatorOracle::new(step.base.clone(), vec![hnn.h_gens.clone(), hnn.h_prime_gens.clone()], inner);
    hnn_word_problem(&hnn, &step.rewrite(w), &oracle)
}
