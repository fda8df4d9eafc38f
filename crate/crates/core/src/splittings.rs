//! Amalgamated free products and HNN extensions with normal-form reduction
//! driven by pluggable factor oracles.
//!
//! HNN convention: `t · h′ · t⁻¹ = h` where `h′` ranges over `h_prime_gens`
//! (generating `H′`) and `h` over `h_gens` (generating `H`). Hence the pinches
//! are `t g t⁻¹` with `g ∈ H′` and `t⁻¹ g t` with `g ∈ H`. Reading the
//! relation the other way round (`t⁻¹ h′ t = h`) swaps the two pinch
//! patterns; data written for that convention should swap the two lists.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Mutex;

use serde::Serialize;
use thiserror::Error;

use crate::intmat::Lattice;
use crate::presentations::Presentation;
use crate::stallings::{build_and_fold, SubgroupGraph};
use crate::cosets::FiniteGroup;
use crate::words::{expand, subgroup_symbol, Generator, Word};
use crate::Limits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Trivial,
    Nontrivial,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Trivial => "TRIVIAL",
            Verdict::Nontrivial => "NONTRIVIAL",
            Verdict::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    /// Expression over the subgroup symbols `h_i`.
    Yes(Word),
    No,
    Unknown,
}

/// Decision procedures for one factor group together with a fixed list of
/// subgroups addressed by tag (their position in the list).
///
/// `subgroup_member` answering `Yes(e)` guarantees `w = expand(e)` in the
/// factor. `coset_rep` returns `(e, rep)` with `w = expand(e) · rep` and `rep`
/// the shortlex-least word of the right coset `H w`, or `None` when the oracle
/// cannot decide.
pub trait FactorOracle: Send + Sync {
    fn word_problem(&self, w: &Word) -> Verdict;
    fn subgroup_member(&self, w: &Word, tag: usize) -> Membership;
    fn coset_rep(&self, w: &Word, tag: usize) -> Option<(Word, Word)>;
    /// A word depending only on the element `w` represents.
    fn canonical_word(&self, _w: &Word) -> Option<Word> {
        None
    }
    /// A string depending only on the element; defaults to the canonical word.
    fn canonical_key(&self, w: &Word) -> Option<String> {
        self.canonical_word(w).map(|c| c.to_string())
    }
}

/// Picks the strongest available oracle: Stallings graphs for free groups,
/// exponent lattices for abelian groups, the Magnus hierarchy for one-relator
/// groups and the bounded rewriting search otherwise.
pub fn oracle_for(p: &Presentation, subgroups: Vec<Vec<Word>>, limits: &Limits) -> Box<dyn FactorOracle> {
    if p.is_free() {
        Box::new(FreeOracle::new(p.alphabet(), subgroups))
    } else if p.is_abelian() {
        Box::new(AbelianOracle::new(p, subgroups))
    } else if p.relators().len() == 1 {
        let one = p.clone().try_into().expect("one relator");
        Box::new(crate::magnus::OneRelatorOracle::new(one, subgroups, *limits))
    } else {
        Box::new(FiniteBallOracle::new(p.clone(), subgroups, limits.oracle_length))
    }
}

/// Free factor: exact answers via folded subgroup graphs.
pub struct FreeOracle {
    graphs: Vec<SubgroupGraph>,
}

impl FreeOracle {
    pub fn new(alphabet: &[Generator], subgroups: Vec<Vec<Word>>) -> Self {
        FreeOracle { graphs: subgroups.iter().map(|gens| build_and_fold(alphabet, gens)).collect() }
    }
}

impl FactorOracle for FreeOracle {
    fn word_problem(&self, w: &Word) -> Verdict {
        if w.is_empty() {
            Verdict::Trivial
        } else {
            Verdict::Nontrivial
        }
    }

    fn subgroup_member(&self, w: &Word, tag: usize) -> Membership {
        match self.graphs[tag].express(w) {
            Some(e) => Membership::Yes(e),
            None => Membership::No,
        }
    }

    fn coset_rep(&self, w: &Word, tag: usize) -> Option<(Word, Word)> {
        Some(self.graphs[tag].coset_rep(w))
    }

    fn canonical_word(&self, w: &Word) -> Option<Word> {
        Some(w.clone())
    }
}

/// Abelian factor (all commutators among the relators, or one generator):
/// elements are exponent vectors modulo the relation lattice.
pub struct AbelianOracle {
    alphabet: Vec<Generator>,
    relations: Lattice,
    subgroups: Vec<(usize, Lattice)>,
    /// Alphabet positions in canonical generator order.
    sorted: Vec<usize>,
}

impl AbelianOracle {
    pub fn new(p: &Presentation, subgroups: Vec<Vec<Word>>) -> Self {
        let n = p.rank();
        let relators = p.relation_matrix();
        let subgroups = subgroups
            .iter()
            .map(|gens| {
                let mut rows: Vec<Vec<i128>> = gens.iter().map(|g| p.exponent_vector(g)).collect();
                rows.extend(relators.iter().cloned());
                (gens.len(), Lattice::new(n, &rows))
            })
            .collect();
        let mut sorted: Vec<usize> = (0..n).collect();
        sorted.sort_by(|&i, &j| p.alphabet()[i].cmp(&p.alphabet()[j]));
        AbelianOracle {
            alphabet: p.alphabet().to_vec(),
            relations: Lattice::new(n, &relators),
            subgroups,
            sorted,
        }
    }

    fn vector(&self, w: &Word) -> Vec<i128> {
        let mut v = vec![0i128; self.alphabet.len()];
        for l in w.letters() {
            if let Some(i) = self.alphabet.iter().position(|g| *g == l.gen) {
                v[i] += l.sign() as i128;
            }
        }
        v
    }

    fn word_of(&self, v: &[i128]) -> Word {
        let mut out = Word::identity();
        for &i in &self.sorted {
            out = out.concat(&self.alphabet[i].pow(v[i] as i64));
        }
        out
    }

    /// Shortlex-least word whose vector reduces to `key` under `lattice`.
    fn least_word(&self, lattice: &Lattice, key: &[i128], bound: usize) -> Word {
        for norm in 0..=bound {
            let best = vectors_of_norm(self.alphabet.len(), norm)
                .into_iter()
                .filter(|u| lattice.reduce(u).0 == key)
                .map(|u| self.word_of(&u))
                .min();
            if let Some(w) = best {
                return w;
            }
        }
        unreachable!("the input vector itself lies within the bound")
    }

    fn express(&self, v: &[i128], tag: usize) -> Option<Word> {
        let (k, lattice) = &self.subgroups[tag];
        let r = self.relations.reduce(v).0;
        let (rem, coeffs) = lattice.reduce(&r);
        if rem.iter().any(|&x| x != 0) {
            return None;
        }
        let mut e = Word::identity();
        for (i, &c) in coeffs.iter().take(*k).enumerate() {
            e = e.concat(&subgroup_symbol(i).pow(c as i64));
        }
        Some(e)
    }
}

/// All integer vectors of the given dimension and L1 norm.
fn vectors_of_norm(dim: usize, norm: usize) -> Vec<Vec<i128>> {
    fn rec(dim: usize, left: usize, cur: &mut Vec<i128>, out: &mut Vec<Vec<i128>>) {
        if cur.len() == dim {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if cur.len() + 1 == dim {
            let l = left as i128;
            for x in if l == 0 { vec![0] } else { vec![l, -l] } {
                cur.push(x);
                rec(dim, 0, cur, out);
                cur.pop();
            }
            return;
        }
        for a in 0..=left {
            let choices = if a == 0 { vec![0] } else { vec![a as i128, -(a as i128)] };
            for x in choices {
                cur.push(x);
                rec(dim, left - a, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    if dim == 0 {
        if norm == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(dim, norm, &mut Vec::new(), &mut out);
    out
}

impl FactorOracle for AbelianOracle {
    fn word_problem(&self, w: &Word) -> Verdict {
        if self.relations.contains(&self.vector(w)) {
            Verdict::Trivial
        } else {
            Verdict::Nontrivial
        }
    }

    fn subgroup_member(&self, w: &Word, tag: usize) -> Membership {
        match self.express(&self.vector(w), tag) {
            Some(e) => Membership::Yes(e),
            None => Membership::No,
        }
    }

    fn coset_rep(&self, w: &Word, tag: usize) -> Option<(Word, Word)> {
        let v = self.vector(w);
        let lattice = &self.subgroups[tag].1;
        let key = lattice.reduce(&v).0;
        let bound = v.iter().map(|x| x.unsigned_abs() as usize).sum();
        let rep = self.least_word(lattice, &key, bound);
        let rest: Vec<i128> = v.iter().zip(self.vector(&rep)).map(|(a, b)| a - b).collect();
        let e = self.express(&rest, tag).expect("difference lies in the subgroup");
        Some((e, rep))
    }

    fn canonical_word(&self, w: &Word) -> Option<Word> {
        let v = self.vector(w);
        let key = self.relations.reduce(&v).0;
        let bound = v.iter().map(|x| x.unsigned_abs() as usize).sum();
        Some(self.least_word(&self.relations, &key, bound))
    }

    fn canonical_key(&self, w: &Word) -> Option<String> {
        Some(format!("{:?}", self.relations.reduce(&self.vector(w)).0))
    }
}

/// Fallback oracle. A bounded coset enumeration first tries to find the group
/// finite, in which case every question is answered exactly from the regular
/// representation. Otherwise triviality is proved by relator rewriting on
/// cyclic words of bounded length, nontriviality through the abelianization,
/// and everything else is `Unknown`.
pub struct FiniteBallOracle {
    presentation: Presentation,
    finite: Option<FiniteGroup>,
    /// Per subgroup, the shortest expression of each member element.
    finite_members: Vec<Vec<Option<Word>>>,
    subgroups: Vec<Vec<Word>>,
    max_len: usize,
    relations: Lattice,
    subgroup_lattices: Vec<Lattice>,
    memo: Mutex<HashMap<Word, Verdict>>,
}

/// Cap on the number of cyclic words visited by one rewriting search.
const SEARCH_STATES: usize = 20_000;

/// Cap on coset definitions when testing a factor for finiteness.
const COSET_DEFINITIONS: usize = 20_000;

impl FiniteBallOracle {
    pub fn new(presentation: Presentation, subgroups: Vec<Vec<Word>>, max_len: usize) -> Self {
        let n = presentation.rank();
        let rel = presentation.relation_matrix();
        let subgroup_lattices = subgroups
            .iter()
            .map(|gens| {
                let mut rows: Vec<Vec<i128>> = gens.iter().map(|g| presentation.exponent_vector(g)).collect();
                rows.extend(rel.iter().cloned());
                Lattice::new(n, &rows)
            })
            .collect();
        let finite = FiniteGroup::new(presentation.alphabet(), presentation.relators(), COSET_DEFINITIONS);
        let finite_members = match &finite {
            Some(g) => subgroups.iter().map(|gens| g.subgroup_expressions(gens)).collect(),
            None => Vec::new(),
        };
        FiniteBallOracle {
            finite,
            finite_members,
            relations: Lattice::new(n, &rel),
            presentation,
            subgroups,
            max_len,
            subgroup_lattices,
            memo: Mutex::new(HashMap::new()),
        }
    }

    fn decide(&self, w: &Word) -> Verdict {
        if w.is_empty() {
            return Verdict::Trivial;
        }
        if let Some(g) = &self.finite {
            return if g.element(w) == 0 { Verdict::Trivial } else { Verdict::Nontrivial };
        }
        if !self.relations.contains(&self.presentation.exponent_vector(w)) {
            return Verdict::Nontrivial;
        }
        if rewrite_to_identity(self.presentation.relators(), w, self.max_len.max(w.len()), SEARCH_STATES) {
            Verdict::Trivial
        } else {
            Verdict::Unknown
        }
    }
}

/// Breadth-first search over cyclic words: replace a factor `u` of the current
/// cyclic word by `v⁻¹` whenever `u v` is a cyclic permutation of a relator or
/// its inverse. Returns true once the empty word is reached.
pub(crate) fn rewrite_to_identity(relators: &[Word], w: &Word, max_len: usize, cap: usize) -> bool {
    let mut variants: Vec<Vec<crate::words::Letter>> = Vec::new();
    for r in relators {
        for base in [r.clone(), r.inverse()] {
            for k in 0..base.len() {
                variants.push(base.rotate(k).into_letters());
            }
        }
    }
    variants.sort();
    variants.dedup();
    let start = w.cyclic_reduce().0;
    if start.is_empty() {
        return true;
    }
    let mut seen = HashSet::from([start.cyclic_class_key()]);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        let letters = s.letters();
        let m = letters.len();
        for var in &variants {
            for p in 1..=var.len().min(m) {
                let u = &var[..p];
                let v_inv = Word::from_iter(var[p..].iter().rev().map(|l| l.inv()));
                if m - p + v_inv.len() > max_len {
                    continue;
                }
                for i in 0..m {
                    if (0..p).all(|j| letters[(i + j) % m] == u[j]) {
                        let rest = Word::from_iter((0..m - p).map(|j| letters[(i + p + j) % m].clone()));
                        let next = v_inv.concat(&rest).cyclic_reduce().0;
                        if next.is_empty() {
                            return true;
                        }
                        if next.len() <= max_len && seen.insert(next.cyclic_class_key()) {
                            if seen.len() > cap {
                                return false;
                            }
                            queue.push_back(next);
                        }
                    }
                }
            }
        }
    }
    false
}

/// When every subgroup generator is a single letter, a word using only those
/// letters is a member with the obvious expression.
pub(crate) fn syntactic_member(gens: &[Word], w: &Word) -> Option<Word> {
    let mut map = BTreeMap::new();
    for (i, g) in gens.iter().enumerate() {
        if g.len() != 1 {
            continue;
        }
        let l = &g.letters()[0];
        let sym = Word::letter(subgroup_symbol(i).pos());
        map.entry(l.gen.clone()).or_insert(if l.inverse { sym.inverse() } else { sym });
    }
    w.letters().iter().all(|l| map.contains_key(&l.gen)).then(|| w.substitute(&map))
}

/// Tries the identity and expressions of length at most two.
pub(crate) fn bounded_membership(gens: &[Word], w: &Word, wp: impl Fn(&Word) -> Verdict) -> Membership {
    if wp(w) == Verdict::Trivial {
        return Membership::Yes(Word::identity());
    }
    let symbols: Vec<Generator> = (0..gens.len()).map(subgroup_symbol).collect();
    for len in 1..=2 {
        for e in crate::words::reduced_words_of_length(&symbols, len) {
            if wp(&w.concat(&expand(&e, gens).inverse())) == Verdict::Trivial {
                return Membership::Yes(e);
            }
        }
    }
    Membership::Unknown
}

impl FactorOracle for FiniteBallOracle {
    fn word_problem(&self, w: &Word) -> Verdict {
        if let Some(v) = self.memo.lock().expect("memo lock").get(w) {
            return *v;
        }
        let v = self.decide(w);
        self.memo.lock().expect("memo lock").insert(w.clone(), v);
        v
    }

    fn subgroup_member(&self, w: &Word, tag: usize) -> Membership {
        if let Some(g) = &self.finite {
            return match &self.finite_members[tag][g.element(w)] {
                Some(e) => Membership::Yes(e.clone()),
                None => Membership::No,
            };
        }
        let gens = &self.subgroups[tag];
        if let Some(e) = syntactic_member(gens, w) {
            return Membership::Yes(e);
        }
        if !self.subgroup_lattices[tag].contains(&self.presentation.exponent_vector(w)) {
            return Membership::No;
        }
        bounded_membership(gens, w, |x| self.word_problem(x))
    }

    fn coset_rep(&self, w: &Word, tag: usize) -> Option<(Word, Word)> {
        if let Some(g) = &self.finite {
            // The shortlex-least u with H·w = H·u, and h = w·u⁻¹.
            let x = g.element(w);
            let members = &self.finite_members[tag];
            return g.least.iter().find_map(|u| {
                let h = g.table.act(x, &u.inverse());
                members[h].as_ref().map(|e| (e.clone(), u.clone()))
            });
        }
        match self.subgroup_member(w, tag) {
            Membership::Yes(e) => Some((e, Word::identity())),
            _ => None,
        }
    }

    fn canonical_word(&self, w: &Word) -> Option<Word> {
        self.finite.as_ref().map(|g| g.least[g.element(w)].clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplittingError {
    #[error("generator {0} belongs to both factors")]
    SharedGenerator(Generator),
    #[error("edge generator lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("stable letter {0} already belongs to the base alphabet")]
    StableNotFresh(Generator),
    #[error("generator {0} is not part of the splitting")]
    ForeignGenerator(Generator),
}

/// `A *_H B`: the i-th words of `h_in_a` and `h_in_b` are identified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmalgamData {
    pub a: Presentation,
    pub b: Presentation,
    pub h_in_a: Vec<Word>,
    pub h_in_b: Vec<Word>,
}

impl AmalgamData {
    pub fn new(a: Presentation, b: Presentation, h_in_a: Vec<Word>, h_in_b: Vec<Word>) -> Result<Self, SplittingError> {
        if let Some(g) = a.alphabet().iter().find(|g| b.contains_generator(g)) {
            return Err(SplittingError::SharedGenerator(g.clone()));
        }
        if h_in_a.len() != h_in_b.len() {
            return Err(SplittingError::LengthMismatch(h_in_a.len(), h_in_b.len()));
        }
        for (p, words) in [(&a, &h_in_a), (&b, &h_in_b)] {
            for w in words {
                if let Some(l) = w.letters().iter().find(|l| !p.contains_generator(&l.gen)) {
                    return Err(SplittingError::ForeignGenerator(l.gen.clone()));
                }
            }
        }
        Ok(AmalgamData { a, b, h_in_a, h_in_b })
    }

    pub fn alphabet(&self) -> Vec<Generator> {
        self.a.alphabet().iter().chain(self.b.alphabet()).cloned().collect()
    }

    pub fn side_of(&self, g: &Generator) -> Option<Side> {
        if self.a.contains_generator(g) {
            Some(Side::A)
        } else if self.b.contains_generator(g) {
            Some(Side::B)
        } else {
            None
        }
    }

    pub fn edge_gens(&self, side: Side) -> &[Word] {
        match side {
            Side::A => &self.h_in_a,
            Side::B => &self.h_in_b,
        }
    }

    /// Presentation of the amalgam: both factors plus `h_in_a[i] = h_in_b[i]`.
    pub fn presentation(&self) -> Presentation {
        let mut rels: Vec<Word> = self.a.relators().iter().chain(self.b.relators()).cloned().collect();
        rels.extend(self.h_in_a.iter().zip(&self.h_in_b).map(|(x, y)| x.concat(&y.inverse())));
        Presentation::new(self.alphabet(), rels).expect("disjoint alphabets")
    }
}

/// HNN extension of `base` with `stable · h_prime_gens[i] · stable⁻¹ =
/// h_gens[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HnnData {
    pub base: Presentation,
    pub stable: Generator,
    pub h_gens: Vec<Word>,
    pub h_prime_gens: Vec<Word>,
}

impl HnnData {
    pub fn new(base: Presentation, stable: Generator, h_gens: Vec<Word>, h_prime_gens: Vec<Word>) -> Result<Self, SplittingError> {
        if base.contains_generator(&stable) {
            return Err(SplittingError::StableNotFresh(stable));
        }
        if h_gens.len() != h_prime_gens.len() {
            return Err(SplittingError::LengthMismatch(h_gens.len(), h_prime_gens.len()));
        }
        for w in h_gens.iter().chain(&h_prime_gens) {
            if let Some(l) = w.letters().iter().find(|l| !base.contains_generator(&l.gen)) {
                return Err(SplittingError::ForeignGenerator(l.gen.clone()));
            }
        }
        Ok(HnnData { base, stable, h_gens, h_prime_gens })
    }

    pub fn alphabet(&self) -> Vec<Generator> {
        let mut a = self.base.alphabet().to_vec();
        a.push(self.stable.clone());
        a
    }

    /// Base relators plus `t h′_i t⁻¹ h_i⁻¹`.
    pub fn presentation(&self) -> Presentation {
        let t = Word::letter(self.stable.pos());
        let mut rels = self.base.relators().to_vec();
        for (h, hp) in self.h_gens.iter().zip(&self.h_prime_gens) {
            rels.push(t.concat(hp).concat(&t.inverse()).concat(&h.inverse()));
        }
        Presentation::new(self.alphabet(), rels).expect("fresh stable letter")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SplittingData {
    Amalgam(AmalgamData),
    Hnn(HnnData),
}

impl SplittingData {
    pub fn alphabet(&self) -> Vec<Generator> {
        match self {
            SplittingData::Amalgam(am) => am.alphabet(),
            SplittingData::Hnn(h) => h.alphabet(),
        }
    }

    pub fn presentation(&self) -> Presentation {
        match self {
            SplittingData::Amalgam(am) => am.presentation(),
            SplittingData::Hnn(h) => h.presentation(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

/// Normal form `expand(head) · s₁ ⋯ s_k` in an amalgam: syllables alternate
/// between factors and each is the shortlex-least word of its right
/// `H`-coset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmalgamForm {
    /// Word over the edge symbols `h_i`.
    pub head: Word,
    pub syllables: Vec<(Side, Word)>,
    pub canonical: bool,
}

/// Britton normal form `g₀ t^{ε₁} g₁ ⋯ t^{ε_k} g_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HnnForm {
    pub prefix: Word,
    pub syllables: Vec<(i8, Word)>,
    pub canonical: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalForm {
    Amalgam(AmalgamForm),
    Hnn(HnnForm),
}

impl AmalgamForm {
    pub fn is_identity(&self) -> bool {
        self.head.is_empty() && self.syllables.is_empty()
    }

    pub fn to_word(&self, am: &AmalgamData) -> Word {
        self.syllables
            .iter()
            .fold(expand(&self.head, &am.h_in_a), |acc, (_, s)| acc.concat(s))
    }
}

impl HnnForm {
    pub fn stable_count(&self) -> usize {
        self.syllables.len()
    }

    pub fn to_word(&self, hnn: &HnnData) -> Word {
        let mut w = self.prefix.clone();
        for (e, g) in &self.syllables {
            w = w.concat(&hnn.stable.pow(*e as i64)).concat(g);
        }
        w
    }

    pub fn is_identity(&self) -> bool {
        self.prefix.is_empty() && self.syllables.is_empty()
    }
}

impl NormalForm {
    pub fn is_identity(&self) -> bool {
        match self {
            NormalForm::Amalgam(f) => f.is_identity(),
            NormalForm::Hnn(f) => f.is_identity(),
        }
    }

    pub fn is_canonical(&self) -> bool {
        match self {
            NormalForm::Amalgam(f) => f.canonical,
            NormalForm::Hnn(f) => f.canonical,
        }
    }
}

/// Amalgam forms print as `(head) | s₁ | s₂`, the head omitted when trivial;
/// HNN forms print as the word they spell. The identity prints as `1`.
impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormalForm::Amalgam(a) => {
                let mut parts: Vec<String> = Vec::new();
                if !a.head.is_empty() {
                    parts.push(format!("({})", a.head));
                }
                parts.extend(a.syllables.iter().map(|(_, s)| s.to_string()));
                if parts.is_empty() {
                    f.write_str("1")
                } else {
                    f.write_str(&parts.join(" | "))
                }
            }
            NormalForm::Hnn(h) => {
                let mut parts: Vec<String> = Vec::new();
                if !h.prefix.is_empty() {
                    parts.push(h.prefix.to_string());
                }
                for (e, g) in &h.syllables {
                    parts.push(if *e > 0 { "t".into() } else { "t^-1".into() });
                    if !g.is_empty() {
                        parts.push(g.to_string());
                    }
                }
                if parts.is_empty() {
                    f.write_str("1")
                } else {
                    f.write_str(&parts.join(" "))
                }
            }
        }
    }
}

#[derive(Debug, Clone, Error)]
#[error("a factor oracle could not decide a query; partially reduced form: {partial}")]
pub struct OracleUnknown {
    pub partial: NormalForm,
}

fn check_alphabet(alphabet: &[Generator], w: &Word) -> Result<(), SplittingError> {
    match w.letters().iter().find(|l| !alphabet.contains(&l.gen)) {
        Some(l) => Err(SplittingError::ForeignGenerator(l.gen.clone())),
        None => Ok(()),
    }
}

/// Maximal runs of letters from one factor.
fn factor_syllables(am: &AmalgamData, w: &Word) -> Vec<(Side, Word)> {
    let mut out: Vec<(Side, Word)> = Vec::new();
    for l in w.letters() {
        let side = am.side_of(&l.gen).expect("letter checked against the alphabet");
        match out.last_mut() {
            Some((s, word)) if *s == side => word.push(l.clone()),
            _ => out.push((side, Word::letter(l.clone()))),
        }
    }
    out
}

struct AmalgamReduction {
    stack: Vec<(Side, Word)>,
    head: Word,
    unknown: bool,
}

fn reduce_alternating(am: &AmalgamData, w: &Word, oa: &dyn FactorOracle, ob: &dyn FactorOracle) -> AmalgamReduction {
    let oracle = |s: Side| -> &dyn FactorOracle {
        match s {
            Side::A => oa,
            Side::B => ob,
        }
    };
    let mut red = AmalgamReduction { stack: Vec::new(), head: Word::identity(), unknown: false };
    for (side0, syl) in factor_syllables(am, w) {
        let (mut side, mut s) = (side0, syl);
        loop {
            if red.stack.is_empty() && !red.head.is_empty() {
                s = expand(&red.head, am.edge_gens(side)).concat(&s);
                red.head = Word::identity();
            }
            if let Some((top_side, top)) = red.stack.last() {
                if *top_side == side {
                    s = top.concat(&s);
                    red.stack.pop();
                }
            }
            if s.is_empty() {
                break;
            }
            match oracle(side).word_problem(&s) {
                Verdict::Trivial => break,
                Verdict::Unknown => {
                    red.unknown = true;
                    red.stack.push((side, s));
                    break;
                }
                Verdict::Nontrivial => {}
            }
            match oracle(side).subgroup_member(&s, 0) {
                Membership::No => {
                    red.stack.push((side, s));
                    break;
                }
                Membership::Unknown => {
                    red.unknown = true;
                    red.stack.push((side, s));
                    break;
                }
                Membership::Yes(e) => {
                    if red.stack.is_empty() {
                        red.head = e;
                        break;
                    }
                    side = side.other();
                    s = expand(&e, am.edge_gens(side));
                }
            }
        }
    }
    red
}

/// Alternating normal form in `A *_H B` with right-coset transversals chosen
/// by the factor oracles.
pub fn amalgam_normal_form(
    am: &AmalgamData,
    w: &Word,
    oa: &dyn FactorOracle,
    ob: &dyn FactorOracle,
) -> Result<Result<NormalForm, OracleUnknown>, SplittingError> {
    check_alphabet(&am.alphabet(), w)?;
    let red = reduce_alternating(am, w, oa, ob);
    let oracle = |s: Side| -> &dyn FactorOracle {
        match s {
            Side::A => oa,
            Side::B => ob,
        }
    };
    let mut canonical = !red.unknown;
    let mut syllables = red.stack;
    let mut carry = red.head;
    for i in (0..syllables.len()).rev() {
        let side = syllables[i].0;
        let g = syllables[i].1.concat(&expand(&carry, am.edge_gens(side)));
        match oracle(side).coset_rep(&g, 0) {
            Some((h, rep)) if canonical => {
                syllables[i].1 = rep;
                carry = h;
            }
            _ => {
                canonical = false;
                syllables[i].1 = g;
                carry = Word::identity();
            }
        }
    }
    let mut head = carry;
    if canonical && !head.is_empty() {
        let in_a = expand(&head, &am.h_in_a);
        match (oa.word_problem(&in_a), oa.subgroup_member(&in_a, 0)) {
            (Verdict::Trivial, _) => head = Word::identity(),
            (Verdict::Nontrivial, Membership::Yes(e)) => head = e,
            _ => canonical = false,
        }
    }
    let form = NormalForm::Amalgam(AmalgamForm { head, syllables, canonical });
    Ok(if canonical { Ok(form) } else { Err(OracleUnknown { partial: form }) })
}

fn stable_letter_syllables(hnn: &HnnData, w: &Word) -> (Word, Vec<(i8, Word)>) {
    let mut prefix = Word::identity();
    let mut syl: Vec<(i8, Word)> = Vec::new();
    for l in w.letters() {
        if l.gen == hnn.stable {
            syl.push((l.sign() as i8, Word::identity()));
        } else {
            match syl.last_mut() {
                Some((_, g)) => g.push(l.clone()),
                None => prefix.push(l.clone()),
            }
        }
    }
    (prefix, syl)
}

struct BrittonPass {
    prefix: Word,
    syllables: Vec<(i8, Word)>,
    unknown: bool,
}

/// Removes every pinch with a left-to-right stack pass.
fn remove_pinches(hnn: &HnnData, w: &Word, oracle: &dyn FactorOracle) -> BrittonPass {
    let (prefix, input) = stable_letter_syllables(hnn, w);
    let mut pass = BrittonPass { prefix, syllables: Vec::new(), unknown: false };
    for (e, g) in input {
        let mut pinched = None;
        if let Some((top_e, top_g)) = pass.syllables.last() {
            if *top_e == -e {
                // t g t⁻¹ needs g ∈ H′ (tag 1); t⁻¹ g t needs g ∈ H (tag 0).
                let (tag, image) = if *top_e > 0 { (1, &hnn.h_gens) } else { (0, &hnn.h_prime_gens) };
                match oracle.subgroup_member(top_g, tag) {
                    Membership::Yes(expr) => pinched = Some(expand(&expr, image)),
                    Membership::No => {}
                    Membership::Unknown => pass.unknown = true,
                }
            }
        }
        match pinched {
            Some(replacement) => {
                pass.syllables.pop();
                let tail = replacement.concat(&g);
                match pass.syllables.last_mut() {
                    Some((_, last)) => *last = last.concat(&tail),
                    None => pass.prefix = pass.prefix.concat(&tail),
                }
            }
            None => pass.syllables.push((e, g)),
        }
    }
    pass
}

/// Britton reduction followed by right-to-left coset normalization: for
/// `t g` the `H′`-part of `g` moves left as an `H`-element, for `t⁻¹ g` the
/// `H`-part moves left as an `H′`-element.
pub fn britton_reduce(
    hnn: &HnnData,
    w: &Word,
    oracle: &dyn FactorOracle,
) -> Result<Result<NormalForm, OracleUnknown>, SplittingError> {
    check_alphabet(&hnn.alphabet(), w)?;
    let pass = remove_pinches(hnn, w, oracle);
    let mut canonical = !pass.unknown;
    let mut syllables = pass.syllables;
    let mut carry = Word::identity();
    for i in (0..syllables.len()).rev() {
        let (e, ref g) = syllables[i];
        let g = g.concat(&carry);
        let (tag, image) = if e > 0 { (1, &hnn.h_gens) } else { (0, &hnn.h_prime_gens) };
        match oracle.coset_rep(&g, tag) {
            Some((h, rep)) if canonical => {
                syllables[i].1 = rep;
                carry = expand(&h, image);
            }
            _ => {
                canonical = false;
                syllables[i].1 = g;
                carry = Word::identity();
            }
        }
    }
    let mut prefix = pass.prefix.concat(&carry);
    if canonical {
        match oracle.canonical_word(&prefix) {
            Some(c) => prefix = c,
            None => match oracle.word_problem(&prefix) {
                Verdict::Trivial => prefix = Word::identity(),
                // Without a canonical word the prefix is only a representative.
                _ => canonical = false,
            },
        }
    }
    let form = NormalForm::Hnn(HnnForm { prefix, syllables, canonical });
    Ok(if canonical { Ok(form) } else { Err(OracleUnknown { partial: form }) })
}

/// Oracles for the factors of a splitting, with the edge subgroups as tags:
/// amalgam factors carry `H` as tag 0; an HNN base carries `H` as tag 0 and
/// `H′` as tag 1.
pub enum SplittingOracles {
    Amalgam(Box<dyn FactorOracle>, Box<dyn FactorOracle>),
    Hnn(Box<dyn FactorOracle>),
}

impl SplittingOracles {
    pub fn auto(split: &SplittingData, limits: &Limits) -> Self {
        match split {
            SplittingData::Amalgam(am) => SplittingOracles::Amalgam(
                oracle_for(&am.a, vec![am.h_in_a.clone()], limits),
                oracle_for(&am.b, vec![am.h_in_b.clone()], limits),
            ),
            SplittingData::Hnn(h) => {
                SplittingOracles::Hnn(oracle_for(&h.base, vec![h.h_gens.clone(), h.h_prime_gens.clone()], limits))
            }
        }
    }
}

/// A splitting bundled with its oracles.
pub struct SplitGroup {
    pub data: SplittingData,
    pub oracles: SplittingOracles,
}

impl SplitGroup {
    pub fn new(data: SplittingData, limits: &Limits) -> Self {
        let oracles = SplittingOracles::auto(&data, limits);
        SplitGroup { data, oracles }
    }

    pub fn with_oracles(data: SplittingData, oracles: SplittingOracles) -> Self {
        SplitGroup { data, oracles }
    }

    pub fn normal_form(&self, w: &Word) -> Result<Result<NormalForm, OracleUnknown>, SplittingError> {
        match (&self.data, &self.oracles) {
            (SplittingData::Amalgam(am), SplittingOracles::Amalgam(a, b)) => {
                amalgam_normal_form(am, w, a.as_ref(), b.as_ref())
            }
            (SplittingData::Hnn(h), SplittingOracles::Hnn(o)) => britton_reduce(h, w, o.as_ref()),
            _ => panic!("oracles do not match the splitting kind"),
        }
    }

    pub fn word_problem(&self, w: &Word) -> Result<Verdict, SplittingError> {
        match (&self.data, &self.oracles) {
            (SplittingData::Amalgam(am), SplittingOracles::Amalgam(a, b)) => {
                check_alphabet(&am.alphabet(), w)?;
                Ok(amalgam_word_problem(am, w, a.as_ref(), b.as_ref()))
            }
            (SplittingData::Hnn(h), SplittingOracles::Hnn(o)) => {
                check_alphabet(&h.alphabet(), w)?;
                Ok(hnn_word_problem(h, w, o.as_ref()))
            }
            _ => panic!("oracles do not match the splitting kind"),
        }
    }

    /// The normal-form string, when it is canonical.
    pub fn canonical_key(&self, w: &Word) -> Option<String> {
        match self.normal_form(w) {
            Ok(Ok(f)) => Some(f.to_string()),
            _ => None,
        }
    }
}

pub fn amalgam_word_problem(am: &AmalgamData, w: &Word, oa: &dyn FactorOracle, ob: &dyn FactorOracle) -> Verdict {
    let red = reduce_alternating(am, w, oa, ob);
    if red.unknown {
        return Verdict::Unknown;
    }
    if !red.stack.is_empty() {
        return Verdict::Nontrivial;
    }
    oa.word_problem(&expand(&red.head, &am.h_in_a))
}

pub fn hnn_word_problem(hnn: &HnnData, w: &Word, oracle: &dyn FactorOracle) -> Verdict {
    let pass = remove_pinches(hnn, w, oracle);
    if pass.unknown {
        return Verdict::Unknown;
    }
    if !pass.syllables.is_empty() {
        return Verdict::Nontrivial;
    }
    oracle.word_problem(&pass.prefix)
}

/// Counts pinches left in a Britton form (re-scan check). `None` when the
/// oracle cannot decide one of the candidate positions.
pub fn count_pinches(hnn: &HnnData, form: &HnnForm, oracle: &dyn FactorOracle) -> Option<usize> {
    let mut count = 0;
    for pair in form.syllables.windows(2) {
        let ((e1, g), (e2, _)) = (&pair[0], &pair[1]);
        if *e1 == -*e2 {
            let tag = if *e1 > 0 { 1 } else { 0 };
            match oracle.subgroup_member(g, tag) {
                Membership::Yes(_) => count += 1,
                Membership::No => {}
                Membership::Unknown => return None,
            }
        }
    }
    let _ = hnn;
    Some(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::syntax::{parse_presentation, parse_splitting};

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn group(name: &str) -> SplitGroup {
        let data = parse_splitting(crate::corpus::splitting(name).unwrap()).unwrap();
        SplitGroup::new(data, &Limits::default())
    }

    fn nf(g: &SplitGroup, s: &str) -> String {
        g.normal_form(&w(s)).unwrap().unwrap().to_string()
    }

    #[test]
    fn bs12_britton_examples() {
        let g = group("bs12_hnn");
        assert_eq!(nf(&g, "t a t^-1 a^-2"), "1");
        assert_eq!(nf(&g, "t^-1 a^2 t"), "a");
        assert_eq!(nf(&g, "t^-1 a t"), "t^-1 a t");
        assert_eq!(g.word_problem(&w("t a t^-1 a^-2")).unwrap(), Verdict::Trivial);
        assert_eq!(g.word_problem(&w("t^-1 a t")).unwrap(), Verdict::Nontrivial);
    }

    #[test]
    fn trefoil_examples() {
        let g = group("trefoil_amalgam");
        assert_eq!(nf(&g, "x^2 y^-3"), "1");
        assert_eq!(nf(&g, "x y"), "x | y");
        assert_eq!(nf(&g, "x^3 y^-3"), "x");
        assert_eq!(nf(&g, "y^3"), "(h_0)");
        assert_eq!(nf(&g, "y^4 x"), "(h_0) | y | x");
        assert_eq!(g.word_problem(&w("x y")).unwrap(), Verdict::Nontrivial);
        assert_eq!(g.word_problem(&w("x^2 y^-3")).unwrap(), Verdict::Trivial);
    }

    #[test]
    fn forms_spell_their_input() {
        let g = group("trefoil_amalgam");
        let SplittingData::Amalgam(am) = &g.data else { unreachable!() };
        for s in ["x^3 y x^-1 y^2", "y^-5 x^7", "x y x y x y"] {
            let Ok(Ok(NormalForm::Amalgam(f))) = g.normal_form(&w(s)) else { panic!() };
            let back = f.to_word(am).concat(&w(s).inverse());
            assert_eq!(g.word_problem(&back).unwrap(), Verdict::Trivial, "{s}");
        }
    }

    #[test]
    fn free_product_with_trivial_edge() {
        let g = group("free_product");
        assert_eq!(nf(&g, "x y^-1 x^2"), "x | y^-1 | x^2");
        assert_eq!(g.word_problem(&w("x x^-1")).unwrap(), Verdict::Trivial);
    }

    #[test]
    fn abelian_factors() {
        let g = group("z2_amalgam");
        assert_eq!(nf(&g, "b a"), "(h_0) | b");
        assert_eq!(nf(&g, "c^-1 a"), "1");
        assert_eq!(g.word_problem(&w("b d b^-1 d^-1")).unwrap(), Verdict::Nontrivial);
        let g = group("sl2z");
        assert_eq!(nf(&g, "x^4"), "1");
        assert_eq!(nf(&g, "y^5 x^3"), "(h_0) | y^-1 | x");
    }

    #[test]
    fn abelian_coset_reps() {
        let p = parse_presentation("gens: a b\nrel: a b a^-1 b^-1").unwrap();
        let o = AbelianOracle::new(&p, vec![vec![w("a^2 b")]]);
        let (h, rep) = o.coset_rep(&w("a^3 b^2"), 0).unwrap();
        assert_eq!(rep, w("a^-1"));
        assert_eq!(h, w("h_0^2"));
        let c = parse_presentation("gens: x\nrel: x^4").unwrap();
        let o = AbelianOracle::new(&c, vec![vec![w("x^2")]]);
        assert_eq!(o.canonical_word(&w("x^-2")), Some(w("x^2")));
        let (h, rep) = o.coset_rep(&w("x^-1"), 0).unwrap();
        assert_eq!(rep, w("x"));
        assert!(o.word_problem(&expand(&h, &[w("x^2")]).concat(&rep).concat(&w("x"))) == Verdict::Trivial);
    }

    #[test]
    fn finite_factors_are_decided_exactly() {
        let p = parse_presentation("gens: a b\nrel: a^2\nrel: b^3\nrel: a b a b").unwrap();
        let o = FiniteBallOracle::new(p, vec![vec![w("a")]], 12);
        assert_eq!(o.word_problem(&w("b a b a")), Verdict::Trivial);
        assert_eq!(o.word_problem(&w("b")), Verdict::Nontrivial);
        assert_eq!(o.subgroup_member(&w("a^3"), 0), Membership::Yes(w("h_0")));
        assert_eq!(o.subgroup_member(&w("b a b"), 0), Membership::Yes(w("h_0")));
        assert_eq!(o.subgroup_member(&w("b"), 0), Membership::No);
        assert_eq!(o.canonical_word(&w("b^2")), Some(w("b^-1")));
        let (h, rep) = o.coset_rep(&w("a b^2"), 0).unwrap();
        assert_eq!(rep, w("b^-1"));
        assert_eq!(o.word_problem(&expand(&h, &[w("a")]).concat(&rep).concat(&w("a b^2").inverse())), Verdict::Trivial);
    }

    #[test]
    fn rewriting_search_proves_relator_consequences() {
        // BS(1,2) written as ⟨a, b | a b a⁻¹ b⁻²⟩.
        let rels = vec![w("a b a^-1 b^-2")];
        assert!(rewrite_to_identity(&rels, &w("a b a^-1 b^-2 a b a^-1 b^-2"), 12, 20_000));
        assert!(rewrite_to_identity(&rels, &w("a b^2 a^-1 b^-4"), 12, 20_000));
        assert!(!rewrite_to_identity(&rels, &w("a"), 12, 20_000));
        let p = parse_presentation("gens: a b\nrel: a^2\nrel: b^2").unwrap();
        let o = FiniteBallOracle::new(p, vec![], 12);
        assert_eq!(o.word_problem(&w("a b a b b a b a")), Verdict::Trivial);
        assert_eq!(o.word_problem(&w("a b a b")), Verdict::Unknown);
    }

    #[test]
    fn vectors_by_norm() {
        assert_eq!(vectors_of_norm(2, 0), vec![vec![0, 0]]);
        assert_eq!(vectors_of_norm(2, 1).len(), 4);
        assert_eq!(vectors_of_norm(2, 3).len(), 12);
        assert_eq!(vectors_of_norm(3, 2).len(), 18);
    }

    #[test]
    fn data_validation() {
        let a = parse_presentation("gens: x").unwrap();
        let err = AmalgamData::new(a.clone(), a.clone(), vec![], vec![]).unwrap_err();
        assert_eq!(err, SplittingError::SharedGenerator(Generator::new("x")));
        let err = HnnData::new(a, Generator::new("x"), vec![], vec![]).unwrap_err();
        assert!(matches!(err, SplittingError::StableNotFresh(_)));
    }
}
