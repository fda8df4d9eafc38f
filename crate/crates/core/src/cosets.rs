//! Bounded Todd–Coxeter coset enumeration (HLT strategy with coincidence
//! processing), used to decide finite factor groups exactly.

use std::collections::VecDeque;

use crate::words::{expand, subgroup_symbol, Generator, Letter, Word};

const NONE: usize = usize::MAX;

/// Column of a letter: `2i` for the generator, `2i + 1` for its inverse.
fn column(alphabet: &[Generator], l: &Letter) -> usize {
    let i = alphabet.iter().position(|g| *g == l.gen).expect("letter in alphabet");
    2 * i + usize::from(l.inverse)
}

struct Enumerator {
    table: Vec<Vec<usize>>,
    parent: Vec<usize>,
    cols: usize,
    limit: usize,
}

impl Enumerator {
    fn rep(&mut self, mut c: usize) -> usize {
        let mut root = c;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[c] != root {
            let next = self.parent[c];
            self.parent[c] = root;
            c = next;
        }
        root
    }

    fn live(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn define(&mut self, c: usize, x: usize) -> bool {
        if self.table.len() >= self.limit {
            return false;
        }
        let n = self.table.len();
        self.table.push(vec![NONE; self.cols]);
        self.parent.push(n);
        self.table[c][x] = n;
        self.table[n][x ^ 1] = c;
        true
    }

    fn merge(&mut self, k: usize, l: usize, queue: &mut Vec<usize>) {
        let (k, l) = (self.rep(k), self.rep(l));
        if k == l {
            return;
        }
        let (k, l) = (k.min(l), k.max(l));
        self.parent[l] = k;
        queue.push(l);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut i = 0;
        while i < queue.len() {
            let e = queue[i];
            i += 1;
            for x in 0..self.cols {
                let f = self.table[e][x];
                if f == NONE {
                    continue;
                }
                self.table[f][x ^ 1] = NONE;
                let (e1, f1) = (self.rep(e), self.rep(f));
                if self.table[e1][x] != NONE {
                    let t = self.table[e1][x];
                    self.merge(f1, t, &mut queue);
                } else if self.table[f1][x ^ 1] != NONE {
                    let t = self.table[f1][x ^ 1];
                    self.merge(e1, t, &mut queue);
                } else {
                    self.table[e1][x] = f1;
                    self.table[f1][x ^ 1] = e1;
                }
            }
        }
    }

    /// Scans `w` at coset `c`, defining cosets as needed. False when the
    /// definition limit is hit.
    fn scan_and_fill(&mut self, c: usize, w: &[usize]) -> bool {
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0isize, w.len() as isize - 1);
        loop {
            while i <= j && self.table[f][w[i as usize]] != NONE {
                f = self.table[f][w[i as usize]];
                i += 1;
            }
            if i > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return true;
            }
            while j >= i && self.table[b][w[j as usize] ^ 1] != NONE {
                b = self.table[b][w[j as usize] ^ 1];
                j -= 1;
            }
            if j < i {
                self.coincidence(f, b);
                return true;
            }
            if i == j {
                let x = w[i as usize];
                self.table[f][x] = b;
                self.table[b][x ^ 1] = f;
                return true;
            }
            if !self.define(f, w[i as usize]) {
                return false;
            }
        }
    }
}

/// A complete coset table for a finite-index subgroup. Coset 0 is the
/// subgroup itself; cosets are numbered in shortlex order of their least
/// representatives.
#[derive(Debug, Clone)]
pub(crate) struct CosetTable {
    alphabet: Vec<Generator>,
    table: Vec<Vec<usize>>,
}

impl CosetTable {
    pub(crate) fn len(&self) -> usize {
        self.table.len()
    }

    /// The coset `c · w`.
    pub(crate) fn act(&self, c: usize, w: &Word) -> usize {
        w.letters().iter().fold(c, |c, l| self.table[c][column(&self.alphabet, l)])
    }

    /// Shortlex-least words reaching each coset from coset 0.
    pub(crate) fn least_words(&self) -> Vec<Word> {
        let mut letters: Vec<Letter> = self.alphabet.iter().flat_map(|g| [g.pos(), g.neg()]).collect();
        letters.sort();
        let mut words: Vec<Option<Word>> = vec![None; self.len()];
        words[0] = Some(Word::identity());
        let mut queue = VecDeque::from([0]);
        while let Some(c) = queue.pop_front() {
            for l in &letters {
                let d = self.table[c][column(&self.alphabet, l)];
                if words[d].is_none() {
                    let mut w = words[c].clone().expect("visited");
                    w.push(l.clone());
                    words[d] = Some(w);
                    queue.push_back(d);
                }
            }
        }
        words.into_iter().map(|w| w.expect("complete tables are connected")).collect()
    }
}

/// Enumerates the cosets of `⟨subgroup⟩` in `⟨alphabet | relators⟩`, giving up
/// after `limit` coset definitions.
pub(crate) fn enumerate_cosets(
    alphabet: &[Generator],
    relators: &[Word],
    subgroup: &[Word],
    limit: usize,
) -> Option<CosetTable> {
    let cols = 2 * alphabet.len();
    let encode = |w: &Word| -> Vec<usize> { w.letters().iter().map(|l| column(alphabet, l)).collect() };
    let rels: Vec<Vec<usize>> = relators.iter().map(encode).collect();
    let mut en = Enumerator { table: vec![vec![NONE; cols]], parent: vec![0], cols, limit };
    for h in subgroup {
        if !en.scan_and_fill(0, &encode(h)) {
            return None;
        }
    }
    let mut c = 0;
    while c < en.table.len() {
        for r in &rels {
            if !en.live(c) {
                break;
            }
            if !en.scan_and_fill(c, r) {
                return None;
            }
        }
        if en.live(c) {
            for x in 0..cols {
                if en.table[c][x] == NONE && !en.define(c, x) {
                    return None;
                }
            }
        }
        c += 1;
    }
    // Renumber the live cosets by breadth-first search in letter order.
    let mut letters: Vec<Letter> = alphabet.iter().flat_map(|g| [g.pos(), g.neg()]).collect();
    letters.sort();
    let order: Vec<usize> = letters.iter().map(|l| column(alphabet, l)).collect();
    let mut index = vec![NONE; en.table.len()];
    let mut seq = vec![0];
    index[0] = 0;
    let mut k = 0;
    while k < seq.len() {
        let c = seq[k];
        k += 1;
        for &x in &order {
            let d = en.table[c][x];
            if index[d] == NONE {
                index[d] = seq.len();
                seq.push(d);
            }
        }
    }
    let table = seq.iter().map(|&c| en.table[c].iter().map(|&d| index[d]).collect()).collect();
    Some(CosetTable { alphabet: alphabet.to_vec(), table })
}

/// Exact oracle data for a finite group: its regular representation.
#[derive(Debug, Clone)]
pub(crate) struct FiniteGroup {
    pub(crate) table: CosetTable,
    pub(crate) least: Vec<Word>,
}

impl FiniteGroup {
    pub(crate) fn new(alphabet: &[Generator], relators: &[Word], limit: usize) -> Option<Self> {
        let table = enumerate_cosets(alphabet, relators, &[], limit)?;
        let least = table.least_words();
        Some(FiniteGroup { table, least })
    }

    pub(crate) fn element(&self, w: &Word) -> usize {
        self.table.act(0, w)
    }

    /// Shortest expression over `h_i` for every element of `⟨gens⟩`.
    pub(crate) fn subgroup_expressions(&self, gens: &[Word]) -> Vec<Option<Word>> {
        let mut symbols: Vec<Letter> = (0..gens.len()).flat_map(|i| [subgroup_symbol(i).pos(), subgroup_symbol(i).neg()]).collect();
        symbols.sort();
        let mut expr: Vec<Option<Word>> = vec![None; self.table.len()];
        expr[0] = Some(Word::identity());
        let mut queue = VecDeque::from([0]);
        while let Some(g) = queue.pop_front() {
            for s in &symbols {
                let h = self.table.act(g, &expand(&Word::letter(s.clone()), gens));
                if expr[h].is_none() {
                    let mut e = expr[g].clone().expect("visited");
                    e.push(s.clone());
                    expr[h] = Some(e);
                    queue.push_back(h);
                }
            }
        }
        expr
    }
}
