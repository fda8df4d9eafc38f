//! Folded subgroup graphs for finitely generated subgroups of free groups.
//!
//! Folding runs on a worklist of label clashes with union-find vertex
//! merging. Every edge also carries a word over the subgroup symbols
//! `h_i` (see [`crate::words::subgroup_symbol`]); the product of those labels
//! along a closed path at the base expresses the path's element in terms of
//! the given generators. Merging two vertices first re-gauges one of them so
//! the two clashing edges agree, which keeps that readout valid.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::words::{subgroup_symbol, Generator, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Index {
    Finite(usize),
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphEdge {
    pub from: usize,
    pub gen: usize,
    pub to: usize,
    /// Expression over the subgroup symbols, oriented from `from` to `to`.
    pub label: Word,
}

/// A folded core graph with base vertex 0 and vertices numbered by
/// breadth-first discovery in canonical letter order.
#[derive(Debug, Clone)]
pub struct SubgroupGraph {
    alphabet: Vec<Generator>,
    generators: Vec<Word>,
    num_vertices: usize,
    edges: Vec<GraphEdge>,
    out: Vec<Vec<Option<usize>>>,
    inn: Vec<Vec<Option<usize>>>,
    tree: Vec<Word>,
}

struct RawEdge {
    from: usize,
    gen: usize,
    to: usize,
    label: Word,
    alive: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Dir {
    Out,
    In,
}

struct Folder {
    parent: Vec<usize>,
    gauge: Vec<Word>,
    edges: Vec<RawEdge>,
    incident: Vec<Vec<usize>>,
}

impl Folder {
    fn add_vertex(&mut self) -> usize {
        let v = self.parent.len();
        self.parent.push(v);
        self.gauge.push(Word::identity());
        self.incident.push(Vec::new());
        v
    }

    fn add_edge(&mut self, from: usize, gen: usize, to: usize, label: Word) {
        let id = self.edges.len();
        self.edges.push(RawEdge { from, gen, to, label, alive: true });
        self.incident[from].push(id);
        if to != from {
            self.incident[to].push(id);
        }
    }

    /// Root of `v` and the gauge word `W(v)` (root-first product).
    fn find(&mut self, v: usize) -> (usize, Word) {
        let mut path = vec![v];
        while self.parent[*path.last().unwrap()] != *path.last().unwrap() {
            let p = self.parent[*path.last().unwrap()];
            path.push(p);
        }
        let root = path.pop().unwrap();
        let mut acc = Word::identity();
        for &u in path.iter().rev() {
            acc = acc.concat(&self.gauge[u]);
            self.gauge[u] = acc.clone();
            self.parent[u] = root;
        }
        let w = if v == root { Word::identity() } else { self.gauge[v].clone() };
        (root, w)
    }

    /// Effective endpoints and label of edge `id`.
    fn effective(&mut self, id: usize) -> (usize, usize, Word) {
        let (from, to) = (self.edges[id].from, self.edges[id].to);
        let (rf, wf) = self.find(from);
        let (rt, wt) = self.find(to);
        let label = wf.concat(&self.edges[id].label).concat(&wt.inverse());
        (rf, rt, label)
    }

    fn attach(&mut self, child: usize, root: usize, g: Word) {
        self.parent[child] = root;
        self.gauge[child] = g;
        let moved = std::mem::take(&mut self.incident[child]);
        self.incident[root].extend(moved);
    }

    /// Finds a pair of distinct live edges at root `r` with the same label and
    /// direction.
    fn clash_at(&mut self, r: usize, rng: Option<&mut ChaCha8Rng>) -> Option<(usize, usize, Dir)> {
        let mut ids = self.incident[r].clone();
        ids.sort_unstable();
        ids.dedup();
        ids.retain(|&id| self.edges[id].alive);
        self.incident[r] = ids.clone();
        let mut keyed: Vec<((usize, Dir), usize)> = Vec::new();
        for &id in &ids {
            let (rf, rt, _) = self.effective(id);
            let gen = self.edges[id].gen;
            if rf == r {
                keyed.push(((gen, Dir::Out), id));
            }
            if rt == r {
                keyed.push(((gen, Dir::In), id));
            }
        }
        let mut clashes = Vec::new();
        for i in 0..keyed.len() {
            for j in i + 1..keyed.len() {
                if keyed[i].0 == keyed[j].0 && keyed[i].1 != keyed[j].1 {
                    clashes.push((keyed[i].1, keyed[j].1, keyed[i].0 .1));
                }
            }
        }
        match rng {
            Some(rng) if !clashes.is_empty() => {
                let k = rng.gen_range(0..clashes.len());
                let (a, b, d) = clashes[k];
                Some(if rng.gen_bool(0.5) { (a, b, d) } else { (b, a, d) })
            }
            _ => clashes.into_iter().next(),
        }
    }

    fn fold_pair(&mut self, r0: usize, e1: usize, e2: usize, dir: Dir) -> Option<usize> {
        let (f1, t1, l1) = self.effective(e1);
        let (f2, t2, l2) = self.effective(e2);
        let (r1, r2) = match dir {
            Dir::Out => (t1, t2),
            Dir::In => (f1, f2),
        };
        self.edges[e2].alive = false;
        if r1 == r2 {
            return None;
        }
        let (child, root, g) = match (dir, r2 != r0) {
            (Dir::Out, true) => (r2, r1, l1.inverse().concat(&l2)),
            (Dir::Out, false) => (r1, r2, l2.inverse().concat(&l1)),
            (Dir::In, true) => (r2, r1, l1.concat(&l2.inverse())),
            (Dir::In, false) => (r1, r2, l2.concat(&l1.inverse())),
        };
        self.attach(child, root, g);
        Some(root)
    }

    fn run(&mut self, mut rng: Option<ChaCha8Rng>) {
        let mut work: Vec<usize> = (0..self.parent.len()).collect();
        while !work.is_empty() {
            let k = match rng.as_mut() {
                Some(rng) => rng.gen_range(0..work.len()),
                None => work.len() - 1,
            };
            let v = work.swap_remove(k);
            let (r, _) = self.find(v);
            if let Some((e1, e2, dir)) = self.clash_at(r, rng.as_mut()) {
                if let Some(root) = self.fold_pair(r, e1, e2, dir) {
                    work.push(root);
                }
                let (r, _) = self.find(r);
                work.push(r);
                if let Some(rng) = rng.as_mut() {
                    work.shuffle(rng);
                }
            }
        }
    }
}

/// Build the flower of `gens` and fold it; the result is trimmed to its core.
pub fn build_and_fold(alphabet: &[Generator], gens: &[Word]) -> SubgroupGraph {
    fold_impl(alphabet, gens, None)
}

/// Same as [`build_and_fold`] but with a seeded random fold order. The
/// resulting graph must not depend on the seed.
pub fn build_and_fold_shuffled(alphabet: &[Generator], gens: &[Word], seed: u64) -> SubgroupGraph {
    fold_impl(alphabet, gens, Some(ChaCha8Rng::seed_from_u64(seed)))
}

fn fold_impl(alphabet: &[Generator], gens: &[Word], rng: Option<ChaCha8Rng>) -> SubgroupGraph {
    let mut alphabet = alphabet.to_vec();
    alphabet.sort();
    alphabet.dedup();
    let gen_index = |g: &Generator| {
        alphabet
            .binary_search(g)
            .unwrap_or_else(|_| panic!("generator {g} outside the ambient alphabet"))
    };
    let mut f = Folder { parent: Vec::new(), gauge: Vec::new(), edges: Vec::new(), incident: Vec::new() };
    f.add_vertex();
    for (i, w) in gens.iter().enumerate() {
        let n = w.len();
        if n == 0 {
            continue;
        }
        let mut prev = 0;
        for (k, l) in w.letters().iter().enumerate() {
            let next = if k + 1 == n { 0 } else { f.add_vertex() };
            let h = if k == 0 { Word::letter(subgroup_symbol(i).pos()) } else { Word::identity() };
            let g = gen_index(&l.gen);
            if l.inverse {
                f.add_edge(next, g, prev, h.inverse());
            } else {
                f.add_edge(prev, g, next, h);
            }
            prev = next;
        }
    }
    f.run(rng);
    finish(f, alphabet, gens.to_vec())
}

fn finish(mut f: Folder, alphabet: Vec<Generator>, generators: Vec<Word>) -> SubgroupGraph {
    let (base_root, base_gauge) = f.find(0);
    let mut live: Vec<(usize, usize, usize, Word)> = Vec::new();
    for id in 0..f.edges.len() {
        if f.edges[id].alive {
            let (rf, rt, l) = f.effective(id);
            let l = base_gauge.inverse().concat(&l).concat(&base_gauge);
            live.push((rf, f.edges[id].gen, rt, l));
        }
    }
    // Core: trim non-base vertices of degree one.
    let n = f.parent.len();
    let mut degree = vec![0usize; n];
    for &(a, _, b, _) in &live {
        degree[a] += 1;
        degree[b] += 1;
    }
    let mut removed = vec![false; n];
    let mut alive_edge = vec![true; live.len()];
    loop {
        let mut changed = false;
        for (i, &(a, _, b, _)) in live.iter().enumerate() {
            if !alive_edge[i] {
                continue;
            }
            for v in [a, b] {
                if v != base_root && degree[v] == 1 && !removed[v] {
                    removed[v] = true;
                    alive_edge[i] = false;
                    degree[a] -= 1;
                    degree[b] -= 1;
                    changed = true;
                    break;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let live: Vec<_> = live.into_iter().zip(alive_edge).filter(|(_, a)| *a).map(|(e, _)| e).collect();

    // Canonical renumbering by BFS from the base.
    let k = alphabet.len();
    let mut out_raw = std::collections::HashMap::new();
    let mut in_raw = std::collections::HashMap::new();
    for (i, &(a, g, b, _)) in live.iter().enumerate() {
        out_raw.insert((a, g), i);
        in_raw.insert((b, g), i);
    }
    let mut number = std::collections::HashMap::new();
    let mut order = vec![base_root];
    let mut tree = vec![Word::identity()];
    number.insert(base_root, 0usize);
    let mut queue = VecDeque::from([base_root]);
    while let Some(v) = queue.pop_front() {
        let vw = tree[number[&v]].clone();
        for g in 0..k {
            let steps = [
                (out_raw.get(&(v, g)).map(|&i| live[i].2), alphabet[g].pos()),
                (in_raw.get(&(v, g)).map(|&i| live[i].0), alphabet[g].neg()),
            ];
            for (target, letter) in steps {
                if let Some(t) = target {
                    if !number.contains_key(&t) {
                        number.insert(t, order.len());
                        order.push(t);
                        let mut w = vw.clone();
                        w.push(letter);
                        tree.push(w);
                        queue.push_back(t);
                    }
                }
            }
        }
    }
    let nv = order.len();
    let mut edges: Vec<GraphEdge> = live
        .into_iter()
        .map(|(a, g, b, label)| GraphEdge { from: number[&a], gen: g, to: number[&b], label })
        .collect();
    edges.sort_by(|x, y| (x.from, x.gen, x.to).cmp(&(y.from, y.gen, y.to)));
    let mut out = vec![vec![None; k]; nv];
    let mut inn = vec![vec![None; k]; nv];
    for (i, e) in edges.iter().enumerate() {
        out[e.from][e.gen] = Some(i);
        inn[e.to][e.gen] = Some(i);
    }
    SubgroupGraph { alphabet, generators, num_vertices: nv, edges, out, inn, tree }
}

impl SubgroupGraph {
    pub fn alphabet(&self) -> &[Generator] {
        &self.alphabet
    }

    pub fn generators(&self) -> &[Word] {
        &self.generators
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    fn gen_index(&self, g: &Generator) -> Option<usize> {
        self.alphabet.binary_search(g).ok()
    }

    /// Follows `w` from the base as far as the graph allows. Returns the
    /// vertex reached, the number of letters read and the accumulated label.
    fn trace(&self, w: &Word) -> (usize, usize, Word) {
        let mut v = 0;
        let mut expr = Word::identity();
        for (i, l) in w.letters().iter().enumerate() {
            let Some(g) = self.gen_index(&l.gen) else {
                return (v, i, expr);
            };
            let step = if l.inverse {
                self.inn[v][g].map(|e| (self.edges[e].from, self.edges[e].label.inverse()))
            } else {
                self.out[v][g].map(|e| (self.edges[e].to, self.edges[e].label.clone()))
            };
            match step {
                Some((next, label)) => {
                    v = next;
                    expr = expr.concat(&label);
                }
                None => return (v, i, expr),
            }
        }
        (v, w.len(), expr)
    }

    /// Expression of `w` over the subgroup symbols when `w` lies in the
    /// subgroup.
    pub fn express(&self, w: &Word) -> Option<Word> {
        let (v, read, expr) = self.trace(w);
        (v == 0 && read == w.len()).then_some(expr)
    }

    pub fn member(&self, w: &Word) -> bool {
        self.express(w).is_some()
    }

    pub fn rank(&self) -> usize {
        self.edges.len() + 1 - self.num_vertices
    }

    pub fn index(&self) -> Index {
        let complete = (0..self.num_vertices).all(|v| {
            self.out[v].iter().all(Option::is_some) && self.inn[v].iter().all(Option::is_some)
        });
        if complete {
            Index::Finite(self.num_vertices)
        } else {
            Index::Infinite
        }
    }

    /// Right-coset decomposition `w = h · rep` with `rep` shortlex-minimal in
    /// `Hw`; `h` is returned as an expression over the subgroup symbols.
    pub fn coset_rep(&self, w: &Word) -> (Word, Word) {
        let (v, read, _) = self.trace(w);
        let rep = self.tree[v].concat(&w.slice(read, w.len()));
        let h = self
            .express(&w.concat(&rep.inverse()))
            .expect("w · rep⁻¹ closes at the base");
        (h, rep)
    }

    /// Shortlex-least label of a path from the base to `v`.
    pub fn tree_word(&self, v: usize) -> &Word {
        &self.tree[v]
    }

    /// Structure only: `(num_vertices, sorted (from, gen name, to) triples)`.
    pub fn canonical_form(&self) -> (usize, Vec<(usize, String, usize)>) {
        let edges = self.edges.iter().map(|e| (e.from, self.alphabet[e.gen].to_string(), e.to)).collect();
        (self.num_vertices, edges)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph subgroup {\n  0 [shape=doublecircle];\n");
        for v in 1..self.num_vertices {
            let _ = writeln!(s, "  {v} [shape=circle];");
        }
        for e in &self.edges {
            let _ = writeln!(s, "  {} -> {} [label=\"{}\"];", e.from, e.to, self.alphabet[e.gen]);
        }
        s.push_str("}\n");
        s
    }
}
