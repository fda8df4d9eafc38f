//! Finite-scale end structure: Cayley balls built through word-problem
//! oracles, components of `B(N) − B(n)` with refinement maps, truncated
//! universal covers of amalgams with Bass–Serre coset tags, the `Z̃⁺ / Z̃⁻`
//! split along `Γ₀`, and the incidence probe between components of `Γ₀ − C`
//! and of the two halves.
//!
//! Everything is computed inside the horizon `B(N)`: components that would
//! merge beyond it are reported as distinct.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::presentations::Presentation;
use crate::splittings::{oracle_for, FactorOracle, NormalForm, Side, SplitGroup, SplittingData, Verdict};
use crate::words::{Generator, Letter, Word};
use crate::Limits;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EndsError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("the truncation is approximate (an oracle answered UNKNOWN)")]
    Approximate,
    #[error("cover truncations need an amalgam")]
    NotAmalgam,
}

/// A group together with the means to compare its elements.
pub enum Group {
    Presented { presentation: Presentation, oracle: Box<dyn FactorOracle> },
    Split(SplitGroup),
}

impl Group {
    pub fn from_presentation(p: Presentation, limits: &Limits) -> Self {
        let oracle = oracle_for(&p, Vec::new(), limits);
        Group::Presented { presentation: p, oracle }
    }

    pub fn from_splitting(data: SplittingData, limits: &Limits) -> Self {
        Group::Split(SplitGroup::new(data, limits))
    }

    pub fn alphabet(&self) -> Vec<Generator> {
        match self {
            Group::Presented { presentation, .. } => presentation.alphabet().to_vec(),
            Group::Split(s) => s.data.alphabet(),
        }
    }

    fn key(&self, w: &Word) -> Option<String> {
        match self {
            Group::Presented { oracle, .. } => oracle.canonical_key(w),
            Group::Split(s) => s.canonical_key(w),
        }
    }

    pub fn word_problem(&self, w: &Word) -> Verdict {
        match self {
            Group::Presented { oracle, .. } => oracle.word_problem(w),
            Group::Split(s) => s.word_problem(w).unwrap_or(Verdict::Unknown),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Adjacent {
    Inside(usize),
    Outside,
    Unknown,
}

/// The ball of radius `radius` in the Cayley graph. Vertex words are the
/// shortlex-least representatives; `adjacency[v][i]` follows `letters[i]`.
#[derive(Debug, Clone)]
pub struct Ball {
    pub radius: usize,
    pub letters: Vec<Letter>,
    pub vertices: Vec<Word>,
    pub dist: Vec<usize>,
    pub adjacency: Vec<Vec<Adjacent>>,
    /// True when some equality could not be decided; vertices are then never
    /// merged, so the ball may contain duplicates.
    pub approximate: bool,
    keys: HashMap<String, usize>,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Vertex counts per distance.
    pub fn sphere_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.radius + 1];
        for &d in &self.dist {
            out[d] += 1;
        }
        out
    }

    fn letter_index(&self, l: &Letter) -> Option<usize> {
        self.letters.iter().position(|x| x == l)
    }

    /// Follows `w` from the identity; `None` when it leaves the ball.
    pub fn follow(&self, w: &Word) -> Option<usize> {
        let mut v = 0;
        for l in w.letters() {
            match self.adjacency[v][self.letter_index(l)?] {
                Adjacent::Inside(u) => v = u,
                _ => return None,
            }
        }
        Some(v)
    }

    /// Locates the vertex equal to `w`, through the canonical key when the
    /// oracle has one and by pairwise comparison otherwise.
    pub fn locate(&self, group: &Group, w: &Word) -> Option<usize> {
        if let Some(k) = group.key(w) {
            return self.keys.get(&k).copied();
        }
        (0..self.len()).find(|&v| group.word_problem(&w.concat(&self.vertices[v].inverse())) == Verdict::Trivial)
    }

    /// Undirected edges `(u, letter, v)`, one per positive letter.
    pub fn edges(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (u, row) in self.adjacency.iter().enumerate() {
            for (i, a) in row.iter().enumerate() {
                if let (Adjacent::Inside(v), false) = (*a, self.letters[i].inverse) {
                    out.push((u, i, v));
                }
            }
        }
        out
    }
}

/// Breadth-first enumeration in shortlex order: the first discovery of an
/// element is its shortlex-least word. A new word is compared with the
/// vertices at distances `d − 1`, `d` and `d + 1`.
pub fn cayley_ball(group: &Group, n: usize) -> Ball {
    let mut letters: Vec<Letter> = group.alphabet().iter().flat_map(|g| [g.pos(), g.neg()]).collect();
    letters.sort();
    let k = letters.len();
    let inverse_index: Vec<usize> =
        letters.iter().map(|l| letters.iter().position(|x| *x == l.inv()).unwrap()).collect();
    let mut ball = Ball {
        radius: n,
        letters,
        vertices: vec![Word::identity()],
        dist: vec![0],
        adjacency: vec![vec![Adjacent::Outside; k]],
        approximate: false,
        keys: HashMap::new(),
    };
    let mut filled = vec![vec![false; k]];
    let mut layers: Vec<Vec<usize>> = vec![vec![0]];
    if let Some(key) = group.key(&Word::identity()) {
        ball.keys.insert(key, 0);
    }
    for d in 0..=n {
        if d < n {
            layers.push(Vec::new());
        }
        let current = layers[d].clone();
        for v in current {
            for i in 0..k {
                if filled[v][i] {
                    continue;
                }
                let u = ball.vertices[v].concat(&Word::letter(ball.letters[i].clone()));
                let key = group.key(&u);
                let mut unknown = false;
                let found = match &key {
                    Some(key) => ball.keys.get(key).copied(),
                    None => {
                        let lo = d.saturating_sub(1);
                        let hi = (d + 1).min(layers.len() - 1);
                        let mut hit = None;
                        'search: for layer in &layers[lo..=hi] {
                            for &c in layer {
                                match group.word_problem(&u.concat(&ball.vertices[c].inverse())) {
                                    Verdict::Trivial => {
                                        hit = Some(c);
                                        break 'search;
                                    }
                                    Verdict::Unknown => unknown = true,
                                    Verdict::Nontrivial => {}
                                }
                            }
                        }
                        hit
                    }
                };
                let target = match found {
                    Some(c) => Some(c),
                    None if d < n => {
                        let idx = ball.vertices.len();
                        ball.vertices.push(u);
                        ball.dist.push(d + 1);
                        ball.adjacency.push(vec![Adjacent::Outside; k]);
                        filled.push(vec![false; k]);
                        layers[d + 1].push(idx);
                        if let Some(key) = key {
                            ball.keys.insert(key, idx);
                        }
                        Some(idx)
                    }
                    None => None,
                };
                if unknown {
                    ball.approximate = true;
                }
                match target {
                    Some(c) => {
                        ball.adjacency[v][i] = Adjacent::Inside(c);
                        filled[v][i] = true;
                        let j = inverse_index[i];
                        ball.adjacency[c][j] = Adjacent::Inside(v);
                        filled[c][j] = true;
                    }
                    None => {
                        ball.adjacency[v][i] = if unknown { Adjacent::Unknown } else { Adjacent::Outside };
                        filled[v][i] = true;
                    }
                }
            }
        }
    }
    ball
}

/// Components of `B(N) − B(n)` with contact counts and the refinement map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EndReport {
    pub cut: usize,
    pub horizon: usize,
    /// Sorted vertex lists, ordered by least vertex.
    pub components: Vec<Vec<usize>>,
    /// For each component, the component of `B(N) − B(n − 1)` containing it
    /// (absent at `n = 0`).
    pub parent: Option<Vec<usize>>,
    /// Vertices of each component at distance `n + 1`.
    pub inner_contacts: Vec<usize>,
    /// Vertices of each component on the outer sphere (distance `N`).
    pub outer_contacts: Vec<usize>,
    pub approximate: bool,
}

impl EndReport {
    pub fn count(&self) -> usize {
        self.components.len()
    }

    /// Components reaching the outer sphere.
    pub fn reaching_horizon(&self) -> usize {
        self.outer_contacts.iter().filter(|&&c| c > 0).count()
    }
}

/// Connected components of the subgraph induced on `keep`, via `neighbors`.
fn components_of(n: usize, keep: &[bool], neighbors: &[Vec<usize>]) -> (Vec<Vec<usize>>, Vec<Option<usize>>) {
    let mut comp_of = vec![None; n];
    let mut comps = Vec::new();
    for s in 0..n {
        if !keep[s] || comp_of[s].is_some() {
            continue;
        }
        let id = comps.len();
        let mut members = vec![s];
        comp_of[s] = Some(id);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &u in &neighbors[v] {
                if keep[u] && comp_of[u].is_none() {
                    comp_of[u] = Some(id);
                    members.push(u);
                    queue.push_back(u);
                }
            }
        }
        members.sort_unstable();
        comps.push(members);
    }
    (comps, comp_of)
}

fn ball_neighbors(ball: &Ball) -> Vec<Vec<usize>> {
    ball.adjacency
        .iter()
        .map(|row| {
            row.iter()
                .filter_map(|a| match a {
                    Adjacent::Inside(u) => Some(*u),
                    _ => None,
                })
                .collect()
        })
        .collect()
}

fn cut_components(ball: &Ball, neighbors: &[Vec<usize>], n: usize) -> (Vec<Vec<usize>>, Vec<Option<usize>>) {
    let keep: Vec<bool> = ball.dist.iter().map(|&d| d > n).collect();
    components_of(ball.len(), &keep, neighbors)
}

pub fn complement_components(ball: &Ball, n: usize) -> Result<EndReport, EndsError> {
    if n >= ball.radius {
        return Err(EndsError::Precondition(format!("cut {n} must be below the horizon {}", ball.radius)));
    }
    let neighbors = ball_neighbors(ball);
    let (components, _) = cut_components(ball, &neighbors, n);
    let parent = (n > 0).then(|| {
        let (_, coarse) = cut_components(ball, &neighbors, n - 1);
        components.iter().map(|c| coarse[c[0]].expect("finer vertices lie beyond the coarser cut")).collect()
    });
    let count = |c: &Vec<usize>, d: usize| c.iter().filter(|&&v| ball.dist[v] == d).count();
    Ok(EndReport {
        cut: n,
        horizon: ball.radius,
        inner_contacts: components.iter().map(|c| count(c, n + 1)).collect(),
        outer_contacts: components.iter().map(|c| count(c, ball.radius)).collect(),
        components,
        parent,
        approximate: ball.approximate,
    })
}

/// Reports for every cut `0 ≤ n < N`.
pub fn end_series(ball: &Ball) -> Vec<EndReport> {
    (0..ball.radius).map(|n| complement_components(ball, n).expect("cut below horizon")).collect()
}

/// Checks that `fine` (cut `n`) partitions `B(N) − B(n)` and that every one
/// of its components lies inside the component of `coarse` (cut `n − 1`)
/// named by the parent map.
pub fn refinement_is_consistent(ball: &Ball, coarse: &EndReport, fine: &EndReport) -> bool {
    let mut owner = vec![None; ball.len()];
    for (i, c) in coarse.components.iter().enumerate() {
        for &v in c {
            owner[v] = Some(i);
        }
    }
    let mut covered = 0;
    let Some(parent) = &fine.parent else { return false };
    for (i, c) in fine.components.iter().enumerate() {
        covered += c.len();
        if c.iter().any(|&v| ball.dist[v] <= fine.cut || owner[v] != Some(parent[i])) {
            return false;
        }
    }
    covered == ball.dist.iter().filter(|&&d| d > fine.cut).count()
}

/// An edge path from the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayPrefix {
    pub letters: Vec<Letter>,
}

impl RayPrefix {
    pub fn new(letters: Vec<Letter>) -> Self {
        RayPrefix { letters }
    }

    /// The visited vertices, starting at the identity.
    pub fn trace(&self, ball: &Ball) -> Result<Vec<usize>, EndsError> {
        let mut v = 0;
        let mut out = vec![0];
        for l in &self.letters {
            let i = ball
                .letter_index(l)
                .ok_or_else(|| EndsError::Precondition(format!("letter {l:?} is not a generator")))?;
            match ball.adjacency[v][i] {
                Adjacent::Inside(u) => v = u,
                _ => return Err(EndsError::Precondition("ray prefix leaves the ball".into())),
            }
            out.push(v);
        }
        Ok(out)
    }
}

/// True when the parts of the two prefixes after their last visit to `B(n)`
/// lie in one component of `B(N) − B(n)`.
pub fn same_end_prefix(r1: &RayPrefix, r2: &RayPrefix, ball: &Ball, n: usize) -> Result<bool, EndsError> {
    let report = complement_components(ball, n)?;
    let mut comp_of = vec![usize::MAX; ball.len()];
    for (i, c) in report.components.iter().enumerate() {
        for &v in c {
            comp_of[v] = i;
        }
    }
    let mut ends = Vec::new();
    for r in [r1, r2] {
        let path = r.trace(ball)?;
        let last = *path.last().unwrap();
        if ball.dist[last] <= n {
            return Err(EndsError::Precondition("ray prefix ends inside the cut".into()));
        }
        ends.push(comp_of[last]);
    }
    Ok(ends[0] == ends[1])
}

/// The ball of an amalgam with Bass–Serre coset tags. A tag is the canonical
/// left-coset representative (syllables joined by ` | `); the empty tag marks
/// the cosets of the identity, so `Γ₀`, `X̃₀`, `Ỹ₀` are the vertices with
/// empty `h_tag`, `a_tag`, `b_tag`.
#[derive(Debug, Clone)]
pub struct CoverTruncation {
    pub ball: Ball,
    pub a_tag: Vec<String>,
    pub b_tag: Vec<String>,
    pub h_tag: Vec<String>,
    /// Side owning each ball letter.
    pub letter_side: Vec<Side>,
    /// Composite edges `v → v · h_i` inside `Γ₀`: `(v, i, target)`.
    pub h_edges: Vec<(usize, usize, usize)>,
    pub approximate: bool,
}

impl CoverTruncation {
    pub fn gamma0(&self) -> Vec<usize> {
        (0..self.ball.len()).filter(|&v| self.h_tag[v].is_empty()).collect()
    }
}

pub fn build_cover_truncation(group: &Group, n: usize) -> Result<CoverTruncation, EndsError> {
    let Group::Split(split) = group else { return Err(EndsError::NotAmalgam) };
    let SplittingData::Amalgam(am) = &split.data else { return Err(EndsError::NotAmalgam) };
    let ball = cayley_ball(group, n);
    let mut approximate = ball.approximate;
    let mut a_tag = Vec::new();
    let mut b_tag = Vec::new();
    let mut h_tag = Vec::new();
    for (v, g) in ball.vertices.iter().enumerate() {
        // The left normal form of g is the inverted right normal form of g⁻¹.
        match split.normal_form(&g.inverse()) {
            Ok(Ok(NormalForm::Amalgam(f))) => {
                let left: Vec<(Side, Word)> = f.syllables.iter().rev().map(|(s, w)| (*s, w.inverse())).collect();
                let join = |parts: &[(Side, Word)]| {
                    parts.iter().map(|(_, w)| w.to_string()).collect::<Vec<_>>().join(" | ")
                };
                let last = left.last().map(|(s, _)| *s);
                let trim = |side: Side| if last == Some(side) { &left[..left.len() - 1] } else { &left[..] };
                h_tag.push(join(&left));
                a_tag.push(join(trim(Side::A)));
                b_tag.push(join(trim(Side::B)));
            }
            _ => {
                approximate = true;
                for tags in [&mut a_tag, &mut b_tag, &mut h_tag] {
                    tags.push(format!("?{v}"));
                }
            }
        }
    }
    let letter_side = ball
        .letters
        .iter()
        .map(|l| am.side_of(&l.gen).expect("ball letters come from the amalgam"))
        .collect();
    let mut h_edges = Vec::new();
    for v in 0..ball.len() {
        if !h_tag[v].is_empty() {
            continue;
        }
        for (i, h) in am.h_in_a.iter().enumerate() {
            let target = ball.vertices[v].concat(h);
            if let Some(u) = ball.locate(group, &target) {
                if h_tag[u].is_empty() {
                    h_edges.push((v, i, u));
                }
            }
        }
    }
    Ok(CoverTruncation { ball, a_tag, b_tag, h_tag, letter_side, h_edges, approximate })
}

/// The graph of one half: `plus` keeps `(Z̃ − Ỹ₀) ∪ Γ₀` with the `A`-edges,
/// the `B`-edges outside `Ỹ₀` and the composite `H`-edges of `Γ₀`; the minus
/// half is symmetric.
fn half_graph(tr: &CoverTruncation, plus: bool) -> (Vec<bool>, Vec<Vec<usize>>) {
    let (removed_tag, own_side) = if plus { (&tr.b_tag, Side::A) } else { (&tr.a_tag, Side::B) };
    let n = tr.ball.len();
    let keep: Vec<bool> = (0..n).map(|v| !removed_tag[v].is_empty() || tr.h_tag[v].is_empty()).collect();
    let mut neighbors = vec![Vec::new(); n];
    for v in 0..n {
        if !keep[v] {
            continue;
        }
        for (i, a) in tr.ball.adjacency[v].iter().enumerate() {
            let Adjacent::Inside(u) = *a else { continue };
            if !keep[u] {
                continue;
            }
            if tr.letter_side[i] == own_side || !removed_tag[v].is_empty() {
                neighbors[v].push(u);
            }
        }
    }
    for &(v, _, u) in &tr.h_edges {
        neighbors[v].push(u);
        neighbors[u].push(v);
    }
    (keep, neighbors)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitComplex {
    pub zplus: Vec<usize>,
    pub zminus: Vec<usize>,
    pub gamma0: Vec<usize>,
}

impl SplitComplex {
    pub fn intersection(&self) -> Vec<usize> {
        self.zplus.iter().filter(|v| self.zminus.binary_search(v).is_ok()).copied().collect()
    }
}

/// `Z̃⁺`: the union of the components of `(Z̃ − Ỹ₀) ∪ Γ₀` meeting `Γ₀`
/// (`Γ₀` may be cut into several pieces by the horizon); `Z̃⁻` symmetrically.
pub fn split_complex(tr: &CoverTruncation) -> Result<SplitComplex, EndsError> {
    if tr.approximate {
        return Err(EndsError::Approximate);
    }
    let gamma0 = tr.gamma0();
    let half = |plus: bool| {
        let (keep, neighbors) = half_graph(tr, plus);
        let (comps, _) = components_of(tr.ball.len(), &keep, &neighbors);
        let mut out: Vec<usize> = comps
            .into_iter()
            .filter(|c| c.iter().any(|&v| tr.h_tag[v].is_empty()))
            .flatten()
            .collect();
        out.sort_unstable();
        out
    };
    Ok(SplitComplex { zplus: half(true), zminus: half(false), gamma0 })
}

/// Incidence between the components of `Γ₀ − C` and those of `Z̃⁺ − C` and
/// `Z̃⁻ − C`, with `C = B(n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub cut: usize,
    pub gamma_components: Vec<Vec<usize>>,
    pub plus_components: Vec<Vec<usize>>,
    pub minus_components: Vec<Vec<usize>>,
    /// `plus_incidence[i][j]`: Γ₀-component `i` meets `Z̃⁺`-component `j`.
    pub plus_incidence: Vec<Vec<bool>>,
    pub minus_incidence: Vec<Vec<bool>>,
    /// Γ₀-component of the cut `n − 1` containing each component.
    pub gamma_parent: Option<Vec<usize>>,
    pub plus_parent: Option<Vec<usize>>,
    pub minus_parent: Option<Vec<usize>>,
}

struct ProbeLevel {
    gamma: (Vec<Vec<usize>>, Vec<Option<usize>>),
    plus: (Vec<Vec<usize>>, Vec<Option<usize>>),
    minus: (Vec<Vec<usize>>, Vec<Option<usize>>),
}

fn probe_level(tr: &CoverTruncation, split: &SplitComplex, n: usize) -> ProbeLevel {
    let size = tr.ball.len();
    let outside = |v: usize| tr.ball.dist[v] > n;
    let mut gamma_neighbors = vec![Vec::new(); size];
    for &(v, _, u) in &tr.h_edges {
        gamma_neighbors[v].push(u);
        gamma_neighbors[u].push(v);
    }
    let gamma_keep: Vec<bool> = (0..size).map(|v| tr.h_tag[v].is_empty() && outside(v)).collect();
    let half = |plus: bool, members: &[usize]| {
        let (_, neighbors) = half_graph(tr, plus);
        let mut keep = vec![false; size];
        for &v in members {
            keep[v] = outside(v);
        }
        components_of(size, &keep, &neighbors)
    };
    ProbeLevel {
        gamma: components_of(size, &gamma_keep, &gamma_neighbors),
        plus: half(true, &split.zplus),
        minus: half(false, &split.zminus),
    }
}

pub fn figure1_probe(tr: &CoverTruncation, n: usize) -> Result<ProbeReport, EndsError> {
    let split = split_complex(tr)?;
    let level = probe_level(tr, &split, n);
    let incidence = |half: &(Vec<Vec<usize>>, Vec<Option<usize>>)| -> Vec<Vec<bool>> {
        level
            .gamma
            .0
            .iter()
            .map(|g| {
                let mut row = vec![false; half.0.len()];
                for &v in g {
                    if let Some(j) = half.1[v] {
                        row[j] = true;
                    }
                }
                row
            })
            .collect()
    };
    let coarse = (n > 0).then(|| probe_level(tr, &split, n - 1));
    let parents = |fine: &Vec<Vec<usize>>, pick: fn(&ProbeLevel) -> &Vec<Option<usize>>| {
        coarse.as_ref().map(|c| fine.iter().map(|comp| pick(c)[comp[0]].expect("nested cuts")).collect())
    };
    Ok(ProbeReport {
        cut: n,
        plus_incidence: incidence(&level.plus),
        minus_incidence: incidence(&level.minus),
        gamma_parent: parents(&level.gamma.0, |l| &l.gamma.1),
        plus_parent: parents(&level.plus.0, |l| &l.plus.1),
        minus_parent: parents(&level.minus.0, |l| &l.minus.1),
        gamma_components: level.gamma.0,
        plus_components: level.plus.0,
        minus_components: level.minus.0,
    })
}

/// If two Γ₀-components at the finer cut meet the same half-component, their
/// parents meet the same half-component at the coarser cut.
pub fn probe_is_monotone(coarse: &ProbeReport, fine: &ProbeReport) -> bool {
    let Some(gp) = &fine.gamma_parent else { return false };
    let owner = |inc: &Vec<Vec<bool>>, i: usize| inc[i].iter().position(|&b| b);
    for (inc_f, inc_c) in [(&fine.plus_incidence, &coarse.plus_incidence), (&fine.minus_incidence, &coarse.minus_incidence)] {
        for i in 0..inc_f.len() {
            for j in i + 1..inc_f.len() {
                let shared = (0..inc_f[i].len()).any(|k| inc_f[i][k] && inc_f[j][k]);
                if shared && owner(inc_c, gp[i]) != owner(inc_c, gp[j]) {
                    return false;
                }
            }
        }
    }
    true
}

const PALETTE: [&str; 8] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666"];

/// DOT rendering of a ball; vertices of the cut's components are colored,
/// `B(n)` is grey.
pub fn ball_to_dot(ball: &Ball, report: Option<&EndReport>) -> String {
    let mut color = vec!["#cccccc"; ball.len()];
    if let Some(r) = report {
        for (i, c) in r.components.iter().enumerate() {
            for &v in c {
                color[v] = PALETTE[i % PALETTE.len()];
            }
        }
    }
    let mut s = String::from("graph ball {\n  node [style=filled, shape=circle, label=\"\"];\n");
    for v in 0..ball.len() {
        let _ = writeln!(s, "  {v} [fillcolor=\"{}\", tooltip=\"{}\"];", color[v], ball.vertices[v]);
    }
    for (u, i, v) in ball.edges() {
        let _ = writeln!(s, "  {u} -- {v} [label=\"{}\"];", ball.letters[i].gen);
    }
    s.push_str("}\n");
    s
}

/// DOT rendering of a truncation: `Γ₀` black, `Z̃⁺` only green, `Z̃⁻` only
/// orange, other vertices grey.
pub fn truncation_to_dot(tr: &CoverTruncation, split: Option<&SplitComplex>) -> String {
    let mut color = vec!["#cccccc"; tr.ball.len()];
    if let Some(sc) = split {
        for &v in &sc.zplus {
            color[v] = PALETTE[0];
        }
        for &v in &sc.zminus {
            color[v] = PALETTE[1];
        }
    }
    for v in tr.gamma0() {
        color[v] = "#000000";
    }
    let mut s = String::from("graph cover {\n  node [style=filled, shape=circle, label=\"\"];\n");
    for v in 0..tr.ball.len() {
        let _ = writeln!(s, "  {v} [fillcolor=\"{}\", tooltip=\"{}\"];", color[v], tr.ball.vertices[v]);
    }
    for (u, i, v) in tr.ball.edges() {
        let style = if tr.letter_side[i] == Side::A { "solid" } else { "dashed" };
        let _ = writeln!(s, "  {u} -- {v} [style={style}, label=\"{}\"];", tr.ball.letters[i].gen);
    }
    for &(u, i, v) in &tr.h_edges {
        let _ = writeln!(s, "  {u} -- {v} [penwidth=3, label=\"h_{i}\"];");
    }
    s.push_str("}\n");
    s
}
