//! Independent oracles: faithful linear and affine representations, an
//! exhaustive normal-form table for the trefoil amalgam, determinantal
//! divisors for abelianizations, and brute-force subgroup enumeration.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

use num_rational::Ratio;

use cgt::words::Word;

pub fn w(s: &str) -> Word {
    s.parse().expect("word")
}

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

type Q = Ratio<i64>;
type M2 = [[Q; 2]; 2];

fn mul2(x: &M2, y: &M2) -> M2 {
    let mut out = [[Q::from_integer(0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                out[i][j] += x[i][k] * y[k][j];
            }
        }
    }
    out
}

/// BS(1,2) = ⟨a, t | t a t⁻¹ = a²⟩ in GL(2, ℚ): a ↦ [[1,1],[0,1]],
/// t ↦ [[2,0],[0,1]]. Faithful.
pub fn bs12_matrix(word: &Word) -> M2 {
    let q = |n: i64, d: i64| Q::new(n, d);
    let mut m = [[q(1, 1), q(0, 1)], [q(0, 1), q(1, 1)]];
    for l in word.letters() {
        let g = match (l.gen.name(), l.inverse) {
            ("a", false) => [[q(1, 1), q(1, 1)], [q(0, 1), q(1, 1)]],
            ("a", true) => [[q(1, 1), q(-1, 1)], [q(0, 1), q(1, 1)]],
            ("t", false) => [[q(2, 1), q(0, 1)], [q(0, 1), q(1, 1)]],
            ("t", true) => [[q(1, 2), q(0, 1)], [q(0, 1), q(1, 1)]],
            (other, _) => panic!("unexpected generator {other}"),
        };
        m = mul2(&m, &g);
    }
    m
}

pub fn bs12_trivial(word: &Word) -> bool {
    let one = Q::from_integer(1);
    let zero = Q::from_integer(0);
    bs12_matrix(word) == [[one, zero], [zero, one]]
}

type A3 = [[i64; 3]; 3];

fn mul3(x: &A3, y: &A3) -> A3 {
    let mut out = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| x[i][k] * y[k][j]).sum();
        }
    }
    out
}

const ID3: A3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];

/// Klein bottle group ⟨a, b | a b a b⁻¹⟩ acting on the plane by
/// a: (x, y) ↦ (x + 1, y), b: (x, y) ↦ (−x, y + 1). The deck group of the
/// Klein bottle, hence faithful.
pub fn klein_affine(word: &Word) -> A3 {
    let mut m = ID3;
    for l in word.letters() {
        let g = match (l.gen.name(), l.inverse) {
            ("a", false) => [[1, 0, 1], [0, 1, 0], [0, 0, 1]],
            ("a", true) => [[1, 0, -1], [0, 1, 0], [0, 0, 1]],
            ("b", false) => [[-1, 0, 0], [0, 1, 1], [0, 0, 1]],
            ("b", true) => [[-1, 0, 0], [0, 1, -1], [0, 0, 1]],
            (other, _) => panic!("unexpected generator {other}"),
        };
        m = mul3(&m, &g);
    }
    m
}

pub fn klein_trivial(word: &Word) -> bool {
    klein_affine(word) == ID3
}

/// Value of a trefoil element ⟨x, y | x² = y³⟩ under the faithful map to
/// SL(2, ℤ) × ℤ: x ↦ (S, 3), y ↦ (ST, 2) with S = [[0,−1],[1,0]],
/// ST = [[0,−1],[1,1]]. The kernel lies in the center ⟨x²⟩, which maps
/// injectively to the ℤ factor.
pub fn trefoil_value(word: &Word) -> ([[i64; 2]; 2], i64) {
    let mut m = [[1i64, 0], [0, 1]];
    let mut e = 0;
    for l in word.letters() {
        let (g, d) = match (l.gen.name(), l.inverse) {
            ("x", false) => ([[0, -1], [1, 0]], 3),
            ("x", true) => ([[0, 1], [-1, 0]], -3),
            ("y", false) => ([[0, -1], [1, 1]], 2),
            ("y", true) => ([[1, 1], [-1, 0]], -2),
            (other, _) => panic!("unexpected generator {other}"),
        };
        m = [
            [m[0][0] * g[0][0] + m[0][1] * g[1][0], m[0][0] * g[0][1] + m[0][1] * g[1][1]],
            [m[1][0] * g[0][0] + m[1][1] * g[1][0], m[1][0] * g[0][1] + m[1][1] * g[1][1]],
        ];
        e += d;
    }
    (m, e)
}

/// Every normal form `(h_0^m) | s_1 | … | s_k` of the trefoil amalgam with
/// `|m| ≤ max_head` and `k ≤ max_syllables`, keyed by group element. Right
/// coset representatives are the shortlex-least ones: `x` for ⟨x⟩ over
/// ⟨x²⟩ and `y`, `y⁻¹` for ⟨y⟩ over ⟨y³⟩; syllables alternate sides.
pub fn trefoil_form_table(max_head: i64, max_syllables: usize) -> HashMap<([[i64; 2]; 2], i64), String> {
    let a_reps = ["x"];
    let b_reps = ["y", "y^-1"];
    let mut seqs: Vec<(Vec<&str>, Option<bool>)> = vec![(Vec::new(), None)];
    let mut all = seqs.clone();
    for _ in 0..max_syllables {
        let mut next = Vec::new();
        for (s, last_a) in &seqs {
            if *last_a != Some(true) {
                for r in a_reps {
                    let mut t = s.clone();
                    t.push(r);
                    next.push((t, Some(true)));
                }
            }
            if *last_a != Some(false) {
                for r in b_reps {
                    let mut t = s.clone();
                    t.push(r);
                    next.push((t, Some(false)));
                }
            }
        }
        all.extend(next.iter().cloned());
        seqs = next;
    }
    let mut table = HashMap::new();
    for m in -max_head..=max_head {
        for (s, _) in &all {
            let head = match m {
                0 => None,
                1 => Some("(h_0)".to_string()),
                _ => Some(format!("(h_0^{m})")),
            };
            let text = match (&head, s.is_empty()) {
                (None, true) => "1".to_string(),
                (None, false) => s.join(" | "),
                (Some(h), true) => h.clone(),
                (Some(h), false) => format!("{h} | {}", s.join(" | ")),
            };
            let mut word = w("x").pow(2 * m);
            for syl in s {
                word = word.concat(&w(syl));
            }
            let prev = table.insert(trefoil_value(&word), text);
            assert!(prev.is_none(), "two normal forms for one element");
        }
    }
    table
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Fraction-free (Bareiss) determinant.
fn det(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Abelian invariants `(free rank, torsion)` from the determinantal divisors
/// `d_k` = gcd of the k×k minors of the relation matrix.
pub fn invariants_by_minors(rows: &[Vec<i128>], ncols: usize) -> (usize, Vec<i128>) {
    let mut divisors = vec![1i128];
    for k in 1..=rows.len().min(ncols) {
        let mut g = 0i128;
        'all: for rs in combinations(rows.len(), k) {
            for cs in combinations(ncols, k) {
                let minor = rs.iter().map(|&r| cs.iter().map(|&c| rows[r][c]).collect()).collect();
                g = gcd(g, det(minor));
                if g == 1 {
                    break 'all;
                }
            }
        }
        if g == 0 {
            break;
        }
        divisors.push(g);
    }
    let rank = divisors.len() - 1;
    let torsion = divisors.windows(2).map(|p| p[1] / p[0]).filter(|&s| s > 1).collect();
    (ncols - rank, torsion)
}

/// Reduced words of length at most `max_len` that are products of at most
/// `factors` generator powers `h_i^k` with `0 < |k| ≤ max_power`. Partial
/// products too long to cancel back under `max_len` are pruned.
pub fn brute_force_elements(gens: &[Word], factors: usize, max_len: usize, max_power: i64) -> BTreeSet<Word> {
    let mut pool: Vec<Word> = gens
        .iter()
        .flat_map(|g| (1..=max_power).flat_map(move |k| [g.pow(k), g.pow(-k)]))
        .collect();
    pool.sort();
    pool.dedup();
    let longest = pool.iter().map(Word::len).max().unwrap_or(0);
    let mut layer = BTreeSet::from([Word::identity()]);
    let mut all = layer.clone();
    for step in 1..=factors {
        let slack = max_len + (factors - step) * longest;
        let mut next = BTreeSet::new();
        for x in &layer {
            for g in &pool {
                let y = x.concat(g);
                if y.len() <= slack {
                    next.insert(y);
                }
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all.into_iter().filter(|x| x.len() <= max_len).collect()
}

/// `4·3^(n-1)` reduced words of length `n ≥ 1` in F(a, b), by counting.
pub fn free_sphere(n: usize) -> usize {
    if n == 0 {
        1
    } else {
        4 * 3usize.pow(n as u32 - 1)
    }
}
