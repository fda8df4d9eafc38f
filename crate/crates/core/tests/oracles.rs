//! Library results checked against independent oracles: faithful matrix
//! representations, normal-form tables, determinantal divisors and direct
//! counts in free groups.

mod common;

use std::collections::{HashMap, HashSet, VecDeque};

use proptest::prelude::*;

use cgt::cli::syntax::{parse_presentation, parse_splitting};
use cgt::corpus;
use cgt::ends::{cayley_ball, complement_components, same_end_prefix, Group, RayPrefix};
use cgt::presentations::{abelian_invariants, add_free_factor, Presentation};
use cgt::splittings::{count_pinches, NormalForm, SplitGroup, SplittingData, SplittingOracles, Verdict};
use cgt::words::{free_reduce, Generator, Letter, Word};
use cgt::Limits;

use common::*;

fn letters_over(names: &'static [&'static str], max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..names.len(), any::<bool>()), 0..=max_len).prop_map(move |v| {
        free_reduce(v.into_iter().map(|(i, inv)| {
            let g = Generator::new(names[i]);
            if inv {
                g.neg()
            } else {
                g.pos()
            }
        }))
    })
}

fn split(name: &str) -> SplitGroup {
    SplitGroup::new(parse_splitting(corpus::splitting(name).unwrap()).unwrap(), &Limits::default())
}

fn pres(name: &str) -> Presentation {
    parse_presentation(corpus::presentation(name).unwrap()).unwrap()
}

fn rename(word: &Word, from: &str, to: &str) -> Word {
    word.substitute_with(|g| (g.name() == from).then(|| w(to)))
}

/// SL(2, ℤ) ≅ ℤ/4 *_{ℤ/2} ℤ/6 with x ↦ S, y ↦ ST.
fn sl2z_trivial(word: &Word) -> bool {
    let mut m = [[1i64, 0], [0, 1]];
    for l in word.letters() {
        let g = match (l.gen.name(), l.inverse) {
            ("x", false) => [[0, -1], [1, 0]],
            ("x", true) => [[0, 1], [-1, 0]],
            ("y", false) => [[0, -1], [1, 1]],
            ("y", true) => [[1, 1], [-1, 0]],
            (other, _) => panic!("unexpected generator {other}"),
        };
        m = [
            [m[0][0] * g[0][0] + m[0][1] * g[1][0], m[0][0] * g[0][1] + m[0][1] * g[1][1]],
            [m[1][0] * g[0][0] + m[1][1] * g[1][0], m[1][0] * g[0][1] + m[1][1] * g[1][1]],
        ];
    }
    m == [[1, 0], [0, 1]]
}

/// ℤ² *_{a = c} ℤ² is ℤ × F(b, d) with a = c generating the center.
fn z2_amalgam_trivial(word: &Word) -> bool {
    let central = word.exponent_sum(&Generator::new("a")) + word.exponent_sum(&Generator::new("c"));
    let free = free_reduce(word.letters().iter().filter(|l| matches!(l.gen.name(), "b" | "d")).cloned());
    central == 0 && free.is_empty()
}

#[test]
fn oracles_respect_their_relations() {
    assert!(bs12_trivial(&w("t a t^-1 a^-2")));
    assert!(!bs12_trivial(&w("a t a^-1 t^-1")));
    assert!(klein_trivial(&w("a b a b^-1")));
    assert!(!klein_trivial(&w("b^2 a b^-2 a")));
    assert_eq!(trefoil_value(&w("x^2 y^-3")), ([[1, 0], [0, 1]], 0));
    assert_ne!(trefoil_value(&w("x^2")), ([[1, 0], [0, 1]], 0));
    assert!(sl2z_trivial(&w("x^4")) && sl2z_trivial(&w("y^6")) && sl2z_trivial(&w("x^2 y^-3")));
    assert!(!sl2z_trivial(&w("x^2")));
    assert!(z2_amalgam_trivial(&w("a b a^-1 b^-1 c^-1 d c d^-1")));
    assert!(!z2_amalgam_trivial(&w("b d b^-1 d^-1")));
}

fn hnn_parts(g: &SplitGroup) -> (&cgt::splittings::HnnData, &dyn cgt::splittings::FactorOracle) {
    match (&g.data, &g.oracles) {
        (SplittingData::Hnn(h), SplittingOracles::Hnn(o)) => (h, o.as_ref()),
        _ => panic!("not an HNN extension"),
    }
}

fn check_britton(g: &SplitGroup, x: &Word, trivial: impl Fn(&Word) -> bool, relator: &Word) -> Result<(), TestCaseError> {
    let (hnn, oracle) = hnn_parts(g);
    let form = match g.normal_form(x).unwrap().unwrap() {
        NormalForm::Hnn(f) => f,
        NormalForm::Amalgam(_) => unreachable!(),
    };
    let spelled = form.to_word(hnn);
    prop_assert!(trivial(&spelled.concat(&x.inverse())), "{x} -> {spelled}");
    prop_assert!(form.stable_count() <= x.occurrences(&hnn.stable));
    prop_assert_eq!(count_pinches(hnn, &form, oracle), Some(0));
    let expected = if trivial(x) { Verdict::Trivial } else { Verdict::Nontrivial };
    prop_assert_eq!(g.word_problem(x).unwrap(), expected);
    let conj = x.concat(relator).concat(&x.inverse());
    prop_assert!(g.normal_form(&conj).unwrap().unwrap().is_identity());
    Ok(())
}

fn trefoil_table() -> &'static HashMap<([[i64; 2]; 2], i64), String> {
    static TABLE: std::sync::OnceLock<HashMap<([[i64; 2]; 2], i64), String>> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| trefoil_form_table(12, 14))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn bs12_britton_forms(x in letters_over(&["a", "t"], 16)) {
        let g = split("bs12_hnn");
        check_britton(&g, &x, bs12_trivial, &w("t a t^-1 a^-2"))?;
    }

    #[test]
    fn klein_britton_forms(x in letters_over(&["a", "t"], 20)) {
        let g = split("klein_hnn");
        check_britton(&g, &x, |u| klein_trivial(&rename(u, "t", "b")), &w("t a t^-1 a"))?;
    }

    #[test]
    fn trefoil_amalgam_forms_match_table(x in letters_over(&["x", "y"], 14)) {
        let g = split("trefoil_amalgam");
        let form = g.normal_form(&x).unwrap().unwrap();
        prop_assert!(form.is_canonical());
        let expected = trefoil_table().get(&trefoil_value(&x));
        prop_assert_eq!(Some(&form.to_string()), expected, "{}", x);
        let conj = x.concat(&w("x^2 y^-3")).concat(&x.inverse());
        prop_assert!(g.normal_form(&conj).unwrap().unwrap().is_identity());
    }

    #[test]
    fn sl2z_word_problem(x in letters_over(&["x", "y"], 24)) {
        let g = split("sl2z");
        let expected = if sl2z_trivial(&x) { Verdict::Trivial } else { Verdict::Nontrivial };
        prop_assert_eq!(g.word_problem(&x).unwrap(), expected);
        let conj = x.concat(&w("x^2 y^-3")).concat(&x.inverse());
        prop_assert!(g.normal_form(&conj).unwrap().unwrap().is_identity());
    }

    #[test]
    fn z2_amalgam_word_problem(x in letters_over(&["a", "b", "c", "d"], 16)) {
        let g = split("z2_amalgam");
        let expected = if z2_amalgam_trivial(&x) { Verdict::Trivial } else { Verdict::Nontrivial };
        prop_assert_eq!(g.word_problem(&x).unwrap(), expected);
        let conj = x.concat(&w("a c^-1")).concat(&x.inverse());
        prop_assert!(g.normal_form(&conj).unwrap().unwrap().is_identity());
    }
}

fn exponent_rows(p: &Presentation) -> Vec<Vec<i128>> {
    p.relators().iter().map(|r| p.exponent_vector(r)).collect()
}

proptest! {
    #[test]
    fn abelian_invariants_match_minors(rels in prop::collection::vec(letters_over(&["a", "b", "c"], 10), 1..=3)) {
        let alphabet: Vec<Generator> = ["a", "b", "c"].map(Generator::new).to_vec();
        let p = Presentation::new(alphabet.clone(), rels.clone()).unwrap();
        let inv = abelian_invariants(&p);
        let (rank, torsion) = invariants_by_minors(&exponent_rows(&p), 3);
        prop_assert_eq!(inv.free_rank, rank);
        prop_assert_eq!(inv.torsion.iter().map(|&t| t as i128).collect::<Vec<_>>(), torsion);

        let rotated: Vec<Word> = rels.iter().enumerate().map(|(i, r)| r.rotate(i + 1).inverse()).rev().collect();
        let mut shuffled = alphabet.clone();
        shuffled.rotate_left(1);
        let q = Presentation::new(shuffled, rotated).unwrap();
        prop_assert_eq!(abelian_invariants(&q), inv.clone());

        let f = abelian_invariants(&add_free_factor(&p));
        prop_assert_eq!(f.free_rank, inv.free_rank + 1);
        prop_assert_eq!(f.torsion, inv.torsion);
    }
}

/// Sphere sizes of a group given by a faithful representation, by BFS on
/// representation values.
fn sphere_sizes_by<K: std::hash::Hash + Eq + Clone>(
    alphabet: &[&str],
    radius: usize,
    value: impl Fn(&Word) -> K,
) -> Vec<usize> {
    let letters: Vec<Letter> = alphabet.iter().flat_map(|n| [Generator::new(n).pos(), Generator::new(n).neg()]).collect();
    let mut seen = HashSet::from([value(&Word::identity())]);
    let mut queue = VecDeque::from([(Word::identity(), 0usize)]);
    let mut sizes = vec![1];
    while let Some((x, d)) = queue.pop_front() {
        if d == radius {
            continue;
        }
        for l in &letters {
            let mut y = x.clone();
            y.push(l.clone());
            if seen.insert(value(&y)) {
                if sizes.len() == d + 1 {
                    sizes.push(0);
                }
                sizes[d + 1] += 1;
                queue.push_back((y, d + 1));
            }
        }
    }
    sizes
}

#[test]
fn ball_growth_matches_representations() {
    let limits = Limits::default();
    let klein = cayley_ball(&Group::from_presentation(pres("klein"), &limits), 6);
    assert_eq!(klein.sphere_sizes(), sphere_sizes_by(&["a", "b"], 6, klein_affine));
    let bs = cayley_ball(&Group::from_presentation(pres("bs12"), &limits), 5);
    let bs_sizes = sphere_sizes_by(&["a", "t"], 5, |x| {
        let m = bs12_matrix(x);
        (m[0][0], m[0][1])
    });
    assert_eq!(bs.sphere_sizes(), bs_sizes);
    let trefoil = cayley_ball(&Group::from_presentation(pres("trefoil"), &limits), 5);
    let trefoil_sizes = sphere_sizes_by(&["x", "y"], 5, trefoil_value);
    assert_eq!(trefoil.sphere_sizes(), trefoil_sizes);
    let trefoil_split = cayley_ball(
        &Group::from_splitting(parse_splitting(corpus::splitting("trefoil_amalgam").unwrap()).unwrap(), &limits),
        5,
    );
    assert_eq!(trefoil_split.sphere_sizes(), trefoil_sizes);
    for b in [&klein, &bs, &trefoil, &trefoil_split] {
        assert!(!b.approximate);
    }
}

#[test]
fn free_group_complements_split_at_the_next_sphere() {
    let ball = cayley_ball(&Group::from_presentation(pres("f2"), &Limits::default()), 7);
    for n in 0..=4 {
        let report = complement_components(&ball, n).unwrap();
        assert_eq!(report.count(), free_sphere(n + 1), "n = {n}");
    }
}

#[test]
fn z2_rays_share_the_single_end() {
    let ball = cayley_ball(&Group::from_presentation(pres("z2"), &Limits::default()), 10);
    for n in 1..=4 {
        assert_eq!(complement_components(&ball, n).unwrap().count(), 1);
    }
    let ray = |s: &str| RayPrefix::new(w(s).letters().to_vec());
    let east = ray("a^10");
    let west = ray("a^-10");
    let north = ray("b^10");
    for n in 1..=4 {
        assert!(same_end_prefix(&east, &west, &ball, n).unwrap());
        assert!(same_end_prefix(&east, &north, &ball, n).unwrap());
    }
}

#[test]
fn f2_rays_in_different_directions_separate() {
    let ball = cayley_ball(&Group::from_presentation(pres("f2"), &Limits::default()), 7);
    let ray = |s: &str| RayPrefix::new(w(s).letters().to_vec());
    assert!(!same_end_prefix(&ray("a^7"), &ray("b^7"), &ball, 1).unwrap());
    assert!(same_end_prefix(&ray("a^7"), &ray("a^2 b^5"), &ball, 1).unwrap());
    assert!(!same_end_prefix(&ray("a^7"), &ray("a^2 b^5"), &ball, 2).unwrap());
}
