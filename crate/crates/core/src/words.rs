//! Free-group words: generators, signed letters, free and cyclic reduction.
//!
//! A [`Word`] is always freely reduced. Raw letter sequences only exist at API
//! boundaries and go through [`free_reduce`] on the way in.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;
use std::sync::Arc;

/// A generator symbol, optionally carrying an integer subscript (`a_3`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    name: Arc<str>,
    subscript: Option<i32>,
}

impl Generator {
    pub fn new(name: &str) -> Self {
        debug_assert!(is_identifier(name), "bad generator name {name:?}");
        Generator { name: Arc::from(name), subscript: None }
    }

    pub fn subscripted(name: &str, subscript: i32) -> Self {
        debug_assert!(is_identifier(name), "bad generator name {name:?}");
        Generator { name: Arc::from(name), subscript: Some(subscript) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn subscript(&self) -> Option<i32> {
        self.subscript
    }

    /// Same family, different subscript.
    pub fn with_subscript(&self, subscript: i32) -> Self {
        Generator { name: self.name.clone(), subscript: Some(subscript) }
    }

    pub fn pos(&self) -> Letter {
        Letter { gen: self.clone(), inverse: false }
    }

    pub fn neg(&self) -> Letter {
        Letter { gen: self.clone(), inverse: true }
    }

    /// The one-letter word `self^k` expanded to `|k|` letters.
    pub fn pow(&self, k: i64) -> Word {
        let letter = if k >= 0 { self.pos() } else { self.neg() };
        Word { letters: vec![letter; k.unsigned_abs() as usize] }
    }
}

/// ASCII identifier starting with a letter.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric())
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.subscript {
            Some(s) => write!(f, "{}_{}", self.name, s),
            None => f.write_str(&self.name),
        }
    }
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A generator with a sign. Ordered by (name, subscript, sign) with the
/// positive letter before its inverse.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: Generator,
    pub inverse: bool,
}

impl Letter {
    pub fn inv(&self) -> Letter {
        Letter { gen: self.gen.clone(), inverse: !self.inverse }
    }

    pub fn sign(&self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn cancels(&self, other: &Letter) -> bool {
        self.gen == other.gen && self.inverse != other.inverse
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "{}^-1", self.gen)
        } else {
            write!(f, "{}", self.gen)
        }
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

/// Freely reduce an arbitrary letter sequence with a single stack pass.
pub fn free_reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        match out.last() {
            Some(last) if last.cancels(&l) => {
                out.pop();
            }
            _ => out.push(l),
        }
    }
    Word { letters: out }
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn letter(l: Letter) -> Self {
        Word { letters: vec![l] }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn first(&self) -> Option<&Letter> {
        self.letters.first()
    }

    pub fn last(&self) -> Option<&Letter> {
        self.letters.last()
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(Letter::inv).collect() }
    }

    pub fn concat(&self, other: &Word) -> Word {
        // Only the junction can cancel.
        let mut k = 0;
        let (a, b) = (&self.letters, &other.letters);
        while k < a.len() && k < b.len() && a[a.len() - 1 - k].cancels(&b[k]) {
            k += 1;
        }
        let mut letters = Vec::with_capacity(a.len() + b.len() - 2 * k);
        letters.extend_from_slice(&a[..a.len() - k]);
        letters.extend_from_slice(&b[k..]);
        Word { letters }
    }

    pub fn push(&mut self, l: Letter) {
        match self.letters.last() {
            Some(last) if last.cancels(&l) => {
                self.letters.pop();
            }
            _ => self.letters.push(l),
        }
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k >= 0 { self.clone() } else { self.inverse() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// Subword `letters[range]`; freely reduced because a subword of a reduced
    /// word is reduced.
    pub fn slice(&self, start: usize, end: usize) -> Word {
        Word { letters: self.letters[start..end].to_vec() }
    }

    /// Splits off a maximal cyclic cancellation: returns `(core, conjugator)`
    /// with `conjugator · core · conjugator⁻¹ = self` and `core` cyclically
    /// reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let n = self.letters.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.letters[k].cancels(&self.letters[n - 1 - k]) {
            k += 1;
        }
        (
            Word { letters: self.letters[k..n - k].to_vec() },
            Word { letters: self.letters[..k].to_vec() },
        )
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(a), Some(b)) if self.letters.len() > 1 => !a.cancels(b),
            _ => true,
        }
    }

    pub fn exponent_sum(&self, g: &Generator) -> i64 {
        self.letters.iter().filter(|l| &l.gen == g).map(Letter::sign).sum()
    }

    pub fn occurrences(&self, g: &Generator) -> usize {
        self.letters.iter().filter(|l| &l.gen == g).count()
    }

    pub fn contains_generator(&self, g: &Generator) -> bool {
        self.letters.iter().any(|l| &l.gen == g)
    }

    /// Distinct generators in canonical order.
    pub fn generators(&self) -> Vec<Generator> {
        let mut gens: Vec<Generator> = self.letters.iter().map(|l| l.gen.clone()).collect();
        gens.sort();
        gens.dedup();
        gens
    }

    /// Cyclic rotation by `k` positions, re-reduced.
    pub fn rotate(&self, k: usize) -> Word {
        if self.letters.is_empty() {
            return self.clone();
        }
        let k = k % self.letters.len();
        let mut v = self.letters[k..].to_vec();
        v.extend_from_slice(&self.letters[..k]);
        free_reduce(v)
    }

    /// Image under the homomorphism sending each generator in `map` to its
    /// word; unmapped generators are fixed.
    pub fn substitute(&self, map: &BTreeMap<Generator, Word>) -> Word {
        self.substitute_with(|g| map.get(g).cloned())
    }

    pub fn substitute_with<F: FnMut(&Generator) -> Option<Word>>(&self, mut f: F) -> Word {
        let mut out = Word::identity();
        for l in &self.letters {
            let image = f(&l.gen).unwrap_or_else(|| Word::letter(l.gen.pos()));
            let image = if l.inverse { image.inverse() } else { image };
            out = out.concat(&image);
        }
        out
    }

    /// Shortlex-least representative of the cyclic class of `self` and its
    /// inverse. Used to deduplicate relators.
    pub fn cyclic_class_key(&self) -> Word {
        let (core, _) = self.cyclic_reduce();
        let inv = core.inverse();
        let n = core.len();
        (0..n.max(1))
            .flat_map(|k| [core.rotate(k), inv.rotate(k)])
            .min()
            .unwrap_or_default()
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        free_reduce(iter)
    }
}

impl Mul for &Word {
    type Output = Word;
    fn mul(self, rhs: &Word) -> Word {
        self.concat(rhs)
    }
}

impl Mul for Word {
    type Output = Word;
    fn mul(self, rhs: Word) -> Word {
        self.concat(&rhs)
    }
}

/// Shortlex: shorter first, then lexicographic by letter order.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Power-compressed, whitespace separated: `a^2 b^-1 c_3`. The identity prints
/// as `1`.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.letters.len() {
            let l = &self.letters[i];
            let mut j = i + 1;
            while j < self.letters.len() && self.letters[j] == *l {
                j += 1;
            }
            let k = (j - i) as i64 * l.sign();
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            if k == 1 {
                write!(f, "{}", l.gen)?;
            } else {
                write!(f, "{}^{}", l.gen, k)?;
            }
            i = j;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl std::str::FromStr for Word {
    type Err = crate::cli::syntax::ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::cli::syntax::parse_word(s)
    }
}

/// Word over the abstract subgroup symbols `h_0, h_1, …` used to express
/// subgroup elements in terms of a generating list.
pub fn subgroup_symbol(i: usize) -> Generator {
    Generator::subscripted("h", i as i32)
}

/// Index of a subgroup symbol created by [`subgroup_symbol`].
pub fn subgroup_index(g: &Generator) -> Option<usize> {
    (g.name() == "h").then(|| g.subscript()).flatten().map(|s| s as usize)
}

/// Evaluate an expression over subgroup symbols using the generator list.
pub fn expand(expr: &Word, gens: &[Word]) -> Word {
    expr.substitute_with(|g| subgroup_index(g).map(|i| gens[i].clone()))
}

/// Enumerate every reduced word of length exactly `len` over `alphabet`
/// (both signs), in shortlex order.
pub fn reduced_words_of_length(alphabet: &[Generator], len: usize) -> Vec<Word> {
    let mut letters: Vec<Letter> = alphabet.iter().flat_map(|g| [g.pos(), g.neg()]).collect();
    letters.sort();
    let mut layer = vec![Word::identity()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(layer.len() * letters.len());
        for w in &layer {
            for l in &letters {
                if w.last().is_some_and(|last| last.cancels(l)) {
                    continue;
                }
                let mut v = w.letters.clone();
                v.push(l.clone());
                next.push(Word { letters: v });
            }
        }
        layer = next;
    }
    layer
}
