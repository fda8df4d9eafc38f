//! Finite presentations, the one-relator special case, abelianization
//! invariants and the `G ↦ G * ℤ` transformer.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::intmat::{smith_diagonal, Lattice, Matrix};
use crate::words::{Generator, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("generator {0} declared twice")]
    DuplicateGenerator(Generator),
    #[error("relator uses generator {0} outside the alphabet")]
    UnknownGenerator(Generator),
    #[error("expected exactly one nontrivial relator, found {0}")]
    NotOneRelator(usize),
}

/// A finite presentation. Relators are stored cyclically reduced, nonempty,
/// and deduplicated up to cyclic permutation and inversion.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Presentation {
    alphabet: Vec<Generator>,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(alphabet: Vec<Generator>, relators: Vec<Word>) -> Result<Self, PresentationError> {
        let mut seen = BTreeSet::new();
        for g in &alphabet {
            if !seen.insert(g.clone()) {
                return Err(PresentationError::DuplicateGenerator(g.clone()));
            }
        }
        let mut classes = BTreeSet::new();
        let mut stored = Vec::new();
        for r in relators {
            if let Some(l) = r.letters().iter().find(|l| !seen.contains(&l.gen)) {
                return Err(PresentationError::UnknownGenerator(l.gen.clone()));
            }
            let (core, _) = r.cyclic_reduce();
            if core.is_empty() {
                continue;
            }
            if classes.insert(core.cyclic_class_key()) {
                stored.push(core);
            }
        }
        Ok(Presentation { alphabet, relators: stored })
    }

    pub fn free(alphabet: Vec<Generator>) -> Self {
        Presentation::new(alphabet, Vec::new()).expect("free presentation")
    }

    pub fn alphabet(&self) -> &[Generator] {
        &self.alphabet
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn rank(&self) -> usize {
        self.alphabet.len()
    }

    pub fn contains_generator(&self, g: &Generator) -> bool {
        self.alphabet.contains(g)
    }

    pub fn is_free(&self) -> bool {
        self.relators.is_empty()
    }

    pub fn generator_index(&self, g: &Generator) -> Option<usize> {
        self.alphabet.iter().position(|x| x == g)
    }

    /// Exponent-sum vector of `w` in alphabet order.
    pub fn exponent_vector(&self, w: &Word) -> Vec<i128> {
        let mut v = vec![0i128; self.alphabet.len()];
        for l in w.letters() {
            if let Some(i) = self.generator_index(&l.gen) {
                v[i] += l.sign() as i128;
            }
        }
        v
    }

    /// Integral relation matrix: entry (i, j) is the exponent sum of
    /// generator j in relator i.
    pub fn relation_matrix(&self) -> Matrix {
        self.relators.iter().map(|r| self.exponent_vector(r)).collect()
    }

    pub fn relation_lattice(&self) -> Lattice {
        Lattice::new(self.alphabet.len(), &self.relation_matrix())
    }

    /// True when `w` maps to zero in the abelianization.
    pub fn abelian_image_is_zero(&self, w: &Word) -> bool {
        self.relation_lattice().contains(&self.exponent_vector(w))
    }

    /// True when every pair of generators has its commutator among the
    /// relators, so the group is abelian.
    pub fn is_abelian(&self) -> bool {
        let keys: BTreeSet<Word> = self.relators.iter().map(Word::cyclic_class_key).collect();
        self.alphabet.iter().enumerate().all(|(i, x)| {
            self.alphabet[i + 1..].iter().all(|y| {
                let c = Word::from_iter([x.pos(), y.pos(), x.neg(), y.neg()]);
                keys.contains(&c.cyclic_class_key())
            })
        })
    }

    /// First name in `z, z1, z2, …` unused by the alphabet.
    pub fn fresh_generator(&self) -> Generator {
        fresh_generator(&self.alphabet, "z")
    }
}

pub(crate) fn fresh_generator(used: &[Generator], stem: &str) -> Generator {
    let taken = |name: &str| used.iter().any(|g| g.name() == name);
    if !taken(stem) {
        return Generator::new(stem);
    }
    (1..)
        .map(|i| format!("{stem}{i}"))
        .find(|n| !taken(n))
        .map(|n| Generator::new(&n))
        .unwrap()
}

/// `⟨a, b | a b a^-1 b^-1⟩` notation.
impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.alphabet.iter().map(|g| g.to_string()).collect();
        let rels: Vec<String> = self.relators.iter().map(|r| r.to_string()).collect();
        write!(f, "⟨{} | {}⟩", gens.join(", "), rels.join(", "))
    }
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A presentation with exactly one (cyclically reduced, nonempty) relator.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct OneRelatorPresentation {
    base: Presentation,
}

impl OneRelatorPresentation {
    pub fn new(alphabet: Vec<Generator>, relator: Word) -> Result<Self, PresentationError> {
        Presentation::new(alphabet, vec![relator])?.try_into()
    }

    pub fn presentation(&self) -> &Presentation {
        &self.base
    }

    pub fn relator(&self) -> &Word {
        &self.base.relators[0]
    }

    pub fn alphabet(&self) -> &[Generator] {
        self.base.alphabet()
    }

    /// Generators occurring in the relator, canonical order.
    pub fn occurring(&self) -> Vec<Generator> {
        self.relator().generators()
    }

    /// Alphabet generators absent from the relator (free factors).
    pub fn non_occurring(&self) -> Vec<Generator> {
        let r = self.relator();
        self.alphabet().iter().filter(|g| !r.contains_generator(g)).cloned().collect()
    }
}

impl TryFrom<Presentation> for OneRelatorPresentation {
    type Error = PresentationError;
    fn try_from(p: Presentation) -> Result<Self, Self::Error> {
        if p.relators.len() != 1 {
            return Err(PresentationError::NotOneRelator(p.relators.len()));
        }
        Ok(OneRelatorPresentation { base: p })
    }
}

impl fmt::Display for OneRelatorPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.base, f)
    }
}

/// Abelianization `ℤ^free_rank ⊕ ⨁ ℤ/torsion_i`, torsion as a divisibility
/// chain.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AbelianInvariants {
    pub free_rank: usize,
    pub torsion: Vec<u64>,
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 { "Z".into() } else { format!("Z^{}", self.free_rank) });
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

pub fn abelian_invariants(p: &Presentation) -> AbelianInvariants {
    let diag = smith_diagonal(&p.relation_matrix());
    let rank = diag.iter().filter(|&&d| d != 0).count();
    AbelianInvariants {
        free_rank: p.rank() - rank,
        torsion: diag.iter().filter(|&&d| d > 1).map(|&d| d as u64).collect(),
    }
}

/// Presentation of `G * ℤ`: one fresh generator, relators unchanged.
pub fn add_free_factor(p: &Presentation) -> Presentation {
    let mut alphabet = p.alphabet.clone();
    alphabet.push(p.fresh_generator());
    Presentation { alphabet, relators: p.relators.clone() }
}
