//! Combinatorial group theory at desk scale: free-group words, presentations,
//! Stallings foldings, normal forms in amalgams and HNN extensions, the
//! Magnus–Moldavanskii hierarchy of one-relator groups, and finite probes of
//! the end structure of Cayley graphs and truncated universal covers.

pub mod cli;
pub mod corpus;
mod cosets;
pub mod ends;
mod intmat;
pub mod magnus;
pub mod presentations;
pub mod splittings;
pub mod stallings;
pub mod words;

/// Resource limits shared by the bounded procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Hierarchy depth and word-problem recursion depth.
    pub max_depth: usize,
    pub max_ball_radius: usize,
    /// Longest word explored by the bounded rewriting search.
    pub oracle_length: usize,
    /// Relators longer than this stop the hierarchy.
    pub max_relator_letters: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_depth: 8, max_ball_radius: 12, oracle_length: 12, max_relator_letters: 64 }
    }
}
