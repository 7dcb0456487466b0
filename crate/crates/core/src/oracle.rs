//! Exhaustive ground truth for Green's relations over tiny alphabets.
//!
//! Over `n` atoms there are `n·2^n` possible rules and `2^(n·2^n)` programs:
//! 4 programs for one atom, 256 for two, and already 2^24 for three. The
//! oracle therefore only runs for alphabets of at most [`ORACLE_MAX_ATOMS`]
//! atoms, where it checks the defining equations `P = QR`, `P = RS` and
//! `P = (QR)S` against every candidate `Q` and `S`.

use std::collections::BTreeSet;

use crate::algebra::compose;
use crate::choice::subsets;
use crate::error::{Error, Result};
use crate::green::{Decision, GreenWitness, Method, Relation};
use crate::syntax::{Alphabet, Atom, Program, Rule};

pub const ORACLE_MAX_ATOMS: usize = 2;

/// Every program over an alphabet, indexed by a bitmask over the possible rules.
#[derive(Debug, Clone)]
pub struct ProgramSpace {
    alphabet: Alphabet,
    rules: Vec<Rule>,
}

impl ProgramSpace {
    /// Fails unless the space has fewer than 2^63 programs (at most 3 atoms).
    pub fn new(alphabet: &Alphabet) -> Result<Self> {
        let atoms: Vec<Atom> = alphabet.iter().collect();
        let rules: Vec<Rule> = atoms
            .iter()
            .flat_map(|&head| {
                subsets(&atoms)
                    .into_iter()
                    .map(move |body| Rule::new(head, body))
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if rules.len() >= 63 {
            return Err(Error::CapExceeded {
                size: alphabet.len(),
                cap: 3,
            });
        }
        Ok(ProgramSpace {
            alphabet: alphabet.clone(),
            rules,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// All possible rules, in canonical order; bit `i` of an index selects `rules()[i]`.
    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> u64 {
        1u64 << self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn program(&self, index: u64) -> Program {
        self.rules
            .iter()
            .enumerate()
            .filter(|(i, _)| index >> i & 1 == 1)
            .map(|(_, r)| r.clone())
            .collect()
    }

    pub fn index_of(&self, p: &Program) -> Option<u64> {
        p.iter().try_fold(0u64, |acc, rule| {
            self.rules
                .binary_search(rule)
                .ok()
                .map(|i| acc | 1 << i)
        })
    }

    pub fn programs(&self) -> impl Iterator<Item = Program> + '_ {
        (0..self.len()).map(|i| self.program(i))
    }
}

fn check_bound(alphabet: &Alphabet) -> Result<()> {
    if alphabet.len() > ORACLE_MAX_ATOMS {
        Err(Error::OracleBound {
            size: alphabet.len(),
            max: ORACLE_MAX_ATOMS,
        })
    } else {
        Ok(())
    }
}

/// Searches every candidate prefix and suffix over `alphabet` for a witness of
/// `P ≤ R`. The returned witness has method [`Method::Oracle`] and decision
/// `Holds` or `Fails`.
pub fn oracle_witness(
    relation: Relation,
    p: &Program,
    r: &Program,
    alphabet: &Alphabet,
) -> Result<GreenWitness> {
    check_bound(alphabet)?;
    alphabet.check_program(p)?;
    alphabet.check_program(r)?;
    let space = ProgramSpace::new(alphabet)?;

    let found = match relation {
        Relation::L => space
            .programs()
            .find(|q| compose(q, r) == *p)
            .map(|q| (Some(q), None)),
        Relation::R => space
            .programs()
            .find(|s| compose(r, s) == *p)
            .map(|s| (None, Some(s))),
        Relation::J => {
            let mut tried = BTreeSet::new();
            let mut found = None;
            'outer: for q in space.programs() {
                let qr = compose(&q, r);
                if !tried.insert(qr.clone()) {
                    continue;
                }
                for s in space.programs() {
                    if compose(&qr, &s) == *p {
                        found = Some((Some(q), Some(s)));
                        break 'outer;
                    }
                }
            }
            found
        }
    };

    Ok(match found {
        Some((prefix, suffix)) => GreenWitness {
            relation,
            decision: Decision::Holds,
            prefix,
            suffix,
            method: Method::Oracle,
        },
        None => GreenWitness::fails(relation, Method::Oracle),
    })
}

pub fn oracle_le(relation: Relation, p: &Program, r: &Program, alphabet: &Alphabet) -> Result<bool> {
    Ok(oracle_witness(relation, p, r, alphabet)?.holds())
}

/// Fixed-size bitset over program indices.
#[derive(Debug, Clone, PartialEq, Eq)]
struct IndexSet {
    words: Vec<u64>,
}

impl IndexSet {
    fn new(len: usize) -> Self {
        IndexSet {
            words: vec![0; len.div_ceil(64)],
        }
    }

    fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn union_with(&mut self, other: &IndexSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.words.len() * 64).filter(|&i| self.contains(i))
    }
}

/// The full composition table of a program space, with the sets reachable
/// by left, right and two-sided composition precomputed for every program.
///
/// Answers every oracle query over the space in constant time, which is what
/// makes whole-space sweeps over two atoms cheap.
#[derive(Debug, Clone)]
pub struct OracleTable {
    space: ProgramSpace,
    size: usize,
    table: Vec<u32>,
    left: Vec<IndexSet>,
    right: Vec<IndexSet>,
    two_sided: Vec<IndexSet>,
}

impl OracleTable {
    pub fn new(alphabet: &Alphabet) -> Result<Self> {
        check_bound(alphabet)?;
        let space = ProgramSpace::new(alphabet)?;
        let size = space.len() as usize;
        let programs: Vec<Program> = space.programs().collect();

        let mut table = vec![0u32; size * size];
        for (x, px) in programs.iter().enumerate() {
            for (y, py) in programs.iter().enumerate() {
                let product = compose(px, py);
                let index = space
                    .index_of(&product)
                    .ok_or_else(|| Error::Internal("composition left the space".into()))?;
                table[x * size + y] = index as u32;
            }
        }

        // left[r] = {QR | Q}, right[r] = {RS | S}, two_sided[r] = {(QR)S | Q, S}.
        let mut left = vec![IndexSet::new(size); size];
        let mut right = vec![IndexSet::new(size); size];
        for x in 0..size {
            for y in 0..size {
                let xy = table[x * size + y] as usize;
                left[y].insert(xy);
                right[x].insert(xy);
            }
        }
        let two_sided = (0..size)
            .map(|r| {
                let mut reach = IndexSet::new(size);
                for x in left[r].iter() {
                    reach.union_with(&right[x]);
                }
                reach
            })
            .collect();

        Ok(OracleTable {
            space,
            size,
            table,
            left,
            right,
            two_sided,
        })
    }

    pub fn space(&self) -> &ProgramSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// Index of `x ∘ y`.
    pub fn compose(&self, x: usize, y: usize) -> usize {
        self.table[x * self.size + y] as usize
    }

    /// `P ≤ R` by index.
    pub fn le(&self, relation: Relation, p: usize, r: usize) -> bool {
        match relation {
            Relation::L => self.left[r].contains(p),
            Relation::R => self.right[r].contains(p),
            Relation::J => self.two_sided[r].contains(p),
        }
    }

    pub fn le_programs(&self, relation: Relation, p: &Program, r: &Program) -> Option<bool> {
        let p = self.space.index_of(p)? as usize;
        let r = self.space.index_of(r)? as usize;
        Some(self.le(relation, p, r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prog(text: &str) -> Program {
        text.parse().unwrap()
    }

    fn alpha(text: &str) -> Alphabet {
        text.parse().unwrap()
    }

    #[test]
    fn space_indexing() {
        let space = ProgramSpace::new(&alpha("a, b")).unwrap();
        assert_eq!(space.rules().len(), 8);
        assert_eq!(space.len(), 256);
        for i in [0u64, 1, 77, 255] {
            assert_eq!(space.index_of(&space.program(i)), Some(i));
        }
        assert_eq!(space.index_of(&prog("c.")), None);
        assert_eq!(ProgramSpace::new(&alpha("a")).unwrap().len(), 4);
        assert!(ProgramSpace::new(&alpha("a, b, c, d")).is_err());
    }

    #[test]
    fn oracle_examples() {
        let a = alpha("a, b");
        let p = prog("a :- b. b.");
        let one = crate::algebra::unit(&a);
        assert!(oracle_le(Relation::L, &p, &one, &a).unwrap());
        assert!(!oracle_le(Relation::R, &prog("a :- b."), &prog("a."), &a).unwrap());
        for i in ["", "a.", "b.", "a. b."] {
            for j in ["", "a.", "b.", "a. b."] {
                assert!(oracle_le(Relation::J, &prog(i), &prog(j), &a).unwrap());
            }
        }
        assert!(oracle_le(Relation::L, &p, &p, &alpha("a, b, c")).is_err());
    }

    #[test]
    fn oracle_witnesses_verify() {
        let a = alpha("a, b");
        let p = prog("a :- b. b :- b.");
        let pi = prog("a :- b. b :- a.");
        for relation in [Relation::L, Relation::R, Relation::J] {
            let w = oracle_witness(relation, &p, &pi, &a).unwrap();
            if w.holds() {
                assert!(w.verify(&p, &pi));
            }
        }
    }

    #[test]
    fn table_agrees_with_direct_oracle() {
        let a = alpha("a, b");
        let table = OracleTable::new(&a).unwrap();
        let space = table.space().clone();
        for (pi, ri) in [(3u64, 200u64), (17, 17), (0, 255), (129, 6), (40, 96)] {
            let (p, r) = (space.program(pi), space.program(ri));
            for relation in [Relation::L, Relation::R, Relation::J] {
                assert_eq!(
                    table.le(relation, pi as usize, ri as usize),
                    oracle_le(relation, &p, &r, &a).unwrap(),
                    "{relation:?} {p:?} {r:?}"
                );
            }
        }
    }
}
