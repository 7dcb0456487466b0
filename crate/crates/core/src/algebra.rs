//! Sequential composition and the operators built on it.
//!
//! `P ∘ R` resolves every body atom of every rule of `P` against a rule of `R`
//! with that head; the bodies of the selected rules become the new body.
//! Facts of `P` pass through unchanged. Composition is right-distributive over
//! union, has `1_A` as a two-sided identity and `∅` as a left zero, and is not
//! associative.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::Mul;

use crate::choice::for_each_choice;
use crate::error::{Error, Result};
use crate::syntax::{Alphabet, Atom, Interpretation, Program, Rule};

/// `P ∘ R`.
///
/// A rule `r ∈ P` combines with a set `S ⊆ R` of at most `|b(r)|` rules whose
/// heads are exactly `b(r)`. Since heads are single atoms this means one rule
/// of `R` per body atom, so the subsets are enumerated as choice functions
/// over the rules of `R` grouped by head.
pub fn compose(p: &Program, r: &Program) -> Program {
    let mut by_head: BTreeMap<Atom, Vec<&BTreeSet<Atom>>> = BTreeMap::new();
    for rule in r {
        by_head.entry(rule.head()).or_default().push(rule.body());
    }

    let mut out = BTreeSet::new();
    for rule in p {
        let buckets: Option<Vec<&Vec<&BTreeSet<Atom>>>> =
            rule.body().iter().map(|atom| by_head.get(atom)).collect();
        let Some(buckets) = buckets else {
            continue;
        };
        // A fact has no body atoms, so exactly one (empty) choice is visited.
        let radices: Vec<usize> = buckets.iter().map(|b| b.len()).collect();
        for_each_choice(&radices, |choice| {
            let body: BTreeSet<Atom> = choice
                .iter()
                .zip(&buckets)
                .flat_map(|(&i, bucket)| bucket[i].iter().copied())
                .collect();
            out.insert(Rule::new(rule.head(), body));
        });
    }
    out.into_iter().collect()
}

impl Mul for &Program {
    type Output = Program;

    fn mul(self, rhs: &Program) -> Program {
        compose(self, rhs)
    }
}

/// `1_A = {a ← a | a ∈ A}`.
pub fn unit(alphabet: &Alphabet) -> Program {
    alphabet.iter().map(|a| Rule::new(a, [a])).collect()
}

/// `1^I = {a ← a | a ∈ I}`.
pub fn partial_unit(i: &Interpretation) -> Program {
    i.iter().map(|a| Rule::new(a, [a])).collect()
}

/// `P^d`: facts are kept and every proper rule `a0 ← a1..ak` becomes the
/// Krom rules `ai ← a0`.
pub fn dual(p: &Program) -> Program {
    p.iter()
        .flat_map(|rule| -> Vec<Rule> {
            if rule.is_fact() {
                vec![rule.clone()]
            } else {
                rule.body()
                    .iter()
                    .map(|&b| Rule::new(b, [rule.head()]))
                    .collect()
            }
        })
        .collect()
}

/// `(f(P), p(P))`, with the facts obtained as `P ∘ ∅`.
pub fn split(p: &Program) -> (Program, Program) {
    let facts = compose(p, &Program::empty());
    debug_assert_eq!(facts, p.facts());
    let proper = p.difference(&facts);
    (facts, proper)
}

/// `(h(P), b(P))` computed as `P A` and `p(P)^d A`.
pub fn heads_bodies(p: &Program, alphabet: &Alphabet) -> Result<(Interpretation, Interpretation)> {
    alphabet.check_program(p)?;
    let everything = alphabet.to_interpretation().to_program();
    let heads = compose(p, &everything).heads();
    let bodies = compose(&dual(&p.proper()), &everything).heads();
    Ok((heads, bodies))
}

/// Left-associated `n`-fold composition `((P P) P) … P`, with `P^0 = 1_A`.
pub fn power(p: &Program, n: usize, alphabet: &Alphabet) -> Program {
    if n == 0 {
        return unit(alphabet);
    }
    let mut acc = p.clone();
    for _ in 1..n {
        acc = compose(&acc, p);
    }
    acc
}

/// The sequence `P^1, P^2, …` up to and including the first repeated power.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerTrace {
    /// `powers[i]` is `P^(i+1)`. The last entry equals `powers[cycle_start]`.
    pub powers: Vec<Program>,
    pub cycle_start: usize,
    pub cycle_length: usize,
}

impl PowerTrace {
    /// The distinct powers `P^1 … P^(cycle_start + cycle_length)`.
    pub fn distinct(&self) -> &[Program] {
        &self.powers[..self.powers.len() - 1]
    }
}

/// Number of programs over `n` atoms, `2^(n·2^n)`, saturating.
pub fn program_space_size(atoms: usize) -> u128 {
    let rules = (atoms as u32)
        .saturating_mul(1u32.checked_shl(atoms as u32).unwrap_or(u32::MAX));
    1u128.checked_shl(rules).unwrap_or(u128::MAX)
}

/// Runs the power sequence of `p` until it becomes periodic.
///
/// The sequence is deterministic and lives in the finite space of programs
/// over the atoms of `p`, so it always repeats; the iteration cap is the size
/// of that space.
pub fn power_trace(p: &Program) -> Result<PowerTrace> {
    let cap = program_space_size(p.atoms().len());
    let mut seen: HashMap<Program, usize> = HashMap::new();
    let mut powers = vec![p.clone()];
    seen.insert(p.clone(), 0);
    loop {
        if powers.len() as u128 > cap {
            return Err(Error::Internal(format!(
                "power sequence did not repeat within {cap} steps"
            )));
        }
        let next = compose(powers.last().expect("non-empty"), p);
        let index = powers.len();
        powers.push(next.clone());
        if let Some(&start) = seen.get(&next) {
            return Ok(PowerTrace {
                powers,
                cycle_start: start,
                cycle_length: index - start,
            });
        }
        seen.insert(next, index);
    }
}

/// `P^* = ⋃_{n≥0} P^n`.
pub fn star(p: &Program, alphabet: &Alphabet) -> Result<Program> {
    let trace = power_trace(p)?;
    Ok(trace
        .distinct()
        .iter()
        .fold(unit(alphabet), |acc, power| acc.union(power)))
}

/// `P^+ = P^* P`.
pub fn plus(p: &Program, alphabet: &Alphabet) -> Result<Program> {
    Ok(compose(&star(p, alphabet)?, p))
}

/// `P^ω = f(P^+) = P^+ ∘ ∅`, read as an interpretation.
pub fn omega(p: &Program, alphabet: &Alphabet) -> Result<Interpretation> {
    Ok(compose(&plus(p, alphabet)?, &Program::empty()).heads())
}

fn check_subset(i: &Interpretation, alphabet: &Alphabet) -> Result<()> {
    alphabet.check_interpretation(i)
}

/// `I^⊖ = 1^(A−I) ∪ I`. Composing on the right deletes the atoms of `I` from
/// every rule body.
pub fn build_ominus(i: &Interpretation, alphabet: &Alphabet) -> Result<Program> {
    check_subset(i, alphabet)?;
    let rest = alphabet.to_interpretation().difference(i);
    Ok(partial_unit(&rest).union(&i.to_program()))
}

/// `I^⊕ = {a ← {a} ∪ I | a ∈ A}`. Composing on the right adds the atoms of `I`
/// to every proper rule body.
pub fn build_oplus(i: &Interpretation, alphabet: &Alphabet) -> Result<Program> {
    check_subset(i, alphabet)?;
    Ok(alphabet
        .iter()
        .map(|a| Rule::new(a, std::iter::once(a).chain(i.iter())))
        .collect())
}

/// `^I P`: the rules of `P` whose head is in `I`.
pub fn left_reduct(i: &Interpretation, p: &Program) -> Program {
    p.iter().filter(|r| i.contains(r.head())).cloned().collect()
}

/// `P^I`: the rules of `P` whose body is contained in `I`.
pub fn right_reduct(p: &Program, i: &Interpretation) -> Program {
    p.iter()
        .filter(|r| i.contains_all(r.body()))
        .cloned()
        .collect()
}
