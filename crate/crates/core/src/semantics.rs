//! Entailment, the immediate consequence operator, least and supported models.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::syntax::{Alphabet, Atom, Interpretation, Program, Rule};

/// Default bound on the alphabet size for sweeps over all `2^|A|` interpretations.
pub const DEFAULT_SWEEP_CAP: usize = 20;

/// Anything an interpretation can satisfy.
pub trait Satisfiable {
    fn satisfied_by(&self, i: &Interpretation) -> bool;
}

impl Satisfiable for Atom {
    fn satisfied_by(&self, i: &Interpretation) -> bool {
        i.contains(*self)
    }
}

impl Satisfiable for BTreeSet<Atom> {
    fn satisfied_by(&self, i: &Interpretation) -> bool {
        self.iter().all(|a| a.satisfied_by(i))
    }
}

impl Satisfiable for Interpretation {
    fn satisfied_by(&self, i: &Interpretation) -> bool {
        self.atoms().satisfied_by(i)
    }
}

impl Satisfiable for Rule {
    fn satisfied_by(&self, i: &Interpretation) -> bool {
        !self.body().satisfied_by(i) || self.head().satisfied_by(i)
    }
}

impl Satisfiable for Program {
    fn satisfied_by(&self, i: &Interpretation) -> bool {
        self.iter().all(|r| r.satisfied_by(i))
    }
}

/// `I ⊨ target`.
pub fn entails<T: Satisfiable + ?Sized>(i: &Interpretation, target: &T) -> bool {
    target.satisfied_by(i)
}

/// `T_P(I)`: heads of the rules whose bodies hold in `I`.
pub fn tp(p: &Program, i: &Interpretation) -> Interpretation {
    p.iter()
        .filter(|r| i.contains_all(r.body()))
        .map(Rule::head)
        .collect()
}

/// `I` is a model iff it is a prefixed point of `T_P`.
pub fn is_model(p: &Program, i: &Interpretation) -> bool {
    tp(p, i).is_subset(i)
}

pub fn is_supported_model(p: &Program, i: &Interpretation) -> bool {
    tp(p, i) == *i
}

/// Iterates of `T_P` from the empty interpretation up to the fixpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixpointTrace {
    /// `stages[n] = T_P^n`; the last stage is the fixpoint and is not repeated.
    pub stages: Vec<Interpretation>,
    pub converged_at: usize,
}

impl FixpointTrace {
    pub fn fixpoint(&self) -> &Interpretation {
        &self.stages[self.converged_at]
    }
}

pub fn least_model(p: &Program, alphabet: &Alphabet) -> Result<(Interpretation, FixpointTrace)> {
    alphabet.check_program(p)?;
    let mut stages = vec![Interpretation::empty()];
    // T_P is monotone, so the chain from ∅ grows by at least one atom per step
    // until it stops.
    for _ in 0..=alphabet.len() {
        let current = stages.last().expect("non-empty");
        let next = tp(p, current);
        if next == *current {
            let converged_at = stages.len() - 1;
            let lm = next;
            return Ok((lm, FixpointTrace { stages, converged_at }));
        }
        stages.push(next);
    }
    Err(Error::Internal(format!(
        "T_P iteration did not converge within {} steps",
        alphabet.len() + 1
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    All,
    Supported,
}

fn check_cap(alphabet: &Alphabet, cap: usize) -> Result<()> {
    if alphabet.len() > cap || alphabet.len() >= u64::BITS as usize {
        Err(Error::CapExceeded {
            size: alphabet.len(),
            cap,
        })
    } else {
        Ok(())
    }
}

/// Every `I ⊆ A`, in bitmask order over the sorted alphabet.
pub fn interpretations(alphabet: &Alphabet) -> impl Iterator<Item = Interpretation> + '_ {
    let atoms: Vec<Atom> = alphabet.iter().collect();
    (0u64..1u64 << atoms.len()).map(move |mask| {
        atoms
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &a)| a)
            .collect()
    })
}

pub fn enumerate_models(
    p: &Program,
    alphabet: &Alphabet,
    kind: ModelKind,
    cap: usize,
) -> Result<BTreeSet<Interpretation>> {
    check_cap(alphabet, cap)?;
    alphabet.check_program(p)?;
    Ok(interpretations(alphabet)
        .filter(|i| match kind {
            ModelKind::All => is_model(p, i),
            ModelKind::Supported => is_supported_model(p, i),
        })
        .collect())
}

/// `T_P = T_R` checked on every interpretation over `A`.
pub fn subsumption_equivalent(
    p: &Program,
    r: &Program,
    alphabet: &Alphabet,
    cap: usize,
) -> Result<bool> {
    check_cap(alphabet, cap)?;
    alphabet.check_program(p)?;
    alphabet.check_program(r)?;
    Ok(interpretations(alphabet).all(|i| tp(p, &i) == tp(r, &i)))
}
