//! Green's relations on programs, decided with witnesses.
//!
//! * `P ≤_L R` iff `P = QR` for some prefix `Q`,
//! * `P ≤_R R` iff `P = RS` for some suffix `S`,
//! * `P ≤_J R` iff `P = (QR)S`, bracketed to the left since composition is
//!   not associative.
//!
//! `≤_L` is decided by building a canonical prefix and checking it. `≤_R` and
//! `≤_J` are decided by backtracking searches over suffixes that cover the
//! rules of `P` one at a time; every positive answer
//! is re-checked by composing the witness before it is returned. Searches run
//! under a step budget and report [`Decision::Undecided`] when it runs out,
//! unless the exhaustive oracle applies to the operands.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::hash::Hash;

use crate::algebra::{compose, partial_unit};
use crate::choice::{for_each_choice, subsets};
use crate::error::{Error, Result};
use crate::oracle::{oracle_witness, OracleTable, ORACLE_MAX_ATOMS};
use crate::semantics::{least_model, subsumption_equivalent, DEFAULT_SWEEP_CAP};
use crate::syntax::{Alphabet, Atom, Program, Rule};

pub const DEFAULT_SEARCH_BUDGET: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    L,
    R,
    J,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::L => "L",
            Relation::R => "R",
            Relation::J => "J",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Decision {
    Holds,
    Fails,
    /// The search budget ran out and the oracle did not apply.
    Undecided,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Holds => "holds",
            Decision::Fails => "fails",
            Decision::Undecided => "undecided",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Canonical,
    Search,
    Oracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Canonical => "canonical",
            Method::Search => "search",
            Method::Oracle => "oracle",
        })
    }
}

/// The outcome of a relation query, with the prefix and/or suffix that
/// certify it when it holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreenWitness {
    pub relation: Relation,
    pub decision: Decision,
    pub prefix: Option<Program>,
    pub suffix: Option<Program>,
    pub method: Method,
}

impl GreenWitness {
    pub(crate) fn fails(relation: Relation, method: Method) -> Self {
        GreenWitness {
            relation,
            decision: Decision::Fails,
            prefix: None,
            suffix: None,
            method,
        }
    }

    fn undecided(relation: Relation) -> Self {
        GreenWitness {
            decision: Decision::Undecided,
            ..GreenWitness::fails(relation, Method::Search)
        }
    }

    pub fn holds(&self) -> bool {
        self.decision == Decision::Holds
    }

    /// Recomputes the defining equation from the witness. False when the
    /// relation was not established.
    pub fn verify(&self, p: &Program, r: &Program) -> bool {
        if !self.holds() {
            return false;
        }
        match (self.relation, &self.prefix, &self.suffix) {
            (Relation::L, Some(q), _) => compose(q, r) == *p,
            (Relation::R, _, Some(s)) => compose(r, s) == *p,
            (Relation::J, Some(q), Some(s)) => compose(&compose(q, r), s) == *p,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecideOptions {
    /// Consult the exhaustive oracle when the operands use at most two atoms
    /// and the constructive procedure did not establish the relation.
    pub oracle_fallback: bool,
    /// Maximum number of search steps for `≤_R` and `≤_J`.
    pub search_budget: usize,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            oracle_fallback: true,
            search_budget: DEFAULT_SEARCH_BUDGET,
        }
    }
}

impl DecideOptions {
    /// The constructive procedures alone, with the default budget.
    pub fn constructive() -> Self {
        DecideOptions {
            oracle_fallback: false,
            ..Default::default()
        }
    }
}

// ------------------------------------------------------------------------------------------------
// L
// ------------------------------------------------------------------------------------------------

/// Calls `visit` with every subset of `items` of size at most `max`.
fn for_each_small_subset<'a, T>(items: &[&'a T], max: usize, visit: &mut impl FnMut(&[&'a T])) {
    fn go<'a, T>(
        items: &[&'a T],
        start: usize,
        max: usize,
        chosen: &mut Vec<&'a T>,
        visit: &mut impl FnMut(&[&'a T]),
    ) {
        visit(chosen);
        if chosen.len() == max {
            return;
        }
        for i in start..items.len() {
            chosen.push(items[i]);
            go(items, i + 1, max, chosen, visit);
            chosen.pop();
        }
    }
    go(items, 0, max, &mut Vec::new(), visit);
}

/// The canonical prefix `Q` with `P ≤_L R ⇔ QR = P`.
///
/// For every `q ∈ P` and every subset `S ⊆ R` of at most `|b(q)|` rules whose
/// bodies together are exactly `b(q)`, the rule `h(q) ← h(S)` joins `Q` when
/// composing it with `R` stays inside `P`.
pub fn canonical_prefix(p: &Program, r: &Program) -> Program {
    let mut accepted: BTreeMap<Rule, bool> = BTreeMap::new();
    for target in p {
        let candidates: Vec<&Rule> = r
            .iter()
            .filter(|s| s.body().is_subset(target.body()))
            .collect();
        for_each_small_subset(&candidates, target.size(), &mut |chosen| {
            let body: BTreeSet<Atom> = chosen.iter().flat_map(|s| s.body()).copied().collect();
            if body != *target.body() {
                return;
            }
            let rule = Rule::new(target.head(), chosen.iter().map(|s| s.head()));
            accepted.entry(rule).or_insert_with_key(|rule| {
                let single: Program = std::iter::once(rule.clone()).collect();
                compose(&single, r).is_subset(p)
            });
        });
    }
    accepted
        .into_iter()
        .filter_map(|(rule, ok)| ok.then_some(rule))
        .collect()
}

pub fn le_l(p: &Program, r: &Program) -> GreenWitness {
    let q = canonical_prefix(p, r);
    if compose(&q, r) == *p {
        GreenWitness {
            relation: Relation::L,
            decision: Decision::Holds,
            prefix: Some(q),
            suffix: None,
            method: Method::Canonical,
        }
    } else {
        GreenWitness::fails(Relation::L, Method::Canonical)
    }
}

// ------------------------------------------------------------------------------------------------
// Search machinery shared by R and J
// ------------------------------------------------------------------------------------------------

struct OutOfBudget;

struct Budget {
    remaining: usize,
}

impl Budget {
    fn spend(&mut self, steps: usize) -> std::result::Result<(), OutOfBudget> {
        if steps > self.remaining {
            self.remaining = 0;
            Err(OutOfBudget)
        } else {
            self.remaining -= steps;
            Ok(())
        }
    }
}

/// Programs `{b ← B_b | b ∈ b(source)}` with every `B_b ⊆ b(target)` and
/// `⋃ B_b = b(target)`, so that `{source} ∘ family = {target}` whenever the
/// heads agree. A fact `source` admits the empty family only when `target`
/// is that same fact.
fn rewrite_families(
    source: &Rule,
    target: &Rule,
    budget: &mut Budget,
) -> std::result::Result<Vec<Program>, OutOfBudget> {
    let parts: Vec<Vec<Atom>> = subsets(&target.body().iter().copied().collect::<Vec<_>>());
    let slots: Vec<Atom> = source.body().iter().copied().collect();
    let radices = vec![parts.len(); slots.len()];
    let combinations = parts.len().checked_pow(slots.len() as u32).unwrap_or(usize::MAX);
    budget.spend(combinations)?;

    let mut families = Vec::new();
    for_each_choice(&radices, |choice| {
        let covered: BTreeSet<Atom> = choice.iter().flat_map(|&i| parts[i].iter().copied()).collect();
        if covered != *target.body() {
            return;
        }
        families.push(
            slots
                .iter()
                .zip(choice)
                .map(|(&slot, &i)| Rule::new(slot, parts[i].iter().copied()))
                .collect(),
        );
    });
    Ok(families)
}

/// Backtracking cover search shared by the R and J deciders.
///
/// Every target is a rule of `P`; `generate` lists the partial witnesses
/// that produce a given target on their own (an empty list means the target
/// cannot be produced at all). Starting from an empty witness, the search
/// picks the first target not yet produced by the running witness and tries
/// each of its options in turn. `evaluate` must be monotone in the witness,
/// which composition is in both arguments, so a witness whose result leaves
/// `P` is abandoned together with all its extensions, and targets that are
/// already produced never need an option of their own.
struct CoverSearch<'a, T, M, E, G> {
    p: &'a Program,
    targets: Vec<&'a Rule>,
    options: Vec<Option<Vec<T>>>,
    merge: M,
    evaluate: E,
    generate: G,
    dead: HashSet<T>,
}

type Step<T> = std::result::Result<T, OutOfBudget>;

impl<'a, T, M, E, G> CoverSearch<'a, T, M, E, G>
where
    T: Clone + Eq + Hash,
    M: Fn(&T, &T) -> T,
    E: Fn(&T) -> Program,
    G: FnMut(&Rule, &mut Budget) -> Step<Vec<T>>,
{
    fn new(p: &'a Program, merge: M, evaluate: E, generate: G) -> Self {
        CoverSearch {
            p,
            targets: p.iter().collect(),
            options: vec![None; p.len()],
            merge,
            evaluate,
            generate,
            dead: HashSet::new(),
        }
    }

    fn options(&mut self, k: usize, budget: &mut Budget) -> Step<Vec<T>> {
        if self.options[k].is_none() {
            self.options[k] = Some((self.generate)(self.targets[k], budget)?);
        }
        Ok(self.options[k].clone().unwrap_or_default())
    }

    fn run(&mut self, witness: T, budget: &mut Budget) -> Step<Option<T>> {
        budget.spend(1)?;
        if self.dead.contains(&witness) {
            return Ok(None);
        }
        let result = (self.evaluate)(&witness);
        if !result.is_subset(self.p) {
            self.dead.insert(witness);
            return Ok(None);
        }
        let Some(k) = self.targets.iter().position(|t| !result.contains(t)) else {
            return Ok(Some(witness));
        };
        for option in self.options(k, budget)? {
            let next = (self.merge)(&witness, &option);
            if next == witness {
                continue;
            }
            if let Some(found) = self.run(next, budget)? {
                return Ok(Some(found));
            }
        }
        self.dead.insert(witness);
        Ok(None)
    }
}

fn singleton(rule: &Rule) -> Program {
    std::iter::once(rule.clone()).collect()
}

fn operand_alphabet(p: &Program, r: &Program) -> Alphabet {
    Alphabet::infer([p, r])
}

fn with_fallback(
    relation: Relation,
    p: &Program,
    r: &Program,
    options: &DecideOptions,
    outcome: GreenWitness,
) -> GreenWitness {
    if outcome.holds() || !options.oracle_fallback {
        return outcome;
    }
    let alphabet = operand_alphabet(p, r);
    if alphabet.len() > ORACLE_MAX_ATOMS {
        return outcome;
    }
    oracle_witness(relation, p, r, &alphabet).unwrap_or(outcome)
}

// ------------------------------------------------------------------------------------------------
// R
// ------------------------------------------------------------------------------------------------

fn search_r(p: &Program, r: &Program, budget: &mut Budget) -> Step<Option<Program>> {
    if !p.heads().is_subset(&r.heads()) {
        return Ok(None);
    }
    // Options for a target q: families S_q with {s}S_q = {q} for some s ∈ R
    // and RS_q ⊆ P.
    let generate = |target: &Rule, budget: &mut Budget| -> Step<Vec<Program>> {
        let mut options = BTreeSet::new();
        for source in r.iter().filter(|s| s.head() == target.head()) {
            for family in rewrite_families(source, target, budget)? {
                budget.spend(1)?;
                if compose(r, &family).is_subset(p) {
                    options.insert(family);
                }
            }
        }
        Ok(options.into_iter().collect())
    };
    let mut search = CoverSearch::new(
        p,
        |acc: &Program, family: &Program| acc.union(family),
        |suffix: &Program| compose(r, suffix),
        generate,
    );
    let found = search.run(Program::empty(), budget)?;
    Ok(found.filter(|suffix| compose(r, suffix) == *p))
}

pub fn le_r(p: &Program, r: &Program, options: &DecideOptions) -> GreenWitness {
    let mut budget = Budget {
        remaining: options.search_budget,
    };
    let outcome = match search_r(p, r, &mut budget) {
        Ok(Some(suffix)) => GreenWitness {
            relation: Relation::R,
            decision: Decision::Holds,
            prefix: None,
            suffix: Some(suffix),
            method: Method::Search,
        },
        Ok(None) => GreenWitness::fails(Relation::R, Method::Search),
        Err(OutOfBudget) => GreenWitness::undecided(Relation::R),
    };
    with_fallback(Relation::R, p, r, options, outcome)
}

// ------------------------------------------------------------------------------------------------
// J
// ------------------------------------------------------------------------------------------------

type Bracket = (Program, Program);

/// Searches for a suffix `S` only. Since `(QR)S = ⋃_{q∈Q} ({q}R)S`, once `S`
/// is fixed the best prefix is the largest one, every candidate rule `q`
/// with `({q}R)S ⊆ P`. Candidate prefix rules have their head in `h(P)` and
/// their body inside `h(R)`; any other rule contributes nothing or leaves `P`.
fn search_j(p: &Program, r: &Program, budget: &mut Budget) -> Step<Option<Bracket>> {
    let heads_r: Vec<Atom> = r.heads().iter().collect();
    let prefix_bodies = subsets(&heads_r);
    let mut prefixes: Vec<(Rule, Program)> = Vec::new();
    for head in p.heads().iter() {
        for body in &prefix_bodies {
            budget.spend(1)?;
            let rule = Rule::new(head, body.iter().copied());
            let reached = compose(&singleton(&rule), r);
            if !reached.is_empty() {
                prefixes.push((rule, reached));
            }
        }
    }

    // Options for a target t: a candidate prefix rule q, a rule x ∈ {q}R and
    // a suffix family F with {x}F = {t} and ({q}R)F ⊆ P.
    let mut options: Vec<Vec<(usize, Program)>> = Vec::with_capacity(p.len());
    for target in p {
        let mut found = BTreeSet::new();
        for (i, (rule, reached)) in prefixes.iter().enumerate() {
            if rule.head() != target.head() {
                continue;
            }
            let mut families = BTreeSet::new();
            for x in reached {
                families.extend(rewrite_families(x, target, budget)?);
            }
            for family in families {
                budget.spend(1)?;
                if compose(reached, &family).is_subset(p) {
                    found.insert((i, family));
                }
            }
        }
        if found.is_empty() {
            return Ok(None);
        }
        options.push(found.into_iter().collect());
    }

    let targets: Vec<&Rule> = p.iter().collect();
    let mut search = SuffixSearch {
        p,
        prefixes: &prefixes,
        targets: &targets,
        options: &options,
        dead: HashSet::new(),
    };
    let Some(suffix) = search.run(Program::empty(), budget)? else {
        return Ok(None);
    };
    let prefix: Program = search
        .usable(&suffix)
        .into_iter()
        .map(|i| prefixes[i].0.clone())
        .collect();
    let bracket = (prefix, suffix);
    Ok((compose(&compose(&bracket.0, r), &bracket.1) == *p).then_some(bracket))
}

struct SuffixSearch<'a> {
    p: &'a Program,
    prefixes: &'a [(Rule, Program)],
    targets: &'a [&'a Rule],
    options: &'a [Vec<(usize, Program)>],
    dead: HashSet<Program>,
}

impl SuffixSearch<'_> {
    /// Candidate prefix rules that keep `({q}R)S` inside `P`.
    fn usable(&self, suffix: &Program) -> Vec<usize> {
        (0..self.prefixes.len())
            .filter(|&i| compose(&self.prefixes[i].1, suffix).is_subset(self.p))
            .collect()
    }

    // Growing S only shrinks the usable set, so a target can only ever be
    // produced through a rule that is usable now.
    fn run(&mut self, suffix: Program, budget: &mut Budget) -> Step<Option<Program>> {
        budget.spend(1)?;
        if self.dead.contains(&suffix) {
            return Ok(None);
        }
        let usable = self.usable(&suffix);
        let produced: BTreeSet<Rule> = usable
            .iter()
            .flat_map(|&i| compose(&self.prefixes[i].1, &suffix))
            .collect();
        let Some(k) = self.targets.iter().position(|t| !produced.contains(*t)) else {
            return Ok(Some(suffix));
        };
        for (i, family) in &self.options[k] {
            if usable.binary_search(i).is_err() {
                continue;
            }
            let next = suffix.union(family);
            if next == suffix || !compose(&self.prefixes[*i].1, &next).is_subset(self.p) {
                continue;
            }
            if let Some(found) = self.run(next, budget)? {
                return Ok(Some(found));
            }
        }
        self.dead.insert(suffix);
        Ok(None)
    }
}

pub fn le_j(p: &Program, r: &Program, options: &DecideOptions) -> GreenWitness {
    let j_holds = |prefix: Program, suffix: Program, method| GreenWitness {
        relation: Relation::J,
        decision: Decision::Holds,
        prefix: Some(prefix),
        suffix: Some(suffix),
        method,
    };

    // P = QR gives P = (QR)1^b(P); P = RS gives P = (1^h(R) R)S.
    let left = le_l(p, r);
    if let Some(q) = left.prefix {
        let witness = j_holds(q, partial_unit(&p.bodies()), left.method);
        debug_assert!(witness.verify(p, r));
        return witness;
    }
    let right = le_r(p, r, &DecideOptions { oracle_fallback: false, ..*options });
    if let Some(s) = right.suffix {
        let witness = j_holds(partial_unit(&r.heads()), s, right.method);
        debug_assert!(witness.verify(p, r));
        return witness;
    }

    let mut budget = Budget {
        remaining: options.search_budget,
    };
    let outcome = match search_j(p, r, &mut budget) {
        Ok(Some((q, s))) => j_holds(q, s, Method::Search),
        Ok(None) => GreenWitness::fails(Relation::J, Method::Search),
        Err(OutOfBudget) => GreenWitness::undecided(Relation::J),
    };
    with_fallback(Relation::J, p, r, options, outcome)
}

pub fn le(relation: Relation, p: &Program, r: &Program, options: &DecideOptions) -> GreenWitness {
    match relation {
        Relation::L => le_l(p, r),
        Relation::R => le_r(p, r, options),
        Relation::J => le_j(p, r, options),
    }
}

// ------------------------------------------------------------------------------------------------
// Equivalences
// ------------------------------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Equivalence {
    Green(Relation),
    /// `T_P = T_R`.
    Subsumption,
    /// `LM(P) = LM(R)`.
    LeastModel,
}

/// Both directions of a Green relation, or one of the semantic equivalences.
///
/// Semantic equivalences are evaluated over the atoms of the two programs,
/// which suffices since `T_P(I)` only depends on `I ∩ b(P)`.
pub fn equiv(kind: Equivalence, p: &Program, r: &Program, options: &DecideOptions) -> Result<Decision> {
    let alphabet = operand_alphabet(p, r);
    let as_decision = |b: bool| if b { Decision::Holds } else { Decision::Fails };
    match kind {
        Equivalence::Green(relation) => {
            let forward = le(relation, p, r, options).decision;
            if forward == Decision::Fails {
                return Ok(Decision::Fails);
            }
            let backward = le(relation, r, p, options).decision;
            Ok(match (forward, backward) {
                (_, Decision::Fails) => Decision::Fails,
                (Decision::Holds, Decision::Holds) => Decision::Holds,
                _ => Decision::Undecided,
            })
        }
        Equivalence::Subsumption => Ok(as_decision(subsumption_equivalent(
            p,
            r,
            &alphabet,
            DEFAULT_SWEEP_CAP,
        )?)),
        Equivalence::LeastModel => {
            Ok(as_decision(least_model(p, &alphabet)?.0 == least_model(r, &alphabet)?.0))
        }
    }
}

// ------------------------------------------------------------------------------------------------
// Oracle cross-checks
// ------------------------------------------------------------------------------------------------

/// A pair on which a constructive decider and the oracle disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discrepancy {
    pub relation: Relation,
    pub p: Program,
    pub r: Program,
    pub decider: Decision,
    pub oracle: bool,
    /// Set when the decider claimed success with a witness that does not recompose.
    pub bad_witness: bool,
}

impl fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "theorem-discrepancy relation={} p={:?} r={:?} decider={} oracle={} bad_witness={}",
            self.relation, self.p, self.r, self.decider, self.oracle, self.bad_witness
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CrossCheck {
    pub pairs: usize,
    pub holding: usize,
    pub discrepancies: Vec<Discrepancy>,
}

/// Runs the constructive decider (no oracle fallback) on every ordered pair
/// of programs over `alphabet` and compares it with the oracle.
pub fn cross_check(relation: Relation, alphabet: &Alphabet, budget: usize) -> Result<CrossCheck> {
    let table = OracleTable::new(alphabet)?;
    let space = table.space();
    let programs: Vec<Program> = space.programs().collect();
    let options = DecideOptions {
        oracle_fallback: false,
        search_budget: budget,
    };
    let mut report = CrossCheck::default();
    for (pi, p) in programs.iter().enumerate() {
        for (ri, r) in programs.iter().enumerate() {
            let expected = table.le(relation, pi, ri);
            let witness = le(relation, p, r, &options);
            let bad_witness = witness.holds() && !witness.verify(p, r);
            report.pairs += 1;
            report.holding += usize::from(expected);
            if bad_witness || witness.holds() != expected {
                report.discrepancies.push(Discrepancy {
                    relation,
                    p: p.clone(),
                    r: r.clone(),
                    decider: witness.decision,
                    oracle: expected,
                    bad_witness,
                });
            }
        }
    }
    Ok(report)
}

// ------------------------------------------------------------------------------------------------
// Class structure
// ------------------------------------------------------------------------------------------------

/// Programs grouped into classes of mutual reachability under a relation,
/// with the strict order induced between classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassReport {
    pub relation: Relation,
    /// Each class is sorted; classes are ordered by their least member.
    pub classes: Vec<Vec<Program>>,
    /// `(i, j)` when class `i` lies strictly below class `j`. Transitive.
    pub order_edges: BTreeSet<(usize, usize)>,
    /// Ordered pairs implied by transitivity that the relation itself does
    /// not contain. Zero when the relation is transitive on the input.
    pub closure_gaps: usize,
}

impl ClassReport {
    /// Builds the report from any decision procedure `le(p, r)` for `p ≤ r`.
    pub fn build(
        relation: Relation,
        programs: &[Program],
        mut le: impl FnMut(&Program, &Program) -> Result<bool>,
    ) -> Result<Self> {
        let programs: Vec<Program> = programs
            .iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let n = programs.len();
        let mut reach = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                reach[i][j] = i == j || le(&programs[i], &programs[j])?;
            }
        }
        let direct = reach.clone();
        #[allow(clippy::needless_range_loop)]
        for k in 0..n {
            for i in 0..n {
                if reach[i][k] {
                    for j in 0..n {
                        if reach[k][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
        }
        let closure_gaps = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| reach[i][j] && !direct[i][j])
            .count();

        let mut class_of = vec![usize::MAX; n];
        let mut classes: Vec<Vec<Program>> = Vec::new();
        for i in 0..n {
            if class_of[i] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut members = Vec::new();
            for j in i..n {
                if reach[i][j] && reach[j][i] {
                    class_of[j] = id;
                    members.push(programs[j].clone());
                }
            }
            classes.push(members);
        }

        let mut order_edges = BTreeSet::new();
        for i in 0..n {
            for j in 0..n {
                if reach[i][j] && class_of[i] != class_of[j] {
                    order_edges.insert((class_of[i], class_of[j]));
                }
            }
        }
        Ok(ClassReport {
            relation,
            classes,
            order_edges,
            closure_gaps,
        })
    }

    /// The covering pairs of the class order.
    pub fn hasse_edges(&self) -> BTreeSet<(usize, usize)> {
        self.order_edges
            .iter()
            .copied()
            .filter(|&(i, j)| {
                !(0..self.classes.len()).any(|k| {
                    self.order_edges.contains(&(i, k)) && self.order_edges.contains(&(k, j))
                })
            })
            .collect()
    }

    pub fn class_of(&self, p: &Program) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(p))
    }

    /// Graphviz rendering: one node per class, edges from lower to upper
    /// along the covering pairs.
    pub fn to_dot(&self) -> String {
        let mut out = format!("digraph {} {{\n  rankdir=BT;\n  node [shape=box];\n", self.relation);
        for (i, class) in self.classes.iter().enumerate() {
            let label = class
                .iter()
                .map(|p| {
                    let text = p.render_inline();
                    if text.is_empty() { "∅".to_string() } else { text }
                })
                .collect::<Vec<_>>()
                .join("\\n")
                .replace('"', "\\\"");
            out.push_str(&format!("  c{i} [label=\"{label}\"];\n"));
        }
        for (i, j) in self.hasse_edges() {
            out.push_str(&format!("  c{i} -> c{j};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// Partitions `programs` by the chosen relation using the deciders.
pub fn green_partition(
    programs: &[Program],
    relation: Relation,
    options: &DecideOptions,
) -> Result<ClassReport> {
    ClassReport::build(relation, programs, |p, r| {
        match le(relation, p, r, options).decision {
            Decision::Holds => Ok(true),
            Decision::Fails => Ok(false),
            Decision::Undecided => Err(Error::SearchBudget {
                budget: options.search_budget,
            }),
        }
    })
}

/// Like [`green_partition`] but answered by the exhaustive oracle table.
pub fn green_partition_exact(
    programs: &[Program],
    relation: Relation,
    alphabet: &Alphabet,
) -> Result<ClassReport> {
    let table = OracleTable::new(alphabet)?;
    ClassReport::build(relation, programs, |p, r| {
        table.le_programs(relation, p, r).ok_or_else(|| Error::AlphabetCoverage {
            missing: Alphabet::infer([p, r])
                .iter()
                .filter(|a| !alphabet.contains(*a))
                .map(|a| a.name().to_string())
                .collect(),
        })
    })
}

// ------------------------------------------------------------------------------------------------
// Non-associativity
// ------------------------------------------------------------------------------------------------

/// Searches for `(P, Q, R)` with `(PQ)R ≠ P(QR)`.
///
/// A witness over two atoms is a witness over any larger alphabet, so the
/// exhaustive search only looks at the first two atoms of `alphabet`. Returns
/// `None` when the searched space holds no witness, which is the case for
/// alphabets with fewer than two atoms.
pub fn find_nonassociative_triple(alphabet: &Alphabet) -> Result<Option<(Program, Program, Program)>> {
    let small = Alphabet::new(alphabet.iter().take(ORACLE_MAX_ATOMS));
    let table = OracleTable::new(&small)?;
    let n = table.len();
    for p in 0..n {
        for q in 0..n {
            let pq = table.compose(p, q);
            for r in 0..n {
                if table.compose(pq, r) != table.compose(p, table.compose(q, r)) {
                    let space = table.space();
                    let triple = (space.program(p as u64), space.program(q as u64), space.program(r as u64));
                    let (x, y, z) = &triple;
                    // Re-check on the program level, independent of the table.
                    if compose(&compose(x, y), z) == compose(x, &compose(y, z)) {
                        return Err(Error::Internal("composition table is inconsistent".into()));
                    }
                    return Ok(Some(triple));
                }
            }
        }
    }
    Ok(None)
}
