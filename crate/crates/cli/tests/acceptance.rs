//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use horn_algebra::green::DEFAULT_SEARCH_BUDGET;
use horn_algebra::{
    build_ominus, build_oplus, compose, cross_check, find_nonassociative_triple, green_partition,
    le_j, le_l, le_r, least_model, left_reduct, omega, oracle_le, partial_unit, plus,
    right_reduct, split, star, tp, unit, Alphabet, Atom, DecideOptions, GreenWitness,
    Interpretation, OracleTable, Program, ProgramSpace, Relation, Rule,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

struct Criterion {
    id: u8,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn prog(text: &str) -> Program {
    text.parse().expect("valid program")
}

fn alpha(text: &str) -> Alphabet {
    text.parse().expect("valid alphabet")
}

fn interp(text: &str) -> Interpretation {
    text.parse().expect("valid interpretation")
}

fn ensure(cond: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message())
    }
}

fn two_atoms() -> Alphabet {
    alpha("a, b")
}

fn all_programs() -> Vec<Program> {
    ProgramSpace::new(&two_atoms()).unwrap().programs().collect()
}

fn interpretations_of(a: &Alphabet) -> Vec<Interpretation> {
    let atoms: Vec<Atom> = a.iter().collect();
    (0..1u32 << atoms.len())
        .map(|mask| atoms.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &x)| x).collect())
        .collect()
}

fn random_alphabet(size: usize) -> Alphabet {
    alpha(&["a", "b", "c", "d"][..size].join(", "))
}

fn random_program(rng: &mut ChaCha8Rng, a: &Alphabet, max_rules: usize) -> Program {
    let atoms: Vec<Atom> = a.iter().collect();
    let rules = rng.gen_range(0..=max_rules);
    (0..rules)
        .map(|_| {
            let head = atoms[rng.gen_range(0..atoms.len())];
            let body: Vec<Atom> = atoms.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
            Rule::new(head, body)
        })
        .collect()
}

fn random_interpretation(rng: &mut ChaCha8Rng, a: &Alphabet) -> Interpretation {
    a.iter().filter(|_| rng.gen_bool(0.5)).collect()
}

/// Iterates `T_P` from the empty interpretation until it stabilises.
fn naive_fixpoint(p: &Program) -> Interpretation {
    let mut current = Interpretation::empty();
    loop {
        let next = tp(p, &current);
        if next == current {
            return current;
        }
        current = next;
    }
}

fn laws() -> Outcome {
    let a = two_atoms();
    let one = unit(&a);
    let empty = Program::empty();
    let table = OracleTable::new(&a).map_err(|e| e.to_string())?;
    let space = table.space().clone();
    let programs = all_programs();
    let interps = interpretations_of(&a);
    let mut checks = 0u64;

    for p in &programs {
        ensure(compose(p, &one) == *p && compose(&one, p) == *p, || format!("identity fails on {p:?}"))?;
        ensure(compose(&empty, p).is_empty(), || format!("left zero fails on {p:?}"))?;
        for i in &interps {
            let fi = i.to_program();
            ensure(compose(&fi, p) == fi, || format!("IP = I fails for I = {i}, P = {p:?}"))?;
            ensure(compose(p, &fi) == tp(p, i).to_program(), || format!("T_P(I) = PI fails for I = {i}, P = {p:?}"))?;
            checks += 2;
        }
        checks += 3;
    }

    for p in &programs {
        for r in &programs {
            let pr = compose(p, r);
            ensure(pr.heads().is_subset(&p.heads()), || format!("h(PR) not in h(P) for {p:?}, {r:?}"))?;
            ensure(pr.bodies().is_subset(&r.bodies()), || format!("b(PR) not in b(R) for {p:?}, {r:?}"))?;
            ensure(space.index_of(&pr) == Some(table.compose(space.index_of(p).unwrap() as usize, space.index_of(r).unwrap() as usize) as u64), || {
                format!("table disagrees on {p:?}, {r:?}")
            })?;
            checks += 3;
        }
    }

    // Programs are bitmasks over rules, so union is bitwise or.
    let n = table.len();
    for p in 0..n {
        for q in 0..n {
            let pq = p | q;
            for r in 0..n {
                if table.compose(pq, r) != table.compose(p, r) | table.compose(q, r) {
                    return Err(format!(
                        "right distributivity fails for {:?}, {:?}, {:?}",
                        space.program(p as u64),
                        space.program(q as u64),
                        space.program(r as u64)
                    ));
                }
            }
        }
    }
    checks += (n * n * n) as u64;
    Ok(format!("{checks} checks, 0 violations"))
}

fn least_models() -> Outcome {
    let check = |p: &Program, a: &Alphabet| -> Result<(), String> {
        let (lm, trace) = least_model(p, a).map_err(|e| e.to_string())?;
        let w = omega(p, a).map_err(|e| e.to_string())?;
        let fix = naive_fixpoint(p);
        ensure(lm == w && lm == fix && *trace.fixpoint() == lm, || {
            format!("LM {lm}, omega {w}, T_P fixpoint {fix} differ for {p:?}")
        })
    };
    let a = two_atoms();
    for p in all_programs() {
        check(&p, &a)?;
    }
    let a4 = random_alphabet(4);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    for _ in 0..10_000 {
        check(&random_program(&mut rng, &a4, 6), &a4)?;
    }
    Ok("256 exhaustive + 10000 random programs agree".into())
}

fn counterexamples() -> Outcome {
    let p = prog("a :- b, c.");
    let (b, c) = (prog("b."), prog("c."));
    ensure(compose(&p, &b.union(&c)) == prog("a."), || "P(B ∪ C) is not {a}".into())?;
    ensure(compose(&p, &b).is_empty() && compose(&p, &c).is_empty(), || "single compositions are not empty".into())?;

    let a = two_atoms();
    let r = prog("a :- b. b :- b.");
    let pi = prog("a :- b. b :- a.");
    let w = le_r(&r, &pi, &DecideOptions::default());
    ensure(w.verify(&r, &pi), || format!("R ≤_R π not witnessed: {w:?}"))?;
    ensure(!oracle_le(Relation::R, &pi, &r, &a).map_err(|e| e.to_string())?, || "oracle claims π ≤_R R".into())?;

    let opts = DecideOptions::default();
    let x = prog("a. b :- a.");
    let y = prog("a. b :- a, b.");
    for (u, v) in [(&x, &y), (&y, &x)] {
        let w = le_j(u, v, &opts);
        ensure(w.verify(u, v), || format!("J witness missing for {u:?} ≤ {v:?}"))?;
    }
    ensure(least_model(&x, &a).unwrap().0 != least_model(&y, &a).unwrap().0, || "least models coincide".into())?;

    let loop_a = prog("a :- a.");
    let empty = Program::empty();
    let one = alpha("a");
    ensure(least_model(&loop_a, &one).unwrap().0 == least_model(&empty, &one).unwrap().0, || "least models differ".into())?;
    ensure(!le_j(&loop_a, &empty, &opts).holds(), || "decider claims {a :- a.} ≤_J ∅".into())?;
    ensure(!oracle_le(Relation::J, &loop_a, &empty, &one).map_err(|e| e.to_string())?, || "oracle claims {a :- a.} ≤_J ∅".into())?;
    Ok("distributivity, strict R order and both J examples reproduced".into())
}

fn oracle_agreement(relation: Relation) -> Outcome {
    let report = cross_check(relation, &two_atoms(), DEFAULT_SEARCH_BUDGET).map_err(|e| e.to_string())?;
    if report.discrepancies.is_empty() {
        Ok(format!("{} pairs, {} holding, 0 discrepancies", report.pairs, report.holding))
    } else {
        for d in &report.discrepancies {
            eprintln!("{d}");
        }
        Err(format!("{} discrepancies over {} pairs", report.discrepancies.len(), report.pairs))
    }
}

fn agreement_l() -> Outcome {
    oracle_agreement(Relation::L)
}

fn agreement_r() -> Outcome {
    oracle_agreement(Relation::R)
}

fn worked_j_example() -> Outcome {
    let a = alpha("a, b, c");
    let p = prog("c. a :- b, c. b :- a, c.");
    let pi = prog("a :- b. b :- a.");
    let c = interp("{c}");

    let q1 = star(&c.to_program(), &a).map_err(|e| e.to_string())?;
    let s1 = build_oplus(&c, &a).map_err(|e| e.to_string())?.difference(&partial_unit(&c));
    ensure(compose(&compose(&q1, &pi), &s1) == p, || "({c}* π)({c}⊕ − 1^{c}) ≠ P".into())?;
    let q2 = partial_unit(&interp("{a, b}"));
    let s2 = build_ominus(&c, &a).map_err(|e| e.to_string())?;
    ensure(compose(&compose(&q2, &p), &s2) == pi, || "(1^{a,b} P){c}⊖ ≠ π".into())?;

    let opts = DecideOptions::default();
    let forward = le_j(&p, &pi, &opts);
    let backward = le_j(&pi, &p, &opts);
    ensure(forward.verify(&p, &pi), || format!("decider did not establish P ≤_J π: {forward:?}"))?;
    ensure(backward.verify(&pi, &p), || format!("decider did not establish π ≤_J P: {backward:?}"))?;
    Ok("given witnesses verify; deciders find both directions".into())
}

fn chains() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let opts = DecideOptions::default();
    let mut decided = 0usize;
    let pairs = 1_000;
    for n in 0..pairs {
        let a = random_alphabet(1 + n % 4);
        let p = random_program(&mut rng, &a, 5);
        let i = random_interpretation(&mut rng, &a);
        let fi = i.to_program();
        let err = |e: horn_algebra::Error| e.to_string();

        let (lm, _) = least_model(&p, &a).map_err(err)?;
        let left: Vec<(&str, Program, Program)> = vec![
            ("P+ ≤_L P", plus(&p, &a).map_err(err)?, star(&p, &a).map_err(err)?),
            ("P ∪ I ≤_L P", p.union(&fi), unit(&a).union(&fi)),
            ("^I P ≤_L P", left_reduct(&i, &p), partial_unit(&i)),
        ];
        let right: Vec<(&str, Program, Program)> = vec![
            ("f(P) ≤_R P", split(&p).0, Program::empty()),
            ("P^ω ≤_R P", omega(&p, &a).map_err(err)?.to_program(), lm.to_program()),
            ("P^I ≤_R P", right_reduct(&p, &i), partial_unit(&i)),
            ("P I⊕ ≤_R P", compose(&p, &build_oplus(&i, &a).map_err(err)?), build_oplus(&i, &a).map_err(err)?),
            ("P I⊖ ≤_R P", compose(&p, &build_ominus(&i, &a).map_err(err)?), build_ominus(&i, &a).map_err(err)?),
            ("T_P(I) ≤_R P", tp(&p, &i).to_program(), fi.clone()),
        ];
        for (name, lhs, q) in left {
            let w = GreenWitness {
                relation: Relation::L,
                decision: horn_algebra::Decision::Holds,
                prefix: Some(q),
                suffix: None,
                method: horn_algebra::Method::Canonical,
            };
            ensure(w.verify(&lhs, &p), || format!("{name}: witness fails for P = {p:?}, I = {i}"))?;
            ensure(le_l(&lhs, &p).verify(&lhs, &p), || format!("{name}: decider fails for P = {p:?}, I = {i}"))?;
            decided += 1;
        }
        for (name, lhs, s) in right {
            let w = GreenWitness {
                relation: Relation::R,
                decision: horn_algebra::Decision::Holds,
                prefix: None,
                suffix: Some(s),
                method: horn_algebra::Method::Search,
            };
            ensure(w.verify(&lhs, &p), || format!("{name}: witness fails for P = {p:?}, I = {i}"))?;
            let d = le_r(&lhs, &p, &opts);
            ensure(d.decision != horn_algebra::Decision::Fails, || format!("{name}: decider rejects P = {p:?}, I = {i}"))?;
            if d.verify(&lhs, &p) {
                decided += 1;
            }
        }
    }
    Ok(format!("{pairs} pairs, 9 chains each; {decided}/{} also established by the deciders", pairs * 9))
}

fn nonassoc() -> Outcome {
    match find_nonassociative_triple(&two_atoms()).map_err(|e| e.to_string())? {
        Some((p, q, r)) => {
            let left = compose(&compose(&p, &q), &r);
            let right = compose(&p, &compose(&q, &r));
            ensure(left != right, || "reported triple is associative".into())?;
            Ok(format!("P = {{{}}}, Q = {{{}}}, R = {{{}}}", p.render_inline(), q.render_inline(), r.render_inline()))
        }
        None => Err("no triple found".into()),
    }
}

fn structure() -> Outcome {
    let a = two_atoms();
    let opts = DecideOptions::default();
    let interps: Vec<Program> = interpretations_of(&a).iter().map(Interpretation::to_program).collect();

    let l = green_partition(&interps, Relation::L, &opts).map_err(|e| e.to_string())?;
    ensure(l.classes.len() == 1, || format!("{} L classes", l.classes.len()))?;
    let r = green_partition(&interps, Relation::R, &opts).map_err(|e| e.to_string())?;
    ensure(r.classes.len() == 4 && r.classes.iter().all(|c| c.len() == 1), || format!("{} R classes", r.classes.len()))?;

    for p in all_programs() {
        for i in &interps {
            ensure(le_l(&p, i).holds() == p.is_interpretation(), || format!("P ≤_L I wrong for {p:?}, {i:?}"))?;
            ensure(le_r(&p, i, &opts).holds() == (p == *i), || format!("P ≤_R I wrong for {p:?}, {i:?}"))?;
        }
    }
    Ok("1 L class, 4 singleton R classes, 1024 pairs checked".into())
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_horn"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    let mut bytes = out.stdout;
    bytes.extend_from_slice(&out.stderr);
    bytes.push(out.status.code().unwrap_or(-1) as u8);
    Ok(bytes)
}

fn round_trip() -> Outcome {
    for p in all_programs() {
        let text = p.render();
        ensure(text.parse::<Program>().as_ref() == Ok(&p), || format!("render/parse mismatch for {text:?}"))?;
        let inline = p.render_inline();
        ensure(inline.parse::<Program>().as_ref() == Ok(&p), || format!("inline render/parse mismatch for {inline:?}"))?;
    }

    let invocations: &[&[&str]] = &[
        &["le", "l", "a :- a.", "a :- b. b :- a."],
        &["le", "r", "a :- b. b :- b.", "a :- b. b :- a.", "--json"],
        &["le", "j", "c. a :- b, c. b :- a, c.", "a :- b. b :- a.", "--json"],
        &["equiv", "j", "a. b :- a.", "a. b :- a, b."],
        &["classes", "--relation", "j", "--enumerate", "--alphabet", "a", "--json"],
        &["lm", "a. b :- a.", "--json"],
        &["star", "a :- b. b :- a."],
        &["nonassoc"],
    ];
    for args in invocations {
        let first = run_cli(args)?;
        for _ in 0..2 {
            ensure(run_cli(args)? == first, || format!("output differs across runs for {args:?}"))?;
        }
    }
    Ok(format!("256 programs round-trip; {} CLI invocations stable", invocations.len()))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "composition laws over all programs on two atoms", limit: Some(Duration::from_secs(60)), run: laws },
        Criterion { id: 2, name: "least model = omega = T_P fixpoint", limit: Some(Duration::from_secs(60)), run: least_models },
        Criterion { id: 3, name: "counterexamples", limit: None, run: counterexamples },
        Criterion { id: 4, name: "le_l agrees with the oracle on all pairs", limit: None, run: agreement_l },
        Criterion { id: 5, name: "le_r agrees with the oracle on all pairs", limit: Some(Duration::from_secs(600)), run: agreement_r },
        Criterion { id: 6, name: "J-equivalence worked example over {a, b, c}", limit: None, run: worked_j_example },
        Criterion { id: 7, name: "Green-relation chains on random programs", limit: None, run: chains },
        Criterion { id: 8, name: "non-associative triple", limit: Some(Duration::from_secs(60)), run: nonassoc },
        Criterion { id: 9, name: "L and R structure of interpretations", limit: None, run: structure },
        Criterion { id: 10, name: "round trip and determinism", limit: None, run: round_trip },
    ];

    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!("took {elapsed:.1?}, limit {limit:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS [{:>2}] {}: {detail} ({elapsed:.2?})", c.id, c.name),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{:>2}] {}: {detail} ({elapsed:.2?})", c.id, c.name);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
