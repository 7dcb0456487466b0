//! Command-line parsing and dispatch.

use std::io::Write;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use horn_algebra::green::DEFAULT_SEARCH_BUDGET;
use horn_algebra::{
    build_ominus, build_oplus, compose, dual, find_nonassociative_triple, green_partition,
    green_partition_exact, heads_bodies, least_model, left_reduct, omega, oracle_witness,
    partial_unit, plus, power, right_reduct, split, star, subsumption_equivalent, tp, unit,
    Alphabet, Decision, DecideOptions, Error, GreenWitness, Interpretation, ModelKind, Program,
    Relation, DEFAULT_SWEEP_CAP,
};
use serde_json::{json, Map, Value};

use crate::input;
use crate::output::{self, interpretation_value, program_text, program_value, witness_text, witness_value};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILS: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BOUND: u8 = 3;
pub const EXIT_INTERNAL: u8 = 4;

/// An error that ends the command, with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: String) -> Self {
        Failure {
            code: EXIT_USAGE,
            message,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Syntax { .. } | Error::InvalidAtom(_) | Error::AlphabetCoverage { .. } => EXIT_USAGE,
            Error::CapExceeded { .. } | Error::OracleBound { .. } | Error::SearchBudget { .. } => {
                EXIT_BOUND
            }
            Error::Internal(_) => EXIT_INTERNAL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "horn", version, about = "Sequential composition of propositional Horn programs")]
struct Cli {
    /// Comma-separated atoms; inferred from the operands when omitted.
    #[arg(long, global = true, value_name = "ATOMS")]
    alphabet: Option<String>,

    /// Emit a JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Decide relations with the exhaustive oracle (at most two atoms).
    #[arg(long, global = true)]
    oracle: bool,

    /// Largest alphabet for exhaustive sweeps over interpretations.
    #[arg(long, global = true, default_value_t = DEFAULT_SWEEP_CAP)]
    cap: usize,

    /// Step budget for the relation searches.
    #[arg(long, global = true, default_value_t = DEFAULT_SEARCH_BUDGET)]
    budget: usize,

    /// Include wall-clock timings in JSON output.
    #[arg(long, global = true)]
    timings: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RelationArg {
    L,
    R,
    J,
}

impl From<RelationArg> for Relation {
    fn from(r: RelationArg) -> Self {
        match r {
            RelationArg::L => Relation::L,
            RelationArg::R => Relation::R,
            RelationArg::J => Relation::J,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EquivArg {
    L,
    R,
    J,
    Ss,
    Lm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Side {
    /// `reduct left I P`
    Left,
    /// `reduct right P I`
    Right,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a program in canonical form.
    Fmt { program: String },
    /// Compose programs, folding to the left.
    Compose {
        #[arg(num_args = 2.., required = true)]
        programs: Vec<String>,
    },
    /// The n-th power, with P^0 the unit.
    Power { program: String, n: usize },
    /// Unit together with every power.
    Star { program: String },
    /// Star composed with the program.
    Plus { program: String },
    /// Heads of the plus applied to the empty program.
    Omega { program: String },
    Dual { program: String },
    /// Facts of the program.
    Facts { program: String },
    Heads { program: String },
    Bodies { program: String },
    /// The unit over the alphabet, or the partial unit over an interpretation.
    Unit { interpretation: Option<String> },
    /// Reducts: `left I P` keeps rules with head in I, `right P I` rules with body inside I.
    Reduct { side: Side, first: String, second: String },
    /// The ominus gadget of I, optionally composed after P.
    Ominus { interpretation: String, program: Option<String> },
    /// The oplus gadget of I, optionally composed after P.
    Oplus { interpretation: String, program: Option<String> },
    /// Least model, with the immediate-consequence iteration.
    Lm { program: String },
    /// One application of the immediate-consequence operator.
    Tp { program: String, interpretation: String },
    /// Models over the alphabet.
    Models {
        program: String,
        #[arg(long)]
        supported: bool,
    },
    /// Subsumption equivalence.
    #[command(name = "ss-equiv")]
    SsEquiv { p: String, r: String },
    /// Decide P ≤ R for a Green's relation.
    Le { relation: RelationArg, p: String, r: String },
    /// Decide equivalence under a Green's relation or a semantics.
    Equiv { kind: EquivArg, p: String, r: String },
    /// Classes and order of a set of programs under a relation.
    Classes {
        #[arg(long)]
        relation: RelationArg,
        /// File of programs separated by `---` lines.
        #[arg(long, conflicts_with = "enumerate", required_unless_present = "enumerate")]
        programs: Option<String>,
        /// Every program over the alphabet (at most two atoms).
        #[arg(long)]
        enumerate: bool,
        /// Render the order as Graphviz DOT.
        #[arg(long)]
        dot: bool,
    },
    /// Search for a triple on which composition is not associative.
    Nonassoc,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Fmt { .. } => "fmt",
            Command::Compose { .. } => "compose",
            Command::Power { .. } => "power",
            Command::Star { .. } => "star",
            Command::Plus { .. } => "plus",
            Command::Omega { .. } => "omega",
            Command::Dual { .. } => "dual",
            Command::Facts { .. } => "facts",
            Command::Heads { .. } => "heads",
            Command::Bodies { .. } => "bodies",
            Command::Unit { .. } => "unit",
            Command::Reduct { .. } => "reduct",
            Command::Ominus { .. } => "ominus",
            Command::Oplus { .. } => "oplus",
            Command::Lm { .. } => "lm",
            Command::Tp { .. } => "tp",
            Command::Models { .. } => "models",
            Command::SsEquiv { .. } => "ss-equiv",
            Command::Le { .. } => "le",
            Command::Equiv { .. } => "equiv",
            Command::Classes { .. } => "classes",
            Command::Nonassoc => "nonassoc",
        }
    }
}

/// What a command produced: text for the terminal, values for JSON.
struct Report {
    text: String,
    result: Value,
    witness: Value,
    method: Value,
    code: u8,
}

impl Report {
    fn new(text: String, result: Value) -> Self {
        Report {
            text,
            result,
            witness: Value::Null,
            method: Value::Null,
            code: EXIT_OK,
        }
    }

    fn program(p: &Program) -> Self {
        Report::new(program_text(p), program_value(p))
    }

    fn interpretation(i: &Interpretation) -> Self {
        Report::new(format!("{i}\n"), interpretation_value(i))
    }

    fn verdict(holds: bool) -> Self {
        let decision = if holds { Decision::Holds } else { Decision::Fails };
        let mut report = Report::new(format!("{decision}\n"), json!(decision.to_string()));
        report.code = if holds { EXIT_OK } else { EXIT_FAILS };
        report
    }
}

/// Operands collected while a command runs, and the alphabet they live in.
struct Context {
    explicit: Option<Alphabet>,
    inputs: Map<String, Value>,
    programs: Vec<Program>,
    interpretations: Vec<Interpretation>,
    options: DecideOptions,
    oracle: bool,
    cap: usize,
}

impl Context {
    fn program(&mut self, name: &str, arg: &str) -> Result<Program, Failure> {
        let p = input::program(arg)?;
        self.inputs.insert(name.to_string(), program_value(&p));
        self.programs.push(p.clone());
        Ok(p)
    }

    fn interpretation(&mut self, name: &str, arg: &str) -> Result<Interpretation, Failure> {
        let i = input::interpretation(arg)?;
        self.inputs.insert(name.to_string(), interpretation_value(&i));
        self.interpretations.push(i.clone());
        Ok(i)
    }

    /// The explicit alphabet, checked to cover every operand, or the atoms of the operands.
    fn alphabet(&self) -> Result<Alphabet, Failure> {
        let used = self
            .interpretations
            .iter()
            .fold(Alphabet::infer(&self.programs), |acc, i| {
                acc.union(&Alphabet::new(i.iter()))
            });
        match &self.explicit {
            Some(a) => {
                a.check_atoms(used.iter())?;
                Ok(a.clone())
            }
            None => Ok(used),
        }
    }

    fn decide(&self, relation: Relation, p: &Program, r: &Program) -> Result<GreenWitness, Failure> {
        let w = if self.oracle {
            let alphabet = match &self.explicit {
                Some(a) => a.clone(),
                None => Alphabet::infer([p, r]),
            };
            oracle_witness(relation, p, r, &alphabet)?
        } else {
            horn_algebra::le(relation, p, r, &self.options)
        };
        if w.holds() && !w.verify(p, r) {
            return Err(Failure {
                code: EXIT_INTERNAL,
                message: format!("witness for {relation} failed to verify"),
            });
        }
        Ok(w)
    }
}

/// Runs the command line `args` (including the program name), writing
/// results to `out` and errors to stderr. Returns the exit code.
pub fn run(args: &[String], out: &mut impl Write) -> u8 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            if e.use_stderr() {
                eprint!("{}", e.render());
            } else {
                let _ = write!(out, "{}", e.render());
            }
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: &Cli, out: &mut impl Write) -> Result<u8, Failure> {
    let start = Instant::now();
    let explicit = match &cli.alphabet {
        Some(text) => Some(
            text.parse::<Alphabet>()
                .map_err(|e| Failure::usage(format!("in alphabet: {e}")))?,
        ),
        None => None,
    };
    let mut ctx = Context {
        explicit,
        inputs: Map::new(),
        programs: Vec::new(),
        interpretations: Vec::new(),
        options: DecideOptions {
            oracle_fallback: true,
            search_budget: cli.budget,
        },
        oracle: cli.oracle,
        cap: cli.cap,
    };

    let report = dispatch(&cli.command, &mut ctx)?;
    let alphabet = ctx.alphabet()?;

    let rendered = if cli.json {
        let timings = if cli.timings {
            json!({ "total_ms": start.elapsed().as_secs_f64() * 1000.0 })
        } else {
            Value::Null
        };
        let doc = json!({
            "version": output::SCHEMA_VERSION,
            "command": cli.command.name(),
            "alphabet": interpretation_value(&alphabet.to_interpretation()),
            "inputs": Value::Object(ctx.inputs),
            "result": report.result,
            "witness": report.witness,
            "method": report.method,
            "timings": timings,
        });
        let mut text = serde_json::to_string_pretty(&doc)
            .map_err(|e| Failure {
                code: EXIT_INTERNAL,
                message: e.to_string(),
            })?;
        text.push('\n');
        text
    } else {
        report.text
    };
    out.write_all(rendered.as_bytes())
        .map_err(|e| Failure {
            code: EXIT_INTERNAL,
            message: format!("writing output: {e}"),
        })?;
    Ok(report.code)
}

fn dispatch(command: &Command, ctx: &mut Context) -> Result<Report, Failure> {
    Ok(match command {
        Command::Fmt { program } => Report::program(&ctx.program("p", program)?),
        Command::Compose { programs } => {
            let mut operands = Vec::with_capacity(programs.len());
            for (i, arg) in programs.iter().enumerate() {
                operands.push(ctx.program(&format!("p{}", i + 1), arg)?);
            }
            let mut it = operands.into_iter();
            let first = it.next().expect("at least two operands");
            Report::program(&it.fold(first, |acc, p| compose(&acc, &p)))
        }
        Command::Power { program, n } => {
            let p = ctx.program("p", program)?;
            Report::program(&power(&p, *n, &ctx.alphabet()?))
        }
        Command::Star { program } => {
            let p = ctx.program("p", program)?;
            Report::program(&star(&p, &ctx.alphabet()?)?)
        }
        Command::Plus { program } => {
            let p = ctx.program("p", program)?;
            Report::program(&plus(&p, &ctx.alphabet()?)?)
        }
        Command::Omega { program } => {
            let p = ctx.program("p", program)?;
            Report::interpretation(&omega(&p, &ctx.alphabet()?)?)
        }
        Command::Dual { program } => Report::program(&dual(&ctx.program("p", program)?)),
        Command::Facts { program } => Report::program(&split(&ctx.program("p", program)?).0),
        Command::Heads { program } => {
            let p = ctx.program("p", program)?;
            Report::interpretation(&heads_bodies(&p, &ctx.alphabet()?)?.0)
        }
        Command::Bodies { program } => {
            let p = ctx.program("p", program)?;
            Report::interpretation(&heads_bodies(&p, &ctx.alphabet()?)?.1)
        }
        Command::Unit { interpretation } => match interpretation {
            Some(arg) => Report::program(&partial_unit(&ctx.interpretation("i", arg)?)),
            None => Report::program(&unit(&ctx.alphabet()?)),
        },
        Command::Reduct { side, first, second } => match side {
            Side::Left => {
                let i = ctx.interpretation("i", first)?;
                let p = ctx.program("p", second)?;
                Report::program(&left_reduct(&i, &p))
            }
            Side::Right => {
                let p = ctx.program("p", first)?;
                let i = ctx.interpretation("i", second)?;
                Report::program(&right_reduct(&p, &i))
            }
        },
        Command::Ominus { interpretation, program } | Command::Oplus { interpretation, program } => {
            let i = ctx.interpretation("i", interpretation)?;
            let p = program.as_deref().map(|arg| ctx.program("p", arg)).transpose()?;
            let alphabet = ctx.alphabet()?;
            let gadget = if matches!(command, Command::Ominus { .. }) {
                build_ominus(&i, &alphabet)?
            } else {
                build_oplus(&i, &alphabet)?
            };
            Report::program(&match p {
                Some(p) => compose(&p, &gadget),
                None => gadget,
            })
        }
        Command::Lm { program } => {
            let p = ctx.program("p", program)?;
            let (model, trace) = least_model(&p, &ctx.alphabet()?)?;
            let mut text = format!("{model}\n");
            for (n, stage) in trace.stages.iter().enumerate() {
                text.push_str(&format!("T^{n} = {stage}\n"));
            }
            let result = json!({
                "model": interpretation_value(&model),
                "trace": trace.stages.iter().map(interpretation_value).collect::<Value>(),
                "converged_at": trace.converged_at,
            });
            Report::new(text, result)
        }
        Command::Tp { program, interpretation } => {
            let p = ctx.program("p", program)?;
            let i = ctx.interpretation("i", interpretation)?;
            Report::interpretation(&tp(&p, &i))
        }
        Command::Models { program, supported } => {
            let p = ctx.program("p", program)?;
            let kind = if *supported { ModelKind::Supported } else { ModelKind::All };
            let models = horn_algebra::enumerate_models(&p, &ctx.alphabet()?, kind, ctx.cap)?;
            let text = models.iter().map(|m| format!("{m}\n")).collect();
            Report::new(text, models.iter().map(interpretation_value).collect())
        }
        Command::SsEquiv { p, r } => {
            let p = ctx.program("p", p)?;
            let r = ctx.program("r", r)?;
            Report::verdict(subsumption_equivalent(&p, &r, &ctx.alphabet()?, ctx.cap)?)
        }
        Command::Le { relation, p, r } => {
            let p = ctx.program("p", p)?;
            let r = ctx.program("r", r)?;
            ctx.alphabet()?;
            let w = ctx.decide((*relation).into(), &p, &r)?;
            let mut report = Report::new(witness_text(&w), json!(w.decision.to_string()));
            report.method = json!(w.method.to_string());
            report.witness = witness_value(&w);
            report.code = exit_for(w.decision);
            report
        }
        Command::Equiv { kind, p, r } => {
            let p = ctx.program("p", p)?;
            let r = ctx.program("r", r)?;
            let alphabet = ctx.alphabet()?;
            match kind {
                EquivArg::L | EquivArg::R | EquivArg::J => {
                    let relation = match kind {
                        EquivArg::L => Relation::L,
                        EquivArg::R => Relation::R,
                        _ => Relation::J,
                    };
                    equiv_green(ctx, relation, &p, &r)?
                }
                EquivArg::Ss => Report::verdict(subsumption_equivalent(&p, &r, &alphabet, ctx.cap)?),
                EquivArg::Lm => {
                    let (mp, _) = least_model(&p, &alphabet)?;
                    let (mr, _) = least_model(&r, &alphabet)?;
                    Report::verdict(mp == mr)
                }
            }
        }
        Command::Classes {
            relation,
            programs,
            enumerate,
            dot,
        } => {
            let relation = Relation::from(*relation);
            let list = match programs {
                Some(arg) => {
                    let list = input::program_list(arg)?;
                    for (i, p) in list.iter().enumerate() {
                        ctx.inputs.insert(format!("p{}", i + 1), program_value(p));
                        ctx.programs.push(p.clone());
                    }
                    list
                }
                None => Vec::new(),
            };
            let alphabet = ctx.alphabet()?;
            let report = if *enumerate {
                let space = horn_algebra::ProgramSpace::new(&alphabet)?;
                if alphabet.len() > horn_algebra::ORACLE_MAX_ATOMS {
                    return Err(Error::OracleBound {
                        size: alphabet.len(),
                        max: horn_algebra::ORACLE_MAX_ATOMS,
                    }
                    .into());
                }
                let all: Vec<Program> = space.programs().collect();
                green_partition_exact(&all, relation, &alphabet)?
            } else if ctx.oracle {
                green_partition_exact(&list, relation, &alphabet)?
            } else {
                green_partition(&list, relation, &ctx.options)?
            };
            let text = if *dot {
                report.to_dot()
            } else {
                output::classes_text(&report)
            };
            Report::new(text, output::classes_value(&report))
        }
        Command::Nonassoc => {
            let alphabet = match &ctx.explicit {
                Some(a) => a.clone(),
                None => "a, b".parse().map_err(Failure::from)?,
            };
            if alphabet.len() < 2 {
                return Err(Failure::usage("nonassoc needs an alphabet of at least two atoms".into()));
            }
            match find_nonassociative_triple(&alphabet)? {
                Some((p, q, r)) => {
                    let left = compose(&compose(&p, &q), &r);
                    let right = compose(&p, &compose(&q, &r));
                    let line = |label: &str, x: &Program| format!("{label}: {}\n", output::inline(x));
                    let text = [
                        line("p", &p),
                        line("q", &q),
                        line("r", &r),
                        line("(pq)r", &left),
                        line("p(qr)", &right),
                    ]
                    .concat();
                    let result = json!({
                        "p": program_value(&p),
                        "q": program_value(&q),
                        "r": program_value(&r),
                        "left": program_value(&left),
                        "right": program_value(&right),
                    });
                    Report::new(text.replace(": \n", ":\n"), result)
                }
                None => {
                    let mut report = Report::new("none found\n".into(), Value::Null);
                    report.code = EXIT_FAILS;
                    report
                }
            }
        }
    })
}

fn exit_for(decision: Decision) -> u8 {
    match decision {
        Decision::Holds => EXIT_OK,
        Decision::Fails => EXIT_FAILS,
        Decision::Undecided => EXIT_BOUND,
    }
}

fn equiv_green(ctx: &Context, relation: Relation, p: &Program, r: &Program) -> Result<Report, Failure> {
    let forward = ctx.decide(relation, p, r)?;
    let backward = if forward.decision == Decision::Fails {
        None
    } else {
        Some(ctx.decide(relation, r, p)?)
    };
    let decision = match (forward.decision, backward.as_ref().map(|w| w.decision)) {
        (Decision::Fails, _) | (_, Some(Decision::Fails)) => Decision::Fails,
        (Decision::Holds, Some(Decision::Holds)) => Decision::Holds,
        _ => Decision::Undecided,
    };
    let indent = |w: &GreenWitness| -> String {
        witness_text(w)
            .lines()
            .skip(1)
            .map(|l| format!("  {l}\n"))
            .collect()
    };
    let mut text = format!("{decision}\nforward: {}\n{}", forward.decision, indent(&forward));
    if let Some(w) = &backward {
        text.push_str(&format!("backward: {}\n{}", w.decision, indent(w)));
    }
    let mut report = Report::new(text, json!(decision.to_string()));
    report.witness = json!({
        "forward": witness_value(&forward),
        "backward": backward.as_ref().map(witness_value),
    });
    report.code = exit_for(decision);
    Ok(report)
}
