//! Sequential composition of propositional Horn programs.
//!
//! Programs over a finite alphabet, composed by resolving the body atoms of
//! one program against the rule heads of another, form a non-associative
//! algebra with the unit program `1_A` as identity. This crate implements
//! that algebra together with the usual fixpoint semantics, and decides
//! Green's preorders `≤_L`, `≤_R`, `≤_J` on programs, returning prefix and
//! suffix programs that witness each positive answer.
//!
//! ```
//! use horn_algebra::{compose, Program};
//!
//! let p: Program = "a :- b, c.".parse().unwrap();
//! let r: Program = "b. c.".parse().unwrap();
//! assert_eq!(compose(&p, &r).render(), "a.");
//! ```

mod choice;

pub mod algebra;
pub mod error;
pub mod green;
pub mod oracle;
pub mod semantics;
pub mod syntax;

pub use algebra::{
    build_ominus, build_oplus, compose, dual, heads_bodies, left_reduct, omega, partial_unit, plus,
    power, power_trace, right_reduct, split, star, unit, PowerTrace,
};
pub use error::{Error, Result};
pub use green::{
    canonical_prefix, cross_check, equiv, find_nonassociative_triple, green_partition,
    green_partition_exact, le, le_j, le_l, le_r, ClassReport, CrossCheck, Decision, DecideOptions,
    Discrepancy, Equivalence, GreenWitness, Method, Relation,
};
pub use oracle::{oracle_le, oracle_witness, OracleTable, ProgramSpace, ORACLE_MAX_ATOMS};
pub use semantics::{
    entails, enumerate_models, is_model, least_model, subsumption_equivalent, tp, FixpointTrace,
    ModelKind, Satisfiable, DEFAULT_SWEEP_CAP,
};
pub use syntax::{infer_alphabet, parse_program, render_program, Alphabet, Atom, Interpretation, Program, Rule};
