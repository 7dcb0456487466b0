//! Resolving command-line operands to programs and interpretations.
//!
//! An operand is read from a file when it starts with `@` or names an
//! existing file, and is parsed inline otherwise.

use std::fs;
use std::path::Path;

use horn_algebra::{Interpretation, Program};

use crate::app::Failure;

pub fn text(arg: &str) -> Result<String, Failure> {
    let path = match arg.strip_prefix('@') {
        Some(path) => Some(path),
        None if Path::new(arg).is_file() => Some(arg),
        None => None,
    };
    match path {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read `{path}`: {e}"))),
        None => Ok(arg.to_string()),
    }
}

pub fn program(arg: &str) -> Result<Program, Failure> {
    let source = text(arg)?;
    source.parse().map_err(|e| Failure::usage(format!("in program `{arg}`: {e}")))
}

pub fn interpretation(arg: &str) -> Result<Interpretation, Failure> {
    let source = text(arg)?;
    source
        .parse()
        .map_err(|e| Failure::usage(format!("in interpretation `{arg}`: {e}")))
}

/// Programs separated by lines consisting of `---`.
pub fn program_list(arg: &str) -> Result<Vec<Program>, Failure> {
    let source = text(arg)?;
    let mut chunks = vec![String::new()];
    for line in source.lines() {
        if line.trim() == "---" {
            chunks.push(String::new());
        } else {
            let current = chunks.last_mut().expect("non-empty");
            current.push_str(line);
            current.push('\n');
        }
    }
    chunks
        .iter()
        .enumerate()
        .map(|(i, chunk)| {
            chunk
                .parse()
                .map_err(|e| Failure::usage(format!("in program #{} of `{arg}`: {e}", i + 1)))
        })
        .collect()
}
