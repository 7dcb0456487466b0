//! Text and structured renderings of results.

use horn_algebra::{ClassReport, GreenWitness, Interpretation, Program};
use serde_json::{json, Value};

/// Version of the structured output document.
pub const SCHEMA_VERSION: u64 = 1;

pub fn program_value(p: &Program) -> Value {
    Value::String(p.render())
}

pub fn interpretation_value(i: &Interpretation) -> Value {
    Value::Array(i.iter().map(|a| Value::String(a.name().to_string())).collect())
}

/// A program on one line, as accepted back on the command line.
pub fn inline(p: &Program) -> String {
    p.render_inline()
}

pub fn program_text(p: &Program) -> String {
    if p.is_empty() {
        String::new()
    } else {
        format!("{}\n", p.render())
    }
}

fn labelled(label: &str, p: &Program) -> String {
    let body = inline(p);
    if body.is_empty() {
        format!("{label}:\n")
    } else {
        format!("{label}: {body}\n")
    }
}

pub fn witness_text(w: &GreenWitness) -> String {
    let mut out = format!("{}\nmethod: {}\n", w.decision, w.method);
    if let Some(q) = &w.prefix {
        out.push_str(&labelled("prefix", q));
    }
    if let Some(s) = &w.suffix {
        out.push_str(&labelled("suffix", s));
    }
    out
}

pub fn witness_value(w: &GreenWitness) -> Value {
    json!({
        "relation": w.relation.to_string(),
        "decision": w.decision.to_string(),
        "holds": w.holds(),
        "prefix": w.prefix.as_ref().map(program_value),
        "suffix": w.suffix.as_ref().map(program_value),
        "method": w.method.to_string(),
    })
}

pub fn classes_text(report: &ClassReport) -> String {
    let mut out = format!("relation: {}\nclasses: {}\n", report.relation, report.classes.len());
    for (i, class) in report.classes.iter().enumerate() {
        let members: Vec<String> = class.iter().map(|p| format!("{{{}}}", inline(p))).collect();
        out.push_str(&format!("class {i}: {}\n", members.join(" | ")));
    }
    for (i, j) in &report.order_edges {
        out.push_str(&format!("order: {i} < {j}\n"));
    }
    out
}

pub fn classes_value(report: &ClassReport) -> Value {
    let pairs = |edges: &std::collections::BTreeSet<(usize, usize)>| -> Value {
        edges.iter().map(|&(i, j)| json!([i, j])).collect()
    };
    json!({
        "relation": report.relation.to_string(),
        "classes": report
            .classes
            .iter()
            .map(|class| class.iter().map(program_value).collect::<Value>())
            .collect::<Value>(),
        "order_edges": pairs(&report.order_edges),
        "hasse_edges": pairs(&report.hasse_edges()),
        "closure_gaps": report.closure_gaps,
    })
}
