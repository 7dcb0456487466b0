use std::process::{Command, Output};

fn horn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_horn")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn le_reports_prefix() {
    let out = horn(&["le", "l", "a :- a.", "a :- b. b :- a."]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "holds\nmethod: canonical\nprefix: a :- b.\n");
}

#[test]
fn le_failure_exits_one() {
    let out = horn(&["le", "r", "a :- b. b :- a.", "a :- b. b :- b."]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("fails\n"));
}

#[test]
fn algebra_verbs() {
    assert_eq!(stdout(&horn(&["omega", "a. b :- a."])), "{a, b}\n");
    assert_eq!(stdout(&horn(&["compose", "a :- b, c.", "b. c."])), "a.\n");
    assert_eq!(stdout(&horn(&["fmt", "b :- c, a. a."])), "a.\nb :- a, c.\n");
    assert_eq!(stdout(&horn(&["unit", "--alphabet", "a,b"])), "a :- a.\nb :- b.\n");
    assert_eq!(stdout(&horn(&["reduct", "left", "{a}", "a :- b. b :- a."])), "a :- b.\n");
    assert_eq!(stdout(&horn(&["reduct", "right", "a :- b. b :- a.", "{a}"])), "b :- a.\n");
    assert_eq!(
        stdout(&horn(&["ominus", "{c}", "a :- b, c. b :- a, c.", "--alphabet", "a,b,c"])),
        "a :- b.\nb :- a.\n"
    );
    assert_eq!(stdout(&horn(&["oplus", "{b}", "a. b :- a."])), "a.\nb :- a, b.\n");
    assert_eq!(stdout(&horn(&["tp", "a :- b.", "{b}"])), "{a}\n");
    assert_eq!(stdout(&horn(&["lm", "a. b :- a."])), "{a, b}\nT^0 = {}\nT^1 = {a}\nT^2 = {a, b}\n");
}

#[test]
fn equivalences() {
    assert_eq!(horn(&["equiv", "j", "a. b :- a.", "a. b :- a, b."]).status.code(), Some(0));
    assert_eq!(horn(&["equiv", "lm", "a. b :- a.", "a. b :- a, b."]).status.code(), Some(1));
    assert_eq!(horn(&["ss-equiv", "a :- b. a :- b, c.", "a :- b."]).status.code(), Some(0));
}

#[test]
fn json_document() {
    let out = horn(&["le", "r", "a :- b. b :- b.", "a :- b. b :- a.", "--json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["version"], 1);
    assert_eq!(doc["command"], "le");
    assert_eq!(doc["result"], "holds");
    assert_eq!(doc["alphabet"], serde_json::json!(["a", "b"]));
    assert!(doc["witness"]["suffix"].is_string());
    assert!(doc["timings"].is_null());
}

#[test]
fn classes_of_one_atom() {
    let out = horn(&["classes", "--relation", "j", "--enumerate", "--alphabet", "a"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("class 0: {} | {a.}\n"), "{text}");
    let dot = stdout(&horn(&["classes", "--relation", "l", "--enumerate", "--alphabet", "a", "--dot"]));
    assert!(dot.starts_with("digraph L {"));
}

#[test]
fn classes_from_file() {
    let dir = std::env::temp_dir().join(format!("horn-cli-classes-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("interps.lp");
    std::fs::write(&file, "\n---\na.\n---\nb.\n---\na. b.\n").unwrap();
    let out = horn(&["classes", "--relation", "r", "--programs", file.to_str().unwrap()]);
    assert!(stdout(&out).starts_with("relation: R\nclasses: 4\n"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn error_exit_codes() {
    assert_eq!(horn(&["fmt", "a :-"]).status.code(), Some(2));
    assert_eq!(horn(&["fmt", "b.", "--alphabet", "a"]).status.code(), Some(2));
    assert_eq!(horn(&["bogus"]).status.code(), Some(2));
    assert_eq!(horn(&["le", "l", "a.", "b.", "--oracle", "--alphabet", "a,b,c"]).status.code(), Some(3));
    assert_eq!(horn(&["models", "a.", "--alphabet", "a,b,c", "--cap", "2"]).status.code(), Some(3));
}

#[test]
fn nonassoc_triple() {
    let out = horn(&["nonassoc"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_ne!(lines[3].split_once(": ").map(|x| x.1), lines[4].split_once(": ").map(|x| x.1));
}
