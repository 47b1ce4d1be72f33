#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use ugd::{ParamVectorField, State, VectorField};

pub fn s(text: &str) -> State {
    text.parse().unwrap()
}

pub fn not() -> VectorField {
    VectorField::from_table(1, vec![1, 0]).unwrap()
}

pub fn const11() -> VectorField {
    VectorField::constant(s("11")).unwrap()
}

/// g(00)=11, g(01)=01, g(10)=10, g(11)=11.
pub fn race() -> VectorField {
    VectorField::from_table(2, vec![0b11, 0b01, 0b10, 0b11]).unwrap()
}

/// n = m = 1, f(w, v) = v.
pub fn buf() -> ParamVectorField {
    ParamVectorField::from_fn(1, 1, |z| z.v).unwrap()
}

/// Structural check of the DOT subset the emitter writes: one statement
/// per line, quoted ids, `key=value` attribute lists, balanced braces.
pub fn well_formed_dot(text: &str) -> bool {
    let lines: Vec<&str> = text.lines().collect();
    if lines.len() < 2 || !lines[0].starts_with("digraph ") || !lines[0].ends_with(" {") {
        return false;
    }
    if lines.last() != Some(&"}") || !text.ends_with('\n') {
        return false;
    }
    let quoted = |s: &str| s.len() >= 2 && s.starts_with('"') && s.ends_with('"') && !s[1..s.len() - 1].contains('"');
    lines[1..lines.len() - 1].iter().all(|line| {
        let Some(stmt) = line.trim_start().strip_suffix(';') else {
            return false;
        };
        if let Some((a, b)) = stmt.split_once(" -> ") {
            return quoted(a) && quoted(b);
        }
        let Some((id, rest)) = stmt.split_once(" [") else {
            return false;
        };
        let Some(attrs) = rest.strip_suffix(']') else {
            return false;
        };
        quoted(id)
            && attrs.split(", ").all(|kv| {
                kv.split_once('=')
                    .is_some_and(|(k, v)| !k.is_empty() && k.chars().all(|c| c.is_ascii_alphabetic()) && !v.is_empty())
            })
    })
}

pub fn write_model(dir: &Path, name: &str, json: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, json).unwrap();
    path
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn ugd(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_ugd")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub const NOT_JSON: &str = r#"{"n":1,"m":0,"table":{"0":"1","1":"0"}}"#;
pub const RACE_JSON: &str = r#"{"n":2,"table":{"00":"11","01":"01","10":"10","11":"11"}}"#;
pub const BUF_JSON: &str = r#"{"n":1,"m":1,"coords":["v1"]}"#;
