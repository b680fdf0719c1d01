//! Goal/subgoal/task outlines.
//!
//! ```text
//! goal: Study protein function
//!   subgoal: Characterize protein domains
//!     task: [T1] Analyze domains in protein sequences
//!   task: Find related structures
//! ```
//!
//! Nesting follows indentation. A task without an explicit `[id]` gets
//! `T<n>`, where `n` is its 1-based position in the file.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskRequirement {
    pub id: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Goal {
    pub name: String,
    pub subgoals: Vec<Goal>,
    pub tasks: Vec<TaskRequirement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RequirementsModel {
    pub goals: Vec<Goal>,
}

enum Line<'a> {
    Goal(&'a str),
    Subgoal(&'a str),
    Task(Option<&'a str>, &'a str),
}

fn classify(body: &str, line: usize) -> Result<Line<'_>> {
    let err = |message: String| Error::Requirements { line, message };
    let (kind, rest) = body.split_once(':').ok_or_else(|| err(format!("expected goal:, subgoal: or task:, got {body:?}")))?;
    let rest = rest.trim();
    match kind.trim() {
        "goal" | "subgoal" if rest.is_empty() => Err(err(format!("{} without a name", kind.trim()))),
        "goal" => Ok(Line::Goal(rest)),
        "subgoal" => Ok(Line::Subgoal(rest)),
        "task" => {
            let (id, desc) = match rest.strip_prefix('[').and_then(|r| r.split_once(']')) {
                Some((id, desc)) => (Some(id.trim()), desc.trim()),
                None => (None, rest),
            };
            if id == Some("") {
                return Err(err("empty task id".into()));
            }
            if desc.is_empty() {
                return Err(err("task without a description".into()));
            }
            Ok(Line::Task(id, desc))
        }
        other => Err(err(format!("unknown entry kind {other:?}"))),
    }
}

impl RequirementsModel {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut model = RequirementsModel::default();
        // indents of the open goal chain: stack[0] is the current goal,
        // stack[1..] its nested subgoals
        let mut stack: Vec<usize> = Vec::new();
        let mut ids = HashSet::new();
        let mut task_no = 0usize;

        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let indent = raw.len() - raw.trim_start().len();
            match classify(body, lineno)? {
                Line::Goal(name) => {
                    stack.clear();
                    stack.push(indent);
                    model.goals.push(Goal { name: name.to_owned(), ..Goal::default() });
                }
                Line::Subgoal(name) => {
                    let depth = open_depth(&stack, indent).ok_or_else(|| Error::Requirements {
                        line: lineno,
                        message: "subgoal outside any goal".into(),
                    })?;
                    stack.truncate(depth);
                    let parent = goal_at(&mut model, depth);
                    parent.subgoals.push(Goal { name: name.to_owned(), ..Goal::default() });
                    stack.push(indent);
                }
                Line::Task(id, desc) => {
                    task_no += 1;
                    let depth = open_depth(&stack, indent).ok_or_else(|| Error::Requirements {
                        line: lineno,
                        message: "task outside any goal".into(),
                    })?;
                    stack.truncate(depth);
                    let id = id.map_or_else(|| format!("T{task_no}"), str::to_owned);
                    if !ids.insert(id.clone()) {
                        return Err(Error::Requirements { line: lineno, message: format!("duplicate task id {id:?}") });
                    }
                    goal_at(&mut model, depth).tasks.push(TaskRequirement { id, description: desc.to_owned() });
                }
            }
        }
        if model.goals.is_empty() {
            log::warn!("requirements model has no goals");
        }
        Ok(model)
    }

    /// All tasks, goal by goal: a goal's own tasks, then its subgoals depth first.
    pub fn tasks(&self) -> Vec<&TaskRequirement> {
        fn walk<'a>(g: &'a Goal, out: &mut Vec<&'a TaskRequirement>) {
            out.extend(&g.tasks);
            for s in &g.subgoals {
                walk(s, out);
            }
        }
        let mut out = Vec::new();
        for g in &self.goals {
            walk(g, &mut out);
        }
        out
    }

    pub fn to_outline(&self) -> String {
        fn write_goal(g: &Goal, depth: usize, keyword: &str, out: &mut String) {
            let pad = "  ".repeat(depth);
            let _ = writeln!(out, "{pad}{keyword}: {}", g.name);
            for t in &g.tasks {
                let _ = writeln!(out, "{pad}  task: [{}] {}", t.id, t.description);
            }
            for s in &g.subgoals {
                write_goal(s, depth + 1, "subgoal", out);
            }
        }
        let mut out = String::new();
        for g in &self.goals {
            write_goal(g, 0, "goal", &mut out);
        }
        out
    }
}

/// Number of open levels that enclose a line at `indent`, or None if the
/// line is not inside any goal.
fn open_depth(stack: &[usize], indent: usize) -> Option<usize> {
    let depth = stack.iter().take_while(|&&i| i < indent).count();
    (depth > 0).then_some(depth)
}

/// The innermost goal of the first `depth` open levels of the last goal.
fn goal_at(model: &mut RequirementsModel, depth: usize) -> &mut Goal {
    let mut g = model.goals.last_mut().expect("open goal");
    for _ in 1..depth {
        g = g.subgoals.last_mut().expect("open subgoal");
    }
    g
}
