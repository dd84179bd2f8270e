//! Loading groups and graphs from command-line arguments.

use std::path::Path;

use coxric::group::{ElementId, Group, IDENTITY};
use coxric::{parse_input, CoxeterMatrix, Graph};

use crate::output::Failure;

/// Groups above this order need `--force` for anything but `group` and
/// `export`.
pub const GROUP_SIZE_GUARD: usize = 1500;

pub enum Subject {
    Coxeter {
        spec: String,
        group: Box<Group>,
        graph: Graph,
    },
    Plain {
        path: String,
        graph: Graph,
    },
}

impl Subject {
    pub fn graph(&self) -> &Graph {
        match self {
            Subject::Coxeter { graph, .. } | Subject::Plain { graph, .. } => graph,
        }
    }

    pub fn group(&self) -> Option<&Group> {
        match self {
            Subject::Coxeter { group, .. } => Some(group),
            Subject::Plain { .. } => None,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Subject::Coxeter { spec, .. } => spec,
            Subject::Plain { path, .. } => path,
        }
    }

    /// Element label for groups, decimal id for plain graphs.
    pub fn label(&self, v: usize) -> String {
        match self {
            Subject::Coxeter { group, .. } => group.label(v),
            Subject::Plain { graph, .. } => match graph.labels() {
                Some(l) => l[v].clone(),
                None => v.to_string(),
            },
        }
    }

    /// Accepts `e`, `s1s3...` words (groups only), or a vertex id.
    pub fn parse_vertex(&self, text: &str) -> Result<usize, Failure> {
        let n = self.graph().num_vertices();
        if let Ok(v) = text.parse::<usize>() {
            return if v < n {
                Ok(v)
            } else {
                Err(Failure::usage(format!(
                    "vertex {v} out of range (graph has {n} vertices)"
                )))
            };
        }
        if let Some(labels) = self.graph().labels() {
            if let Some(v) = labels.iter().position(|l| l == text) {
                return Ok(v);
            }
        }
        match self {
            Subject::Coxeter { group, .. } => parse_word(group, text),
            Subject::Plain { .. } => Err(Failure::usage(format!("unknown vertex `{text}`"))),
        }
    }
}

fn parse_word(grp: &Group, text: &str) -> Result<ElementId, Failure> {
    if text == "e" {
        return Ok(IDENTITY);
    }
    let bad = || {
        Failure::usage(format!(
            "`{text}` is not `e`, a vertex id, or a word like s1s2"
        ))
    };
    let mut w = IDENTITY;
    for part in text.split('s').skip(1) {
        let i: usize = part.parse().map_err(|_| bad())?;
        if i == 0 || i > grp.rank() {
            return Err(Failure::usage(format!(
                "generator s{i} out of range for rank {}",
                grp.rank()
            )));
        }
        w = grp.mult(w, grp.simple()[i - 1]);
    }
    if !text.starts_with('s') {
        return Err(bad());
    }
    Ok(w)
}

pub fn load_group(spec: &str) -> Result<(CoxeterMatrix, Group), Failure> {
    let matrix = parse_input(spec)?;
    let group = Group::from_matrix(&matrix)?;
    Ok((matrix, group))
}

/// Resolves the positional spec or `--graph` file; applies the size guard.
pub fn load_subject(
    spec: Option<&str>,
    graph: Option<&Path>,
    force: bool,
) -> Result<Subject, Failure> {
    match (spec, graph) {
        (Some(_), Some(_)) => Err(Failure::usage(
            "give either a type spec or --graph, not both",
        )),
        (None, None) => Err(Failure::usage("missing type spec or --graph <file>")),
        (None, Some(path)) => Ok(Subject::Plain {
            path: path.display().to_string(),
            graph: Graph::from_file(path)?,
        }),
        (Some(spec), None) => {
            let (_, group) = load_group(spec)?;
            guard(group.order(), force)?;
            let graph = group.bruhat_graph();
            Ok(Subject::Coxeter {
                spec: spec.to_string(),
                group: Box::new(group),
                graph,
            })
        }
    }
}

pub fn guard(order: usize, force: bool) -> Result<(), Failure> {
    if order > GROUP_SIZE_GUARD && !force {
        return Err(Failure::usage(format!(
            "group has {order} elements (limit {GROUP_SIZE_GUARD}); pass --force to proceed"
        )));
    }
    Ok(())
}
