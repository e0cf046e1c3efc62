//! Line-oriented tree and environment file formats.
//!
//! Tree: `<id> <kind> <parent|-> [loss]` per line, kind in `I`/`A`/`L`, root first,
//! parents before children, `#` starts a comment.
//!
//! Environments: one trial per line, whitespace-separated `action=child` pairs
//! covering every action.

use std::fmt::Write as _;

use super::{Environment, GameTree, Node, NodeId, NodeKind};
use crate::error::{Error, Result};

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_tree(text: &str) -> Result<GameTree> {
    let mut slots: Vec<Option<Node>> = Vec::new();
    let mut order: Vec<NodeId> = Vec::new();
    let mut root = None;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() < 3 || toks.len() > 4 {
            return Err(parse_err(
                line_no,
                "malformed line: expected `<id> <kind> <parent|-> [loss]`",
            ));
        }
        let id: u32 = toks[0]
            .parse()
            .map_err(|_| parse_err(line_no, format!("malformed id `{}`", toks[0])))?;
        let kind = match (toks[1], toks.get(3)) {
            ("I", None) => NodeKind::Infoset,
            ("A", None) => NodeKind::Action,
            ("L", Some(lit)) => {
                let loss: f64 = lit
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("malformed loss `{lit}`")))?;
                if !(0.0..=1.0).contains(&loss) {
                    return Err(Error::LossOutOfRange {
                        line: line_no,
                        value: loss,
                    });
                }
                NodeKind::Leaf { loss }
            }
            ("L", None) => return Err(parse_err(line_no, "leaf line missing loss")),
            ("I" | "A", Some(_)) => return Err(parse_err(line_no, "loss only allowed on L lines")),
            (other, _) => return Err(parse_err(line_no, format!("unknown kind tag `{other}`"))),
        };
        let nid = NodeId(id);
        let parent = if toks[2] == "-" {
            if root.is_some() {
                return Err(parse_err(line_no, "multiple root lines"));
            }
            root = Some(nid);
            None
        } else {
            if root.is_none() {
                return Err(parse_err(line_no, "root line must come first"));
            }
            let p: u32 = toks[2]
                .parse()
                .map_err(|_| parse_err(line_no, format!("malformed parent `{}`", toks[2])))?;
            match slots.get(p as usize) {
                Some(Some(_)) => Some(NodeId(p)),
                _ => {
                    return Err(parse_err(
                        line_no,
                        format!("parent-before-child violation: parent {p} not yet defined"),
                    ))
                }
            }
        };
        if slots.len() <= id as usize {
            slots.resize(id as usize + 1, None);
        }
        if slots[id as usize].is_some() {
            return Err(parse_err(line_no, format!("duplicate id {id}")));
        }
        slots[id as usize] = Some(Node {
            kind,
            parent,
            children: Vec::new(),
        });
        if let Some(p) = parent {
            slots[p.index()].as_mut().unwrap().children.push(nid);
        }
        order.push(nid);
    }

    let root = root.ok_or(Error::NoRoot)?;
    let nodes = slots
        .into_iter()
        .enumerate()
        .map(|(i, n)| n.ok_or_else(|| parse_err(0, format!("node ids must be dense: id {i} missing"))))
        .collect::<Result<Vec<_>>>()?;
    GameTree::from_nodes(nodes, root)
}

/// Writes a tree in the file format, parents before children.
pub fn format_tree(tree: &GameTree) -> String {
    let mut out = String::new();
    for v in tree.bfs_order() {
        let parent = match tree.parent(v) {
            Some(p) => p.to_string(),
            None => "-".to_string(),
        };
        match tree.kind(v) {
            NodeKind::Leaf { loss } => writeln!(out, "{v} L {parent} {loss}"),
            k => writeln!(out, "{v} {} {parent}", k.tag()),
        }
        .unwrap();
    }
    out
}

pub fn parse_environments(tree: &GameTree, text: &str) -> Result<Vec<Environment>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let pairs = line
            .split_whitespace()
            .map(|tok| {
                let (a, c) = tok
                    .split_once('=')
                    .ok_or_else(|| parse_err(line_no, format!("expected action=child, got `{tok}`")))?;
                let a: u32 = a
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("malformed action id `{a}`")))?;
                let c: u32 = c
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("malformed child id `{c}`")))?;
                if a as usize >= tree.len() || c as usize >= tree.len() {
                    return Err(parse_err(line_no, format!("unknown node in `{tok}`")));
                }
                Ok((NodeId(a), NodeId(c)))
            })
            .collect::<Result<Vec<_>>>()?;
        let env = Environment::new(tree, pairs).map_err(|e| parse_err(line_no, e.to_string()))?;
        out.push(env);
    }
    Ok(out)
}

pub fn format_environments<'a>(envs: impl IntoIterator<Item = &'a Environment>) -> String {
    let mut out = String::new();
    for env in envs {
        let line: Vec<String> = env.iter().map(|(a, c)| format!("{a}={c}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}
