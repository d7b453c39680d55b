//! The `.cirq` cirquent block format.
//!
//! ```text
//! cirquent example
//!   node 1 gate or
//!   node 2 port P
//!   node 3 port ~P
//!   edge 1 2
//!   edge 1 3
//!   root 1
//! end
//! ```
//!
//! Tokens are whitespace separated, `#` starts a comment, and the order of
//! `node`/`edge` lines inside a block does not matter.

use std::fmt::Write as _;

use crate::cirquent::{Cirquent, GateKind, GraphData, Label, Literal};
use crate::formats::{tokenize, FormatError};

/// One named block and the line its `cirquent` header appeared on.
#[derive(Debug, Clone)]
pub struct Block {
    pub name: String,
    pub cirquent: Cirquent,
    pub line: usize,
}

/// Parses every `cirquent … end` block in the text.
pub fn parse_blocks(text: &str) -> Result<Vec<Block>, FormatError> {
    let mut blocks = Vec::new();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    while let Some((line_no, line)) = lines.next() {
        let tokens = tokenize(line);
        if tokens.is_empty() {
            continue;
        }
        if tokens[0] != "cirquent" {
            return Err(FormatError::syntax(
                line_no,
                format!("expected `cirquent <name>`, found `{}`", tokens[0]),
            ));
        }
        if tokens.len() != 2 {
            return Err(FormatError::syntax(line_no, "expected `cirquent <name>`"));
        }
        let name = tokens[1].to_string();
        let body = parse_block_body(&name, line_no, &mut lines)?;
        blocks.push(Block { name, cirquent: body, line: line_no });
    }
    Ok(blocks)
}

/// Parses a file expected to hold exactly one cirquent.
pub fn parse_single(text: &str) -> Result<Block, FormatError> {
    let mut blocks = parse_blocks(text)?;
    match blocks.len() {
        1 => Ok(blocks.remove(0)),
        0 => Err(FormatError::syntax(0, "no cirquent block found")),
        n => Err(FormatError::syntax(
            blocks[1].line,
            format!("expected one cirquent block, found {n}"),
        )),
    }
}

/// Consumes lines up to the matching `end`, building the graph.
pub(crate) fn parse_block_body<'a>(
    name: &str,
    header_line: usize,
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
) -> Result<Cirquent, FormatError> {
    let mut data = GraphData::new();
    let mut root: Option<(usize, String)> = None;
    for (line_no, line) in lines {
        let tokens = tokenize(line);
        match tokens.as_slice() {
            [] => continue,
            ["end"] => {
                let (root_line, root) = root.ok_or_else(|| {
                    FormatError::syntax(line_no, format!("cirquent {name} has no root line"))
                })?;
                return data.validate(&root).map_err(|violations| {
                    let detail = violations
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join("; ");
                    let _ = root_line;
                    FormatError::BadGraph { name: name.to_string(), detail }
                });
            }
            ["node", node, "port", lit] => {
                let lit = Literal::parse(lit).ok_or_else(|| {
                    FormatError::syntax(line_no, format!("bad literal `{lit}`"))
                })?;
                check_fresh_node(&data, node, line_no)?;
                data.add_node(*node, Label::Port(lit));
            }
            ["node", node, "gate", kind] => {
                let kind = GateKind::parse(kind).ok_or_else(|| {
                    FormatError::syntax(line_no, format!("bad gate kind `{kind}`"))
                })?;
                check_fresh_node(&data, node, line_no)?;
                data.add_node(*node, Label::Gate(kind));
            }
            ["edge", parent, child] => {
                data.add_edge(*parent, *child);
            }
            ["root", node] => {
                if root.is_some() {
                    return Err(FormatError::syntax(line_no, "duplicate root line"));
                }
                root = Some((line_no, node.to_string()));
            }
            _ => {
                return Err(FormatError::syntax(
                    line_no,
                    format!("unrecognized directive `{}`", line.trim()),
                ));
            }
        }
    }
    Err(FormatError::syntax(
        header_line,
        format!("cirquent {name} is missing its `end` line"),
    ))
}

fn check_fresh_node(data: &GraphData, node: &str, line_no: usize) -> Result<(), FormatError> {
    if data.labels.contains_key(node) {
        return Err(FormatError::syntax(line_no, format!("node `{node}` declared twice")));
    }
    Ok(())
}

/// Renders one block; node and edge lines come out sorted, so output is a
/// deterministic function of the cirquent.
pub fn render_block(name: &str, c: &Cirquent) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "cirquent {name}");
    for (node, label) in c.nodes() {
        match label {
            Label::Port(lit) => {
                let _ = writeln!(out, "  node {node} port {lit}");
            }
            Label::Gate(kind) => {
                let _ = writeln!(out, "  node {node} gate {}", kind.keyword());
            }
        }
    }
    for (parent, child) in c.edges() {
        let _ = writeln!(out, "  edge {parent} {child}");
    }
    let _ = writeln!(out, "  root {}", c.root());
    let _ = writeln!(out, "end");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "\
# a two-port axiom-adjacent block
cirquent tiny
  node 1 gate or
  node 2 port P
  node 3 port ~P
  edge 1 2
  edge 1 3
  root 1
end
";

    #[test]
    fn parse_and_render_round_trip() {
        let block = parse_single(EXAMPLE).unwrap();
        assert_eq!(block.name, "tiny");
        assert_eq!(block.cirquent.node_count(), 3);
        let rendered = render_block(&block.name, &block.cirquent);
        let again = parse_single(&rendered).unwrap();
        assert_eq!(block.cirquent, again.cirquent);
        assert_eq!(rendered, render_block(&again.name, &again.cirquent));
    }

    #[test]
    fn comments_do_not_eat_hash_names() {
        let text = "\
cirquent fresh
  node a#1 gate and   # trailing note
  root a#1
end
";
        let block = parse_single(text).unwrap();
        assert!(block.cirquent.has_node("a#1"));
        assert!(block.cirquent.is_axiom());
    }

    #[test]
    fn order_of_lines_is_irrelevant() {
        let shuffled = "\
cirquent tiny
  edge 1 3
  root 1
  node 3 port ~P
  edge 1 2
  node 2 port P
  node 1 gate or
end
";
        let a = parse_single(EXAMPLE).unwrap();
        let b = parse_single(shuffled).unwrap();
        assert_eq!(a.cirquent, b.cirquent);
    }

    #[test]
    fn missing_end_is_reported_at_header() {
        let err = parse_single("cirquent broken\n  root r\n").unwrap_err();
        assert_eq!(err, FormatError::syntax(1, "cirquent broken is missing its `end` line"));
    }

    #[test]
    fn dangling_edge_is_a_graph_error() {
        let text = "\
cirquent bad
  node 1 gate or
  edge 1 9
  root 1
end
";
        match parse_single(text).unwrap_err() {
            FormatError::BadGraph { name, detail } => {
                assert_eq!(name, "bad");
                assert!(detail.contains("9"), "{detail}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn duplicate_node_rejected() {
        let text = "\
cirquent dup
  node 1 gate or
  node 1 gate and
  root 1
end
";
        assert!(matches!(parse_single(text), Err(FormatError::Syntax { line: 3, .. })));
    }

    #[test]
    fn multiple_blocks_parse_in_order() {
        let text = format!("{EXAMPLE}\ncirquent solo\n  node x gate and\n  root x\nend\n");
        let blocks = parse_blocks(&text).unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[1].name, "solo");
        assert!(blocks[1].cirquent.is_axiom());
    }
}
