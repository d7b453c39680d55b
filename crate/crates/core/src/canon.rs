//! Canonical forms and isomorphism testing.
//!
//! Two cirquents are isomorphic when a bijection between their node names
//! preserves labels, arcs and the root. [`canonical_key`] produces a byte
//! string equal for exactly the isomorphic cirquents, by iterated
//! neighborhood color refinement with backtracking over residual symmetry.

use std::collections::{BTreeMap, BTreeSet};

use crate::cirquent::{Cirquent, Label};

/// Indexed view of a cirquent used by the refinement loop.
struct Indexed {
    labels: Vec<Label>,
    children: Vec<Vec<usize>>,
    parents: Vec<Vec<usize>>,
    root: usize,
    names: Vec<String>,
}

fn index(c: &Cirquent) -> Indexed {
    let names: Vec<String> = c.node_names().cloned().collect();
    let pos: BTreeMap<&str, usize> =
        names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let labels = names.iter().map(|n| c.label(n).unwrap().clone()).collect();
    let children = names
        .iter()
        .map(|n| c.children(n).iter().map(|k| pos[k.as_str()]).collect())
        .collect();
    let parents = names
        .iter()
        .map(|n| c.parents(n).iter().map(|k| pos[k.as_str()]).collect())
        .collect();
    Indexed { labels, children, parents, root: pos[c.root()], names }
}

/// Refines colors until stable: a node's new color is its old color plus the
/// sorted multisets of child and parent colors.
fn refine(g: &Indexed, colors: &mut Vec<u32>) {
    loop {
        let mut signatures: Vec<(u32, Vec<u32>, Vec<u32>)> = Vec::with_capacity(colors.len());
        for i in 0..colors.len() {
            let mut ch: Vec<u32> = g.children[i].iter().map(|&k| colors[k]).collect();
            let mut pa: Vec<u32> = g.parents[i].iter().map(|&k| colors[k]).collect();
            ch.sort_unstable();
            pa.sort_unstable();
            signatures.push((colors[i], ch, pa));
        }
        // Number the new colors by sorted signature order so that the
        // numbering, not just the partition, is name-independent.
        let mut distinct: Vec<&(u32, Vec<u32>, Vec<u32>)> = signatures.iter().collect();
        distinct.sort();
        distinct.dedup();
        let palette: BTreeMap<&(u32, Vec<u32>, Vec<u32>), u32> =
            distinct.into_iter().enumerate().map(|(c, s)| (s, c as u32)).collect();
        let new: Vec<u32> = signatures.iter().map(|s| palette[s]).collect();
        let stable = {
            // Same partition iff the color classes did not split.
            let mut classes = BTreeMap::new();
            let mut same = true;
            for i in 0..new.len() {
                match classes.get(&colors[i]) {
                    Some(&c) if c != new[i] => {
                        same = false;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        classes.insert(colors[i], new[i]);
                    }
                }
            }
            same && classes.len() == palette.len()
        };
        *colors = new;
        if stable {
            return;
        }
    }
}

fn initial_colors(g: &Indexed) -> Vec<u32> {
    let mut keys: Vec<(bool, &Label)> = Vec::with_capacity(g.labels.len());
    for (i, label) in g.labels.iter().enumerate() {
        keys.push((i == g.root, label));
    }
    let mut sorted: Vec<&(bool, &Label)> = keys.iter().collect();
    sorted.sort();
    sorted.dedup();
    let palette: BTreeMap<&(bool, &Label), u32> =
        sorted.into_iter().enumerate().map(|(c, k)| (k, c as u32)).collect();
    keys.iter().map(|k| palette[k]).collect()
}

/// Encodes the graph under a total node order as the candidate key.
fn encode(g: &Indexed, order: &[usize]) -> Vec<u8> {
    let rank: BTreeMap<usize, usize> = order.iter().enumerate().map(|(r, &i)| (i, r)).collect();
    let mut out = Vec::new();
    out.extend_from_slice(&(order.len() as u32).to_be_bytes());
    out.extend_from_slice(&(rank[&g.root] as u32).to_be_bytes());
    for &i in order {
        match &g.labels[i] {
            Label::Gate(k) => {
                out.push(b'g');
                out.push(*k as u8);
            }
            Label::Port(lit) => {
                out.push(b'p');
                out.push(lit.negated as u8);
                out.extend_from_slice(lit.atom.as_bytes());
                out.push(0);
            }
        }
        let mut kids: Vec<usize> = g.children[i].iter().map(|&k| rank[&k]).collect();
        kids.sort_unstable();
        out.push(b'[');
        for k in kids {
            out.extend_from_slice(&(k as u32).to_be_bytes());
        }
        out.push(b']');
    }
    out
}

/// Smallest key over all individualization choices within ambiguous classes.
fn canonize(g: &Indexed, colors: Vec<u32>, best: &mut Option<Vec<u8>>) {
    // Find the smallest color class with more than one member.
    let mut by_color: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, &c) in colors.iter().enumerate() {
        by_color.entry(c).or_default().push(i);
    }
    let ambiguous = by_color.values().find(|v| v.len() > 1);
    match ambiguous {
        None => {
            let mut order: Vec<usize> = (0..colors.len()).collect();
            order.sort_by_key(|&i| colors[i]);
            let key = encode(g, &order);
            if best.as_ref().map_or(true, |b| key < *b) {
                *best = Some(key);
            }
        }
        Some(class) => {
            let class = class.clone();
            let bump = colors.iter().max().copied().unwrap_or(0) + 1;
            for &pick in &class {
                let mut next = colors.clone();
                next[pick] = bump;
                refine(g, &mut next);
                canonize(g, next, best);
            }
        }
    }
}

/// A byte string equal between two cirquents iff they are isomorphic.
pub fn canonical_key(c: &Cirquent) -> Vec<u8> {
    if c.node_count() == 0 {
        return Vec::new();
    }
    let g = index(c);
    let mut colors = initial_colors(&g);
    refine(&g, &mut colors);
    let mut best = None;
    canonize(&g, colors, &mut best);
    best.unwrap()
}

/// Label-, arc- and root-preserving bijection test.
pub fn is_isomorphic(a: &Cirquent, b: &Cirquent) -> bool {
    canonical_key(a) == canonical_key(b)
}

/// The node renaming taking `a` to `b`, if they are isomorphic: a map whose
/// application to `a`'s nodes yields `b` exactly.
pub fn isomorphism(a: &Cirquent, b: &Cirquent) -> Option<BTreeMap<String, String>> {
    if a.node_count() != b.node_count() {
        return None;
    }
    let ga = index(a);
    let gb = index(b);
    let mut map: Vec<Option<usize>> = vec![None; ga.names.len()];
    let mut used: Vec<bool> = vec![false; gb.names.len()];
    if assign(&ga, &gb, ga.root, gb.root, &mut map, &mut used) && complete(&ga, &gb, &mut map, &mut used, 0)
    {
        let mut out = BTreeMap::new();
        for (i, j) in map.iter().enumerate() {
            out.insert(ga.names[i].clone(), gb.names[(*j)?].clone());
        }
        Some(out)
    } else {
        None
    }
}

/// Tentatively maps node `x` of `a` to node `y` of `b`, backtracking later
/// through `complete`. Only pins the pair down; consistency is checked as
/// the assignment grows.
fn assign(
    ga: &Indexed,
    gb: &Indexed,
    x: usize,
    y: usize,
    map: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
) -> bool {
    if ga.labels[x] != gb.labels[y]
        || ga.children[x].len() != gb.children[y].len()
        || ga.parents[x].len() != gb.parents[y].len()
    {
        return false;
    }
    map[x] = Some(y);
    used[y] = true;
    true
}

fn complete(
    ga: &Indexed,
    gb: &Indexed,
    map: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
    from: usize,
) -> bool {
    let next = (from..map.len()).find(|&i| map[i].is_none());
    let Some(x) = next else {
        return edges_match(ga, gb, map);
    };
    for y in 0..used.len() {
        if used[y] {
            continue;
        }
        if assign(ga, gb, x, y, map, used) {
            if complete(ga, gb, map, used, x + 1) {
                return true;
            }
            map[x] = None;
            used[y] = false;
        }
    }
    false
}

fn edges_match(ga: &Indexed, gb: &Indexed, map: &[Option<usize>]) -> bool {
    if map[ga.root] != Some(gb.root) {
        return false;
    }
    for x in 0..map.len() {
        let y = map[x].unwrap();
        let mapped: BTreeSet<usize> = ga.children[x].iter().map(|&k| map[k].unwrap()).collect();
        let actual: BTreeSet<usize> = gb.children[y].iter().copied().collect();
        if mapped != actual {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cirquent::{GateKind, GraphData, Label, Literal};

    fn port(text: &str) -> Label {
        Label::Port(Literal::parse(text).unwrap())
    }

    fn two_layer(names: [&str; 7]) -> Cirquent {
        let [r, l, m, p1, p2, p3, p4] = names;
        let mut g = GraphData::new();
        g.add_node(r, Label::Gate(GateKind::Or));
        g.add_node(l, Label::Gate(GateKind::And));
        g.add_node(m, Label::Gate(GateKind::And));
        g.add_node(p1, port("P"));
        g.add_node(p2, port("~P"));
        g.add_node(p3, port("P"));
        g.add_node(p4, port("~P"));
        g.add_edge(r, l);
        g.add_edge(r, m);
        g.add_edge(l, p1);
        g.add_edge(l, p2);
        g.add_edge(m, p3);
        g.add_edge(m, p4);
        g.validate(r).unwrap()
    }

    #[test]
    fn renamed_copy_has_equal_key() {
        let a = two_layer(["r", "l", "m", "1", "2", "3", "4"]);
        let b = two_layer(["root", "x", "y", "q", "w", "e", "t"]);
        assert_eq!(canonical_key(&a), canonical_key(&b));
        assert!(is_isomorphic(&a, &b));
        let iso = isomorphism(&a, &b).unwrap();
        assert_eq!(a.rename_nodes(&iso).unwrap(), b);
    }

    #[test]
    fn label_difference_changes_key() {
        let a = two_layer(["r", "l", "m", "1", "2", "3", "4"]);
        let b = a.negate();
        assert_ne!(canonical_key(&a), canonical_key(&b));
        assert!(isomorphism(&a, &b).is_none());
    }

    #[test]
    fn shared_vs_copied_port_distinguished() {
        // ∨ over two ∧ gates sharing one P-port, versus two private P-ports.
        let mut g = GraphData::new();
        g.add_node("r", Label::Gate(GateKind::Or));
        g.add_node("l", Label::Gate(GateKind::And));
        g.add_node("m", Label::Gate(GateKind::And));
        g.add_node("p", port("P"));
        g.add_edge("r", "l");
        g.add_edge("r", "m");
        g.add_edge("l", "p");
        g.add_edge("m", "p");
        let shared = g.validate("r").unwrap();

        let mut g = GraphData::new();
        g.add_node("r", Label::Gate(GateKind::Or));
        g.add_node("l", Label::Gate(GateKind::And));
        g.add_node("m", Label::Gate(GateKind::And));
        g.add_node("p1", port("P"));
        g.add_node("p2", port("P"));
        g.add_edge("r", "l");
        g.add_edge("r", "m");
        g.add_edge("l", "p1");
        g.add_edge("m", "p2");
        let copied = g.validate("r").unwrap();

        assert!(!is_isomorphic(&shared, &copied));
    }

    /// Exhaustive agreement between the canonical key and the brute-force
    /// bijection search over every
    /// gate-only cirquent shape with up to five nodes, pairwise.
    #[test]
    fn key_agrees_with_bijection_oracle_on_small_graphs() {
        let universe = small_gate_cirquents(5);
        assert!(universe.len() > 50, "universe too small: {}", universe.len());
        for (i, a) in universe.iter().enumerate() {
            for b in &universe[i..] {
                let by_key = canonical_key(a) == canonical_key(b);
                let by_oracle = isomorphism(a, b).is_some();
                assert_eq!(by_key, by_oracle, "disagreement:\n{a:?}\n{b:?}");
            }
        }
    }

    /// Every DAG over `n` gate nodes where node 0 is the root and each
    /// non-root node has at least one parent among lower-numbered nodes.
    fn small_gate_cirquents(max_nodes: usize) -> Vec<Cirquent> {
        let mut out = Vec::new();
        for n in 1..=max_nodes {
            // Each node i>0 picks a nonempty subset of 0..i as parents; to
            // keep the universe small, only alternate gate kinds by level
            // parity plus an extra flip choice for the whole graph.
            let mut parent_choices: Vec<Vec<u32>> = Vec::new();
            for i in 1..n {
                parent_choices.push((1..(1u32 << i)).collect());
            }
            let mut picks = vec![0usize; n.saturating_sub(1)];
            loop {
                for flip in [false, true] {
                    let mut g = GraphData::new();
                    for i in 0..n {
                        let kind = match (i % 2 == 0) ^ flip {
                            true => GateKind::And,
                            false => GateKind::Or,
                        };
                        g.add_node(format!("n{i}"), Label::Gate(kind));
                    }
                    for (i, &pick) in picks.iter().enumerate() {
                        let mask = parent_choices[i][pick];
                        for p in 0..=i {
                            if mask & (1 << p) != 0 {
                                g.add_edge(format!("n{p}"), format!("n{}", i + 1));
                            }
                        }
                    }
                    if let Ok(c) = g.validate("n0") {
                        out.push(c);
                    }
                }
                // Advance the mixed-radix counter over parent choices.
                let mut i = 0;
                loop {
                    if i == picks.len() {
                        break;
                    }
                    picks[i] += 1;
                    if picks[i] < parent_choices[i].len() {
                        break;
                    }
                    picks[i] = 0;
                    i += 1;
                }
                if i == picks.len() {
                    break;
                }
            }
            if n == 1 {
                continue;
            }
        }
        out
    }

    #[test]
    fn symmetric_graph_backtracking_is_consistent() {
        // Two interchangeable ∧ gates over opposite ports: the refinement
        // cannot split them, forcing the backtracking path.
        let a = two_layer(["r", "a", "b", "w", "x", "y", "z"]);
        let key = canonical_key(&a);
        let b = two_layer(["r", "b", "a", "w", "x", "y", "z"]);
        assert_eq!(key, canonical_key(&b));
    }
}
