//! Enumerators for formula skeletons, quantifier prefixes and type tuples.

use std::fmt;

use crate::ftl::QuantKind;
use crate::pddl::{Domain, TypeId};

/// Node of a chain. Nodes are stored in preorder, the root first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChainNode {
    Connector {
        left: usize,
        right: usize,
    },
    /// `slot` numbers predicate nodes left to right.
    Predicate {
        slot: usize,
    },
}

/// An unlabeled full binary skeleton: inner nodes receive connectors and
/// leaves receive atoms with two variable slots each.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TlChain {
    pub nodes: Vec<ChainNode>,
}

#[derive(Debug, Clone)]
enum Tree {
    Leaf,
    Node(Box<Tree>, Box<Tree>),
}

fn trees(r: usize) -> Vec<Tree> {
    if r == 0 {
        return vec![Tree::Leaf];
    }
    let mut out = Vec::new();
    for left in (0..r).rev() {
        for l in trees(left) {
            for rt in trees(r - 1 - left) {
                out.push(Tree::Node(Box::new(l.clone()), Box::new(rt)));
            }
        }
    }
    out
}

impl TlChain {
    fn from_tree(t: &Tree) -> TlChain {
        fn go(t: &Tree, nodes: &mut Vec<ChainNode>, slots: &mut usize) -> usize {
            let id = nodes.len();
            match t {
                Tree::Leaf => {
                    nodes.push(ChainNode::Predicate { slot: *slots });
                    *slots += 1;
                }
                Tree::Node(l, r) => {
                    nodes.push(ChainNode::Connector { left: 0, right: 0 });
                    let left = go(l, nodes, slots);
                    let right = go(r, nodes, slots);
                    nodes[id] = ChainNode::Connector { left, right };
                }
            }
            id
        }
        let mut nodes = Vec::new();
        go(t, &mut nodes, &mut 0);
        TlChain { nodes }
    }

    pub fn connectors(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, ChainNode::Connector { .. }))
            .count()
    }

    pub fn predicate_nodes(&self) -> usize {
        self.nodes.len() - self.connectors()
    }

    /// Compact rendering: a leaf is `.`, an inner node `(LR)`.
    pub fn id(&self) -> String {
        fn go(c: &TlChain, i: usize, out: &mut String) {
            match c.nodes[i] {
                ChainNode::Predicate { .. } => out.push('.'),
                ChainNode::Connector { left, right } => {
                    out.push('(');
                    go(c, left, out);
                    go(c, right, out);
                    out.push(')');
                }
            }
        }
        let mut s = String::new();
        go(self, 0, &mut s);
        s
    }
}

/// Every chain with exactly `r` connectors, left-heavy shapes first.
pub fn gen_chains(r: usize) -> Vec<TlChain> {
    trees(r).iter().map(TlChain::from_tree).collect()
}

/// `b` universals followed by `q - b` existentials, for `b = q, ..., 0`.
pub fn gen_quantifier_prefixes(q: usize) -> Vec<Vec<QuantKind>> {
    (0..=q)
        .rev()
        .map(|b| {
            let mut p = vec![QuantKind::Forall; b];
            p.resize(q, QuantKind::Exists);
            p
        })
        .collect()
}

fn non_decreasing(types: &[TypeId], len: usize) -> Vec<Vec<TypeId>> {
    fn go(
        types: &[TypeId],
        from: usize,
        len: usize,
        cur: &mut Vec<TypeId>,
        out: &mut Vec<Vec<TypeId>>,
    ) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in from..types.len() {
            cur.push(types[i]);
            go(types, i, len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(types, 0, len, &mut Vec::new(), &mut out);
    out
}

/// Type tuples for `prefix`, non-decreasing within each same-kind block.
pub fn gen_type_tuples(d: &Domain, prefix: &[QuantKind]) -> Vec<Vec<TypeId>> {
    let types: Vec<TypeId> = d.types.ids().collect();
    let b = prefix
        .iter()
        .take_while(|k| **k == QuantKind::Forall)
        .count();
    let heads = non_decreasing(&types, b);
    let tails = non_decreasing(&types, prefix.len() - b);
    heads
        .iter()
        .flat_map(|h| tails.iter().map(move |t| [h.clone(), t.clone()].concat()))
        .collect()
}

/// One cell of the search: a chain, a quantifier prefix and its types.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ShapeConfig {
    pub chain: TlChain,
    pub prefix: Vec<QuantKind>,
    pub types: Vec<TypeId>,
}

impl ShapeConfig {
    pub fn q(&self) -> usize {
        self.prefix.len()
    }

    pub fn universals(&self) -> usize {
        self.prefix
            .iter()
            .take_while(|k| **k == QuantKind::Forall)
            .count()
    }

    pub fn display<'a>(&'a self, d: &'a Domain) -> impl fmt::Display + 'a {
        DisplayConfig(self, d)
    }
}

struct DisplayConfig<'a>(&'a ShapeConfig, &'a Domain);

impl fmt::Display for DisplayConfig<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (cfg, d) = (self.0, self.1);
        write!(f, "{} ", cfg.chain.id())?;
        for (k, t) in cfg.prefix.iter().zip(&cfg.types) {
            let q = if *k == QuantKind::Forall { 'A' } else { 'E' };
            write!(f, "{q}:{} ", d.types.name(*t))?;
        }
        Ok(())
    }
}

/// All configurations with exactly `r` connectors and `q` quantifiers.
pub fn gen_configs(d: &Domain, r: usize, q: usize) -> Vec<ShapeConfig> {
    let mut out = Vec::new();
    for chain in gen_chains(r) {
        for prefix in gen_quantifier_prefixes(q) {
            for types in gen_type_tuples(d, &prefix) {
                out.push(ShapeConfig {
                    chain: chain.clone(),
                    prefix: prefix.clone(),
                    types,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;
    use crate::pddl::parse_domain;

    fn catalan(n: usize) -> usize {
        (0..n).fold(1, |c, i| c * 2 * (2 * i + 1) / (i + 2))
    }

    /// All full binary trees with `r` inner nodes, grown by replacing one
    /// leaf at a time and deduplicating by rendering.
    fn brute_force_shapes(r: usize) -> HashSet<String> {
        let mut level: HashSet<String> = [".".to_string()].into();
        for _ in 0..r {
            let mut next = HashSet::new();
            for s in &level {
                for (i, c) in s.char_indices() {
                    if c == '.' {
                        next.insert(format!("{}(..){}", &s[..i], &s[i + 1..]));
                    }
                }
            }
            level = next;
        }
        level
    }

    #[test]
    fn chain_counts_are_catalan() {
        assert_eq!(gen_chains(0).len(), 1);
        assert_eq!(gen_chains(2).len(), 2);
        assert_eq!(gen_chains(3).len(), 5);
        for r in 0..=6 {
            let chains = gen_chains(r);
            assert_eq!(chains.len(), catalan(r));
            let ids: HashSet<String> = chains.iter().map(TlChain::id).collect();
            assert_eq!(ids.len(), chains.len());
            assert_eq!(ids, brute_force_shapes(r));
            for c in &chains {
                assert_eq!(c.connectors(), r);
                assert_eq!(c.predicate_nodes(), r + 1);
            }
        }
    }

    #[test]
    fn left_heavy_first() {
        let ids: Vec<String> = gen_chains(2).iter().map(TlChain::id).collect();
        assert_eq!(ids, ["((..).)", "(.(..))"]);
    }

    #[test]
    fn prefixes() {
        use QuantKind::*;
        assert_eq!(gen_quantifier_prefixes(1), vec![vec![Forall], vec![Exists]]);
        assert_eq!(
            gen_quantifier_prefixes(2),
            vec![
                vec![Forall, Forall],
                vec![Forall, Exists],
                vec![Exists, Exists]
            ]
        );
        assert_eq!(gen_quantifier_prefixes(3).len(), 4);
    }

    #[test]
    fn type_tuples() {
        use QuantKind::*;
        // the root `object` counts as a type, so these domains have 1 and 2 types besides it
        let one = parse_domain("(define (domain d) (:types t))").unwrap();
        assert_eq!(gen_type_tuples(&one, &[Forall, Forall]).len(), 3);
        let d = parse_domain("(define (domain d) (:types a b))").unwrap();
        let a = d.types.get("a").unwrap();
        let b = d.types.get("b").unwrap();
        let only_ab = |ts: Vec<Vec<TypeId>>| -> Vec<Vec<TypeId>> {
            ts.into_iter()
                .filter(|t| t.iter().all(|x| *x == a || *x == b))
                .collect()
        };
        assert_eq!(
            only_ab(gen_type_tuples(&d, &[Forall, Forall])),
            vec![vec![a, a], vec![a, b], vec![b, b]]
        );
        assert_eq!(only_ab(gen_type_tuples(&d, &[Forall, Exists])).len(), 4);
        assert_eq!(gen_type_tuples(&d, &[Forall, Exists]).len(), 9);
        assert_eq!(gen_type_tuples(&d, &[Exists, Exists]).len(), 6);
    }

    #[test]
    fn configs_are_distinct() {
        let d = parse_domain("(define (domain d) (:types a b))").unwrap();
        for r in 0..=3 {
            for q in 1..=2 {
                let cfgs = gen_configs(&d, r, q);
                let set: HashSet<&ShapeConfig> = cfgs.iter().collect();
                assert_eq!(set.len(), cfgs.len());
                assert!(cfgs
                    .iter()
                    .all(|c| c.prefix.windows(2).all(|w| w[0] <= w[1])));
            }
        }
    }
}
