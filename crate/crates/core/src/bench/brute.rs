use std::collections::BTreeSet;

use crate::encoder::{scale_score, var_name, Connector, EncodeError, EncodeOptions};
use crate::ftl::{satisfied, Formula, FtlError, QuantKind, Quantifier, Tl, UnaryOp};
use crate::pddl::Domain;
use crate::shapes::{ChainNode, ShapeConfig};
use crate::trace::ScoredSet;

/// Best formulas of one configuration found by exhaustive enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForce {
    /// Scaled integer score.
    pub score: i64,
    /// Every optimal formula, sorted by text.
    pub formulas: Vec<Formula>,
    /// Number of well-formed formulas examined.
    pub examined: usize,
}

/// Largest labeling space searched by default.
pub const DEFAULT_SPACE_BOUND: u64 = 1_000_000;

#[derive(Debug, thiserror::Error)]
pub enum BruteError {
    #[error("{size} labelings exceed the bound of {bound}")]
    SpaceBound { size: u64, bound: u64 },
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Check(#[from] FtlError),
}

fn atoms(d: &Domain, cfg: &ShapeConfig, opts: &EncodeOptions) -> Vec<Tl> {
    let fits = |j: usize, ty| {
        let t = cfg.types[j];
        (!opts.strict_eq4 || cfg.prefix[j] == QuantKind::Forall)
            && if opts.strict_types {
                t == ty
            } else {
                d.types.is_subtype(t, ty)
            }
    };
    let mut out = Vec::new();
    for p in d.predicates.values().filter(|p| p.arity() <= 2) {
        let mut args: Vec<Vec<String>> = vec![Vec::new()];
        for &ty in &p.arg_types {
            args = args
                .into_iter()
                .flat_map(|pre| {
                    (0..cfg.q())
                        .filter(move |&j| fits(j, ty))
                        .map(move |j| [pre.clone(), vec![var_name(j)]].concat())
                })
                .collect();
        }
        out.extend(args.into_iter().map(|a| Tl::Atom(p.name.clone(), a)));
    }
    out
}

fn subtrees(cfg: &ShapeConfig, atoms: &[Tl], alphabet: &[Connector], i: usize) -> Vec<Tl> {
    let ChainNode::Connector { left, right } = cfg.chain.nodes[i] else {
        return atoms.to_vec();
    };
    let ls = subtrees(cfg, atoms, alphabet, left);
    let mut rs: Option<Vec<Tl>> = None;
    let mut out = Vec::new();
    for &op in alphabet {
        match op {
            Connector::Un(u) => {
                for l in &ls {
                    let stacked = matches!(l, Tl::Unary(v, _) if *v == u)
                        && matches!(u, UnaryOp::Not | UnaryOp::Eventually | UnaryOp::Always);
                    if !stacked {
                        out.push(Tl::un(u, l.clone()));
                    }
                }
            }
            Connector::Bin(b) => {
                let rs = rs.get_or_insert_with(|| subtrees(cfg, atoms, alphabet, right));
                let leaves = matches!(cfg.chain.nodes[left], ChainNode::Predicate { .. })
                    && matches!(cfg.chain.nodes[right], ChainNode::Predicate { .. });
                for l in &ls {
                    for r in rs.iter() {
                        if !(leaves && l == r) {
                            out.push(Tl::bin(b, l.clone(), r.clone()));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Number of connector and atom labelings of `cfg`, counting a unary
/// connector's dropped subtree once.
pub fn count_labelings(d: &Domain, cfg: &ShapeConfig, opts: &EncodeOptions) -> u64 {
    fn go(cfg: &ShapeConfig, atoms: u64, un: u64, bin: u64, i: usize) -> u64 {
        match cfg.chain.nodes[i] {
            ChainNode::Predicate { .. } => atoms,
            ChainNode::Connector { left, right } => {
                let l = go(cfg, atoms, un, bin, left);
                let r = go(cfg, atoms, un, bin, right);
                un.saturating_mul(l)
                    .saturating_add(bin.saturating_mul(l).saturating_mul(r))
            }
        }
    }
    let un = opts.alphabet.iter().filter(|c| !c.is_binary()).count() as u64;
    let bin = opts.alphabet.len() as u64 - un;
    go(cfg, atoms(d, cfg, opts).len() as u64, un, bin, 0)
}

/// Every well-formed formula of shape `cfg`: each quantified variable occurs,
/// no `¬¬`, `◇◇` or `□□`, and no binary connector over two equal atoms.
pub fn enumerate_formulas(d: &Domain, cfg: &ShapeConfig, opts: &EncodeOptions) -> Vec<Formula> {
    let quantifiers: Vec<Quantifier> = cfg
        .prefix
        .iter()
        .zip(&cfg.types)
        .enumerate()
        .map(|(j, (&kind, &ty))| Quantifier {
            kind,
            var: var_name(j),
            ty: d.types.name(ty).to_string(),
        })
        .collect();
    let atoms = atoms(d, cfg, opts);
    subtrees(cfg, &atoms, &opts.alphabet, 0)
        .into_iter()
        .filter(|core| {
            let mut vars = BTreeSet::new();
            core.variables(&mut vars);
            vars.len() == cfg.q()
        })
        .map(|core| Formula::new(quantifiers.clone(), core))
        .collect()
}

/// Exhaustive counterpart of encode-and-solve for one configuration. Returns
/// `None` when no formula is discriminative.
pub fn brute_force_best(
    d: &Domain,
    ts: &ScoredSet,
    cfg: &ShapeConfig,
    opts: &EncodeOptions,
    bound: u64,
) -> Result<Option<BruteForce>, BruteError> {
    let size = count_labelings(d, cfg, opts);
    if size > bound {
        return Err(BruteError::SpaceBound { size, bound });
    }
    let weights = ts
        .traces
        .iter()
        .map(|t| scale_score(t.score, opts.scale_digits))
        .collect::<Result<Vec<i64>, _>>()?;
    let mut best: Option<BruteForce> = None;
    let mut examined = 0;
    for f in enumerate_formulas(d, cfg, opts) {
        examined += 1;
        let sat = satisfied(d, &f, ts, opts.check_options())?;
        let pos = ts
            .traces
            .iter()
            .zip(&sat)
            .any(|(t, s)| t.is_positive() && *s);
        let neg = ts
            .traces
            .iter()
            .zip(&sat)
            .any(|(t, s)| !t.is_positive() && !*s);
        if !(pos && neg) {
            continue;
        }
        let score: i64 = weights
            .iter()
            .zip(&sat)
            .filter(|(_, s)| **s)
            .map(|(w, _)| *w)
            .sum();
        match &mut best {
            Some(b) if b.score > score => {}
            Some(b) if b.score == score => b.formulas.push(f),
            _ => {
                best = Some(BruteForce {
                    score,
                    formulas: vec![f],
                    examined: 0,
                })
            }
        }
    }
    Ok(best.map(|mut b| {
        b.examined = examined;
        b.formulas.sort_by_key(|f| f.to_string());
        b
    }))
}
