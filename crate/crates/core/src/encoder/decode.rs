use thiserror::Error;

use super::encode::{SlotValue, VarMap};
use super::Connector;
use crate::cnf::Lit;
use crate::ftl::{Formula, QuantKind, Quantifier, Tl};
use crate::pddl::Domain;
use crate::shapes::{ChainNode, ShapeConfig};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("node {node}: {count} {role} choices are true")]
    NotExactlyOne {
        node: usize,
        role: &'static str,
        count: usize,
    },
    #[error("node {node}: predicate `{predicate}` with an unused argument slot")]
    BadSlot { node: usize, predicate: String },
}

/// Name of quantified variable `j` (0-based) in decoded formulas.
pub fn var_name(j: usize) -> String {
    format!("x{}", j + 1)
}

fn chosen(
    model: &[bool],
    lits: &[Lit],
    node: usize,
    role: &'static str,
) -> Result<usize, DecodeError> {
    let on: Vec<usize> = (0..lits.len()).filter(|&k| lits[k].eval(model)).collect();
    match on.as_slice() {
        [k] => Ok(*k),
        _ => Err(DecodeError::NotExactlyOne {
            node,
            role,
            count: on.len(),
        }),
    }
}

/// Reads the formula selected by `model`. The right subtree of a unary
/// connector is dropped.
pub fn decode(
    model: &[bool],
    vm: &VarMap,
    cfg: &ShapeConfig,
    d: &Domain,
) -> Result<Formula, DecodeError> {
    fn node(
        model: &[bool],
        vm: &VarMap,
        cfg: &ShapeConfig,
        d: &Domain,
        i: usize,
    ) -> Result<Tl, DecodeError> {
        match cfg.chain.nodes[i] {
            ChainNode::Connector { left, right } => {
                let op = vm.alphabet[chosen(model, &vm.c[i], i, "connector")?];
                let l = node(model, vm, cfg, d, left)?;
                Ok(match op {
                    Connector::Un(u) => Tl::un(u, l),
                    Connector::Bin(b) => Tl::bin(b, l, node(model, vm, cfg, d, right)?),
                })
            }
            ChainNode::Predicate { .. } => {
                let p = &vm.predicates[chosen(model, &vm.pi[i], i, "predicate")?];
                let arity = d.predicate(p).map_or(0, |x| x.arity());
                let mut args = Vec::new();
                for s in 0..arity {
                    match vm.slot_values[s][chosen(model, &vm.chi[i][s], i, "slot")?] {
                        SlotValue::Var(j) => args.push(var_name(j)),
                        SlotValue::Unused => {
                            return Err(DecodeError::BadSlot {
                                node: i,
                                predicate: p.clone(),
                            })
                        }
                    }
                }
                Ok(Tl::Atom(p.clone(), args))
            }
        }
    }
    let quantifiers = cfg
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
    debug_assert!(cfg
        .prefix
        .windows(2)
        .all(|w| !(w[0] == QuantKind::Exists && w[1] == QuantKind::Forall)));
    Ok(Formula::new(quantifiers, node(model, vm, cfg, d, 0)?))
}
