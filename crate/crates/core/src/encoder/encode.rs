use std::collections::HashMap;

use serde_json::json;

use super::exactly_one::exactly_one;
use super::{scale_score, Connector, EncodeError, EncodeOptions, Family, TemporalEncoding};
use crate::cnf::{Lit, Wcnf};
use crate::ftl::{BinaryOp, QuantKind, UnaryOp};
use crate::pddl::Domain;
use crate::shapes::{ChainNode, ShapeConfig};
use crate::trace::ScoredSet;

/// Content of an atom argument slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SlotValue {
    /// Quantified variable `j` (0-based).
    Var(usize),
    /// The predicate has fewer arguments than the slot position.
    Unused,
}

const UNUSED_OBJ: u32 = u32::MAX;

/// Location of the truth variables of one node on one trace:
/// variable `base + k * envs + e` is the value at position `k` in environment `e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct YBlock {
    base: u32,
    envs: usize,
}

/// Solver variables of an encoding, grouped by role. Node indices refer to
/// the chain's preorder numbering.
#[derive(Debug, Clone)]
pub struct VarMap {
    pub alphabet: Vec<Connector>,
    /// Predicates that can label a predicate node.
    pub predicates: Vec<String>,
    /// Admissible combinations `(slot 1, slot 2)` per entry of `predicates`.
    pub combos: Vec<Vec<(SlotValue, SlotValue)>>,
    /// Values of each argument slot.
    pub slot_values: [Vec<SlotValue>; 2],
    /// `c[node][op]`, empty for predicate nodes.
    pub c: Vec<Vec<Lit>>,
    /// `pi[node][predicate]`, empty for connector nodes.
    pub pi: Vec<Vec<Lit>>,
    /// `chi[node][slot][value]`, empty for connector nodes.
    pub chi: Vec<[Vec<Lit>; 2]>,
    /// Trace satisfaction, in trace order.
    pub s: Vec<Lit>,
    y: Vec<Vec<YBlock>>,
    trace_lens: Vec<usize>,
    /// Integer weight per trace.
    pub weights: Vec<i64>,
    /// Sum of the positive weights: score = offset - cost / tie_factor.
    pub offset: i64,
    /// Multiplier of the score weights; the remainder of the cost counts
    /// tie-breaking penalties.
    pub tie_factor: u64,
    pub scale_digits: u32,
    pub decision_vars: u32,
    pub total_vars: u32,
}

/// Variable counts per role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Census {
    pub c: usize,
    pub pi: usize,
    pub chi: usize,
    pub y: usize,
    pub s: usize,
    pub aux: usize,
}

impl VarMap {
    /// `y(node, t, k, e)`, if the trace has environments.
    pub fn y(&self, node: usize, t: usize, k: usize, e: usize) -> Option<Lit> {
        let b = self.y[node][t];
        (e < b.envs && k < self.trace_lens[t]).then(|| Lit::pos(b.base + (k * b.envs + e) as u32))
    }

    pub fn envs(&self, t: usize) -> usize {
        self.y.first().map_or(0, |n| n[t].envs)
    }

    pub fn census(&self) -> Census {
        let sum = |v: &Vec<Vec<Lit>>| v.iter().map(Vec::len).sum::<usize>();
        let y = self
            .y
            .iter()
            .flat_map(|n| n.iter().zip(&self.trace_lens).map(|(b, l)| b.envs * l))
            .sum();
        let chi = self.chi.iter().map(|[a, b]| a.len() + b.len()).sum();
        let c = sum(&self.c);
        let pi = sum(&self.pi);
        Census {
            c,
            pi,
            chi,
            y,
            s: self.s.len(),
            aux: self.total_vars as usize - (c + pi + chi + y + self.s.len()),
        }
    }

    /// Score implied by a solver cost, in scaled integer units.
    pub fn implied_score(&self, cost: u64) -> i64 {
        self.offset - (cost / self.tie_factor) as i64
    }

    /// Description of the decision variables, DIMACS-numbered.
    pub fn to_json(&self) -> serde_json::Value {
        let mut c = Vec::new();
        for (node, lits) in self.c.iter().enumerate() {
            for (op, l) in self.alphabet.iter().zip(lits) {
                c.push(json!({"node": node, "connector": op.name(), "var": l.to_dimacs()}));
            }
        }
        let mut pi = Vec::new();
        let mut chi = Vec::new();
        for (node, lits) in self.pi.iter().enumerate() {
            for (p, l) in self.predicates.iter().zip(lits) {
                pi.push(json!({"node": node, "predicate": p, "var": l.to_dimacs()}));
            }
            for slot in 0..2 {
                for (v, l) in self.slot_values[slot].iter().zip(&self.chi[node][slot]) {
                    let value = match v {
                        SlotValue::Var(j) => json!(j + 1),
                        SlotValue::Unused => json!(null),
                    };
                    chi.push(json!({"node": node, "slot": slot + 1, "variable": value, "var": l.to_dimacs()}));
                }
            }
        }
        let s: Vec<i64> = self.s.iter().map(|l| l.to_dimacs()).collect();
        json!({
            "connectors": c,
            "predicates": pi,
            "slots": chi,
            "traces": s,
            "weights": self.weights,
            "offset": self.offset,
            "tie_factor": self.tie_factor,
            "scale_digits": self.scale_digits,
            "num_vars": self.total_vars,
        })
    }
}

struct TraceData {
    len: usize,
    universal: usize,
    existential: usize,
    envs: Vec<Vec<u32>>,
    /// (predicate index, first object, second object) -> truth per position
    atoms: HashMap<(usize, u32, u32), Vec<bool>>,
}

struct Builder {
    w: Wcnf,
    tru: Lit,
}

impl Builder {
    fn var(&mut self) -> Lit {
        self.w.new_var()
    }

    fn hard(&mut self, c: Vec<Lit>) {
        self.w.hard.push(c);
    }

    /// Clauses of `guard ⇒ (a ⇔ ⋁ xs)`.
    fn iff_or(&mut self, guard: Option<Lit>, a: Lit, xs: &[Lit]) {
        let g: Vec<Lit> = guard.map(|g| vec![!g]).unwrap_or_default();
        let mut big = g.clone();
        big.push(!a);
        big.extend_from_slice(xs);
        self.hard(big);
        for &x in xs {
            let mut c = g.clone();
            c.extend([a, !x]);
            self.hard(c);
        }
    }

    /// Clauses of `guard ⇒ (a ⇔ ⋀ xs)`.
    fn iff_and(&mut self, guard: Option<Lit>, a: Lit, xs: &[Lit]) {
        let negated: Vec<Lit> = xs.iter().map(|&x| !x).collect();
        self.iff_or(guard, !a, &negated);
    }

    /// Fresh `v ⇔ a ∧ b`, short-circuiting constants.
    fn and2(&mut self, a: Lit, b: Lit) -> Lit {
        if a == self.tru {
            return b;
        }
        if b == self.tru {
            return a;
        }
        let v = self.var();
        self.iff_and(None, v, &[a, b]);
        v
    }
}

fn prepare_traces(
    d: &Domain,
    ts: &ScoredSet,
    cfg: &ShapeConfig,
    preds: &[String],
    opts: &EncodeOptions,
) -> Result<Vec<TraceData>, EncodeError> {
    let pred_index: HashMap<&str, usize> = preds
        .iter()
        .enumerate()
        .map(|(i, p)| (p.as_str(), i))
        .collect();
    let b = cfg.universals();
    let mut needed: u64 = 0;
    let mut out = Vec::with_capacity(ts.len());
    for t in &ts.traces {
        let objects: HashMap<&str, u32> = t
            .instance
            .objects
            .keys()
            .enumerate()
            .map(|(i, o)| (o.as_str(), i as u32))
            .collect();
        let domains: Vec<Vec<u32>> = cfg
            .types
            .iter()
            .map(|&ty| {
                t.instance
                    .objects_of(&d.types, ty, opts.strict_types)
                    .into_iter()
                    .map(|o| objects[o])
                    .collect()
            })
            .collect();
        let universal: usize = domains[..b].iter().map(Vec::len).product();
        let existential: usize = domains[b..].iter().map(Vec::len).product();
        let mut envs: Vec<Vec<u32>> = vec![Vec::new()];
        for dom in &domains {
            envs = envs
                .into_iter()
                .flat_map(|pre| dom.iter().map(move |&o| [pre.clone(), vec![o]].concat()))
                .collect();
        }
        needed = needed.saturating_add((envs.len() * t.len()) as u64);
        if needed > opts.env_cap {
            return Err(EncodeError::EnvCap {
                needed,
                cap: opts.env_cap,
            });
        }
        let mut atoms: HashMap<(usize, u32, u32), Vec<bool>> = HashMap::new();
        for (k, s) in t.states.iter().enumerate() {
            for f in s.iter() {
                let Some(&p) = pred_index.get(f.predicate.as_str()) else {
                    continue;
                };
                let arg = |i: usize| f.args.get(i).map_or(UNUSED_OBJ, |a| objects[a.as_str()]);
                atoms
                    .entry((p, arg(0), arg(1)))
                    .or_insert_with(|| vec![false; t.len()])[k] = true;
            }
        }
        out.push(TraceData {
            len: t.len(),
            universal,
            existential,
            envs,
            atoms,
        });
    }
    Ok(out)
}

/// Builds the weighted CNF whose optimal models are the best formulas of
/// shape `cfg` on `ts`.
pub fn encode(
    d: &Domain,
    ts: &ScoredSet,
    cfg: &ShapeConfig,
    opts: &EncodeOptions,
) -> Result<(Wcnf, VarMap), EncodeError> {
    if ts.positives().next().is_none() {
        return Err(EncodeError::NoPositive);
    }
    if ts.negatives().next().is_none() {
        return Err(EncodeError::NoNegative);
    }
    let q = cfg.q();
    let b = cfg.universals();
    let fills_slot = |j: usize, slot_ty| {
        let ty = cfg.types[j];
        let allowed = !opts.strict_eq4 || cfg.prefix[j] == QuantKind::Forall;
        allowed
            && if opts.strict_types {
                ty == slot_ty
            } else {
                d.types.is_subtype(ty, slot_ty)
            }
    };

    // Usable predicates and their admissible slot combinations.
    let mut predicates = Vec::new();
    let mut combos: Vec<Vec<(SlotValue, SlotValue)>> = Vec::new();
    for p in d.predicates.values().filter(|p| p.arity() <= 2) {
        let slot = |s: usize| -> Vec<SlotValue> {
            match p.arg_types.get(s) {
                None => vec![SlotValue::Unused],
                Some(&ty) => (0..q)
                    .filter(|&j| fills_slot(j, ty))
                    .map(SlotValue::Var)
                    .collect(),
            }
        };
        let (first, second) = (slot(0), slot(1));
        let list: Vec<_> = first
            .iter()
            .flat_map(|&a| second.iter().map(move |&b| (a, b)))
            .collect();
        if !list.is_empty() {
            predicates.push(p.name.clone());
            combos.push(list);
        }
    }
    if predicates.is_empty() {
        return Err(EncodeError::Infeasible(
            "no predicate accepts the quantified variables".into(),
        ));
    }
    for j in 0..q {
        let seen = combos
            .iter()
            .flatten()
            .any(|&(a, b)| a == SlotValue::Var(j) || b == SlotValue::Var(j));
        if !seen {
            return Err(EncodeError::Infeasible(format!(
                "variable {} fits no predicate slot",
                j + 1
            )));
        }
    }
    let mut slot_values: [Vec<SlotValue>; 2] = [Vec::new(), Vec::new()];
    for &(a, b) in combos.iter().flatten() {
        for (s, v) in [(0, a), (1, b)] {
            if !slot_values[s].contains(&v) {
                slot_values[s].push(v);
            }
        }
    }
    slot_values.iter_mut().for_each(|v| v.sort());

    let traces = prepare_traces(d, ts, cfg, &predicates, opts)?;
    let weights = ts
        .traces
        .iter()
        .map(|t| scale_score(t.score, opts.scale_digits))
        .collect::<Result<Vec<i64>, _>>()?;
    let offset: i64 = weights.iter().filter(|w| **w > 0).sum();

    let nodes = &cfg.chain.nodes;
    let mut w = Wcnf::new();
    let mut c = vec![Vec::new(); nodes.len()];
    let mut pi = vec![Vec::new(); nodes.len()];
    let mut chi: Vec<[Vec<Lit>; 2]> = vec![[Vec::new(), Vec::new()]; nodes.len()];
    for (i, n) in nodes.iter().enumerate() {
        if let ChainNode::Connector { .. } = n {
            c[i] = opts.alphabet.iter().map(|_| w.new_var()).collect();
        }
    }
    for (i, n) in nodes.iter().enumerate() {
        if let ChainNode::Predicate { .. } = n {
            pi[i] = predicates.iter().map(|_| w.new_var()).collect();
            for s in 0..2 {
                chi[i][s] = slot_values[s].iter().map(|_| w.new_var()).collect();
            }
        }
    }
    let s_vars: Vec<Lit> = traces.iter().map(|_| w.new_var()).collect();
    let mut y = vec![Vec::with_capacity(traces.len()); nodes.len()];
    for node_blocks in y.iter_mut() {
        for t in &traces {
            let base = w.num_vars;
            w.num_vars += (t.len * t.envs.len()) as u32;
            node_blocks.push(YBlock {
                base,
                envs: t.envs.len(),
            });
        }
    }
    let decision_vars = w.num_vars;
    let tru = w.new_var();
    let mut bld = Builder { w, tru };
    bld.hard(vec![tru]);
    let yv = |node: usize, t: usize, k: usize, e: usize| -> Lit {
        let blk = y[node][t];
        Lit::pos(blk.base + (k * blk.envs + e) as u32)
    };

    // Exactly-one groups.
    let keep = |f: Family| !opts.ablate.contains(&f);
    for i in (0..nodes.len()).filter(|_| keep(Family::ExactlyOne)) {
        for group in [&c[i], &pi[i], &chi[i][0], &chi[i][1]] {
            if !group.is_empty() {
                exactly_one(&mut bld.w, group).expect("non-empty group");
            }
        }
    }

    // Type consistency: a predicate admits only its own slot combinations.
    for (i, n) in nodes.iter().enumerate().filter(|_| keep(Family::Types)) {
        if !matches!(n, ChainNode::Predicate { .. }) {
            continue;
        }
        for (pidx, list) in combos.iter().enumerate() {
            for s in 0..2 {
                for (vidx, v) in slot_values[s].iter().enumerate() {
                    let ok = list
                        .iter()
                        .any(|&(a, b)| if s == 0 { a == *v } else { b == *v });
                    if !ok {
                        bld.hard(vec![!pi[i][pidx], !chi[i][s][vidx]]);
                    }
                }
            }
        }
    }

    // Trace satisfaction through the quantifier block.
    for (t, td) in traces
        .iter()
        .enumerate()
        .filter(|_| keep(Family::Satisfaction))
    {
        let st = s_vars[t];
        if td.universal == 0 {
            bld.hard(vec![st]);
            continue;
        }
        let mut conj = Vec::with_capacity(td.universal);
        for u in 0..td.universal {
            let disj: Vec<Lit> = (0..td.existential)
                .map(|e| yv(0, t, 0, u * td.existential + e))
                .collect();
            if b == q {
                conj.push(disj[0]);
            } else if b == 0 {
                conj = disj;
                break;
            } else {
                let a = bld.var();
                bld.iff_or(None, a, &disj);
                conj.push(a);
            }
        }
        if b == 0 {
            bld.iff_or(None, st, &conj);
        } else {
            bld.iff_and(None, st, &conj);
        }
    }

    // Atom truth.
    let slot_index = |s: usize, v: SlotValue| {
        slot_values[s]
            .iter()
            .position(|x| *x == v)
            .expect("slot value")
    };
    for (i, n) in nodes.iter().enumerate().filter(|_| keep(Family::Atoms)) {
        if !matches!(n, ChainNode::Predicate { .. }) {
            continue;
        }
        for (pidx, list) in combos.iter().enumerate() {
            for &(a, b2) in list {
                let guard = [
                    !pi[i][pidx],
                    !chi[i][0][slot_index(0, a)],
                    !chi[i][1][slot_index(1, b2)],
                ];
                for (t, td) in traces.iter().enumerate() {
                    for (e, env) in td.envs.iter().enumerate() {
                        let obj = |v: SlotValue| match v {
                            SlotValue::Var(j) => env[j],
                            SlotValue::Unused => UNUSED_OBJ,
                        };
                        let truth = td.atoms.get(&(pidx, obj(a), obj(b2)));
                        for k in 0..td.len {
                            let val = truth.is_some_and(|v| v[k]);
                            let yl = yv(i, t, k, e);
                            let mut cl = guard.to_vec();
                            cl.push(if val { yl } else { !yl });
                            bld.hard(cl);
                        }
                    }
                }
            }
        }
    }

    // Connector semantics.
    for (i, n) in nodes
        .iter()
        .enumerate()
        .filter(|_| keep(Family::Connectors))
    {
        let ChainNode::Connector { left, right } = *n else {
            continue;
        };
        for (oidx, op) in opts.alphabet.iter().enumerate() {
            let g = Some(c[i][oidx]);
            for (t, td) in traces.iter().enumerate() {
                let len = td.len;
                for e in 0..td.envs.len() {
                    let yi = |k| yv(i, t, k, e);
                    let yl = |k| yv(left, t, k, e);
                    let yr = |k| yv(right, t, k, e);
                    match op {
                        Connector::Un(UnaryOp::Not) => {
                            (0..len).for_each(|k| bld.iff_or(g, yi(k), &[!yl(k)]))
                        }
                        Connector::Bin(BinaryOp::And) => {
                            (0..len).for_each(|k| bld.iff_and(g, yi(k), &[yl(k), yr(k)]))
                        }
                        Connector::Bin(BinaryOp::Or) => {
                            (0..len).for_each(|k| bld.iff_or(g, yi(k), &[yl(k), yr(k)]))
                        }
                        Connector::Bin(BinaryOp::Implies) => {
                            (0..len).for_each(|k| bld.iff_or(g, yi(k), &[!yl(k), yr(k)]))
                        }
                        Connector::Un(UnaryOp::Next) => {
                            for k in 0..len {
                                let next: Vec<Lit> =
                                    if k + 1 < len { vec![yl(k + 1)] } else { vec![] };
                                bld.iff_or(g, yi(k), &next);
                            }
                        }
                        Connector::Un(UnaryOp::Yesterday) => {
                            for k in 0..len {
                                let prev: Vec<Lit> = if k > 0 { vec![yl(k - 1)] } else { vec![] };
                                bld.iff_or(g, yi(k), &prev);
                            }
                        }
                        Connector::Un(u) => {
                            // ◇ □ O H
                            let future = matches!(u, UnaryOp::Eventually | UnaryOp::Always);
                            let disj = matches!(u, UnaryOp::Eventually | UnaryOp::Once);
                            for k in 0..len {
                                let xs: Vec<Lit> = match opts.temporal {
                                    TemporalEncoding::Expanded => {
                                        if future {
                                            (k..len).map(yl).collect()
                                        } else {
                                            (0..=k).map(yl).collect()
                                        }
                                    }
                                    TemporalEncoding::Recursive => {
                                        let nb = if future {
                                            (k + 1 < len).then(|| yi(k + 1))
                                        } else {
                                            k.checked_sub(1).map(yi)
                                        };
                                        std::iter::once(yl(k)).chain(nb).collect()
                                    }
                                };
                                if disj {
                                    bld.iff_or(g, yi(k), &xs);
                                } else {
                                    bld.iff_and(g, yi(k), &xs);
                                }
                            }
                        }
                        Connector::Bin(BinaryOp::Until) => match opts.temporal {
                            TemporalEncoding::Recursive => {
                                for k in 0..len {
                                    if k + 1 == len {
                                        bld.iff_or(g, yi(k), &[yr(k)]);
                                        continue;
                                    }
                                    // yi(k) ⇔ yr(k) ∨ (yl(k) ∧ yi(k+1))
                                    let gl = !c[i][oidx];
                                    let (a, r, l, nx) = (yi(k), yr(k), yl(k), yi(k + 1));
                                    bld.hard(vec![gl, !a, r, l]);
                                    bld.hard(vec![gl, !a, r, nx]);
                                    bld.hard(vec![gl, a, !r]);
                                    bld.hard(vec![gl, a, !l, !nx]);
                                }
                            }
                            TemporalEncoding::Expanded => {
                                for k in 0..len {
                                    let mut witnesses = Vec::with_capacity(len - k);
                                    for k2 in k..len {
                                        let mut conj: Vec<Lit> = (k..k2).map(yl).collect();
                                        conj.push(yr(k2));
                                        let a = bld.var();
                                        bld.iff_and(None, a, &conj);
                                        witnesses.push(a);
                                    }
                                    bld.iff_or(g, yi(k), &witnesses);
                                }
                            }
                        },
                    }
                }
            }
        }
    }

    // Discriminativeness.
    let pos: Vec<Lit> = ts
        .traces
        .iter()
        .zip(&s_vars)
        .filter(|(t, _)| t.is_positive())
        .map(|(_, &s)| s)
        .collect();
    let neg: Vec<Lit> = ts
        .traces
        .iter()
        .zip(&s_vars)
        .filter(|(t, _)| !t.is_positive())
        .map(|(_, &s)| !s)
        .collect();
    if keep(Family::Discrimination) {
        bld.hard(pos);
        bld.hard(neg);
    }

    // Active nodes: those that appear in the decoded formula.
    let binary_ops: Vec<usize> = (0..opts.alphabet.len())
        .filter(|&o| opts.alphabet[o].is_binary())
        .collect();
    let mut active = vec![tru; nodes.len()];
    for (i, n) in nodes.iter().enumerate() {
        let ChainNode::Connector { left, right } = *n else {
            continue;
        };
        active[left] = active[i];
        let bin = if binary_ops.len() == opts.alphabet.len() {
            tru
        } else if binary_ops.is_empty() {
            !tru
        } else {
            let v = bld.var();
            let lits: Vec<Lit> = binary_ops.iter().map(|&o| c[i][o]).collect();
            bld.iff_or(None, v, &lits);
            v
        };
        active[right] = bld.and2(active[i], bin);
    }

    // Redundancy bans.
    let op_index = |op: Connector| opts.alphabet.iter().position(|x| *x == op);
    for (i, n) in nodes
        .iter()
        .enumerate()
        .filter(|_| keep(Family::Redundancy))
    {
        let ChainNode::Connector { left, right } = *n else {
            continue;
        };
        for u in [UnaryOp::Not, UnaryOp::Eventually, UnaryOp::Always] {
            if let (Some(o), ChainNode::Connector { .. }) =
                (op_index(Connector::Un(u)), nodes[left])
            {
                bld.hard(vec![!active[i], !c[i][o], !c[left][o]]);
            }
        }
        if let (ChainNode::Predicate { .. }, ChainNode::Predicate { .. }) =
            (nodes[left], nodes[right])
        {
            for op in BinaryOp::ALL {
                let Some(o) = op_index(Connector::Bin(op)) else {
                    continue;
                };
                for (pidx, list) in combos.iter().enumerate() {
                    for &(a, b2) in list {
                        let (sa, sb) = (slot_index(0, a), slot_index(1, b2));
                        bld.hard(vec![
                            !active[i],
                            !c[i][o],
                            !pi[left][pidx],
                            !pi[right][pidx],
                            !chi[left][0][sa],
                            !chi[right][0][sa],
                            !chi[left][1][sb],
                            !chi[right][1][sb],
                        ]);
                    }
                }
            }
        }
    }

    // Every quantified variable occurs in an active atom.
    for j in (0..q).filter(|_| keep(Family::Visibility)) {
        let mut witnesses = Vec::new();
        for (i, n) in nodes.iter().enumerate() {
            if !matches!(n, ChainNode::Predicate { .. }) {
                continue;
            }
            for s in 0..2 {
                if let Some(vidx) = slot_values[s].iter().position(|v| *v == SlotValue::Var(j)) {
                    let x = chi[i][s][vidx];
                    let v = bld.and2(x, active[i]);
                    witnesses.push(v);
                }
            }
        }
        bld.hard(witnesses);
    }

    // Score softs dominate; ties are broken towards fewer binary connectors.
    let ties: Vec<Lit> = if opts.tie_break {
        nodes
            .iter()
            .filter_map(|n| match *n {
                ChainNode::Connector { right, .. } => Some(active[right]),
                ChainNode::Predicate { .. } => None,
            })
            .filter(|&a| a != tru && a != !tru)
            .collect()
    } else {
        Vec::new()
    };
    let tie_factor = ties.len() as u64 + 1;
    for (t, &wt) in weights.iter().enumerate() {
        if wt > 0 {
            bld.w.add_soft([s_vars[t]], wt as u64 * tie_factor);
        } else if wt < 0 {
            bld.w.add_soft([!s_vars[t]], wt.unsigned_abs() * tie_factor);
        }
    }
    for a in ties {
        bld.w.add_soft([!a], 1);
    }

    let total_vars = bld.w.num_vars;
    let vm = VarMap {
        alphabet: opts.alphabet.clone(),
        predicates,
        combos,
        slot_values,
        c,
        pi,
        chi,
        s: s_vars,
        y,
        trace_lens: traces.iter().map(|t| t.len).collect(),
        weights,
        offset,
        tie_factor,
        scale_digits: opts.scale_digits,
        decision_vars,
        total_vars,
    };
    Ok((bld.w, vm))
}
