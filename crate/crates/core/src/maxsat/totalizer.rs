//! Generalized totalizer: for weighted inputs, output literal `o_v` is forced
//! true whenever the weight of true inputs reaches `v`. Sums are clamped at
//! `k`, so `o_k` stands for "at least `k`".

use std::collections::BTreeMap;

use crate::cnf::Lit;

use super::sat::SatSolver;

/// Returns `(value, literal)` pairs in increasing value order.
pub(super) fn build(s: &mut SatSolver, inputs: &[(Lit, u64)], k: u64) -> Vec<(u64, Lit)> {
    match inputs {
        [] => Vec::new(),
        [(l, w)] => vec![((*w).min(k), *l)],
        _ => {
            let (a, b) = inputs.split_at(inputs.len() / 2);
            let left = build(s, a, k);
            let right = build(s, b, k);
            let mut out: BTreeMap<u64, Lit> = BTreeMap::new();
            let mut out_lit =
                |s: &mut SatSolver, v: u64| *out.entry(v).or_insert_with(|| s.new_var());
            for &(v, l) in left.iter().chain(&right) {
                let o = out_lit(s, v);
                s.add_clause(&[!l, o]);
            }
            for &(va, la) in &left {
                for &(vb, lb) in &right {
                    let o = out_lit(s, (va + vb).min(k));
                    s.add_clause(&[!la, !lb, o]);
                }
            }
            out.into_iter().collect()
        }
    }
}
