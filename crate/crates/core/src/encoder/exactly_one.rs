use crate::cnf::{Lit, Wcnf};

use super::EncodeError;

/// Largest group encoded pairwise; larger groups use a ladder.
pub const PAIRWISE_LIMIT: usize = 5;

/// Clauses forcing exactly one of `lits` true. Ladder auxiliaries are drawn
/// from `fresh` and fully defined, so models correspond one-to-one with the
/// choice of the true literal.
pub fn exactly_one_clauses(
    lits: &[Lit],
    mut fresh: impl FnMut() -> Lit,
) -> Result<Vec<Vec<Lit>>, EncodeError> {
    if lits.is_empty() {
        return Err(EncodeError::EmptyExactlyOne);
    }
    let mut out = vec![lits.to_vec()];
    if lits.len() <= PAIRWISE_LIMIT {
        for (i, &a) in lits.iter().enumerate() {
            for &b in &lits[i + 1..] {
                out.push(vec![!a, !b]);
            }
        }
        return Ok(out);
    }
    // s_i <=> x_1 | ... | x_i, and x_i excludes s_{i-1}
    let mut prev = fresh();
    out.push(vec![!lits[0], prev]);
    out.push(vec![!prev, lits[0]]);
    for &x in &lits[1..] {
        let s = fresh();
        out.push(vec![!x, s]);
        out.push(vec![!prev, s]);
        out.push(vec![!s, prev, x]);
        out.push(vec![!x, !prev]);
        prev = s;
    }
    out.push(vec![prev]);
    Ok(out)
}

pub fn exactly_one(w: &mut Wcnf, lits: &[Lit]) -> Result<(), EncodeError> {
    let mut n = w.num_vars;
    let clauses = exactly_one_clauses(lits, || {
        n += 1;
        Lit::pos(n - 1)
    })?;
    w.num_vars = n;
    w.hard.extend(clauses);
    Ok(())
}
