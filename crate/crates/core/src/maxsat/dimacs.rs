use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::Command;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use super::{Outcome, Status};
use crate::cnf::{Lit, Wcnf};

#[derive(Debug, Error)]
pub enum DimacsError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("solver output has no model line")]
    NoModel,
    #[error("external solver returned a model violating a hard clause")]
    InvalidModel,
    #[error("external solver: {0}")]
    Io(#[from] std::io::Error),
}

/// Classic DIMACS WCNF with an explicit top weight.
pub fn export_wcnf(w: &Wcnf) -> String {
    let top = w.top();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "p wcnf {} {} {}",
        w.num_vars,
        w.hard.len() + w.soft.len(),
        top
    );
    let mut line = |weight: u64, c: &[Lit]| {
        let _ = write!(out, "{weight}");
        for l in c {
            let _ = write!(out, " {}", l.to_dimacs());
        }
        out.push_str(" 0\n");
    };
    for c in &w.hard {
        line(top, c);
    }
    for (c, weight) in &w.soft {
        line(*weight, c);
    }
    out
}

pub fn parse_wcnf(text: &str) -> Result<Wcnf, DimacsError> {
    let mut w = Wcnf::new();
    let mut top = None;
    for (n, line) in text.lines().enumerate() {
        let err = |message: &str| DimacsError::Malformed {
            line: n + 1,
            message: message.to_string(),
        };
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks[0] == "p" {
            if toks.len() != 5 || toks[1] != "wcnf" {
                return Err(err("expected `p wcnf <vars> <clauses> <top>`"));
            }
            w.num_vars = toks[2].parse().map_err(|_| err("bad variable count"))?;
            top = Some(toks[4].parse::<u64>().map_err(|_| err("bad top weight"))?);
            continue;
        }
        let top = top.ok_or_else(|| err("clause before header"))?;
        let nums = toks
            .iter()
            .map(|t| t.parse::<i64>().map_err(|_| err("non-integer token")))
            .collect::<Result<Vec<_>, _>>()?;
        if nums.len() < 2 || *nums.last().expect("non-empty") != 0 || nums[0] < 1 {
            return Err(err("expected `<weight> <lits> 0`"));
        }
        let clause: Vec<Lit> = nums[1..nums.len() - 1]
            .iter()
            .map(|&x| Lit::from_dimacs(x))
            .collect();
        if clause.iter().any(|l| l.var() >= w.num_vars) {
            return Err(err("literal out of range"));
        }
        let weight = nums[0] as u64;
        if weight >= top {
            w.add_hard(clause);
        } else {
            w.add_soft(clause, weight);
        }
    }
    Ok(w)
}

/// Reads the `v` lines of solver output: either signed literals
/// (`v 1 -2 0`) or a single 0/1 string of length `num_vars` (`v 10`).
/// Variables not mentioned are false.
pub fn import_model(text: &str, num_vars: u32) -> Result<Vec<bool>, DimacsError> {
    let mut model = vec![false; num_vars as usize];
    let mut seen = false;
    for (n, line) in text.lines().enumerate() {
        let Some(rest) = line
            .strip_prefix("v ")
            .or_else(|| (line == "v").then_some(""))
        else {
            continue;
        };
        seen = true;
        let toks: Vec<&str> = rest.split_whitespace().collect();
        if let [bits] = toks.as_slice() {
            if bits.len() == num_vars as usize
                && bits.len() > 1
                && bits.chars().all(|c| c == '0' || c == '1')
            {
                for (m, c) in model.iter_mut().zip(bits.chars()) {
                    *m = c == '1';
                }
                continue;
            }
        }
        for t in toks {
            let x: i64 = t.parse().map_err(|_| DimacsError::Malformed {
                line: n + 1,
                message: format!("bad literal `{t}`"),
            })?;
            if x == 0 {
                continue;
            }
            let l = Lit::from_dimacs(x);
            if l.var() >= num_vars {
                return Err(DimacsError::Malformed {
                    line: n + 1,
                    message: format!("literal `{t}` out of range"),
                });
            }
            model[l.var() as usize] = l.is_positive();
        }
    }
    if seen {
        Ok(model)
    } else {
        Err(DimacsError::NoModel)
    }
}

static EXTERNAL_RUN: AtomicU64 = AtomicU64::new(0);

/// Runs an external solver. `{}` in `cmd` is replaced by the path of a
/// temporary WCNF file; the command runs under `sh -c`. The returned model is
/// re-checked against the hard clauses.
pub fn solve_external(w: &Wcnf, cmd: &str) -> Result<Outcome, DimacsError> {
    let run = EXTERNAL_RUN.fetch_add(1, Ordering::Relaxed);
    let path: PathBuf =
        std::env::temp_dir().join(format!("ftlearn-{}-{run}.wcnf", std::process::id()));
    std::fs::write(&path, export_wcnf(w))?;
    let full = if cmd.contains("{}") {
        cmd.replace("{}", &path.display().to_string())
    } else {
        format!("{cmd} {}", path.display())
    };
    let output = Command::new("sh").arg("-c").arg(&full).output();
    let _ = std::fs::remove_file(&path);
    let text = String::from_utf8_lossy(&output?.stdout).into_owned();
    let status_line = text
        .lines()
        .find_map(|l| l.strip_prefix("s "))
        .unwrap_or("")
        .trim()
        .to_string();
    let status = match status_line.as_str() {
        "OPTIMUM FOUND" => Status::Optimum,
        "UNSATISFIABLE" => return Ok(Outcome::without_model(Status::Unsatisfiable)),
        "SATISFIABLE" => Status::SatisfiableBounded,
        _ => return Ok(Outcome::without_model(Status::Timeout)),
    };
    let model = import_model(&text, w.num_vars)?;
    if !w.satisfies_hard(&model) {
        return Err(DimacsError::InvalidModel);
    }
    let cost = w.cost(&model);
    Ok(Outcome {
        status,
        model: Some(model),
        cost: Some(cost),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_var() -> Wcnf {
        let mut w = Wcnf::new();
        let x = w.new_var();
        let y = w.new_var();
        w.add_hard([x, y]);
        w.add_soft([!x], 2);
        w.add_soft([!y], 1);
        w
    }

    #[test]
    fn golden_export() {
        assert_eq!(
            export_wcnf(&two_var()),
            "p wcnf 2 3 4\n4 1 2 0\n2 -1 0\n1 -2 0\n"
        );
        assert_eq!(parse_wcnf(&export_wcnf(&two_var())).unwrap(), two_var());
    }

    #[test]
    fn model_lines() {
        assert_eq!(
            import_model("s OPTIMUM FOUND\nv 1 -2\n", 2).unwrap(),
            vec![true, false]
        );
        assert_eq!(import_model("v 10\n", 2).unwrap(), vec![true, false]);
        assert_eq!(import_model("v -1 2 0\n", 2).unwrap(), vec![false, true]);
        assert!(matches!(
            import_model("o 3\n", 2),
            Err(DimacsError::NoModel)
        ));
        assert!(matches!(
            import_model("v 1 x\n", 2),
            Err(DimacsError::Malformed { .. })
        ));
        assert!(matches!(
            import_model("v 5\n", 2),
            Err(DimacsError::Malformed { .. })
        ));
    }

    #[test]
    fn malformed_wcnf() {
        assert!(parse_wcnf("1 1 0\n").is_err());
        assert!(parse_wcnf("p wcnf 1 1 4\n2 3 0\n").is_err());
    }

    #[test]
    fn external_solver_contract() {
        let w = two_var();
        let o = solve_external(&w, "test -s {} && printf 's OPTIMUM FOUND\\nv 01\\n'").unwrap();
        assert_eq!(o.status, Status::Optimum);
        assert_eq!(o.cost, Some(1));
        let bad = solve_external(&w, "printf 's OPTIMUM FOUND\\nv -1 -2\\n' #");
        assert!(matches!(bad, Err(DimacsError::InvalidModel)));
        let unsat = solve_external(&w, "echo 's UNSATISFIABLE' #").unwrap();
        assert_eq!(unsat.status, Status::Unsatisfiable);
    }
}
