//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Pass criterion numbers as arguments to
//! run a subset, e.g. `cargo test --test acceptance -- 1 3`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use ftlearn::bench::{
    brute_force_best, cover_formula, evaluate, gen_setcover_instance, min_cover, set_type,
    Candidate, DEFAULT_SPACE_BOUND,
};
use ftlearn::cnf::{Lit, Wcnf};
use ftlearn::encoder::TemporalEncoding;
use ftlearn::ftl::{
    holds, parse_formula, score, BinaryOp, CheckOptions, Formula, QuantKind, Quantifier, Tl,
    UnaryOp,
};
use ftlearn::learner::{find_formula, learn, search_space, unscale, Fail, LearnOptions};
use ftlearn::maxsat::{solve, Budget, Status};
use ftlearn::pddl::{parse_domain, parse_instance, Domain, Fluent, Instance, State};
use ftlearn::preprocess::{preprocess, split_predicates, PreprocessOptions, SplitArity};
use ftlearn::shapes::{gen_chains, ShapeConfig};
use ftlearn::trace::{read_trace_dir, InstantiatedTrace, ScoredSet};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn read_domain(path: &Path) -> Domain {
    parse_domain(&std::fs::read_to_string(path).expect("fixture domain"))
        .expect("fixture domain parses")
}

fn states(raw: &[&[&str]]) -> Vec<State> {
    raw.iter()
        .map(|s| {
            s.iter()
                .map(|f| Fluent::parse(f).expect("fluent"))
                .collect()
        })
        .collect()
}

/// Traces of `agent` score +1, traces of every other agent score -1.
fn agent_set(root: &Path, d: &Domain, agents: &[&str], agent: &str, split: &str) -> ScoredSet {
    let mut out = Vec::new();
    for a in agents {
        for mut t in
            read_trace_dir(&root.join("traces").join(a).join(split), d).expect("fixture traces")
        {
            t.score = if *a == agent { 1.0 } else { -1.0 };
            out.push(t);
        }
    }
    ScoredSet::new(out)
}

// 1 -------------------------------------------------------------------------

fn synthetic() -> (Domain, ScoredSet) {
    let d = parse_domain(
        "(define (domain syn) (:requirements :strips :typing) (:types a b)
           (:predicates (p ?x - a) (q ?y - b) (r ?x - a ?y - b)))",
    )
    .unwrap();
    let i = Arc::new(
        parse_instance(
            "(define (problem syn1) (:domain syn) (:objects a1 a2 - a b1 - b) (:init) (:goal (and)))",
            &d,
        )
        .unwrap(),
    );
    let raw: Vec<(f64, Vec<&[&str]>)> = vec![
        (1.0, vec![&["p a1"], &["p a1", "r a1 b1"], &["q b1"]]),
        (2.0, vec![&[], &["p a2"], &["p a2", "q b1"], &["r a2 b1"]]),
        (0.5, vec![&["r a1 b1"], &["p a1"], &["p a2"]]),
        (-1.0, vec![&["p a1", "p a2"], &["q b1"]]),
        (-1.5, vec![&[], &["r a2 b1"], &[], &["p a1"]]),
    ];
    let ts = raw
        .into_iter()
        .enumerate()
        .map(|(k, (s, st))| {
            InstantiatedTrace::new(format!("t{k}"), i.clone(), states(&st), s).unwrap()
        })
        .collect();
    (d, ScoredSet::new(ts))
}

fn oracle_equivalence() -> Outcome {
    let (d, ts) = synthetic();
    let space = search_space(&d, 2, 2);
    let (mut found, mut fails) = (0, 0);
    let variants = [
        (TemporalEncoding::Recursive, false),
        (TemporalEncoding::Expanded, false),
        (TemporalEncoding::Recursive, true),
    ];
    for (temporal, strict_types) in variants {
        let mut opts = LearnOptions::default();
        // Weights such as 0.5 and -1.5 need one decimal digit to stay exact.
        opts.encode.scale_digits = 1;
        opts.encode.temporal = temporal;
        opts.encode.strict_types = strict_types;
        let check = opts.encode.check_options();
        for (_, _, cfg) in &space {
            let label = format!(
                "{} ({temporal:?}, strict types {strict_types})",
                cfg.display(&d)
            );
            let attempt = find_formula(&d, &ts, cfg, &opts).map_err(|e| format!("{label}: {e}"))?;
            let brute = brute_force_best(&d, &ts, cfg, &opts.encode, DEFAULT_SPACE_BOUND)
                .map_err(|e| format!("{label}: {e}"))?;
            match (attempt.result, brute) {
                (Ok(f), Some(b)) => {
                    let checked = score(&d, &f.formula, &ts, check).map_err(|e| e.to_string())?;
                    ensure(f.optimal, || format!("{label}: solver stopped early"))?;
                    ensure(
                        checked == f.score
                            && unscale(f.scaled_score, opts.encode.scale_digits) == checked,
                        || {
                            format!(
                                "{label}: {} checker {checked} vs solver {}",
                                f.formula, f.scaled_score
                            )
                        },
                    )?;
                    ensure(f.scaled_score == b.score, || {
                        format!(
                            "{label}: solver optimum {} vs brute force {}",
                            f.scaled_score, b.score
                        )
                    })?;
                    ensure(b.formulas.contains(&f.formula), || {
                        format!("{label}: {} not among optima", f.formula)
                    })?;
                    found += 1;
                }
                (Err(Fail::Unsatisfiable | Fail::Infeasible(_)), None) => fails += 1,
                (r, b) => {
                    return Err(format!(
                        "{label}: solver {r:?} vs brute force {:?}",
                        b.map(|b| b.score)
                    ))
                }
            }
        }
    }
    Ok(format!(
        "{} configurations x 3 encodings, {found} optima matched, {fails} FAIL on both sides",
        space.len()
    ))
}

// 2 -------------------------------------------------------------------------

fn random_wcnf(rng: &mut StdRng) -> Wcnf {
    let mut w = Wcnf::new();
    let n = rng.random_range(1..=12u32);
    w.num_vars = n;
    let clause = |rng: &mut StdRng| -> Vec<Lit> {
        (0..rng.random_range(1..=3))
            .map(|_| Lit::new(rng.random_range(0..n), rng.random_bool(0.5)))
            .collect()
    };
    for _ in 0..rng.random_range(0..=2 * n as usize) {
        let c = clause(rng);
        w.add_hard(c);
    }
    for _ in 0..rng.random_range(1..=10) {
        let c = clause(rng);
        let weight = rng.random_range(1..=9);
        w.add_soft(c, weight);
    }
    w
}

fn exhaustive(w: &Wcnf) -> Option<u64> {
    (0u32..1 << w.num_vars)
        .map(|bits| {
            (0..w.num_vars)
                .map(|v| bits >> v & 1 == 1)
                .collect::<Vec<_>>()
        })
        .filter(|m| w.satisfies_hard(m))
        .map(|m| w.cost(&m))
        .min()
}

fn maxsat_correctness() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2024);
    let (mut sat, mut unsat) = (0, 0);
    for k in 0..1500 {
        let w = random_wcnf(&mut rng);
        let got = solve(&w, &Budget::default());
        match (exhaustive(&w), got.status) {
            (Some(c), Status::Optimum) => {
                let m = got.model.as_ref().ok_or("optimum without model")?;
                ensure(
                    got.cost == Some(c) && w.satisfies_hard(m) && w.cost(m) == c,
                    || format!("instance {k}: cost {:?}, exhaustive {c}", got.cost),
                )?;
                sat += 1;
            }
            (None, Status::Unsatisfiable) => unsat += 1,
            (e, s) => return Err(format!("instance {k}: solver {s:?}, exhaustive {e:?}")),
        }
    }
    Ok(format!(
        "1500 instances ({sat} optimum, {unsat} unsatisfiable)"
    ))
}

// 3 -------------------------------------------------------------------------

/// Set Cover instances with n, m <= 4 and union = U, one per class under
/// element permutation and set reordering.
fn setcover_instances() -> Vec<(usize, Vec<Vec<usize>>)> {
    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for at in 0..n {
                let mut q = p.clone();
                q.insert(at, n - 1);
                out.push(q);
            }
        }
        out
    }
    fn multisets(lo: u32, hi: u32, m: usize) -> Vec<Vec<u32>> {
        if m == 0 {
            return vec![vec![]];
        }
        (lo..hi)
            .flat_map(|x| {
                multisets(x, hi, m - 1).into_iter().map(move |mut r| {
                    r.insert(0, x);
                    r
                })
            })
            .collect()
    }
    let mut out = Vec::new();
    for n in 1..=4usize {
        let perms = permutations(n);
        let full = (1u32 << n) - 1;
        for m in 1..=4usize {
            let mut seen = BTreeSet::new();
            for fam in multisets(0, 1 << n, m) {
                if fam.iter().fold(0, |a, b| a | b) != full {
                    continue;
                }
                let canon = perms
                    .iter()
                    .map(|p| {
                        let mut f: Vec<u32> = fam
                            .iter()
                            .map(|&s| (0..n).filter(|&e| s >> e & 1 == 1).map(|e| 1 << p[e]).sum())
                            .collect();
                        f.sort();
                        f
                    })
                    .min()
                    .unwrap();
                if seen.insert(canon.clone()) {
                    let sets = canon
                        .iter()
                        .map(|&s| (0..n).filter(|&e| s >> e & 1 == 1).map(|e| e + 1).collect())
                        .collect();
                    out.push((n, sets));
                }
            }
        }
    }
    out
}

/// For k >= c* the learner's search space contains the witness configuration
/// (all existential, the cover's types, any chain with c*-1 binary
/// connectors), so solving it to optimum decides the positive side. For
/// k < c* the search spaces are nested in k, so one complete run at
/// q = c*-1 decides every smaller k.
fn setcover_correspondence() -> Outcome {
    let instances = setcover_instances();
    let opts = LearnOptions::default();
    let mut by_cover: BTreeMap<usize, usize> = BTreeMap::new();
    let (mut pairs, mut direct) = (0, 0);
    for (n, sets) in &instances {
        let m = sets.len();
        let cover = min_cover(*n, sets).ok_or("instance without cover")?;
        let c = cover.len();
        *by_cover.entry(c).or_default() += 1;
        pairs += m;
        let task = gen_setcover_instance(*n, sets, m).map_err(|e| e.to_string())?;
        let label = format!("n={n} S={sets:?}");

        let witness = cover_formula(&cover);
        let ws = score(
            &task.domain,
            &witness,
            &task.traces,
            CheckOptions::default(),
        )
        .map_err(|e| e.to_string())?;
        ensure(ws == task.ell, || {
            format!("{label}: witness {witness} scores {ws}")
        })?;
        let cfg = ShapeConfig {
            chain: gen_chains(c - 1).into_iter().next().expect("a chain"),
            prefix: vec![QuantKind::Exists; c],
            types: cover
                .iter()
                .map(|&i| task.domain.types.lookup(&set_type(i)).expect("set type"))
                .collect(),
        };
        let a = find_formula(&task.domain, &task.traces, &cfg, &opts).map_err(|e| e.to_string())?;
        let f = a
            .result
            .map_err(|e| format!("{label}: witness configuration failed: {e:?}"))?;
        ensure(f.score >= task.ell, || {
            format!("{label}: witness configuration reached only {}", f.score)
        })?;

        if c <= 2 {
            let fast = LearnOptions {
                first_perfect: true,
                ..LearnOptions::default()
            };
            let rep =
                learn(&task.domain, &task.traces, task.r, c, &fast).map_err(|e| e.to_string())?;
            ensure(
                rep.formulas.iter().any(|f| f.train_score >= task.ell),
                || format!("{label}: learn at q={c} misses ell"),
            )?;
            direct += 1;
        }
        if c >= 2 {
            let rep = learn(&task.domain, &task.traces, task.r, c - 1, &opts)
                .map_err(|e| e.to_string())?;
            ensure(rep.complete, || format!("{label}: incomplete run"))?;
            if let Some(best) = rep.formulas.iter().find(|f| f.train_score >= task.ell) {
                return Err(format!(
                    "{label}: q={} reaches ell with {}",
                    c - 1,
                    best.formula
                ));
            }
        }
    }
    Ok(format!(
        "{} instances, {pairs} (instance, k) pairs; minimum cover sizes {by_cover:?}; \
         {direct} also reached ell by a full run at k = c*",
        instances.len()
    ))
}

// 4 -------------------------------------------------------------------------

fn childsnack_reproduction() -> Outcome {
    let root = fixtures().join("childsnack");
    let d = read_domain(&root.join("domain.pddl"));
    let agents = ["gs", "ngf", "ngl"];
    let mut notes = Vec::new();
    for agent in ["gs", "ngl"] {
        let train = agent_set(&root, &d, &agents, agent, "train");
        let test = agent_set(&root, &d, &agents, agent, "test");
        ensure(
            train.positives().count() == 3 && test.positives().count() == 6,
            || "fixture sizes".into(),
        )?;
        let (pd, ptrain) = preprocess(&d, &train, PreprocessOptions::default());
        let (_, ptest) = preprocess(&d, &test, PreprocessOptions::default());
        let rep = learn(&pd, &ptrain, 3, 2, &LearnOptions::default()).map_err(|e| e.to_string())?;
        ensure(rep.complete && rep.stats.found > 0, || {
            format!("{agent}: {:?}", rep.stats)
        })?;
        ensure(search_space(&pd, 2, 2).len() <= rep.stats.configs, || {
            "config count not monotone".into()
        })?;
        let cands: Vec<Candidate> = rep
            .formulas
            .iter()
            .map(|f| Candidate::new(f.formula.clone()))
            .collect();
        let ev =
            evaluate(&pd, &cands, &ptest, CheckOptions::default()).map_err(|e| e.to_string())?;
        let best = ev
            .rows
            .iter()
            .max_by(|a, b| a.accuracy.total_cmp(&b.accuracy))
            .ok_or_else(|| format!("{agent}: no formula"))?;
        ensure(best.accuracy == 100.0, || {
            format!(
                "{agent}: best test accuracy {}% ({})",
                best.accuracy, best.formula
            )
        })?;
        notes.push(format!(
            "{agent}: {} formulas, 100% with `{}`",
            rep.formulas.len(),
            best.formula
        ));
    }
    Ok(notes.join("; "))
}

// 5 -------------------------------------------------------------------------

fn alpha_normal(f: &Formula) -> Formula {
    let names: BTreeMap<String, String> = f
        .quantifiers
        .iter()
        .enumerate()
        .map(|(i, q)| (q.var.clone(), format!("v{i}")))
        .collect();
    let rn = |v: &str| names.get(v).cloned().unwrap_or_else(|| v.to_string());
    Formula::new(
        f.quantifiers
            .iter()
            .map(|q| Quantifier {
                var: rn(&q.var),
                ..q.clone()
            })
            .collect(),
        f.core.rename(&rn),
    )
}

fn spanner_unary() -> Outcome {
    let root = fixtures().join("spanner");
    let d = read_domain(&root.join("domain.pddl"));
    let train = agent_set(&root, &d, &["all", "sme", "sgl"], "all", "train");
    let po = PreprocessOptions {
        split: Some(SplitArity::One),
        ..PreprocessOptions::default()
    };
    let (pd, ptrain) = preprocess(&d, &train, po);
    let expected = alpha_normal(
        &parse_formula("forall x:spanner. F carrying_2(x)", &pd).map_err(|e| e.to_string())?,
    );
    let rep = learn(&pd, &ptrain, 1, 1, &LearnOptions::default()).map_err(|e| e.to_string())?;
    let pos = rep
        .formulas
        .iter()
        .position(|f| alpha_normal(&f.formula) == expected);
    match pos {
        Some(k) => Ok(format!(
            "rank {} of {}, train score {}",
            k + 1,
            rep.formulas.len(),
            rep.formulas[k].train_score
        )),
        None => Err(format!(
            "not found among {:?}",
            rep.formulas
                .iter()
                .map(|f| f.formula.to_string())
                .collect::<Vec<_>>()
        )),
    }
}

// 6 -------------------------------------------------------------------------

fn all_served() -> Outcome {
    let root = fixtures().join("childsnack");
    let d = read_domain(&root.join("domain.pddl"));
    let f = parse_formula("forall x:child. F served(x)", &d).map_err(|e| e.to_string())?;
    let opts = CheckOptions::default();
    let mut n = 0;
    let mut truncated = 0;
    for agent in ["gs", "ngf", "ngl"] {
        for split in ["train", "test"] {
            for t in read_trace_dir(&root.join("traces").join(agent).join(split), &d)
                .map_err(|e| e.to_string())?
            {
                let solved = t
                    .instance
                    .goal
                    .is_subset(t.states.last().expect("non-empty"));
                ensure(solved, || format!("{agent}/{}: not a solution trace", t.id))?;
                ensure(holds(&d, &t, &f, opts).map_err(|e| e.to_string())?, || {
                    format!("{agent}/{}: false", t.id)
                })?;
                n += 1;
                // Drop states from the end until some child is unserved.
                let mut cut = t.clone();
                while cut.states.len() > 1 && t.instance.goal.is_subset(cut.states.last().unwrap())
                {
                    cut.states.pop();
                }
                ensure(
                    !holds(&d, &cut, &f, opts).map_err(|e| e.to_string())?,
                    || format!("{agent}/{}: true on a truncated trace", t.id),
                )?;
                truncated += 1;
            }
        }
    }
    Ok(format!(
        "true on {n} solution traces, false on {truncated} truncated ones"
    ))
}

// 7 -------------------------------------------------------------------------

fn random_tl(rng: &mut StdRng, depth: usize) -> Tl {
    if depth == 0 || rng.random_bool(0.3) {
        return match rng.random_range(0..4) {
            0 => Tl::atom("p", ["x"]),
            1 => Tl::atom("q", ["y"]),
            2 => Tl::atom("r", ["x", "y"]),
            _ => Tl::True,
        };
    }
    if rng.random_bool(0.5) {
        let op = UnaryOp::ALL[rng.random_range(0..UnaryOp::ALL.len())];
        Tl::un(op, random_tl(rng, depth - 1))
    } else {
        let op = BinaryOp::ALL[rng.random_range(0..BinaryOp::ALL.len())];
        Tl::bin(op, random_tl(rng, depth - 1), random_tl(rng, depth - 1))
    }
}

fn semantic_identities() -> Outcome {
    let d = parse_domain(
        "(define (domain sem) (:requirements :strips :typing) (:types a b)
           (:predicates (p ?x - a) (q ?y - b) (r ?x - a ?y - b)))",
    )
    .unwrap();
    let inst: Arc<Instance> = Arc::new(
        parse_instance("(define (problem s1) (:domain sem) (:objects a1 a2 - a b1 b2 - b) (:init) (:goal (and)))", &d)
            .unwrap(),
    );
    let fluents: Vec<Fluent> = [
        "p a1", "p a2", "q b1", "q b2", "r a1 b1", "r a1 b2", "r a2 b1", "r a2 b2",
    ]
    .iter()
    .map(|f| Fluent::parse(f).unwrap())
    .collect();
    let q = |kind, var: &str, ty: &str| Quantifier {
        kind,
        var: var.into(),
        ty: ty.into(),
    };
    let (all, ex) = (QuantKind::Forall, QuantKind::Exists);
    let opts = CheckOptions::default();
    let mut rng = StdRng::seed_from_u64(7);
    let mut checks = 0;
    for k in 0..10_000 {
        let len = rng.random_range(1..=5);
        let st: Vec<State> = (0..len)
            .map(|_| {
                fluents
                    .iter()
                    .filter(|_| rng.random_bool(0.4))
                    .cloned()
                    .collect()
            })
            .collect();
        let t = InstantiatedTrace::new("r", inst.clone(), st, 1.0).unwrap();
        let phi = random_tl(&mut rng, 3);
        let (k1, k2) = [(all, all), (ex, ex), (all, ex), (ex, all)][rng.random_range(0..4)];
        let prefix = vec![q(k1, "x", "a"), q(k2, "y", "b")];
        let h = |core: Tl| holds(&d, &t, &Formula::new(prefix.clone(), core), opts).unwrap();
        let not = Tl::not;
        let pairs = [
            (
                Tl::un(UnaryOp::Eventually, phi.clone()),
                Tl::bin(BinaryOp::Until, Tl::True, phi.clone()),
            ),
            (
                Tl::un(UnaryOp::Always, phi.clone()),
                not(Tl::un(UnaryOp::Eventually, not(phi.clone()))),
            ),
            (
                Tl::un(UnaryOp::Historically, phi.clone()),
                not(Tl::un(UnaryOp::Once, not(phi.clone()))),
            ),
            (
                Tl::un(UnaryOp::Once, phi.clone()),
                not(Tl::un(UnaryOp::Historically, not(phi.clone()))),
            ),
        ];
        for (a, b) in pairs {
            ensure(h(a.clone()) == h(b.clone()), || {
                format!("pair {k}: {a} vs {b}")
            })?;
            checks += 1;
        }
        if k1 == k2 {
            let swapped = Formula::new(vec![prefix[1].clone(), prefix[0].clone()], phi.clone());
            ensure(
                h(phi.clone()) == holds(&d, &t, &swapped, opts).unwrap(),
                || format!("pair {k}: commutation of {phi}"),
            )?;
            checks += 1;
        }
    }
    Ok(format!(
        "10000 (formula, trace) pairs, {checks} identity checks"
    ))
}

// 8 -------------------------------------------------------------------------

fn fluent_count() -> Outcome {
    let d = parse_domain("(define (domain w) (:predicates (w ?a ?b ?c ?d)))").unwrap();
    let objs = ["o1", "o2", "o3", "o4", "o5"];
    let inst = Arc::new(
        parse_instance(
            "(define (problem w1) (:domain w) (:objects o1 o2 o3 o4 o5) (:init) (:goal (and)))",
            &d,
        )
        .unwrap(),
    );
    let mut full = State::new();
    for a in objs {
        for b in objs {
            for c in objs {
                for e in objs {
                    full.insert(Fluent::new("w", [a, b, c, e]));
                }
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(11);
    let sparse: State = full
        .iter()
        .filter(|_| rng.random_bool(0.05))
        .cloned()
        .collect();
    let ts = ScoredSet::new(vec![InstantiatedTrace::new(
        "w",
        inst,
        vec![full, sparse.clone()],
        1.0,
    )
    .unwrap()]);
    let (sd, sts) = split_predicates(&d, &ts, SplitArity::Two);
    let names: Vec<&str> = sd.predicates.keys().map(String::as_str).collect();
    ensure(
        names == ["w_12", "w_13", "w_14", "w_23", "w_24", "w_34"],
        || format!("split predicates {names:?}"),
    )?;
    let st = &sts.traces[0].states;
    ensure(st[0].len() == 6 * 25, || {
        format!("full state projects to {} fluents", st[0].len())
    })?;
    let expected: usize = (0..4)
        .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
        .map(|(i, j)| {
            sparse
                .iter()
                .map(|f| (f.args[i].clone(), f.args[j].clone()))
                .collect::<BTreeSet<_>>()
                .len()
        })
        .sum();
    ensure(st[1].len() == expected, || {
        format!("sparse state: {} fluents, expected {expected}", st[1].len())
    })?;
    Ok(format!(
        "6 split predicates; 150 fluents from the full state; {expected} from a {}-fluent state",
        sparse.len()
    ))
}

// ---------------------------------------------------------------------------

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        (
            "encoder-checker oracle equivalence (r<=2, q<=2)",
            oracle_equivalence,
        ),
        (
            "MaxSAT solver vs exhaustive enumeration",
            maxsat_correctness,
        ),
        (
            "Set Cover correspondence (n, m <= 4)",
            setcover_correspondence,
        ),
        (
            "Childsnack GS/NGL 100% test accuracy (q=2, r=3)",
            childsnack_reproduction,
        ),
        ("Spanner unary formula (split 1, q=1, r=1)", spanner_unary),
        (
            "every child served on Childsnack solution traces",
            all_served,
        ),
        ("temporal and quantifier identities", semantic_identities),
        ("fluent count after pairwise splitting", fluent_count),
    ];
    let only: BTreeSet<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let id = k + 1;
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS [{id}] {name}: {detail} ({secs:.1}s)"),
            Err(why) => {
                failed += 1;
                println!("FAIL [{id}] {name}: {why} ({secs:.1}s)");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
