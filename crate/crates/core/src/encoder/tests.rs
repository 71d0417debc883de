use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::bench::{brute_force_best, enumerate_formulas, DEFAULT_SPACE_BOUND};
use crate::cnf::{Lit, Wcnf};
use crate::ftl::{parse_formula, satisfied, Formula, QuantKind, Tl};
use crate::maxsat::{solve, Budget, Status};
use crate::pddl::{parse_domain, parse_instance, Domain, Fluent, Instance, State};
use crate::shapes::{gen_chains, gen_configs, ChainNode, ShapeConfig};
use crate::trace::{InstantiatedTrace, ScoredSet};

const DOMAIN: &str = "(define (domain toy) (:types a b)
    (:predicates (p ?x - a) (q ?x - a) (r ?x - a ?y - b) (o ?x)))";

fn toy() -> (Domain, Arc<Instance>, Arc<Instance>) {
    let d = parse_domain(DOMAIN).unwrap();
    let big =
        "(define (problem big) (:domain toy) (:objects a1 a2 - a b1 - b) (:init) (:goal (and)))";
    let small = "(define (problem small) (:domain toy) (:objects a1 - a) (:init) (:goal (and)))";
    let i1 = Arc::new(parse_instance(big, &d).unwrap());
    let i2 = Arc::new(parse_instance(small, &d).unwrap());
    (d, i1, i2)
}

fn state(fs: &[&str]) -> State {
    fs.iter().map(|f| Fluent::parse(f).unwrap()).collect()
}

fn trace(id: &str, i: &Arc<Instance>, states: &[&[&str]], score: f64) -> InstantiatedTrace {
    InstantiatedTrace::new(
        id,
        i.clone(),
        states.iter().map(|s| state(s)).collect(),
        score,
    )
    .unwrap()
}

fn config(d: &Domain, chain: &str, prefix: &[(QuantKind, &str)]) -> ShapeConfig {
    let r = chain.matches('(').count();
    ShapeConfig {
        chain: gen_chains(r).into_iter().find(|c| c.id() == chain).unwrap(),
        prefix: prefix.iter().map(|p| p.0).collect(),
        types: prefix
            .iter()
            .map(|p| d.types.lookup(p.1).unwrap())
            .collect(),
    }
}

const A: QuantKind = QuantKind::Forall;
const E: QuantKind = QuantKind::Exists;

/// Unit clauses selecting `f` in the encoding.
fn force(w: &mut Wcnf, vm: &VarMap, cfg: &ShapeConfig, f: &Formula) {
    fn go(w: &mut Wcnf, vm: &VarMap, cfg: &ShapeConfig, i: usize, t: &Tl) {
        match (cfg.chain.nodes[i], t) {
            (ChainNode::Connector { left, right }, Tl::Unary(u, a)) => {
                let o = vm
                    .alphabet
                    .iter()
                    .position(|c| *c == Connector::Un(*u))
                    .unwrap();
                w.add_hard([vm.c[i][o]]);
                go(w, vm, cfg, left, a);
                let _ = right;
            }
            (ChainNode::Connector { left, right }, Tl::Binary(b, l, r)) => {
                let o = vm
                    .alphabet
                    .iter()
                    .position(|c| *c == Connector::Bin(*b))
                    .unwrap();
                w.add_hard([vm.c[i][o]]);
                go(w, vm, cfg, left, l);
                go(w, vm, cfg, right, r);
            }
            (ChainNode::Predicate { .. }, Tl::Atom(p, args)) => {
                let k = vm.predicates.iter().position(|x| x == p).unwrap();
                w.add_hard([vm.pi[i][k]]);
                for s in 0..2 {
                    let v = match args.get(s) {
                        Some(a) => SlotValue::Var(a[1..].parse::<usize>().unwrap() - 1),
                        None => SlotValue::Unused,
                    };
                    let idx = vm.slot_values[s].iter().position(|x| *x == v).unwrap();
                    w.add_hard([vm.chi[i][s][idx]]);
                }
            }
            _ => panic!("formula does not fit the chain"),
        }
    }
    go(w, vm, cfg, 0, &f.core);
}

fn sat(w: &Wcnf) -> bool {
    solve(w, &Budget::default()).status != Status::Unsatisfiable
}

#[test]
fn census_of_small_encoding() {
    let d = parse_domain("(define (domain c) (:predicates (e ?x ?y)))").unwrap();
    let two = Arc::new(
        parse_instance("(define (problem two) (:domain c) (:objects o1 o2))", &d).unwrap(),
    );
    let none = Arc::new(parse_instance("(define (problem none) (:domain c))", &d).unwrap());
    let ts = ScoredSet::new(vec![
        trace("t", &two, &[&["e o1 o2"], &[]], 1.0),
        trace("u", &none, &[&[], &[]], -1.0),
    ]);
    let cfg = config(&d, "(..)", &[(A, "object")]);
    let (_, vm) = encode(&d, &ts, &cfg, &EncodeOptions::default()).unwrap();
    let c = vm.census();
    assert_eq!(c.c, default_alphabet().len());
    assert_eq!((c.pi, c.chi, c.y, c.s), (2, 4, 12, 2));
    assert_eq!(vm.envs(0), 2);
    assert_eq!(vm.envs(1), 0);
    assert!(vm.y(0, 0, 1, 1).is_some());
    assert!(vm.y(0, 1, 0, 0).is_none());
}

#[test]
fn rejects_one_sided_sets_and_infeasible_configs() {
    let (d, i1, _) = toy();
    let pos = trace("p", &i1, &[&[]], 1.0);
    let neg = trace("n", &i1, &[&[]], -1.0);
    let cfg = config(&d, ".", &[(A, "a")]);
    let o = EncodeOptions::default();
    assert!(matches!(
        encode(&d, &ScoredSet::new(vec![pos.clone()]), &cfg, &o),
        Err(EncodeError::NoNegative)
    ));
    assert!(matches!(
        encode(&d, &ScoredSet::new(vec![neg.clone()]), &cfg, &o),
        Err(EncodeError::NoPositive)
    ));
    let ts = ScoredSet::new(vec![pos, neg]);
    // Under exact typing a variable of type b only fits the second slot of r,
    // whose first slot has no variable.
    let only_b = config(&d, ".", &[(A, "b")]);
    let exact = EncodeOptions {
        strict_types: true,
        ..EncodeOptions::default()
    };
    assert!(matches!(
        encode(&d, &ts, &only_b, &exact),
        Err(EncodeError::Infeasible(_))
    ));
    assert!(encode(&d, &ts, &only_b, &o).is_ok());
    let strict = EncodeOptions {
        strict_eq4: true,
        ..EncodeOptions::default()
    };
    let ex = config(&d, ".", &[(E, "a")]);
    assert!(matches!(
        encode(&d, &ts, &ex, &strict),
        Err(EncodeError::Infeasible(_))
    ));
    let capped = EncodeOptions {
        env_cap: 1,
        ..EncodeOptions::default()
    };
    assert!(matches!(
        encode(&d, &ts, &cfg, &capped),
        Err(EncodeError::EnvCap { .. })
    ));
}

#[test]
fn scaling_rounds_half_to_even() {
    assert_eq!(scale_score(0.5, 0).unwrap(), 0);
    assert_eq!(scale_score(1.5, 0).unwrap(), 2);
    assert_eq!(scale_score(-2.5, 0).unwrap(), -2);
    assert_eq!(scale_score(0.125, 2).unwrap(), 12);
    assert!(scale_score(f64::NAN, 0).is_err());
}

#[test]
fn alphabet_parsing() {
    let a = parse_alphabet("and, U,eventually,!").unwrap();
    assert_eq!(a.len(), 4);
    assert!(parse_alphabet("and,nope").is_err());
    assert_eq!(
        parse_alphabet("H,H").unwrap(),
        vec![Connector::Un(crate::ftl::UnaryOp::Historically)]
    );
}

/// Traces where `forall x:a. p(x)` separates positive from negative.
fn separable() -> (Domain, ScoredSet) {
    let (d, i1, _) = toy();
    let ts = ScoredSet::new(vec![
        trace(
            "pos",
            &i1,
            &[&["p a1", "p a2", "q a1", "q a2"], &["q a1", "q a2"]],
            2.0,
        ),
        trace("neg", &i1, &[&["q a1", "q a2"], &["q a1"]], -1.0),
    ]);
    (d, ts)
}

#[test]
fn solves_and_decodes_separable_set() {
    let (d, ts) = separable();
    let cfg = config(&d, ".", &[(A, "a")]);
    let opts = EncodeOptions::default();
    let (w, vm) = encode(&d, &ts, &cfg, &opts).unwrap();
    let out = solve(&w, &Budget::default());
    assert_eq!(out.status, Status::Optimum);
    let f = decode(out.model.as_ref().unwrap(), &vm, &cfg, &d).unwrap();
    assert_eq!(f.to_string(), "forall x1:a. p(x1)");
    assert_eq!(vm.implied_score(out.cost.unwrap()), 2);
}

/// Forces `f` and the opposite of its true satisfaction values.
fn forced_wrong(f: &str, chain: &str, ablate: &[Family]) -> bool {
    let (d, ts) = separable();
    let f = parse_formula(f, &d).unwrap();
    let prefix: Vec<(QuantKind, &str)> = f
        .quantifiers
        .iter()
        .map(|q| (q.kind, q.ty.as_str()))
        .collect();
    let cfg = config(&d, chain, &prefix);
    let opts = EncodeOptions {
        ablate: ablate.to_vec(),
        ..EncodeOptions::default()
    };
    let (mut w, vm) = encode(&d, &ts, &cfg, &opts).unwrap();
    force(&mut w, &vm, &cfg, &f);
    let truth = satisfied(&d, &f, &ts, opts.check_options()).unwrap();
    for (s, v) in vm.s.iter().zip(truth) {
        w.add_hard([if v { !*s } else { *s }]);
    }
    sat(&w)
}

#[test]
fn semantic_families_are_each_needed() {
    use Family::*;
    let atom = "forall x1:a. p(x1)";
    assert!(!forced_wrong(atom, ".", &[Discrimination]));
    assert!(forced_wrong(atom, ".", &[Discrimination, Satisfaction]));
    assert!(forced_wrong(atom, ".", &[Discrimination, Atoms]));
    let neg = "forall x1:a. !p(x1)";
    assert!(!forced_wrong(neg, "(..)", &[Discrimination]));
    assert!(forced_wrong(neg, "(..)", &[Discrimination, Connectors]));
    let until = "forall x1:a. q(x1) U p(x1)";
    assert!(!forced_wrong(until, "(..)", &[Discrimination]));
    assert!(forced_wrong(until, "(..)", &[Discrimination, Connectors]));
}

fn with_units(
    chain: &str,
    prefix: &[(QuantKind, &str)],
    ablate: &[Family],
    units: impl Fn(&VarMap) -> Vec<Lit>,
) -> bool {
    let (d, ts) = separable();
    let cfg = config(&d, chain, prefix);
    let opts = EncodeOptions {
        ablate: ablate.to_vec(),
        ..EncodeOptions::default()
    };
    let (mut w, vm) = encode(&d, &ts, &cfg, &opts).unwrap();
    for l in units(&vm) {
        w.add_hard([l]);
    }
    sat(&w)
}

#[test]
fn structural_families_are_each_needed() {
    use Family::*;
    let op = |vm: &VarMap, c: Connector| vm.alphabet.iter().position(|x| *x == c).unwrap();
    let not = Connector::Un(crate::ftl::UnaryOp::Not);
    let and = Connector::Bin(crate::ftl::BinaryOp::And);

    let two_ops = |vm: &VarMap| vec![vm.c[0][0], vm.c[0][1]];
    assert!(!with_units("(..)", &[(A, "a")], &[], two_ops));
    assert!(with_units("(..)", &[(A, "a")], &[ExactlyOne], two_ops));

    // p with a variable in its unused second slot.
    let bad_slot = |vm: &VarMap| {
        let p = vm.predicates.iter().position(|x| x == "p").unwrap();
        let v = vm.slot_values[1]
            .iter()
            .position(|x| *x == SlotValue::Var(1))
            .unwrap();
        vec![vm.pi[0][p], vm.chi[0][1][v]]
    };
    assert!(!with_units(".", &[(A, "a"), (A, "b")], &[], bad_slot));
    assert!(with_units(".", &[(A, "a"), (A, "b")], &[Types], bad_slot));

    let all_true = |vm: &VarMap| vm.s.clone();
    assert!(!with_units(".", &[(A, "a")], &[], all_true));
    assert!(with_units(".", &[(A, "a")], &[Discrimination], all_true));

    let double_neg = |vm: &VarMap| vec![vm.c[0][op(vm, not)], vm.c[1][op(vm, not)]];
    assert!(!with_units("((..).)", &[(A, "a")], &[], double_neg));
    assert!(with_units(
        "((..).)",
        &[(A, "a")],
        &[Redundancy],
        double_neg
    ));

    let same_atoms = |vm: &VarMap| {
        let p = vm.predicates.iter().position(|x| x == "p").unwrap();
        vec![vm.c[0][op(vm, and)], vm.pi[1][p], vm.pi[2][p]]
    };
    assert!(!with_units("(..)", &[(A, "a")], &[], same_atoms));
    assert!(with_units("(..)", &[(A, "a")], &[Redundancy], same_atoms));

    // Both slots of the only atom hold the first variable.
    let hide_second = |vm: &VarMap| {
        let r = vm.predicates.iter().position(|x| x == "p").unwrap();
        vec![vm.pi[0][r]]
    };
    assert!(!with_units(".", &[(A, "a"), (A, "a")], &[], hide_second));
    assert!(with_units(
        ".",
        &[(A, "a"), (A, "a")],
        &[Visibility],
        hide_second
    ));
}

#[test]
fn degenerate_quantifier_blocks() {
    let (d, i1, i2) = toy();
    // i2 has no object of type b: a universal over b holds, an existential fails.
    let ts = ScoredSet::new(vec![
        trace("big", &i1, &[&["r a1 b1", "r a2 b1"]], 1.0),
        trace("small", &i2, &[&[]], -1.0),
    ]);
    let opts = EncodeOptions {
        ablate: vec![Family::Discrimination],
        ..EncodeOptions::default()
    };
    for (prefix, small_sat) in [
        (vec![(A, "a"), (A, "b")], true),
        (vec![(E, "a"), (E, "b")], false),
        (vec![(A, "a"), (E, "b")], false),
    ] {
        let cfg = config(&d, ".", &prefix);
        let (mut w, vm) = encode(&d, &ts, &cfg, &opts).unwrap();
        let r = vm.predicates.iter().position(|x| x == "r").unwrap();
        w.add_hard([vm.pi[0][r]]);
        w.add_hard([if small_sat { vm.s[1] } else { !vm.s[1] }]);
        assert!(sat(&w), "{prefix:?}");
        let (mut w, vm) = encode(&d, &ts, &cfg, &opts).unwrap();
        w.add_hard([vm.pi[0][r]]);
        w.add_hard([if small_sat { !vm.s[1] } else { vm.s[1] }]);
        assert!(!sat(&w), "{prefix:?}");
    }
}

#[test]
fn no_discriminative_formula_is_unsatisfiable() {
    let (d, i1, _) = toy();
    let same: &[&[&str]] = &[&["p a1"], &["q a2"]];
    let ts = ScoredSet::new(vec![
        trace("x", &i1, same, 1.0),
        trace("y", &i1, same, -1.0),
    ]);
    let cfg = config(&d, "(..)", &[(A, "a")]);
    let (w, _) = encode(&d, &ts, &cfg, &EncodeOptions::default()).unwrap();
    assert_eq!(solve(&w, &Budget::default()).status, Status::Unsatisfiable);
}

fn arb_state() -> impl Strategy<Value = Vec<&'static str>> {
    let fluents = [
        "p a1", "p a2", "q a1", "q a2", "r a1 b1", "r a2 b1", "o a1", "o b1",
    ];
    proptest::sample::subsequence(fluents.to_vec(), 0..=fluents.len())
}

fn arb_set() -> impl Strategy<Value = Vec<(bool, Vec<Vec<&'static str>>, i32)>> {
    let one = (
        any::<bool>(),
        prop::collection::vec(arb_state(), 1..=3),
        -3i32..=3,
    );
    prop::collection::vec(one, 2..=4)
}

fn build_set(raw: &[(bool, Vec<Vec<&'static str>>, i32)]) -> (Domain, ScoredSet) {
    let (d, i1, i2) = toy();
    let mut traces = Vec::new();
    for (n, (big, states, score)) in raw.iter().enumerate() {
        let inst = if *big { &i1 } else { &i2 };
        let states: Vec<State> = states
            .iter()
            .map(|s| {
                state(s)
                    .iter()
                    .filter(|f| {
                        inst.objects.contains_key(&f.args[0])
                            && f.args.iter().all(|a| inst.objects.contains_key(a))
                    })
                    .cloned()
                    .collect()
            })
            .collect();
        // The first two traces fix one positive and one negative.
        let score = match n {
            0 => score.abs() as f64,
            1 => -(score.abs().max(1)) as f64,
            _ => *score as f64,
        };
        traces.push(InstantiatedTrace::new(format!("t{n}"), inst.clone(), states, score).unwrap());
    }
    (d, ScoredSet::new(traces))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn optimum_matches_exhaustive_search(
        raw in arb_set(),
        r in 0usize..=2,
        q in 1usize..=2,
        pick in any::<prop::sample::Index>(),
        ops in proptest::sample::subsequence(default_alphabet(), 1..=4),
        expanded in any::<bool>(),
    ) {
        let (d, ts) = build_set(&raw);
        let opts = EncodeOptions {
            alphabet: ops,
            temporal: if expanded { TemporalEncoding::Expanded } else { TemporalEncoding::Recursive },
            ..EncodeOptions::default()
        };
        let configs: Vec<ShapeConfig> = gen_configs(&d, r, q)
            .into_iter()
            .filter(|c| !enumerate_formulas(&d, c, &opts).is_empty())
            .collect();
        let cfg = &configs[pick.index(configs.len())];
        let brute = brute_force_best(&d, &ts, cfg, &opts, DEFAULT_SPACE_BOUND).unwrap();
        let encoded = encode(&d, &ts, cfg, &opts);
        let (w, vm) = match encoded {
            other => other.unwrap(),
        };
        let out = solve(&w, &Budget::default());
        match brute {
            None => prop_assert_eq!(out.status, Status::Unsatisfiable),
            Some(b) => {
                prop_assert_eq!(out.status, Status::Optimum);
                let model = out.model.unwrap();
                prop_assert_eq!(vm.implied_score(out.cost.unwrap()), b.score);
                let f = decode(&model, &vm, cfg, &d).unwrap();
                let truth = satisfied(&d, &f, &ts, opts.check_options()).unwrap();
                let claimed: Vec<bool> = vm.s.iter().map(|l| l.eval(&model)).collect();
                prop_assert_eq!(truth, claimed);
                prop_assert!(b.formulas.contains(&f), "{} not among {:?}", f, b.formulas.iter().map(|x| x.to_string()).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn temporal_encodings_agree(raw in arb_set(), pick in any::<prop::sample::Index>()) {
        let (d, ts) = build_set(&raw);
        let configs = gen_configs(&d, 1, 1);
        let cfg = &configs[pick.index(configs.len())];
        let costs: Vec<Option<u64>> = [TemporalEncoding::Recursive, TemporalEncoding::Expanded]
            .into_iter()
            .map(|temporal| {
                let opts = EncodeOptions { temporal, ..EncodeOptions::default() };
                encode(&d, &ts, cfg, &opts).ok().and_then(|(w, _)| solve(&w, &Budget::default()).cost)
            })
            .collect();
        prop_assert_eq!(costs[0], costs[1]);
    }
}

#[test]
fn ties_prefer_unary_connectors() {
    let (d, big, _) = toy();
    // `F p(x1)` and e.g. `q(x1) U p(x1)` separate equally well.
    let ts = ScoredSet::new(vec![
        trace("pos", &big, &[&["q a1", "q a2"], &["p a1", "p a2"]], 1.0),
        trace("neg", &big, &[&["q a1", "q a2"], &[]], -1.0),
    ]);
    let cfg = config(&d, "(..)", &[(A, "a")]);
    let opts = EncodeOptions::default();
    let (w, vm) = encode(&d, &ts, &cfg, &opts).unwrap();
    assert_eq!(vm.tie_factor, 2);
    let out = solve(&w, &Budget::default());
    assert_eq!(out.status, Status::Optimum);
    assert_eq!(vm.implied_score(out.cost.unwrap()), 1);
    let f = decode(out.model.as_ref().unwrap(), &vm, &cfg, &d).unwrap();
    assert!(matches!(f.core, Tl::Unary(..)), "{f}");

    let plain = EncodeOptions {
        tie_break: false,
        ..EncodeOptions::default()
    };
    let (w, vm) = encode(&d, &ts, &cfg, &plain).unwrap();
    assert_eq!(vm.tie_factor, 1);
    assert_eq!(
        vm.implied_score(solve(&w, &Budget::default()).cost.unwrap()),
        1
    );
}
