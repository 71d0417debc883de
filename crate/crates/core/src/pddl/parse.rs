//! Parser for the typed STRIPS subset of PDDL.

use std::collections::{BTreeMap, HashMap};

use super::model::{
    ActionSchema, Atom, Domain, Fluent, Instance, Predicate, State, TypeId, TypeTree, ROOT_TYPE,
};
use super::sexpr::{read_all, Pos, SExpr};
use super::PddlError;

const SUPPORTED_REQUIREMENTS: &[&str] = &[":strips", ":typing"];

fn err_at(pos: Pos, message: impl Into<String>) -> PddlError {
    PddlError::Syntax {
        line: pos.line,
        col: pos.col,
        message: message.into(),
    }
}

fn atom_at<'a>(e: &'a SExpr, what: &str) -> Result<&'a str, PddlError> {
    e.as_atom()
        .ok_or_else(|| err_at(e.pos(), format!("expected {what}, found a list")))
}

fn list_at<'a>(e: &'a SExpr, what: &str) -> Result<&'a [SExpr], PddlError> {
    e.as_list().ok_or_else(|| {
        err_at(
            e.pos(),
            format!("expected {what}, found `{}`", e.as_atom().unwrap_or("")),
        )
    })
}

/// Splits the single top-level `(define (<kind> name) ...)` form.
fn define_block<'a>(exprs: &'a [SExpr], kind: &str) -> Result<(String, &'a [SExpr]), PddlError> {
    let top = match exprs {
        [one] => one,
        [] => return Err(err_at(Pos { line: 1, col: 1 }, "empty input")),
        [_, second, ..] => return Err(err_at(second.pos(), "trailing input after define")),
    };
    let items = list_at(top, "(define ...)")?;
    if items.first().and_then(SExpr::as_atom) != Some("define") {
        return Err(err_at(top.pos(), "expected (define ...)"));
    }
    let header = items
        .get(1)
        .ok_or_else(|| err_at(top.pos(), format!("missing ({kind} <name>)")))?;
    let h = list_at(header, "header")?;
    if h.len() != 2 || h[0].as_atom() != Some(kind) {
        return Err(err_at(header.pos(), format!("expected ({kind} <name>)")));
    }
    Ok((atom_at(&h[1], "name")?.to_string(), &items[2..]))
}

/// Parses `a b - t c - u d` into `(name, type-name)` pairs; untyped names get the root type.
fn typed_list(items: &[SExpr]) -> Result<Vec<(String, String, Pos)>, PddlError> {
    let mut out = Vec::new();
    let mut pending: Vec<(String, Pos)> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let e = &items[i];
        let sym = atom_at(e, "name")?;
        if sym == "-" {
            let ty = items
                .get(i + 1)
                .ok_or_else(|| err_at(e.pos(), "missing type after `-`"))?;
            if ty.head() == Some("either") {
                return Err(PddlError::Unsupported("`either` types".into()));
            }
            let ty = atom_at(ty, "type name")?;
            if pending.is_empty() {
                return Err(err_at(e.pos(), "`-` without preceding names"));
            }
            for (n, p) in pending.drain(..) {
                out.push((n, ty.to_string(), p));
            }
            i += 2;
        } else {
            pending.push((sym.to_string(), e.pos()));
            i += 1;
        }
    }
    for (n, p) in pending {
        out.push((n, ROOT_TYPE.to_string(), p));
    }
    Ok(out)
}

fn parse_types(items: &[SExpr]) -> Result<TypeTree, PddlError> {
    let decls = typed_list(items)?;
    let mut parent_of: BTreeMap<String, String> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    for (name, parent, pos) in &decls {
        if name == ROOT_TYPE {
            if parent != ROOT_TYPE {
                return Err(err_at(*pos, "`object` cannot have a parent"));
            }
            continue;
        }
        if let Some(prev) = parent_of.get(name) {
            if prev != parent {
                return Err(err_at(
                    *pos,
                    format!("type `{name}` declared with two parents"),
                ));
            }
            continue;
        }
        parent_of.insert(name.clone(), parent.clone());
        order.push(name.clone());
    }
    for (name, parent, pos) in &decls {
        if parent != ROOT_TYPE && !parent_of.contains_key(parent) {
            return Err(err_at(
                *pos,
                format!("undeclared type `{parent}` (parent of `{name}`)"),
            ));
        }
    }
    // Insert parents before children, keeping declaration order otherwise.
    let mut tt = TypeTree::new();
    let mut visiting = Vec::new();
    fn insert(
        name: &str,
        parent_of: &BTreeMap<String, String>,
        tt: &mut TypeTree,
        visiting: &mut Vec<String>,
    ) -> Result<TypeId, PddlError> {
        if let Some(id) = tt.get(name) {
            return Ok(id);
        }
        if visiting.iter().any(|v| v == name) {
            return Err(PddlError::Invalid(format!(
                "cyclic type declaration through `{name}`"
            )));
        }
        visiting.push(name.to_string());
        let parent = &parent_of[name];
        let pid = if parent == ROOT_TYPE {
            tt.root()
        } else {
            insert(parent, parent_of, tt, visiting)?
        };
        visiting.pop();
        tt.add(name, pid)
    }
    for name in &order {
        insert(name, &parent_of, &mut tt, &mut visiting)?;
    }
    Ok(tt)
}

fn strip_var(e: &SExpr) -> Result<&str, PddlError> {
    let s = atom_at(e, "variable")?;
    s.strip_prefix('?')
        .ok_or_else(|| err_at(e.pos(), format!("expected a `?variable`, found `{s}`")))
}

/// Parses a conjunction of literals: `(and l1 l2 ...)`, a single literal or `()`.
fn conjunction(e: &SExpr) -> Result<Vec<(bool, &[SExpr], Pos)>, PddlError> {
    let items = list_at(e, "condition")?;
    if items.is_empty() {
        return Ok(vec![]);
    }
    if items[0].as_atom() == Some("and") {
        let mut out = Vec::new();
        for c in &items[1..] {
            out.extend(conjunction(c)?);
        }
        return Ok(out);
    }
    if items[0].as_atom() == Some("not") {
        let inner = items.get(1).ok_or_else(|| err_at(e.pos(), "empty (not)"))?;
        let inner_items = list_at(inner, "literal")?;
        return Ok(vec![(false, inner_items, inner.pos())]);
    }
    match items[0].as_atom() {
        Some("or" | "imply" | "forall" | "exists" | "when" | "=" | "increase" | "decrease") => Err(
            PddlError::Unsupported(format!("`{}` at {}", items[0].as_atom().unwrap(), e.pos())),
        ),
        _ => Ok(vec![(true, items, e.pos())]),
    }
}

fn parse_predicates(items: &[SExpr], tt: &TypeTree, domain: &mut Domain) -> Result<(), PddlError> {
    for e in items {
        let parts = list_at(e, "predicate declaration")?;
        let name = atom_at(
            parts
                .first()
                .ok_or_else(|| err_at(e.pos(), "empty predicate"))?,
            "predicate name",
        )?;
        let mut arg_types = Vec::new();
        for (_, ty, _) in typed_list(&parts[1..])? {
            arg_types.push(tt.lookup(&ty)?);
        }
        domain.add_predicate(Predicate {
            name: name.to_string(),
            arg_types,
        })?;
    }
    Ok(())
}

fn schema_atom(
    items: &[SExpr],
    pos: Pos,
    domain: &Domain,
    params: &HashMap<String, TypeId>,
) -> Result<Atom, PddlError> {
    let name = atom_at(
        items.first().ok_or_else(|| err_at(pos, "empty atom"))?,
        "predicate",
    )?;
    let pred = domain
        .predicate(name)
        .ok_or_else(|| PddlError::UnknownPredicate(name.to_string()))?;
    let args = items[1..]
        .iter()
        .map(|a| strip_var(a).map(str::to_string))
        .collect::<Result<Vec<_>, _>>()?;
    if args.len() != pred.arity() {
        return Err(PddlError::ArityMismatch {
            symbol: name.to_string(),
            expected: pred.arity(),
            found: args.len(),
        });
    }
    for (a, slot) in args.iter().zip(&pred.arg_types) {
        let ty = params
            .get(a)
            .ok_or_else(|| err_at(pos, format!("undeclared parameter `?{a}`")))?;
        if !domain.types.is_subtype(*ty, *slot) {
            return Err(PddlError::TypeMismatch(format!(
                "parameter `?{a}` of type `{}` used in slot of type `{}` of `{name}`",
                domain.types.name(*ty),
                domain.types.name(*slot)
            )));
        }
    }
    Ok(Atom {
        predicate: name.to_string(),
        args,
    })
}

fn parse_action(items: &[SExpr], pos: Pos, domain: &Domain) -> Result<ActionSchema, PddlError> {
    let name = atom_at(
        items
            .first()
            .ok_or_else(|| err_at(pos, "action without name"))?,
        "action name",
    )?;
    let mut params = Vec::new();
    let mut pre = Vec::new();
    let mut add = Vec::new();
    let mut del = Vec::new();
    let mut i = 1;
    let mut param_types = HashMap::new();
    while i < items.len() {
        let key = atom_at(&items[i], "action keyword")?;
        let val = items
            .get(i + 1)
            .ok_or_else(|| err_at(items[i].pos(), format!("missing value for {key}")))?;
        match key {
            ":parameters" => {
                for (v, ty, p) in typed_list(list_at(val, "parameter list")?)? {
                    let v = v
                        .strip_prefix('?')
                        .ok_or_else(|| err_at(p, format!("expected a `?variable`, found `{v}`")))?
                        .to_string();
                    let tid = domain.types.lookup(&ty)?;
                    if param_types.insert(v.clone(), tid).is_some() {
                        return Err(err_at(p, format!("duplicate parameter `?{v}`")));
                    }
                    params.push((v, tid));
                }
            }
            ":precondition" => {
                for (positive, lit, p) in conjunction(val)? {
                    if !positive {
                        return Err(PddlError::Unsupported(format!(
                            "negative precondition in `{name}` at {p}"
                        )));
                    }
                    pre.push(schema_atom(lit, p, domain, &param_types)?);
                }
            }
            ":effect" => {
                for (positive, lit, p) in conjunction(val)? {
                    let a = schema_atom(lit, p, domain, &param_types)?;
                    if positive {
                        add.push(a);
                    } else {
                        del.push(a);
                    }
                }
            }
            other => {
                return Err(err_at(
                    items[i].pos(),
                    format!("unsupported action field `{other}`"),
                ))
            }
        }
        i += 2;
    }
    Ok(ActionSchema {
        name: name.to_string(),
        params,
        pre,
        add,
        del,
    })
}

/// Parses a domain file.
pub fn parse_domain(text: &str) -> Result<Domain, PddlError> {
    let exprs = read_all(text).map_err(|e| err_at(e.pos, e.message))?;
    let (name, sections) = define_block(&exprs, "domain")?;
    let mut types = None;
    let mut predicates: Option<&[SExpr]> = None;
    let mut actions = Vec::new();
    for sec in sections {
        let items = list_at(sec, "domain section")?;
        let key = items
            .first()
            .and_then(SExpr::as_atom)
            .ok_or_else(|| err_at(sec.pos(), "expected a section keyword"))?;
        match key {
            ":requirements" => {
                for r in &items[1..] {
                    let r = atom_at(r, "requirement")?;
                    if !SUPPORTED_REQUIREMENTS.contains(&r) {
                        return Err(PddlError::Unsupported(format!("requirement `{r}`")));
                    }
                }
            }
            ":types" => {
                if types.is_some() {
                    return Err(err_at(sec.pos(), "duplicate :types section"));
                }
                types = Some(parse_types(&items[1..])?);
            }
            ":predicates" => predicates = Some(&items[1..]),
            ":action" => actions.push((&items[1..], sec.pos())),
            other => {
                return Err(PddlError::Unsupported(format!(
                    "domain section `{other}` at {}",
                    sec.pos()
                )))
            }
        }
    }
    let tt = types.unwrap_or_default();
    let mut domain = Domain::new(name, tt.clone());
    if let Some(preds) = predicates {
        parse_predicates(preds, &tt, &mut domain)?;
    }
    for (items, pos) in actions {
        let a = parse_action(items, pos, &domain)?;
        if domain.schemas.contains_key(&a.name) {
            return Err(PddlError::Invalid(format!("duplicate action `{}`", a.name)));
        }
        domain.schemas.insert(a.name.clone(), a);
    }
    Ok(domain)
}

fn ground_fluents(e: &SExpr, domain: &Domain, inst: &Instance) -> Result<State, PddlError> {
    let mut state = State::new();
    for (positive, lit, p) in conjunction(e)? {
        if !positive {
            return Err(PddlError::Unsupported(format!("negative literal at {p}")));
        }
        let pred = atom_at(
            lit.first().ok_or_else(|| err_at(p, "empty fluent"))?,
            "predicate",
        )?;
        let args = lit[1..]
            .iter()
            .map(|a| atom_at(a, "object").map(str::to_string))
            .collect::<Result<Vec<_>, _>>()?;
        let f = Fluent {
            predicate: pred.to_string(),
            args,
        };
        domain.check_fluent(&f, inst)?;
        state.insert(f);
    }
    Ok(state)
}

/// Parses an instance file against `domain`.
pub fn parse_instance(text: &str, domain: &Domain) -> Result<Instance, PddlError> {
    let exprs = read_all(text).map_err(|e| err_at(e.pos, e.message))?;
    let (name, sections) = define_block(&exprs, "problem")?;
    let mut inst = Instance {
        name,
        domain_name: String::new(),
        objects: BTreeMap::new(),
        init: State::new(),
        goal: State::new(),
    };
    let mut init = None;
    let mut goal = None;
    for sec in sections {
        let items = list_at(sec, "problem section")?;
        let key = items
            .first()
            .and_then(SExpr::as_atom)
            .ok_or_else(|| err_at(sec.pos(), "expected a section keyword"))?;
        match key {
            ":domain" => {
                let d = atom_at(
                    items
                        .get(1)
                        .ok_or_else(|| err_at(sec.pos(), "missing domain name"))?,
                    "domain name",
                )?;
                if d != domain.name {
                    return Err(PddlError::Invalid(format!(
                        "instance refers to domain `{d}`, expected `{}`",
                        domain.name
                    )));
                }
                inst.domain_name = d.to_string();
            }
            ":objects" => {
                for (o, ty, p) in typed_list(&items[1..])? {
                    let tid = domain.types.lookup(&ty)?;
                    if inst.objects.insert(o.clone(), tid).is_some() {
                        return Err(err_at(p, format!("duplicate object `{o}`")));
                    }
                }
            }
            ":init" => init = Some(sec),
            ":goal" => {
                goal = Some(
                    items
                        .get(1)
                        .ok_or_else(|| err_at(sec.pos(), "empty goal"))?,
                )
            }
            ":requirements" => {}
            other => {
                return Err(PddlError::Unsupported(format!(
                    "problem section `{other}` at {}",
                    sec.pos()
                )))
            }
        }
    }
    if inst.domain_name.is_empty() {
        return Err(PddlError::Invalid("instance lacks (:domain ...)".into()));
    }
    if let Some(init) = init {
        let items = init.as_list().unwrap_or_default();
        let wrapped = SExpr::List(
            std::iter::once(SExpr::Atom("and".into(), init.pos()))
                .chain(items[1..].iter().cloned())
                .collect(),
            init.pos(),
        );
        inst.init = ground_fluents(&wrapped, domain, &inst)?;
    }
    if let Some(goal) = goal {
        inst.goal = ground_fluents(goal, domain, &inst)?;
    }
    Ok(inst)
}

/// Parses one ground action `(name obj ...)`.
pub fn parse_action_call(text: &str) -> Result<(String, Vec<String>), PddlError> {
    let exprs = read_all(text).map_err(|e| err_at(e.pos, e.message))?;
    let [e] = exprs.as_slice() else {
        return Err(err_at(
            Pos { line: 1, col: 1 },
            "expected a single (action obj ...)",
        ));
    };
    let items = list_at(e, "action")?;
    let name = atom_at(
        items
            .first()
            .ok_or_else(|| err_at(e.pos(), "empty action"))?,
        "action name",
    )?;
    let args = items[1..]
        .iter()
        .map(|a| atom_at(a, "object").map(str::to_string))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((name.to_string(), args))
}

/// Parses an IPC plan: one `(action obj ...)` per line, `;` comments.
pub fn parse_plan(text: &str) -> Result<Vec<(String, Vec<String>)>, PddlError> {
    let exprs = read_all(text).map_err(|e| err_at(e.pos, e.message))?;
    exprs
        .iter()
        .map(|e| {
            let items = list_at(e, "action")?;
            let name = atom_at(
                items
                    .first()
                    .ok_or_else(|| err_at(e.pos(), "empty action"))?,
                "action name",
            )?;
            let args = items[1..]
                .iter()
                .map(|a| atom_at(a, "object").map(str::to_string))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((name.to_string(), args))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = "(define (domain tiny) (:requirements :strips :typing)
        (:types block)
        (:predicates (on ?x ?y - block) (clear ?x - block))
        (:action move :parameters (?x ?y - block)
          :precondition (and (clear ?x) (clear ?y))
          :effect (and (on ?x ?y) (not (clear ?y)))))";

    #[test]
    fn parses_typed_strips() {
        let d = parse_domain(TINY).unwrap();
        assert_eq!(d.name, "tiny");
        assert_eq!(d.predicates["on"].arity(), 2);
        let mv = &d.schemas["move"];
        assert_eq!(mv.pre.len(), 2);
        assert_eq!(mv.add.len(), 1);
        assert_eq!(mv.del.len(), 1);
    }

    #[test]
    fn types_only_domain_has_no_predicates() {
        let d = parse_domain("(define (domain e) (:types t))").unwrap();
        assert!(d.predicates.is_empty());
        assert!(d.types.get("t").is_some());
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let text = TINY.replace("(on ?x ?y)", "(on ?x)");
        assert!(matches!(
            parse_domain(&text),
            Err(PddlError::ArityMismatch {
                expected: 2,
                found: 1,
                ..
            })
        ));
    }

    #[test]
    fn negative_preconditions_rejected() {
        let text = TINY.replace("(clear ?x) (clear ?y)", "(not (clear ?x)) (clear ?y)");
        assert!(matches!(
            parse_domain(&text),
            Err(PddlError::Unsupported(_))
        ));
        let req = TINY.replace(":typing", ":typing :negative-preconditions");
        assert!(matches!(parse_domain(&req), Err(PddlError::Unsupported(_))));
    }

    #[test]
    fn undeclared_type_and_duplicate_predicate() {
        let bad = "(define (domain d) (:types a) (:predicates (p ?x - b)))";
        assert!(matches!(parse_domain(bad), Err(PddlError::UndeclaredType(t)) if t == "b"));
        let dup = "(define (domain d) (:types a) (:predicates (p ?x - a) (p ?y - a)))";
        assert!(matches!(
            parse_domain(dup),
            Err(PddlError::DuplicatePredicate(_))
        ));
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_domain("(define (domain d)\n  (:types a)").unwrap_err();
        assert!(
            matches!(
                err,
                PddlError::Syntax {
                    line: 1,
                    col: 1,
                    ..
                }
            ),
            "{err:?}"
        );
    }

    #[test]
    fn instance_checks_objects_and_types() {
        let d = parse_domain(TINY).unwrap();
        let ok = "(define (problem p) (:domain tiny) (:objects a b - block) (:init (clear a)) (:goal (on a b)))";
        let i = parse_instance(ok, &d).unwrap();
        assert_eq!(i.objects.len(), 2);
        assert!(i.goal.contains(&Fluent::new("on", ["a", "b"])));
        let unknown = ok.replace("(clear a)", "(clear z)");
        assert!(
            matches!(parse_instance(&unknown, &d), Err(PddlError::UnknownObject(o)) if o == "z")
        );
        let wrong_domain = ok.replace("(:domain tiny)", "(:domain other)");
        assert!(parse_instance(&wrong_domain, &d).is_err());
    }

    #[test]
    fn plan_lines() {
        let plan = parse_plan("; cost 2\n(move a b)\n(MOVE b c)\n").unwrap();
        assert_eq!(
            plan,
            vec![
                ("move".to_string(), vec!["a".to_string(), "b".to_string()]),
                ("move".to_string(), vec!["b".to_string(), "c".to_string()]),
            ]
        );
    }
}
