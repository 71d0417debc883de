use std::fmt::Write as _;

use super::model::{Atom, Domain, Instance, State, TypeId, TypeTree};

fn typed<'a>(
    out: &mut String,
    items: impl IntoIterator<Item = (&'a str, TypeId)>,
    tt: &TypeTree,
    var: bool,
) {
    let prefix = if var { "?" } else { "" };
    let mut first = true;
    for (name, ty) in items {
        if !first {
            out.push(' ');
        }
        first = false;
        let _ = write!(out, "{prefix}{name} - {}", tt.name(ty));
    }
}

fn atoms(out: &mut String, atoms: &[Atom], negate: bool) {
    for a in atoms {
        out.push(' ');
        if negate {
            out.push_str("(not ");
        }
        let _ = write!(out, "({}", a.predicate);
        for v in &a.args {
            let _ = write!(out, " ?{v}");
        }
        out.push(')');
        if negate {
            out.push(')');
        }
    }
}

fn fluents(out: &mut String, s: &State) {
    for f in s.iter() {
        let _ = write!(out, " ({f})");
    }
}

impl Domain {
    /// Serializes back to PDDL text that [`super::parse_domain`] accepts.
    pub fn to_pddl(&self) -> String {
        let tt = &self.types;
        let mut out = String::new();
        let _ = writeln!(out, "(define (domain {})", self.name);
        out.push_str("  (:requirements :strips :typing)\n");
        out.push_str("  (:types");
        for id in tt.ids().skip(1) {
            let parent = tt.parent(id).expect("non-root type has a parent");
            let _ = write!(out, " {} - {}", tt.name(id), tt.name(parent));
        }
        out.push_str(")\n  (:predicates");
        for p in self.predicates.values() {
            let _ = write!(out, "\n    ({}", p.name);
            if !p.arg_types.is_empty() {
                out.push(' ');
                let names: Vec<String> = (1..=p.arity()).map(|i| format!("a{i}")).collect();
                typed(
                    &mut out,
                    names
                        .iter()
                        .map(String::as_str)
                        .zip(p.arg_types.iter().copied()),
                    tt,
                    true,
                );
            }
            out.push(')');
        }
        out.push(')');
        for a in self.schemas.values() {
            let _ = write!(out, "\n  (:action {}\n    :parameters (", a.name);
            typed(
                &mut out,
                a.params.iter().map(|(v, t)| (v.as_str(), *t)),
                tt,
                true,
            );
            out.push_str(")\n    :precondition (and");
            atoms(&mut out, &a.pre, false);
            out.push_str(")\n    :effect (and");
            atoms(&mut out, &a.add, false);
            atoms(&mut out, &a.del, true);
            out.push_str("))");
        }
        out.push_str(")\n");
        out
    }
}

impl Instance {
    pub fn to_pddl(&self, domain: &Domain) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "(define (problem {})", self.name);
        let _ = writeln!(out, "  (:domain {})", self.domain_name);
        out.push_str("  (:objects ");
        typed(
            &mut out,
            self.objects.iter().map(|(o, t)| (o.as_str(), *t)),
            &domain.types,
            false,
        );
        out.push_str(")\n  (:init");
        fluents(&mut out, &self.init);
        out.push_str(")\n  (:goal (and");
        fluents(&mut out, &self.goal);
        out.push_str(")))\n");
        out
    }
}
