use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use super::PddlError;

/// Name of the implicit root type.
pub const ROOT_TYPE: &str = "object";

/// Index of a type inside its [`TypeTree`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeId(pub u32);

impl TypeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A rooted tree of type symbols. The root is always [`ROOT_TYPE`] and has id 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeTree {
    names: Vec<String>,
    parent: Vec<Option<TypeId>>,
    index: HashMap<String, TypeId>,
}

impl Default for TypeTree {
    fn default() -> Self {
        Self::new()
    }
}

impl TypeTree {
    pub fn new() -> Self {
        let mut index = HashMap::new();
        index.insert(ROOT_TYPE.to_string(), TypeId(0));
        TypeTree {
            names: vec![ROOT_TYPE.to_string()],
            parent: vec![None],
            index,
        }
    }

    pub fn root(&self) -> TypeId {
        TypeId(0)
    }

    /// Adds `name` below `parent`. Re-adding an existing type with the same
    /// parent is a no-op; a different parent is an error.
    pub fn add(&mut self, name: &str, parent: TypeId) -> Result<TypeId, PddlError> {
        if let Some(&id) = self.index.get(name) {
            if self.parent[id.index()] == Some(parent) {
                return Ok(id);
            }
            return Err(PddlError::Invalid(format!(
                "type `{name}` declared with two different parents"
            )));
        }
        if parent.index() >= self.names.len() {
            return Err(PddlError::Invalid(format!(
                "unknown parent for type `{name}`"
            )));
        }
        let id = TypeId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.parent.push(Some(parent));
        self.index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, name: &str) -> Option<TypeId> {
        self.index.get(name).copied()
    }

    pub fn lookup(&self, name: &str) -> Result<TypeId, PddlError> {
        self.get(name)
            .ok_or_else(|| PddlError::UndeclaredType(name.to_string()))
    }

    pub fn name(&self, id: TypeId) -> &str {
        &self.names[id.index()]
    }

    pub fn parent(&self, id: TypeId) -> Option<TypeId> {
        self.parent[id.index()]
    }

    /// All type ids in declaration order (root first).
    pub fn ids(&self) -> impl Iterator<Item = TypeId> + '_ {
        (0..self.names.len() as u32).map(TypeId)
    }

    /// `sub ⪯ sup`: equal, or `sub` is a descendant of `sup`.
    pub fn is_subtype(&self, sub: TypeId, sup: TypeId) -> bool {
        let mut cur = Some(sub);
        while let Some(t) = cur {
            if t == sup {
                return true;
            }
            cur = self.parent[t.index()];
        }
        false
    }

    pub fn subtype_of(&self, sub: &str, sup: &str) -> Result<bool, PddlError> {
        Ok(self.is_subtype(self.lookup(sub)?, self.lookup(sup)?))
    }
}

/// Name-level convenience wrapper around [`TypeTree::subtype_of`].
pub fn subtype_of(t1: &str, t2: &str, tt: &TypeTree) -> Result<bool, PddlError> {
    tt.subtype_of(t1, t2)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predicate {
    pub name: String,
    pub arg_types: Vec<TypeId>,
}

impl Predicate {
    pub fn arity(&self) -> usize {
        self.arg_types.len()
    }
}

/// An atom whose arguments are schema parameters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<String>,
}

/// A ground atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fluent {
    pub predicate: String,
    pub args: Vec<String>,
}

impl Fluent {
    pub fn new(
        predicate: impl Into<String>,
        args: impl IntoIterator<Item = impl Into<String>>,
    ) -> Self {
        Fluent {
            predicate: predicate.into(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }

    /// Parses the space-separated trace form `"pred obj1 obj2"`.
    pub fn parse(text: &str) -> Option<Fluent> {
        let mut words = text.split_whitespace().map(str::to_lowercase);
        let predicate = words.next()?;
        Some(Fluent {
            predicate,
            args: words.collect(),
        })
    }
}

impl fmt::Display for Fluent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        Ok(())
    }
}

/// A set of fluents.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State(BTreeSet<Fluent>);

impl State {
    pub fn new() -> Self {
        State(BTreeSet::new())
    }

    pub fn contains(&self, f: &Fluent) -> bool {
        self.0.contains(f)
    }

    pub fn insert(&mut self, f: Fluent) -> bool {
        self.0.insert(f)
    }

    pub fn remove(&mut self, f: &Fluent) -> bool {
        self.0.remove(f)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Fluent> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_subset(&self, other: &State) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl FromIterator<Fluent> for State {
    fn from_iter<I: IntoIterator<Item = Fluent>>(iter: I) -> Self {
        State(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a State {
    type Item = &'a Fluent;
    type IntoIter = std::collections::btree_set::Iter<'a, Fluent>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<(String, TypeId)>,
    pub pre: Vec<Atom>,
    pub add: Vec<Atom>,
    pub del: Vec<Atom>,
}

/// A ground action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operator {
    pub schema: String,
    pub binding: Vec<String>,
    pub pre: BTreeSet<Fluent>,
    pub add: BTreeSet<Fluent>,
    pub del: BTreeSet<Fluent>,
}

impl Operator {
    /// `pre(o) ⊆ s`.
    pub fn applicable(&self, s: &State) -> bool {
        self.pre.iter().all(|f| s.contains(f))
    }

    /// `(s ∖ del(o)) ∪ add(o)`, failing if the operator is not applicable.
    pub fn apply(&self, s: &State) -> Result<State, PddlError> {
        if !self.applicable(s) {
            return Err(PddlError::NotApplicable(self.to_string()));
        }
        let mut next = s.clone();
        for f in &self.del {
            next.remove(f);
        }
        for f in &self.add {
            next.insert(f.clone());
        }
        Ok(next)
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.schema)?;
        for o in &self.binding {
            write!(f, " {o}")?;
        }
        f.write_str(")")
    }
}

pub fn applicable(s: &State, o: &Operator) -> bool {
    o.applicable(s)
}

pub fn apply(s: &State, o: &Operator) -> Result<State, PddlError> {
    o.apply(s)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    pub name: String,
    pub types: TypeTree,
    /// Keyed by name so iteration order is canonical.
    pub predicates: BTreeMap<String, Predicate>,
    pub schemas: BTreeMap<String, ActionSchema>,
}

impl Domain {
    pub fn new(name: impl Into<String>, types: TypeTree) -> Self {
        Domain {
            name: name.into(),
            types,
            predicates: BTreeMap::new(),
            schemas: BTreeMap::new(),
        }
    }

    pub fn predicate(&self, name: &str) -> Option<&Predicate> {
        self.predicates.get(name)
    }

    pub fn add_predicate(&mut self, p: Predicate) -> Result<(), PddlError> {
        if self.predicates.contains_key(&p.name) {
            return Err(PddlError::DuplicatePredicate(p.name));
        }
        self.predicates.insert(p.name.clone(), p);
        Ok(())
    }

    /// Grounds schema `name` with `binding`, checking argument count and types
    /// against the instance's objects.
    pub fn ground(
        &self,
        name: &str,
        binding: &[String],
        inst: &Instance,
    ) -> Result<Operator, PddlError> {
        let schema = self
            .schemas
            .get(name)
            .ok_or_else(|| PddlError::UnknownSchema(name.to_string()))?;
        if schema.params.len() != binding.len() {
            return Err(PddlError::ArityMismatch {
                symbol: name.to_string(),
                expected: schema.params.len(),
                found: binding.len(),
            });
        }
        let mut subst = HashMap::new();
        for ((param, ty), obj) in schema.params.iter().zip(binding) {
            let oty = inst.object_type(obj)?;
            if !self.types.is_subtype(oty, *ty) {
                return Err(PddlError::TypeMismatch(format!(
                    "object `{obj}` of type `{}` bound to `?{param}` of type `{}` in `{name}`",
                    self.types.name(oty),
                    self.types.name(*ty)
                )));
            }
            subst.insert(param.as_str(), obj.as_str());
        }
        let ground = |atoms: &[Atom]| -> BTreeSet<Fluent> {
            atoms
                .iter()
                .map(|a| Fluent {
                    predicate: a.predicate.clone(),
                    args: a
                        .args
                        .iter()
                        .map(|v| subst[v.as_str()].to_string())
                        .collect(),
                })
                .collect()
        };
        Ok(Operator {
            schema: name.to_string(),
            binding: binding.to_vec(),
            pre: ground(&schema.pre),
            add: ground(&schema.add),
            del: ground(&schema.del),
        })
    }

    /// Checks a fluent against predicate arity and slot types.
    pub fn check_fluent(&self, f: &Fluent, inst: &Instance) -> Result<(), PddlError> {
        let p = self
            .predicate(&f.predicate)
            .ok_or_else(|| PddlError::UnknownPredicate(f.predicate.clone()))?;
        if p.arity() != f.args.len() {
            return Err(PddlError::ArityMismatch {
                symbol: f.predicate.clone(),
                expected: p.arity(),
                found: f.args.len(),
            });
        }
        for (obj, slot) in f.args.iter().zip(&p.arg_types) {
            let oty = inst.object_type(obj)?;
            if !self.types.is_subtype(oty, *slot) {
                return Err(PddlError::TypeMismatch(format!(
                    "object `{obj}` of type `{}` in slot of type `{}` of `{}`",
                    self.types.name(oty),
                    self.types.name(*slot),
                    f.predicate
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub name: String,
    pub domain_name: String,
    /// Object name to its (most specific) type.
    pub objects: BTreeMap<String, TypeId>,
    pub init: State,
    pub goal: State,
}

impl Instance {
    pub fn object_type(&self, obj: &str) -> Result<TypeId, PddlError> {
        self.objects
            .get(obj)
            .copied()
            .ok_or_else(|| PddlError::UnknownObject(obj.to_string()))
    }

    /// Objects whose type is a subtype of `ty` (or exactly `ty` when `strict`),
    /// in name order.
    pub fn objects_of(&self, tt: &TypeTree, ty: TypeId, strict: bool) -> Vec<&str> {
        self.objects
            .iter()
            .filter(|(_, &t)| {
                if strict {
                    t == ty
                } else {
                    tt.is_subtype(t, ty)
                }
            })
            .map(|(o, _)| o.as_str())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree() -> TypeTree {
        let mut tt = TypeTree::new();
        let place = tt.add("place", tt.root()).unwrap();
        tt.add("kitchen", place).unwrap();
        tt.add("child", tt.root()).unwrap();
        tt
    }

    #[test]
    fn subtype_examples() {
        let tt = tree();
        assert!(subtype_of("child", "child", &tt).unwrap());
        assert!(subtype_of("child", "object", &tt).unwrap());
        assert!(!subtype_of("object", "child", &tt).unwrap());
        assert!(subtype_of("kitchen", "object", &tt).unwrap());
        assert!(!subtype_of("kitchen", "child", &tt).unwrap());
        assert!(matches!(
            subtype_of("nope", "child", &tt),
            Err(PddlError::UndeclaredType(_))
        ));
    }

    #[test]
    fn conflicting_parent_is_rejected() {
        let mut tt = tree();
        let child = tt.get("child").unwrap();
        assert!(tt.add("kitchen", child).is_err());
        let place = tt.get("place").unwrap();
        assert_eq!(
            tt.add("kitchen", place).unwrap(),
            tt.get("kitchen").unwrap()
        );
    }

    fn op(pre: &[Fluent], add: &[Fluent], del: &[Fluent]) -> Operator {
        Operator {
            schema: "o".into(),
            binding: vec![],
            pre: pre.iter().cloned().collect(),
            add: add.iter().cloned().collect(),
            del: del.iter().cloned().collect(),
        }
    }

    #[test]
    fn applicability_examples() {
        let p = Fluent::new("p", ["a"]);
        let q = Fluent::new("q", ["a"]);
        let any: State = [p.clone()].into_iter().collect();
        assert!(applicable(&any, &op(&[], &[], &[])));
        assert!(!applicable(&any, &op(&[p.clone(), q.clone()], &[], &[])));
        let both: State = [p.clone(), q.clone()].into_iter().collect();
        assert!(applicable(&both, &op(&[q.clone()], &[], &[])));
    }

    #[test]
    fn apply_examples() {
        let p = Fluent::new("p", ["a"]);
        let q = Fluent::new("q", ["a"]);
        let s: State = [p.clone()].into_iter().collect();
        let next = apply(&s, &op(&[], &[q.clone()], &[p.clone()])).unwrap();
        assert_eq!(next, [q.clone()].into_iter().collect());
        let same = apply(&s, &op(&[], &[p.clone()], &[])).unwrap();
        assert_eq!(same, s);
        assert!(matches!(
            apply(&s, &op(&[q], &[], &[])),
            Err(PddlError::NotApplicable(_))
        ));
    }
}
