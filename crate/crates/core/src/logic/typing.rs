//! Variable resolution and numeration-system inference.
//!
//! Every binder gets its own variable id; names left unbound become free
//! variables, numbered first and in alphabetical order. A variable's system
//! comes from the automaton tracks and sequences it is passed to and from
//! annotated comparisons. An unannotated comparison takes the system of the
//! variables it mentions, defaulting to base 2.

use std::collections::BTreeMap;

use super::syntax::{Arg, Atom, Formula, LinTerm};
use super::Environment;
use crate::error::{Error, Result};
use crate::numbers::Numeration;

pub type VarId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct VarInfo {
    pub name: String,
    pub system: Numeration,
}

/// A formula with resolved variables and a system for each of them.
#[derive(Debug, Clone, PartialEq)]
pub struct Typed {
    pub formula: Formula<VarId>,
    pub vars: Vec<VarInfo>,
    /// Free variables, in alphabetical order of their names.
    pub free: Vec<VarId>,
}

impl Typed {
    pub fn system(&self, v: VarId) -> Numeration {
        self.vars[v].system
    }

    /// The system a comparison is decided in.
    pub fn comparison_system(
        &self,
        lhs: &LinTerm<VarId>,
        rhs: &LinTerm<VarId>,
        ann: Option<Numeration>,
    ) -> Numeration {
        ann.or_else(|| lhs.vars().chain(rhs.vars()).next().map(|&v| self.system(v)))
            .unwrap_or(Numeration::msd(2))
    }
}

struct Resolver {
    names: Vec<String>,
    scopes: Vec<(String, VarId)>,
    free: BTreeMap<String, VarId>,
}

impl Resolver {
    fn lookup(&mut self, name: &str) -> VarId {
        if let Some(&(_, id)) = self.scopes.iter().rev().find(|(n, _)| n == name) {
            return id;
        }
        *self
            .free
            .get(name)
            .expect("free variables are collected first")
    }

    fn term(&mut self, t: &LinTerm) -> LinTerm<VarId> {
        t.map_vars(|v| self.lookup(v))
    }

    fn formula(&mut self, f: &Formula) -> Formula<VarId> {
        let bin = |r: &mut Self, a: &Formula, b: &Formula| {
            (Box::new(r.formula(a)), Box::new(r.formula(b)))
        };
        match f {
            Formula::Atom(a) => Formula::Atom(match a {
                Atom::Compare {
                    lhs,
                    op,
                    rhs,
                    system,
                } => Atom::Compare {
                    lhs: self.term(lhs),
                    op: *op,
                    rhs: self.term(rhs),
                    system: *system,
                },
                Atom::Call { name, args } => Atom::Call {
                    name: name.clone(),
                    args: args
                        .iter()
                        .map(|a| Arg {
                            term: self.term(&a.term),
                            system: a.system,
                        })
                        .collect(),
                },
                Atom::SeqIndex {
                    seq,
                    index,
                    value,
                    equal,
                } => Atom::SeqIndex {
                    seq: seq.clone(),
                    index: self.term(index),
                    value: *value,
                    equal: *equal,
                },
            }),
            Formula::Not(a) => Formula::Not(Box::new(self.formula(a))),
            Formula::And(a, b) => {
                let (a, b) = bin(self, a, b);
                Formula::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = bin(self, a, b);
                Formula::Or(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = bin(self, a, b);
                Formula::Implies(a, b)
            }
            Formula::Iff(a, b) => {
                let (a, b) = bin(self, a, b);
                Formula::Iff(a, b)
            }
            Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
                let depth = self.scopes.len();
                let ids: Vec<VarId> = vs
                    .iter()
                    .map(|v| {
                        let id = self.names.len();
                        self.names.push(v.clone());
                        self.scopes.push((v.clone(), id));
                        id
                    })
                    .collect();
                let body = Box::new(self.formula(body));
                self.scopes.truncate(depth);
                if matches!(f, Formula::Exists(..)) {
                    Formula::Exists(ids, body)
                } else {
                    Formula::Forall(ids, body)
                }
            }
        }
    }
}

/// Names used but not bound, in alphabetical order.
pub fn free_names(f: &Formula) -> Vec<String> {
    fn walk(f: &Formula, bound: &mut Vec<String>, out: &mut std::collections::BTreeSet<String>) {
        let mut term = |t: &LinTerm, bound: &Vec<String>| {
            for v in t.vars() {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        };
        match f {
            Formula::Atom(Atom::Compare { lhs, rhs, .. }) => {
                term(lhs, bound);
                term(rhs, bound);
            }
            Formula::Atom(Atom::Call { args, .. }) => {
                args.iter().for_each(|a| term(&a.term, bound))
            }
            Formula::Atom(Atom::SeqIndex { index, .. }) => term(index, bound),
            Formula::Not(a) => walk(a, bound, out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                walk(a, bound, out);
                walk(b, bound, out);
            }
            Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
                let depth = bound.len();
                bound.extend(vs.iter().cloned());
                walk(body, bound, out);
                bound.truncate(depth);
            }
        }
    }
    let mut out = std::collections::BTreeSet::new();
    walk(f, &mut Vec::new(), &mut out);
    out.into_iter().collect()
}

struct Constraints<'a> {
    env: &'a Environment,
    fixed: Vec<Vec<Numeration>>,
    loose: Vec<Vec<VarId>>,
}

impl Constraints<'_> {
    fn fix(&mut self, t: &LinTerm<VarId>, s: Numeration) {
        for &v in t.vars() {
            self.fixed[v].push(s);
        }
    }

    fn walk(&mut self, f: &Formula<VarId>) -> Result<()> {
        match f {
            Formula::Atom(Atom::Compare {
                lhs, rhs, system, ..
            }) => match system {
                Some(s) => {
                    self.fix(lhs, *s);
                    self.fix(rhs, *s);
                }
                None => self
                    .loose
                    .push(lhs.vars().chain(rhs.vars()).copied().collect()),
            },
            Formula::Atom(Atom::Call { name, args }) => {
                let tracks = self.env.signature(name)?;
                if tracks.len() != args.len() {
                    return Err(Error::Arity {
                        expected: tracks.len(),
                        got: args.len(),
                    });
                }
                for (a, &t) in args.iter().zip(tracks) {
                    if let Some(s) = a.system {
                        if s != t {
                            return Err(Error::MixedSystems(format!(
                                "argument annotated {s} passed to a {t} track of ${name}"
                            )));
                        }
                    }
                    self.fix(&a.term, t);
                }
            }
            Formula::Atom(Atom::SeqIndex { seq, index, .. }) => {
                let s = self.env.sequence(seq)?.system();
                self.fix(index, s);
            }
            Formula::Not(a) => self.walk(a)?,
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                self.walk(a)?;
                self.walk(b)?;
            }
            Formula::Exists(_, body) | Formula::Forall(_, body) => self.walk(body)?,
        }
        Ok(())
    }
}

pub fn typecheck(f: &Formula, env: &Environment) -> Result<Typed> {
    let free_list = free_names(f);
    let mut r = Resolver {
        names: free_list.clone(),
        scopes: Vec::new(),
        free: free_list
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect(),
    };
    let formula = r.formula(f);
    let n = r.names.len();
    let mut c = Constraints {
        env,
        fixed: vec![Vec::new(); n],
        loose: Vec::new(),
    };
    c.walk(&formula)?;
    let mut systems: Vec<Option<Numeration>> = Vec::with_capacity(n);
    for (v, fixed) in c.fixed.iter().enumerate() {
        let first = fixed.first().copied();
        if let Some(other) = fixed.iter().find(|&&s| Some(s) != first) {
            return Err(Error::MixedSystems(format!(
                "variable `{}` is used as both {} and {}",
                r.names[v],
                first.unwrap(),
                other
            )));
        }
        systems.push(first);
    }
    // unannotated comparisons spread systems between their variables
    loop {
        let mut changed = false;
        for group in &c.loose {
            if let Some(s) = group.iter().find_map(|&v| systems[v]) {
                for &v in group {
                    match systems[v] {
                        None => {
                            systems[v] = Some(s);
                            changed = true;
                        }
                        Some(t) if t != s => {
                            return Err(Error::MixedSystems(format!(
                                "comparison mixes {s} and {t} (variable `{}`)",
                                r.names[v]
                            )))
                        }
                        _ => {}
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let vars = r
        .names
        .into_iter()
        .zip(systems)
        .map(|(name, s)| VarInfo {
            name,
            system: s.unwrap_or(Numeration::msd(2)),
        })
        .collect();
    Ok(Typed {
        formula,
        vars,
        free: (0..free_list.len()).collect(),
    })
}
