//! Bounded brute-force semantics for formulas, used to cross-check the
//! automaton compiler.
//!
//! Calls and sequence atoms are answered by registered oracles instead of
//! automata. Quantified variables are handled by polarity. A variable that
//! acts universally ranges over `[0, bound]` (or `[-bound, bound]` in a
//! negative base). One that acts existentially is searched in the larger
//! `[0, window]`, stopping at the first witness. Whenever a conjunct that
//! must hold pins a variable down (`y = f(n)` with `n` known, or a linear
//! equation), only those values are tried, so nested quantifiers stay cheap.

use rustc_hash::FxHashMap as HashMap;
use std::sync::Arc;

use super::syntax::{Atom, Formula, LinTerm};
use super::typing::{typecheck, Typed, VarId};
use super::Environment;
use crate::error::{Error, Result};
use crate::numbers::Numeration;

/// Semantics of a named relation for the brute-force evaluator.
pub trait Oracle: Send + Sync {
    fn holds(&self, args: &[i64]) -> bool;

    /// All values of argument `missing` that satisfy the relation together
    /// with the other entries of `args`, if this oracle can list them.
    fn solve(&self, args: &[i64], missing: usize) -> Option<Vec<i64>> {
        let _ = (args, missing);
        None
    }
}

type Func = Arc<dyn Fn(i64) -> Option<i64> + Send + Sync>;

/// A binary relation that is the graph of a partial function, either
/// `(x, f(x))` or `(f(y), y)`, optionally with a known inverse.
#[derive(Clone)]
pub struct GraphOracle {
    input: usize,
    forward: Func,
    backward: Option<Func>,
}

impl GraphOracle {
    /// Pairs `(x, f(x))`.
    pub fn function(f: impl Fn(i64) -> Option<i64> + Send + Sync + 'static) -> Self {
        GraphOracle {
            input: 0,
            forward: Arc::new(f),
            backward: None,
        }
    }

    /// Pairs `(f(y), y)`.
    pub fn function_of_second(f: impl Fn(i64) -> Option<i64> + Send + Sync + 'static) -> Self {
        GraphOracle {
            input: 1,
            forward: Arc::new(f),
            backward: None,
        }
    }

    /// Maps the output back to the unique input, or `None`.
    pub fn with_inverse(mut self, g: impl Fn(i64) -> Option<i64> + Send + Sync + 'static) -> Self {
        self.backward = Some(Arc::new(g));
        self
    }
}

impl Oracle for GraphOracle {
    fn holds(&self, args: &[i64]) -> bool {
        args.len() == 2 && (self.forward)(args[self.input]) == Some(args[1 - self.input])
    }

    fn solve(&self, args: &[i64], missing: usize) -> Option<Vec<i64>> {
        if missing == self.input {
            let g = self.backward.as_ref()?;
            let x = g(args[1 - self.input]);
            Some(
                x.filter(|&x| (self.forward)(x) == Some(args[1 - self.input]))
                    .into_iter()
                    .collect(),
            )
        } else {
            Some((self.forward)(args[self.input]).into_iter().collect())
        }
    }
}

pub type SeqOracle = Arc<dyn Fn(i64) -> Option<u32> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteConfig {
    /// Range of universally acting variables.
    pub bound: i64,
    /// Search range of existentially acting variables.
    pub window: i64,
}

impl Default for BruteConfig {
    fn default() -> Self {
        BruteConfig {
            bound: 2000,
            window: 1 << 20,
        }
    }
}

#[derive(Clone, Default)]
pub struct BruteForce {
    relations: HashMap<String, Arc<dyn Oracle>>,
    sequences: HashMap<String, SeqOracle>,
    pub config: BruteConfig,
}

impl BruteForce {
    pub fn new(config: BruteConfig) -> Self {
        BruteForce {
            config,
            ..Default::default()
        }
    }

    pub fn insert_relation(&mut self, name: &str, oracle: impl Oracle + 'static) {
        self.relations.insert(name.to_string(), Arc::new(oracle));
    }

    pub fn insert_sequence(
        &mut self,
        name: &str,
        f: impl Fn(i64) -> Option<u32> + Send + Sync + 'static,
    ) {
        self.sequences.insert(name.to_string(), Arc::new(f));
    }

    pub fn has_relation(&self, name: &str) -> bool {
        self.relations.contains_key(name)
    }

    /// Truth of a closed formula. `env` supplies the track signatures of
    /// called automata; their languages are not consulted.
    pub fn eval_closed(&self, f: &Formula, env: &Environment) -> Result<bool> {
        self.holds(f, env, &[])
    }

    /// Truth of a formula under an assignment of its free variables, given
    /// in alphabetical order of their names.
    pub fn holds(&self, f: &Formula, env: &Environment, free_values: &[i64]) -> Result<bool> {
        let typed = typecheck(f, env)?;
        self.holds_typed(&typed, env, free_values)
    }

    pub fn holds_typed(
        &self,
        typed: &Typed,
        env: &Environment,
        free_values: &[i64],
    ) -> Result<bool> {
        if free_values.len() != typed.free.len() {
            return Err(Error::FreeVariables(format!(
                "{} free variables, {} values",
                typed.free.len(),
                free_values.len()
            )));
        }
        let mut asg = vec![None; typed.vars.len()];
        for (&v, &x) in typed.free.iter().zip(free_values) {
            if !typed.system(v).represents(x) {
                return Ok(false);
            }
            asg[v] = Some(x);
        }
        let mut e = Eval {
            bf: self,
            env,
            typed,
            asg,
            last_witness: HashMap::default(),
        };
        e.formula(&typed.formula, true)
    }
}

struct Eval<'a> {
    bf: &'a BruteForce,
    env: &'a Environment,
    typed: &'a Typed,
    asg: Vec<Option<i64>>,
    last_witness: HashMap<(usize, VarId), u64>,
}

/// Conjuncts that must hold for `f` (or its negation) to be true.
fn required<'f>(f: &'f Formula<VarId>, negated: bool, out: &mut Vec<&'f Atom<VarId>>) {
    match (f, negated) {
        (Formula::Atom(a), false) => out.push(a),
        (Formula::And(a, b), false) | (Formula::Or(a, b), true) => {
            required(a, negated, out);
            required(b, negated, out);
        }
        (Formula::Implies(a, b), true) => {
            required(a, false, out);
            required(b, true, out);
        }
        (Formula::Not(a), n) => required(a, !n, out),
        _ => {}
    }
}

impl Eval<'_> {
    fn value(&self, t: &LinTerm<VarId>) -> Option<i64> {
        let mut acc = t.constant as i128;
        for &(v, a) in &t.coeffs {
            acc += a as i128 * self.asg[v]? as i128;
        }
        i64::try_from(acc).ok()
    }

    /// `(coefficient of v, value of the rest)` when every other variable of
    /// `t` is assigned and `v` occurs in `t`.
    fn split(&self, t: &LinTerm<VarId>, v: VarId) -> Option<(i64, i128)> {
        let mut coef = None;
        let mut rest = t.constant as i128;
        for &(w, a) in &t.coeffs {
            if w == v {
                coef = Some(a);
            } else {
                rest += a as i128 * self.asg[w]? as i128;
            }
        }
        coef.map(|c| (c, rest))
    }

    fn relation(&self, name: &str) -> Result<&dyn Oracle> {
        self.bf
            .relations
            .get(name)
            .map(|o| o.as_ref())
            .ok_or_else(|| Error::Unbound(format!("no oracle for `${name}`")))
    }

    fn atom(&self, a: &Atom<VarId>) -> Result<bool> {
        let unassigned = || Error::Invalid("unassigned variable in brute-force evaluation".into());
        match a {
            Atom::Compare { lhs, op, rhs, .. } => {
                let (x, y) = (self.value(lhs), self.value(rhs));
                Ok(op.holds(x.ok_or_else(unassigned)?, y.ok_or_else(unassigned)?))
            }
            Atom::Call { name, args } => {
                let tracks = self.env.signature(name)?;
                let mut values = Vec::with_capacity(args.len());
                for (arg, t) in args.iter().zip(tracks) {
                    let x = self.value(&arg.term).ok_or_else(unassigned)?;
                    if !t.represents(x) {
                        return Ok(false);
                    }
                    values.push(x);
                }
                Ok(self.relation(name)?.holds(&values))
            }
            Atom::SeqIndex {
                seq,
                index,
                value,
                equal,
            } => {
                let i = self.value(index).ok_or_else(unassigned)?;
                if !self.env.sequence(seq)?.system().represents(i) {
                    return Ok(false);
                }
                let f = self
                    .bf
                    .sequences
                    .get(seq)
                    .ok_or_else(|| Error::Unbound(format!("no oracle for sequence `{seq}`")))?;
                Ok(match f(i) {
                    Some(out) => (out == *value) == *equal,
                    None => false,
                })
            }
        }
    }

    /// Values of `v` forced by atom `a` given the current assignment.
    fn determine(&self, a: &Atom<VarId>, v: VarId) -> Result<Option<Vec<i64>>> {
        let solve_linear = |coef: i64, target: i128| -> Vec<i64> {
            // coef * v = target
            if target % coef as i128 == 0 {
                i64::try_from(target / coef as i128).into_iter().collect()
            } else {
                Vec::new()
            }
        };
        match a {
            Atom::Compare {
                lhs,
                op: super::RelOp::Eq,
                rhs,
                ..
            } => {
                let diff = match lhs.plus(rhs, -1) {
                    Ok(d) => d,
                    Err(_) => return Ok(None),
                };
                Ok(self.split(&diff, v).map(|(c, rest)| solve_linear(c, -rest)))
            }
            Atom::Call { name, args } => {
                let mut at = None;
                for (i, arg) in args.iter().enumerate() {
                    if arg.term.vars().any(|&w| w == v) {
                        if at.is_some() {
                            return Ok(None);
                        }
                        at = Some(i);
                    }
                }
                let Some(i) = at else { return Ok(None) };
                let Some((coef, rest)) = self.split(&args[i].term, v) else {
                    return Ok(None);
                };
                let mut values = vec![0; args.len()];
                for (j, arg) in args.iter().enumerate() {
                    if j != i {
                        match self.value(&arg.term) {
                            Some(x) => values[j] = x,
                            None => return Ok(None),
                        }
                    }
                }
                let Some(sols) = self.relation(name)?.solve(&values, i) else {
                    return Ok(None);
                };
                let track = self.env.signature(name)?[i];
                let mut out = Vec::new();
                for s in sols.into_iter().filter(|&s| track.represents(s)) {
                    out.extend(solve_linear(coef, s as i128 - rest));
                }
                Ok(Some(out))
            }
            _ => Ok(None),
        }
    }

    fn formula(&mut self, f: &Formula<VarId>, positive: bool) -> Result<bool> {
        Ok(match f {
            Formula::Atom(a) => self.atom(a)?,
            Formula::Not(a) => !self.formula(a, !positive)?,
            Formula::And(a, b) => self.formula(a, positive)? && self.formula(b, positive)?,
            Formula::Or(a, b) => self.formula(a, positive)? || self.formula(b, positive)?,
            Formula::Implies(a, b) => !self.formula(a, !positive)? || self.formula(b, positive)?,
            Formula::Iff(a, b) => self.formula(a, positive)? == self.formula(b, positive)?,
            Formula::Exists(vs, body) => self.search(vs, body, false, positive)?,
            Formula::Forall(vs, body) => !self.search(vs, body, true, !positive)?,
        })
    }

    /// Size of the search domain: `0, 1, -1, 2, -2, ...` in a negative
    /// base, `0, 1, 2, ...` otherwise.
    fn domain_len(&self, s: Numeration, existential: bool) -> u64 {
        let r = if existential {
            self.bf.config.window
        } else {
            self.bf.config.bound
        } as u64;
        if s.is_negative() {
            2 * r + 1
        } else {
            r + 1
        }
    }

    fn domain_value(s: Numeration, i: u64) -> i64 {
        if !s.is_negative() {
            i as i64
        } else if i % 2 == 1 {
            i.div_ceil(2) as i64
        } else {
            -((i / 2) as i64)
        }
    }

    /// Is there an assignment of `vars` making `body` (negated if `negate`)
    /// true? `existential` says whether this search acts existentially in
    /// the whole formula.
    fn search(
        &mut self,
        vars: &[VarId],
        body: &Formula<VarId>,
        negate: bool,
        existential: bool,
    ) -> Result<bool> {
        if vars.is_empty() {
            let body_positive = existential != negate;
            return Ok(self.formula(body, body_positive)? != negate);
        }
        let mut lits = Vec::new();
        required(body, negate, &mut lits);
        for (k, &v) in vars.iter().enumerate() {
            for a in &lits {
                if let Some(mut cands) = self.determine(a, v)? {
                    let sys = self.typed.system(v);
                    cands.retain(|&c| sys.represents(c));
                    cands.sort_unstable();
                    cands.dedup();
                    let rest: Vec<VarId> = vars
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != k)
                        .map(|(_, &w)| w)
                        .collect();
                    for c in cands {
                        self.asg[v] = Some(c);
                        let found = self.search(&rest, body, negate, existential)?;
                        self.asg[v] = None;
                        if found {
                            return Ok(true);
                        }
                    }
                    return Ok(false);
                }
            }
        }
        // The domain is finite, so the order of the scan does not matter.
        // Starting at the last witness of this quantifier finds witnesses
        // for runs of similar outer assignments without rescanning.
        let v = vars[0];
        let sys = self.typed.system(v);
        let len = self.domain_len(sys, existential);
        let key = (body as *const Formula<VarId> as usize, v);
        let start = self
            .last_witness
            .get(&key)
            .copied()
            .unwrap_or(0)
            .min(len - 1);
        for i in (start..len).chain(0..start) {
            self.asg[v] = Some(Self::domain_value(sys, i));
            let found = self.search(&vars[1..], body, negate, existential)?;
            self.asg[v] = None;
            if found {
                self.last_witness.insert(key, i);
                return Ok(true);
            }
        }
        Ok(false)
    }
}
