//! Formula to automaton compilation.
//!
//! Intermediate results carry one track per variable, sorted by variable
//! id. Comparisons become single linear automata; call and index arguments
//! that are not plain variables get an auxiliary track that is projected
//! away as soon as its defining equation has been joined in.

use super::syntax::{Atom, Formula, LinTerm, RelOp};
use super::typing::{Typed, VarId};
use super::Environment;
use crate::automata::{BoolOp, Dfa};
use crate::error::{Error, Result};
use crate::numbers::Numeration;
use crate::relations::{linear_eq, linear_le};

#[derive(Debug, Clone)]
struct Rel {
    vars: Vec<VarId>,
    dfa: Dfa,
}

struct Compiler<'a> {
    env: &'a Environment,
    systems: Vec<Numeration>,
}

impl Compiler<'_> {
    fn signature(&self, vars: &[VarId]) -> Vec<Numeration> {
        vars.iter().map(|&v| self.systems[v]).collect()
    }

    fn constant(value: bool) -> Rel {
        Rel {
            vars: Vec::new(),
            dfa: Dfa::constant(value),
        }
    }

    /// `dfa` with track `i` holding variable `vars[i]` (distinct ids).
    fn from_tracks(&self, dfa: &Dfa, vars: &[VarId]) -> Result<Rel> {
        let mut sorted = vars.to_vec();
        sorted.sort_unstable();
        let placement: Vec<usize> = vars
            .iter()
            .map(|v| sorted.binary_search(v).expect("present"))
            .collect();
        let dfa = dfa.rearrange(self.signature(&sorted), &placement)?;
        Ok(Rel { vars: sorted, dfa })
    }

    fn lift(&self, r: &Rel, vars: &[VarId]) -> Result<Dfa> {
        let placement: Vec<usize> = r
            .vars
            .iter()
            .map(|v| vars.binary_search(v).expect("superset"))
            .collect();
        r.dfa.rearrange(self.signature(vars), &placement)
    }

    fn combine(&self, a: &Rel, b: &Rel, op: BoolOp) -> Result<Rel> {
        let mut vars: Vec<VarId> = a.vars.iter().chain(&b.vars).copied().collect();
        vars.sort_unstable();
        vars.dedup();
        let (x, y) = (self.lift(a, &vars)?, self.lift(b, &vars)?);
        Ok(Rel {
            dfa: x.product(&y, op)?,
            vars,
        })
    }

    fn exists(&self, r: Rel, v: VarId) -> Result<Rel> {
        match r.vars.binary_search(&v) {
            Ok(i) => {
                let dfa = r.dfa.project(i)?;
                let mut vars = r.vars;
                vars.remove(i);
                Ok(Rel { vars, dfa })
            }
            Err(_) => Ok(r),
        }
    }

    fn not(r: Rel) -> Rel {
        Rel {
            dfa: r.dfa.complement(),
            vars: r.vars,
        }
    }

    fn fresh(&mut self, s: Numeration) -> VarId {
        self.systems.push(s);
        self.systems.len() - 1
    }

    /// `sum coeffs * vars (op) constant`, all in `sys`.
    fn linear(&self, sys: Numeration, term: &LinTerm<VarId>, op: RelOp) -> Result<Rel> {
        // term (op) 0, i.e. sum a_i v_i (op) -c
        let c = term.constant.checked_neg().ok_or(Error::Overflow)?;
        if term.is_constant() {
            return Ok(Self::constant(op.holds(0, c)));
        }
        let vars: Vec<VarId> = term.vars().copied().collect();
        let a: Vec<i64> = term.coeffs.iter().map(|&(_, a)| a).collect();
        let neg: Vec<i64> = a.iter().map(|x| -x).collect();
        let dfa = match op {
            RelOp::Eq => linear_eq(sys, &a, c)?,
            RelOp::Ne => linear_eq(sys, &a, c)?.complement(),
            RelOp::Le => linear_le(sys, &a, c)?,
            RelOp::Lt => linear_le(sys, &a, c.checked_sub(1).ok_or(Error::Overflow)?)?,
            RelOp::Ge => linear_le(sys, &neg, term.constant)?,
            RelOp::Gt => linear_le(
                sys,
                &neg,
                term.constant.checked_sub(1).ok_or(Error::Overflow)?,
            )?,
        };
        self.from_tracks(&dfa, &vars)
    }

    /// Binds `term` to a track: the variable itself when the term is a plain
    /// variable not yet used, otherwise a fresh auxiliary variable together
    /// with its defining equation.
    fn bind(
        &mut self,
        term: &LinTerm<VarId>,
        sys: Numeration,
        used: &[VarId],
    ) -> Result<(VarId, Option<Rel>)> {
        if let Some(&v) = term.as_var() {
            if !used.contains(&v) {
                return Ok((v, None));
            }
        }
        let aux = self.fresh(sys);
        let eq = LinTerm::var(aux).plus(term, -1)?;
        let rel = self.linear(sys, &eq, RelOp::Eq)?;
        Ok((aux, Some(rel)))
    }

    fn apply(&mut self, dfa: &Dfa, terms: &[&LinTerm<VarId>]) -> Result<Rel> {
        let mut track_vars = Vec::new();
        let mut pending = Vec::new();
        for (t, &sys) in terms.iter().zip(dfa.tracks()) {
            let (v, eq) = self.bind(t, sys, &track_vars)?;
            track_vars.push(v);
            if let Some(eq) = eq {
                pending.push((v, eq));
            }
        }
        let mut r = self.from_tracks(dfa, &track_vars)?;
        for (aux, eq) in pending {
            r = self.combine(&r, &eq, BoolOp::And)?;
            r = self.exists(r, aux)?;
        }
        Ok(r)
    }

    fn atom(&mut self, a: &Atom<VarId>, typed: &Typed) -> Result<Rel> {
        match a {
            Atom::Compare {
                lhs,
                op,
                rhs,
                system,
            } => {
                let sys = typed.comparison_system(lhs, rhs, *system);
                self.linear(sys, &lhs.plus(rhs, -1)?, *op)
            }
            Atom::Call { name, args } => {
                let dfa = self.env.automaton(name)?;
                let terms: Vec<&LinTerm<VarId>> = args.iter().map(|a| &a.term).collect();
                self.apply(dfa, &terms)
            }
            Atom::SeqIndex {
                seq,
                index,
                value,
                equal,
            } => {
                let mut pre = self.env.sequence(seq)?.preimage(*value);
                if !equal {
                    pre = pre.complement();
                }
                self.apply(&pre, &[index])
            }
        }
    }

    fn formula(&mut self, f: &Formula<VarId>, typed: &Typed) -> Result<Rel> {
        Ok(match f {
            Formula::Atom(a) => self.atom(a, typed)?,
            Formula::Not(a) => Self::not(self.formula(a, typed)?),
            Formula::And(a, b) => self.binary(a, b, BoolOp::And, typed)?,
            Formula::Or(a, b) => self.binary(a, b, BoolOp::Or, typed)?,
            Formula::Implies(a, b) => self.binary(a, b, BoolOp::Implies, typed)?,
            Formula::Iff(a, b) => self.binary(a, b, BoolOp::Iff, typed)?,
            Formula::Exists(vs, body) => {
                let mut r = self.formula(body, typed)?;
                for &v in vs.iter().rev() {
                    r = self.exists(r, v)?;
                }
                r
            }
            Formula::Forall(vs, body) => {
                let mut r = Self::not(self.formula(body, typed)?);
                for &v in vs.iter().rev() {
                    r = self.exists(r, v)?;
                }
                Self::not(r)
            }
        })
    }

    fn binary(
        &mut self,
        a: &Formula<VarId>,
        b: &Formula<VarId>,
        op: BoolOp,
        typed: &Typed,
    ) -> Result<Rel> {
        let x = self.formula(a, typed)?;
        let y = self.formula(b, typed)?;
        self.combine(&x, &y, op)
    }
}

/// Automaton of a typed formula over its free variables, tracks in the
/// order of `typed.free`.
pub fn compile_typed(typed: &Typed, env: &Environment) -> Result<Dfa> {
    let mut c = Compiler {
        env,
        systems: typed.vars.iter().map(|v| v.system).collect(),
    };
    let r = c.formula(&typed.formula, typed)?;
    // free variables are numbered first, so they sort first
    let all: Vec<VarId> = typed.free.clone();
    c.lift(&r, &all)
}
