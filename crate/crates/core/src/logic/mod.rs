//! A first-order query language over automatic relations.
//!
//! Formulas use `A`/`E` quantifiers, `~ & | => <=>`, linear comparisons,
//! automaton calls `$name(args)` and sequence atoms `SEQ[term]=@v`.
//! Annotations `?msd_k` and `?msd_neg_k` pick the numeration system of the
//! comparisons that follow them. Variables in positive bases range over the
//! naturals, in negative bases over all integers.

mod brute;
mod compile;
mod script;
mod syntax;
mod typing;

use std::collections::BTreeMap;
use std::path::Path;

pub use brute::{BruteConfig, BruteForce, GraphOracle, Oracle, SeqOracle};
pub use script::{Command, Located, Outcome, QueryScript, ReportEntry, ScriptReport};
pub use syntax::{Arg, Atom, Formula, LinTerm, RelOp};
pub use typing::{free_names, typecheck, Typed, VarId, VarInfo};

use crate::automata::{compile_regex, load_text, Dfa, Dfao};
use crate::error::{Error, Result};
use crate::numbers::Numeration;

/// Named automata and sequences visible to formulas.
#[derive(Debug, Clone, Default)]
pub struct Environment {
    automata: BTreeMap<String, Dfa>,
    morphisms: BTreeMap<String, String>,
    sequences: BTreeMap<String, Dfao>,
}

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert_automaton(&mut self, name: &str, dfa: Dfa) {
        self.automata.insert(name.to_string(), dfa);
    }

    pub fn insert_sequence(&mut self, name: &str, dfao: Dfao) {
        self.sequences.insert(name.to_string(), dfao);
    }

    pub fn insert_morphism(&mut self, name: &str, rules: &str) {
        self.morphisms.insert(name.to_string(), rules.to_string());
    }

    pub fn automaton(&self, name: &str) -> Result<&Dfa> {
        self.automata
            .get(name)
            .ok_or_else(|| Error::Unbound(format!("automaton `{name}`")))
    }

    pub fn sequence(&self, name: &str) -> Result<&Dfao> {
        self.sequences
            .get(name)
            .ok_or_else(|| Error::Unbound(format!("sequence `{name}`")))
    }

    pub fn signature(&self, name: &str) -> Result<&[Numeration]> {
        self.automaton(name).map(|d| d.tracks())
    }

    pub fn automaton_names(&self) -> impl Iterator<Item = &str> {
        self.automata.keys().map(|s| s.as_str())
    }

    pub fn sequence_names(&self) -> impl Iterator<Item = &str> {
        self.sequences.keys().map(|s| s.as_str())
    }

    /// Automaton accepting the assignments of the formula's free variables
    /// (tracks in alphabetical order of the variable names) that satisfy it.
    pub fn compile(&self, f: &Formula) -> Result<Dfa> {
        compile::compile_typed(&typecheck(f, self)?, self)
    }

    pub fn compile_str(&self, source: &str) -> Result<Dfa> {
        self.compile(&Formula::parse(source)?)
    }

    /// Truth value of a closed formula.
    pub fn eval_closed(&self, f: &Formula) -> Result<bool> {
        let free = free_names(f);
        if !free.is_empty() {
            return Err(Error::FreeVariables(free.join(", ")));
        }
        Ok(self.compile(f)?.truth())
    }

    pub fn eval_str(&self, source: &str) -> Result<bool> {
        self.eval_closed(&Formula::parse(source)?)
    }

    /// Compiles an open formula and stores it under `name`.
    pub fn define(&mut self, name: &str, source: &str) -> Result<&Dfa> {
        let dfa = self.compile_str(source)?;
        self.automata.insert(name.to_string(), dfa);
        self.automaton(name)
    }

    /// Runs one command, updating the environment.
    pub fn execute(&mut self, command: &Command) -> Result<Outcome> {
        match command {
            Command::Def { name, formula } => {
                let dfa = self.compile(formula)?;
                let states = dfa.num_states();
                self.automata.insert(name.clone(), dfa);
                Ok(Outcome::Defined { states })
            }
            Command::Eval { formula, .. } => self.eval_closed(formula).map(Outcome::Verdict),
            Command::Reg {
                name,
                systems,
                regex,
            } => {
                let dfa = compile_regex(regex, systems)?;
                let states = dfa.num_states();
                self.automata.insert(name.clone(), dfa);
                Ok(Outcome::Defined { states })
            }
            Command::Morphism { name, rules } => {
                // validate now so that errors point at this command
                Dfao::from_morphism(rules)?;
                self.morphisms.insert(name.clone(), rules.clone());
                Ok(Outcome::Morphism)
            }
            Command::Promote { seq, morphism } => {
                let rules = self
                    .morphisms
                    .get(morphism)
                    .ok_or_else(|| Error::Unbound(format!("morphism `{morphism}`")))?;
                let dfao = Dfao::from_morphism(rules)?;
                let states = dfao.num_states();
                self.sequences.insert(seq.clone(), dfao);
                Ok(Outcome::Sequence { states })
            }
            Command::Load { name, path } => {
                let text = std::fs::read_to_string(Path::new(path))
                    .map_err(|e| Error::Invalid(format!("cannot read `{path}`: {e}")))?;
                let dfa = load_text(&text)?.minimize();
                let states = dfa.num_states();
                self.automata.insert(name.clone(), dfa);
                Ok(Outcome::Defined { states })
            }
        }
    }

    /// Runs every command in order. A failing command is recorded in the
    /// report and the remaining commands still run.
    pub fn run_script(&mut self, script: &QueryScript) -> ScriptReport {
        let entries = script
            .commands
            .iter()
            .map(|c| ReportEntry {
                line: c.line,
                keyword: c.command.keyword(),
                name: c.command.name().to_string(),
                outcome: self
                    .execute(&c.command)
                    .unwrap_or_else(|e| Outcome::Failed(e.to_string())),
            })
            .collect();
        ScriptReport { entries }
    }
}
