//! Query scripts: a sequence of `def`, `eval`, `reg`, `morphism`,
//! `promote` and `load` commands, each ended by `:` or `;`. `#` starts a
//! comment that runs to the end of the line.

use std::fmt;

use super::syntax::{parse_formula, parse_system_tag, Formula};
use crate::automata::SyncRegex;
use crate::error::{Error, Result};
use crate::numbers::Numeration;

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    /// Saves the automaton of an open formula; its tracks are the free
    /// variables in alphabetical order.
    Def { name: String, formula: Formula },
    /// Decides a closed formula.
    Eval { name: String, formula: Formula },
    Reg {
        name: String,
        systems: Vec<Numeration>,
        regex: SyncRegex,
    },
    /// Uniform morphism rules such as `0->0110 1->1001`.
    Morphism { name: String, rules: String },
    /// Turns a morphism into a sequence usable as `NAME[n]=@v`.
    Promote { seq: String, morphism: String },
    /// Reads an automaton from a file in the text format.
    Load { name: String, path: String },
}

impl Command {
    pub fn name(&self) -> &str {
        match self {
            Command::Def { name, .. }
            | Command::Eval { name, .. }
            | Command::Reg { name, .. }
            | Command::Morphism { name, .. }
            | Command::Load { name, .. } => name,
            Command::Promote { seq, .. } => seq,
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            Command::Def { .. } => "def",
            Command::Eval { .. } => "eval",
            Command::Reg { .. } => "reg",
            Command::Morphism { .. } => "morphism",
            Command::Promote { .. } => "promote",
            Command::Load { .. } => "load",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Located {
    pub line: usize,
    pub command: Command,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct QueryScript {
    pub commands: Vec<Located>,
}

#[derive(Debug, Clone, PartialEq)]
enum Piece {
    Word(String),
    Quoted {
        text: String,
        line: usize,
        col: usize,
    },
}

impl QueryScript {
    pub fn parse(source: &str) -> Result<QueryScript> {
        let mut commands = Vec::new();
        let mut pieces: Vec<Piece> = Vec::new();
        let mut start = (1, 1);
        let (mut line, mut col) = (1usize, 1usize);
        let mut chars = source.chars().peekable();
        let advance = |c: char, line: &mut usize, col: &mut usize| {
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        };
        while let Some(&c) = chars.peek() {
            if c.is_whitespace() {
                chars.next();
                advance(c, &mut line, &mut col);
            } else if c == '#' {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            } else if c == ':' || c == ';' {
                chars.next();
                if pieces.is_empty() {
                    return Err(Error::parse(line, col, "empty command"));
                }
                commands.push(Located {
                    line: start.0,
                    command: interpret(std::mem::take(&mut pieces), start)?,
                });
                advance(c, &mut line, &mut col);
            } else {
                if pieces.is_empty() {
                    start = (line, col);
                }
                if c == '"' {
                    chars.next();
                    advance(c, &mut line, &mut col);
                    let (qline, qcol) = (line, col);
                    let mut text = String::new();
                    loop {
                        match chars.next() {
                            Some('"') => {
                                col += 1;
                                break;
                            }
                            Some(c) => {
                                text.push(c);
                                advance(c, &mut line, &mut col);
                            }
                            None => {
                                return Err(Error::parse(qline, qcol - 1, "unterminated string"))
                            }
                        }
                    }
                    pieces.push(Piece::Quoted {
                        text,
                        line: qline,
                        col: qcol,
                    });
                } else {
                    let mut w = String::new();
                    while let Some(&c) = chars.peek() {
                        if c.is_whitespace() || matches!(c, '"' | ':' | ';' | '#') {
                            break;
                        }
                        w.push(c);
                        chars.next();
                        col += 1;
                    }
                    pieces.push(Piece::Word(w));
                }
            }
        }
        if !pieces.is_empty() {
            return Err(Error::parse(
                start.0,
                start.1,
                "command is missing its terminating `:`",
            ));
        }
        Ok(QueryScript { commands })
    }
}

fn interpret(pieces: Vec<Piece>, (line, col): (usize, usize)) -> Result<Command> {
    let bad = |msg: String| Error::parse(line, col, msg);
    let word = |p: &Piece| match p {
        Piece::Word(w) => Some(w.clone()),
        Piece::Quoted { .. } => None,
    };
    let keyword =
        word(&pieces[0]).ok_or_else(|| bad("command must start with a keyword".into()))?;
    let name = pieces
        .get(1)
        .and_then(word)
        .filter(|n| n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'))
        .ok_or_else(|| bad(format!("`{keyword}` needs a name")))?;
    let quoted = |p: Option<&Piece>| match p {
        Some(Piece::Quoted { text, line, col }) => Some((text.clone(), *line, *col)),
        _ => None,
    };
    let formula = |(text, l, c): (String, usize, usize)| {
        parse_formula(&text).map_err(|e| e.into_error(&text, l, c))
    };
    match keyword.as_str() {
        "def" | "eval" => {
            if pieces.len() != 3 {
                return Err(bad(format!("`{keyword} name \"formula\"` expected")));
            }
            let q = quoted(pieces.get(2)).ok_or_else(|| bad("formula must be quoted".into()))?;
            if keyword == "def" && q.0.contains("->") {
                return Ok(Command::Morphism {
                    name,
                    rules: q.0.trim().to_string(),
                });
            }
            let formula = formula(q)?;
            Ok(if keyword == "def" {
                Command::Def { name, formula }
            } else {
                Command::Eval { name, formula }
            })
        }
        "reg" => {
            let (last, middle) = pieces[2..]
                .split_last()
                .ok_or_else(|| bad("`reg` needs systems and a quoted regex".into()))?;
            let (text, l, c) =
                quoted(Some(last)).ok_or_else(|| bad("regex must be quoted".into()))?;
            let systems = middle
                .iter()
                .map(|p| {
                    word(p)
                        .and_then(|w| parse_system_tag(w.trim_start_matches('?')))
                        .ok_or_else(|| bad(format!("bad numeration system {p:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if systems.is_empty() {
                return Err(bad("`reg` needs at least one numeration system".into()));
            }
            let regex = SyncRegex::parse(&text).map_err(|e| match e {
                Error::Parse { col: rc, msg, .. } => Error::parse(l, c + rc - 1, msg),
                other => other,
            })?;
            Ok(Command::Reg {
                name,
                systems,
                regex,
            })
        }
        "morphism" => match (pieces.len(), quoted(pieces.get(2))) {
            (3, Some((rules, _, _))) => Ok(Command::Morphism {
                name,
                rules: rules.trim().to_string(),
            }),
            _ => Err(bad("`morphism name \"rules\"` expected".into())),
        },
        "promote" => match (pieces.len(), pieces.get(2).and_then(word)) {
            (3, Some(morphism)) => Ok(Command::Promote {
                seq: name,
                morphism,
            }),
            _ => Err(bad("`promote NAME morphism` expected".into())),
        },
        "load" => match (
            pieces.len(),
            quoted(pieces.get(2)).or_else(|| pieces.get(2).and_then(word).map(|w| (w, 0, 0))),
        ) {
            (3, Some((path, _, _))) => Ok(Command::Load { name, path }),
            _ => Err(bad("`load name \"path\"` expected".into())),
        },
        other => Err(bad(format!("unknown command `{other}`"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Verdict(bool),
    /// A stored automaton and its number of states.
    Defined {
        states: usize,
    },
    Sequence {
        states: usize,
    },
    Morphism,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportEntry {
    pub line: usize,
    pub keyword: &'static str,
    pub name: String,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScriptReport {
    pub entries: Vec<ReportEntry>,
}

impl ScriptReport {
    pub fn verdict(&self, name: &str) -> Option<bool> {
        self.entries.iter().find_map(|e| match e.outcome {
            Outcome::Verdict(v) if e.name == name => Some(v),
            _ => None,
        })
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportEntry> {
        self.entries
            .iter()
            .filter(|e| matches!(e.outcome, Outcome::Failed(_)))
    }

    /// No command failed and every eval returned TRUE.
    pub fn all_true(&self) -> bool {
        self.entries
            .iter()
            .all(|e| !matches!(e.outcome, Outcome::Failed(_) | Outcome::Verdict(false)))
    }
}

impl fmt::Display for ScriptReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            match &e.outcome {
                Outcome::Verdict(v) => {
                    writeln!(f, "{} {}", e.name, if *v { "TRUE" } else { "FALSE" })?
                }
                Outcome::Defined { states } => {
                    writeln!(f, "{} defined: {} states", e.name, states)?
                }
                Outcome::Sequence { states } => {
                    writeln!(f, "{} promoted: {} states", e.name, states)?
                }
                Outcome::Morphism => writeln!(f, "{} morphism stored", e.name)?,
                Outcome::Failed(msg) => writeln!(f, "{} ERROR (line {}): {}", e.name, e.line, msg)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_script() {
        assert_eq!(QueryScript::parse("").unwrap(), QueryScript::default());
        assert_eq!(
            QueryScript::parse("  # only a comment\n").unwrap(),
            QueryScript::default()
        );
    }

    #[test]
    fn commands_and_terminators() {
        let s = QueryScript::parse(
            "def tm4 \"0->0110 1->1001\":\npromote TM4 tm4;\n\
             reg p34 msd_3 msd_4 \"([0,0]|[1,1]|[2,2])*\":\n\
             eval t \"An Ey $f30(n,y)\": # trailing comment\n\
             def bnd3 \"?msd_4 Ex $f30(n,x) & $p34(x,n)\":",
        )
        .unwrap();
        let kinds: Vec<&str> = s.commands.iter().map(|c| c.command.keyword()).collect();
        assert_eq!(kinds, vec!["morphism", "promote", "reg", "eval", "def"]);
        assert_eq!(s.commands[3].line, 4);
        match &s.commands[2].command {
            Command::Reg { systems, .. } => {
                assert_eq!(systems, &vec![Numeration::msd(3), Numeration::msd(4)])
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn multi_line_formula_errors_point_into_the_file() {
        let src = "eval ok \"x=x\":\neval bad \"?msd_4 An (n>=1 &\n   n <)\":";
        match QueryScript::parse(src).unwrap_err() {
            Error::Parse { line, col, .. } => {
                assert_eq!(line, 3);
                assert_eq!(col, 7);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_commands() {
        assert!(QueryScript::parse("eval t \"x=1\"").is_err());
        assert!(QueryScript::parse("frobnicate t \"x=1\":").is_err());
        assert!(QueryScript::parse("eval \"x=1\":").is_err());
        assert!(QueryScript::parse("reg r msd_4:").is_err());
        assert!(QueryScript::parse("reg r msd_x \"1\":").is_err());
        assert!(QueryScript::parse("reg r msd_4 \"[1\":").is_err());
        assert!(QueryScript::parse("eval t \"x=1:").is_err());
        assert!(QueryScript::parse(":").is_err());
    }
}
