//! Regular expressions over digit tuples.
//!
//! Atoms are tuples `[d1,d2,...]` with one digit per track; on a single
//! track a bare character `0`-`9` is a digit and `[12]` is the single digit
//! twelve. Operators: juxtaposition, `|`, `*`, `+`, `?`, parentheses; `()`
//! is the empty word. Whitespace is ignored.

use super::{encode_letter, Dfa, Nfa};
use crate::error::{Error, Result};
use crate::numbers::Numeration;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Node {
    Epsilon,
    Atom(Vec<u8>),
    Concat(Vec<Node>),
    Alt(Vec<Node>),
    Star(Box<Node>),
    Plus(Box<Node>),
    Optional(Box<Node>),
}

/// A parsed tuple regex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncRegex {
    source: String,
    root: Node,
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    source: &'a str,
}

impl SyncRegex {
    pub fn parse(source: &str) -> Result<SyncRegex> {
        let mut p = Parser {
            chars: source.chars().collect(),
            pos: 0,
            source,
        };
        let root = p.alternation()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.error("unexpected character"));
        }
        Ok(SyncRegex {
            source: source.to_string(),
            root,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::parse(1, self.pos + 1, format!("{msg} in regex `{}`", self.source))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn alternation(&mut self) -> Result<Node> {
        let mut branches = vec![self.concatenation()?];
        while self.peek() == Some('|') {
            self.pos += 1;
            branches.push(self.concatenation()?);
        }
        Ok(if branches.len() == 1 {
            branches.pop().unwrap()
        } else {
            Node::Alt(branches)
        })
    }

    fn concatenation(&mut self) -> Result<Node> {
        let mut parts = Vec::new();
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            parts.push(self.repetition()?);
        }
        Ok(match parts.len() {
            0 => Node::Epsilon,
            1 => parts.pop().unwrap(),
            _ => Node::Concat(parts),
        })
    }

    fn repetition(&mut self) -> Result<Node> {
        let mut node = self.atom()?;
        loop {
            match self.peek() {
                Some('*') => node = Node::Star(Box::new(node)),
                Some('+') => node = Node::Plus(Box::new(node)),
                Some('?') => node = Node::Optional(Box::new(node)),
                _ => return Ok(node),
            }
            self.pos += 1;
        }
    }

    fn atom(&mut self) -> Result<Node> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.alternation()?;
                if self.peek() != Some(')') {
                    return Err(self.error("missing `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some('[') => {
                self.pos += 1;
                let mut digits = Vec::new();
                loop {
                    self.skip_ws();
                    let start = self.pos;
                    while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    if start == self.pos {
                        return Err(self.error("expected a digit"));
                    }
                    let text: String = self.chars[start..self.pos].iter().collect();
                    let d: u8 = text.parse().map_err(|_| self.error("digit too large"))?;
                    digits.push(d);
                    match self.peek() {
                        Some(',') => self.pos += 1,
                        Some(']') => {
                            self.pos += 1;
                            return Ok(Node::Atom(digits));
                        }
                        _ => return Err(self.error("malformed bracket digit")),
                    }
                }
            }
            Some(c) if c.is_ascii_digit() => {
                self.pos += 1;
                Ok(Node::Atom(vec![c as u8 - b'0']))
            }
            _ => Err(self.error("expected an atom")),
        }
    }
}

/// Glushkov position automaton.
struct Positions {
    letters: Vec<usize>,
    follow: Vec<Vec<usize>>,
}

struct Summary {
    nullable: bool,
    first: Vec<usize>,
    last: Vec<usize>,
}

impl Positions {
    fn walk(&mut self, node: &Node, tracks: &[Numeration]) -> Result<Summary> {
        Ok(match node {
            Node::Epsilon => Summary {
                nullable: true,
                first: vec![],
                last: vec![],
            },
            Node::Atom(digits) => {
                if digits.len() != tracks.len() {
                    return Err(Error::Arity {
                        expected: tracks.len(),
                        got: digits.len(),
                    });
                }
                for (&d, t) in digits.iter().zip(tracks) {
                    if d as usize >= t.radix() {
                        return Err(Error::DigitOutOfRange {
                            digit: d as i64,
                            base: t.base(),
                        });
                    }
                }
                let p = self.letters.len();
                self.letters.push(encode_letter(tracks, digits));
                self.follow.push(Vec::new());
                Summary {
                    nullable: false,
                    first: vec![p],
                    last: vec![p],
                }
            }
            Node::Concat(parts) => {
                let mut acc = Summary {
                    nullable: true,
                    first: vec![],
                    last: vec![],
                };
                for part in parts {
                    let s = self.walk(part, tracks)?;
                    for &l in &acc.last {
                        self.follow[l].extend_from_slice(&s.first);
                    }
                    if acc.nullable {
                        acc.first.extend_from_slice(&s.first);
                    }
                    if s.nullable {
                        acc.last.extend_from_slice(&s.last);
                    } else {
                        acc.last = s.last;
                    }
                    acc.nullable &= s.nullable;
                }
                acc
            }
            Node::Alt(branches) => {
                let mut acc = Summary {
                    nullable: false,
                    first: vec![],
                    last: vec![],
                };
                for b in branches {
                    let s = self.walk(b, tracks)?;
                    acc.nullable |= s.nullable;
                    acc.first.extend(s.first);
                    acc.last.extend(s.last);
                }
                acc
            }
            Node::Star(inner) | Node::Plus(inner) => {
                let s = self.walk(inner, tracks)?;
                for &l in &s.last {
                    self.follow[l].extend_from_slice(&s.first);
                }
                Summary {
                    nullable: s.nullable || matches!(node, Node::Star(_)),
                    ..s
                }
            }
            Node::Optional(inner) => Summary {
                nullable: true,
                ..self.walk(inner, tracks)?
            },
        })
    }
}

/// Minimal automaton for the padding closure of the regex language: a tuple
/// is accepted iff one of its zero-paddings matches.
pub fn compile_regex(regex: &SyncRegex, tracks: &[Numeration]) -> Result<Dfa> {
    let mut pos = Positions {
        letters: Vec::new(),
        follow: Vec::new(),
    };
    let top = pos.walk(&regex.root, tracks)?;
    let n = pos.letters.len();
    let mut edges: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n + 1];
    edges[0] = top
        .first
        .iter()
        .map(|&p| (pos.letters[p] as u32, p as u32 + 1))
        .collect();
    for p in 0..n {
        edges[p + 1] = pos.follow[p]
            .iter()
            .map(|&q| (pos.letters[q] as u32, q as u32 + 1))
            .collect();
    }
    let mut accepting = vec![false; n + 1];
    accepting[0] = top.nullable;
    for &l in &top.last {
        accepting[l + 1] = true;
    }
    let nfa = Nfa::new(tracks.to_vec(), vec![0], edges, accepting);
    Ok(nfa.determinize().pad_closed())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn compile(src: &str, tracks: &[Numeration]) -> Dfa {
        compile_regex(&SyncRegex::parse(src).unwrap(), tracks).unwrap()
    }

    #[test]
    fn digit_copy_regex() {
        let p34 = compile(
            "([0,0]|[1,1]|[2,2])*",
            &[Numeration::msd(3), Numeration::msd(4)],
        );
        assert!(p34.accepts(&[5, 6]).unwrap());
        assert!(p34.accepts(&[0, 0]).unwrap());
        assert!(!p34.accepts(&[5, 5]).unwrap());
    }

    #[test]
    fn power_pairs_regex() {
        let power43 = compile(
            "[0,0]*[1,1][0,0]*",
            &[Numeration::msd(4), Numeration::msd(3)],
        );
        assert!(power43.accepts(&[16, 9]).unwrap());
        assert!(power43.accepts(&[1, 1]).unwrap());
        assert!(!power43.accepts(&[16, 3]).unwrap());
        assert!(!power43.accepts(&[4, 9]).unwrap());
    }

    #[test]
    fn bracketed_single_digits() {
        let r = compile("1[12]7", &[Numeration::msd(16)]);
        let hits: Vec<i64> = (0..5000).filter(|&n| r.accepts(&[n]).unwrap()).collect();
        assert_eq!(hits, vec![455]);
    }

    #[test]
    fn epsilon_and_optional() {
        let r = compile("(0|2)*1?", &[Numeration::msd(4)]);
        for (n, want) in [
            (0, true),
            (1, true),
            (2, true),
            (9, true),
            (3, false),
            (6, false),
        ] {
            assert_eq!(r.accepts(&[n]).unwrap(), want, "n = {n}");
        }
        let eps = compile("()", &[Numeration::msd(4)]);
        assert_eq!(eps.enumerate(3).unwrap(), vec![vec![0]]);
    }

    #[test]
    fn errors() {
        assert!(SyncRegex::parse("[1,").is_err());
        assert!(SyncRegex::parse("(12").is_err());
        assert!(SyncRegex::parse("*").is_err());
        let r = SyncRegex::parse("[5]").unwrap();
        assert!(matches!(
            compile_regex(&r, &[Numeration::msd(4)]),
            Err(Error::DigitOutOfRange { .. })
        ));
        let r = SyncRegex::parse("[1,1]").unwrap();
        assert!(matches!(
            compile_regex(&r, &[Numeration::msd(4)]),
            Err(Error::Arity { .. })
        ));
    }
}
