//! Plain-text automaton files and Graphviz export.
//!
//! Text format:
//!
//! ```text
//! 4 3
//! state 0 1
//! state 1 0
//! 0 0,0 0
//! 0 1,1 1
//! ...
//! ```
//!
//! Line one holds the signed track bases. `state <id> <accepting>` lines
//! follow, then `<src> <d1,...,dk> <dst>` transitions; a zero-track automaton
//! writes `-` for the digit tuple. State 0 is initial. Missing transitions go
//! to an implicit rejecting sink.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::{alphabet_size, decode_letter, encode_letter, Dfa, Dfao};
use crate::error::{Error, Result};
use crate::numbers::Numeration;

fn letter_text(tracks: &[Numeration], letter: usize) -> String {
    if tracks.is_empty() {
        return "-".to_string();
    }
    decode_letter(tracks, letter)
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn save_text(dfa: &Dfa) -> String {
    let mut out = String::new();
    let bases: Vec<String> = dfa.tracks().iter().map(|t| t.base().to_string()).collect();
    writeln!(out, "{}", bases.join(" ")).unwrap();
    for q in 0..dfa.num_states() {
        writeln!(out, "state {} {}", q, dfa.is_accepting(q) as u8).unwrap();
    }
    for q in 0..dfa.num_states() {
        for (l, &p) in dfa.row(q).iter().enumerate() {
            writeln!(out, "{} {} {}", q, letter_text(dfa.tracks(), l), p).unwrap();
        }
    }
    out
}

pub fn load_text(text: &str) -> Result<Dfa> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Format("empty file".into()))?;
    let tracks = header
        .split_whitespace()
        .map(|b| {
            b.parse::<i64>()
                .map_err(|_| Error::Format(format!("bad base `{b}`")))
                .and_then(Numeration::new)
        })
        .collect::<Result<Vec<_>>>()?;
    let alphabet = alphabet_size(&tracks);
    let mut accepting: Vec<bool> = Vec::new();
    let mut transitions: Vec<(usize, usize, usize)> = Vec::new();
    for (idx, line) in lines {
        let bad = |what: &str| Error::Format(format!("line {}: {what}", idx + 1));
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            [] => continue,
            ["state", id, acc] => {
                let id: usize = id.parse().map_err(|_| bad("bad state id"))?;
                if id != accepting.len() {
                    return Err(bad("states must be listed in order from 0"));
                }
                accepting.push(match *acc {
                    "0" => false,
                    "1" => true,
                    _ => return Err(bad("accepting flag must be 0 or 1")),
                });
            }
            [src, tuple, dst] => {
                let src: usize = src.parse().map_err(|_| bad("bad source"))?;
                let dst: usize = dst.parse().map_err(|_| bad("bad target"))?;
                let digits: Vec<u8> = if *tuple == "-" {
                    Vec::new()
                } else {
                    tuple
                        .split(',')
                        .map(|d| d.parse::<u8>().map_err(|_| bad("bad digit")))
                        .collect::<Result<_>>()?
                };
                if digits.len() != tracks.len() {
                    return Err(bad("digit tuple has the wrong arity"));
                }
                if digits
                    .iter()
                    .zip(&tracks)
                    .any(|(&d, t)| d as usize >= t.radix())
                {
                    return Err(bad("digit out of range"));
                }
                transitions.push((src, encode_letter(&tracks, &digits), dst));
            }
            _ => return Err(bad("unrecognized line")),
        }
    }
    let n = accepting.len();
    if n == 0 {
        return Err(Error::Format("no states".into()));
    }
    let sink = n as u32;
    let mut delta = vec![sink; n * alphabet];
    for (src, letter, dst) in transitions {
        if src >= n || dst >= n {
            return Err(Error::Format(format!(
                "transition {src} -> {dst} names an unknown state"
            )));
        }
        delta[src * alphabet + letter] = dst as u32;
    }
    if delta.contains(&sink) {
        delta.extend(std::iter::repeat_n(sink, alphabet));
        accepting.push(false);
    }
    Dfa::from_parts(tracks, delta, accepting)
}

/// Graphviz rendering.
pub trait DotExport {
    fn to_dot(&self) -> String;
}

impl DotExport for Dfa {
    /// A rejecting sink is left out unless it is the only state. Parallel
    /// edges are merged into one with all their labels.
    fn to_dot(&self) -> String {
        let dead = self.dead_states();
        let hide = |q: usize| dead[q] && self.num_states() > 1 && q != 0;
        let mut out = String::new();
        out.push_str("digraph automaton {\n  rankdir=LR;\n  node [shape=circle];\n");
        out.push_str("  start [shape=point];\n  start -> 0;\n");
        for q in (0..self.num_states()).filter(|&q| !hide(q)) {
            let shape = if self.is_accepting(q) {
                "doublecircle"
            } else {
                "circle"
            };
            writeln!(out, "  {q} [shape={shape}];").unwrap();
        }
        for q in (0..self.num_states()).filter(|&q| !hide(q)) {
            let mut grouped: BTreeMap<u32, Vec<String>> = BTreeMap::new();
            for (l, &p) in self.row(q).iter().enumerate() {
                if !hide(p as usize) {
                    grouped.entry(p).or_default().push(label(self.tracks(), l));
                }
            }
            for (p, labels) in grouped {
                writeln!(out, "  {q} -> {p} [label=\"{}\"];", labels.join(" ")).unwrap();
            }
        }
        out.push_str("}\n");
        out
    }
}

impl DotExport for Dfao {
    fn to_dot(&self) -> String {
        let mut out = String::new();
        out.push_str("digraph automaton {\n  rankdir=LR;\n  node [shape=circle];\n");
        out.push_str("  start [shape=point];\n  start -> 0;\n");
        for q in 0..self.num_states() {
            writeln!(out, "  {q} [label=\"{q}/{}\"];", self.output(q)).unwrap();
        }
        for q in 0..self.num_states() {
            let mut grouped: BTreeMap<usize, Vec<String>> = BTreeMap::new();
            for d in 0..self.system().radix() {
                grouped
                    .entry(self.next(q, d as u8))
                    .or_default()
                    .push(d.to_string());
            }
            for (p, labels) in grouped {
                writeln!(out, "  {q} -> {p} [label=\"{}\"];", labels.join(" ")).unwrap();
            }
        }
        out.push_str("}\n");
        out
    }
}

fn label(tracks: &[Numeration], letter: usize) -> String {
    let digits = decode_letter(tracks, letter);
    match digits.len() {
        0 => "ε".to_string(),
        1 => digits[0].to_string(),
        _ => format!(
            "[{}]",
            digits
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ),
    }
}

pub fn export_dot<T: DotExport + ?Sized>(x: &T) -> String {
    x.to_dot()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Dfa {
        let tracks = vec![Numeration::msd(4), Numeration::neg(3)];
        Dfa::explore(
            tracks,
            0u8,
            |&s| s == 0,
            |&s, d| {
                if s == 2 {
                    2
                } else {
                    (s + d[0] + d[1]) % 3
                }
            },
        )
        .unwrap()
        .minimize()
    }

    #[test]
    fn text_round_trip() {
        let a = sample();
        let text = save_text(&a);
        assert!(text.starts_with("4 -3\n"));
        let b = load_text(&text).unwrap();
        assert_eq!(a, b);
        let c = Dfa::constant(true);
        assert_eq!(load_text(&save_text(&c)).unwrap(), c);
    }

    #[test]
    fn partial_files_get_a_sink() {
        let text = "2\nstate 0 1\n0 1 0\n";
        let a = load_text(text).unwrap();
        assert_eq!(a.num_states(), 2);
        assert!(a.accepts(&[3]).unwrap());
        assert!(!a.accepts(&[2]).unwrap());
    }

    #[test]
    fn malformed_files() {
        assert!(load_text("").is_err());
        assert!(load_text("4\nstate 1 0\n").is_err());
        assert!(load_text("4\nstate 0 0\n0 7 0\n").is_err());
        assert!(load_text("4\nstate 0 0\n0 1,1 0\n").is_err());
        assert!(load_text("1\nstate 0 0\n").is_err());
    }

    #[test]
    fn dot_universal() {
        let u = Dfa::universal(vec![Numeration::msd(2)]);
        let dot = export_dot(&u);
        assert!(dot.contains("0 [shape=doublecircle]"));
        assert!(dot.contains("0 -> 0 [label=\"0 1\"]"));
        assert_eq!(dot.matches("->").count(), 2);
        assert_eq!(dot, export_dot(&u.clone()));
    }
}
