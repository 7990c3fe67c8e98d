use std::collections::HashMap;

use super::Dfa;
use crate::error::{Error, Result};
use crate::numbers::{to_digits, Numeration};

/// Deterministic automaton with output, reading a single base-k track msd
/// first. State 0 is initial; the output after reading `(n)_k` is the value
/// of the sequence at `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfao {
    system: Numeration,
    delta: Vec<u32>,
    outputs: Vec<u32>,
}

impl Dfao {
    pub fn from_parts(system: Numeration, delta: Vec<u32>, outputs: Vec<u32>) -> Result<Dfao> {
        let k = system.radix();
        if outputs.is_empty() || delta.len() != outputs.len() * k {
            return Err(Error::Invalid("malformed DFAO table".into()));
        }
        if delta.iter().any(|&q| q as usize >= outputs.len()) {
            return Err(Error::Invalid("DFAO transition to unknown state".into()));
        }
        Ok(Dfao {
            system,
            delta,
            outputs,
        })
    }

    /// Fixed point of a k-uniform morphism, given as rules like
    /// `"0->0110 1->1001"`, viewed as a k-automatic sequence. Letters are
    /// single characters; the output of a letter is its digit value. The
    /// fixed point starts with the first rule's letter, whose image must
    /// begin with itself.
    pub fn from_morphism(rules: &str) -> Result<Dfao> {
        let mut letters: Vec<char> = Vec::new();
        let mut images: Vec<Vec<char>> = Vec::new();
        for rule in rules.split_whitespace() {
            let (lhs, rhs) = rule
                .split_once("->")
                .ok_or_else(|| Error::Morphism(format!("rule `{rule}` has no `->`")))?;
            let mut lhs_chars = lhs.chars();
            let letter = match (lhs_chars.next(), lhs_chars.next()) {
                (Some(c), None) => c,
                _ => {
                    return Err(Error::Morphism(format!(
                        "left side `{lhs}` is not one letter"
                    )))
                }
            };
            if letters.contains(&letter) {
                return Err(Error::Morphism(format!("letter `{letter}` defined twice")));
            }
            letters.push(letter);
            images.push(rhs.chars().collect());
        }
        let k = images
            .first()
            .map(|i| i.len())
            .ok_or_else(|| Error::Morphism("no rules".into()))?;
        if images.iter().any(|i| i.len() != k) {
            return Err(Error::Morphism("rules are not uniform".into()));
        }
        if images[0].first() != Some(&letters[0]) {
            return Err(Error::Morphism(format!(
                "image of `{}` does not start with it, no fixed point",
                letters[0]
            )));
        }
        let system = Numeration::new(k as i64)?;
        let index: HashMap<char, u32> = letters
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i as u32))
            .collect();
        let mut delta = Vec::with_capacity(letters.len() * k);
        for image in &images {
            for c in image {
                let q = index
                    .get(c)
                    .ok_or_else(|| Error::Morphism(format!("letter `{c}` has no rule")))?;
                delta.push(*q);
            }
        }
        let outputs = letters
            .iter()
            .map(|c| {
                c.to_digit(36)
                    .ok_or_else(|| Error::Morphism(format!("letter `{c}` is not a digit")))
            })
            .collect::<Result<Vec<u32>>>()?;
        Dfao::from_parts(system, delta, outputs)
    }

    pub fn system(&self) -> Numeration {
        self.system
    }

    pub fn num_states(&self) -> usize {
        self.outputs.len()
    }

    pub fn next(&self, q: usize, digit: u8) -> usize {
        self.delta[q * self.system.radix() + digit as usize] as usize
    }

    pub fn output(&self, q: usize) -> u32 {
        self.outputs[q]
    }

    pub fn output_at(&self, n: u64) -> u32 {
        let w = to_digits(n as i64, self.system).expect("natural number");
        let q = w.digits().iter().fold(0, |q, &d| self.next(q, d));
        self.outputs[q]
    }

    /// One-track automaton accepting the indices whose output is `value`.
    pub fn preimage(&self, value: u32) -> Dfa {
        let accepting = self.outputs.iter().map(|&o| o == value).collect();
        Dfa::from_parts(vec![self.system], self.delta.clone(), accepting)
            .expect("DFAO table is total")
            .minimize()
    }

    /// Distinct output values, ascending.
    pub fn output_values(&self) -> Vec<u32> {
        let mut v = self.outputs.clone();
        v.sort_unstable();
        v.dedup();
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::thue_morse_t;

    const TM4: &str = "0->0110 1->1001";
    const TM16: &str = "0->0110100110010110 1->1001011001101001";

    #[test]
    fn tm4_values() {
        let tm = Dfao::from_morphism(TM4).unwrap();
        assert_eq!(tm.system(), Numeration::msd(4));
        assert_eq!(tm.output_at(21), 1);
        assert_eq!(tm.output_at(0), 0);
        for n in 0..5000 {
            assert_eq!(tm.output_at(n), thue_morse_t(n) as u32);
        }
    }

    #[test]
    fn tm16_matches_oracle() {
        let tm = Dfao::from_morphism(TM16).unwrap();
        for n in 0..=100_000 {
            assert_eq!(tm.output_at(n), thue_morse_t(n) as u32, "n = {n}");
        }
    }

    #[test]
    fn preimage_is_padding_closed() {
        let tm = Dfao::from_morphism(TM4).unwrap();
        let ones = tm.preimage(1);
        assert!(ones.is_padding_closed());
        assert!(ones.accepts(&[21]).unwrap());
        assert!(!ones.accepts(&[18]).unwrap());
    }

    #[test]
    fn malformed_morphisms() {
        assert!(matches!(
            Dfao::from_morphism("0->01 1->100"),
            Err(Error::Morphism(_))
        ));
        assert!(matches!(
            Dfao::from_morphism("0->12 1->10"),
            Err(Error::Morphism(_))
        ));
        assert!(matches!(
            Dfao::from_morphism("0->02 1->10"),
            Err(Error::Morphism(_))
        ));
        assert!(matches!(Dfao::from_morphism(""), Err(Error::Morphism(_))));
    }
}
