//! Guessing synchronized automata for `n -> h(n)` from sampled values.
//!
//! A prefix of a two-track word is summarized by how it can be completed:
//! for each suffix `v` of the `n` track from a test set, the `y` suffix (if
//! any) that makes `(n, h(n))` accepted. Prefixes with equal summaries are
//! identified, states are discovered breadth first from the empty prefix and
//! the result is minimized. The test set holds every suffix of length at
//! most one plus seeded random longer ones; only membership samples
//! `h(n)` are used, and correctness is left to a separate verification step.

use std::collections::BTreeMap;

use rustc_hash::FxHashMap as HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::automata::{encode_letter, Dfa};
use crate::error::{Error, Result};
use crate::numbers::{rarefied_at, to_digits, Numeration, SumKind};

/// Random access to `h(n)`.
pub trait ValueOracle: Sync {
    fn value(&self, n: u64) -> i64;
}

impl<F: Fn(u64) -> i64 + Sync> ValueOracle for F {
    fn value(&self, n: u64) -> i64 {
        self(n)
    }
}

/// `f_{b,j}` or `g_{b,j}`, optionally negated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RarefiedOracle {
    pub kind: SumKind,
    pub b: u64,
    pub j: u64,
    pub negate: bool,
}

impl ValueOracle for RarefiedOracle {
    fn value(&self, n: u64) -> i64 {
        let v = rarefied_at(self.kind, self.b, self.j, n);
        if self.negate {
            -v
        } else {
            v
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSet {
    /// Numeration systems of the `n` and `y` tracks.
    pub signature: [Numeration; 2],
    /// Sampled `h(n)`.
    pub values: BTreeMap<u64, i64>,
    /// Seed of the random negatives and test suffixes.
    pub seed: u64,
}

impl SampleSet {
    pub fn new(signature: [Numeration; 2], seed: u64) -> Result<Self> {
        if signature[0].is_negative() {
            return Err(Error::Invalid(
                "the n track must use a positive base".into(),
            ));
        }
        Ok(SampleSet {
            signature,
            values: BTreeMap::new(),
            seed,
        })
    }

    pub fn insert(&mut self, n: u64, y: i64) -> Result<()> {
        let ys = self.signature[1];
        if !ys.represents(y) {
            return Err(Error::Unrepresentable {
                value: y,
                base: ys.base(),
            });
        }
        self.values.insert(n, y);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn positives(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.values.iter().map(|(&n, &y)| (n as i64, y))
    }

    /// Pairs `(n, y)` with `y != h(n)`, regenerated from the seed: `h(n) +- 1`,
    /// `h(n) +- 2`, `0`, `h(n) + 17`, and three values drawn uniformly from
    /// `[-3M, 3M]` where `M = max |h|`. Values the `y` track cannot
    /// represent are dropped.
    pub fn negatives(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let m = self
            .values
            .values()
            .map(|v| v.abs())
            .max()
            .unwrap_or(0)
            .max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let ys = self.signature[1];
        self.values.iter().flat_map(move |(&n, &h)| {
            let mut cands = vec![h + 1, h - 1, h + 2, h - 2, 0, h + 17];
            for _ in 0..3 {
                cands.push(rng.random_range(-3 * m..=3 * m));
            }
            cands.sort_unstable();
            cands.dedup();
            cands
                .into_iter()
                .filter(move |&y| y != h && ys.represents(y))
                .map(move |y| (n as i64, y))
        })
    }
}

/// Samples `h(0..=n_max)`.
pub fn build_samples(
    oracle: &dyn ValueOracle,
    signature: [Numeration; 2],
    n_max: u64,
    seed: u64,
) -> Result<SampleSet> {
    let mut s = SampleSet::new(signature, seed)?;
    for n in 0..=n_max {
        s.insert(n, oracle.value(n))?;
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub dfa: Dfa,
    /// Number of sampled `n`.
    pub samples: usize,
    /// Distinct residual summaries found, before minimization.
    pub classes: usize,
    /// Size of the suffix test set.
    pub tests: usize,
}

impl Hypothesis {
    /// Sample pairs the automaton gets wrong, checked at the canonical
    /// padding and two extra zero letters.
    pub fn inconsistencies(&self, s: &SampleSet) -> Result<Vec<(i64, i64, bool)>> {
        let d = &self.dfa;
        // states reached after 0, 1 and 2 leading all-zero letters
        let starts = [0, d.next(0, 0), d.next(d.next(0, 0), 0)];
        let mut bad = Vec::new();
        let mut check = |n: i64, y: i64, want: bool| -> Result<()> {
            let w = d.letters_for(&[n, y], 0)?;
            if starts
                .iter()
                .any(|&q0| d.is_accepting(w.iter().fold(q0, |q, &l| d.next(q, l))) != want)
            {
                bad.push((n, y, want));
            }
            Ok(())
        };
        for (n, y) in s.positives() {
            check(n, y, true)?;
        }
        for (n, y) in s.negatives() {
            check(n, y, false)?;
        }
        Ok(bad)
    }
}

/// Longest random test suffix.
const MAX_TEST_LEN: u32 = 8;

struct Learner<'a> {
    oracle: &'a dyn ValueOracle,
    signature: [Numeration; 2],
    kn: u64,
    ky: u64,
    /// Test suffixes as `(length, value)`.
    tests: Vec<(u32, u64)>,
    /// Longest prefix that can still be extended without overflow.
    max_prefix: usize,
}

type Prefix = (u64, Vec<u8>);

impl Learner<'_> {
    fn new<'a>(
        oracle: &'a dyn ValueOracle,
        signature: [Numeration; 2],
        random_tests: usize,
        seed: u64,
    ) -> Learner<'a> {
        let kn = signature[0].radix() as u64;
        let ky = signature[1].radix() as u64;
        let mut tests: Vec<(u32, u64)> = vec![(0, 0)];
        tests.extend((0..kn).map(|d| (1, d)));
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7e57);
        let mut seen: std::collections::HashSet<(u32, u64)> = tests.iter().copied().collect();
        // never ask for more suffixes than exist
        let space: u64 = (2..=MAX_TEST_LEN).map(|q| kn.pow(q)).sum();
        let want = (random_tests as u64).min(space) as usize;
        while tests.len() < 1 + kn as usize + want {
            let q = rng.random_range(2..=MAX_TEST_LEN);
            let v = rng.random_range(0..kn.pow(q));
            if seen.insert((q, v)) {
                tests.push((q, v));
            }
        }
        // keep n = prefix * kn^q + v below 2^62
        let mut max_prefix = 0;
        while (max_prefix as f64 + 1.0 + MAX_TEST_LEN as f64) * (kn as f64).log2() < 62.0 {
            max_prefix += 1;
        }
        Learner {
            oracle,
            signature,
            kn,
            ky,
            tests,
            max_prefix,
        }
    }

    /// The `y` suffix completing `prefix` for each test, encoded as an
    /// index, or `u64::MAX`; also returns the samples taken.
    fn summary(&self, prefix: &Prefix) -> (Vec<u64>, Vec<(u64, i64)>) {
        let (n_val, y_digits) = prefix;
        let p = y_digits.len();
        let mut sig = Vec::with_capacity(self.tests.len());
        let mut taken = Vec::with_capacity(self.tests.len());
        for &(q, v) in &self.tests {
            let n = n_val * self.kn.pow(q) + v;
            let y = self.oracle.value(n);
            taken.push((n, y));
            let code = to_digits(y, self.signature[1])
                .ok()
                .and_then(|w| {
                    let d = w.digits();
                    let len = p + q as usize;
                    if d.len() > len {
                        return None;
                    }
                    let lead = len - d.len();
                    // top p digits of the padded word must match the prefix
                    let top_ok = (0..p).all(|i| {
                        let digit = if i < lead { 0 } else { d[i - lead] };
                        digit == y_digits[i]
                    });
                    top_ok.then(|| {
                        (p..len).fold(0u64, |acc, i| {
                            acc * self.ky + if i < lead { 0 } else { d[i - lead] as u64 }
                        })
                    })
                })
                .unwrap_or(u64::MAX);
            sig.push(code);
        }
        (sig, taken)
    }

    fn explore(&self, samples: &mut SampleSet, budget: usize) -> Result<(Dfa, usize)> {
        let tracks = self.signature.to_vec();
        let alphabet = (self.kn * self.ky) as usize;
        let mut ids: HashMap<Vec<u64>, u32> = HashMap::default();
        let mut reps: Vec<Prefix> = Vec::new();
        let mut accepting = Vec::new();
        let root: Prefix = (0, Vec::new());
        let (sig, taken) = self.summary(&root);
        for (n, y) in taken {
            samples.insert(n, y)?;
        }
        if sig.iter().all(|&c| c == u64::MAX) {
            return Ok((Dfa::empty(tracks), 1));
        }
        accepting.push(sig[0] != u64::MAX);
        ids.insert(sig, 0);
        reps.push(root);
        let dead = u32::MAX;
        let mut delta: Vec<u32> = Vec::new();
        let mut i = 0;
        while i < reps.len() {
            let (n_val, y_digits) = reps[i].clone();
            if y_digits.len() >= self.max_prefix {
                return Err(Error::Inference("representatives grow too long".into()));
            }
            if samples.len() > budget {
                return Err(Error::Inference(format!(
                    "sample budget {budget} exhausted"
                )));
            }
            let children: Vec<(usize, Prefix)> = (0..self.kn)
                .flat_map(|dn| (0..self.ky).map(move |dy| (dn, dy)))
                .map(|(dn, dy)| {
                    let mut yd = y_digits.clone();
                    yd.push(dy as u8);
                    let letter = encode_letter(&tracks, &[dn as u8, dy as u8]);
                    (letter, (n_val * self.kn + dn, yd))
                })
                .collect();
            let sums: Vec<(Vec<u64>, Vec<(u64, i64)>)> =
                children.par_iter().map(|(_, c)| self.summary(c)).collect();
            let mut row = vec![dead; alphabet];
            for ((letter, child), (sig, taken)) in children.into_iter().zip(sums) {
                for (n, y) in taken {
                    samples.insert(n, y)?;
                }
                if sig.iter().all(|&c| c == u64::MAX) {
                    continue;
                }
                let id = match ids.get(&sig) {
                    Some(&id) => id,
                    None => {
                        let id = reps.len() as u32;
                        accepting.push(sig[0] != u64::MAX);
                        ids.insert(sig, id);
                        reps.push(child);
                        id
                    }
                };
                row[letter] = id;
            }
            delta.extend(row);
            i += 1;
        }
        let classes = reps.len();
        let sink = classes as u32;
        if delta.contains(&dead) {
            for d in delta.iter_mut().filter(|d| **d == dead) {
                *d = sink;
            }
            delta.extend(std::iter::repeat_n(sink, alphabet));
            accepting.push(false);
        }
        Ok((
            Dfa::from_parts(tracks, delta, accepting)?.minimize(),
            classes,
        ))
    }
}

/// Guesses an automaton for `n -> h(n)` with `random_tests` random test
/// suffixes, recording every value it looks at in `samples`. Fails once more
/// than `budget` values have been sampled.
pub fn guess_dfa(
    oracle: &dyn ValueOracle,
    samples: &mut SampleSet,
    random_tests: usize,
    budget: usize,
) -> Result<Hypothesis> {
    let learner = Learner::new(oracle, samples.signature, random_tests, samples.seed);
    let (dfa, classes) = learner.explore(samples, budget)?;
    Ok(Hypothesis {
        dfa,
        samples: samples.len(),
        classes,
        tests: learner.tests.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InferConfig {
    pub start: u64,
    pub ceiling: u64,
    pub seed: u64,
}

impl Default for InferConfig {
    fn default() -> Self {
        InferConfig {
            start: 1 << 12,
            ceiling: 1 << 20,
            seed: 0x5eed,
        }
    }
}

/// Random test suffixes used at sample size `n`.
pub fn tests_for(n: u64) -> usize {
    ((n as f64).sqrt() / 2.0) as usize
}

/// Guesses with sample sizes `N = start, 4 start, ...` until `verify`
/// accepts the hypothesis. A hypothesis that contradicts its own samples is
/// skipped.
pub fn infer_and_verify(
    name: &str,
    oracle: &dyn ValueOracle,
    signature: [Numeration; 2],
    config: InferConfig,
    mut verify: impl FnMut(&Dfa) -> Result<bool>,
) -> Result<Hypothesis> {
    let mut n = config.start.max(1);
    let mut last = String::from("no attempt");
    while n <= config.ceiling {
        let mut samples = SampleSet::new(signature, config.seed)?;
        match guess_dfa(oracle, &mut samples, tests_for(n), n as usize) {
            Ok(h) => {
                let bad = h.inconsistencies(&samples)?;
                if !bad.is_empty() {
                    last = format!("N = {n}: guess contradicts {} samples", bad.len());
                } else if verify(&h.dfa)? {
                    return Ok(h);
                } else {
                    last = format!(
                        "N = {n}: {}-state guess failed verification",
                        h.dfa.num_states()
                    );
                }
            }
            Err(e) => last = format!("N = {n}: {e}"),
        }
        n = n.saturating_mul(4);
    }
    Err(Error::Inference(format!(
        "{name}: ceiling reached ({last})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::eq_relation;

    #[test]
    fn sample_examples() {
        let f30 = RarefiedOracle {
            kind: SumKind::Ones,
            b: 3,
            j: 0,
            negate: false,
        };
        let s = build_samples(&f30, [Numeration::msd(4), Numeration::msd(3)], 4, 1).unwrap();
        assert_eq!(
            s.positives().collect::<Vec<_>>(),
            vec![(0, 0), (1, 1), (2, 2), (3, 3), (4, 4)]
        );
        assert!(s
            .negatives()
            .all(|(n, y)| y != s.values[&(n as u64)] && y >= 0));
        let mf31 = RarefiedOracle {
            kind: SumKind::Ones,
            b: 3,
            j: 1,
            negate: true,
        };
        let s = build_samples(&mf31, [Numeration::msd(4), Numeration::msd(3)], 2, 1).unwrap();
        assert_eq!(
            s.values.values().copied().collect::<Vec<_>>(),
            vec![0, 1, 2]
        );
        let s = build_samples(&f30, [Numeration::msd(4), Numeration::msd(3)], 0, 1).unwrap();
        assert_eq!(s.len(), 1);
        let f51 = RarefiedOracle {
            kind: SumKind::Ones,
            b: 5,
            j: 1,
            negate: false,
        };
        assert!(matches!(
            build_samples(&f51, [Numeration::msd(16), Numeration::msd(5)], 100, 1),
            Err(Error::Unrepresentable { .. })
        ));
    }

    #[test]
    fn samples_are_reproducible() {
        let f = |n: u64| n as i64;
        let sig = [Numeration::msd(4), Numeration::msd(4)];
        let a = build_samples(&f, sig, 50, 9).unwrap();
        let b = build_samples(&f, sig, 50, 9).unwrap();
        assert!(a.negatives().eq(b.negatives()));
    }

    #[test]
    fn identity_is_the_diagonal() {
        let f = |n: u64| n as i64;
        let mut s = SampleSet::new([Numeration::msd(4), Numeration::msd(4)], 3).unwrap();
        let h = guess_dfa(&f, &mut s, 16, usize::MAX).unwrap();
        assert!(h.dfa.num_states() <= 2);
        assert!(h.dfa.equivalent(&eq_relation(Numeration::msd(4))));
        assert!(h.inconsistencies(&s).unwrap().is_empty());
    }

    #[test]
    fn constant_zero() {
        let f = |_: u64| 0i64;
        let sig = [Numeration::msd(4), Numeration::msd(3)];
        let h = infer_and_verify("zero", &f, sig, InferConfig::default(), |_| Ok(true)).unwrap();
        assert_eq!(h.dfa.trimmed_state_count(), 1);
        assert!(h.dfa.accepts(&[77, 0]).unwrap());
        assert!(!h.dfa.accepts(&[77, 1]).unwrap());
    }

    #[test]
    fn doubling_in_negative_base() {
        let f = |n: u64| -2 * n as i64;
        let mut s = SampleSet::new([Numeration::msd(4), Numeration::neg(4)], 3).unwrap();
        let h = guess_dfa(&f, &mut s, 256, usize::MAX).unwrap();
        let bad = h.inconsistencies(&s).unwrap();
        assert!(
            bad.is_empty(),
            "{} {:?} {}",
            h.dfa.num_states(),
            &bad[..bad.len().min(10)],
            bad.len()
        );
        for n in 0..20_000 {
            assert!(h.dfa.accepts(&[n, -2 * n]).unwrap());
            assert!(!h.dfa.accepts(&[n, -2 * n + 1]).unwrap());
        }
    }

    #[test]
    fn small_budget_is_reported() {
        let f = |n: u64| 3 * n as i64;
        let mut s = SampleSet::new([Numeration::msd(2), Numeration::msd(2)], 3).unwrap();
        assert!(matches!(
            guess_dfa(&f, &mut s, 8, 5),
            Err(Error::Inference(_))
        ));
    }

    #[test]
    fn failing_verifier_hits_the_ceiling() {
        let f = |n: u64| n as i64;
        let sig = [Numeration::msd(4), Numeration::msd(4)];
        let cfg = InferConfig {
            start: 64,
            ceiling: 1024,
            seed: 1,
        };
        let r = infer_and_verify("id", &f, sig, cfg, |_| Ok(false));
        assert!(matches!(r, Err(Error::Inference(_))));
    }
}
