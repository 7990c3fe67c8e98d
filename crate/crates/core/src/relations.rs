//! Arithmetic relation automata.
//!
//! Two independent constructions are used. [`lsd_linear`] builds a carry
//! automaton reading least significant digits first and reverses it; it
//! handles tracks whose bases differ in sign (`-k` and `k`), which is what
//! base conversion needs. [`linear_eq`] and [`linear_le`] read most
//! significant digits first and track the partial value of the linear form
//! directly; the query compiler uses those.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::automata::{compile_regex, BoolOp, Dfa, Dfao, SyncRegex};
use crate::error::{Error, Result};
use crate::numbers::{thue_morse_t, Numeration};

fn common_radix(tracks: &[Numeration]) -> Result<i64> {
    let k = tracks.first().map(|t| t.radix()).unwrap_or(2);
    if tracks.iter().any(|t| t.radix() != k) {
        return Err(Error::SignatureMismatch(format!(
            "linear relation over mixed radices {tracks:?}"
        )));
    }
    Ok(k as i64)
}

/// `sum coeffs[i] * [x_i] = constant`, each `x_i` read in `tracks[i]`. All
/// tracks must share the same radix `k`; signs may differ.
pub fn lsd_linear(tracks: &[Numeration], coeffs: &[i64], constant: i64) -> Result<Dfa> {
    if tracks.len() != coeffs.len() {
        return Err(Error::Arity {
            expected: tracks.len(),
            got: coeffs.len(),
        });
    }
    let k = common_radix(tracks)?;
    let mixed_signs = tracks.iter().any(|t| t.is_negative());
    // None is the dead state; Some((remainder, position parity))
    let lsd = Dfa::explore(
        tracks.to_vec(),
        Some((-constant, 0u8)),
        |s| matches!(s, Some((0, _))),
        |s, digits| {
            let (r, parity) = (*s)?;
            let mut sum = r;
            for ((t, &a), &d) in tracks.iter().zip(coeffs).zip(digits) {
                let sign = if t.is_negative() && parity == 1 {
                    -1
                } else {
                    1
                };
                sum += sign * a * d as i64;
            }
            if sum.rem_euclid(k) != 0 {
                return None;
            }
            let next_parity = if mixed_signs { parity ^ 1 } else { 0 };
            Some((sum / k, next_parity))
        },
    )?;
    Ok(lsd.reverse().determinize())
}

/// `sum coeffs[i] * x_i = constant` with every track in `sys`.
pub fn linear_eq(sys: Numeration, coeffs: &[i64], constant: i64) -> Result<Dfa> {
    let bound = coeffs
        .iter()
        .map(|a| a.abs())
        .sum::<i64>()
        .max(constant.abs());
    let base = sys.base();
    let tracks = vec![sys; coeffs.len()];
    let coeffs = coeffs.to_vec();
    Dfa::explore(
        tracks,
        Some(0i64),
        |s| *s == Some(constant),
        move |s, digits| {
            let v = (*s)?;
            let next = base * v
                + coeffs
                    .iter()
                    .zip(digits)
                    .map(|(&a, &d)| a * d as i64)
                    .sum::<i64>();
            (next.abs() <= bound).then_some(next)
        },
    )
    .map(|d| d.minimize())
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Partial {
    Value(i64),
    AlwaysBelow,
    AlwaysAbove,
}

/// `sum coeffs[i] * x_i <= constant` with every track in `sys`.
pub fn linear_le(sys: Numeration, coeffs: &[i64], constant: i64) -> Result<Dfa> {
    if sys.is_negative() {
        // exists d >= 0 with sum + d = constant
        let mut with_slack = coeffs.to_vec();
        with_slack.push(1);
        let eq = linear_eq(sys, &with_slack, constant)?;
        let n = coeffs.len();
        let slack_nonneg = nonnegative(sys).rearrange(vec![sys; n + 1], &[n])?;
        return eq.intersect(&slack_nonneg)?.project(n);
    }
    let spread: i64 = coeffs.iter().map(|a| a.abs()).sum();
    let hi = spread.max(constant);
    let lo = (-spread).min(constant);
    let base = sys.base();
    let tracks = vec![sys; coeffs.len()];
    let coeffs = coeffs.to_vec();
    Dfa::explore(
        tracks,
        Partial::Value(0),
        |s| match s {
            Partial::Value(v) => *v <= constant,
            Partial::AlwaysBelow => true,
            Partial::AlwaysAbove => false,
        },
        move |s, digits| match *s {
            Partial::Value(v) => {
                let next = base * v
                    + coeffs
                        .iter()
                        .zip(digits)
                        .map(|(&a, &d)| a * d as i64)
                        .sum::<i64>();
                if next > hi {
                    Partial::AlwaysAbove
                } else if next < lo {
                    Partial::AlwaysBelow
                } else {
                    Partial::Value(next)
                }
            }
            other => other,
        },
    )
    .map(|d| d.minimize())
}

/// One track: `x >= 0`. Universal for positive bases. In base `-k` the sign
/// of a nonzero value is decided by the position of its leading digit: even
/// distance from the right end means positive.
pub fn nonnegative(sys: Numeration) -> Dfa {
    if !sys.is_negative() {
        return Dfa::universal(vec![sys]);
    }
    // None: only zeros so far; Some(p): parity of digits after the leading one
    Dfa::explore(
        vec![sys],
        None::<u8>,
        |s| matches!(s, None | Some(0)),
        |s, d| match *s {
            None if d[0] == 0 => None,
            None => Some(0),
            Some(p) => Some(p ^ 1),
        },
    )
    .expect("small automaton")
    .minimize()
}

/// One track: `x > 0`.
pub fn positive(sys: Numeration) -> Dfa {
    nonnegative(sys)
        .intersect(&const_eq(0, sys).complement())
        .expect("same signature")
}

/// One track: `x = c`.
pub fn const_eq(c: i64, sys: Numeration) -> Dfa {
    linear_eq(sys, &[1], c).expect("small automaton")
}

pub fn eq_relation(sys: Numeration) -> Dfa {
    Dfa::explore(vec![sys, sys], true, |&ok| ok, |&ok, d| ok && d[0] == d[1])
        .expect("small automaton")
        .minimize()
}

/// `x < y`.
pub fn lt_relation(sys: Numeration) -> Result<Dfa> {
    if !sys.is_negative() {
        // first differing digit decides
        return Ok(Dfa::explore(
            vec![sys, sys],
            std::cmp::Ordering::Equal,
            |&o| o == std::cmp::Ordering::Less,
            |&o, d| {
                if o == std::cmp::Ordering::Equal {
                    d[0].cmp(&d[1])
                } else {
                    o
                }
            },
        )?
        .minimize());
    }
    // exists d >= 1 with x + d = y; tracks (x, y, d)
    let tracks = vec![sys; 3];
    let sum = add_relation(sys)?.rearrange(tracks.clone(), &[0, 2, 1])?;
    let d_pos = positive(sys).rearrange(tracks, &[2])?;
    sum.intersect(&d_pos)?.project(2)
}

/// `x + y = z`.
pub fn add_relation(sys: Numeration) -> Result<Dfa> {
    lsd_linear(&[sys; 3], &[1, 1, -1], 0)
}

/// Joins `x = a z` on tracks (x, z) with `z = b y` on tracks (z, y) into
/// `x = a b y`.
fn compose(outer: &Dfa, inner: &Dfa) -> Result<Dfa> {
    let sys = outer.tracks()[0];
    let tracks = vec![sys; 3];
    let a = outer.rearrange(tracks.clone(), &[0, 1])?;
    let b = inner.rearrange(tracks, &[1, 2])?;
    a.intersect(&b)?.project(1)
}

/// From `z = m y` on tracks (z, y), builds `x = (m + 1) y` via
/// `exists z. x = y + z`.
fn plus_one(times_m: &Dfa) -> Result<Dfa> {
    let sys = times_m.tracks()[0];
    let tracks = vec![sys; 3];
    // add(a, b, s): a + b = s with a = y, b = z, s = x
    let sum = add_relation(sys)?.rearrange(tracks.clone(), &[2, 1, 0])?;
    let m = times_m.rearrange(tracks, &[1, 2])?;
    sum.intersect(&m)?.project(1)
}

/// `x = c y`, assembled from additions and projections. For 3412 in base 16
/// the chain is 2, 3, 4 = 2*2, 12 = 3*4, 13, 52 = 4*13, 53, 212 = 4*53, 213,
/// 852 = 4*213, 853, 3412 = 4*853; other constants use double-and-add on the
/// binary expansion of `c`.
pub fn const_mult_relation(c: i64, sys: Numeration) -> Result<Dfa> {
    if c < 1 {
        return Err(Error::Invalid(format!(
            "multiplier must be positive, got {c}"
        )));
    }
    let double = lsd_linear(&[sys, sys], &[1, -2], 0)?;
    if c == 3412 && sys == Numeration::msd(16) {
        let triple = lsd_linear(&[sys, sys], &[1, -3], 0)?;
        let mult4 = compose(&double, &double)?;
        let mult12 = compose(&triple, &mult4)?;
        let mult13 = plus_one(&mult12)?;
        let mult52 = compose(&mult4, &mult13)?;
        let mult53 = plus_one(&mult52)?;
        let mult212 = compose(&mult4, &mult53)?;
        let mult213 = plus_one(&mult212)?;
        let mult852 = compose(&mult4, &mult213)?;
        let mult853 = plus_one(&mult852)?;
        return compose(&mult4, &mult853);
    }
    let mut acc = eq_relation(sys);
    let bits = 63 - c.leading_zeros();
    for i in (0..bits).rev() {
        acc = compose(&double, &acc)?;
        if (c >> i) & 1 == 1 {
            acc = plus_one(&acc)?;
        }
    }
    Ok(acc)
}

/// `m = p_{a,b}(x)`: same digit word on a base-`a` and a base-`b` track.
pub fn digit_copy_relation(a: u32, b: u32) -> Result<Dfa> {
    if a < 2 || b < a {
        return Err(Error::Invalid(format!("need 2 <= a <= b, got {a}, {b}")));
    }
    let tracks = vec![Numeration::new(a as i64)?, Numeration::new(b as i64)?];
    Ok(Dfa::explore(tracks, true, |&ok| ok, |&ok, d| ok && d[0] == d[1])?.minimize())
}

/// Pairs `(a^i, b^i)`, `i >= 0`.
pub fn power_pairs_relation(a: u32, b: u32) -> Result<Dfa> {
    let tracks = [Numeration::new(a as i64)?, Numeration::new(b as i64)?];
    compile_regex(&SyncRegex::parse("[0,0]*[1,1][0,0]*")?, &tracks)
}

/// `y = max(0, n)` with `n` in base `-k` and `y` in base `k`.
pub fn neg_to_pos_max0(k: u32) -> Result<Dfa> {
    let neg = Numeration::neg(k);
    let pos = Numeration::msd(k);
    let tracks = vec![neg, pos];
    let same_value = lsd_linear(&tracks, &[1, -1], 0)?;
    let n_negative = nonnegative(neg)
        .complement()
        .rearrange(tracks.clone(), &[0])?;
    let y_zero = const_eq(0, pos).rearrange(tracks, &[1])?;
    same_value.union(&n_negative.intersect(&y_zero)?)
}

/// Thue-Morse as a base-`k` DFAO, `k` a power of two.
pub fn tm_dfao(k: u32) -> Result<Dfao> {
    if k < 2 || !k.is_power_of_two() {
        return Err(Error::Invalid(format!(
            "Thue-Morse width must be a power of two, got {k}"
        )));
    }
    let zero: String = (0..k as u64)
        .map(|i| char::from(b'0' + thue_morse_t(i)))
        .collect();
    let one: String = zero
        .chars()
        .map(|c| if c == '0' { '1' } else { '0' })
        .collect();
    Dfao::from_morphism(&format!("0->{zero} 1->{one}"))
}

/// Parity of zeros in the binary representation, read in base 4. A leading
/// base-4 digit contributes `1 -> 0, 2 -> 1, 3 -> 0` zero bits (mod 2), any
/// later digit `0 -> 2, 1 -> 1, 2 -> 1, 3 -> 0`.
pub fn r_dfao_base4() -> Dfao {
    const LEADING: [u32; 4] = [0, 0, 1, 0];
    const LATER: [u32; 4] = [0, 1, 1, 0];
    // state 0: nothing read; 1 + p: started with parity p
    let mut delta = vec![0u32; 12];
    for d in 0..4 {
        delta[d] = if d == 0 { 0 } else { 1 + LEADING[d] };
        for p in 0..2u32 {
            delta[(1 + p as usize) * 4 + d] = 1 + (p ^ LATER[d]);
        }
    }
    Dfao::from_parts(Numeration::msd(4), delta, vec![0, 0, 1]).expect("table is well formed")
}

/// Relation constructors that can be cached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelationSpec {
    Eq(Numeration),
    Lt(Numeration),
    Add(Numeration),
    ConstMult(i64, Numeration),
    ConstEq(i64, Numeration),
    DigitCopy(u32, u32),
    PowerPairs(u32, u32),
    NegToPosMax0(u32),
}

impl RelationSpec {
    pub fn build(&self) -> Result<Dfa> {
        match *self {
            RelationSpec::Eq(s) => Ok(eq_relation(s)),
            RelationSpec::Lt(s) => lt_relation(s),
            RelationSpec::Add(s) => add_relation(s),
            RelationSpec::ConstMult(c, s) => const_mult_relation(c, s),
            RelationSpec::ConstEq(c, s) => Ok(const_eq(c, s)),
            RelationSpec::DigitCopy(a, b) => digit_copy_relation(a, b),
            RelationSpec::PowerPairs(a, b) => power_pairs_relation(a, b),
            RelationSpec::NegToPosMax0(k) => neg_to_pos_max0(k),
        }
    }
}

/// Memoizes relation automata; safe to share between threads.
#[derive(Debug, Default)]
pub struct RelationCache {
    built: Mutex<HashMap<RelationSpec, Arc<Dfa>>>,
}

impl RelationCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, spec: RelationSpec) -> Result<Arc<Dfa>> {
        if let Some(d) = self.built.lock().expect("cache lock").get(&spec) {
            return Ok(Arc::clone(d));
        }
        let d = Arc::new(spec.build()?);
        self.built
            .lock()
            .expect("cache lock")
            .entry(spec)
            .or_insert_with(|| Arc::clone(&d));
        Ok(d)
    }
}

/// `op(L(x), L(y))` after lifting both to a common signature, a convenience
/// for building compound relations by hand.
pub fn combine(x: &Dfa, y: &Dfa, op: BoolOp) -> Result<Dfa> {
    x.product(y, op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::{pseudopower, zeros_parity_r};

    fn systems() -> Vec<Numeration> {
        vec![
            Numeration::msd(4),
            Numeration::msd(3),
            Numeration::msd(16),
            Numeration::msd(5),
            Numeration::neg(5),
            Numeration::neg(2),
        ]
    }

    fn range(sys: Numeration, m: i64) -> std::ops::RangeInclusive<i64> {
        if sys.is_negative() {
            -m..=m
        } else {
            0..=m
        }
    }

    #[test]
    fn eq_examples() {
        let eq = eq_relation(Numeration::msd(4));
        assert!(eq.accepts(&[0, 0]).unwrap());
        assert!(eq.accepts(&[43, 43]).unwrap());
        assert!(!eq.accepts(&[43, 42]).unwrap());
        assert!(eq_relation(Numeration::neg(5)).accepts(&[-3, -3]).unwrap());
    }

    #[test]
    fn lt_small_sweep() {
        for sys in systems() {
            let lt = lt_relation(sys).unwrap();
            for x in range(sys, 60) {
                for y in range(sys, 60) {
                    assert_eq!(lt.accepts(&[x, y]).unwrap(), x < y, "{sys}: {x} < {y}");
                }
            }
        }
        assert!(lt_relation(Numeration::msd(4))
            .unwrap()
            .accepts(&[3, 11])
            .unwrap());
        assert!(lt_relation(Numeration::neg(5))
            .unwrap()
            .accepts(&[-3, 2])
            .unwrap());
    }

    #[test]
    fn add_examples() {
        assert!(add_relation(Numeration::msd(4))
            .unwrap()
            .accepts(&[1, 1, 2])
            .unwrap());
        let add = add_relation(Numeration::neg(2)).unwrap();
        assert!(add.accepts(&[3, -1, 2]).unwrap());
        let letters = add.letters_for(&[3, -1, 2], 0).unwrap();
        assert_eq!(letters.len(), 3); // 111, 011, 110
        let add4 = add_relation(Numeration::msd(4)).unwrap();
        for n in 0..=10_000 {
            assert!(add4.accepts(&[0, n, n]).unwrap());
        }
    }

    #[test]
    fn add_small_sweep() {
        for sys in systems() {
            let add = add_relation(sys).unwrap();
            for x in range(sys, 40) {
                for y in range(sys, 40) {
                    assert!(add.accepts(&[x, y, x + y]).unwrap());
                    assert!(!add.accepts(&[x, y, x + y + 1]).unwrap());
                }
            }
        }
    }

    #[test]
    fn two_routes_to_linear_equality_agree() {
        for sys in systems() {
            for (coeffs, c) in [
                (vec![1, 1, -1], 0),
                (vec![3, -2], 1),
                (vec![2, 1], 7),
                (vec![1], -4),
            ] {
                if c < 0 && !sys.is_negative() {
                    continue;
                }
                let a = linear_eq(sys, &coeffs, c).unwrap();
                let b = lsd_linear(&vec![sys; coeffs.len()], &coeffs, c).unwrap();
                assert!(a.equivalent(&b), "{sys} {coeffs:?} = {c}");
            }
        }
    }

    #[test]
    fn linear_le_matches_arithmetic() {
        for sys in [Numeration::msd(4), Numeration::neg(5), Numeration::neg(2)] {
            let le = linear_le(sys, &[2, -3], 5).unwrap();
            for x in range(sys, 40) {
                for y in range(sys, 40) {
                    assert_eq!(
                        le.accepts(&[x, y]).unwrap(),
                        2 * x - 3 * y <= 5,
                        "{sys} {x} {y}"
                    );
                }
            }
        }
    }

    #[test]
    fn sign_predicates() {
        let sys = Numeration::neg(5);
        let nn = nonnegative(sys);
        let pos = positive(sys);
        for x in -300..=300 {
            assert_eq!(nn.accepts(&[x]).unwrap(), x >= 0);
            assert_eq!(pos.accepts(&[x]).unwrap(), x > 0);
        }
        assert!(nn.is_padding_closed());
    }

    #[test]
    fn const_mult_examples() {
        let b4 = Numeration::msd(4);
        assert!(const_mult_relation(1, b4)
            .unwrap()
            .equivalent(&eq_relation(b4)));
        assert!(const_mult_relation(3, b4)
            .unwrap()
            .accepts(&[261, 87])
            .unwrap());
        let m = const_mult_relation(3412, Numeration::msd(16)).unwrap();
        assert!(m.accepts(&[3412, 1]).unwrap());
        assert!(m.accepts(&[3412 * 77, 77]).unwrap());
        assert!(!m.accepts(&[3413, 1]).unwrap());
        let direct = linear_eq(Numeration::msd(16), &[1, -3412], 0).unwrap();
        assert!(m.equivalent(&direct));
        assert!(const_mult_relation(0, b4).is_err());
    }

    #[test]
    fn const_mult_negative_base() {
        let sys = Numeration::neg(5);
        let m = const_mult_relation(6, sys).unwrap();
        for y in -50..=50 {
            assert!(m.accepts(&[6 * y, y]).unwrap());
            assert!(!m.accepts(&[6 * y + 1, y]).unwrap());
        }
    }

    #[test]
    fn digit_copy_examples() {
        let p34 = digit_copy_relation(3, 4).unwrap();
        assert!(p34.accepts(&[0, 0]).unwrap());
        assert!(p34.accepts(&[5, 6]).unwrap());
        assert!(digit_copy_relation(5, 16)
            .unwrap()
            .accepts(&[5, 16])
            .unwrap());
        for x in 0..2000 {
            assert!(p34.accepts(&[x, pseudopower(3, 4, x).unwrap()]).unwrap());
        }
    }

    #[test]
    fn power_pairs_examples() {
        let p = power_pairs_relation(4, 3).unwrap();
        assert!(p.accepts(&[1, 1]).unwrap());
        assert!(p.accepts(&[4, 3]).unwrap());
        assert!(p.accepts(&[16, 9]).unwrap());
        assert!(!p.accepts(&[4, 9]).unwrap());
        assert_eq!(
            p.enumerate(3).unwrap(),
            vec![vec![1, 1], vec![4, 3], vec![16, 9]]
        );
    }

    #[test]
    fn max0_converter() {
        let conv = neg_to_pos_max0(5).unwrap();
        assert!(conv.accepts(&[-3, 0]).unwrap());
        assert!(conv.accepts(&[15, 15]).unwrap());
        assert!(conv.accepts(&[0, 0]).unwrap());
        assert!(!conv.accepts(&[-3, 3]).unwrap());
        for n in -500..=500i64 {
            assert!(conv.accepts(&[n, n.max(0)]).unwrap());
            assert!(!conv.accepts(&[n, n.max(0) + 1]).unwrap());
        }
    }

    #[test]
    fn sequence_dfaos() {
        let tm4 = tm_dfao(4).unwrap();
        assert_eq!(tm4.output_at(21), 1);
        assert_eq!(tm4.output_at(0), 0);
        let tm16 = tm_dfao(16).unwrap();
        assert_eq!(tm16.output_at(3 * 7), 1);
        let r = r_dfao_base4();
        for n in 0..20_000 {
            assert_eq!(r.output_at(n), zeros_parity_r(n) as u32, "n = {n}");
        }
        assert!(tm_dfao(6).is_err());
    }

    #[test]
    fn cache_returns_shared_values() {
        let cache = RelationCache::new();
        let a = cache.get(RelationSpec::Add(Numeration::msd(4))).unwrap();
        let b = cache.get(RelationSpec::Add(Numeration::msd(4))).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }
}
