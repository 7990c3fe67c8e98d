//! Integer arithmetic in positive and negative bases, together with the
//! brute-force oracles for the Thue-Morse family of sums.
//!
//! Words are most-significant-digit first. In base `-k` the digit alphabet is
//! still `0..k`, and every integer (of either sign) has exactly one word
//! without leading zeros. Zero is the empty word.

use std::fmt;

use crate::error::{Error, Result};

/// A positional numeration system with signed base, `2 <= |base| <= 36`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Numeration {
    base: i32,
}

impl Numeration {
    pub fn new(base: i64) -> Result<Self> {
        if !(2..=36).contains(&base.unsigned_abs()) {
            return Err(Error::InvalidBase(base));
        }
        Ok(Numeration { base: base as i32 })
    }

    /// Ordinary base `k`, `msd_k` in query syntax.
    pub fn msd(k: u32) -> Self {
        Self::new(k as i64).expect("base out of range")
    }

    /// Negative base `-k`, `msd_neg_k` in query syntax.
    pub fn neg(k: u32) -> Self {
        Self::new(-(k as i64)).expect("base out of range")
    }

    pub fn base(self) -> i64 {
        self.base as i64
    }

    /// Size of the digit alphabet.
    pub fn radix(self) -> usize {
        self.base.unsigned_abs() as usize
    }

    pub fn is_negative(self) -> bool {
        self.base < 0
    }

    /// Whether every integer, not only naturals, has a representation.
    pub fn represents(self, n: i64) -> bool {
        self.is_negative() || n >= 0
    }

    /// Query-language spelling: `msd_4`, `msd_neg_5`.
    pub fn tag(self) -> String {
        if self.is_negative() {
            format!("msd_neg_{}", self.radix())
        } else {
            format!("msd_{}", self.radix())
        }
    }
}

impl fmt::Display for Numeration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)
    }
}

/// A digit word together with the system it is read in.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitWord {
    system: Numeration,
    digits: Vec<u8>,
}

impl DigitWord {
    pub fn new(system: Numeration, digits: Vec<u8>) -> Result<Self> {
        if let Some(&d) = digits.iter().find(|&&d| d as usize >= system.radix()) {
            return Err(Error::DigitOutOfRange {
                digit: d as i64,
                base: system.base(),
            });
        }
        Ok(DigitWord { system, digits })
    }

    pub fn system(&self) -> Numeration {
        self.system
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Drops leading zeros.
    pub fn canonical(&self) -> DigitWord {
        let start = self
            .digits
            .iter()
            .position(|&d| d != 0)
            .unwrap_or(self.digits.len());
        DigitWord {
            system: self.system,
            digits: self.digits[start..].to_vec(),
        }
    }
}

impl fmt::Display for DigitWord {
    /// Digits above 9 are bracketed, `[12]`. The empty word prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.digits.is_empty() {
            return write!(f, "0");
        }
        for &d in &self.digits {
            if d < 10 {
                write!(f, "{d}")?;
            } else {
                write!(f, "[{d}]")?;
            }
        }
        Ok(())
    }
}

/// Canonical representation of `n`. Negative bases use the Euclidean
/// remainder so digits stay in `0..|base|`.
pub fn to_digits(n: i64, sys: Numeration) -> Result<DigitWord> {
    if !sys.represents(n) {
        return Err(Error::Unrepresentable {
            value: n,
            base: sys.base(),
        });
    }
    let base = sys.base() as i128;
    let radix = sys.radix() as i128;
    let mut rest = n as i128;
    let mut digits = Vec::new();
    while rest != 0 {
        let d = rest.rem_euclid(radix);
        digits.push(d as u8);
        rest = (rest - d) / base;
    }
    digits.reverse();
    Ok(DigitWord {
        system: sys,
        digits,
    })
}

/// Value of a word; leading zeros are allowed.
pub fn from_digits(w: &DigitWord) -> Result<i64> {
    let base = w.system.base();
    w.digits.iter().try_fold(0i64, |acc, &d| {
        acc.checked_mul(base)
            .and_then(|v| v.checked_add(d as i64))
            .ok_or(Error::Overflow)
    })
}

pub fn pad_to_length(w: &DigitWord, len: usize) -> Result<DigitWord> {
    if len < w.len() {
        return Err(Error::PadTooShort {
            have: w.len(),
            want: len,
        });
    }
    let mut digits = vec![0u8; len - w.len()];
    digits.extend_from_slice(&w.digits);
    Ok(DigitWord {
        system: w.system,
        digits,
    })
}

/// Thue-Morse: parity of the number of 1 bits.
pub fn thue_morse_t(n: u64) -> u8 {
    (n.count_ones() & 1) as u8
}

/// Parity of the number of 0 bits in the binary representation, with
/// `r(0) = 0` since the representation of zero is empty.
pub fn zeros_parity_r(n: u64) -> u8 {
    if n == 0 {
        return 0;
    }
    let bits = 64 - n.leading_zeros();
    ((bits - n.count_ones()) & 1) as u8
}

/// Which parity sequence a rarefied sum is built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SumKind {
    /// `t`, parity of ones; the sums `f_{b,j}`.
    Ones,
    /// `r`, parity of zeros; the sums `g_{b,j}`.
    Zeros,
}

impl SumKind {
    pub fn parity(self, n: u64) -> u8 {
        match self {
            SumKind::Ones => thue_morse_t(n),
            SumKind::Zeros => zeros_parity_r(n),
        }
    }
}

fn check_residue(b: u64, j: u64) {
    assert!(b >= 1 && j < b, "need 0 <= j < b, got b = {b}, j = {j}");
}

/// `f_{b,j}(n) = sum_{0 <= i < n} (-1)^t(b i + j)`.
pub fn rarefied_f(b: u64, j: u64, n: u64) -> i64 {
    rarefied_sum(SumKind::Ones, b, j, n)
}

/// `g_{b,j}(n)`, the analogue of [`rarefied_f`] built on [`zeros_parity_r`].
pub fn rarefied_g(b: u64, j: u64, n: u64) -> i64 {
    rarefied_sum(SumKind::Zeros, b, j, n)
}

pub fn rarefied_sum(kind: SumKind, b: u64, j: u64, n: u64) -> i64 {
    check_residue(b, j);
    (0..n)
        .map(|i| if kind.parity(b * i + j) == 0 { 1 } else { -1 })
        .sum()
}

/// All values `h(0), ..., h(n_max)` of a rarefied sum in one pass.
pub fn rarefied_table(kind: SumKind, b: u64, j: u64, n_max: u64) -> Vec<i64> {
    check_residue(b, j);
    let mut out = Vec::with_capacity(n_max as usize + 1);
    let mut acc = 0i64;
    out.push(0);
    for i in 0..n_max {
        acc += if kind.parity(b * i + j) == 0 { 1 } else { -1 };
        out.push(acc);
    }
    out
}

/// The rarefied sum at a single `n` in `O(b log n)` steps.
///
/// Runs over the bits of `i < n` from the least significant end, carrying
/// the partial sum of `b i + j`, the parity seen so far and how the low bits
/// of `i` compare with those of `n`. For the zeros parity, zeros are held
/// back until a later 1 bit shows they are not leading.
pub fn rarefied_at(kind: SumKind, b: u64, j: u64, n: u64) -> i64 {
    check_residue(b, j);
    let bits = 64 - n.leading_zeros() as usize;
    let carries = b as usize + 1;
    // state: (carry, parity, pending zero parity, cmp) with cmp 0 = less,
    // 1 = equal, 2 = greater
    let idx = |c: usize, p: usize, z: usize, cmp: usize| ((c * 2 + p) * 2 + z) * 3 + cmp;
    let size = carries * 12;
    let mut count = vec![0u64; size];
    count[idx(0, 0, 0, 1)] = 1;
    let push_bit = |p: usize, z: usize, bit: u64| -> (usize, usize) {
        match (kind, bit) {
            (SumKind::Ones, 1) => (p ^ 1, 0),
            (SumKind::Ones, _) => (p, 0),
            (SumKind::Zeros, 1) => (p ^ z, 0),
            (SumKind::Zeros, _) => (p, z ^ 1),
        }
    };
    for k in 0..bits {
        let nk = (n >> k) & 1;
        let jk = (j >> k) & 1;
        let mut next = vec![0u64; size];
        for c in 0..carries {
            for p in 0..2 {
                for z in 0..2 {
                    for cmp in 0..3 {
                        let w = count[idx(c, p, z, cmp)];
                        if w == 0 {
                            continue;
                        }
                        for ik in 0..2u64 {
                            let total = c as u64 + b * ik + jk;
                            let (p2, z2) = push_bit(p, z, total & 1);
                            let cmp2 = match ik.cmp(&nk) {
                                std::cmp::Ordering::Less => 0,
                                std::cmp::Ordering::Greater => 2,
                                std::cmp::Ordering::Equal => cmp,
                            };
                            next[idx((total >> 1) as usize, p2, z2, cmp2)] += w;
                        }
                    }
                }
            }
        }
        count = next;
    }
    // bits of j above those of n still feed the sum
    let mut acc = 0i64;
    for c in 0..carries {
        for p in 0..2 {
            for z in 0..2 {
                let w = count[idx(c, p, z, 0)];
                if w == 0 {
                    continue;
                }
                let (mut p, mut z) = (p, z);
                let mut rest = c as u64 + (j >> bits);
                while rest > 0 {
                    (p, z) = push_bit(p, z, rest & 1);
                    rest >>= 1;
                }
                let _ = z;
                acc += if p == 0 { w as i64 } else { -(w as i64) };
            }
        }
    }
    acc
}

/// `p_{a,b}(n)`: the base-`a` digits of `n` read in base `b`.
pub fn pseudopower(a: u32, b: u32, n: i64) -> Result<i64> {
    if a < 2 || b < a {
        return Err(Error::Invalid(format!(
            "pseudopower needs 2 <= a <= b, got a = {a}, b = {b}"
        )));
    }
    let w = to_digits(n, Numeration::new(a as i64)?)?;
    from_digits(&DigitWord::new(Numeration::new(b as i64)?, w.digits)?)
}

/// Relative width of the band inside which a floating comparison against
/// `n^e` is not trusted.
pub const GUARD_BAND: f64 = 1e-9;

/// Outcome of sweeping the pseudopower sandwich
/// `c n^e <= c ((n+1)^e - 1) <= p_{a,b}(n) <= n^e`, `c = (a-1)/(b-1)`,
/// `e = log b / log a`.
#[derive(Debug, Clone, PartialEq)]
pub struct BndReport {
    pub a: u32,
    pub b: u32,
    pub n_max: u64,
    /// Largest relative excess of a left side over its right side; positive
    /// values beyond [`GUARD_BAND`] are violations.
    pub max_margin: f64,
    pub worst_n: u64,
    pub violations: u64,
    /// Comparisons that fell inside the guard band.
    pub resolved_in_band: u64,
    /// In-band comparisons with no exact argument, accepted at the band
    /// tolerance.
    pub flagged: u64,
}

impl BndReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// `Some(k)` when `n = a^k`.
fn exact_log(n: u64, a: u64) -> Option<u32> {
    if n == 0 {
        return None;
    }
    let mut k = 0;
    let mut m = n;
    while m.is_multiple_of(a) {
        m /= a;
        k += 1;
    }
    (m == 1).then_some(k)
}

pub fn check_bnd_inequalities(a: u32, b: u32, n_max: u64) -> Result<BndReport> {
    if a < 2 || b < a {
        return Err(Error::Invalid(format!(
            "need 2 <= a <= b, got a = {a}, b = {b}"
        )));
    }
    let e = (b as f64).ln() / (a as f64).ln();
    let c = (a - 1) as f64 / (b - 1) as f64;
    let mut report = BndReport {
        a,
        b,
        n_max,
        max_margin: f64::NEG_INFINITY,
        worst_n: 0,
        violations: 0,
        resolved_in_band: 0,
        flagged: 0,
    };
    for n in 0..=n_max {
        let p = pseudopower(a, b, n as i64)? as f64;
        let nf = n as f64;
        let pow_n = nf.powf(e);
        let pow_n1 = (nf + 1.0).powf(e);
        let chain = [
            (c * pow_n, c * (pow_n1 - 1.0)),
            (c * (pow_n1 - 1.0), p),
            (p, pow_n),
        ];
        for (idx, &(lhs, rhs)) in chain.iter().enumerate() {
            let margin = (lhs - rhs) / rhs.abs().max(1.0);
            let settled = if margin.abs() <= GUARD_BAND {
                report.resolved_in_band += 1;
                settle_in_band(idx, a as u64, n).unwrap_or_else(|| {
                    report.flagged += 1;
                    true
                })
            } else {
                margin <= 0.0
            };
            if !settled {
                report.violations += 1;
            }
            if margin > report.max_margin {
                report.max_margin = margin;
                report.worst_n = n;
            }
        }
    }
    Ok(report)
}

/// Exact decision for a comparison whose floating margin is within the band.
/// The sandwich is tight only at `n = a^k` (upper end, `p = b^k = n^e`) and
/// `n = a^k - 1` (middle, `c ((n+1)^e - 1) = c (b^k - 1) = p`). `None` means
/// no exact argument applies and the comparison stands at the band tolerance.
fn settle_in_band(link: usize, a: u64, n: u64) -> Option<bool> {
    match link {
        // (n+1)^e - 1 >= n^e for e >= 1
        0 => Some(true),
        // p_{a,b}(a^k - 1) = (a-1)(b^k - 1)/(b-1)
        1 => exact_log(n + 1, a).map(|_| true),
        _ => (n == 0 || exact_log(n, a).is_some()).then_some(true),
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn single_point_sums_match_the_table() {
        for kind in [SumKind::Ones, SumKind::Zeros] {
            for (b, j) in [
                (1, 0),
                (2, 1),
                (3, 0),
                (3, 1),
                (3, 2),
                (5, 0),
                (5, 1),
                (5, 4),
                (7, 3),
            ] {
                let table = rarefied_table(kind, b, j, 3000);
                for n in 0..=3000u64 {
                    assert_eq!(
                        rarefied_at(kind, b, j, n),
                        table[n as usize],
                        "{kind:?} {b} {j} {n}"
                    );
                }
            }
        }
        assert_eq!(rarefied_at(SumKind::Ones, 3, 0, 87), 55);
    }

    use super::*;

    fn word(base: i64, digits: &[u8]) -> DigitWord {
        DigitWord::new(Numeration::new(base).unwrap(), digits.to_vec()).unwrap()
    }

    #[test]
    fn to_digits_examples() {
        assert_eq!(
            to_digits(43, Numeration::msd(2)).unwrap().digits(),
            &[1, 0, 1, 0, 1, 1]
        );
        assert!(to_digits(0, Numeration::msd(4)).unwrap().is_empty());
        assert_eq!(to_digits(-3, Numeration::neg(5)).unwrap().digits(), &[1, 2]);
        assert_eq!(
            to_digits(15, Numeration::neg(2)).unwrap().digits(),
            &[1, 0, 0, 1, 1]
        );
        assert_eq!(
            to_digits(-1, Numeration::msd(3)),
            Err(Error::Unrepresentable { value: -1, base: 3 })
        );
    }

    #[test]
    fn from_digits_examples() {
        assert_eq!(
            from_digits(&word(2, &[0, 0, 1, 0, 1, 0, 1, 1])).unwrap(),
            43
        );
        assert_eq!(from_digits(&word(-5, &[])).unwrap(), 0);
        assert_eq!(from_digits(&word(-2, &[1, 1, 0, 0, 0, 1])).unwrap(), -15);
        assert_eq!(from_digits(&word(36, &[35; 20])), Err(Error::Overflow));
    }

    // The worked negabinary example evaluates to +15 from the definition;
    // -15 is 110001.
    #[test]
    fn negabinary_sign_of_worked_example() {
        assert_eq!(from_digits(&word(-2, &[0, 1, 0, 0, 1, 1])).unwrap(), 15);
        assert_eq!(
            to_digits(-15, Numeration::neg(2)).unwrap().digits(),
            &[1, 1, 0, 0, 0, 1]
        );
    }

    #[test]
    fn padding() {
        let w = word(2, &[1, 0, 1, 0, 1, 1]);
        assert_eq!(
            pad_to_length(&w, 8).unwrap().digits(),
            &[0, 0, 1, 0, 1, 0, 1, 1]
        );
        assert_eq!(
            pad_to_length(&word(4, &[]), 3).unwrap().digits(),
            &[0, 0, 0]
        );
        assert_eq!(
            pad_to_length(&word(3, &[1, 2]), 2).unwrap().digits(),
            &[1, 2]
        );
        assert_eq!(
            pad_to_length(&w, 3),
            Err(Error::PadTooShort { have: 6, want: 3 })
        );
    }

    #[test]
    fn display_brackets_large_digits() {
        assert_eq!(word(16, &[1, 12, 7]).to_string(), "1[12]7");
        assert_eq!(word(16, &[]).to_string(), "0");
    }

    #[test]
    fn invalid_digits_and_bases() {
        assert!(DigitWord::new(Numeration::msd(3), vec![3]).is_err());
        assert!(Numeration::new(1).is_err());
        assert!(Numeration::new(-37).is_err());
    }

    #[test]
    fn thue_morse_values() {
        assert_eq!(thue_morse_t(0), 0);
        assert_eq!(thue_morse_t(21), 1);
        for n in [0, 3, 6, 9, 12, 15, 18] {
            assert_eq!(thue_morse_t(n), 0, "t({n})");
        }
    }

    #[test]
    fn zeros_parity_values() {
        assert_eq!(zeros_parity_r(0), 0);
        assert_eq!(zeros_parity_r(4), 0);
        assert_eq!(zeros_parity_r(2), 1);
        assert_eq!(zeros_parity_r(6), 1);
    }

    #[test]
    fn rarefied_values() {
        assert_eq!(rarefied_f(3, 0, 7), 7);
        assert_eq!(rarefied_f(3, 0, 8), 6);
        assert_eq!(rarefied_f(3, 0, 0), 0);
        assert_eq!(rarefied_f(5, 1, 7), -5);
        assert_eq!(rarefied_g(3, 0, 0), 0);
        assert_eq!(rarefied_g(3, 0, 2), 2);
        assert_eq!(rarefied_g(3, 0, 3), 1);
    }

    #[test]
    fn table_matches_direct_sum() {
        let table = rarefied_table(SumKind::Ones, 5, 1, 300);
        for (n, &v) in table.iter().enumerate() {
            assert_eq!(v, rarefied_f(5, 1, n as u64));
        }
    }

    #[test]
    fn step_identity_for_f30() {
        let table = rarefied_table(SumKind::Ones, 3, 0, 5000);
        for n in 1..table.len() {
            let step = if thue_morse_t(3 * (n as u64 - 1)) == 0 {
                1
            } else {
                -1
            };
            assert_eq!(table[n] - table[n - 1], step);
        }
    }

    #[test]
    fn pseudopower_values() {
        assert_eq!(pseudopower(3, 4, 0).unwrap(), 0);
        assert_eq!(pseudopower(3, 4, 5).unwrap(), 6);
        assert_eq!(pseudopower(5, 16, 5).unwrap(), 16);
        assert_eq!(pseudopower(3, 4, 3).unwrap(), 4);
        assert_eq!(pseudopower(2, 4, 5).unwrap(), 17);
        assert!(pseudopower(4, 3, 1).is_err());
    }

    // Worked points of the sandwich, evaluated independently with f64.
    #[test]
    fn bnd_worked_points() {
        let e = 4f64.ln() / 3f64.ln();
        let c = 2.0 / 3.0;
        let p = pseudopower(3, 4, 3).unwrap() as f64;
        let lo1 = c * 3f64.powf(e);
        let lo2 = c * (4f64.powf(e) - 1.0);
        let hi = 3f64.powf(e);
        // 3 = a^1, so the upper end is tight: 3^e = 4 = p.
        assert!((lo1 - 8.0 / 3.0).abs() < 1e-12);
        assert!((lo2 - 3.167084003178684).abs() < 1e-12);
        assert!((hi - 4.0).abs() < 1e-12);
        assert!(lo1 <= lo2 && lo2 <= p && (p - hi).abs() < 1e-12);

        let lo2 = (36.0 - 1.0) / 3.0;
        assert!(lo2 <= 17.0 && 17.0 <= 25.0);
    }

    #[test]
    fn bnd_small_sweep() {
        for (a, b) in [(2, 4), (3, 4), (5, 16)] {
            let r = check_bnd_inequalities(a, b, 2000).unwrap();
            assert!(r.holds(), "{r:?}");
            assert!(r.max_margin <= GUARD_BAND);
        }
    }

    #[test]
    fn bnd_rejects_bad_bases() {
        assert!(check_bnd_inequalities(4, 3, 10).is_err());
    }
}
