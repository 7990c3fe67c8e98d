//! Multi-track deterministic automata over tuples of digits.
//!
//! Each track reads one integer in its own numeration system, most
//! significant digit first, and all tracks are zero-padded to a common
//! length. A relation automaton accepts every padding of a tuple or none of
//! them; the operations here preserve that property.
//!
//! Letters are tuples of digits packed in mixed radix with track 0 most
//! significant. Transition tables are dense: the state count times the
//! product of the track radices.

mod dfao;
mod io;
mod nfa;
mod regex;

use rustc_hash::FxHashMap as HashMap;

pub use dfao::Dfao;
pub use io::{export_dot, load_text, save_text, DotExport};
pub use nfa::Nfa;
pub use regex::{compile_regex, SyncRegex};

use crate::error::{Error, Result};
use crate::numbers::{from_digits, pad_to_length, to_digits, DigitWord, Numeration};

/// Default cap on the number of states of any intermediate automaton.
pub const DEFAULT_STATE_LIMIT: usize = 1_000_000;

/// The numeration system of each track, in order.
pub type TrackSignature = Vec<Numeration>;

pub fn alphabet_size(tracks: &[Numeration]) -> usize {
    tracks.iter().map(|t| t.radix()).product()
}

pub fn encode_letter(tracks: &[Numeration], digits: &[u8]) -> usize {
    debug_assert_eq!(tracks.len(), digits.len());
    tracks
        .iter()
        .zip(digits)
        .fold(0, |acc, (t, &d)| acc * t.radix() + d as usize)
}

pub fn decode_letter(tracks: &[Numeration], mut letter: usize) -> Vec<u8> {
    let mut digits = vec![0u8; tracks.len()];
    for (i, t) in tracks.iter().enumerate().rev() {
        digits[i] = (letter % t.radix()) as u8;
        letter /= t.radix();
    }
    digits
}

/// Binary boolean connectives for [`Dfa::product`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
    Implies,
    Iff,
    Xor,
}

impl BoolOp {
    pub fn apply(self, x: bool, y: bool) -> bool {
        match self {
            BoolOp::And => x && y,
            BoolOp::Or => x || y,
            BoolOp::Implies => !x || y,
            BoolOp::Iff => x == y,
            BoolOp::Xor => x != y,
        }
    }
}

/// Total deterministic automaton; state 0 is initial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dfa {
    tracks: TrackSignature,
    alphabet: usize,
    delta: Vec<u32>,
    accepting: Vec<bool>,
}

impl Dfa {
    pub fn from_parts(
        tracks: TrackSignature,
        delta: Vec<u32>,
        accepting: Vec<bool>,
    ) -> Result<Dfa> {
        let alphabet = alphabet_size(&tracks);
        let n = accepting.len();
        if n == 0 || delta.len() != n * alphabet {
            return Err(Error::Invalid(format!(
                "transition table has {} entries, expected {} states x {} letters",
                delta.len(),
                n,
                alphabet
            )));
        }
        if let Some(&bad) = delta.iter().find(|&&q| q as usize >= n) {
            return Err(Error::Invalid(format!("transition to unknown state {bad}")));
        }
        Ok(Dfa {
            tracks,
            alphabet,
            delta,
            accepting,
        })
    }

    /// Builds a DFA from a successor function, exploring breadth-first from
    /// `init`. `accept` and `next` see the caller's own state type.
    pub fn explore<S, A, N>(tracks: TrackSignature, init: S, accept: A, mut next: N) -> Result<Dfa>
    where
        S: Clone + Eq + std::hash::Hash,
        A: Fn(&S) -> bool,
        N: FnMut(&S, &[u8]) -> S,
    {
        let alphabet = alphabet_size(&tracks);
        let letters: Vec<Vec<u8>> = (0..alphabet).map(|l| decode_letter(&tracks, l)).collect();
        let mut ids: HashMap<S, u32> = HashMap::default();
        let mut order: Vec<S> = vec![init.clone()];
        ids.insert(init, 0);
        let mut delta = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let s = order[i].clone();
            for digits in &letters {
                let t = next(&s, digits);
                let id = match ids.get(&t) {
                    Some(&id) => id,
                    None => {
                        let id = order.len() as u32;
                        if order.len() >= DEFAULT_STATE_LIMIT {
                            return Err(Error::SizeLimit(DEFAULT_STATE_LIMIT));
                        }
                        ids.insert(t.clone(), id);
                        order.push(t);
                        id
                    }
                };
                delta.push(id);
            }
            i += 1;
        }
        let accepting = order.iter().map(&accept).collect();
        Ok(Dfa {
            tracks,
            alphabet,
            delta,
            accepting,
        })
    }

    /// One state, accepting everything.
    pub fn universal(tracks: TrackSignature) -> Dfa {
        let alphabet = alphabet_size(&tracks);
        Dfa {
            tracks,
            alphabet,
            delta: vec![0; alphabet],
            accepting: vec![true],
        }
    }

    pub fn empty(tracks: TrackSignature) -> Dfa {
        let mut d = Dfa::universal(tracks);
        d.accepting[0] = false;
        d
    }

    /// Closed formula truth value as a zero-track automaton.
    pub fn constant(value: bool) -> Dfa {
        if value {
            Dfa::universal(Vec::new())
        } else {
            Dfa::empty(Vec::new())
        }
    }

    pub fn tracks(&self) -> &[Numeration] {
        &self.tracks
    }

    pub fn arity(&self) -> usize {
        self.tracks.len()
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn next(&self, q: usize, letter: usize) -> usize {
        self.delta[q * self.alphabet + letter] as usize
    }

    pub fn row(&self, q: usize) -> &[u32] {
        &self.delta[q * self.alphabet..(q + 1) * self.alphabet]
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    /// States from which no accepting state is reachable.
    pub fn dead_states(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut preds: Vec<Vec<u32>> = vec![Vec::new(); n];
        for q in 0..n {
            for &p in self.row(q) {
                preds[p as usize].push(q as u32);
            }
        }
        let mut live = self.accepting.clone();
        let mut stack: Vec<usize> = (0..n).filter(|&q| live[q]).collect();
        while let Some(p) = stack.pop() {
            for &q in &preds[p] {
                if !live[q as usize] {
                    live[q as usize] = true;
                    stack.push(q as usize);
                }
            }
        }
        live.into_iter().map(|l| !l).collect()
    }

    /// State count without the rejecting sink, the way automata are usually
    /// drawn and counted. Meaningful on minimized automata, which have at
    /// most one dead state.
    pub fn trimmed_state_count(&self) -> usize {
        let dead = self.dead_states().iter().filter(|&&d| d).count();
        self.num_states() - dead
    }

    pub fn run_letters(&self, letters: impl IntoIterator<Item = usize>) -> usize {
        letters.into_iter().fold(0, |q, l| self.next(q, l))
    }

    pub fn accepts_letters(&self, letters: impl IntoIterator<Item = usize>) -> bool {
        self.accepting[self.run_letters(letters)]
    }

    /// Letters spelling `values`, every track padded to the longest
    /// canonical representation (plus `extra` leading zero letters).
    pub fn letters_for(&self, values: &[i64], extra: usize) -> Result<Vec<usize>> {
        if values.len() != self.arity() {
            return Err(Error::Arity {
                expected: self.arity(),
                got: values.len(),
            });
        }
        let words = values
            .iter()
            .zip(&self.tracks)
            .map(|(&v, &sys)| to_digits(v, sys))
            .collect::<Result<Vec<DigitWord>>>()?;
        let len = words.iter().map(|w| w.len()).max().unwrap_or(0) + extra;
        let padded = words
            .iter()
            .map(|w| pad_to_length(w, len))
            .collect::<Result<Vec<_>>>()?;
        Ok((0..len)
            .map(|i| {
                let digits: Vec<u8> = padded.iter().map(|w| w.digits()[i]).collect();
                encode_letter(&self.tracks, &digits)
            })
            .collect())
    }

    /// Membership of an integer tuple.
    pub fn accepts(&self, values: &[i64]) -> Result<bool> {
        Ok(self.accepts_letters(self.letters_for(values, 0)?))
    }

    pub fn complement(&self) -> Dfa {
        let mut d = self.clone();
        for a in d.accepting.iter_mut() {
            *a = !*a;
        }
        d
    }

    /// Pointwise boolean combination; both operands must have identical
    /// track signatures. The result is minimized.
    pub fn product(&self, other: &Dfa, op: BoolOp) -> Result<Dfa> {
        if self.tracks != other.tracks {
            return Err(Error::SignatureMismatch(format!(
                "{:?} vs {:?}",
                self.tracks, other.tracks
            )));
        }
        let alphabet = self.alphabet;
        let width = other.num_states();
        // pair ids in a dense table when it is small enough, else hashed
        let dense_len = self
            .num_states()
            .checked_mul(width)
            .filter(|&k| k <= 1 << 26);
        let mut dense = vec![u32::MAX; dense_len.unwrap_or(0)];
        let mut ids: HashMap<(u32, u32), u32> = HashMap::default();
        let mut order = vec![(0u32, 0u32)];
        if dense_len.is_some() {
            dense[0] = 0;
        } else {
            ids.insert((0, 0), 0);
        }
        let mut delta = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let (p, q) = order[i];
            let (rp, rq) = (self.row(p as usize), other.row(q as usize));
            delta.reserve(alphabet);
            for l in 0..alphabet {
                let key = (rp[l], rq[l]);
                let id = if dense_len.is_some() {
                    let slot = &mut dense[key.0 as usize * width + key.1 as usize];
                    if *slot == u32::MAX {
                        *slot = order.len() as u32;
                        order.push(key);
                    }
                    *slot
                } else {
                    *ids.entry(key).or_insert_with(|| {
                        order.push(key);
                        (order.len() - 1) as u32
                    })
                };
                delta.push(id);
            }
            if order.len() > DEFAULT_STATE_LIMIT {
                return Err(Error::SizeLimit(DEFAULT_STATE_LIMIT));
            }
            i += 1;
        }
        let accepting = order
            .iter()
            .map(|&(p, q)| op.apply(self.accepting[p as usize], other.accepting[q as usize]))
            .collect();
        Ok(Dfa {
            tracks: self.tracks.clone(),
            alphabet,
            delta,
            accepting,
        }
        .minimize())
    }

    pub fn intersect(&self, other: &Dfa) -> Result<Dfa> {
        self.product(other, BoolOp::And)
    }

    pub fn union(&self, other: &Dfa) -> Result<Dfa> {
        self.product(other, BoolOp::Or)
    }

    /// Moves track `i` of `self` to position `placement[i]` of a new
    /// signature `tracks`. Tracks of the new signature that receive no old
    /// track are unconstrained.
    pub fn rearrange(&self, tracks: TrackSignature, placement: &[usize]) -> Result<Dfa> {
        if placement.len() != self.arity() {
            return Err(Error::Arity {
                expected: self.arity(),
                got: placement.len(),
            });
        }
        for (i, &p) in placement.iter().enumerate() {
            if p >= tracks.len() || tracks[p] != self.tracks[i] {
                return Err(Error::SignatureMismatch(format!(
                    "track {i} cannot move to position {p}"
                )));
            }
        }
        let alphabet = alphabet_size(&tracks);
        let old_letter: Vec<usize> = (0..alphabet)
            .map(|l| {
                let digits = decode_letter(&tracks, l);
                let old: Vec<u8> = placement.iter().map(|&p| digits[p]).collect();
                encode_letter(&self.tracks, &old)
            })
            .collect();
        let n = self.num_states();
        let mut delta = Vec::with_capacity(n * alphabet);
        for q in 0..n {
            let row = self.row(q);
            delta.extend(old_letter.iter().map(|&l| row[l]));
        }
        Ok(Dfa {
            tracks,
            alphabet,
            delta,
            accepting: self.accepting.clone(),
        })
    }

    /// Existential projection of one track. A witness on the removed track
    /// may need more digits than the remaining tracks, so the result also
    /// accepts a tuple when some zero-padding of it was accepted.
    pub fn project(&self, track: usize) -> Result<Dfa> {
        self.project_with_limit(track, DEFAULT_STATE_LIMIT)
    }

    pub fn project_with_limit(&self, track: usize, limit: usize) -> Result<Dfa> {
        if track >= self.arity() {
            return Err(Error::Invalid(format!(
                "no track {track} in a {}-track automaton",
                self.arity()
            )));
        }
        let rest: TrackSignature = self
            .tracks
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != track)
            .map(|(_, &t)| t)
            .collect();
        let removed = self.tracks[track].radix();
        let rest_alphabet = alphabet_size(&rest);
        // full[r * removed + d] = letter with reduced part r and digit d on `track`
        let mut full = vec![0usize; rest_alphabet * removed];
        for r in 0..rest_alphabet {
            let rd = decode_letter(&rest, r);
            for d in 0..removed {
                let mut digits = rd.clone();
                digits.insert(track, d as u8);
                full[r * removed + d] = encode_letter(&self.tracks, &digits);
            }
        }

        let n = self.num_states();
        let mut seen = vec![false; n];
        let mut init = vec![0u32];
        seen[0] = true;
        let mut k = 0;
        while k < init.len() {
            let q = init[k] as usize;
            for d in 0..removed {
                let p = self.next(q, full[d]);
                if !seen[p] {
                    seen[p] = true;
                    init.push(p as u32);
                }
            }
            k += 1;
        }
        init.sort_unstable();

        let mut stamp = vec![u32::MAX; n];
        let mut ids: HashMap<Vec<u32>, u32> = HashMap::default();
        let mut order: Vec<Vec<u32>> = vec![init.clone()];
        ids.insert(init, 0);
        let mut delta: Vec<u32> = Vec::new();
        let mut i = 0;
        let mut tag = 0u32;
        while i < order.len() {
            for r in 0..rest_alphabet {
                tag = tag.wrapping_add(1);
                let mut target: Vec<u32> = Vec::new();
                for &q in &order[i] {
                    let row = self.row(q as usize);
                    for d in 0..removed {
                        let p = row[full[r * removed + d]];
                        if stamp[p as usize] != tag {
                            stamp[p as usize] = tag;
                            target.push(p);
                        }
                    }
                }
                target.sort_unstable();
                let id = match ids.get(&target) {
                    Some(&id) => id,
                    None => {
                        let id = order.len() as u32;
                        ids.insert(target.clone(), id);
                        order.push(target);
                        id
                    }
                };
                delta.push(id);
            }
            if order.len() > limit {
                return Err(Error::SizeLimit(limit));
            }
            i += 1;
        }
        let accepting = order
            .iter()
            .map(|s| s.iter().any(|&q| self.accepting[q as usize]))
            .collect();
        Ok(Dfa {
            tracks: rest,
            alphabet: rest_alphabet,
            delta,
            accepting,
        }
        .minimize())
    }

    /// Reversal as an automaton reading words backwards.
    pub fn reverse(&self) -> Nfa {
        let n = self.num_states();
        let mut edges: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
        for q in 0..n {
            for (l, &p) in self.row(q).iter().enumerate() {
                edges[p as usize].push((l as u32, q as u32));
            }
        }
        let initial = (0..n as u32)
            .filter(|&q| self.accepting[q as usize])
            .collect();
        let mut accepting = vec![false; n];
        accepting[0] = true;
        Nfa::new(self.tracks.clone(), initial, edges, accepting)
    }

    pub fn to_nfa(&self) -> Nfa {
        let n = self.num_states();
        let edges = (0..n)
            .map(|q| {
                self.row(q)
                    .iter()
                    .enumerate()
                    .map(|(l, &p)| (l as u32, p))
                    .collect()
            })
            .collect();
        Nfa::new(self.tracks.clone(), vec![0], edges, self.accepting.clone())
    }

    fn reachable_order(&self) -> Vec<usize> {
        let n = self.num_states();
        let mut seen = vec![false; n];
        let mut order = vec![0usize];
        seen[0] = true;
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            for &p in self.row(q) {
                if !seen[p as usize] {
                    seen[p as usize] = true;
                    order.push(p as usize);
                }
            }
            i += 1;
        }
        order
    }

    /// Canonical minimal automaton: unreachable states dropped, Moore
    /// partition refinement, then states renumbered in breadth-first order
    /// from the initial state with letters visited in increasing order. Two
    /// automata for the same language minimize to identical values.
    pub fn minimize(&self) -> Dfa {
        let reach = self.reachable_order();
        let n = reach.len();
        let mut index = vec![u32::MAX; self.num_states()];
        for (i, &q) in reach.iter().enumerate() {
            index[q] = i as u32;
        }
        let alphabet = self.alphabet;
        // products come out in breadth-first order already; skip the copy
        let identity = n == self.num_states() && reach.iter().enumerate().all(|(i, &q)| i == q);
        let succ: std::borrow::Cow<'_, [u32]> = if identity {
            std::borrow::Cow::Borrowed(&self.delta)
        } else {
            reach
                .iter()
                .flat_map(|&q| self.row(q).iter().map(|&p| index[p as usize]))
                .collect::<Vec<u32>>()
                .into()
        };

        let mut class: Vec<u32> = reach.iter().map(|&q| self.accepting[q] as u32).collect();
        let mut count = {
            let any_acc = class.contains(&1);
            let any_rej = class.contains(&0);
            if any_acc && !any_rej {
                class.iter_mut().for_each(|c| *c = 0);
            }
            any_acc as usize + any_rej as usize
        };
        let mut sig = vec![0u32; alphabet + 1];
        loop {
            let mut table: HashMap<Vec<u32>, u32> =
                HashMap::with_capacity_and_hasher(n, Default::default());
            let mut next_class = vec![0u32; n];
            for q in 0..n {
                sig[0] = class[q];
                for l in 0..alphabet {
                    sig[l + 1] = class[succ[q * alphabet + l] as usize];
                }
                let len = table.len() as u32;
                next_class[q] = match table.get(sig.as_slice()) {
                    Some(&c) => c,
                    None => {
                        table.insert(sig.clone(), len);
                        len
                    }
                };
            }
            let new_count = table.len();
            class = next_class;
            if new_count == count {
                break;
            }
            count = new_count;
        }

        // canonical numbering
        let mut rep = vec![usize::MAX; count];
        for q in 0..n {
            if rep[class[q] as usize] == usize::MAX {
                rep[class[q] as usize] = q;
            }
        }
        let mut id = vec![u32::MAX; count];
        let mut order = vec![class[0]];
        id[class[0] as usize] = 0;
        let mut delta = Vec::with_capacity(count * alphabet);
        let mut i = 0;
        while i < order.len() {
            let q = rep[order[i] as usize];
            for l in 0..alphabet {
                let c = class[succ[q * alphabet + l] as usize];
                if id[c as usize] == u32::MAX {
                    id[c as usize] = order.len() as u32;
                    order.push(c);
                }
                delta.push(id[c as usize]);
            }
            i += 1;
        }
        let accepting = order
            .iter()
            .map(|&c| self.accepting[reach[rep[c as usize]]])
            .collect();
        Dfa {
            tracks: self.tracks.clone(),
            alphabet,
            delta,
            accepting,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.reachable_order().iter().all(|&q| !self.accepting[q])
    }

    pub fn is_universal(&self) -> bool {
        self.reachable_order().iter().all(|&q| self.accepting[q])
    }

    /// Language equality, decided by comparing canonical minimal forms.
    pub fn equivalent(&self, other: &Dfa) -> bool {
        self.tracks == other.tracks && self.minimize() == other.minimize()
    }

    /// Truth value of a closed formula's automaton.
    pub fn truth(&self) -> bool {
        self.accepting[0]
    }

    /// Closes the language under adding and removing leading zero letters:
    /// the result accepts `u` iff some word of the input language denotes the
    /// same tuple as `u`.
    pub fn pad_closed(&self) -> Dfa {
        let n = self.num_states();
        // states reachable from the initial one on the all-zero letter
        let mut z = vec![0u32];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut i = 0;
        while i < z.len() {
            let p = self.next(z[i] as usize, 0);
            if !seen[p] {
                seen[p] = true;
                z.push(p as u32);
            }
            i += 1;
        }
        // state n is a fresh leading-zero reader
        let fresh = n as u32;
        let mut edges: Vec<Vec<(u32, u32)>> = (0..n)
            .map(|q| {
                self.row(q)
                    .iter()
                    .enumerate()
                    .map(|(l, &p)| (l as u32, p))
                    .collect()
            })
            .collect();
        let mut fresh_edges = vec![(0u32, fresh)];
        for &q in &z {
            for (l, &p) in self.row(q as usize).iter().enumerate() {
                fresh_edges.push((l as u32, p));
            }
        }
        edges.push(fresh_edges);
        let mut accepting = self.accepting.clone();
        accepting.push(z.iter().any(|&q| self.accepting[q as usize]));
        let mut initial = z;
        initial.push(fresh);
        Nfa::new(self.tracks.clone(), initial, edges, accepting).determinize()
    }

    /// Whether prepending or removing a leading all-zero letter never changes
    /// acceptance.
    pub fn is_padding_closed(&self) -> bool {
        self.equivalent(&self.pad_closed())
    }

    /// Every accepted tuple whose components all have canonical length at
    /// most `limit`, ordered by the longest component length and then
    /// lexicographically on the padded digit words.
    pub fn enumerate(&self, limit: usize) -> Result<Vec<Vec<i64>>> {
        let n = self.num_states();
        // good[k][q]: some word of length exactly k leads from q to acceptance
        let mut good = vec![self.accepting.clone()];
        for k in 1..=limit {
            let prev = &good[k - 1];
            let layer = (0..n)
                .map(|q| self.row(q).iter().any(|&p| prev[p as usize]))
                .collect();
            good.push(layer);
        }
        let mut found: Vec<(usize, Vec<usize>, Vec<i64>)> = Vec::new();
        let mut word = Vec::with_capacity(limit);
        self.enumerate_rec(0, limit, &good, &mut word, &mut found)?;
        found.sort();
        Ok(found.into_iter().map(|(_, _, v)| v).collect())
    }

    fn enumerate_rec(
        &self,
        q: usize,
        remaining: usize,
        good: &[Vec<bool>],
        word: &mut Vec<usize>,
        out: &mut Vec<(usize, Vec<usize>, Vec<i64>)>,
    ) -> Result<()> {
        if remaining == 0 {
            if self.accepting[q] {
                let (values, longest) = self.decode_word(word)?;
                let lead = word.len() - longest;
                out.push((longest, word[lead..].to_vec(), values));
            }
            return Ok(());
        }
        for l in 0..self.alphabet {
            let p = self.next(q, l);
            if good[remaining - 1][p] {
                word.push(l);
                self.enumerate_rec(p, remaining - 1, good, word, out)?;
                word.pop();
            }
        }
        Ok(())
    }

    /// Values of a padded tuple word and the length of its longest canonical
    /// component.
    pub fn decode_word(&self, word: &[usize]) -> Result<(Vec<i64>, usize)> {
        let k = self.arity();
        let mut tracks: Vec<Vec<u8>> = vec![Vec::with_capacity(word.len()); k];
        for &l in word {
            for (t, d) in decode_letter(&self.tracks, l).into_iter().enumerate() {
                tracks[t].push(d);
            }
        }
        let mut longest = 0;
        let mut values = Vec::with_capacity(k);
        for (t, digits) in tracks.into_iter().enumerate() {
            let w = DigitWord::new(self.tracks[t], digits)?;
            longest = longest.max(w.canonical().len());
            values.push(from_digits(&w)?);
        }
        Ok((values, longest))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b4() -> Numeration {
        Numeration::msd(4)
    }

    /// Single track over base 4, digits restricted to `allowed`.
    fn digits_in(allowed: &[u8]) -> Dfa {
        let allowed = allowed.to_vec();
        Dfa::explore(
            vec![b4()],
            true,
            |&ok| ok,
            move |&ok, d| ok && allowed.contains(&d[0]),
        )
        .unwrap()
        .minimize()
    }

    fn last_digit_is(x: u8) -> Dfa {
        Dfa::explore(vec![b4()], false, |&s| s, move |_, d| d[0] == x)
            .unwrap()
            .minimize()
    }

    fn diagonal(sys: Numeration) -> Dfa {
        Dfa::explore(vec![sys, sys], true, |&s| s, |&s, d| s && d[0] == d[1])
            .unwrap()
            .minimize()
    }

    #[test]
    fn letters_round_trip() {
        let tracks = vec![Numeration::msd(4), Numeration::msd(3), Numeration::neg(5)];
        assert_eq!(alphabet_size(&tracks), 60);
        for l in 0..60 {
            assert_eq!(encode_letter(&tracks, &decode_letter(&tracks, l)), l);
        }
        assert_eq!(encode_letter(&tracks, &[1, 2, 3]), 15 + 2 * 5 + 3);
    }

    #[test]
    fn product_with_complement_is_empty() {
        let a = digits_in(&[0, 2]);
        assert!(a.intersect(&a.complement()).unwrap().is_empty());
        assert!(a.union(&a).unwrap().equivalent(&a));
        assert!(a.union(&Dfa::empty(vec![b4()])).unwrap().equivalent(&a));
    }

    #[test]
    fn disjoint_digit_languages() {
        let both = digits_in(&[0, 2]).intersect(&last_digit_is(1)).unwrap();
        assert!(both.is_empty());
        for n in 0..10_000i64 {
            assert!(!both.accepts(&[n]).unwrap());
        }
    }

    #[test]
    fn complement_examples() {
        let a = digits_in(&[0, 2]);
        assert!(a.complement().complement().equivalent(&a));
        assert!(Dfa::empty(vec![b4()]).complement().is_universal());
        assert!(Dfa::universal(vec![b4()]).complement().is_empty());
        let c = digits_in(&[0, 2]).union(&{
            // {0,2}* 1
            Dfa::explore(
                vec![b4()],
                0u8,
                |&s| s == 1,
                |&s, d| match (s, d[0]) {
                    (0, 0 | 2) => 0,
                    (0, 1) => 1,
                    _ => 2,
                },
            )
            .unwrap()
        });
        let comp = c.unwrap().complement();
        assert!(comp.accepts(&[3]).unwrap());
        assert!(comp.accepts(&[21]).unwrap());
        assert!(!comp.accepts(&[9]).unwrap()); // 21 in base 4
    }

    #[test]
    fn projection_of_diagonal_is_universal() {
        let eq = diagonal(b4());
        assert!(eq.project(0).unwrap().is_universal());
        assert!(eq.project(1).unwrap().is_universal());
        assert!(Dfa::empty(vec![b4(), b4()]).project(1).unwrap().is_empty());
    }

    // y = 4x needs one more digit on the y track than x has
    #[test]
    fn projection_needs_longer_witness() {
        let times4 = Dfa::explore(
            vec![b4(), b4()],
            (0u8, false),
            |&(_, dead)| !dead,
            |&(prev, dead), d| {
                // each x digit repeats the previous y digit
                (d[1], dead || d[0] != prev)
            },
        )
        .unwrap()
        .intersect(&{
            // last y digit is 0
            Dfa::explore(vec![b4(), b4()], true, |&s| s, |_, d| d[1] == 0).unwrap()
        })
        .unwrap();
        assert!(times4.accepts(&[3, 12]).unwrap());
        assert!(!times4.accepts(&[3, 13]).unwrap());
        let has_x = times4.project(0).unwrap(); // y values that are 4x
        for y in 0..200 {
            assert_eq!(has_x.accepts(&[y]).unwrap(), y % 4 == 0, "y = {y}");
        }
        let all_x = times4.project(1).unwrap();
        assert!(all_x.is_universal());
    }

    #[test]
    fn minimize_is_idempotent_and_canonical() {
        let a = digits_in(&[0, 2]).union(&last_digit_is(3)).unwrap();
        let m = a.minimize();
        assert_eq!(m, m.minimize());
        // scramble: run through reversal twice
        let again = a.reverse().determinize().reverse().determinize();
        assert_eq!(again, m);
    }

    #[test]
    fn rearrange_adds_free_track() {
        let a = digits_in(&[0, 2]);
        let two = a.rearrange(vec![Numeration::msd(3), b4()], &[1]).unwrap();
        assert!(two.accepts(&[7, 8]).unwrap());
        assert!(two.accepts(&[0, 2]).unwrap());
        assert!(!two.accepts(&[7, 7]).unwrap());
        assert!(two.project(0).unwrap().equivalent(&a));
    }

    #[test]
    fn accepts_rejects_unrepresentable() {
        let eq = diagonal(b4());
        assert!(eq.accepts(&[7, 7]).unwrap());
        assert!(!eq.accepts(&[7, 8]).unwrap());
        assert!(eq.accepts(&[-1, 0]).is_err());
        assert!(eq.accepts(&[1]).is_err());
    }

    #[test]
    fn enumerate_examples() {
        // 2*3 over base 4
        let a = Dfa::explore(
            vec![b4()],
            0u8,
            |&s| s == 2,
            |&s, d| match (s, d[0]) {
                (0, 0) => 0,
                (0 | 1, 2) => 1,
                (0 | 1, 3) => 2,
                _ => 3,
            },
        )
        .unwrap();
        let got = a.enumerate(3).unwrap();
        let want: Vec<Vec<i64>> = vec![vec![3], vec![11], vec![43]];
        // oracle: all n < 64 whose base-4 word is 2*3
        let oracle: Vec<Vec<i64>> = (0..64i64)
            .filter(|&n| {
                let w = to_digits(n, b4()).unwrap();
                let d = w.digits();
                !d.is_empty() && d[d.len() - 1] == 3 && d[..d.len() - 1].iter().all(|&x| x == 2)
            })
            .map(|n| vec![n])
            .collect();
        assert_eq!(oracle, want);
        assert_eq!(got, want);
        assert!(Dfa::empty(vec![b4()]).enumerate(4).unwrap().is_empty());
    }

    #[test]
    fn pad_closure() {
        // the language "2" without leading zeros is not closed
        let only2 = Dfa::explore(
            vec![b4()],
            0u8,
            |&s| s == 1,
            |&s, d| if s == 0 && d[0] == 2 { 1 } else { 2 },
        )
        .unwrap();
        assert!(!only2.is_padding_closed());
        let closed = only2.pad_closed();
        assert!(closed.is_padding_closed());
        assert!(closed.accepts_letters([0, 0, 2]));
        assert_eq!(closed.enumerate(3).unwrap(), vec![vec![2]]);
        assert!(digits_in(&[0, 2]).is_padding_closed());
    }

    #[test]
    fn zero_track_truth() {
        assert!(Dfa::constant(true).truth());
        assert!(!Dfa::constant(false).truth());
        assert_eq!(Dfa::constant(true).alphabet_size(), 1);
    }

    #[test]
    fn signature_mismatch_is_an_error() {
        let a = digits_in(&[0]);
        let b = Dfa::universal(vec![Numeration::msd(3)]);
        assert!(matches!(
            a.product(&b, BoolOp::And),
            Err(Error::SignatureMismatch(_))
        ));
    }
}
