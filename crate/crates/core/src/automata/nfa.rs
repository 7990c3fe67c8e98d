use rustc_hash::FxHashMap as HashMap;

use super::{alphabet_size, Dfa, TrackSignature, DEFAULT_STATE_LIMIT};
use crate::numbers::Numeration;

/// Nondeterministic automaton with a set of initial states and labelled
/// edges `(letter, target)`. Only used as an intermediate form for reversal,
/// regex compilation and padding closure.
#[derive(Debug, Clone)]
pub struct Nfa {
    tracks: TrackSignature,
    initial: Vec<u32>,
    edges: Vec<Vec<(u32, u32)>>,
    accepting: Vec<bool>,
}

impl Nfa {
    pub fn new(
        tracks: TrackSignature,
        initial: Vec<u32>,
        edges: Vec<Vec<(u32, u32)>>,
        accepting: Vec<bool>,
    ) -> Nfa {
        assert_eq!(edges.len(), accepting.len());
        Nfa {
            tracks,
            initial,
            edges,
            accepting,
        }
    }

    pub fn tracks(&self) -> &[Numeration] {
        &self.tracks
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn accepts_letters(&self, letters: &[usize]) -> bool {
        let mut current: Vec<u32> = self.initial.clone();
        for &l in letters {
            let mut next: Vec<u32> = current
                .iter()
                .flat_map(|&q| {
                    self.edges[q as usize]
                        .iter()
                        .filter(move |&&(a, _)| a as usize == l)
                        .map(|&(_, p)| p)
                })
                .collect();
            next.sort_unstable();
            next.dedup();
            current = next;
        }
        current.iter().any(|&q| self.accepting[q as usize])
    }

    /// Subset construction, followed by minimization.
    pub fn determinize(&self) -> Dfa {
        let alphabet = alphabet_size(&self.tracks);
        let mut start = self.initial.clone();
        start.sort_unstable();
        start.dedup();
        let mut ids: HashMap<Vec<u32>, u32> = HashMap::default();
        let mut order = vec![start.clone()];
        ids.insert(start, 0);
        let mut delta: Vec<u32> = Vec::new();
        let mut moves: Vec<(u32, u32)> = Vec::new();
        let mut i = 0;
        while i < order.len() {
            moves.clear();
            for &q in &order[i] {
                moves.extend_from_slice(&self.edges[q as usize]);
            }
            moves.sort_unstable();
            moves.dedup();
            let mut row = vec![u32::MAX; alphabet];
            let mut k = 0;
            while k < moves.len() {
                let letter = moves[k].0;
                let mut target = Vec::new();
                while k < moves.len() && moves[k].0 == letter {
                    target.push(moves[k].1);
                    k += 1;
                }
                row[letter as usize] = intern(&mut ids, &mut order, target);
            }
            if row.contains(&u32::MAX) {
                let dead = intern(&mut ids, &mut order, Vec::new());
                row.iter_mut()
                    .filter(|r| **r == u32::MAX)
                    .for_each(|r| *r = dead);
            }
            delta.extend_from_slice(&row);
            assert!(
                order.len() <= DEFAULT_STATE_LIMIT,
                "subset construction exceeded the state limit"
            );
            i += 1;
        }
        let accepting = order
            .iter()
            .map(|s| s.iter().any(|&q| self.accepting[q as usize]))
            .collect();
        Dfa::from_parts(self.tracks.clone(), delta, accepting)
            .expect("subset construction produced a total table")
            .minimize()
    }
}

fn intern(ids: &mut HashMap<Vec<u32>, u32>, order: &mut Vec<Vec<u32>>, set: Vec<u32>) -> u32 {
    if let Some(&id) = ids.get(&set) {
        return id;
    }
    let id = order.len() as u32;
    ids.insert(set.clone(), id);
    order.push(set);
    id
}
