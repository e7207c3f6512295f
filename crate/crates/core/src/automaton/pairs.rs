//! The pair automaton: unordered pairs `{p, q}` plus the diagonal of
//! singletons, with `{p, q}·x = {px, qx}`.

use std::collections::VecDeque;

use super::{Dfa, Letter, State, Word};

const UNREACHED: u32 = u32::MAX;

/// Shortest merging words for every pair of states.
///
/// Built by one backward breadth-first search from the diagonal, so every
/// pair gets its distance to a singleton together with the first letter
/// of a shortest merging word.
#[derive(Debug, Clone)]
pub struct MergeTable {
    n: usize,
    dist: Vec<u32>,
    next: Vec<u32>,
}

impl MergeTable {
    pub fn build(dfa: &Dfa) -> Self {
        let n = dfa.num_states();
        let k = dfa.alphabet_size();

        // Preimages per letter in CSR layout: pre[x] of state s is
        // targets[x][start[x][s]..start[x][s+1]].
        let mut start = vec![vec![0usize; n + 1]; k];
        let mut sources = vec![vec![0 as State; n]; k];
        for x in 0..k {
            for q in 0..n {
                start[x][dfa.step(q, Letter(x)) + 1] += 1;
            }
            for s in 0..n {
                start[x][s + 1] += start[x][s];
            }
            let mut fill = start[x].clone();
            for q in 0..n {
                let t = dfa.step(q, Letter(x));
                sources[x][fill[t]] = q;
                fill[t] += 1;
            }
        }

        let mut dist = vec![UNREACHED; n * n];
        let mut next = vec![UNREACHED; n * n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            dist[s * n + s] = 0;
            queue.push_back((s, s));
        }
        while let Some((p, q)) = queue.pop_front() {
            let d = dist[p * n + q];
            for x in 0..k {
                let pre_p = &sources[x][start[x][p]..start[x][p + 1]];
                let pre_q = &sources[x][start[x][q]..start[x][q + 1]];
                for &pp in pre_p {
                    for &qq in pre_q {
                        if pp == qq {
                            continue;
                        }
                        let (a, b) = if pp < qq { (pp, qq) } else { (qq, pp) };
                        if dist[a * n + b] == UNREACHED {
                            dist[a * n + b] = d + 1;
                            dist[b * n + a] = d + 1;
                            next[a * n + b] = x as u32;
                            next[b * n + a] = x as u32;
                            queue.push_back((a, b));
                        }
                    }
                }
            }
        }
        MergeTable { n, dist, next }
    }

    /// Length of a shortest word merging `p` and `q`, if any.
    pub fn distance(&self, p: State, q: State) -> Option<usize> {
        match self.dist[p * self.n + q] {
            UNREACHED => None,
            d => Some(d as usize),
        }
    }

    pub fn all_pairs_mergeable(&self) -> bool {
        self.dist.iter().all(|&d| d != UNREACHED)
    }

    pub fn merging_word(&self, dfa: &Dfa, mut p: State, mut q: State) -> Option<Word> {
        self.distance(p, q)?;
        let mut w = Word::new();
        while p != q {
            let x = Letter(self.next[p * self.n + q] as usize);
            w.push(x);
            p = dfa.step(p, x);
            q = dfa.step(q, x);
        }
        Some(w)
    }
}

impl Dfa {
    /// A reset word built by repeatedly merging the closest pair of the
    /// current image, or `None` when the automaton is not synchronizing.
    ///
    /// Among pairs of the current image the one with the shortest merging
    /// word wins; ties go to the lexicographically smallest `(p, q)`.
    pub fn greedy_upper_bound(&self) -> Option<Word> {
        let table = MergeTable::build(self);
        if !table.all_pairs_mergeable() {
            return None;
        }
        let mut current = self.all_states();
        let mut word = Word::new();
        while current.len() > 1 {
            let mut best: Option<(usize, State, State)> = None;
            for (i, &p) in current.iter().enumerate() {
                for &q in &current[i + 1..] {
                    let d = table.distance(p, q).expect("all pairs mergeable");
                    if best.is_none_or(|(bd, _, _)| d < bd) {
                        best = Some((d, p, q));
                    }
                }
            }
            let (_, p, q) = best.expect("image has at least two states");
            let merge = table.merging_word(self, p, q).expect("pair is mergeable");
            current = self.image(&current, &merge);
            word.extend_from(&merge);
        }
        debug_assert!(self.verify_reset_word(&word));
        Some(word)
    }
}
