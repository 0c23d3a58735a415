use super::{Letter, StateId};

/// Complete deterministic finite automaton over letters `0..num_letters`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    num_letters: usize,
    initial: StateId,
    accepting: Vec<bool>,
    delta: Vec<Vec<StateId>>,
}

impl Dfa {
    /// Panics unless `delta` is complete and in range.
    pub fn new(num_letters: usize, initial: StateId, accepting: Vec<bool>, delta: Vec<Vec<StateId>>) -> Self {
        assert_eq!(accepting.len(), delta.len());
        assert!((initial as usize) < delta.len());
        for row in &delta {
            assert_eq!(row.len(), num_letters, "transition function must be complete");
            assert!(row.iter().all(|t| (*t as usize) < delta.len()));
        }
        Dfa { num_letters, initial, accepting, delta }
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn num_letters(&self) -> usize {
        self.num_letters
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting[q as usize]
    }

    pub fn step(&self, q: StateId, a: Letter) -> StateId {
        self.delta[q as usize][a as usize]
    }

    pub fn run(&self, word: &[Letter]) -> StateId {
        word.iter().fold(self.initial, |q, a| self.step(q, *a))
    }

    pub fn accepts(&self, word: &[Letter]) -> bool {
        self.is_accepting(self.run(word))
    }

    /// Shortest word reaching each state (`None` if unreachable), preferring
    /// smaller letters.
    pub fn access_words(&self) -> Vec<Option<Vec<Letter>>> {
        let mut out: Vec<Option<Vec<Letter>>> = vec![None; self.num_states()];
        out[self.initial as usize] = Some(Vec::new());
        let mut queue = std::collections::VecDeque::from([self.initial]);
        while let Some(q) = queue.pop_front() {
            for a in 0..self.num_letters as Letter {
                let t = self.step(q, a);
                if out[t as usize].is_none() {
                    let mut w = out[q as usize].clone().unwrap();
                    w.push(a);
                    out[t as usize] = Some(w);
                    queue.push_back(t);
                }
            }
        }
        out
    }

    /// Read as a bad-prefix automaton: drop accepting states, then
    /// repeatedly drop states left without successors. The result accepts
    /// the infinite words with no accepted prefix.
    pub fn to_safety(&self) -> SafetyPruning {
        let n = self.num_states();
        let mut alive: Vec<bool> = self.accepting.iter().map(|a| !a).collect();
        let mut pruned = Vec::new();
        loop {
            let mut changed = false;
            for q in 0..n {
                if alive[q] && !self.delta[q].iter().any(|t| alive[*t as usize]) {
                    alive[q] = false;
                    pruned.push(q as StateId);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if !alive[self.initial as usize] {
            return SafetyPruning { automaton: None, pruned };
        }
        // renumber reachable survivors breadth-first
        let mut map = vec![StateId::MAX; n];
        let mut order = vec![self.initial];
        map[self.initial as usize] = 0;
        let mut head = 0;
        while head < order.len() {
            let q = order[head];
            head += 1;
            for &t in &self.delta[q as usize] {
                if alive[t as usize] && map[t as usize] == StateId::MAX {
                    map[t as usize] = order.len() as StateId;
                    order.push(t);
                }
            }
        }
        let delta = order
            .iter()
            .map(|&q| {
                self.delta[q as usize]
                    .iter()
                    .map(|&t| (map[t as usize] != StateId::MAX).then(|| map[t as usize]))
                    .collect()
            })
            .collect();
        SafetyPruning {
            automaton: Some(SafetyAutomaton { num_letters: self.num_letters, initial: 0, delta, origin: order }),
            pruned,
        }
    }
}

/// Outcome of [`Dfa::to_safety`].
#[derive(Debug, Clone)]
pub struct SafetyPruning {
    /// `None` when the initial state itself was removed.
    pub automaton: Option<SafetyAutomaton>,
    /// Non-accepting DFA states removed because every continuation is bad.
    pub pruned: Vec<StateId>,
}

/// Deterministic automaton whose every infinite run accepts; a missing
/// transition rejects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafetyAutomaton {
    num_letters: usize,
    initial: StateId,
    delta: Vec<Vec<Option<StateId>>>,
    /// Source DFA state of each state.
    origin: Vec<StateId>,
}

impl SafetyAutomaton {
    pub fn new(num_letters: usize, initial: StateId, delta: Vec<Vec<Option<StateId>>>) -> Self {
        let origin = (0..delta.len() as StateId).collect();
        SafetyAutomaton { num_letters, initial, delta, origin }
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn num_letters(&self) -> usize {
        self.num_letters
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn step(&self, q: StateId, a: Letter) -> Option<StateId> {
        self.delta[q as usize][a as usize]
    }

    pub fn origin(&self, q: StateId) -> StateId {
        self.origin[q as usize]
    }

    /// Letters with a transition out of `q`.
    pub fn enabled(&self, q: StateId) -> impl Iterator<Item = (Letter, StateId)> + '_ {
        self.delta[q as usize]
            .iter()
            .enumerate()
            .filter_map(|(a, t)| t.map(|t| (a as Letter, t)))
    }

    /// Whether the finite word can be read without falling off.
    pub fn reads(&self, word: &[Letter]) -> bool {
        word.iter()
            .try_fold(self.initial, |q, a| self.step(q, *a))
            .is_some()
    }
}
