//! Ground-truth semantics: LTL evaluation on lassos, forced values and
//! minimal satisfying open sequences.

use std::collections::HashMap;
use std::sync::Arc;

use crate::automata::{
    ltl_to_nba, nba_emptiness, nba_product, strongly_connected_components, Alphabet, Letter, Nba,
    NbaBuilder, StateId,
};
use crate::ltl::{Formula, Partition, Prop};
use crate::threeval::{ConcreteLasso, InputLasso, OpenLasso, OpenLetter, TruthValue3};

/// Whether `w ⊨ f`, by fixpoint evaluation over the lasso positions.
pub fn eval_ltl_on_lasso(f: &Formula, partition: &Partition, w: &ConcreteLasso) -> bool {
    eval_positions(f, partition, w)[0]
}

fn eval_positions(f: &Formula, part: &Partition, w: &ConcreteLasso) -> Vec<bool> {
    use Formula::*;
    let n = w.len();
    let next = |v: &[bool]| (0..n).map(|i| v[w.succ(i)]).collect::<Vec<_>>();
    // iterate `v[i] = base(i, v[succ i])` backwards until stable
    let fix = |init: bool, step: &dyn Fn(usize, bool) -> bool| {
        let mut v = vec![init; n];
        loop {
            let mut changed = false;
            for i in (0..n).rev() {
                let x = step(i, v[w.succ(i)]);
                if x != v[i] {
                    v[i] = x;
                    changed = true;
                }
            }
            if !changed {
                return v;
            }
        }
    };
    match f {
        True => vec![true; n],
        False => vec![false; n],
        Atom(p) => {
            let bit = part.ap_bit(*p);
            (0..n).map(|i| w.at(i) >> bit & 1 == 1).collect()
        }
        Not(a) => eval_positions(a, part, w).into_iter().map(|x| !x).collect(),
        And(a, b) | Or(a, b) | Implies(a, b) => {
            let (x, y) = (eval_positions(a, part, w), eval_positions(b, part, w));
            x.iter()
                .zip(&y)
                .map(|(&x, &y)| match f {
                    And(..) => x && y,
                    Or(..) => x || y,
                    _ => !x || y,
                })
                .collect()
        }
        Next(a) => next(&eval_positions(a, part, w)),
        Until(a, b) => {
            let (x, y) = (eval_positions(a, part, w), eval_positions(b, part, w));
            fix(false, &|i, later| y[i] || (x[i] && later))
        }
        Release(a, b) => {
            let (x, y) = (eval_positions(a, part, w), eval_positions(b, part, w));
            fix(true, &|i, later| y[i] && (x[i] || later))
        }
        Eventually(a) => {
            let x = eval_positions(a, part, w);
            fix(false, &|i, later| x[i] || later)
        }
        Globally(a) => {
            let x = eval_positions(a, part, w);
            fix(true, &|i, later| x[i] && later)
        }
    }
}

/// Value of an output at a position across all models with a given input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ForcedStatus {
    Forced(bool),
    Open,
    NoModel,
}

impl ForcedStatus {
    pub fn from_possible(can_be_true: bool, can_be_false: bool) -> Self {
        match (can_be_true, can_be_false) {
            (true, true) => ForcedStatus::Open,
            (true, false) => ForcedStatus::Forced(true),
            (false, true) => ForcedStatus::Forced(false),
            (false, false) => ForcedStatus::NoModel,
        }
    }

    /// The open value this status asks for; `None` for `NoModel`.
    pub fn expected(self) -> Option<TruthValue3> {
        match self {
            ForcedStatus::Forced(b) => Some(TruthValue3::from_bool(b)),
            ForcedStatus::Open => Some(TruthValue3::Open),
            ForcedStatus::NoModel => None,
        }
    }
}

/// Result of [`Oracle::min_trace`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MinTrace {
    Trace(OpenLasso),
    NoModel,
}

/// Reference semantics of one formula, backed by its Büchi automaton.
#[derive(Debug, Clone)]
pub struct Oracle {
    partition: Arc<Partition>,
    formula: Formula,
    nba: Nba,
}

impl Oracle {
    pub fn new(formula: &Formula, partition: &Arc<Partition>) -> Self {
        Oracle {
            partition: partition.clone(),
            formula: formula.clone(),
            nba: ltl_to_nba(formula, partition),
        }
    }

    pub fn partition(&self) -> &Arc<Partition> {
        &self.partition
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn nba(&self) -> &Nba {
        &self.nba
    }

    /// Concrete letters carrying input `input`.
    fn letters_with_input(&self, input: u32) -> impl Iterator<Item = Letter> + '_ {
        let n_out = self.partition.num_outputs();
        (0..1u32 << n_out).map(move |o| self.partition.join(input, o))
    }

    /// Accepts the `2^AP` words whose input part is `inputs`.
    pub fn input_automaton(&self, inputs: &InputLasso) -> Nba {
        let mut b = NbaBuilder::new(Alphabet::concrete(&self.partition));
        for _ in 0..inputs.len() {
            b.add_state(true);
        }
        for pos in 0..inputs.len() {
            for l in self.letters_with_input(*inputs.at(pos)) {
                b.add_edge(pos as StateId, l, inputs.succ(pos) as StateId);
            }
        }
        b.build(0)
    }

    /// Accepts the `2^AP` words whose output `p` at position `i` is `value`.
    pub fn at_pos_automaton(&self, i: usize, p: Prop, value: bool) -> Nba {
        let alphabet = Alphabet::concrete(&self.partition);
        let n_letters = alphabet.size() as Letter;
        let bit = self.partition.ap_bit(p);
        let mut b = NbaBuilder::new(alphabet);
        for _ in 0..=i + 1 {
            b.add_state(true);
        }
        for c in 0..=i {
            for l in 0..n_letters {
                if c < i || (l >> bit & 1 == 1) == value {
                    b.add_edge(c as StateId, l, c as StateId + 1);
                }
            }
        }
        for l in 0..n_letters {
            b.add_edge(i as StateId + 1, l, i as StateId + 1);
        }
        b.build(0)
    }

    pub fn has_model(&self, inputs: &InputLasso) -> bool {
        let prod = nba_product(&self.nba, &self.input_automaton(inputs)).expect("same alphabet");
        nba_emptiness(&prod).is_some()
    }

    /// Reference path: one emptiness check per candidate value.
    pub fn forced_value(&self, inputs: &InputLasso, i: usize, p: Prop) -> ForcedStatus {
        let base = nba_product(&self.nba, &self.input_automaton(inputs)).expect("same alphabet");
        let possible = |value: bool| {
            let prod = nba_product(&base, &self.at_pos_automaton(i, p, value)).expect("same alphabet");
            nba_emptiness(&prod).is_some()
        };
        ForcedStatus::from_possible(possible(true), possible(false))
    }

    /// Second implementation: explicit search over `(state, input position,
    /// counter)` with a per-node cycle test.
    pub fn forced_value_direct(&self, inputs: &InputLasso, i: usize, p: Prop) -> ForcedStatus {
        let bit = self.partition.ap_bit(p);
        let possible = |value: bool| {
            let succ = |&(q, pos, c): &(StateId, usize, usize)| {
                let mut out = Vec::new();
                for l in self.letters_with_input(*inputs.at(pos)) {
                    if c == i && (l >> bit & 1 == 1) != value {
                        continue;
                    }
                    for t in self.nba.successors(q, l) {
                        out.push((t, inputs.succ(pos), (c + 1).min(i + 1)));
                    }
                }
                out
            };
            let start = (self.nba.initial(), 0usize, 0usize);
            let mut seen = std::collections::HashSet::from([start]);
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for t in succ(&v) {
                    if seen.insert(t) {
                        stack.push(t);
                    }
                }
            }
            // an accepting node past the checked position that returns to itself
            seen.iter().any(|&v| {
                if !self.nba.is_accepting(v.0) || v.2 <= i {
                    return false;
                }
                let mut inner = std::collections::HashSet::new();
                let mut stack = succ(&v);
                while let Some(u) = stack.pop() {
                    if u == v {
                        return true;
                    }
                    if inner.insert(u) {
                        stack.extend(succ(&u));
                    }
                }
                false
            })
        };
        ForcedStatus::from_possible(possible(true), possible(false))
    }

    /// The unique minimal satisfying open sequence with input `inputs`.
    pub fn min_trace(&self, inputs: &InputLasso) -> MinTrace {
        let nq = self.nba.num_states();
        let np = inputs.len();
        let node = |q: StateId, pos: usize| q as usize * np + pos;
        let succ_of = |v: usize| -> Vec<usize> {
            let (q, pos) = ((v / np) as StateId, v % np);
            let mut out: Vec<usize> = self
                .letters_with_input(*inputs.at(pos))
                .flat_map(|l| self.nba.successors(q, l).collect::<Vec<_>>())
                .map(|t| node(t, inputs.succ(pos)))
                .collect();
            out.sort_unstable();
            out.dedup();
            out
        };
        let live = live_nodes(nq * np, node(self.nba.initial(), 0), &succ_of, |v| {
            self.nba.is_accepting((v / np) as StateId)
        });
        let start = node(self.nba.initial(), 0);
        if !live[start] {
            return MinTrace::NoModel;
        }
        let n_out = self.partition.num_outputs();
        let mut letters: Vec<OpenLetter> = Vec::new();
        let mut seen: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut current = vec![start];
        let mut pos = 0usize;
        loop {
            if let Some(&k) = seen.get(&(pos, current.clone())) {
                let cycle = letters.split_off(k);
                return MinTrace::Trace(OpenLasso::new(letters, cycle));
            }
            seen.insert((pos, current.clone()), letters.len());
            let input = *inputs.at(pos);
            let mut possible = vec![[false; 2]; n_out];
            let mut next: Vec<usize> = Vec::new();
            for &v in &current {
                let q = (v / np) as StateId;
                for l in self.letters_with_input(input) {
                    let (_, outs) = self.partition.split(l);
                    for t in self.nba.successors(q, l) {
                        let w = node(t, inputs.succ(pos));
                        if live[w] {
                            next.push(w);
                            for (j, slot) in possible.iter_mut().enumerate() {
                                slot[(outs >> j & 1) as usize] = true;
                            }
                        }
                    }
                }
            }
            next.sort_unstable();
            next.dedup();
            let outputs = possible
                .iter()
                .map(|s| match (s[1], s[0]) {
                    (true, true) => TruthValue3::Open,
                    (b, _) => TruthValue3::from_bool(b),
                })
                .collect();
            let ins = (0..self.partition.num_inputs()).map(|k| input >> k & 1 == 1).collect();
            letters.push(OpenLetter::new(ins, outputs));
            current = next;
            pos = inputs.succ(pos);
        }
    }
}

/// Nodes reachable from `start` that can reach an accepting cycle.
fn live_nodes(
    n: usize,
    start: usize,
    succ: &dyn Fn(usize) -> Vec<usize>,
    accepting: impl Fn(usize) -> bool,
) -> Vec<bool> {
    let (comp, ncomp) = strongly_connected_components(n, &[start], succ);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); ncomp];
    for v in 0..n {
        if comp[v] != usize::MAX {
            members[comp[v]].push(v);
        }
    }
    let mut live_comp = vec![false; ncomp];
    // reverse topological numbering: successors' components come first
    for c in 0..ncomp {
        let mut good = false;
        for &v in &members[c] {
            for t in succ(v) {
                if comp[t] == c {
                    good |= accepting(v);
                } else {
                    good |= live_comp[comp[t]];
                }
            }
        }
        live_comp[c] = good;
    }
    (0..n).map(|v| comp[v] != usize::MAX && live_comp[comp[v]]).collect()
}
