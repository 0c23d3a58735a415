use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use super::scc::strongly_connected_components;
use super::{Alphabet, AlphabetKind, AutomatonError, Letter, Limits, StateId};
use crate::threeval::Lasso;

/// Nondeterministic Büchi automaton. A missing successor rejects.
#[derive(Debug, Clone)]
pub struct Nba {
    alphabet: Alphabet,
    initial: StateId,
    accepting: Vec<bool>,
    /// Per state: `(letter, target)` pairs sorted by letter.
    edges: Vec<Vec<(Letter, StateId)>>,
}

/// Accepted ultimately periodic run: letters plus the visited states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoWitness {
    pub stem: Vec<Letter>,
    pub cycle: Vec<Letter>,
    /// `stem.len() + 1` states; the last one starts the cycle.
    pub stem_states: Vec<StateId>,
    /// `cycle.len() + 1` states, first and last equal.
    pub cycle_states: Vec<StateId>,
}

impl LassoWitness {
    pub fn word(&self) -> Lasso<Letter> {
        Lasso::new(self.stem.clone(), self.cycle.clone())
    }
}

pub struct NbaBuilder {
    alphabet: Alphabet,
    accepting: Vec<bool>,
    edges: Vec<Vec<(Letter, StateId)>>,
}

impl NbaBuilder {
    pub fn new(alphabet: Alphabet) -> Self {
        NbaBuilder { alphabet, accepting: Vec::new(), edges: Vec::new() }
    }

    pub fn add_state(&mut self, accepting: bool) -> StateId {
        self.accepting.push(accepting);
        self.edges.push(Vec::new());
        (self.accepting.len() - 1) as StateId
    }

    pub fn add_edge(&mut self, from: StateId, letter: Letter, to: StateId) {
        self.edges[from as usize].push((letter, to));
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn build(mut self, initial: StateId) -> Nba {
        for e in &mut self.edges {
            e.sort_unstable();
            e.dedup();
        }
        Nba { alphabet: self.alphabet, initial, accepting: self.accepting, edges: self.edges }
    }
}

impl Nba {
    /// Accepts nothing.
    pub fn empty(alphabet: Alphabet) -> Nba {
        let mut b = NbaBuilder::new(alphabet);
        let q = b.add_state(false);
        b.build(q)
    }

    /// Accepts every word.
    pub fn universal(alphabet: Alphabet) -> Nba {
        let mut b = NbaBuilder::new(alphabet.clone());
        let q = b.add_state(true);
        for a in 0..alphabet.size() as Letter {
            b.add_edge(q, a, q);
        }
        b.build(q)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting[q as usize]
    }

    pub fn edges(&self, q: StateId) -> &[(Letter, StateId)] {
        &self.edges[q as usize]
    }

    pub fn successors(&self, q: StateId, letter: Letter) -> impl Iterator<Item = StateId> + '_ {
        let e = &self.edges[q as usize];
        let lo = e.partition_point(|(l, _)| *l < letter);
        e[lo..].iter().take_while(move |(l, _)| *l == letter).map(|(_, t)| *t)
    }

    fn targets(&self, q: usize) -> Vec<usize> {
        let mut t: Vec<usize> = self.edges[q].iter().map(|(_, t)| *t as usize).collect();
        t.sort_unstable();
        t.dedup();
        t
    }

    /// States that lie on, or can reach, a reachable accepting cycle.
    fn live_states(&self) -> Vec<bool> {
        let n = self.num_states();
        let (comp, ncomp) =
            strongly_connected_components(n, &[self.initial as usize], |v| self.targets(v));
        let mut good = vec![false; ncomp];
        for q in 0..n {
            if comp[q] == usize::MAX || !self.accepting[q] {
                continue;
            }
            if self.edges[q].iter().any(|(_, t)| comp[*t as usize] == comp[q]) {
                good[comp[q]] = true;
            }
        }
        // components come in reverse topological order: successors first
        let mut order: Vec<usize> = (0..n).filter(|q| comp[*q] != usize::MAX).collect();
        order.sort_by_key(|q| comp[*q]);
        let mut live = vec![false; n];
        for q in order {
            if good[comp[q]] || self.edges[q].iter().any(|(_, t)| live[*t as usize]) {
                live[q] = true;
            }
        }
        // a member of a good component is live even if visited before its
        // cycle partners; second pass closes over components
        for q in 0..n {
            if comp[q] != usize::MAX && good[comp[q]] {
                live[q] = true;
            }
        }
        let mut changed = true;
        while changed {
            changed = false;
            for q in 0..n {
                if comp[q] != usize::MAX
                    && !live[q]
                    && self.edges[q].iter().any(|(_, t)| live[*t as usize])
                {
                    live[q] = true;
                    changed = true;
                }
            }
        }
        live
    }

    /// Remove unreachable states and states without accepting continuation;
    /// renumber in breadth-first order.
    pub fn trim(&self) -> Nba {
        let live = self.live_states();
        if !live[self.initial as usize] {
            return Nba::empty(self.alphabet.clone());
        }
        let mut map = vec![StateId::MAX; self.num_states()];
        let mut order = vec![self.initial];
        map[self.initial as usize] = 0;
        let mut head = 0;
        while head < order.len() {
            let q = order[head];
            head += 1;
            for &(_, t) in &self.edges[q as usize] {
                if live[t as usize] && map[t as usize] == StateId::MAX {
                    map[t as usize] = order.len() as StateId;
                    order.push(t);
                }
            }
        }
        let mut b = NbaBuilder::new(self.alphabet.clone());
        for &q in &order {
            b.add_state(self.accepting[q as usize]);
        }
        for (new, &q) in order.iter().enumerate() {
            for &(a, t) in &self.edges[q as usize] {
                if map[t as usize] != StateId::MAX {
                    b.add_edge(new as StateId, a, map[t as usize]);
                }
            }
        }
        b.build(0)
    }

    /// Trim, then merge bisimilar states (same acceptance, same letter-wise
    /// successor classes). Language preserving.
    pub fn reduce(&self) -> Nba {
        let t = self.trim();
        let n = t.num_states();
        let mut class: Vec<usize> = t.accepting.iter().map(|a| *a as usize).collect();
        loop {
            let mut sig_ids: HashMap<(usize, Vec<(Letter, usize)>), usize> = HashMap::new();
            let mut next = vec![0; n];
            for q in 0..n {
                let mut sig: Vec<(Letter, usize)> =
                    t.edges[q].iter().map(|(a, s)| (*a, class[*s as usize])).collect();
                sig.sort_unstable();
                sig.dedup();
                let k = sig_ids.len();
                next[q] = *sig_ids.entry((class[q], sig)).or_insert(k);
            }
            let before = class.iter().collect::<std::collections::HashSet<_>>().len();
            let after = sig_ids.len();
            class = next;
            if after == before {
                break;
            }
        }
        let ncls = class.iter().max().map_or(0, |m| m + 1);
        let mut b = NbaBuilder::new(t.alphabet.clone());
        let mut acc = vec![false; ncls];
        for q in 0..n {
            acc[class[q]] |= t.accepting[q];
        }
        for a in acc {
            b.add_state(a);
        }
        for q in 0..n {
            for &(a, s) in &t.edges[q] {
                b.add_edge(class[q] as StateId, a, class[s as usize] as StateId);
            }
        }
        b.build(class[t.initial as usize] as StateId).trim()
    }

    /// Rebuild over another alphabet: each new letter `x` behaves like old
    /// letter `map(x)`.
    pub fn relabel(&self, alphabet: Alphabet, map: impl Fn(Letter) -> Letter) -> Nba {
        let mut by_old: HashMap<Letter, Vec<Letter>> = HashMap::new();
        for x in 0..alphabet.size() as Letter {
            by_old.entry(map(x)).or_default().push(x);
        }
        let mut b = NbaBuilder::new(alphabet);
        for &a in &self.accepting {
            b.add_state(a);
        }
        for q in 0..self.num_states() {
            for &(a, t) in &self.edges[q] {
                if let Some(xs) = by_old.get(&a) {
                    for &x in xs {
                        b.add_edge(q as StateId, x, t);
                    }
                }
            }
        }
        b.build(self.initial)
    }

    /// Disjoint union behind a fresh initial state.
    pub fn union(parts: &[&Nba]) -> Result<Nba, AutomatonError> {
        let alphabet = parts[0].alphabet.clone();
        if parts.iter().any(|p| p.alphabet != alphabet) {
            return Err(AutomatonError::AlphabetMismatch);
        }
        let mut b = NbaBuilder::new(alphabet);
        let init = b.add_state(false);
        for p in parts {
            let offset = b.num_states() as StateId;
            for &a in &p.accepting {
                b.add_state(a);
            }
            for q in 0..p.num_states() {
                for &(a, t) in &p.edges[q] {
                    b.add_edge(q as StateId + offset, a, t + offset);
                    if q as StateId == p.initial {
                        b.add_edge(init, a, t + offset);
                    }
                }
            }
        }
        Ok(b.build(init))
    }

    /// Whether every reachable state is accepting (a safety automaton).
    pub fn all_accepting(&self) -> bool {
        self.accepting.iter().all(|a| *a)
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph \"{name}\" {{");
        let _ = writeln!(s, "  rankdir=LR;\n  init [shape=point];");
        for q in 0..self.num_states() {
            let shape = if self.accepting[q] { "doublecircle" } else { "circle" };
            let _ = writeln!(s, "  q{q} [shape={shape}];");
        }
        let _ = writeln!(s, "  init -> q{};", self.initial);
        for q in 0..self.num_states() {
            let mut grouped: Vec<(StateId, Vec<Letter>)> = Vec::new();
            for &(a, t) in &self.edges[q] {
                match grouped.iter_mut().find(|(x, _)| *x == t) {
                    Some((_, v)) => v.push(a),
                    None => grouped.push((t, vec![a])),
                }
            }
            for (t, letters) in grouped {
                let label = if letters.len() == self.alphabet.size() {
                    "*".to_string()
                } else {
                    letters
                        .iter()
                        .map(|a| self.alphabet.letter_label(*a))
                        .collect::<Vec<_>>()
                        .join("\\n")
                };
                let label = label.replace('"', "\\\"");
                let _ = writeln!(s, "  q{q} -> q{t} [label=\"{label}\"];");
            }
        }
        s.push_str("}\n");
        s
    }

    /// Follow `witness` through the transition structure and check it forms
    /// an accepting lasso.
    pub fn replays(&self, witness: &LassoWitness) -> bool {
        let step_ok = |states: &[StateId], letters: &[Letter]| {
            states.len() == letters.len() + 1
                && letters.iter().enumerate().all(|(i, a)| {
                    self.successors(states[i], *a).any(|t| t == states[i + 1])
                })
        };
        !witness.cycle.is_empty()
            && witness.stem_states.first() == Some(&self.initial)
            && witness.stem_states.last() == witness.cycle_states.first()
            && witness.cycle_states.first() == witness.cycle_states.last()
            && step_ok(&witness.stem_states, &witness.stem)
            && step_ok(&witness.cycle_states, &witness.cycle)
            && witness.cycle_states.iter().any(|q| self.accepting[*q as usize])
    }
}

/// Intersection. Uses the plain product when one side accepts on every
/// state, otherwise the two-phase flag construction.
pub fn nba_product(a: &Nba, b: &Nba) -> Result<Nba, AutomatonError> {
    nba_product_limited(a, b, &Limits::default())
}

pub fn nba_product_limited(a: &Nba, b: &Nba, limits: &Limits) -> Result<Nba, AutomatonError> {
    if a.alphabet != b.alphabet {
        return Err(AutomatonError::AlphabetMismatch);
    }
    let simple = a.all_accepting() || b.all_accepting();
    let mut builder = NbaBuilder::new(a.alphabet.clone());
    let mut ids: HashMap<(StateId, StateId, u8), StateId> = HashMap::new();
    let mut queue = VecDeque::new();
    let acc_of = |p: StateId, q: StateId, phase: u8| {
        if simple {
            a.is_accepting(p) && b.is_accepting(q)
        } else {
            phase == 1 && b.is_accepting(q)
        }
    };
    let init = (a.initial, b.initial, 0u8);
    let id = builder.add_state(acc_of(init.0, init.1, 0));
    ids.insert(init, id);
    queue.push_back(init);
    while let Some((p, q, phase)) = queue.pop_front() {
        let from = ids[&(p, q, phase)];
        // phase 0 waits for an accepting state of `a`, phase 1 for one of `b`
        let next_phase = if simple {
            0
        } else if phase == 0 {
            a.is_accepting(p) as u8
        } else {
            (!b.is_accepting(q)) as u8
        };
        for &(letter, p2) in a.edges(p) {
            for q2 in b.successors(q, letter) {
                let key = (p2, q2, next_phase);
                let to = match ids.get(&key) {
                    Some(&t) => t,
                    None => {
                        let t = builder.add_state(acc_of(p2, q2, next_phase));
                        limits.check("product", builder.num_states())?;
                        ids.insert(key, t);
                        queue.push_back(key);
                        t
                    }
                };
                builder.add_edge(from, letter, to);
            }
        }
    }
    Ok(builder.build(id))
}

/// Existential projection of a `2^AP` automaton onto `2^I`.
pub fn project_inputs(a: &Nba) -> Nba {
    assert_eq!(a.alphabet.kind, AlphabetKind::Concrete, "projection needs a 2^AP alphabet");
    let alphabet = Alphabet::input(&a.alphabet.partition);
    let mask = a.alphabet.partition.input_mask();
    let mut b = NbaBuilder::new(alphabet);
    for &acc in &a.accepting {
        b.add_state(acc);
    }
    for q in 0..a.num_states() {
        for &(l, t) in &a.edges[q] {
            b.add_edge(q as StateId, l & mask, t);
        }
    }
    b.build(a.initial)
}

/// Search for an accepting lasso; `None` iff the language is empty.
pub fn nba_emptiness(a: &Nba) -> Option<LassoWitness> {
    let n = a.num_states();
    let (comp, _) = strongly_connected_components(n, &[a.initial as usize], |v| a.targets(v));
    // BFS from the initial state gives shortest stems
    let mut parent: Vec<Option<(StateId, Letter)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut order = vec![a.initial];
    seen[a.initial as usize] = true;
    let mut head = 0;
    while head < order.len() {
        let q = order[head];
        head += 1;
        for &(l, t) in a.edges(q) {
            if !seen[t as usize] {
                seen[t as usize] = true;
                parent[t as usize] = Some((q, l));
                order.push(t);
            }
        }
    }
    let target = order.iter().copied().find(|&q| {
        a.is_accepting(q) && a.edges(q).iter().any(|(_, t)| comp[*t as usize] == comp[q as usize])
    })?;
    let mut stem = Vec::new();
    let mut stem_states = vec![target];
    let mut cur = target;
    while let Some((p, l)) = parent[cur as usize] {
        stem.push(l);
        stem_states.push(p);
        cur = p;
    }
    stem.reverse();
    stem_states.reverse();
    // shortest cycle through `target` inside its component
    let c = comp[target as usize];
    let mut back: HashMap<StateId, (StateId, Letter)> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut closing = None;
    for &(l, t) in a.edges(target) {
        if comp[t as usize] != c {
            continue;
        }
        if t == target {
            closing = Some((target, l));
            break;
        }
        if let std::collections::hash_map::Entry::Vacant(e) = back.entry(t) {
            e.insert((target, l));
            queue.push_back(t);
        }
    }
    while closing.is_none() {
        let q = queue.pop_front().expect("component of target has a cycle");
        for &(l, t) in a.edges(q) {
            if comp[t as usize] != c {
                continue;
            }
            if t == target {
                closing = Some((q, l));
                break;
            }
            if let std::collections::hash_map::Entry::Vacant(e) = back.entry(t) {
                e.insert((q, l));
                queue.push_back(t);
            }
        }
    }
    let (last, l) = closing.unwrap();
    let mut cycle = vec![l];
    let mut cycle_states = vec![target, last];
    let mut cur = last;
    while cur != target {
        let (p, l) = back[&cur];
        cycle.push(l);
        cycle_states.push(p);
        cur = p;
    }
    cycle.reverse();
    cycle_states.reverse();
    Some(LassoWitness { stem, cycle, stem_states, cycle_states })
}

/// Automaton accepting exactly the single word denoted by `w`.
pub fn word_automaton(alphabet: Alphabet, w: &Lasso<Letter>) -> Nba {
    let mut b = NbaBuilder::new(alphabet);
    for _ in 0..w.len() {
        b.add_state(true);
    }
    for pos in 0..w.len() {
        b.add_edge(pos as StateId, *w.at(pos), w.succ(pos) as StateId);
    }
    b.build(0)
}

/// Whether `a` accepts the word denoted by `w`.
pub fn nba_membership(a: &Nba, w: &Lasso<Letter>) -> Result<bool, AutomatonError> {
    if w.stem.iter().chain(&w.cycle).any(|l| *l as usize >= a.alphabet.size()) {
        return Err(AutomatonError::AlphabetMismatch);
    }
    let word = word_automaton(a.alphabet.clone(), w);
    Ok(nba_emptiness(&nba_product(a, &word)?).is_some())
}
