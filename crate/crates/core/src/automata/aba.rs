use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use super::{Alphabet, AutomatonError, Letter, Limits, Nba, NbaBuilder, StateId};
use crate::ltl::{Formula, Partition};

/// Positive boolean formula over states in disjunctive normal form.
/// `[]` is false, `[[]]` is true. Cubes are sorted and no cube contains
/// another.
pub type Dnf = Vec<Vec<StateId>>;

fn dnf_true() -> Dnf {
    vec![Vec::new()]
}

fn minimize(mut d: Dnf) -> Dnf {
    for c in &mut d {
        c.sort_unstable();
        c.dedup();
    }
    d.sort_by_key(|c| c.len());
    d.dedup();
    let mut out: Dnf = Vec::new();
    for c in d {
        if !out.iter().any(|o| o.iter().all(|x| c.binary_search(x).is_ok())) {
            out.push(c);
        }
    }
    out
}

fn dnf_or(mut a: Dnf, b: Dnf) -> Dnf {
    a.extend(b);
    minimize(a)
}

fn dnf_and(a: &Dnf, b: &Dnf) -> Dnf {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            let mut c = x.clone();
            c.extend_from_slice(y);
            out.push(c);
        }
    }
    minimize(out)
}

/// Alternating Büchi automaton over `2^AP` with states labelled by
/// formulas. Acceptance: every infinite branch visits `F` infinitely often.
#[derive(Debug, Clone)]
pub struct Aba {
    alphabet: Alphabet,
    states: Vec<Formula>,
    accepting: Vec<bool>,
    /// `delta[q][letter]`
    delta: Vec<Vec<Dnf>>,
    initial: StateId,
}

impl Aba {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting[q as usize]
    }

    pub fn state_formula(&self, q: StateId) -> &Formula {
        &self.states[q as usize]
    }

    pub fn delta(&self, q: StateId, letter: Letter) -> &Dnf {
        &self.delta[q as usize][letter as usize]
    }

    /// Whether every transition is a single conjunction-free choice, i.e.
    /// the automaton is already nondeterministic.
    pub fn is_nondeterministic(&self) -> bool {
        self.delta.iter().flatten().flatten().all(|c| c.len() <= 1)
    }
}

struct AbaBuilder<'a> {
    partition: &'a Partition,
    ids: HashMap<Formula, StateId>,
    states: Vec<Formula>,
}

impl AbaBuilder<'_> {
    fn intern(&mut self, f: &Formula) -> StateId {
        if let Some(&q) = self.ids.get(f) {
            return q;
        }
        let q = self.states.len() as StateId;
        self.ids.insert(f.clone(), q);
        self.states.push(f.clone());
        q
    }

    fn collect(&mut self, f: &Formula) {
        use Formula::*;
        match f {
            True | False | Atom(_) | Not(_) => {}
            And(a, b) | Or(a, b) => {
                self.collect(a);
                self.collect(b);
            }
            Next(g) => {
                self.intern(g);
                self.collect(g);
            }
            Until(a, b) | Release(a, b) => {
                self.intern(f);
                self.collect(a);
                self.collect(b);
            }
            Implies(..) | Eventually(_) | Globally(_) => unreachable!("checked NNF"),
        }
    }

    fn holds(&self, f: &Formula, letter: Letter) -> bool {
        match f {
            Formula::Atom(p) => {
                let bit = self.partition.ap_bit(*p);
                letter >> bit & 1 == 1
            }
            _ => unreachable!(),
        }
    }

    fn step(&self, f: &Formula, letter: Letter) -> Dnf {
        use Formula::*;
        match f {
            True => dnf_true(),
            False => Vec::new(),
            Atom(_) => {
                if self.holds(f, letter) {
                    dnf_true()
                } else {
                    Vec::new()
                }
            }
            Not(g) => {
                if self.holds(g, letter) {
                    Vec::new()
                } else {
                    dnf_true()
                }
            }
            And(a, b) => dnf_and(&self.step(a, letter), &self.step(b, letter)),
            Or(a, b) => dnf_or(self.step(a, letter), self.step(b, letter)),
            Next(g) => match **g {
                True => dnf_true(),
                False => Vec::new(),
                _ => vec![vec![self.ids[&**g]]],
            },
            Until(a, b) => {
                let me = vec![vec![self.ids[f]]];
                dnf_or(self.step(b, letter), dnf_and(&self.step(a, letter), &me))
            }
            Release(a, b) => {
                let me = vec![vec![self.ids[f]]];
                dnf_and(&self.step(b, letter), &dnf_or(self.step(a, letter), me))
            }
            Implies(..) | Eventually(_) | Globally(_) => unreachable!("checked NNF"),
        }
    }
}

/// Standard translation of an NNF formula into a very weak alternating
/// automaton. States are the formula itself plus its `X`-arguments and
/// `U`/`R` subformulas; the `R` states accept.
pub fn ltl_to_aba(f: &Formula, partition: &Arc<Partition>) -> Result<Aba, AutomatonError> {
    if !f.is_nnf() {
        return Err(AutomatonError::NotNnf);
    }
    let mut b = AbaBuilder { partition, ids: HashMap::new(), states: Vec::new() };
    let initial = b.intern(f);
    b.collect(f);
    let alphabet = Alphabet::concrete(partition);
    let n_letters = alphabet.size() as Letter;
    let delta = b
        .states
        .iter()
        .map(|s| (0..n_letters).map(|a| b.step(s, a)).collect())
        .collect();
    let accepting = b.states.iter().map(|s| matches!(s, Formula::Release(..))).collect();
    Ok(Aba { alphabet, states: b.states, accepting, delta, initial })
}

type MhState = (Vec<StateId>, Vec<StateId>);

/// Miyano–Hayashi breakpoint construction, trimmed.
pub fn aba_to_nba(a: &Aba) -> Nba {
    aba_to_nba_limited(a, &Limits::default()).expect("default limits")
}

pub fn aba_to_nba_limited(a: &Aba, limits: &Limits) -> Result<Nba, AutomatonError> {
    let mut builder = NbaBuilder::new(a.alphabet.clone());
    let mut ids: HashMap<MhState, StateId> = HashMap::new();
    let mut queue = VecDeque::new();
    let init: MhState = (vec![a.initial], Vec::new());
    let q0 = builder.add_state(true);
    ids.insert(init.clone(), q0);
    queue.push_back(init);
    let n_letters = a.alphabet.size() as Letter;
    while let Some((s, o)) = queue.pop_front() {
        let from = ids[&(s.clone(), o.clone())];
        for letter in 0..n_letters {
            for succ in mh_successors(a, &s, &o, letter) {
                let to = match ids.get(&succ) {
                    Some(&t) => t,
                    None => {
                        let t = builder.add_state(succ.1.is_empty());
                        limits.check("alternation removal", builder.num_states())?;
                        ids.insert(succ.clone(), t);
                        queue.push_back(succ);
                        t
                    }
                };
                builder.add_edge(from, letter, to);
            }
        }
    }
    Ok(builder.build(q0).reduce())
}

fn mh_successors(a: &Aba, s: &[StateId], o: &[StateId], letter: Letter) -> Vec<MhState> {
    let choices: Vec<&Dnf> = s.iter().map(|&q| a.delta(q, letter)).collect();
    if choices.iter().any(|d| d.is_empty()) {
        return Vec::new();
    }
    let mut found: HashSet<MhState> = HashSet::new();
    let mut pick = vec![0usize; s.len()];
    loop {
        let mut s2: Vec<StateId> = Vec::new();
        let mut o2: Vec<StateId> = Vec::new();
        for (k, &q) in s.iter().enumerate() {
            let cube = &choices[k][pick[k]];
            s2.extend_from_slice(cube);
            if o.binary_search(&q).is_ok() {
                o2.extend_from_slice(cube);
            }
        }
        s2.sort_unstable();
        s2.dedup();
        if o.is_empty() {
            o2 = s2.clone();
        }
        o2.retain(|q| !a.is_accepting(*q));
        o2.sort_unstable();
        o2.dedup();
        found.insert((s2, o2));
        // odometer over cube choices
        let mut k = 0;
        loop {
            if k == pick.len() {
                return prune_dominated(found);
            }
            pick[k] += 1;
            if pick[k] < choices[k].len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
    }
}

fn is_subset(a: &[StateId], b: &[StateId]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

/// Drop successors that carry strictly more obligations than another.
fn prune_dominated(found: HashSet<MhState>) -> Vec<MhState> {
    let mut all: Vec<MhState> = found.into_iter().collect();
    all.sort();
    let keep: Vec<bool> = all
        .iter()
        .map(|x| {
            !all.iter().any(|y| y != x && is_subset(&y.0, &x.0) && is_subset(&y.1, &x.1))
        })
        .collect();
    all.into_iter().zip(keep).filter(|(_, k)| *k).map(|(x, _)| x).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{nba_emptiness, nba_membership};
    use crate::ltl::{parse, to_nnf};
    use crate::threeval::Lasso;

    fn setup(text: &str) -> (Aba, Nba) {
        let p = Arc::new(Partition::new(&["r"], &["p", "q"]).unwrap());
        let f = to_nnf(&parse(text, &p).unwrap());
        let aba = ltl_to_aba(&f, &p).unwrap();
        let nba = aba_to_nba(&aba);
        (aba, nba)
    }

    // letters: bit0 = r, bit1 = p, bit2 = q
    const P: u32 = 2;
    const Q: u32 = 4;

    #[test]
    fn next_p() {
        let (aba, nba) = setup("X p");
        assert!(aba.num_states() <= 3);
        assert!(nba_membership(&nba, &Lasso::new(vec![0, P], vec![0])).unwrap());
        assert!(!nba_membership(&nba, &Lasso::new(vec![P, 0], vec![P])).unwrap());
    }

    #[test]
    fn globally_and_eventually() {
        let (_, nba) = setup("G p & F q");
        assert!(nba_membership(&nba, &Lasso::new(vec![P], vec![P | Q])).unwrap());
        assert!(!nba_membership(&nba, &Lasso::new(vec![], vec![P])).unwrap());
        assert!(!nba_membership(&nba, &Lasso::new(vec![P | Q], vec![0])).unwrap());
    }

    #[test]
    fn constants() {
        let (_, t) = setup("true");
        assert!(nba_membership(&t, &Lasso::new(vec![], vec![3])).unwrap());
        let (_, f) = setup("false");
        assert!(nba_emptiness(&f).is_none());
    }

    #[test]
    fn rejects_non_nnf() {
        let p = Arc::new(Partition::new(&["r"], &["p"]).unwrap());
        let f = parse("G p", &p).unwrap();
        assert_eq!(ltl_to_aba(&f, &p).unwrap_err(), AutomatonError::NotNnf);
    }

    #[test]
    fn dnf_minimization() {
        assert_eq!(minimize(vec![vec![1, 2], vec![1], vec![2, 1]]), vec![vec![1]]);
        assert_eq!(dnf_and(&dnf_true(), &vec![vec![3]]), vec![vec![3]]);
        assert!(dnf_and(&Vec::new(), &dnf_true()).is_empty());
    }
}
