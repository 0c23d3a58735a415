//! Automata for the complement of the minimal satisfying language and for
//! the per-position input conditions used by membership.
//!
//! An open word `w` lies outside `min(f)` iff one of the following holds:
//!
//! * no model has input `w_I` (N2, via the complement of the input
//!   projection);
//! * some position fixes an output to `b` although a model with input `w_I`
//!   has `!b` there (N2, a guessed position followed by a model run);
//! * some position leaves an output open although one of the two values
//!   has no model with input `w_I` (N1, a guessed position followed by a
//!   complement run from the matching successor set).

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use crate::automata::{
    nba_complement_limited, nba_product_limited, project_inputs, Alphabet, AutomatonError,
    BitSet, ComplementBuilder, Letter, Limits, Nba, NbaBuilder, StateId,
};
use crate::ltl::{Formula, Partition, Prop};
use crate::oracle::Oracle;
use crate::threeval::{OpenLetterIndex, TruthValue3};

/// The automata shared by every construction for one formula.
#[derive(Debug, Clone)]
pub struct SpecAutomata {
    oracle: Oracle,
    /// Input projection of the formula automaton; same state numbering.
    projected: Nba,
}

impl SpecAutomata {
    pub fn new(formula: &Formula, partition: &Arc<Partition>) -> Self {
        let oracle = Oracle::new(formula, partition);
        let projected = project_inputs(oracle.nba());
        SpecAutomata { oracle, projected }
    }

    pub fn partition(&self) -> &Arc<Partition> {
        self.oracle.partition()
    }

    pub fn formula(&self) -> &Formula {
        self.oracle.formula()
    }

    pub fn oracle(&self) -> &Oracle {
        &self.oracle
    }

    /// Büchi automaton of the formula over `2^AP`.
    pub fn nba(&self) -> &Nba {
        self.oracle.nba()
    }

    /// Input words having at least one model.
    pub fn projected(&self) -> &Nba {
        &self.projected
    }

    /// Successors of `y` in the formula automaton over the concrete letters
    /// with input `input` whose outputs satisfy `keep`.
    pub fn post_filtered(&self, y: &BitSet, input: u32, keep: impl Fn(u32) -> bool) -> BitSet {
        let g = self.nba();
        let part = self.partition();
        let mut out = BitSet::new(g.num_states());
        for o in 0..1u32 << part.num_outputs() {
            if !keep(o) {
                continue;
            }
            let l = part.join(input, o);
            for q in y.iter() {
                for t in g.successors(q as StateId, l) {
                    out.insert(t as usize);
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
struct Parts {
    n1: bool,
    n2: bool,
}

/// Words with some open position that should be fixed, or with an input
/// that has no model.
pub fn build_n1(spec: &SpecAutomata, limits: &Limits) -> Result<Nba, AutomatonError> {
    build(spec, Parts { n1: true, n2: false }, limits)
}

/// Words with some fixed position that should be open or flipped, or with
/// an input that has no model.
pub fn build_n2(spec: &SpecAutomata, limits: &Limits) -> Result<Nba, AutomatonError> {
    build(spec, Parts { n1: false, n2: true }, limits)
}

/// Büchi automaton over open letters for the complement of `min(f)`.
pub fn build_complement_min(spec: &SpecAutomata, limits: &Limits) -> Result<Nba, AutomatonError> {
    build(spec, Parts { n1: true, n2: true }, limits)
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Guess {
    /// before the guessed position; `(state, flag)` of the fixed-value check
    Model(StateId, bool),
    /// N1 tracking the reachable set before the guessed open position
    Subset(BitSet),
}

fn build(spec: &SpecAutomata, parts: Parts, limits: &Limits) -> Result<Nba, AutomatonError> {
    let part = spec.partition();
    let alphabet = Alphabet::open(part);
    let idx = OpenLetterIndex::new(part);
    let n_open = alphabet.size() as Letter;
    let g = spec.nba();
    let cb = ComplementBuilder::new(spec.projected(), limits)?;
    let mut emb = cb.embed(|x| Some(idx.input_of(x)));
    let mut b = NbaBuilder::new(alphabet);
    let n_out = part.num_outputs();
    let q0 = BitSet::singleton(g.num_states(), g.initial() as usize);

    let mut ids: HashMap<Guess, StateId> = HashMap::new();
    let mut queue: VecDeque<Guess> = VecDeque::new();
    let mut roots: Vec<StateId> = vec![emb.track(&mut b, q0.clone())];
    let intern = |b: &mut NbaBuilder, s: Guess, ids: &mut HashMap<Guess, StateId>, queue: &mut VecDeque<Guess>| {
        *ids.entry(s.clone()).or_insert_with(|| {
            let acc = matches!(s, Guess::Model(q, true) if g.is_accepting(q));
            queue.push_back(s);
            b.add_state(acc)
        })
    };
    if parts.n2 && n_out > 0 {
        roots.push(intern(&mut b, Guess::Model(g.initial(), false), &mut ids, &mut queue));
    }
    if parts.n1 && n_out > 0 {
        roots.push(intern(&mut b, Guess::Subset(q0), &mut ids, &mut queue));
    }
    while let Some(s) = queue.pop_front() {
        let from = ids[&s];
        for x in 0..n_open {
            let input = idx.input_of(x);
            let value = |j: usize| idx.output_of(x, j);
            match &s {
                Guess::Model(q, flag) => {
                    for o in 0..1u32 << n_out {
                        let l = part.join(input, o);
                        // the flag is raised on a letter whose fixed output
                        // is contradicted by the model letter
                        let contradicts = (0..n_out).any(|j| {
                            value(j) == TruthValue3::from_bool(o >> j & 1 == 0)
                        });
                        for t in g.successors(*q, l) {
                            let to = intern(&mut b, Guess::Model(t, *flag), &mut ids, &mut queue);
                            b.add_edge(from, x, to);
                            if !*flag && contradicts {
                                let to = intern(&mut b, Guess::Model(t, true), &mut ids, &mut queue);
                                b.add_edge(from, x, to);
                            }
                        }
                    }
                }
                Guess::Subset(y) => {
                    let next = spec.post_filtered(y, input, |_| true);
                    let to = intern(&mut b, Guess::Subset(next), &mut ids, &mut queue);
                    b.add_edge(from, x, to);
                    for j in (0..n_out).filter(|&j| value(j) == TruthValue3::Open) {
                        for val in [false, true] {
                            let succ = spec.post_filtered(y, input, |o| (o >> j & 1 == 1) == val);
                            let to = emb.track(&mut b, succ);
                            b.add_edge(from, x, to);
                        }
                    }
                }
            }
            limits.check("complement of the minimal language", b.num_states())?;
        }
    }
    emb.finish(&mut b, limits)?;
    let init = b.add_state(false);
    let snapshot = b.build(init);
    let mut b = NbaBuilder::new(snapshot.alphabet().clone());
    for q in 0..snapshot.num_states() as StateId {
        b.add_state(snapshot.is_accepting(q));
    }
    for q in 0..snapshot.num_states() as StateId {
        for &(x, t) in snapshot.edges(q) {
            b.add_edge(q, x, t);
            if roots.contains(&q) {
                b.add_edge(init, x, t);
            }
        }
    }
    Ok(b.build(init).reduce())
}

/// Inputs `ς` having a model whose output `p` at position `i` is `value`.
pub fn exists_lang(spec: &SpecAutomata, i: usize, p: Prop, value: bool) -> Nba {
    let at = spec.oracle().at_pos_automaton(i, p, value);
    let prod = nba_product_limited(spec.nba(), &at, &Limits::default()).expect("same alphabet");
    project_inputs(&prod).trim()
}

/// Inputs having a model, all of whose models have `value` at `(i, p)`.
pub fn forced_lang(
    spec: &SpecAutomata,
    i: usize,
    p: Prop,
    value: bool,
    limits: &Limits,
) -> Result<Nba, AutomatonError> {
    let other = nba_complement_limited(&exists_lang(spec, i, p, !value), limits)?;
    Ok(nba_product_limited(spec.projected(), &other, limits)?.trim())
}
