use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use super::{
    aba_to_nba, ltl_to_aba, nba_membership, AutomatonError, BitSet, Letter, Limits,
    Nba, NbaBuilder, StateId, TransitionMonoid,
};
use crate::ltl::{to_nnf, Formula, Partition};
use crate::threeval::Lasso;

/// Nondeterministic Büchi automaton for `f` over `2^AP`.
pub fn ltl_to_nba(f: &Formula, partition: &Arc<Partition>) -> Nba {
    let aba = ltl_to_aba(&to_nnf(f), partition).expect("NNF by construction");
    aba_to_nba(&aba)
}

/// Universal co-Büchi automaton, stored as its dual: the NBA with the same
/// transition structure reading the complement language. A word is
/// accepted iff every run visits the rejecting states finitely often, i.e.
/// iff the dual NBA has no accepting run.
#[derive(Debug, Clone)]
pub struct Ucw {
    pub dual: Nba,
}

impl Ucw {
    pub fn accepts(&self, w: &Lasso<Letter>) -> Result<bool, AutomatonError> {
        Ok(!nba_membership(&self.dual, w)?)
    }

    /// Universal projection: accepts input words all of whose output
    /// completions are accepted.
    pub fn project_inputs(&self) -> Ucw {
        Ucw { dual: super::project_inputs(&self.dual) }
    }

    /// Equivalent NBA, by complementing the dual.
    pub fn to_nba(&self, limits: &Limits) -> Result<Nba, AutomatonError> {
        nba_complement_limited(&self.dual, limits)
    }
}

/// UCW for `f`, built from the NBA of `!f`.
pub fn ltl_to_ucw(f: &Formula, partition: &Arc<Partition>) -> Ucw {
    Ucw { dual: ltl_to_nba(&Formula::not(f.clone()), partition) }
}

pub fn nba_complement(a: &Nba) -> Result<Nba, AutomatonError> {
    nba_complement_limited(a, &Limits::default())
}

pub fn nba_complement_limited(a: &Nba, limits: &Limits) -> Result<Nba, AutomatonError> {
    let base = a.trim();
    let cb = ComplementBuilder::new(&base, limits)?;
    let mut b = NbaBuilder::new(base.alphabet().clone());
    let mut emb = cb.embed(Some);
    let init = emb.track(&mut b, BitSet::singleton(base.num_states(), base.initial() as usize));
    emb.finish(&mut b, limits)?;
    Ok(b.build(init).reduce())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum CState {
    Track(BitSet),
    /// Idempotent `e`, class of the current partial block (`None` = a block
    /// just ended).
    Loop(u32, Option<u32>),
}

/// Ramsey-based complementation of a base NBA, able to embed complement
/// states into a larger automaton whose letters project onto base letters.
///
/// A word is rejected by the base iff it splits as `u·v1·v2⋯` where all `vk`
/// share one idempotent class `e` and no state reached by `u` lies in
/// `acc(e)`. `Track(Y)` follows `u` deterministically; `Loop` guesses the
/// blocks.
pub struct ComplementBuilder<'a> {
    base: &'a Nba,
    monoid: TransitionMonoid,
}

impl<'a> ComplementBuilder<'a> {
    pub fn new(base: &'a Nba, limits: &Limits) -> Result<Self, AutomatonError> {
        Ok(ComplementBuilder { base, monoid: TransitionMonoid::new(base, limits)? })
    }

    pub fn base(&self) -> &Nba {
        self.base
    }

    pub fn monoid(&self) -> &TransitionMonoid {
        &self.monoid
    }

    /// Successor set of `y` in the base on letter `l`.
    pub fn post(&self, y: &BitSet, l: Letter) -> BitSet {
        self.monoid.image(y, self.monoid.of_letter(l))
    }

    /// Whether the base accepts some word from some state of `y`,
    /// restricted to words of the form `witness(s)·witness(e)^ω`. Ranging
    /// over all `(s, e)` this decides non-emptiness from `y`.
    pub fn rejects_all_from(&self, y: &BitSet) -> bool {
        self.monoid.idempotents().iter().all(|&e| {
            !self.monoid.acc(e).intersects(y)
                && (0..self.monoid.len() as u32)
                    .all(|s| !self.monoid.acc(e).intersects(&self.monoid.image(y, s)))
        })
    }

    /// Start embedding into an automaton over letters `x` with base letter
    /// `map(x)`; `None` means the letter blocks.
    pub fn embed<F: Fn(Letter) -> Option<Letter>>(&'a self, map: F) -> Embedding<'a, F> {
        Embedding { cb: self, map, ids: HashMap::new(), pending: VecDeque::new() }
    }
}

pub struct Embedding<'a, F> {
    cb: &'a ComplementBuilder<'a>,
    map: F,
    ids: HashMap<CState, StateId>,
    pending: VecDeque<CState>,
}

impl<F: Fn(Letter) -> Option<Letter>> Embedding<'_, F> {
    fn state(&mut self, b: &mut NbaBuilder, s: CState) -> StateId {
        if let Some(&id) = self.ids.get(&s) {
            return id;
        }
        let id = b.add_state(matches!(s, CState::Loop(_, None)));
        self.ids.insert(s.clone(), id);
        self.pending.push_back(s);
        id
    }

    /// Complement state accepting the suffixes rejected from every state of
    /// `y`.
    pub fn track(&mut self, b: &mut NbaBuilder, y: BitSet) -> StateId {
        self.state(b, CState::Track(y))
    }

    /// Add transitions for all pending states over every outer letter.
    pub fn finish(&mut self, b: &mut NbaBuilder, limits: &Limits) -> Result<(), AutomatonError> {
        let m = &self.cb.monoid;
        let n_outer = b.alphabet().size() as Letter;
        while let Some(s) = self.pending.pop_front() {
            let from = self.ids[&s];
            for x in 0..n_outer {
                let Some(a) = (self.map)(x) else { continue };
                let ea = m.of_letter(a);
                let mut targets = Vec::new();
                match &s {
                    CState::Track(y) => {
                        targets.push(CState::Track(self.cb.post(y, a)));
                        for &e in m.idempotents() {
                            if !m.acc(e).intersects(y) {
                                targets.push(CState::Loop(e, Some(ea)));
                                if ea == e {
                                    targets.push(CState::Loop(e, None));
                                }
                            }
                        }
                    }
                    CState::Loop(e, t) => {
                        let t2 = match t {
                            Some(t) => m.mul_letter(*t, a),
                            None => ea,
                        };
                        targets.push(CState::Loop(*e, Some(t2)));
                        if t2 == *e {
                            targets.push(CState::Loop(*e, None));
                        }
                    }
                }
                for t in targets {
                    let to = self.state(b, t);
                    b.add_edge(from, x, to);
                }
            }
            limits.check("complementation", b.num_states())?;
        }
        Ok(())
    }
}
