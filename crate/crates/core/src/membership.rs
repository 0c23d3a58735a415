//! Bad-prefix membership for `min(f)`.
//!
//! Whether an input suffix can complete a run from a state of the formula
//! automaton depends only on the set of states it can be accepted from.
//! Those sets ("suffix types") are finitely many and computed once from the
//! transition monoid of the input projection. A finite open word is not bad
//! iff for some suffix type the word's input admits a model and the values
//! the models allow at every position agree with the word.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::automata::{
    nba_emptiness, nba_product_limited, Alphabet, AutomatonError, BitSet, Limits, Nba, NbaBuilder,
    StateId, TransitionMonoid,
};
use crate::ltl::{Partition, Prop};
use crate::minlang::{exists_lang, forced_lang, SpecAutomata};
use crate::oracle::{ForcedStatus, MinTrace};
use crate::threeval::{InputLasso, Lasso, OpenLasso, OpenLetter, RawLetter, TruthValue3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BadReason {
    pub position: usize,
    pub prop: Prop,
    pub expected: ForcedStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BadPrefixVerdict {
    pub is_bad: bool,
    pub reason: Option<BadReason>,
}

impl BadPrefixVerdict {
    fn good() -> Self {
        BadPrefixVerdict { is_bad: false, reason: None }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MembershipError {
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error("no bad prefix found within {scanned} letters; the word looks like a member")]
    NotActuallyBad { scanned: usize },
}

#[derive(Debug, Clone)]
struct SuffixType {
    /// States of the formula automaton accepting the suffix.
    states: BitSet,
    /// The suffix is `prefix · witness(idempotent)^ω`.
    prefix: Vec<u32>,
    idempotent: u32,
}

/// Membership teacher for one formula.
#[derive(Debug, Clone)]
pub struct Membership {
    spec: Arc<SpecAutomata>,
    monoid: TransitionMonoid,
    types: Vec<SuffixType>,
}

impl Membership {
    pub fn new(spec: Arc<SpecAutomata>, limits: &Limits) -> Result<Self, AutomatonError> {
        let p = spec.projected();
        let monoid = TransitionMonoid::new(p, limits)?;
        let n_inputs = 1u32 << spec.partition().num_inputs();
        let mut seen: HashMap<BitSet, usize> = HashMap::new();
        let mut types: Vec<SuffixType> = Vec::new();
        let mut queue = VecDeque::new();
        for &e in monoid.idempotents() {
            let acc = monoid.acc(e).clone();
            if !seen.contains_key(&acc) {
                seen.insert(acc.clone(), types.len());
                types.push(SuffixType { states: acc, prefix: Vec::new(), idempotent: e });
                queue.push_back(types.len() - 1);
            }
        }
        while let Some(k) = queue.pop_front() {
            for a in 0..n_inputs {
                let pre = pre_image(p, &types[k].states, a);
                if !seen.contains_key(&pre) {
                    let mut prefix = vec![a];
                    prefix.extend_from_slice(&types[k].prefix);
                    seen.insert(pre.clone(), types.len());
                    types.push(SuffixType { states: pre, prefix, idempotent: types[k].idempotent });
                    limits.check("suffix types", types.len())?;
                    queue.push_back(types.len() - 1);
                }
            }
        }
        Ok(Membership { spec, monoid, types })
    }

    pub fn spec(&self) -> &Arc<SpecAutomata> {
        &self.spec
    }

    pub fn partition(&self) -> &Arc<Partition> {
        self.spec.partition()
    }

    /// Number of distinct suffix types.
    pub fn num_types(&self) -> usize {
        self.types.len()
    }

    fn suffix_lasso(&self, t: &SuffixType) -> InputLasso {
        Lasso::new(t.prefix.clone(), self.monoid.witness(t.idempotent).to_vec())
    }

    /// Letters with an open input can never occur in `min(f)`.
    pub fn is_bad_raw(&self, w: &[RawLetter]) -> BadPrefixVerdict {
        match w.iter().map(RawLetter::to_open).collect::<Option<Vec<_>>>() {
            Some(open) => self.is_bad_prefix(&open),
            None => BadPrefixVerdict { is_bad: true, reason: None },
        }
    }

    pub fn is_bad_prefix(&self, w: &[OpenLetter]) -> BadPrefixVerdict {
        let mut first_mismatch: Option<Option<BadReason>> = None;
        for t in &self.types {
            match self.check_type(w, &t.states) {
                TypeCheck::Infeasible => {}
                TypeCheck::Match => return BadPrefixVerdict::good(),
                TypeCheck::Mismatch(r) => {
                    first_mismatch = Some(match first_mismatch {
                        None => Some(r),
                        Some(Some(prev)) if prev == r => Some(r),
                        Some(_) => None,
                    });
                }
            }
        }
        BadPrefixVerdict { is_bad: true, reason: first_mismatch.flatten() }
    }

    /// For a word that is not bad, an input lasso extending its input whose
    /// minimal satisfying sequence starts with the word.
    pub fn witness_extension(&self, w: &[OpenLetter]) -> Option<InputLasso> {
        let t = self.types.iter().find(|t| matches!(self.check_type(w, &t.states), TypeCheck::Match))?;
        let suffix = self.suffix_lasso(t);
        let mut stem: Vec<u32> = w.iter().map(OpenLetter::input_mask).collect();
        stem.extend_from_slice(&suffix.stem);
        Some(Lasso::new(stem, suffix.cycle))
    }

    fn check_type(&self, w: &[OpenLetter], target: &BitSet) -> TypeCheck {
        let g = self.spec.nba();
        let p = self.spec.projected();
        let part = self.spec.partition();
        let n_out = part.num_outputs();
        let k = w.len();
        let mut back = vec![target.clone(); k + 1];
        for j in (0..k).rev() {
            back[j] = pre_image(p, &back[j + 1], w[j].input_mask());
        }
        if !back[0].contains(g.initial() as usize) {
            return TypeCheck::Infeasible;
        }
        let mut fwd = BitSet::singleton(g.num_states(), g.initial() as usize);
        for (j, letter) in w.iter().enumerate() {
            let input = letter.input_mask();
            let mut possible = vec![[false; 2]; n_out];
            let mut next = BitSet::new(g.num_states());
            for q in fwd.iter().filter(|q| back[j].contains(*q)) {
                for o in 0..1u32 << n_out {
                    let l = part.join(input, o);
                    for t in g.successors(q as StateId, l) {
                        if back[j + 1].contains(t as usize) {
                            next.insert(t as usize);
                            for (jj, slot) in possible.iter_mut().enumerate() {
                                slot[(o >> jj & 1) as usize] = true;
                            }
                        }
                    }
                }
            }
            for (pi, s) in possible.iter().enumerate() {
                let status = ForcedStatus::from_possible(s[1], s[0]);
                if status.expected() != Some(letter.outputs[pi]) {
                    return TypeCheck::Mismatch(BadReason { position: j, prop: Prop::output(pi), expected: status });
                }
            }
            fwd = next;
        }
        TypeCheck::Match
    }

    /// Shortest prefix of `w` that is a bad prefix, scanning at most
    /// `|stem| + |loop|·(2 + bound)` letters.
    pub fn shortest_bad_prefix(&self, w: &OpenLasso, bound: usize) -> Result<Vec<OpenLetter>, MembershipError> {
        let inputs = w.map(OpenLetter::input_mask);
        if let MinTrace::Trace(t) = self.spec.oracle().min_trace(&inputs) {
            if t.same_word(w) {
                return Err(MembershipError::NotActuallyBad { scanned: 0 });
            }
        }
        let limit = w.stem.len() + w.cycle.len() * (2 + bound);
        for n in 0..=limit {
            let prefix = w.prefix(n);
            if self.is_bad_prefix(&prefix).is_bad {
                return Ok(prefix);
            }
        }
        Err(MembershipError::NotActuallyBad { scanned: limit })
    }
}

enum TypeCheck {
    Infeasible,
    Match,
    Mismatch(BadReason),
}

fn pre_image(p: &Nba, x: &BitSet, input: u32) -> BitSet {
    let mut out = BitSet::new(p.num_states());
    for q in 0..p.num_states() as StateId {
        if p.successors(q, input).any(|t| x.contains(t as usize)) {
            out.insert(q as usize);
        }
    }
    out
}

/// Reference decision through input-language automata: `w` is not bad iff
/// the inputs extending `w_I` that satisfy every per-position condition of
/// `w` form a nonempty language.
pub fn is_bad_prefix_by_conditions(
    spec: &SpecAutomata,
    w: &[OpenLetter],
    limits: &Limits,
) -> Result<bool, AutomatonError> {
    let part = spec.partition();
    let alphabet = Alphabet::input(part);
    let n_letters = alphabet.size() as u32;
    // words starting with w_I
    let mut b = NbaBuilder::new(alphabet);
    for j in 0..=w.len() {
        b.add_state(j == w.len());
    }
    for (j, l) in w.iter().enumerate() {
        b.add_edge(j as StateId, l.input_mask(), j as StateId + 1);
    }
    for a in 0..n_letters {
        b.add_edge(w.len() as StateId, a, w.len() as StateId);
    }
    let mut acc = nba_product_limited(&b.build(0), spec.projected(), limits)?.trim();
    for (i, l) in w.iter().enumerate() {
        for (j, v) in l.outputs.iter().enumerate() {
            let p = Prop::output(j);
            let conds = match v {
                TruthValue3::Top => vec![forced_lang(spec, i, p, true, limits)?],
                TruthValue3::Bot => vec![forced_lang(spec, i, p, false, limits)?],
                TruthValue3::Open => vec![exists_lang(spec, i, p, true), exists_lang(spec, i, p, false)],
            };
            for c in conds {
                acc = nba_product_limited(&acc, &c, limits)?.trim();
            }
        }
    }
    Ok(nba_emptiness(&acc).is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse;
    use crate::threeval::{parse_open_lasso, parse_raw_word};

    fn member(inputs: &[&str], outputs: &[&str], text: &str) -> Membership {
        let p = Arc::new(Partition::new(inputs, outputs).unwrap());
        let spec = Arc::new(SpecAutomata::new(&parse(text, &p).unwrap(), &p));
        Membership::new(spec, &Limits::default()).unwrap()
    }

    fn word(m: &Membership, text: &str) -> Vec<OpenLetter> {
        parse_raw_word(text, m.partition()).unwrap().iter().map(|l| l.to_open().unwrap()).collect()
    }

    #[test]
    fn response_forces_grant() {
        let m = member(&["r1"], &["g1", "g2"], "!g1 & !g2 & G (r1 -> X g1)");
        assert!(!m.is_bad_prefix(&[]).is_bad);
        let w = word(&m, "{r1=1|g1=0,g2=0} {r1=1|g1=?,g2=?}");
        let v = m.is_bad_prefix(&w);
        assert!(v.is_bad);
        assert_eq!(
            v.reason,
            Some(BadReason { position: 1, prop: Prop::output(0), expected: ForcedStatus::Forced(true) })
        );
        assert!(is_bad_prefix_by_conditions(m.spec(), &w, &Limits::default()).unwrap());
        let ok = word(&m, "{r1=1|g1=0,g2=0} {r1=1|g1=1,g2=?}");
        assert!(!m.is_bad_prefix(&ok).is_bad);
        assert!(!is_bad_prefix_by_conditions(m.spec(), &ok, &Limits::default()).unwrap());
    }

    #[test]
    fn mutex_never_fixes() {
        let m = member(&["r1", "r2"], &["g1", "g2"], "G (!g1 | !g2)");
        for text in ["{r1=0,r2=0|g1=1,g2=0}", "{r1=1,r2=1|g1=1,g2=0}"] {
            assert!(m.is_bad_prefix(&word(&m, text)).is_bad);
        }
        assert!(!m.is_bad_prefix(&word(&m, "{r1=0,r2=1|g1=?,g2=?}")).is_bad);
    }

    #[test]
    fn open_inputs_are_bad() {
        let m = member(&["r1"], &["g1"], "G (r1 -> g1)");
        let raw = parse_raw_word("{r1=?|g1=?}", m.partition()).unwrap();
        assert!(m.is_bad_raw(&raw).is_bad);
    }

    #[test]
    fn unsatisfiable_means_empty_word_bad() {
        let m = member(&[], &["g1"], "g1 & !g1");
        assert!(m.is_bad_prefix(&[]).is_bad);
    }

    #[test]
    fn shortest_prefix_scan() {
        let m = member(&[], &["p"], "X p");
        let w = parse_open_lasso("{|p=1} {|p=1} ({|p=?})^w", m.partition()).unwrap();
        assert_eq!(m.shortest_bad_prefix(&w, 4).unwrap().len(), 1);
        let good = parse_open_lasso("{|p=?} {|p=1} ({|p=?})^w", m.partition()).unwrap();
        assert!(matches!(m.shortest_bad_prefix(&good, 4), Err(MembershipError::NotActuallyBad { .. })));
        let m = member(&["r1"], &["g1", "g2"], "!g1 & !g2");
        let w = parse_open_lasso("({r1=0|g1=?,g2=0})^w", m.partition()).unwrap();
        assert_eq!(m.shortest_bad_prefix(&w, 4).unwrap().len(), 1);
    }

    #[test]
    fn witness_extension_starts_with_word() {
        let m = member(&["r1"], &["g1", "g2"], "!g1 & !g2 & G (r1 -> X g1)");
        let w = word(&m, "{r1=1|g1=0,g2=0} {r1=0|g1=1,g2=?}");
        let ext = m.witness_extension(&w).unwrap();
        let MinTrace::Trace(t) = m.spec().oracle().min_trace(&ext) else { panic!() };
        assert_eq!(t.prefix(2), w);
    }
}
