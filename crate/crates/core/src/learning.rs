//! L* learning of the bad-prefix automaton of `min(f)` and extraction of
//! the minimal skeleton.
//!
//! The teacher answers membership queries with [`Membership`]. An
//! equivalence query runs a cascade of cheap structural checks on the
//! conjecture (extension closure, doomed-state pruning, output consistency,
//! input totality) before model checking the extracted skeleton. Every
//! counterexample is re-verified against the conjecture before the learner
//! sees it.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::automata::{AutomatonError, Dfa, Letter, Limits, Nba, SafetyAutomaton, StateId};
use crate::ltl::{Formula, Partition};
use crate::membership::{Membership, MembershipError};
use crate::minlang::{build_complement_min, SpecAutomata};
use crate::skeleton::{model_check_with, Skeleton, Verdict};
use crate::threeval::{InputLasso, Lasso, OpenLetter, OpenLetterIndex, TruthValue3};

#[derive(Debug, Clone, Copy)]
pub struct LearnLimits {
    /// Cap on explicit automaton sizes.
    pub max_states: usize,
    /// Cap on membership queries answered by the teacher.
    pub max_queries: usize,
    pub timeout: Option<Duration>,
}

impl Default for LearnLimits {
    fn default() -> Self {
        LearnLimits { max_states: 1_000_000, max_queries: 1_000_000, timeout: None }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SynthesisStats {
    /// Membership queries decided by the teacher.
    pub membership_queries: usize,
    /// Membership queries answered from the cache.
    pub cached_queries: usize,
    pub equivalence_queries: usize,
    /// Conjecture DFA size at each equivalence query.
    pub conjecture_sizes: Vec<usize>,
    pub counterexample_lengths: Vec<usize>,
    /// Counterexamples re-checked against the conjecture before use.
    pub verified_counterexamples: usize,
    pub table_prefixes: usize,
    pub table_suffixes: usize,
    pub suffix_types: usize,
    pub complement_states: usize,
    /// Equivalence step that produced the final answer.
    pub decided_by: Option<String>,
    pub wall_time_ms: f64,
}

/// Why no skeleton exists, with words the caller can re-verify.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NoSkeletonWitness {
    /// `u·a1` and `u·a2` are both not bad yet carry different outputs after
    /// the same state: the outputs at that position depend on inputs.
    OutputConflict { u: Vec<OpenLetter>, a1: OpenLetter, a2: OpenLetter },
    /// `u` is not bad, but every letter with input `input` after `u` is.
    BlockedInput { u: Vec<OpenLetter>, input: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SynthesisResult {
    Skeleton(Skeleton),
    NoSkeleton(NoSkeletonWitness),
    /// An input sequence admitting no model.
    NoSkeletonUnrealizableInput(InputLasso),
    ResourceLimit(String),
}

#[derive(Debug, Clone)]
pub struct Synthesis {
    pub result: SynthesisResult,
    pub stats: SynthesisStats,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LearningError {
    #[error("teacher produced a counterexample the conjecture already classifies correctly")]
    DishonestTeacher,
    #[error(transparent)]
    Membership(#[from] MembershipError),
}

enum Stop {
    Limit(String),
    Fail(LearningError),
}

impl From<AutomatonError> for Stop {
    fn from(e: AutomatonError) -> Self {
        match e {
            AutomatonError::ResourceLimit { .. } => Stop::Limit(e.to_string()),
            other => Stop::Fail(LearningError::Membership(MembershipError::Automaton(other))),
        }
    }
}

impl From<LearningError> for Stop {
    fn from(e: LearningError) -> Self {
        Stop::Fail(e)
    }
}

/// Output consistency of a safety automaton over open letters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Consistency {
    Consistent,
    Inconsistent { state: StateId, a1: Letter, a2: Letter },
}

pub fn check_output_consistency(a: &SafetyAutomaton, idx: &OpenLetterIndex) -> Consistency {
    for q in 0..a.num_states() as StateId {
        let mut first: Option<Letter> = None;
        for (l, _) in a.enabled(q) {
            match first {
                None => first = Some(l),
                Some(f) if idx.output_code(f) != idx.output_code(l) => {
                    return Consistency::Inconsistent { state: q, a1: f, a2: l }
                }
                Some(_) => {}
            }
        }
    }
    Consistency::Consistent
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("state {state} has no transition for input {input:#b}")]
pub struct InputIncomplete {
    pub state: StateId,
    pub input: u32,
}

/// Read an output-consistent safety automaton as a skeleton.
pub fn safety_to_skeleton(a: &SafetyAutomaton, partition: &Arc<Partition>) -> Result<Skeleton, InputIncomplete> {
    let idx = OpenLetterIndex::new(partition);
    let n_inputs = 1u32 << partition.num_inputs();
    let mut labels = Vec::with_capacity(a.num_states());
    let mut transitions = Vec::with_capacity(a.num_states());
    for q in 0..a.num_states() as StateId {
        let mut row = vec![None; n_inputs as usize];
        let mut label = None;
        for (l, t) in a.enabled(q) {
            row[idx.input_of(l) as usize] = Some(t);
            label.get_or_insert_with(|| idx.decode(l).outputs);
        }
        let row: Vec<StateId> = row
            .into_iter()
            .enumerate()
            .map(|(e, t)| t.ok_or(InputIncomplete { state: q, input: e as u32 }))
            .collect::<Result<_, _>>()?;
        labels.push(label.expect("complete rows have a letter"));
        transitions.push(row);
    }
    Ok(Skeleton::new(partition.clone(), labels, transitions, a.initial()).expect("safety automaton is reachable"))
}

struct Teacher {
    membership: Membership,
    idx: OpenLetterIndex,
    cache: HashMap<Vec<Letter>, bool>,
    complement: Option<Nba>,
    limits: LearnLimits,
    automaton_limits: Limits,
    stats: SynthesisStats,
}

impl Teacher {
    fn decode(&self, w: &[Letter]) -> Vec<OpenLetter> {
        w.iter().map(|l| self.idx.decode(*l)).collect()
    }

    fn is_bad(&mut self, w: &[Letter]) -> Result<bool, Stop> {
        if let Some(&b) = self.cache.get(w) {
            self.stats.cached_queries += 1;
            return Ok(b);
        }
        if self.stats.membership_queries >= self.limits.max_queries {
            return Err(Stop::Limit(format!("more than {} membership queries", self.limits.max_queries)));
        }
        if let Some(d) = self.automaton_limits.deadline {
            if Instant::now() > d {
                return Err(Stop::Limit("timeout".into()));
            }
        }
        self.stats.membership_queries += 1;
        let b = self.membership.is_bad_prefix(&self.decode(w)).is_bad;
        self.cache.insert(w.to_vec(), b);
        Ok(b)
    }

    fn complement(&mut self) -> Result<&Nba, Stop> {
        if self.complement.is_none() {
            let n = build_complement_min(self.membership.spec(), &self.automaton_limits)?;
            self.stats.complement_states = n.num_states();
            self.complement = Some(n);
        }
        Ok(self.complement.as_ref().unwrap())
    }
}

struct Table {
    order: Vec<Letter>,
    prefixes: Vec<Vec<Letter>>,
    prefix_set: HashSet<Vec<Letter>>,
    suffixes: Vec<Vec<Letter>>,
    rows: HashMap<Vec<Letter>, Vec<bool>>,
}

impl Table {
    fn row(&mut self, t: &mut Teacher, w: &[Letter]) -> Result<Vec<bool>, Stop> {
        let mut r = self.rows.remove(w).unwrap_or_default();
        while r.len() < self.suffixes.len() {
            let mut q = w.to_vec();
            q.extend_from_slice(&self.suffixes[r.len()]);
            r.push(t.is_bad(&q)?);
        }
        self.rows.insert(w.to_vec(), r.clone());
        Ok(r)
    }

    fn add_prefix(&mut self, w: Vec<Letter>) -> bool {
        if self.prefix_set.insert(w.clone()) {
            self.prefixes.push(w);
            true
        } else {
            false
        }
    }

    /// Make the table closed and consistent.
    fn complete(&mut self, t: &mut Teacher) -> Result<(), Stop> {
        loop {
            let mut reps: HashMap<Vec<bool>, usize> = HashMap::new();
            for k in 0..self.prefixes.len() {
                let s = self.prefixes[k].clone();
                let r = self.row(t, &s)?;
                reps.entry(r).or_insert(k);
            }
            // closedness
            let mut grew = false;
            'outer: for k in 0..self.prefixes.len() {
                for ai in 0..self.order.len() {
                    let mut w = self.prefixes[k].clone();
                    w.push(self.order[ai]);
                    let r = self.row(t, &w)?;
                    if !reps.contains_key(&r) {
                        self.add_prefix(w);
                        grew = true;
                        break 'outer;
                    }
                }
            }
            if grew {
                continue;
            }
            // consistency
            let mut by_row: HashMap<Vec<bool>, Vec<usize>> = HashMap::new();
            for k in 0..self.prefixes.len() {
                let s = self.prefixes[k].clone();
                by_row.entry(self.row(t, &s)?).or_default().push(k);
            }
            let mut new_suffix = None;
            let mut groups: Vec<Vec<usize>> = by_row.into_values().filter(|g| g.len() > 1).collect();
            groups.sort();
            'search: for g in groups {
                for ai in 0..self.order.len() {
                    let a = self.order[ai];
                    let mut w0 = self.prefixes[g[0]].clone();
                    w0.push(a);
                    let r0 = self.row(t, &w0)?;
                    for &k in &g[1..] {
                        let mut w = self.prefixes[k].clone();
                        w.push(a);
                        let r = self.row(t, &w)?;
                        if let Some(e) = (0..r.len()).find(|&e| r[e] != r0[e]) {
                            let mut s = vec![a];
                            s.extend_from_slice(&self.suffixes[e]);
                            new_suffix = Some(s);
                            break 'search;
                        }
                    }
                }
            }
            match new_suffix {
                Some(s) => self.suffixes.push(s),
                None => return Ok(()),
            }
        }
    }

    /// Conjecture DFA plus the representative prefix of each state.
    fn conjecture(&mut self, t: &mut Teacher, n_letters: usize) -> Result<(Dfa, Vec<Vec<Letter>>), Stop> {
        let mut ids: HashMap<Vec<bool>, StateId> = HashMap::new();
        let mut reps: Vec<Vec<Letter>> = Vec::new();
        for k in 0..self.prefixes.len() {
            let s = self.prefixes[k].clone();
            let r = self.row(t, &s)?;
            if let Entry::Vacant(e) = ids.entry(r) {
                e.insert(reps.len() as StateId);
                reps.push(s);
            }
        }
        let mut delta = vec![vec![0; n_letters]; reps.len()];
        let mut accepting = vec![false; reps.len()];
        for (q, s) in reps.clone().iter().enumerate() {
            accepting[q] = self.row(t, s)?[0];
            for a in 0..n_letters as Letter {
                let mut w = s.clone();
                w.push(a);
                let r = self.row(t, &w)?;
                delta[q][a as usize] = ids[&r];
            }
        }
        Ok((Dfa::new(n_letters, 0, accepting, delta), reps))
    }
}

enum Answer {
    Correct(Skeleton),
    Counterexample(Vec<Letter>),
    Final(&'static str, SynthesisResult),
}

/// Learn the minimal skeleton of `f`, or show that none exists.
pub fn lstar_synthesize(
    formula: &Formula,
    partition: &Arc<Partition>,
    seed: u64,
    limits: &LearnLimits,
) -> Result<Synthesis, LearningError> {
    let start = Instant::now();
    let automaton_limits = Limits { max_states: limits.max_states, deadline: limits.timeout.map(|d| start + d) };
    let mut stats = SynthesisStats::default();
    let outcome = (|| -> Result<SynthesisResult, Stop> {
        let spec = Arc::new(SpecAutomata::new(formula, partition));
        let membership = Membership::new(spec, &automaton_limits)?;
        stats.suffix_types = membership.num_types();
        let idx = OpenLetterIndex::new(partition);
        let mut teacher = Teacher {
            membership,
            idx,
            cache: HashMap::new(),
            complement: None,
            limits: *limits,
            automaton_limits,
            stats: std::mem::take(&mut stats),
        };
        let r = learn(&mut teacher, partition, seed);
        stats = std::mem::take(&mut teacher.stats);
        r
    })();
    stats.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let result = match outcome {
        Ok(r) => r,
        Err(Stop::Limit(m)) => SynthesisResult::ResourceLimit(m),
        Err(Stop::Fail(e)) => return Err(e),
    };
    Ok(Synthesis { result, stats })
}

fn learn(t: &mut Teacher, partition: &Arc<Partition>, seed: u64) -> Result<SynthesisResult, Stop> {
    let n_letters = t.idx.len();
    let mut order: Vec<Letter> = (0..n_letters as Letter).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut table = Table {
        order,
        prefixes: Vec::new(),
        prefix_set: HashSet::new(),
        suffixes: vec![Vec::new()],
        rows: HashMap::new(),
    };
    table.add_prefix(Vec::new());
    loop {
        table.complete(t)?;
        t.stats.table_prefixes = table.prefixes.len();
        t.stats.table_suffixes = table.suffixes.len();
        let (dfa, reps) = table.conjecture(t, n_letters)?;
        t.stats.equivalence_queries += 1;
        t.stats.conjecture_sizes.push(dfa.num_states());
        if dfa.num_states() > t.limits.max_states {
            return Err(Stop::Limit(format!("conjecture exceeds {} states", t.limits.max_states)));
        }
        match equivalence_query(t, &dfa, &reps, &table.order, partition)? {
            Answer::Correct(s) => {
                t.stats.decided_by = Some("model-check".into());
                return Ok(SynthesisResult::Skeleton(s));
            }
            Answer::Final(step, r) => {
                t.stats.decided_by = Some(step.into());
                return Ok(r);
            }
            Answer::Counterexample(c) => {
                // the conjecture must misclassify the counterexample
                if t.is_bad(&c)? == dfa.accepts(&c) {
                    return Err(Stop::Fail(LearningError::DishonestTeacher));
                }
                t.stats.verified_counterexamples += 1;
                t.stats.counterexample_lengths.push(c.len());
                for k in 0..=c.len() {
                    table.add_prefix(c[..k].to_vec());
                }
            }
        }
    }
}

fn equivalence_query(
    t: &mut Teacher,
    dfa: &Dfa,
    reps: &[Vec<Letter>],
    order: &[Letter],
    partition: &Arc<Partition>,
) -> Result<Answer, Stop> {
    let cat = |u: &[Letter], a: Letter| {
        let mut w = u.to_vec();
        w.push(a);
        w
    };
    // (1) bad prefixes must be closed under extension
    for q in 0..dfa.num_states() as StateId {
        if !dfa.is_accepting(q) {
            continue;
        }
        for &a in order {
            if !dfa.is_accepting(dfa.step(q, a)) {
                let u = &reps[q as usize];
                return Ok(Answer::Counterexample(if t.is_bad(u)? { cat(u, a) } else { u.clone() }));
            }
        }
    }
    // (2) states all of whose continuations are bad
    let pruning = dfa.to_safety();
    if let Some(&q) = pruning.pruned.first() {
        let u = reps[q as usize].clone();
        if t.is_bad(&u)? {
            return Ok(Answer::Counterexample(u));
        }
        // walk along truly good letters until the conjecture calls one bad
        let mut w = u;
        for _ in 0..=dfa.num_states() {
            let mut moved = false;
            for &a in order {
                let w2 = cat(&w, a);
                if !t.is_bad(&w2)? {
                    if dfa.accepts(&w2) {
                        return Ok(Answer::Counterexample(w2));
                    }
                    w = w2;
                    moved = true;
                    break;
                }
            }
            if !moved {
                // a good word always has a good one-letter extension
                return Err(Stop::Fail(LearningError::DishonestTeacher));
            }
        }
        return Err(Stop::Fail(LearningError::DishonestTeacher));
    }
    let Some(safety) = pruning.automaton else {
        // the conjecture calls the empty word bad and (1) found it honest
        let any_input = Lasso::new(Vec::new(), vec![0]);
        return Ok(Answer::Final("empty-language", SynthesisResult::NoSkeletonUnrealizableInput(any_input)));
    };
    let access = safety_access(&safety, order);
    // (3) all transitions of a state share one output valuation
    if let Consistency::Inconsistent { state, a1, a2 } = check_output_consistency(&safety, &t.idx) {
        let u = access[state as usize].clone();
        for a in [a1, a2] {
            if t.is_bad(&cat(&u, a))? {
                return Ok(Answer::Counterexample(cat(&u, a)));
            }
        }
        return Ok(Answer::Final("output-consistency", SynthesisResult::NoSkeleton(NoSkeletonWitness::OutputConflict {
            u: t.decode(&u),
            a1: t.idx.decode(a1),
            a2: t.idx.decode(a2),
        })));
    }
    // (4) every input must be possible from every state
    let skeleton = match safety_to_skeleton(&safety, partition) {
        Ok(s) => s,
        Err(InputIncomplete { state, input }) => {
            let u = access[state as usize].clone();
            for &a in order {
                if t.idx.input_of(a) == input && !t.is_bad(&cat(&u, a))? {
                    return Ok(Answer::Counterexample(cat(&u, a)));
                }
            }
            if t.is_bad(&u)? {
                return Ok(Answer::Counterexample(u));
            }
            // u is good yet every continuation with input e is bad: the
            // candidate completed by an unconstrained sink must fail, either
            // on an input without models or because outputs along u depend
            // on e
            let candidate = complete_with_sink(&safety, partition);
            let limits = t.automaton_limits;
            if let Verdict::No(cex) = model_check_with(&candidate, t.complement()?, &limits)? {
                let inputs = cex.word.map(OpenLetter::input_mask);
                if !t.membership.spec().oracle().has_model(&inputs) {
                    return Ok(Answer::Final("model-check", SynthesisResult::NoSkeletonUnrealizableInput(inputs)));
                }
            }
            return Ok(Answer::Final("input-totality", SynthesisResult::NoSkeleton(NoSkeletonWitness::BlockedInput {
                u: t.decode(&u),
                input,
            })));
        }
    };
    // (5) model check the extracted skeleton
    let limits = t.automaton_limits;
    let n = t.complement()?;
    let bound = n.num_states();
    match model_check_with(&skeleton, n, &limits)? {
        Verdict::Yes => Ok(Answer::Correct(skeleton)),
        Verdict::No(cex) => {
            let inputs = cex.word.map(OpenLetter::input_mask);
            if !t.membership.spec().oracle().has_model(&inputs) {
                return Ok(Answer::Final("model-check", SynthesisResult::NoSkeletonUnrealizableInput(inputs)));
            }
            let prefix = t.membership.shortest_bad_prefix(&cex.word, bound).map_err(LearningError::from)?;
            Ok(Answer::Counterexample(prefix.iter().map(|l| t.idx.encode(l)).collect()))
        }
    }
}

/// Skeleton of `a` with every missing transition sent to an all-open sink.
fn complete_with_sink(a: &SafetyAutomaton, partition: &Arc<Partition>) -> Skeleton {
    let idx = OpenLetterIndex::new(partition);
    let n_inputs = 1usize << partition.num_inputs();
    let sink = a.num_states() as StateId;
    let mut labels = Vec::new();
    let mut transitions = Vec::new();
    for q in 0..a.num_states() as StateId {
        let mut row = vec![sink; n_inputs];
        let mut label = vec![TruthValue3::Open; partition.num_outputs()];
        for (l, t) in a.enabled(q) {
            row[idx.input_of(l) as usize] = t;
            label = idx.decode(l).outputs;
        }
        labels.push(label);
        transitions.push(row);
    }
    labels.push(vec![TruthValue3::Open; partition.num_outputs()]);
    transitions.push(vec![sink; n_inputs]);
    Skeleton::new(partition.clone(), labels, transitions, a.initial()).expect("sink is reachable")
}

/// Shortest access word of every safety-automaton state.
fn safety_access(a: &SafetyAutomaton, order: &[Letter]) -> Vec<Vec<Letter>> {
    let mut out: Vec<Option<Vec<Letter>>> = vec![None; a.num_states()];
    out[a.initial() as usize] = Some(Vec::new());
    let mut queue = VecDeque::from([a.initial()]);
    while let Some(q) = queue.pop_front() {
        for &l in order {
            if let Some(t) = a.step(q, l) {
                if out[t as usize].is_none() {
                    let mut w = out[q as usize].clone().unwrap();
                    w.push(l);
                    out[t as usize] = Some(w);
                    queue.push_back(t);
                }
            }
        }
    }
    out.into_iter().map(|w| w.expect("safety automaton states are reachable")).collect()
}
