//! Skeletons: `3^O`-labelled, input-deterministic and input-complete
//! transition systems, with model checking against a formula.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::automata::{
    nba_emptiness, nba_product_limited, Alphabet, AutomatonError, Limits, Nba, NbaBuilder,
    SafetyAutomaton, StateId,
};
use crate::ltl::{Partition, PartitionError};
use crate::minlang::{build_complement_min, SpecAutomata};
use crate::threeval::{InputLasso, Lasso, OpenLasso, OpenLetter, OpenLetterIndex, TruthValue3};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SkeletonError {
    #[error("state {state} has no transition for input {input:#b}")]
    MissingTransition { state: usize, input: u32 },
    #[error("transition target {target} out of range")]
    BadTarget { target: u32 },
    #[error("state {0} label does not assign every output")]
    BadLabel(usize),
    #[error("state {0} is unreachable")]
    Unreachable(usize),
    #[error("skeleton needs at least one state")]
    Empty,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{path}: {message}")]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

fn schema<T>(path: impl Into<String>, message: impl Into<String>) -> Result<T, SchemaError> {
    Err(SchemaError { path: path.into(), message: message.into() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton {
    partition: Arc<Partition>,
    names: Vec<String>,
    labels: Vec<Vec<TruthValue3>>,
    /// `transitions[state][input mask]`
    transitions: Vec<Vec<StateId>>,
    initial: StateId,
}

/// A trace of a skeleton outside `min(f)`, with the state path producing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub word: OpenLasso,
    pub stem_states: Vec<StateId>,
    pub cycle_states: Vec<StateId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No(Counterexample),
}

impl Skeleton {
    pub fn new(
        partition: Arc<Partition>,
        labels: Vec<Vec<TruthValue3>>,
        transitions: Vec<Vec<StateId>>,
        initial: StateId,
    ) -> Result<Self, SkeletonError> {
        let names = (0..labels.len()).map(|k| format!("s{k}")).collect();
        Skeleton::with_names(partition, names, labels, transitions, initial)
    }

    fn with_names(
        partition: Arc<Partition>,
        names: Vec<String>,
        labels: Vec<Vec<TruthValue3>>,
        transitions: Vec<Vec<StateId>>,
        initial: StateId,
    ) -> Result<Self, SkeletonError> {
        let n = labels.len();
        if n == 0 {
            return Err(SkeletonError::Empty);
        }
        if initial as usize >= n {
            return Err(SkeletonError::BadTarget { target: initial });
        }
        let n_inputs = 1usize << partition.num_inputs();
        for (s, l) in labels.iter().enumerate() {
            if l.len() != partition.num_outputs() {
                return Err(SkeletonError::BadLabel(s));
            }
        }
        for (s, row) in transitions.iter().enumerate() {
            if row.len() != n_inputs {
                return Err(SkeletonError::MissingTransition { state: s, input: row.len() as u32 });
            }
            if let Some(&t) = row.iter().find(|t| **t as usize >= n) {
                return Err(SkeletonError::BadTarget { target: t });
            }
        }
        if transitions.len() != n {
            return Err(SkeletonError::MissingTransition { state: transitions.len(), input: 0 });
        }
        let s = Skeleton { partition, names, labels, transitions, initial };
        if let Some(u) = s.reachable().iter().position(|r| !r) {
            return Err(SkeletonError::Unreachable(u));
        }
        Ok(s)
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        seen[self.initial as usize] = true;
        let mut stack = vec![self.initial];
        while let Some(s) = stack.pop() {
            for &t in &self.transitions[s as usize] {
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    pub fn partition(&self) -> &Arc<Partition> {
        &self.partition
    }

    pub fn num_states(&self) -> usize {
        self.labels.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn label(&self, s: StateId) -> &[TruthValue3] {
        &self.labels[s as usize]
    }

    pub fn name(&self, s: StateId) -> &str {
        &self.names[s as usize]
    }

    pub fn next(&self, s: StateId, input: u32) -> StateId {
        self.transitions[s as usize][input as usize]
    }

    /// `o(s) ∪ e`
    pub fn letter(&self, s: StateId, input: u32) -> OpenLetter {
        let inputs = (0..self.partition.num_inputs()).map(|k| input >> k & 1 == 1).collect();
        OpenLetter::new(inputs, self.labels[s as usize].clone())
    }

    /// Copy with one label changed; the structure stays valid.
    pub fn with_label(&self, s: StateId, output: usize, value: TruthValue3) -> Skeleton {
        let mut c = self.clone();
        c.labels[s as usize][output] = value;
        c
    }

    /// Copy with one transition retargeted, or `None` if that leaves a
    /// state unreachable.
    pub fn with_transition(&self, s: StateId, input: u32, target: StateId) -> Option<Skeleton> {
        let mut c = self.clone();
        c.transitions[s as usize][input as usize] = target;
        c.reachable().iter().all(|r| *r).then_some(c)
    }

    /// The unique trace following `inputs`.
    pub fn trace_of(&self, inputs: &InputLasso) -> OpenLasso {
        let mut seen: HashMap<(StateId, usize), usize> = HashMap::new();
        let mut letters = Vec::new();
        let (mut s, mut pos) = (self.initial, 0usize);
        loop {
            if let Some(&k) = seen.get(&(s, pos)) {
                let cycle = letters.split_off(k);
                return Lasso::new(letters, cycle).normalized();
            }
            seen.insert((s, pos), letters.len());
            let e = *inputs.at(pos);
            letters.push(self.letter(s, e));
            s = self.next(s, e);
            pos = inputs.succ(pos);
        }
    }

    /// The skeleton read as an automaton over open letters accepting its
    /// traces.
    pub fn to_nba(&self) -> Nba {
        let idx = OpenLetterIndex::new(&self.partition);
        let mut b = NbaBuilder::new(Alphabet::open(&self.partition));
        for _ in 0..self.num_states() {
            b.add_state(true);
        }
        for s in 0..self.num_states() as StateId {
            for e in 0..1u32 << self.partition.num_inputs() {
                b.add_edge(s, idx.encode(&self.letter(s, e)), self.next(s, e));
            }
        }
        b.build(self.initial)
    }

    /// The safety automaton over open letters whose language is the trace
    /// set.
    pub fn to_safety(&self) -> SafetyAutomaton {
        let idx = OpenLetterIndex::new(&self.partition);
        let mut delta = vec![vec![None; idx.len()]; self.num_states()];
        for s in 0..self.num_states() as StateId {
            for e in 0..1u32 << self.partition.num_inputs() {
                delta[s as usize][idx.encode(&self.letter(s, e)) as usize] = Some(self.next(s, e));
            }
        }
        SafetyAutomaton::new(idx.len(), self.initial, delta)
    }

    /// Label- and transition-preserving bijection test.
    pub fn isomorphic(&self, other: &Skeleton) -> bool {
        if self.partition != other.partition || self.num_states() != other.num_states() {
            return false;
        }
        let n = self.num_states();
        let mut map = vec![StateId::MAX; n];
        let mut used = vec![false; n];
        map[self.initial as usize] = other.initial;
        used[other.initial as usize] = true;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(s) = queue.pop_front() {
            let t = map[s as usize];
            if self.label(s) != other.label(t) {
                return false;
            }
            for e in 0..1u32 << self.partition.num_inputs() {
                let (s2, t2) = (self.next(s, e), other.next(t, e));
                if map[s2 as usize] == StateId::MAX {
                    if used[t2 as usize] {
                        return false;
                    }
                    map[s2 as usize] = t2;
                    used[t2 as usize] = true;
                    queue.push_back(s2);
                } else if map[s2 as usize] != t2 {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_json(&self) -> Value {
        let p = &self.partition;
        let states: Vec<Value> = (0..self.num_states())
            .map(|s| {
                let label: Map<String, Value> = p
                    .outputs()
                    .iter()
                    .zip(&self.labels[s])
                    .map(|(n, v)| (n.clone(), Value::from(value_name(*v))))
                    .collect();
                json!({ "id": self.names[s], "label": label })
            })
            .collect();
        let mut transitions = Vec::new();
        for s in 0..self.num_states() {
            for e in 0..1u32 << p.num_inputs() {
                let input: Map<String, Value> = p
                    .inputs()
                    .iter()
                    .enumerate()
                    .map(|(k, n)| (n.clone(), Value::Bool(e >> k & 1 == 1)))
                    .collect();
                transitions.push(json!({
                    "from": self.names[s],
                    "input": input,
                    "to": self.names[self.transitions[s][e as usize] as usize],
                }));
            }
        }
        json!({
            "inputs": p.inputs(),
            "outputs": p.outputs(),
            "states": states,
            "initial": self.names[self.initial as usize],
            "transitions": transitions,
        })
    }

    pub fn from_json(text: &str) -> Result<Skeleton, SchemaError> {
        let v: Value = serde_json::from_str(text).or_else(|e| schema("$", e.to_string()))?;
        Skeleton::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<Skeleton, SchemaError> {
        let obj = v.as_object().map_or_else(|| schema("$", "expected an object"), Ok)?;
        let names_of = |key: &str| -> Result<Vec<String>, SchemaError> {
            let arr = obj.get(key).and_then(Value::as_array);
            let arr = arr.map_or_else(|| schema(format!("$.{key}"), "expected an array"), Ok)?;
            arr.iter()
                .enumerate()
                .map(|(k, x)| {
                    x.as_str()
                        .map(str::to_owned)
                        .map_or_else(|| schema(format!("$.{key}[{k}]"), "expected a string"), Ok)
                })
                .collect()
        };
        let inputs = names_of("inputs")?;
        let outputs = names_of("outputs")?;
        let partition = Partition::new(&inputs, &outputs)
            .map_err(|e: PartitionError| SchemaError { path: "$".into(), message: e.to_string() })?;
        let partition = Arc::new(partition);

        let states = obj.get("states").and_then(Value::as_array);
        let states = states.map_or_else(|| schema("$.states", "expected an array"), Ok)?;
        let mut index: HashMap<String, StateId> = HashMap::new();
        let mut names = Vec::new();
        let mut labels = Vec::new();
        for (k, st) in states.iter().enumerate() {
            let path = format!("$.states[{k}]");
            let id = st.get("id").and_then(Value::as_str);
            let id = id.map_or_else(|| schema(format!("{path}.id"), "expected a string"), Ok)?;
            if index.insert(id.to_owned(), k as StateId).is_some() {
                return schema(format!("{path}.id"), format!("duplicate state id `{id}`"));
            }
            names.push(id.to_owned());
            let label = st.get("label").and_then(Value::as_object);
            let label = label.map_or_else(|| schema(format!("{path}.label"), "expected an object"), Ok)?;
            let mut vals = Vec::new();
            for o in partition.outputs() {
                let x = label.get(o).and_then(Value::as_str);
                let x = match x {
                    Some("true") => TruthValue3::Top,
                    Some("false") => TruthValue3::Bot,
                    Some("open") => TruthValue3::Open,
                    _ => {
                        return schema(format!("{path}.label.{o}"), "expected \"true\", \"false\" or \"open\"")
                    }
                };
                vals.push(x);
            }
            if let Some(extra) = label.keys().find(|key| !partition.outputs().contains(key)) {
                return schema(format!("{path}.label.{extra}"), "not a declared output");
            }
            labels.push(vals);
        }
        let lookup = |path: String, v: Option<&Value>| -> Result<StateId, SchemaError> {
            match v.and_then(Value::as_str) {
                Some(id) => index
                    .get(id)
                    .copied()
                    .map_or_else(|| schema(path, format!("undeclared state `{id}`")), Ok),
                None => schema(path, "expected a state id"),
            }
        };
        let initial = lookup("$.initial".into(), obj.get("initial"))?;
        let n_inputs = 1usize << partition.num_inputs();
        let mut transitions: Vec<Vec<Option<StateId>>> = vec![vec![None; n_inputs]; names.len()];
        let trans = obj.get("transitions").and_then(Value::as_array);
        let trans = trans.map_or_else(|| schema("$.transitions", "expected an array"), Ok)?;
        for (k, t) in trans.iter().enumerate() {
            let path = format!("$.transitions[{k}]");
            let from = lookup(format!("{path}.from"), t.get("from"))?;
            let to = lookup(format!("{path}.to"), t.get("to"))?;
            let input = t.get("input").and_then(Value::as_object);
            let input = input.map_or_else(|| schema(format!("{path}.input"), "expected an object"), Ok)?;
            let mut mask = 0u32;
            for (bit, name) in partition.inputs().iter().enumerate() {
                match input.get(name).and_then(Value::as_bool) {
                    Some(true) => mask |= 1 << bit,
                    Some(false) => {}
                    None => return schema(format!("{path}.input.{name}"), "expected a boolean"),
                }
            }
            if let Some(extra) = input.keys().find(|key| !partition.inputs().contains(key)) {
                return schema(format!("{path}.input.{extra}"), "not a declared input");
            }
            let slot = &mut transitions[from as usize][mask as usize];
            if slot.replace(to).is_some() {
                return schema(path, "duplicate transition for this state and input");
            }
        }
        let mut total = Vec::with_capacity(names.len());
        for (s, row) in transitions.into_iter().enumerate() {
            let mut r = Vec::with_capacity(n_inputs);
            for (e, t) in row.into_iter().enumerate() {
                match t {
                    Some(t) => r.push(t),
                    None => {
                        return schema(
                            "$.transitions",
                            format!("state `{}` has no transition for input {}", names[s], input_label(&partition, e as u32)),
                        )
                    }
                }
            }
            total.push(r);
        }
        Skeleton::with_names(partition, names.clone(), labels, total, initial).map_err(|e| match e {
            SkeletonError::Unreachable(s) => {
                SchemaError { path: format!("$.states[{s}]"), message: "state is unreachable".into() }
            }
            other => SchemaError { path: "$".into(), message: other.to_string() },
        })
    }

    pub fn to_dot(&self) -> String {
        let p = &self.partition;
        let mut out = String::from("digraph skeleton {\n  rankdir=LR;\n  node [shape=circle];\n  init [shape=point];\n");
        for s in 0..self.num_states() {
            let label: Vec<String> = p
                .outputs()
                .iter()
                .zip(&self.labels[s])
                .map(|(n, v)| match v {
                    TruthValue3::Top => n.clone(),
                    TruthValue3::Bot => format!("!{n}"),
                    TruthValue3::Open => format!("{n}?"),
                })
                .collect();
            let _ = writeln!(out, "  {} [label=\"{}\"];", self.names[s], label.join(" "));
        }
        let _ = writeln!(out, "  init -> {};", self.names[self.initial as usize]);
        for s in 0..self.num_states() {
            let row = &self.transitions[s];
            if row.iter().all(|t| *t == row[0]) {
                let _ = writeln!(out, "  {} -> {} [label=\"*\"];", self.names[s], self.names[row[0] as usize]);
                continue;
            }
            for (e, &t) in row.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "  {} -> {} [label=\"{}\"];",
                    self.names[s],
                    self.names[t as usize],
                    input_label(p, e as u32)
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

fn value_name(v: TruthValue3) -> &'static str {
    match v {
        TruthValue3::Top => "true",
        TruthValue3::Bot => "false",
        TruthValue3::Open => "open",
    }
}

fn input_label(p: &Partition, e: u32) -> String {
    if p.num_inputs() == 0 {
        return "true".into();
    }
    p.inputs()
        .iter()
        .enumerate()
        .map(|(k, n)| if e >> k & 1 == 1 { n.clone() } else { format!("!{n}") })
        .collect::<Vec<_>>()
        .join(" & ")
}

/// Decide whether the trace set of `s` equals `min(f)`, given the
/// complement automaton `n` of `min(f)`.
///
/// The skeleton has exactly one trace per input and `min(f)` at most one
/// word per input, so it suffices that no trace lies in `L(n)`. Inputs
/// without models are covered because `n` accepts every word carrying them.
pub fn model_check_with(s: &Skeleton, n: &Nba, limits: &Limits) -> Result<Verdict, AutomatonError> {
    let idx = OpenLetterIndex::new(&s.partition);
    let prod = nba_product_limited(&s.to_nba(), n, limits)?;
    let Some(w) = nba_emptiness(&prod) else { return Ok(Verdict::Yes) };
    let replay = |from: StateId, letters: &[u32]| {
        let mut states = vec![from];
        for &x in letters {
            let cur = *states.last().unwrap();
            states.push(s.next(cur, idx.input_of(x)));
        }
        states
    };
    let stem_states = replay(s.initial, &w.stem);
    let cycle_states = replay(*stem_states.last().unwrap(), &w.cycle);
    let word = w.word().map(|x| idx.decode(*x));
    Ok(Verdict::No(Counterexample { word, stem_states, cycle_states }))
}

pub fn model_check(s: &Skeleton, spec: &SpecAutomata, limits: &Limits) -> Result<Verdict, AutomatonError> {
    let n = build_complement_min(spec, limits)?;
    model_check_with(s, &n, limits)
}
