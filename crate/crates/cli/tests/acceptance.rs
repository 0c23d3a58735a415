//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use skelsynth::automata::{
    ltl_to_nba, nba_emptiness, nba_membership, nba_product, Alphabet, Limits, Nba, NbaBuilder, StateId,
};
use skelsynth::gen::{random_formula, random_input_lasso, random_open_lasso};
use skelsynth::ltl::{Formula, Partition, Prop, SpecFile};
use skelsynth::membership::Membership;
use skelsynth::minlang::{build_complement_min, exists_lang, SpecAutomata};
use skelsynth::oracle::{eval_ltl_on_lasso, MinTrace};
use skelsynth::skeleton::Skeleton;
use skelsynth::threeval::{
    format_word, lcm, parse_open_lasso, InputLasso, Lasso, OpenLasso, OpenLetter,
    OpenLetterIndex, TruthValue3,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
    elapsed: Duration,
}

fn cli(args: &[&str]) -> Run {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_skelsynth")).args(args).output().expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
        elapsed: start.elapsed(),
    }
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

fn load_spec(name: &str) -> SpecFile {
    SpecFile::parse(&std::fs::read_to_string(corpus(name)).unwrap(), (None, None)).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

const FIGURES: [(&str, &str, usize); 4] = [
    ("arbiter_mutex.spec", "fig1b.json", 1),
    ("arbiter_init.spec", "fig1c.json", 2),
    ("arbiter3.spec", "fig1e.json", 3),
    ("respond2.spec", "fig2d.json", 3),
];

const CORPUS: [&str; 7] = [
    "arbiter_mutex.spec",
    "arbiter_init.spec",
    "arbiter3.spec",
    "respond2.spec",
    "immediate_grant.spec",
    "lookahead.spec",
    "conflicting.spec",
];

fn synth_json(spec: &str, seed: u64) -> Result<(Run, Value), String> {
    let seed = seed.to_string();
    let run = cli(&["synth", path_str(&corpus(spec)), "--seed", &seed]);
    let v: Value = serde_json::from_str(&run.stdout).map_err(|e| format!("{spec}: bad JSON ({e}): {}", run.stderr))?;
    Ok((run, v))
}

fn figure_reproduction() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut slowest = 0.0f64;
    for (spec, fig, states) in FIGURES {
        let out = dir.path().join(fig);
        let run = cli(&["synth", path_str(&corpus(spec)), "--out", path_str(&out)]);
        ensure(run.code == 0, || format!("{spec}: exit {} ({})", run.code, run.stderr))?;
        ensure(run.elapsed < Duration::from_secs(60), || format!("{spec}: {:?}", run.elapsed))?;
        slowest = slowest.max(run.elapsed.as_secs_f64());
        let got = Skeleton::from_json(&std::fs::read_to_string(&out).unwrap()).map_err(|e| e.to_string())?;
        let want = Skeleton::from_json(&std::fs::read_to_string(corpus(fig)).unwrap()).unwrap();
        ensure(got.num_states() == states, || format!("{spec}: {} states", got.num_states()))?;
        ensure(got.isomorphic(&want), || format!("{spec}: not isomorphic to {fig}"))?;
    }
    Ok(format!("4/4 figures isomorphic, slowest {slowest:.2}s"))
}

fn single_mutants(s: &Skeleton) -> Vec<Skeleton> {
    let mut out = Vec::new();
    let n_out = s.partition().num_outputs();
    let n_in = 1u32 << s.partition().num_inputs();
    for q in 0..s.num_states() as StateId {
        for j in 0..n_out {
            for v in TruthValue3::ALL {
                if v != s.label(q)[j] {
                    out.push(s.with_label(q, j, v));
                }
            }
        }
        for e in 0..n_in {
            for t in 0..s.num_states() as StateId {
                if t != s.next(q, e) {
                    out.extend(s.with_transition(q, e, t));
                }
            }
        }
    }
    out
}

/// Twenty pairwise non-isomorphic mutants: single mutations first, topped up
/// with double mutations when the skeleton is too small to have twenty.
fn mutants(s: &Skeleton, rng: &mut ChaCha8Rng) -> Vec<Skeleton> {
    let mut singles = single_mutants(s);
    singles.shuffle(rng);
    let mut out: Vec<Skeleton> = singles.iter().take(20).cloned().collect();
    let mut attempts = 0;
    while out.len() < 20 && attempts < 2_000 {
        attempts += 1;
        let first = singles.choose(rng).unwrap();
        let Some(second) = single_mutants(first).choose(rng).cloned() else { continue };
        if !second.isomorphic(s) && !out.iter().any(|m| m.isomorphic(&second)) {
            out.push(second);
        }
    }
    // a one-state skeleton has only eight same-size mutants: retarget a
    // transition to a fresh copy of its target with one label changed
    let n_in = 1u32 << s.partition().num_inputs();
    let mut splits = Vec::new();
    for q in 0..s.num_states() as StateId {
        for e in 0..n_in {
            let copy_of = s.next(q, e);
            for j in 0..s.partition().num_outputs() {
                for v in TruthValue3::ALL.into_iter().filter(|v| *v != s.label(copy_of)[j]) {
                    splits.push(split_mutant(s, q, e, j, v));
                }
            }
        }
    }
    splits.shuffle(rng);
    for m in splits {
        if out.len() == 20 {
            break;
        }
        if !out.iter().any(|o| o.isomorphic(&m)) {
            out.push(m);
        }
    }
    out
}

fn split_mutant(s: &Skeleton, q: StateId, e: u32, j: usize, v: TruthValue3) -> Skeleton {
    let n = s.num_states() as StateId;
    let n_in = 1u32 << s.partition().num_inputs();
    let copy_of = s.next(q, e);
    let mut labels: Vec<Vec<TruthValue3>> = (0..n).map(|t| s.label(t).to_vec()).collect();
    let mut transitions: Vec<Vec<StateId>> = (0..n).map(|t| (0..n_in).map(|a| s.next(t, a)).collect()).collect();
    let mut label = labels[copy_of as usize].clone();
    label[j] = v;
    labels.push(label);
    transitions.push(transitions[copy_of as usize].clone());
    transitions[q as usize][e as usize] = n;
    Skeleton::new(s.partition().clone(), labels, transitions, s.initial()).unwrap()
}

fn model_checking_corpus() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut killed = 0;
    let mut total = 0;
    let mut slowest = 0.0f64;
    for (spec_name, fig, _) in FIGURES {
        let spec_path = corpus(spec_name);
        let run = cli(&["check", path_str(&spec_path), path_str(&corpus(fig))]);
        ensure(run.code == 0, || format!("{fig}: exit {} {}", run.code, run.stdout))?;
        let spec = load_spec(spec_name);
        let automata = Arc::new(SpecAutomata::new(&spec.formula, &spec.partition));
        let n = build_complement_min(&automata, &Limits::default()).unwrap();
        let membership = Membership::new(automata.clone(), &Limits::default()).unwrap();
        let idx = OpenLetterIndex::new(&spec.partition);
        let original = Skeleton::from_json(&std::fs::read_to_string(corpus(fig)).unwrap()).unwrap();
        for (k, m) in mutants(&original, &mut rng).into_iter().enumerate() {
            total += 1;
            let file = dir.path().join(format!("{fig}.{k}.json"));
            std::fs::write(&file, m.to_json().to_string()).unwrap();
            let run = cli(&["check", path_str(&spec_path), path_str(&file)]);
            slowest = slowest.max(run.elapsed.as_secs_f64());
            ensure(run.elapsed < Duration::from_secs(10), || format!("{fig} mutant {k}: {:?}", run.elapsed))?;
            ensure(run.code == 1, || format!("{fig} mutant {k} survived (exit {})", run.code))?;
            let text = run
                .stdout
                .lines()
                .find_map(|l| l.strip_prefix("counterexample: "))
                .ok_or_else(|| format!("{fig} mutant {k}: no counterexample printed"))?;
            let word = parse_open_lasso(text, &spec.partition).map_err(|e| e.to_string())?;
            let inputs = word.map(OpenLetter::input_mask);
            ensure(m.trace_of(&inputs).same_word(&word), || format!("{fig} mutant {k}: not a trace"))?;
            ensure(nba_membership(&n, &word.map(|l| idx.encode(l))).unwrap(), || {
                format!("{fig} mutant {k}: counterexample in the minimal language")
            })?;
            let prefix = membership
                .shortest_bad_prefix(&word, n.num_states())
                .map_err(|e| format!("{fig} mutant {k}: {e}"))?;
            let verdict = cli(&["member", path_str(&spec_path), &format_word(&prefix, &spec.partition)]);
            ensure(verdict.stdout.trim() == "bad", || format!("{fig} mutant {k}: prefix {:?}", verdict.stdout))?;
            killed += 1;
        }
    }
    ensure(total == 80, || format!("only {total} mutants generated"))?;
    Ok(format!("{killed}/{total} mutants killed with confirmed bad prefixes, slowest check {slowest:.2}s"))
}

fn uniqueness() -> Outcome {
    let mut checked = 0;
    for spec in CORPUS {
        let (a, va) = synth_json(spec, 11)?;
        let (b, vb) = synth_json(spec, 12)?;
        ensure(a.code == b.code, || format!("{spec}: exit {} vs {}", a.code, b.code))?;
        ensure(va["status"] == vb["status"], || format!("{spec}: {} vs {}", va["status"], vb["status"]))?;
        if va["status"] == "skeleton" {
            let sa = Skeleton::from_value(&va["skeleton"]).map_err(|e| e.to_string())?;
            let sb = Skeleton::from_value(&vb["skeleton"]).map_err(|e| e.to_string())?;
            ensure(sa.isomorphic(&sb), || format!("{spec}: seeds disagree"))?;
            if let Some((_, _, n)) = FIGURES.iter().find(|f| f.0 == spec) {
                ensure(sa.num_states() == *n, || format!("{spec}: {} states, want {n}", sa.num_states()))?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} skeletons isomorphic across seeds, 3 no-skeleton verdicts stable"))
}

fn member_says(spec: &Path, word: &str) -> Result<bool, String> {
    let run = cli(&["member", path_str(spec), word]);
    match run.stdout.trim() {
        "bad" => Ok(true),
        "not-bad" => Ok(false),
        other => Err(format!("member {word:?}: {other:?} {}", run.stderr)),
    }
}

fn no_skeleton_detection() -> Outcome {
    let mut notes = Vec::new();
    for spec in ["immediate_grant.spec", "lookahead.spec"] {
        let path = corpus(spec);
        let (run, v) = synth_json(spec, 0)?;
        ensure(run.elapsed < Duration::from_secs(60), || format!("{spec}: {:?}", run.elapsed))?;
        ensure(run.code == 1 && v["status"] == "no-skeleton", || format!("{spec}: {}", v["status"]))?;
        let w = &v["witness"];
        let prefix = w["prefix"].as_str().unwrap_or_default();
        match w["kind"].as_str() {
            Some("output-conflict") => {
                let letters: Vec<&str> = w["letters"].as_array().unwrap().iter().map(|l| l.as_str().unwrap()).collect();
                let spec_file = load_spec(spec);
                let outputs = |t: &str| {
                    parse_open_lasso(&format!("({t})^w"), &spec_file.partition).map(|l| l.at(0).outputs.clone())
                };
                ensure(outputs(letters[0]) != outputs(letters[1]), || format!("{spec}: letters agree"))?;
                for l in &letters {
                    let word = format!("{prefix} {l}");
                    ensure(!member_says(&path, &word)?, || format!("{spec}: {word} is bad"))?;
                }
            }
            Some("blocked-input") => {
                ensure(!member_says(&path, prefix)?, || format!("{spec}: blocked prefix is bad"))?;
            }
            other => return Err(format!("{spec}: witness {other:?}")),
        }
        notes.push(format!("{spec} {}", w["kind"].as_str().unwrap()));
    }
    let spec = "conflicting.spec";
    let (run, v) = synth_json(spec, 0)?;
    ensure(run.code == 1 && v["witness"]["kind"] == "no-model-input", || format!("{spec}: {}", v))?;
    ensure(v["stats"]["decided_by"] == "model-check", || format!("{spec}: decided by {}", v["stats"]["decided_by"]))?;
    let inputs = v["witness"]["inputs"].as_str().unwrap();
    let trace = cli(&["mintrace", path_str(&corpus(spec)), inputs]);
    ensure(trace.stdout.trim() == "no-model", || format!("{spec}: mintrace {}", trace.stdout))?;
    notes.push(format!("{spec} no-model input at model check"));
    Ok(notes.join("; "))
}

fn learner_accounting() -> Outcome {
    let mut rows = Vec::new();
    for spec in CORPUS {
        let (run, v) = synth_json(spec, 0)?;
        ensure(run.code != 4, || format!("{spec}: learner failure {}", run.stderr))?;
        let st = &v["stats"];
        let mq = st["membership_queries"].as_u64().unwrap_or(0);
        let eq = st["equivalence_queries"].as_u64().unwrap_or(0);
        let cex = st["counterexample_lengths"].as_array().map_or(0, |a| a.len()) as u64;
        let verified = st["verified_counterexamples"].as_u64().unwrap_or(u64::MAX);
        ensure(mq > 0, || format!("{spec}: no membership queries recorded"))?;
        ensure(verified == cex && eq == cex + 1, || format!("{spec}: {eq} equivalence queries, {cex} counterexamples, {verified} verified"))?;
        let sizes: Vec<u64> = st["conjecture_sizes"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
        ensure(sizes.windows(2).all(|w| w[0] <= w[1]), || format!("{spec}: conjecture sizes {sizes:?}"))?;
        let states = v["states"].as_u64().map_or("-".to_string(), |n| n.to_string());
        rows.push(format!("{spec}: states={states} mq={mq} eq={eq}"));
    }
    Ok(rows.join(", "))
}

fn random_partition(rng: &mut ChaCha8Rng) -> Arc<Partition> {
    let ni = rng.gen_range(0..=2);
    let no = rng.gen_range(1..=2);
    Arc::new(Partition::new(&["r1", "r2"][..ni], &["g1", "g2"][..no]).unwrap())
}

fn random_instance(rng: &mut ChaCha8Rng) -> (Arc<Partition>, Formula) {
    let p = random_partition(rng);
    let size = rng.gen_range(1..=10);
    let f = random_formula(rng, &p, size);
    (p, f)
}

fn mutate(rng: &mut ChaCha8Rng, w: &OpenLasso) -> OpenLasso {
    let mut w = w.clone();
    let n = w.stem.len() + w.cycle.len();
    let k = rng.gen_range(0..n);
    let letter = if k < w.stem.len() { &mut w.stem[k] } else { &mut w.cycle[k - w.stem.len()] };
    let j = rng.gen_range(0..letter.outputs.len());
    let others: Vec<TruthValue3> = TruthValue3::ALL.into_iter().filter(|v| *v != letter.outputs[j]).collect();
    letter.outputs[j] = *others.choose(rng).unwrap();
    w
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    let mut accepted = 0;
    for _ in 0..200 {
        let (p, f) = random_instance(&mut rng);
        let spec = SpecAutomata::new(&f, &p);
        let n = build_complement_min(&spec, &Limits::default()).map_err(|e| e.to_string())?;
        let idx = OpenLetterIndex::new(&p);
        for k in 0..20 {
            let w = match k % 3 {
                0 => random_open_lasso(&mut rng, &p, 3, 3),
                _ => match spec.oracle().min_trace(&random_input_lasso(&mut rng, &p, 3, 3)) {
                    MinTrace::Trace(t) if k % 3 == 1 => t,
                    MinTrace::Trace(t) => mutate(&mut rng, &t),
                    MinTrace::NoModel => random_open_lasso(&mut rng, &p, 3, 3),
                },
            };
            let expected = match spec.oracle().min_trace(&w.map(OpenLetter::input_mask)) {
                MinTrace::Trace(t) => !t.same_word(&w),
                MinTrace::NoModel => true,
            };
            let got = nba_membership(&n, &w.map(|l| idx.encode(l))).unwrap();
            ensure(got == expected, || format!("{}: N says {got}, min trace says {expected}", f.display(&p)))?;
            checked += 1;
            accepted += got as usize;
        }
    }
    Ok(format!("{checked} words over 200 formulas, 0 mismatches ({accepted} outside min)"))
}

/// Inputs beginning with `prefix`, over the input alphabet.
fn prefix_automaton(p: &Arc<Partition>, prefix: &[u32]) -> Nba {
    let mut b = NbaBuilder::new(Alphabet::input(p));
    let states: Vec<StateId> = (0..=prefix.len()).map(|k| b.add_state(k == prefix.len())).collect();
    for (k, a) in prefix.iter().enumerate() {
        b.add_edge(states[k], *a, states[k + 1]);
    }
    let last = states[prefix.len()];
    for a in 0..1u32 << p.num_inputs() {
        b.add_edge(last, a, last);
    }
    b.build(states[0])
}

fn membership_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut pairs, mut bad_pairs, mut unsat, mut prefixes, mut forced) = (0, 0, 0, 0, 0);
    let mut formulas = 0;
    while formulas < 150 || pairs < 1000 || forced < 200 {
        formulas += 1;
        let (p, mut f) = random_instance(&mut rng);
        if formulas % 4 == 0 {
            let g = random_formula(&mut rng, &p, 3);
            f = Formula::and(f.clone(), Formula::and(g.clone(), Formula::not(g)));
        }
        let spec = Arc::new(SpecAutomata::new(&f, &p));
        let m = Membership::new(spec.clone(), &Limits::default()).map_err(|e| e.to_string())?;
        let idx = OpenLetterIndex::new(&p);

        // empty word bad iff the formula is unsatisfiable
        let model = nba_emptiness(&ltl_to_nba(&f, &p));
        if let Some(w) = &model {
            ensure(eval_ltl_on_lasso(&f, &p, &w.word()), || format!("{}: witness is not a model", f.display(&p)))?;
        }
        let eps = m.is_bad_prefix(&[]).is_bad;
        ensure(eps == model.is_none(), || format!("{}: empty word bad={eps}, satisfiable={}", f.display(&p), model.is_some()))?;
        unsat += model.is_none() as usize;

        for _ in 0..8 {
            let inputs = random_input_lasso(&mut rng, &p, 3, 3);
            let trace = match spec.oracle().min_trace(&inputs) {
                MinTrace::Trace(t) => t,
                MinTrace::NoModel => continue,
            };
            let horizon = trace.stem.len() + 2 * trace.cycle.len() + 1;
            let full = trace.prefix(horizon);
            for n in 0..=horizon {
                ensure(!m.is_bad_prefix(&full[..n]).is_bad, || format!("{}: min trace prefix of length {n} is bad", f.display(&p)))?;
                prefixes += 1;
            }

            // extension closure from min-trace prefixes and their mutations
            let n = rng.gen_range(0..=horizon);
            let mut w = full[..n].to_vec();
            if n > 0 && rng.gen_bool(0.7) {
                let j = rng.gen_range(0..p.num_outputs());
                w[n - 1].outputs[j] = *TruthValue3::ALL.choose(&mut rng).unwrap();
            }
            let bad = m.is_bad_prefix(&w).is_bad;
            for _ in 0..4 {
                let mut wa = w.clone();
                wa.push(idx.decode(rng.gen_range(0..idx.len() as u32)));
                let ext = m.is_bad_prefix(&wa).is_bad;
                ensure(!bad || ext, || format!("{}: bad word has a non-bad extension", f.display(&p)))?;
                pairs += 1;
                bad_pairs += bad as usize;
            }

            // positions forced for every continuation of the input prefix
            let i = rng.gen_range(0..horizon);
            let j = rng.gen_range(0..p.num_outputs());
            let value = full[i].outputs[j];
            if value == TruthValue3::Open {
                continue;
            }
            let n = (i + 1 + rng.gen_range(0..3)).min(horizon);
            let input_prefix: Vec<u32> = full[..n].iter().map(|l| l.input_mask()).collect();
            let other = exists_lang(&spec, i, Prop::output(j), value != TruthValue3::Top);
            let prod = nba_product(&other, &prefix_automaton(&p, &input_prefix)).unwrap();
            if nba_emptiness(&prod).is_some() {
                continue;
            }
            for v in TruthValue3::ALL.into_iter().filter(|v| *v != value) {
                let mut u = full[..n].to_vec();
                u[i].outputs[j] = v;
                ensure(m.is_bad_prefix(&u).is_bad, || format!("{}: mutated forced position {i} not bad", f.display(&p)))?;
                forced += 1;
            }
        }
    }
    Ok(format!(
        "{pairs} extension pairs ({bad_pairs} from bad words), {formulas} formulas ({unsat} unsatisfiable), \
         {prefixes} min-trace prefixes, {forced} forced mutations, 0 violations"
    ))
}

/// Random accepting lassos of the formula automaton restricted to `inputs`.
fn sample_models(rng: &mut ChaCha8Rng, spec: &SpecAutomata, inputs: &InputLasso, count: usize) -> Vec<Lasso<u32>> {
    let product = nba_product(spec.nba(), &spec.oracle().input_automaton(inputs)).unwrap().trim();
    let mut out = Vec::new();
    if product.num_states() == 0 {
        return out;
    }
    for _ in 0..count * 50 {
        if out.len() == count {
            break;
        }
        let mut path = vec![product.initial()];
        let mut letters = Vec::new();
        for _ in 0..64 {
            let q = *path.last().unwrap();
            let Some(&(l, t)) = product.edges(q).choose(rng) else { break };
            letters.push(l);
            if let Some(k) = path.iter().position(|s| *s == t) {
                if path[k..].iter().any(|s| product.is_accepting(*s)) {
                    out.push(Lasso::new(letters[..k].to_vec(), letters[k..].to_vec()));
                }
                break;
            }
            path.push(t);
        }
    }
    out
}

fn oracle_cross_validation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut queries = 0;
    while queries < 500 {
        let (p, f) = random_instance(&mut rng);
        let spec = SpecAutomata::new(&f, &p);
        for _ in 0..5 {
            let inputs = random_input_lasso(&mut rng, &p, 3, 3);
            let i = rng.gen_range(0..8);
            let prop = Prop::output(rng.gen_range(0..p.num_outputs()));
            let a = spec.oracle().forced_value(&inputs, i, prop);
            let b = spec.oracle().forced_value_direct(&inputs, i, prop);
            ensure(a == b, || format!("{}: forced_value {a:?} vs direct {b:?} at {i}", f.display(&p)))?;
            queries += 1;
        }
    }
    let mut instances = 0;
    let mut models = 0;
    let mut attempts = 0;
    while instances < 40 && attempts < 2000 {
        attempts += 1;
        let (p, f) = random_instance(&mut rng);
        let spec = SpecAutomata::new(&f, &p);
        let inputs = random_input_lasso(&mut rng, &p, 2, 3);
        let MinTrace::Trace(trace) = spec.oracle().min_trace(&inputs) else { continue };
        let sample = sample_models(&mut rng, &spec, &inputs, 50);
        if sample.len() < 50 {
            continue;
        }
        for w in &sample {
            ensure(eval_ltl_on_lasso(&f, &p, w), || format!("{}: sampled word is not a model", f.display(&p)))?;
            let horizon = w.stem.len().max(trace.stem.len()) + lcm(w.cycle.len(), trace.cycle.len());
            for k in 0..horizon {
                let (input, output) = p.split(*w.at(k));
                ensure(input == trace.at(k).input_mask(), || format!("{}: sampled model has other inputs", f.display(&p)))?;
                for (j, v) in trace.at(k).outputs.iter().enumerate() {
                    let concrete = TruthValue3::from_bool(output >> j & 1 == 1);
                    ensure(concrete.leq(*v), || format!("{}: model value at {k} not below the min trace", f.display(&p)))?;
                }
            }
            models += 1;
        }
        instances += 1;
    }
    ensure(instances >= 40, || format!("only {instances} instances with 50 sampled models"))?;
    Ok(format!("{queries} forced-value queries agree; {models} sampled models over {instances} instances below their min trace"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 figure reproduction", figure_reproduction),
        ("2 model-checking corpus", model_checking_corpus),
        ("3 complement oracle equivalence", oracle_equivalence),
        ("4 membership properties", membership_properties),
        ("5 oracle cross-validation", oracle_cross_validation),
        ("6 uniqueness and minimality", uniqueness),
        ("7 no-skeleton detection", no_skeleton_detection),
        ("8 learner accounting", learner_accounting),
    ];
    let mut failed = 0;
    let mut stdout = std::io::stdout();
    for (name, check) in criteria {
        let start = Instant::now();
        let line = match check() {
            Ok(detail) => format!("PASS criterion {name}: {detail} [{:.1}s]", start.elapsed().as_secs_f64()),
            Err(why) => {
                failed += 1;
                format!("FAIL criterion {name}: {why}")
            }
        };
        writeln!(stdout, "{line}").unwrap();
    }
    if failed > 0 {
        writeln!(stdout, "{failed} acceptance criteria failed").unwrap();
        std::process::exit(1);
    }
}
