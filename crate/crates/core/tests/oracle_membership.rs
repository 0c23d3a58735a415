use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skelsynth::automata::Limits;
use skelsynth::gen::{random_formula, random_input_lasso, random_open_letter};
use skelsynth::ltl::{parse, Partition, Prop};
use skelsynth::membership::{is_bad_prefix_by_conditions, Membership};
use skelsynth::minlang::SpecAutomata;
use skelsynth::oracle::{ForcedStatus, MinTrace};
use skelsynth::threeval::{OpenLetter, TruthValue3};

fn instance(rng: &mut ChaCha8Rng, max_size: usize) -> (Arc<Partition>, Arc<SpecAutomata>) {
    let ni = rng.gen_range(0..=2);
    let no = rng.gen_range(1..=2);
    let p = Arc::new(Partition::new(&["r1", "r2"][..ni], &["g1", "g2"][..no]).unwrap());
    let size = rng.gen_range(1..=max_size);
    let f = random_formula(rng, &p, size);
    let spec = Arc::new(SpecAutomata::new(&f, &p));
    (p, spec)
}

#[test]
fn min_trace_agrees_with_forced_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..60 {
        let (p, spec) = instance(&mut rng, 9);
        let o = spec.oracle();
        for _ in 0..5 {
            let inputs = random_input_lasso(&mut rng, &p, 2, 3);
            match o.min_trace(&inputs) {
                MinTrace::NoModel => assert!(!o.has_model(&inputs)),
                MinTrace::Trace(t) => {
                    assert!(t.map(OpenLetter::input_mask).same_word(&inputs));
                    for i in 0..t.stem.len() + t.cycle.len() {
                        for j in 0..p.num_outputs() {
                            let status = o.forced_value_direct(&inputs, i, Prop::output(j));
                            assert_eq!(status.expected(), Some(t.at(i).outputs[j]));
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn forced_value_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..80 {
        let (p, spec) = instance(&mut rng, 10);
        let inputs = random_input_lasso(&mut rng, &p, 3, 3);
        let i = rng.gen_range(0..7);
        let prop = Prop::output(rng.gen_range(0..p.num_outputs()));
        assert_eq!(spec.oracle().forced_value(&inputs, i, prop), spec.oracle().forced_value_direct(&inputs, i, prop));
    }
}

#[test]
fn forced_value_examples() {
    let p = Arc::new(Partition::new(&["r1"], &["g1"]).unwrap());
    let spec = SpecAutomata::new(&parse("G (r1 -> X g1)", &p).unwrap(), &p);
    let ones = random_input_lasso(&mut ChaCha8Rng::seed_from_u64(0), &p, 0, 1).map(|_| 1u32);
    let g1 = Prop::output(0);
    assert_eq!(spec.oracle().forced_value(&ones, 0, g1), ForcedStatus::Open);
    assert_eq!(spec.oracle().forced_value(&ones, 1, g1), ForcedStatus::Forced(true));
    let spec = SpecAutomata::new(&parse("G (r1 -> g1) & G (r1 -> !g1)", &p).unwrap(), &p);
    assert_eq!(spec.oracle().forced_value(&ones, 0, g1), ForcedStatus::NoModel);
}

#[test]
fn suffix_types_agree_with_condition_automata() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let limits = Limits::default();
    for _ in 0..40 {
        let (p, spec) = instance(&mut rng, 7);
        let m = Membership::new(spec.clone(), &limits).unwrap();
        for _ in 0..4 {
            let len = rng.gen_range(0..=3);
            let w: Vec<OpenLetter> = (0..len).map(|_| random_open_letter(&mut rng, &p)).collect();
            let by_conditions = is_bad_prefix_by_conditions(&spec, &w, &limits).unwrap();
            assert_eq!(m.is_bad_prefix(&w).is_bad, by_conditions, "{}", spec.formula().display(&p));
        }
    }
}

#[test]
fn good_words_extend_to_their_min_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..60 {
        let (p, spec) = instance(&mut rng, 9);
        let m = Membership::new(spec.clone(), &Limits::default()).unwrap();
        let MinTrace::Trace(t) = spec.oracle().min_trace(&random_input_lasso(&mut rng, &p, 2, 2)) else { continue };
        let n = rng.gen_range(0..=4);
        let mut w = t.prefix(n);
        if n > 0 && rng.gen_bool(0.5) {
            w[n - 1].outputs[0] = TruthValue3::ALL[rng.gen_range(0..3)];
        }
        let verdict = m.is_bad_prefix(&w);
        match m.witness_extension(&w) {
            Some(inputs) => {
                assert!(!verdict.is_bad);
                let MinTrace::Trace(ext) = spec.oracle().min_trace(&inputs) else { panic!("witness has no model") };
                assert_eq!(ext.prefix(n), w);
            }
            None => assert!(verdict.is_bad && verdict.reason.is_some()),
        }
    }
}
