use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skelsynth::automata::{
    ltl_to_nba, ltl_to_ucw, nba_complement, nba_emptiness, nba_membership, nba_product, project_inputs,
};
use skelsynth::gen::{random_concrete_lasso, random_formula};
use skelsynth::ltl::{parse, Partition};
use skelsynth::oracle::eval_ltl_on_lasso;
use skelsynth::threeval::Lasso;

fn partition(rng: &mut ChaCha8Rng) -> Arc<Partition> {
    let ni = rng.gen_range(0..=2);
    let no = rng.gen_range(1..=2);
    Arc::new(Partition::new(&["r1", "r2"][..ni], &["g1", "g2"][..no]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn buchi_translation_agrees_with_evaluation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = partition(&mut rng);
        let size = rng.gen_range(1..=10);
        let f = random_formula(&mut rng, &p, size);
        let nba = ltl_to_nba(&f, &p);
        let ucw = ltl_to_ucw(&f, &p);
        for _ in 0..10 {
            let w = random_concrete_lasso(&mut rng, &p, 3, 3);
            let truth = eval_ltl_on_lasso(&f, &p, &w);
            prop_assert_eq!(nba_membership(&nba, &w).unwrap(), truth, "{}", f.display(&p));
            prop_assert_eq!(ucw.accepts(&w).unwrap(), truth);
        }
    }

    #[test]
    fn complement_is_exact(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = partition(&mut rng);
        let size = rng.gen_range(1..=7);
        let f = random_formula(&mut rng, &p, size);
        let nba = ltl_to_nba(&f, &p);
        let co = nba_complement(&nba).unwrap();
        prop_assert!(nba_emptiness(&nba_product(&nba, &co).unwrap()).is_none());
        for _ in 0..10 {
            let w = random_concrete_lasso(&mut rng, &p, 3, 3);
            prop_assert_ne!(nba_membership(&co, &w).unwrap(), eval_ltl_on_lasso(&f, &p, &w));
        }
    }

    #[test]
    fn projection_keeps_inputs_of_models(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = partition(&mut rng);
        let size = rng.gen_range(1..=8);
        let f = random_formula(&mut rng, &p, size);
        let nba = ltl_to_nba(&f, &p);
        let projected = project_inputs(&nba);
        for _ in 0..10 {
            let w = random_concrete_lasso(&mut rng, &p, 3, 3);
            if eval_ltl_on_lasso(&f, &p, &w) {
                let inputs = w.map(|l| p.split(*l).0);
                prop_assert!(nba_membership(&projected, &inputs).unwrap());
            }
        }
    }
}

#[test]
fn emptiness_witness_is_a_model() {
    let p = Arc::new(Partition::new(&["r1"], &["g1"]).unwrap());
    for text in ["G F g1 & F G !r1", "r1 U (g1 & X !g1)", "G (r1 -> X g1) & F r1"] {
        let f = parse(text, &p).unwrap();
        let w = nba_emptiness(&ltl_to_nba(&f, &p)).expect("satisfiable").word();
        assert!(eval_ltl_on_lasso(&f, &p, &w), "{text}");
    }
    let f = parse("G g1 & F !g1", &p).unwrap();
    assert!(nba_emptiness(&ltl_to_nba(&f, &p)).is_none());
    assert!(!ltl_to_ucw(&f, &p).accepts(&Lasso::new(vec![], vec![0b10])).unwrap());
}
