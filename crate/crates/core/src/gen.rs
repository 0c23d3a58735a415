//! Random formulas and words for property tests and fuzzing.

use rand::Rng;

use crate::ltl::{Formula, Partition, Prop};
use crate::threeval::{ConcreteLasso, InputLasso, Lasso, OpenLasso, OpenLetter, TruthValue3};

/// Random formula with exactly `size` nodes over the declared propositions.
pub fn random_formula<R: Rng>(rng: &mut R, partition: &Partition, size: usize) -> Formula {
    let size = size.max(1);
    let n_props = partition.num_props();
    if size == 1 {
        if n_props == 0 || rng.gen_bool(0.1) {
            return if rng.gen() { Formula::True } else { Formula::False };
        }
        let k = rng.gen_range(0..n_props);
        let p = if k < partition.num_inputs() {
            Prop::input(k)
        } else {
            Prop::output(k - partition.num_inputs())
        };
        return Formula::atom(p);
    }
    if size == 2 || rng.gen_bool(0.4) {
        let a = random_formula(rng, partition, size - 1);
        return match rng.gen_range(0..4) {
            0 => Formula::not(a),
            1 => Formula::next(a),
            2 => Formula::eventually(a),
            _ => Formula::globally(a),
        };
    }
    let left = rng.gen_range(1..size - 1);
    let a = random_formula(rng, partition, left);
    let b = random_formula(rng, partition, size - 1 - left);
    match rng.gen_range(0..6) {
        0 => Formula::and(a, b),
        1 => Formula::or(a, b),
        2 => Formula::implies(a, b),
        3 => Formula::until(a, b),
        4 => Formula::release(a, b),
        _ => Formula::and(a, b),
    }
}

fn random_shape<R: Rng>(rng: &mut R, max_stem: usize, max_cycle: usize) -> (usize, usize) {
    (rng.gen_range(0..=max_stem), rng.gen_range(1..=max_cycle.max(1)))
}

pub fn random_input_lasso<R: Rng>(
    rng: &mut R,
    partition: &Partition,
    max_stem: usize,
    max_cycle: usize,
) -> InputLasso {
    let (s, c) = random_shape(rng, max_stem, max_cycle);
    let n = 1u32 << partition.num_inputs();
    let mut letter = || rng.gen_range(0..n);
    let stem = (0..s).map(|_| letter()).collect();
    let cycle = (0..c).map(|_| letter()).collect();
    Lasso::new(stem, cycle)
}

pub fn random_concrete_lasso<R: Rng>(
    rng: &mut R,
    partition: &Partition,
    max_stem: usize,
    max_cycle: usize,
) -> ConcreteLasso {
    let (s, c) = random_shape(rng, max_stem, max_cycle);
    let n = 1u32 << partition.num_props();
    let mut letter = || rng.gen_range(0..n);
    let stem = (0..s).map(|_| letter()).collect();
    let cycle = (0..c).map(|_| letter()).collect();
    Lasso::new(stem, cycle)
}

pub fn random_open_letter<R: Rng>(rng: &mut R, partition: &Partition) -> OpenLetter {
    let inputs = (0..partition.num_inputs()).map(|_| rng.gen()).collect();
    let outputs = (0..partition.num_outputs())
        .map(|_| TruthValue3::ALL[rng.gen_range(0..3)])
        .collect();
    OpenLetter::new(inputs, outputs)
}

pub fn random_open_lasso<R: Rng>(
    rng: &mut R,
    partition: &Partition,
    max_stem: usize,
    max_cycle: usize,
) -> OpenLasso {
    let (s, c) = random_shape(rng, max_stem, max_cycle);
    let stem = (0..s).map(|_| random_open_letter(rng, partition)).collect();
    let cycle = (0..c).map(|_| random_open_letter(rng, partition)).collect();
    Lasso::new(stem, cycle)
}
