use std::collections::HashMap;

use super::{AutomatonError, BitSet, Letter, Limits, Nba};

/// Transition profile of a nonempty finite word `u`: for each state `q`,
/// the states reachable from `q` reading `u`, and those reachable while
/// entering an accepting state on the way.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Profile {
    /// `2n` rows of `words` u64s each: reach rows, then accepting rows.
    bits: Vec<u64>,
}

/// Finite monoid (semigroup) of transition profiles of an NBA, generated by
/// its letters. Elements are numbered in breadth-first order.
#[derive(Debug, Clone)]
pub struct TransitionMonoid {
    n: usize,
    words: usize,
    elements: Vec<Profile>,
    index: HashMap<Profile, u32>,
    /// `mul[e][a]` = class of `witness(e)·a`
    mul: Vec<Vec<u32>>,
    witness: Vec<Vec<Letter>>,
    of_letter: Vec<u32>,
    idempotents: Vec<u32>,
    acc: Vec<BitSet>,
}

impl TransitionMonoid {
    pub fn new(a: &Nba, limits: &Limits) -> Result<Self, AutomatonError> {
        let n = a.num_states();
        let words = n.div_ceil(64).max(1);
        let n_letters = a.alphabet().size();
        let mut m = TransitionMonoid {
            n,
            words,
            elements: Vec::new(),
            index: HashMap::new(),
            mul: Vec::new(),
            witness: Vec::new(),
            of_letter: Vec::with_capacity(n_letters),
            idempotents: Vec::new(),
            acc: Vec::new(),
        };
        let gens: Vec<Profile> = (0..n_letters as Letter).map(|l| m.letter_profile(a, l)).collect();
        for (l, g) in gens.iter().enumerate() {
            let id = m.intern(g.clone(), vec![l as Letter]);
            m.of_letter.push(id);
        }
        let mut head = 0;
        while head < m.elements.len() {
            let mut row = Vec::with_capacity(n_letters);
            for (l, g) in gens.iter().enumerate() {
                let p = m.compose_profiles(&m.elements[head], g);
                let id = match m.index.get(&p) {
                    Some(&id) => id,
                    None => {
                        let mut w = m.witness[head].clone();
                        w.push(l as Letter);
                        let id = m.intern(p, w);
                        limits.check("transition monoid", m.elements.len())?;
                        id
                    }
                };
                row.push(id);
            }
            m.mul.push(row);
            head += 1;
        }
        for e in 0..m.elements.len() {
            let p = &m.elements[e];
            if m.compose_profiles(p, p) == *p {
                m.idempotents.push(e as u32);
            }
            let acc = m.acc_set(p);
            m.acc.push(acc);
        }
        Ok(m)
    }

    fn intern(&mut self, p: Profile, witness: Vec<Letter>) -> u32 {
        let id = self.elements.len() as u32;
        self.index.insert(p.clone(), id);
        self.elements.push(p);
        self.witness.push(witness);
        id
    }

    fn row<'p>(&self, p: &'p Profile, r: usize) -> &'p [u64] {
        &p.bits[r * self.words..(r + 1) * self.words]
    }

    fn letter_profile(&self, a: &Nba, l: Letter) -> Profile {
        let mut bits = vec![0u64; 2 * self.n * self.words];
        for q in 0..self.n {
            for t in a.successors(q as u32, l) {
                let t = t as usize;
                bits[q * self.words + t / 64] |= 1 << (t % 64);
                if a.is_accepting(t as u32) {
                    bits[(self.n + q) * self.words + t / 64] |= 1 << (t % 64);
                }
            }
        }
        Profile { bits }
    }

    fn compose_profiles(&self, s: &Profile, t: &Profile) -> Profile {
        let (n, w) = (self.n, self.words);
        let mut bits = vec![0u64; 2 * n * w];
        for q in 0..n {
            let reach = self.row(s, q);
            let reach_f = self.row(s, n + q);
            for (wi, &word) in reach.iter().enumerate() {
                let mut word = word;
                while word != 0 {
                    let mid = wi * 64 + word.trailing_zeros() as usize;
                    word &= word - 1;
                    let f_via = reach_f[wi] >> (mid % 64) & 1 == 1;
                    for k in 0..w {
                        let tr = t.bits[mid * w + k];
                        bits[q * w + k] |= tr;
                        bits[(n + q) * w + k] |= t.bits[(n + mid) * w + k];
                        if f_via {
                            bits[(n + q) * w + k] |= tr;
                        }
                    }
                }
            }
        }
        Profile { bits }
    }

    fn acc_set(&self, p: &Profile) -> BitSet {
        let mut out = BitSet::new(self.n);
        for q1 in 0..self.n {
            let reach = self.row(p, q1);
            let hit = (0..self.n).any(|q2| {
                reach[q2 / 64] >> (q2 % 64) & 1 == 1
                    && self.row(p, self.n + q2)[q2 / 64] >> (q2 % 64) & 1 == 1
            });
            if hit {
                out.insert(q1);
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn of_letter(&self, l: Letter) -> u32 {
        self.of_letter[l as usize]
    }

    /// Class of `witness(e)·l`.
    pub fn mul_letter(&self, e: u32, l: Letter) -> u32 {
        self.mul[e as usize][l as usize]
    }

    /// Class of `witness(e)·witness(f)`.
    pub fn mul(&self, e: u32, f: u32) -> u32 {
        self.witness[f as usize].iter().fold(e, |acc, &l| self.mul_letter(acc, l))
    }

    pub fn witness(&self, e: u32) -> &[Letter] {
        &self.witness[e as usize]
    }

    pub fn idempotents(&self) -> &[u32] {
        &self.idempotents
    }

    /// For idempotent `e`: states from which `witness(e)^ω` has an
    /// accepting run.
    pub fn acc(&self, e: u32) -> &BitSet {
        &self.acc[e as usize]
    }

    /// States reachable from some state of `from` reading `witness(e)`.
    pub fn image(&self, from: &BitSet, e: u32) -> BitSet {
        let p = &self.elements[e as usize];
        let mut out = BitSet::new(self.n);
        for q in from.iter() {
            for (o, r) in out.words_mut().iter_mut().zip(self.row(p, q)) {
                *o |= r;
            }
        }
        out
    }
}
