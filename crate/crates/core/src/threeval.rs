//! Three-valued letters, finite open words and ultimately periodic words.

use std::fmt;

use thiserror::Error;

use crate::ltl::{Partition, PropKind};

/// `⊤`, `⊥` or open (`?`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TruthValue3 {
    Bot,
    Top,
    Open,
}

impl TruthValue3 {
    pub const ALL: [TruthValue3; 3] = [TruthValue3::Bot, TruthValue3::Top, TruthValue3::Open];

    pub fn from_bool(b: bool) -> Self {
        if b {
            TruthValue3::Top
        } else {
            TruthValue3::Bot
        }
    }

    /// The information order: `⊥ ⪯ ?`, `⊤ ⪯ ?`, and reflexivity.
    pub fn leq(self, other: TruthValue3) -> bool {
        self == other || other == TruthValue3::Open
    }

    fn digit(self) -> u32 {
        match self {
            TruthValue3::Bot => 0,
            TruthValue3::Top => 1,
            TruthValue3::Open => 2,
        }
    }

    fn from_digit(d: u32) -> Self {
        match d {
            0 => TruthValue3::Bot,
            1 => TruthValue3::Top,
            _ => TruthValue3::Open,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            TruthValue3::Bot => '0',
            TruthValue3::Top => '1',
            TruthValue3::Open => '?',
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LetterError {
    #[error("letters are over different proposition partitions")]
    PartitionMismatch,
    #[error("input propositions cannot be substituted")]
    InputSubstitution,
    #[error("letter syntax at offset {position}: {message}")]
    Syntax { position: usize, message: String },
}

/// A letter of `3^O × 2^I`: open outputs, two-valued inputs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpenLetter {
    pub inputs: Vec<bool>,
    pub outputs: Vec<TruthValue3>,
}

impl OpenLetter {
    pub fn new(inputs: Vec<bool>, outputs: Vec<TruthValue3>) -> Self {
        OpenLetter { inputs, outputs }
    }

    pub fn input_mask(&self) -> u32 {
        self.inputs.iter().enumerate().fold(0, |m, (i, &b)| m | ((b as u32) << i))
    }

    pub fn is_concrete(&self) -> bool {
        self.outputs.iter().all(|v| *v != TruthValue3::Open)
    }

    /// Concrete `2^AP` letter; `None` if some output is open.
    pub fn concrete_mask(&self) -> Option<u32> {
        let n_in = self.inputs.len();
        let mut m = self.input_mask();
        for (j, v) in self.outputs.iter().enumerate() {
            match v {
                TruthValue3::Top => m |= 1 << (n_in + j),
                TruthValue3::Bot => {}
                TruthValue3::Open => return None,
            }
        }
        Some(m)
    }

    pub fn from_concrete(partition: &Partition, letter: u32) -> Self {
        let (i, o) = partition.split(letter);
        OpenLetter {
            inputs: (0..partition.num_inputs()).map(|k| i >> k & 1 == 1).collect(),
            outputs: (0..partition.num_outputs())
                .map(|k| TruthValue3::from_bool(o >> k & 1 == 1))
                .collect(),
        }
    }

    fn same_shape(&self, other: &OpenLetter) -> bool {
        self.inputs.len() == other.inputs.len() && self.outputs.len() == other.outputs.len()
    }

    /// `v[p ↦ b]` for an output proposition `p`.
    pub fn substitute(
        &self,
        prop: crate::ltl::Prop,
        value: bool,
    ) -> Result<OpenLetter, LetterError> {
        if prop.kind == PropKind::Input {
            return Err(LetterError::InputSubstitution);
        }
        if prop.index >= self.outputs.len() {
            return Err(LetterError::PartitionMismatch);
        }
        let mut out = self.clone();
        out.outputs[prop.index] = TruthValue3::from_bool(value);
        Ok(out)
    }

    pub fn display<'a>(&'a self, partition: &'a Partition) -> LetterDisplay<'a> {
        LetterDisplay { letter: self, partition }
    }
}

/// `v ⊑ v'`: pointwise `⪯` on outputs, equality on inputs.
pub fn leq_letter(a: &OpenLetter, b: &OpenLetter) -> Result<bool, LetterError> {
    if !a.same_shape(b) {
        return Err(LetterError::PartitionMismatch);
    }
    Ok(a.inputs == b.inputs && a.outputs.iter().zip(&b.outputs).all(|(x, y)| x.leq(*y)))
}

pub struct LetterDisplay<'a> {
    letter: &'a OpenLetter,
    partition: &'a Partition,
}

impl fmt::Display for LetterDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, b) in self.letter.inputs.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}={}", self.partition.inputs()[k], *b as u8)?;
        }
        write!(f, "|")?;
        for (k, v) in self.letter.outputs.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}={}", self.partition.outputs()[k], v.symbol())?;
        }
        write!(f, "}}")
    }
}

/// Dense numbering of the letters of `3^O × 2^I`.
///
/// Index layout: `inputs + 2^|I| · Σ_j digit(o_j)·3^j` with digits
/// `⊥ = 0`, `⊤ = 1`, `? = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpenLetterIndex {
    pub num_inputs: usize,
    pub num_outputs: usize,
}

impl OpenLetterIndex {
    pub fn new(partition: &Partition) -> Self {
        OpenLetterIndex { num_inputs: partition.num_inputs(), num_outputs: partition.num_outputs() }
    }

    pub fn len(&self) -> usize {
        (1usize << self.num_inputs) * 3usize.pow(self.num_outputs as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn input_count(&self) -> usize {
        1 << self.num_inputs
    }

    pub fn encode(&self, l: &OpenLetter) -> u32 {
        let mut code = 0u32;
        for v in l.outputs.iter().rev() {
            code = code * 3 + v.digit();
        }
        l.input_mask() | (code << self.num_inputs)
    }

    pub fn decode(&self, idx: u32) -> OpenLetter {
        let n_in = self.num_inputs;
        let inputs = (0..n_in).map(|k| idx >> k & 1 == 1).collect();
        let mut code = idx >> n_in;
        let mut outputs = Vec::with_capacity(self.num_outputs);
        for _ in 0..self.num_outputs {
            outputs.push(TruthValue3::from_digit(code % 3));
            code /= 3;
        }
        OpenLetter { inputs, outputs }
    }

    pub fn input_of(&self, idx: u32) -> u32 {
        idx & ((1 << self.num_inputs) - 1)
    }

    /// Output digit of proposition `j` in letter `idx`.
    pub fn output_of(&self, idx: u32, j: usize) -> TruthValue3 {
        TruthValue3::from_digit((idx >> self.num_inputs) / 3u32.pow(j as u32) % 3)
    }

    /// Output part as a packed base-3 code (shared by all letters with equal outputs).
    pub fn output_code(&self, idx: u32) -> u32 {
        idx >> self.num_inputs
    }

    pub fn compose(&self, input: u32, output_code: u32) -> u32 {
        input | (output_code << self.num_inputs)
    }

    /// Concrete outputs (bitmask) compatible with the letter's three-valued outputs.
    pub fn instantiations(&self, idx: u32) -> Vec<u32> {
        let mut out = vec![0u32];
        for j in 0..self.num_outputs {
            match self.output_of(idx, j) {
                TruthValue3::Bot => {}
                TruthValue3::Top => out.iter_mut().for_each(|m| *m |= 1 << j),
                TruthValue3::Open => {
                    let with: Vec<u32> = out.iter().map(|m| m | 1 << j).collect();
                    out.extend(with);
                }
            }
        }
        out
    }

    pub fn all(&self) -> impl Iterator<Item = OpenLetter> + '_ {
        (0..self.len() as u32).map(|i| self.decode(i))
    }
}

/// Finite word over open letters.
pub type OpenWord = Vec<OpenLetter>;

/// Ultimately periodic word `stem · cycle^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lasso<T> {
    pub stem: Vec<T>,
    pub cycle: Vec<T>,
}

/// Lasso over open letters.
pub type OpenLasso = Lasso<OpenLetter>;
/// Lasso over input valuations (bitmasks over `I`).
pub type InputLasso = Lasso<u32>;
/// Lasso over concrete `2^AP` letters (bitmasks, inputs first).
pub type ConcreteLasso = Lasso<u32>;

impl<T: Clone + PartialEq> Lasso<T> {
    /// Panics if `cycle` is empty.
    pub fn new(stem: Vec<T>, cycle: Vec<T>) -> Self {
        assert!(!cycle.is_empty(), "lasso loop must be nonempty");
        Lasso { stem, cycle }
    }

    pub fn at(&self, i: usize) -> &T {
        if i < self.stem.len() {
            &self.stem[i]
        } else {
            &self.cycle[(i - self.stem.len()) % self.cycle.len()]
        }
    }

    /// Number of distinct positions of the finite representation.
    pub fn len(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Successor of a representation position.
    pub fn succ(&self, pos: usize) -> usize {
        if pos + 1 < self.len() {
            pos + 1
        } else {
            self.stem.len()
        }
    }

    /// Position in the representation of absolute index `i`.
    pub fn position(&self, i: usize) -> usize {
        if i < self.stem.len() {
            i
        } else {
            self.stem.len() + (i - self.stem.len()) % self.cycle.len()
        }
    }

    pub fn map<U: Clone + PartialEq>(&self, f: impl Fn(&T) -> U) -> Lasso<U> {
        Lasso { stem: self.stem.iter().map(&f).collect(), cycle: self.cycle.iter().map(&f).collect() }
    }

    pub fn prefix(&self, n: usize) -> Vec<T> {
        (0..n).map(|i| self.at(i).clone()).collect()
    }

    /// Canonical form: loop rolled into the stem as far as possible and
    /// reduced to its primitive period.
    pub fn normalized(&self) -> Self {
        let mut cycle = self.cycle.clone();
        let n = cycle.len();
        for d in 1..=n {
            if n.is_multiple_of(d) && (d..n).all(|k| cycle[k] == cycle[k - d]) {
                cycle.truncate(d);
                break;
            }
        }
        let mut stem = self.stem.clone();
        while let Some(last) = stem.last() {
            if *last == cycle[cycle.len() - 1] {
                stem.pop();
                cycle.rotate_right(1);
            } else {
                break;
            }
        }
        Lasso { stem, cycle }
    }

    /// Equality of the denoted infinite words.
    pub fn same_word(&self, other: &Self) -> bool {
        self.normalized() == other.normalized()
    }

    /// Number of positions after which both lassos are jointly periodic.
    pub fn joint_horizon(&self, other: &Lasso<T>) -> usize {
        self.stem.len() + other.stem.len() + lcm(self.cycle.len(), other.cycle.len())
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// `σ ⊑ σ'` on the denoted infinite words.
pub fn leq_lasso(a: &OpenLasso, b: &OpenLasso) -> Result<bool, LetterError> {
    for i in 0..a.joint_horizon(b) {
        if !leq_letter(a.at(i), b.at(i))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Raw letters as written in text: inputs may be open here, which the
/// core alphabet forbids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawLetter {
    pub inputs: Vec<TruthValue3>,
    pub outputs: Vec<TruthValue3>,
}

impl RawLetter {
    pub fn to_open(&self) -> Option<OpenLetter> {
        let inputs = self
            .inputs
            .iter()
            .map(|v| match v {
                TruthValue3::Top => Some(true),
                TruthValue3::Bot => Some(false),
                TruthValue3::Open => None,
            })
            .collect::<Option<Vec<bool>>>()?;
        Some(OpenLetter { inputs, outputs: self.outputs.clone() })
    }
}

struct TextCursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> TextCursor<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src.as_bytes()[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.as_bytes().get(self.pos).copied()
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, LetterError> {
        Err(LetterError::Syntax { position: self.pos, message: message.into() })
    }

    fn expect(&mut self, c: u8) -> Result<(), LetterError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{}`", c as char))
        }
    }

    fn ident(&mut self) -> Result<&'a str, LetterError> {
        self.skip_ws();
        let start = self.pos;
        let b = self.src.as_bytes();
        while self.pos < b.len() && (b[self.pos].is_ascii_alphanumeric() || b[self.pos] == b'_') {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a proposition name");
        }
        Ok(&self.src[start..self.pos])
    }

    fn letter(&mut self, partition: &Partition, require_outputs: bool) -> Result<RawLetter, LetterError> {
        self.expect(b'{')?;
        let mut inputs = vec![None; partition.num_inputs()];
        let mut outputs = vec![None; partition.num_outputs()];
        let mut first = true;
        loop {
            match self.peek() {
                Some(b'}') => {
                    self.pos += 1;
                    break;
                }
                Some(b',') | Some(b'|') if !first => self.pos += 1,
                Some(b'|') => self.pos += 1,
                _ if first => {}
                _ => return self.err("expected `,`, `|` or `}`"),
            }
            if self.peek() == Some(b'}') {
                self.pos += 1;
                break;
            }
            first = false;
            let at = self.pos;
            let name = self.ident()?;
            self.expect(b'=')?;
            let value = match self.peek() {
                Some(b'1') | Some(b'T') => TruthValue3::Top,
                Some(b'0') | Some(b'F') => TruthValue3::Bot,
                Some(b'?') => TruthValue3::Open,
                _ => return self.err("expected `0`, `1` or `?`"),
            };
            self.pos += 1;
            let slot = match partition.lookup(name) {
                Some(p) if p.kind == PropKind::Input => &mut inputs[p.index],
                Some(p) => &mut outputs[p.index],
                None => {
                    return Err(LetterError::Syntax {
                        position: at,
                        message: format!("unknown proposition `{name}`"),
                    })
                }
            };
            if slot.replace(value).is_some() {
                return Err(LetterError::Syntax {
                    position: at,
                    message: format!("`{name}` assigned twice"),
                });
            }
        }
        let fill = |v: Vec<Option<TruthValue3>>, what: &str, required: bool, pos: usize| {
            v.into_iter()
                .map(|x| match (x, required) {
                    (Some(x), _) => Ok(x),
                    (None, true) => Err(LetterError::Syntax {
                        position: pos,
                        message: format!("letter does not assign every {what}"),
                    }),
                    (None, false) => Ok(TruthValue3::Open),
                })
                .collect::<Result<Vec<_>, _>>()
        };
        Ok(RawLetter {
            inputs: fill(inputs, "input", true, self.pos)?,
            outputs: fill(outputs, "output", require_outputs, self.pos)?,
        })
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }
}

/// Parse a whitespace-separated sequence of raw letters, e.g.
/// `{r1=1|g1=0,g2=0} {r1=1|g1=?,g2=?}`.
pub fn parse_raw_word(text: &str, partition: &Partition) -> Result<Vec<RawLetter>, LetterError> {
    let mut c = TextCursor { src: text, pos: 0 };
    let mut out = Vec::new();
    while !c.at_end() {
        out.push(c.letter(partition, true)?);
    }
    Ok(out)
}

pub fn parse_letter(text: &str, partition: &Partition) -> Result<OpenLetter, LetterError> {
    let mut c = TextCursor { src: text, pos: 0 };
    let raw = c.letter(partition, true)?;
    if !c.at_end() {
        return c.err("trailing input");
    }
    raw.to_open().ok_or(LetterError::Syntax { position: 0, message: "open input value".into() })
}

fn parse_lasso_raw(
    text: &str,
    partition: &Partition,
    require_outputs: bool,
) -> Result<Lasso<RawLetter>, LetterError> {
    let mut c = TextCursor { src: text, pos: 0 };
    let mut stem = Vec::new();
    while c.peek() == Some(b'{') {
        stem.push(c.letter(partition, require_outputs)?);
    }
    c.expect(b'(')?;
    let mut cycle = Vec::new();
    while c.peek() == Some(b'{') {
        cycle.push(c.letter(partition, require_outputs)?);
    }
    c.expect(b')')?;
    c.expect(b'^')?;
    c.expect(b'w')?;
    if !c.at_end() {
        return c.err("trailing input after `^w`");
    }
    if cycle.is_empty() {
        return c.err("lasso loop must be nonempty");
    }
    Ok(Lasso { stem, cycle })
}

/// Parse `w1 w2 ( w3 w4 )^w`.
pub fn parse_open_lasso(text: &str, partition: &Partition) -> Result<OpenLasso, LetterError> {
    let raw = parse_lasso_raw(text, partition, true)?;
    let conv = |v: Vec<RawLetter>| {
        v.iter()
            .map(|l| l.to_open())
            .collect::<Option<Vec<_>>>()
            .ok_or(LetterError::Syntax { position: 0, message: "open input value".into() })
    };
    Ok(Lasso { stem: conv(raw.stem)?, cycle: conv(raw.cycle)? })
}

/// Parse an input lasso; letters assign inputs only, e.g. `{r1=1} ({r1=0})^w`.
pub fn parse_input_lasso(text: &str, partition: &Partition) -> Result<InputLasso, LetterError> {
    let raw = parse_lasso_raw(text, partition, false)?;
    let conv = |v: Vec<RawLetter>| {
        v.iter()
            .map(|l| l.to_open().map(|o| o.input_mask()))
            .collect::<Option<Vec<_>>>()
            .ok_or(LetterError::Syntax { position: 0, message: "open input value".into() })
    };
    Ok(Lasso { stem: conv(raw.stem)?, cycle: conv(raw.cycle)? })
}

pub fn format_word(word: &[OpenLetter], partition: &Partition) -> String {
    word.iter().map(|l| l.display(partition).to_string()).collect::<Vec<_>>().join(" ")
}

pub fn format_open_lasso(lasso: &OpenLasso, partition: &Partition) -> String {
    let mut s = String::new();
    for l in &lasso.stem {
        s.push_str(&l.display(partition).to_string());
        s.push(' ');
    }
    s.push_str("( ");
    for l in &lasso.cycle {
        s.push_str(&l.display(partition).to_string());
        s.push(' ');
    }
    s.push_str(")^w");
    s
}

pub fn format_input_lasso(lasso: &InputLasso, partition: &Partition) -> String {
    let letter = |m: &u32| {
        let parts: Vec<String> = partition
            .inputs()
            .iter()
            .enumerate()
            .map(|(k, n)| format!("{n}={}", m >> k & 1))
            .collect();
        format!("{{{}}}", parts.join(","))
    };
    let stem: Vec<String> = lasso.stem.iter().map(letter).collect();
    let cycle: Vec<String> = lasso.cycle.iter().map(letter).collect();
    let mut s = stem.join(" ");
    if !s.is_empty() {
        s.push(' ');
    }
    format!("{s}( {} )^w", cycle.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::Prop;
    use TruthValue3::*;

    fn part() -> Partition {
        Partition::new(&["r1", "r2"], &["g1", "g2"]).unwrap()
    }

    fn l(outputs: &[TruthValue3]) -> OpenLetter {
        OpenLetter::new(vec![], outputs.to_vec())
    }

    #[test]
    fn order_examples() {
        assert!(leq_letter(&l(&[Bot]), &l(&[Open])).unwrap());
        assert!(!leq_letter(&l(&[Bot]), &l(&[Top])).unwrap());
        assert!(leq_letter(&l(&[Open, Top]), &l(&[Open, Open])).unwrap());
        assert_eq!(leq_letter(&l(&[Open]), &l(&[Open, Top])), Err(LetterError::PartitionMismatch));
    }

    #[test]
    fn lattice_is_exactly_five_pairs() {
        let pairs: Vec<_> = TruthValue3::ALL
            .iter()
            .flat_map(|a| TruthValue3::ALL.iter().map(move |b| (*a, *b)))
            .filter(|(a, b)| a.leq(*b))
            .collect();
        assert_eq!(pairs.len(), 5);
        assert!(pairs.contains(&(Bot, Open)) && pairs.contains(&(Top, Open)));
    }

    #[test]
    fn lasso_order_examples() {
        let bots = Lasso::new(vec![], vec![l(&[Bot])]);
        let opens = Lasso::new(vec![l(&[Open])], vec![l(&[Open]), l(&[Open])]);
        assert!(leq_lasso(&bots, &bots).unwrap());
        assert!(leq_lasso(&bots, &opens).unwrap());
        assert!(!leq_lasso(&opens, &bots).unwrap());
    }

    #[test]
    fn substitution() {
        let v = l(&[Open]);
        assert_eq!(v.substitute(Prop::output(0), true).unwrap(), l(&[Top]));
        let v = l(&[Top, Open]);
        assert_eq!(v.substitute(Prop::output(1), false).unwrap(), l(&[Top, Bot]));
        let v = OpenLetter::new(vec![false], vec![Bot]);
        assert_eq!(v.substitute(Prop::input(0), true), Err(LetterError::InputSubstitution));
    }

    #[test]
    fn letter_index_is_a_bijection() {
        let idx = OpenLetterIndex::new(&part());
        assert_eq!(idx.len(), 36);
        let letters: std::collections::HashSet<OpenLetter> = idx.all().collect();
        assert_eq!(letters.len(), 36);
        for i in 0..36u32 {
            assert_eq!(idx.encode(&idx.decode(i)), i);
        }
        let open = idx.encode(&OpenLetter::new(vec![true, false], vec![Open, Top]));
        assert_eq!(idx.instantiations(open).len(), 2);
    }

    #[test]
    fn lasso_normalization() {
        let a = Lasso::new(vec![1, 2, 1], vec![2, 1]);
        let b = Lasso::new(vec![], vec![1, 2]);
        assert!(a.same_word(&b));
        assert_eq!(a.normalized(), b);
        let c = Lasso::new(vec![3], vec![1, 2, 1, 2]);
        assert_eq!(c.normalized(), Lasso::new(vec![3], vec![1, 2]));
        assert!(!c.same_word(&b));
    }

    #[test]
    fn text_syntax_roundtrip() {
        let p = part();
        let text = "{r1=1,r2=0|g1=?,g2=0} ( {r1=0,r2=0|g1=1,g2=?} )^w";
        let lasso = parse_open_lasso(text, &p).unwrap();
        assert_eq!(lasso.stem.len(), 1);
        let printed = format_open_lasso(&lasso, &p);
        assert_eq!(parse_open_lasso(&printed, &p).unwrap(), lasso);
        let raw = parse_raw_word("{r1=?,r2=0|g1=0,g2=0}", &p).unwrap();
        assert!(raw[0].to_open().is_none());
        assert!(parse_raw_word("{r1=1|g1=0,g2=0}", &p).is_err());
        let inputs = parse_input_lasso("{r1=1,r2=0} ({r1=0,r2=1})^w", &p).unwrap();
        assert_eq!(inputs, Lasso::new(vec![1], vec![2]));
    }
}
