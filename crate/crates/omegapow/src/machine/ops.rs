//! Closure operations: regular intersection, union, morphic image and
//! real-time padding.
//!
//! Each operation is a [`CounterSystem`] wrapping its operands. State
//! identifiers are packed as `inner << w | local`, so composing operations
//! costs only a few bits per layer.

use std::sync::Arc;

use super::{
    bits_for, materialize, Acceptance, CounterMachine, CounterSystem, Delta, Edge, MachineError,
    Pattern, SharedSystem, StateId,
};
use crate::dfa::Dfa;
use crate::letter::{Letter, Word};

pub fn check_width(bits: u32) -> Result<u32, MachineError> {
    if bits > 128 {
        Err(MachineError::StateSpaceTooWide(bits))
    } else {
        Ok(bits)
    }
}

fn mask(bits: u32) -> u128 {
    (1u128 << bits) - 1
}

/// Product of a system with a DFA over the same alphabet.
pub struct RegularProduct {
    inner: SharedSystem,
    dfa: Dfa,
    dbits: u32,
    bits: u32,
}

impl RegularProduct {
    pub fn new(inner: SharedSystem, dfa: Dfa) -> Result<RegularProduct, MachineError> {
        let same = inner.alphabet().len() == dfa.alphabet().len()
            && inner.alphabet().iter().all(|l| dfa.alphabet().contains(l));
        if !same {
            return Err(MachineError::AlphabetMismatch(
                "machine and DFA alphabets differ".into(),
            ));
        }
        let dbits = bits_for(dfa.num_states() as u128);
        let bits = check_width(inner.state_bits() + dbits)?;
        Ok(RegularProduct {
            inner,
            dfa,
            dbits,
            bits,
        })
    }

    fn split(&self, s: StateId) -> (StateId, usize) {
        (s >> self.dbits, (s & mask(self.dbits)) as usize)
    }
}

impl CounterSystem for RegularProduct {
    fn counters(&self) -> usize {
        self.inner.counters()
    }
    fn alphabet(&self) -> &[Letter] {
        self.inner.alphabet()
    }
    fn real_time(&self) -> bool {
        self.inner.real_time()
    }
    fn acceptance(&self) -> Acceptance {
        self.inner.acceptance()
    }
    fn lambda_chain_bound(&self) -> usize {
        self.inner.lambda_chain_bound()
    }
    fn initial(&self) -> StateId {
        self.inner.initial() << self.dbits | self.dfa.initial() as u128
    }
    fn is_final(&self, s: StateId) -> bool {
        let (q, d) = self.split(s);
        self.dfa.is_final(d) && self.inner.is_final(q)
    }
    fn edges(&self, s: StateId, pattern: Pattern, out: &mut Vec<Edge>) {
        let (q, d) = self.split(s);
        let mut buf = Vec::new();
        self.inner.edges(q, pattern, &mut buf);
        for e in buf {
            let d2 = match e.letter {
                Some(l) => match self.dfa.step(d, l) {
                    Some(t) => t,
                    None => continue,
                },
                None => d,
            };
            out.push(Edge {
                letter: e.letter,
                target: e.target << self.dbits | d2 as u128,
                delta: e.delta,
            });
        }
    }
    fn state_bits(&self) -> u32 {
        self.bits
    }
    fn state_bound(&self) -> u128 {
        self.inner
            .state_bound()
            .saturating_mul(self.dfa.num_states() as u128)
    }
    fn state_label(&self, s: StateId) -> String {
        let (q, d) = self.split(s);
        format!("{}|d{}", self.inner.state_label(q), d)
    }
}

/// Nondeterministic union through a fresh initial state.
pub struct Union {
    left: SharedSystem,
    right: SharedSystem,
    k: usize,
    alphabet: Vec<Letter>,
    bits: u32,
}

const TAG_FRESH: u128 = 0;
const TAG_LEFT: u128 = 1;
const TAG_RIGHT: u128 = 2;

impl Union {
    pub fn new(left: SharedSystem, right: SharedSystem) -> Result<Union, MachineError> {
        if left.acceptance() != right.acceptance() {
            return Err(MachineError::AcceptanceMismatch);
        }
        let same = left.alphabet().len() == right.alphabet().len()
            && left.alphabet().iter().all(|l| right.alphabet().contains(l));
        if !same {
            return Err(MachineError::AlphabetMismatch(
                "union operands have different alphabets".into(),
            ));
        }
        let bits = check_width(left.state_bits().max(right.state_bits()) + 2)?;
        Ok(Union {
            k: left.counters().max(right.counters()),
            alphabet: left.alphabet().to_vec(),
            left,
            right,
            bits,
        })
    }

    fn side_edges(&self, side: &SharedSystem, tag: u128, q: StateId, p: Pattern, out: &mut Vec<Edge>) {
        let k = side.counters();
        if p.truncate(k) != p {
            return;
        }
        let mut buf = Vec::new();
        side.edges(q, p, &mut buf);
        out.extend(buf.into_iter().map(|e| Edge {
            target: e.target << 2 | tag,
            ..e
        }));
    }
}

impl CounterSystem for Union {
    fn counters(&self) -> usize {
        self.k
    }
    fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }
    fn real_time(&self) -> bool {
        self.left.real_time() && self.right.real_time()
    }
    fn acceptance(&self) -> Acceptance {
        self.left.acceptance()
    }
    fn lambda_chain_bound(&self) -> usize {
        self.left.lambda_chain_bound().max(self.right.lambda_chain_bound())
    }
    fn initial(&self) -> StateId {
        TAG_FRESH
    }
    fn is_final(&self, s: StateId) -> bool {
        match s & 3 {
            TAG_FRESH => {
                self.left.is_final(self.left.initial()) || self.right.is_final(self.right.initial())
            }
            TAG_LEFT => self.left.is_final(s >> 2),
            _ => self.right.is_final(s >> 2),
        }
    }
    fn edges(&self, s: StateId, p: Pattern, out: &mut Vec<Edge>) {
        match s & 3 {
            TAG_FRESH => {
                self.side_edges(&self.left, TAG_LEFT, self.left.initial(), p, out);
                self.side_edges(&self.right, TAG_RIGHT, self.right.initial(), p, out);
            }
            TAG_LEFT => self.side_edges(&self.left, TAG_LEFT, s >> 2, p, out),
            _ => self.side_edges(&self.right, TAG_RIGHT, s >> 2, p, out),
        }
    }
    fn state_bits(&self) -> u32 {
        self.bits
    }
    fn state_bound(&self) -> u128 {
        1 + self.left.state_bound() + self.right.state_bound()
    }
    fn state_label(&self, s: StateId) -> String {
        match s & 3 {
            TAG_FRESH => "U".to_owned(),
            TAG_LEFT => format!("L.{}", self.left.state_label(s >> 2)),
            _ => format!("R.{}", self.right.state_label(s >> 2)),
        }
    }
}

/// Letter-to-word map with nonempty images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LetterMorphism {
    source: Vec<Letter>,
    images: Vec<Word>,
    target: Vec<Letter>,
}

impl LetterMorphism {
    pub fn new(pairs: Vec<(Letter, Word)>) -> Result<LetterMorphism, MachineError> {
        let mut source = Vec::new();
        let mut images = Vec::new();
        let mut target = Vec::new();
        for (l, img) in pairs {
            if img.is_empty() {
                return Err(MachineError::Morphism(format!("empty image for {l}")));
            }
            if source.contains(&l) {
                return Err(MachineError::Morphism(format!("two images for {l}")));
            }
            for &b in &img {
                if !target.contains(&b) {
                    target.push(b);
                }
            }
            source.push(l);
            images.push(img);
        }
        Ok(LetterMorphism {
            source,
            images,
            target,
        })
    }

    /// Declares the target alphabet explicitly; it must cover every image.
    pub fn with_target(mut self, target: Vec<Letter>) -> Result<LetterMorphism, MachineError> {
        if let Some(l) = self.target.iter().find(|l| !target.contains(l)) {
            return Err(MachineError::Morphism(format!("{l} missing from target alphabet")));
        }
        self.target = target;
        Ok(self)
    }

    pub fn source(&self) -> &[Letter] {
        &self.source
    }

    pub fn target(&self) -> &[Letter] {
        &self.target
    }

    pub fn image(&self, l: Letter) -> Option<&[Letter]> {
        self.source
            .iter()
            .position(|&a| a == l)
            .map(|i| self.images[i].as_slice())
    }

    pub fn apply(&self, w: &[Letter]) -> Option<Word> {
        let mut out = Vec::new();
        for &l in w {
            out.extend_from_slice(self.image(l)?);
        }
        Some(out)
    }

    fn max_image_len(&self) -> usize {
        self.images.iter().map(Vec::len).max().unwrap_or(1)
    }
}

/// Image of a system under a letter morphism. Each transition on `a` is
/// replaced by a chain reading `f(a)`; the counter update happens on the
/// first letter of the chain and the remaining letters are read idly.
pub struct MorphicImage {
    inner: SharedSystem,
    morphism: LetterMorphism,
    abits: u32,
    jbits: u32,
    bits: u32,
}

impl MorphicImage {
    pub fn new(inner: SharedSystem, morphism: LetterMorphism) -> Result<MorphicImage, MachineError> {
        let same = inner.alphabet().len() == morphism.source.len()
            && inner.alphabet().iter().all(|l| morphism.source.contains(l));
        if !same {
            return Err(MachineError::AlphabetMismatch(
                "morphism source differs from machine alphabet".into(),
            ));
        }
        let abits = bits_for(morphism.source.len() as u128);
        let jbits = bits_for(morphism.max_image_len() as u128);
        let bits = check_width(inner.state_bits() + abits + jbits)?;
        Ok(MorphicImage {
            inner,
            morphism,
            abits,
            jbits,
            bits,
        })
    }

    fn pack(&self, q: StateId, a: usize, j: usize) -> StateId {
        (q << (self.abits + self.jbits)) | (a as u128) << self.jbits | j as u128
    }

    fn split(&self, s: StateId) -> (StateId, usize, usize) {
        (
            s >> (self.abits + self.jbits),
            ((s >> self.jbits) & mask(self.abits)) as usize,
            (s & mask(self.jbits)) as usize,
        )
    }
}

impl CounterSystem for MorphicImage {
    fn counters(&self) -> usize {
        self.inner.counters()
    }
    fn alphabet(&self) -> &[Letter] {
        &self.morphism.target
    }
    fn real_time(&self) -> bool {
        self.inner.real_time()
    }
    fn acceptance(&self) -> Acceptance {
        self.inner.acceptance()
    }
    fn lambda_chain_bound(&self) -> usize {
        self.inner.lambda_chain_bound()
    }
    fn initial(&self) -> StateId {
        self.pack(self.inner.initial(), 0, 0)
    }
    fn is_final(&self, s: StateId) -> bool {
        let (q, _, j) = self.split(s);
        j == 0 && self.inner.is_final(q)
    }
    fn edges(&self, s: StateId, p: Pattern, out: &mut Vec<Edge>) {
        let (q, a, j) = self.split(s);
        if j > 0 {
            let img = &self.morphism.images[a];
            let next = if j + 1 == img.len() { self.pack(q, 0, 0) } else { self.pack(q, a, j + 1) };
            out.push(Edge {
                letter: Some(img[j]),
                target: next,
                delta: Delta::ZERO,
            });
            return;
        }
        let mut buf = Vec::new();
        self.inner.edges(q, p, &mut buf);
        for e in buf {
            match e.letter {
                None => out.push(Edge {
                    target: self.pack(e.target, 0, 0),
                    ..e
                }),
                Some(l) => {
                    let Some(ai) = self.morphism.source.iter().position(|&x| x == l) else {
                        continue;
                    };
                    let img = &self.morphism.images[ai];
                    let next = if img.len() == 1 {
                        self.pack(e.target, 0, 0)
                    } else {
                        self.pack(e.target, ai, 1)
                    };
                    out.push(Edge {
                        letter: Some(img[0]),
                        target: next,
                        delta: e.delta,
                    });
                }
            }
        }
    }
    fn state_bits(&self) -> u32 {
        self.bits
    }
    fn state_bound(&self) -> u128 {
        let chain: usize = self.morphism.images.iter().map(|i| i.len() - 1).sum();
        self.inner.state_bound().saturating_mul(1 + chain as u128)
    }
    fn state_label(&self, s: StateId) -> String {
        let (q, a, j) = self.split(s);
        if j == 0 {
            self.inner.state_label(q)
        } else {
            format!("{}~{}{}", self.inner.state_label(q), self.morphism.source[a], j)
        }
    }
}

/// Real-time simulation of a system whose λ-chains fit between letters:
/// every letter is followed by `count` pad letters, each of which either
/// idles or performs one λ-step of the inner system.
pub struct RealtimePad {
    inner: SharedSystem,
    pad: Letter,
    count: usize,
    alphabet: Vec<Letter>,
    jbits: u32,
    bits: u32,
}

impl RealtimePad {
    pub fn new(inner: SharedSystem, pad: Letter, count: usize) -> Result<RealtimePad, MachineError> {
        if count == 0 {
            return Err(MachineError::Precondition("pad count must be positive".into()));
        }
        if inner.alphabet().contains(&pad) {
            return Err(MachineError::PadLetterInAlphabet(pad));
        }
        let depth = match inner.as_explicit() {
            Some(m) => m.structural_lambda_depth().ok_or(MachineError::LambdaChainTooLong {
                bound: m.lambda_chain_bound(),
                pad_count: count,
            })?,
            None if inner.real_time() => 0,
            None => inner.lambda_chain_bound(),
        };
        if depth + 1 > count {
            return Err(MachineError::LambdaChainTooLong {
                bound: depth,
                pad_count: count,
            });
        }
        let mut init_edges = Vec::new();
        inner.edges(inner.initial(), Pattern(0), &mut init_edges);
        if init_edges.iter().any(|e| e.letter.is_none()) {
            return Err(MachineError::InitialLambda);
        }
        let jbits = bits_for(count as u128 + 1);
        let bits = check_width(inner.state_bits() + jbits)?;
        let mut alphabet = inner.alphabet().to_vec();
        alphabet.push(pad);
        Ok(RealtimePad {
            inner,
            pad,
            count,
            alphabet,
            jbits,
            bits,
        })
    }

    fn split(&self, s: StateId) -> (StateId, usize) {
        (s >> self.jbits, (s & mask(self.jbits)) as usize)
    }

    fn pack(&self, q: StateId, j: usize) -> StateId {
        q << self.jbits | j as u128
    }
}

impl CounterSystem for RealtimePad {
    fn counters(&self) -> usize {
        self.inner.counters()
    }
    fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }
    fn real_time(&self) -> bool {
        true
    }
    fn acceptance(&self) -> Acceptance {
        self.inner.acceptance()
    }
    fn lambda_chain_bound(&self) -> usize {
        0
    }
    fn initial(&self) -> StateId {
        self.pack(self.inner.initial(), self.count)
    }
    fn is_final(&self, s: StateId) -> bool {
        let (q, j) = self.split(s);
        j == self.count && self.inner.is_final(q)
    }
    fn edges(&self, s: StateId, p: Pattern, out: &mut Vec<Edge>) {
        let (q, j) = self.split(s);
        let mut buf = Vec::new();
        self.inner.edges(q, p, &mut buf);
        if j == self.count {
            for e in buf {
                if e.letter.is_some() {
                    out.push(Edge {
                        target: self.pack(e.target, 0),
                        ..e
                    });
                }
            }
        } else {
            out.push(Edge {
                letter: Some(self.pad),
                target: self.pack(q, j + 1),
                delta: Delta::ZERO,
            });
            for e in buf {
                if e.letter.is_none() {
                    out.push(Edge {
                        letter: Some(self.pad),
                        target: self.pack(e.target, j + 1),
                        delta: e.delta,
                    });
                }
            }
        }
    }
    fn state_bits(&self) -> u32 {
        self.bits
    }
    fn state_bound(&self) -> u128 {
        self.inner.state_bound().saturating_mul(self.count as u128 + 1)
    }
    fn state_label(&self, s: StateId) -> String {
        let (q, j) = self.split(s);
        if j == self.count {
            self.inner.state_label(q)
        } else {
            format!("{}^{}", self.inner.state_label(q), j)
        }
    }
}

fn explicit(sys: &dyn CounterSystem) -> Result<CounterMachine, MachineError> {
    materialize(sys, usize::MAX)
}

/// Product machine accepting `L(m) ∩ L(d)`.
pub fn intersect_regular(m: &CounterMachine, d: &Dfa) -> Result<CounterMachine, MachineError> {
    explicit(&RegularProduct::new(Arc::new(m.clone()), d.clone())?)
}

/// Machine accepting `L(m1) ∪ L(m2)`.
pub fn union_machines(m1: &CounterMachine, m2: &CounterMachine) -> Result<CounterMachine, MachineError> {
    explicit(&Union::new(Arc::new(m1.clone()), Arc::new(m2.clone()))?)
}

/// Machine accepting `{f(w) : w ∈ L(m)}`.
pub fn apply_letter_morphism(m: &CounterMachine, f: &LetterMorphism) -> Result<CounterMachine, MachineError> {
    explicit(&MorphicImage::new(Arc::new(m.clone()), f.clone())?)
}

/// Real-time machine accepting `h(L(m))` with `h(a) = a pad^count`.
pub fn realtime_pad(m: &CounterMachine, pad: Letter, count: usize) -> Result<CounterMachine, MachineError> {
    explicit(&RealtimePad::new(Arc::new(m.clone()), pad, count)?)
}
