//! The block language that stores two counters as the 2- and 3-valuations
//! of run lengths, and its one-counter recognizer.

use rustc_hash::FxHashMap;

use super::PipelineError;
use crate::dfa::Dfa;
use crate::diagonal::Markers;
use crate::letter::{Letter, Word};
use crate::machine::{
    Acceptance, CounterSystem, Delta, Edge, Pattern, SharedSystem, StateId,
};

/// Marker letters used with `subject`.
pub fn markers_for(subject: &dyn CounterSystem) -> Markers {
    Markers::fresh_for(subject.alphabet())
}

pub(crate) fn check_subject(subject: &dyn CounterSystem) -> Result<(), PipelineError> {
    if !subject.real_time() {
        return Err(PipelineError::Subject("subject must be real-time".into()));
    }
    if subject.counters() != 2 {
        return Err(PipelineError::Subject(format!(
            "subject must have 2 counters, found {}",
            subject.counters()
        )));
    }
    if subject.acceptance() != Acceptance::FinalStateAndZero {
        return Err(PipelineError::Subject(
            "subject must accept with final states and zero counters".into(),
        ));
    }
    Ok(())
}

/// Zero pattern of the counters `(M₂(m), M₃(m))`.
pub fn valuation_pattern(m: u64) -> Pattern {
    Pattern(u8::from(m.is_multiple_of(2)) | u8::from(m.is_multiple_of(3)) << 1)
}

/// `m·2^l·3^l'` when it is an integer.
pub fn scale(m: u64, l: i8, l2: i8) -> Option<u64> {
    let mut x = m;
    for (f, e) in [(2u64, l), (3u64, l2)] {
        if e > 0 {
            x = x.checked_mul(f.pow(e as u32))?;
        } else if e < 0 {
            let d = f.pow(e.unsigned_abs() as u32);
            if !x.is_multiple_of(d) {
                return None;
            }
            x /= d;
        }
    }
    Some(x)
}

fn letter_edges(subject: &dyn CounterSystem, q: StateId, p: Pattern, a: Letter) -> Vec<Edge> {
    let mut buf = Vec::new();
    subject.edges(q, p, &mut buf);
    buf.retain(|e| e.letter == Some(a));
    buf
}

/// Certificate of membership: block lengths, letters, states and deltas.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ScriptLWitness {
    pub v: Vec<u64>,
    pub w: Vec<u64>,
    /// `|z_i|`, which also equals `|u_{i+1}|`.
    pub z: Vec<u64>,
    pub letters: Word,
    /// `q_0 … q_n`.
    pub states: Vec<StateId>,
    pub deltas: Vec<(i8, i8)>,
}

impl ScriptLWitness {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn u(&self, i: usize) -> u64 {
        self.z[i - 1]
    }

    pub fn to_word(&self, mk: Markers) -> Word {
        let mut out = Vec::new();
        for i in 0..self.len() {
            out.extend(std::iter::repeat_n(mk.zero, self.v[i] as usize));
            out.push(self.letters[i]);
            out.push(mk.one);
            out.extend(std::iter::repeat_n(mk.zero, (self.w[i] + self.z[i]) as usize));
            out.push(mk.two);
            out.extend(std::iter::repeat_n(mk.zero, self.z[i] as usize));
        }
        out
    }

    /// Checks every defining condition against `subject`.
    pub fn check(&self, subject: &dyn CounterSystem) -> Result<(), PipelineError> {
        let n = self.len();
        let bad = |m: String| Err(PipelineError::Invariant(m));
        if n == 0 {
            return bad("witness has no blocks".into());
        }
        if [self.v.len(), self.w.len(), self.z.len(), self.deltas.len()] != [n; 4]
            || self.states.len() != n + 1
        {
            return bad("field lengths disagree".into());
        }
        if self.v[0] != 1 {
            return bad(format!("|v_0| = {}", self.v[0]));
        }
        if self.states[0] != subject.initial() {
            return bad("q_0 is not the initial state".into());
        }
        for i in 0..n {
            let (l, l2) = self.deltas[i];
            if self.v[i] == 0 || self.w[i] == 0 {
                return bad(format!("empty v or w in block {i}"));
            }
            if scale(self.v[i], l, l2) != Some(self.w[i]) {
                return bad(format!("|w_{i}| = {} does not match |v_{i}| = {}", self.w[i], self.v[i]));
            }
            let found = letter_edges(subject, self.states[i], valuation_pattern(self.v[i]), self.letters[i])
                .iter()
                .any(|e| {
                    e.target == self.states[i + 1]
                        && e.delta == Delta::from_slice(&[l, l2])
                });
            if !found {
                return bad(format!("no transition for block {i}"));
            }
        }
        if !subject.is_final(self.states[n]) {
            return bad("q_n is not final".into());
        }
        if self.w[n - 1].is_multiple_of(2) || self.w[n - 1].is_multiple_of(3) {
            return bad(format!("|w_{{n-1}}| = {} is divisible by 2 or 3", self.w[n - 1]));
        }
        Ok(())
    }
}

/// Run lengths of a word of shape `0^P₀ a₀ 1 0^M₀ 2 0^P₁ a₁ … 2 0^T`.
#[derive(Clone, PartialEq, Eq, Debug)]
struct Blocks {
    p: Vec<u64>,
    letters: Word,
    m: Vec<u64>,
    tail: u64,
}

fn parse_blocks(w: &[Letter], mk: Markers) -> Option<Blocks> {
    let mut i = 0;
    let run = |i: &mut usize| {
        let s = *i;
        while *i < w.len() && w[*i] == mk.zero {
            *i += 1;
        }
        (*i - s) as u64
    };
    let mut b = Blocks {
        p: Vec::new(),
        letters: Vec::new(),
        m: Vec::new(),
        tail: 0,
    };
    loop {
        let p = run(&mut i);
        if i == w.len() {
            if b.letters.is_empty() {
                return None;
            }
            b.tail = p;
            return Some(b);
        }
        let a = w[i];
        if mk.contains(a) || w.get(i + 1) != Some(&mk.one) {
            return None;
        }
        i += 2;
        let m = run(&mut i);
        if w.get(i) != Some(&mk.two) {
            return None;
        }
        i += 1;
        b.p.push(p);
        b.letters.push(a);
        b.m.push(m);
    }
}

fn check_letters(subject: &dyn CounterSystem, w: &[Letter], mk: Markers) -> Result<(), PipelineError> {
    match w.iter().find(|&&l| !mk.contains(l) && !subject.alphabet().contains(&l)) {
        Some(&l) => Err(PipelineError::LetterOutside(l)),
        None => Ok(()),
    }
}

type Key = (StateId, u64);

#[derive(Clone, Copy)]
struct Back {
    prev: Key,
    delta: (i8, i8),
    w: u64,
}

/// Membership with a witness, by dynamic programming over blocks with
/// `(state, |v_i|)` as the frontier.
pub fn script_l_oracle(
    subject: &dyn CounterSystem,
    w: &[Letter],
) -> Result<Option<ScriptLWitness>, PipelineError> {
    check_subject(subject)?;
    let mk = markers_for(subject);
    check_letters(subject, w, mk)?;
    let Some(b) = parse_blocks(w, mk) else {
        return Ok(None);
    };
    if b.p[0] != 1 {
        return Ok(None);
    }
    let n = b.letters.len();
    let mut layers: Vec<FxHashMap<Key, Option<Back>>> = Vec::with_capacity(n + 1);
    layers.push(FxHashMap::from_iter([((subject.initial(), 1), None)]));
    let mut finish: Option<(Key, Back)> = None;
    for i in 0..n {
        let mut next = FxHashMap::default();
        let keys: Vec<Key> = layers[i].keys().copied().collect();
        for (q, v) in keys {
            for e in letter_edges(subject, q, valuation_pattern(v), b.letters[i]) {
                let delta = (e.delta.get(0), e.delta.get(1));
                let Some(wl) = scale(v, delta.0, delta.1) else { continue };
                if wl == 0 || wl > b.m[i] {
                    continue;
                }
                let z = b.m[i] - wl;
                let back = Back {
                    prev: (q, v),
                    delta,
                    w: wl,
                };
                if i + 1 < n {
                    if b.p[i + 1] > z {
                        next.entry((e.target, b.p[i + 1] - z)).or_insert(Some(back));
                    }
                } else if finish.is_none()
                    && subject.is_final(e.target)
                    && wl % 2 != 0
                    && wl % 3 != 0
                    && b.tail == z
                {
                    finish = Some(((e.target, 0), back));
                }
            }
        }
        layers.push(next);
    }
    let Some((last, back)) = finish else {
        return Ok(None);
    };
    let mut states = vec![last.0];
    let mut blocks = vec![back];
    let mut key = back.prev;
    for i in (0..n).rev() {
        states.push(key.0);
        if i == 0 {
            break;
        }
        let bk = layers[i][&key].expect("non-initial layers carry back pointers");
        blocks.push(bk);
        key = bk.prev;
    }
    states.reverse();
    blocks.reverse();
    let v: Vec<u64> = blocks.iter().map(|bk| bk.prev.1).collect();
    let wl: Vec<u64> = blocks.iter().map(|bk| bk.w).collect();
    let z = (0..n).map(|i| b.m[i] - wl[i]).collect();
    Ok(Some(ScriptLWitness {
        v,
        w: wl,
        z,
        letters: b.letters,
        states,
        deltas: blocks.iter().map(|bk| bk.delta).collect(),
    }))
}

/// Membership by enumerating every split of every run, with no use of the
/// length arithmetic beyond checking it.
pub fn script_l_naive(subject: &dyn CounterSystem, w: &[Letter]) -> Result<bool, PipelineError> {
    check_subject(subject)?;
    let mk = markers_for(subject);
    check_letters(subject, w, mk)?;
    let Some(b) = parse_blocks(w, mk) else {
        return Ok(false);
    };
    if b.p[0] != 1 {
        return Ok(false);
    }
    Ok(naive_block(subject, &b, 0, subject.initial(), 1))
}

fn naive_block(subject: &dyn CounterSystem, b: &Blocks, i: usize, q: StateId, v: u64) -> bool {
    let n = b.letters.len();
    for e in letter_edges(subject, q, valuation_pattern(v), b.letters[i]) {
        let (l, l2) = (e.delta.get(0), e.delta.get(1));
        for wl in 1..=b.m[i] {
            if scale(v, l, l2) != Some(wl) {
                continue;
            }
            let z = b.m[i] - wl;
            if i + 1 == n {
                if subject.is_final(e.target) && wl % 2 != 0 && wl % 3 != 0 && b.tail == z {
                    return true;
                }
                continue;
            }
            for nv in 1..=b.p[i + 1] {
                if b.p[i + 1] - nv == z && naive_block(subject, b, i + 1, e.target, nv) {
                    return true;
                }
            }
        }
    }
    false
}

/// DFA for `0 Σ 1 0⁺ 2 (0⁺ Σ 1 0⁺ 2)* 0*`.
pub fn script_l_shape(sigma: &[Letter], mk: Markers) -> Dfa {
    let mut alphabet = sigma.to_vec();
    alphabet.extend(mk.letters());
    const DEAD: usize = 7;
    Dfa::from_fn(alphabet, 8, 0, &[5, 6], |s, x| {
        let zero = x == mk.zero;
        let letter = !mk.contains(x);
        match (s, zero, letter, x == mk.one, x == mk.two) {
            (0, true, ..) => 1,
            (1, _, true, ..) | (6, _, true, ..) => 2,
            (2, _, _, true, _) => 3,
            (3, true, ..) | (4, true, ..) => 4,
            (4, _, _, _, true) => 5,
            (5, true, ..) | (6, true, ..) => 6,
            _ => DEAD,
        }
    })
    .expect("well-formed shape automaton")
}

/// Counter schedule for multiplying a run length by a ratio: per cycle
/// position, whether the letter decrements and how many λ-decrements follow.
fn schedule(ratio: u8) -> &'static [(bool, u8)] {
    const T0: (bool, u8) = (true, 0);
    const F0: (bool, u8) = (false, 0);
    match ratio {
        0 => &[(true, 5)],
        1 => &[(true, 1)],
        2 => &[T0, T0, F0],
        3 => &[(true, 2)],
        4 => &[T0],
        5 => &[T0, F0, F0],
        6 => &[(true, 1), T0],
        7 => &[T0, F0],
        _ => &[T0, F0, F0, F0, F0, F0],
    }
}

fn ratio_index(l: i8, l2: i8) -> Option<u8> {
    if (-1..=1).contains(&l) && (-1..=1).contains(&l2) {
        Some(((l + 1) * 3 + (l2 + 1)) as u8)
    } else {
        None
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Gadget {
    Start,
    First,
    V(u8),
    A { ratio: u8, fin: bool },
    W { ratio: u8, pos: u8, pending: u8, fin: bool, wm: u8 },
    Z { fin: bool },
    U { fin: bool },
}

const GBITS: u32 = 17;

impl Gadget {
    fn pack(self) -> u128 {
        let (kind, ratio, pos, pending, fin, x) = match self {
            Gadget::Start => (0, 0, 0, 0, false, 0),
            Gadget::First => (1, 0, 0, 0, false, 0),
            Gadget::V(r) => (2, 0, 0, 0, false, r),
            Gadget::A { ratio, fin } => (3, ratio, 0, 0, fin, 0),
            Gadget::W { ratio, pos, pending, fin, wm } => (4, ratio, pos, pending, fin, wm),
            Gadget::Z { fin } => (5, 0, 0, 0, fin, 0),
            Gadget::U { fin } => (6, 0, 0, 0, fin, 0),
        };
        kind as u128
            | (ratio as u128) << 3
            | (pos as u128) << 7
            | (pending as u128) << 10
            | (fin as u128) << 13
            | (x as u128) << 14
    }

    fn unpack(s: u128) -> Gadget {
        let f = |shift: u32, bits: u32| ((s >> shift) & ((1 << bits) - 1)) as u8;
        let (ratio, pos, pending, fin, x) = (f(3, 4), f(7, 3), f(10, 3), f(13, 1) == 1, f(14, 3));
        match f(0, 3) {
            0 => Gadget::Start,
            1 => Gadget::First,
            2 => Gadget::V(x),
            3 => Gadget::A { ratio, fin },
            4 => Gadget::W { ratio, pos, pending, fin, wm: x },
            5 => Gadget::Z { fin },
            _ => Gadget::U { fin },
        }
    }
}

/// One-counter recognizer of the block language over a real-time
/// two-counter subject. The counter holds the current run length; the
/// ratio gadgets use at most five consecutive λ-moves.
pub struct ScriptL {
    subject: SharedSystem,
    markers: Markers,
    sigma: Vec<Letter>,
    alphabet: Vec<Letter>,
    bits: u32,
}

impl ScriptL {
    pub fn new(subject: SharedSystem) -> Result<ScriptL, PipelineError> {
        check_subject(subject.as_ref())?;
        let markers = markers_for(subject.as_ref());
        let sigma = subject.alphabet().to_vec();
        let mut alphabet = sigma.clone();
        alphabet.extend(markers.letters());
        let bits = subject.state_bits() + GBITS;
        if bits > 128 {
            return Err(PipelineError::Machine(crate::machine::MachineError::StateSpaceTooWide(bits)));
        }
        Ok(ScriptL {
            subject,
            markers,
            sigma,
            alphabet,
            bits,
        })
    }

    pub fn markers(&self) -> Markers {
        self.markers
    }

    pub fn subject(&self) -> &SharedSystem {
        &self.subject
    }

    fn pack(q: StateId, g: Gadget) -> StateId {
        q << GBITS | g.pack()
    }

    fn split(s: StateId) -> (StateId, Gadget) {
        (s >> GBITS, Gadget::unpack(s & ((1 << GBITS) - 1)))
    }

    fn read_letter(&self, q: StateId, v_pattern: Pattern, out: &mut Vec<Edge>) {
        let mut buf = Vec::new();
        self.subject.edges(q, v_pattern, &mut buf);
        for e in buf {
            let (Some(a), Some(ratio)) = (e.letter, ratio_index(e.delta.get(0), e.delta.get(1))) else {
                continue;
            };
            let mut push = |fin| {
                out.push(Edge {
                    letter: Some(a),
                    target: Self::pack(e.target, Gadget::A { ratio, fin }),
                    delta: Delta::ZERO,
                })
            };
            push(false);
            if self.subject.is_final(e.target) {
                push(true);
            }
        }
    }
}

impl CounterSystem for ScriptL {
    fn counters(&self) -> usize {
        1
    }
    fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }
    fn real_time(&self) -> bool {
        false
    }
    fn acceptance(&self) -> Acceptance {
        Acceptance::FinalStateAndZero
    }
    fn lambda_chain_bound(&self) -> usize {
        5
    }
    fn initial(&self) -> StateId {
        Self::pack(self.subject.initial(), Gadget::Start)
    }
    fn is_final(&self, s: StateId) -> bool {
        Self::split(s).1 == Gadget::U { fin: true }
    }
    fn edges(&self, s: StateId, p: Pattern, out: &mut Vec<Edge>) {
        let (q, g) = Self::split(s);
        let positive = p.positive(0);
        let mk = self.markers;
        let inc = Delta::unit(0, 1);
        let dec = Delta::unit(0, -1);
        let edge = |letter: Option<Letter>, g: Gadget, delta: Delta| Edge {
            letter,
            target: Self::pack(q, g),
            delta,
        };
        match g {
            Gadget::Start => out.push(edge(Some(mk.zero), Gadget::First, inc)),
            Gadget::First => self.read_letter(q, valuation_pattern(1), out),
            Gadget::V(r) => {
                out.push(edge(Some(mk.zero), Gadget::V((r + 1) % 6), inc));
                self.read_letter(q, valuation_pattern(r as u64), out);
            }
            Gadget::A { ratio, fin } => out.push(edge(
                Some(mk.one),
                Gadget::W {
                    ratio,
                    pos: 0,
                    pending: 0,
                    fin,
                    wm: 0,
                },
                Delta::ZERO,
            )),
            Gadget::W {
                ratio,
                pos,
                pending,
                fin,
                wm,
            } => {
                if pending > 0 {
                    if positive {
                        out.push(edge(
                            None,
                            Gadget::W {
                                ratio,
                                pos,
                                pending: pending - 1,
                                fin,
                                wm,
                            },
                            dec,
                        ));
                    }
                    return;
                }
                if pos == 0 && !positive {
                    if !fin || wm == 1 || wm == 5 {
                        out.push(edge(Some(mk.zero), Gadget::Z { fin }, inc));
                        out.push(edge(Some(mk.two), Gadget::U { fin }, Delta::ZERO));
                    }
                    return;
                }
                let sched = schedule(ratio);
                let (decrement, lambdas) = sched[pos as usize];
                if decrement && !positive {
                    return;
                }
                let next = Gadget::W {
                    ratio,
                    pos: (pos + 1) % sched.len() as u8,
                    pending: lambdas,
                    fin,
                    wm: if fin { (wm + 1) % 6 } else { 0 },
                };
                out.push(edge(Some(mk.zero), next, if decrement { dec } else { Delta::ZERO }));
            }
            Gadget::Z { fin } => {
                out.push(edge(Some(mk.zero), Gadget::Z { fin }, inc));
                out.push(edge(Some(mk.two), Gadget::U { fin }, Delta::ZERO));
            }
            Gadget::U { fin } => {
                if positive {
                    out.push(edge(Some(mk.zero), Gadget::U { fin }, dec));
                } else if !fin {
                    out.push(edge(Some(mk.zero), Gadget::V(1), inc));
                }
            }
        }
    }
    fn state_bits(&self) -> u32 {
        self.bits
    }
    fn state_bound(&self) -> u128 {
        self.subject.state_bound().saturating_mul(1 << GBITS)
    }
    fn state_label(&self, s: StateId) -> String {
        let (q, g) = Self::split(s);
        let tag = match g {
            Gadget::Start => "S".to_owned(),
            Gadget::First => "F".to_owned(),
            Gadget::V(r) => format!("V{r}"),
            Gadget::A { ratio, fin } => format!("A{ratio}{}", if fin { "f" } else { "" }),
            Gadget::W {
                ratio,
                pos,
                pending,
                fin,
                wm,
            } => format!("W{ratio}.{pos}.{pending}{}", if fin { format!("f{wm}") } else { String::new() }),
            Gadget::Z { fin } => format!("Z{}", if fin { "f" } else { "" }),
            Gadget::U { fin } => format!("U{}", if fin { "f" } else { "" }),
        };
        format!("{}|{tag}", self.subject.state_label(q))
    }
}

impl std::fmt::Debug for ScriptL {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScriptL").field("sigma", &self.sigma).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::letter::parse_word;
    use crate::pi::test_machine_a0;

    #[test]
    fn ratio_table_matches_schedules() {
        for l in -1..=1i8 {
            for l2 in -1..=1i8 {
                let sched = schedule(ratio_index(l, l2).unwrap());
                let letters = sched.len() as u64;
                let decs: u64 = sched.iter().map(|&(d, x)| d as u64 + x as u64).sum();
                assert_eq!(scale(decs, l, l2), Some(letters), "({l},{l2})");
                assert!(sched.iter().all(|&(_, x)| x <= 5));
                assert!(sched[0].0);
            }
        }
    }

    #[test]
    fn gadget_packing_round_trips() {
        let g = Gadget::W {
            ratio: 8,
            pos: 5,
            pending: 5,
            fin: true,
            wm: 4,
        };
        assert_eq!(Gadget::unpack(g.pack()), g);
        assert_eq!(Gadget::unpack(Gadget::U { fin: true }.pack()), Gadget::U { fin: true });
    }

    #[test]
    fn oracle_examples() {
        let m = test_machine_a0();
        let yes = script_l_oracle(&m, &parse_word("0a1002 00b1 02")).unwrap().unwrap();
        assert_eq!(yes.v, vec![1, 2]);
        assert_eq!(yes.w, vec![2, 1]);
        assert_eq!(yes.z, vec![0, 0]);
        assert_eq!(yes.deltas, vec![(1, 0), (-1, 0)]);
        yes.check(&m).unwrap();
        assert_eq!(yes.to_word(Markers::standard()), parse_word("0a100200b102"));
        assert!(script_l_oracle(&m, &parse_word("0a12")).unwrap().is_none());
        assert!(script_l_oracle(&m, &parse_word("ab")).unwrap().is_none());
        assert!(script_l_oracle(&m, &parse_word("0a1002x")).is_err());
        assert!(script_l_naive(&m, &parse_word("0a100200b102")).unwrap());
    }
}
