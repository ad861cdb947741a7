//! The block language `f(L)` as a product of a machine for `L` with one
//! extra counter that checks the block lengths.

use crate::letter::{alphabet, Letter};
use crate::machine::{
    ops::check_width, Acceptance, CounterSystem, Delta, Edge, MachineError, Pattern, SharedSystem, StateId,
    MAX_COUNTERS,
};

use super::defn::four;

/// Position inside the current block `a t 3 u v 2 w`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
#[repr(u8)]
enum Phase {
    Start = 0,
    TEven = 1,
    TOdd = 2,
    U = 3,
    V1 = 4,
    V2 = 5,
    VOdd = 6,
    VEven = 7,
    W = 8,
}

const PHASES: [Phase; 9] = [
    Phase::Start,
    Phase::TEven,
    Phase::TOdd,
    Phase::U,
    Phase::V1,
    Phase::V2,
    Phase::VOdd,
    Phase::VEven,
    Phase::W,
];
const PBITS: u32 = 4;

/// `f(L)` for `L` given by a real-time machine over `{0, 1}` that accepts
/// with final states and zero counters. The length counter comes after
/// the counters of `L`.
pub struct Pi1System {
    inner: SharedSystem,
    c: usize,
    alphabet: Vec<Letter>,
    bits: u32,
}

impl Pi1System {
    pub fn new(inner: SharedSystem) -> Result<Pi1System, MachineError> {
        if !inner.real_time() {
            return Err(MachineError::Precondition("L machine must be real-time".into()));
        }
        if inner.acceptance() != Acceptance::FinalStateAndZero {
            return Err(MachineError::Precondition(
                "L machine must accept with final states and zero counters".into(),
            ));
        }
        let binary = alphabet(&["0", "1"]);
        if inner.alphabet().len() != 2 || !binary.iter().all(|l| inner.alphabet().contains(l)) {
            return Err(MachineError::AlphabetMismatch("L machine must be over {0, 1}".into()));
        }
        let c = inner.counters();
        if c + 1 > MAX_COUNTERS || c > 1 {
            return Err(MachineError::Precondition(format!("L machine has {c} counters, at most 1 allowed")));
        }
        let bits = check_width(inner.state_bits() + PBITS)?;
        Ok(Pi1System {
            inner,
            c,
            alphabet: four(),
            bits,
        })
    }

    fn split(&self, s: StateId) -> (StateId, Phase) {
        (s >> PBITS, PHASES[(s & 0xf) as usize])
    }

    fn pack(q: StateId, p: Phase) -> StateId {
        q << PBITS | p as u128
    }
}

impl CounterSystem for Pi1System {
    fn counters(&self) -> usize {
        self.c + 1
    }
    fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }
    fn real_time(&self) -> bool {
        true
    }
    fn acceptance(&self) -> Acceptance {
        Acceptance::FinalStateAndZero
    }
    fn lambda_chain_bound(&self) -> usize {
        0
    }
    fn initial(&self) -> StateId {
        Self::pack(self.inner.initial(), Phase::Start)
    }
    fn is_final(&self, s: StateId) -> bool {
        let (q, p) = self.split(s);
        p == Phase::W && self.inner.is_final(q)
    }
    fn edges(&self, s: StateId, pattern: Pattern, out: &mut Vec<Edge>) {
        let (q, phase) = self.split(s);
        let len_pos = pattern.positive(self.c);
        let [zero, one, two, three] = [self.alphabet[0], self.alphabet[1], self.alphabet[2], self.alphabet[3]];
        let mut local = |letter: Letter, next: Phase, d: i8| {
            out.push(Edge {
                letter: Some(letter),
                target: Self::pack(q, next),
                delta: Delta::unit(self.c, d),
            });
        };
        match phase {
            Phase::TEven | Phase::TOdd => {
                let flip = if phase == Phase::TEven { Phase::TOdd } else { Phase::TEven };
                local(zero, flip, 1);
                local(one, flip, 1);
                if phase == Phase::TEven {
                    local(three, Phase::U, 0);
                }
            }
            Phase::U if len_pos => {
                local(zero, Phase::U, -1);
                local(one, Phase::U, -1);
            }
            Phase::U => {
                local(zero, Phase::V1, 1);
                local(one, Phase::V1, 1);
            }
            Phase::V1 | Phase::V2 | Phase::VOdd | Phase::VEven => {
                let next = match phase {
                    Phase::V1 => Phase::V2,
                    Phase::V2 | Phase::VEven => Phase::VOdd,
                    _ => Phase::VEven,
                };
                local(zero, next, 1);
                local(one, next, 1);
                if phase == Phase::VOdd {
                    local(two, Phase::W, 0);
                }
            }
            Phase::W if len_pos => {
                local(zero, Phase::W, -1);
                local(one, Phase::W, -1);
            }
            Phase::Start | Phase::W => {
                // The next block letter: one step of the L machine.
                let mut buf = Vec::new();
                self.inner.edges(q, pattern.truncate(self.c), &mut buf);
                for e in buf {
                    if let Some(a) = e.letter {
                        out.push(Edge {
                            letter: Some(a),
                            target: Self::pack(e.target, Phase::TEven),
                            delta: e.delta,
                        });
                    }
                }
            }
        }
    }
    fn state_bits(&self) -> u32 {
        self.bits
    }
    fn state_bound(&self) -> u128 {
        self.inner.state_bound() * PHASES.len() as u128
    }
    fn state_label(&self, s: StateId) -> String {
        let (q, p) = self.split(s);
        format!("{}|{:?}", self.inner.state_label(q), p)
    }
}
