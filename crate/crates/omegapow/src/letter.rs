//! Interned letters and finite words.
//!
//! A [`Letter`] is a small copyable handle onto a globally interned name.
//! Equality and hashing use the handle; ordering uses the name, so sorted
//! alphabets and length-lexicographic listings do not depend on interning
//! order.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{LazyLock, RwLock};

use rustc_hash::FxHashMap;

struct Interner {
    names: Vec<&'static str>,
    ids: FxHashMap<&'static str, u32>,
}

static INTERNER: LazyLock<RwLock<Interner>> = LazyLock::new(|| {
    RwLock::new(Interner {
        names: Vec::new(),
        ids: FxHashMap::default(),
    })
});

/// Name under which the eraser (backspace) letter is interned and serialized.
pub const ERASER_NAME: &str = "BS";

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter(u32);

impl Letter {
    pub fn new(name: &str) -> Letter {
        if let Some(&id) = INTERNER.read().expect("interner poisoned").ids.get(name) {
            return Letter(id);
        }
        let mut guard = INTERNER.write().expect("interner poisoned");
        if let Some(&id) = guard.ids.get(name) {
            return Letter(id);
        }
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        let id = guard.names.len() as u32;
        guard.names.push(leaked);
        guard.ids.insert(leaked, id);
        Letter(id)
    }

    pub fn eraser() -> Letter {
        Letter::new(ERASER_NAME)
    }

    pub fn is_eraser(self) -> bool {
        self == Letter::eraser()
    }

    pub fn name(self) -> &'static str {
        INTERNER.read().expect("interner poisoned").names[self.0 as usize]
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.0 == other.0 {
            Ordering::Equal
        } else {
            self.name().cmp(other.name())
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub type Word = Vec<Letter>;

/// Builds an alphabet from names, keeping the given order.
pub fn alphabet(names: &[&str]) -> Vec<Letter> {
    names.iter().map(|n| Letter::new(n)).collect()
}

/// Parses a compact word such as `0BS01` or `a1'b`.
///
/// Tokens are `BS`, or a single character followed by any number of `'`.
/// The empty string and `λ` both denote the empty word. Whitespace and
/// commas are ignored, so `a, b, BS` is also accepted.
pub fn parse_word(text: &str) -> Word {
    let text = text.trim();
    if text.is_empty() || text == "λ" {
        return Vec::new();
    }
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() || c == ',' {
            i += 1;
            continue;
        }
        if c == 'B' && chars.get(i + 1) == Some(&'S') {
            out.push(Letter::eraser());
            i += 2;
            continue;
        }
        let mut name = String::from(c);
        i += 1;
        while i < chars.len() && chars[i] == '\'' {
            name.push('\'');
            i += 1;
        }
        out.push(Letter::new(&name));
    }
    out
}

/// Inverse of [`parse_word`] for words whose letters follow the token rule.
pub fn format_word(w: &[Letter]) -> String {
    if w.is_empty() {
        return "λ".to_owned();
    }
    w.iter().map(|l| l.name()).collect()
}

/// Returns `n` copies of `letter`.
pub fn run_of(letter: Letter, n: usize) -> Word {
    vec![letter; n]
}

/// Picks `base` if it is not used in `taken`, otherwise appends primes
/// until the name is free.
pub fn fresh_letter(base: &str, taken: &[Letter]) -> Letter {
    let mut name = base.to_owned();
    loop {
        let candidate = Letter::new(&name);
        if !taken.contains(&candidate) {
            return candidate;
        }
        name.push('\'');
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_stable() {
        assert_eq!(Letter::new("a"), Letter::new("a"));
        assert_ne!(Letter::new("a"), Letter::new("b"));
        assert_eq!(Letter::new("zz").name(), "zz");
    }

    #[test]
    fn ordering_follows_names() {
        let z = Letter::new("z_order");
        let a = Letter::new("a_order");
        assert!(a < z);
    }

    #[test]
    fn parse_and_format() {
        let w = parse_word("0BS01");
        assert_eq!(w.len(), 4);
        assert!(w[1].is_eraser());
        assert_eq!(format_word(&w), "0BS01");
        assert_eq!(parse_word("λ"), Vec::<Letter>::new());
        assert_eq!(parse_word("a1'b").len(), 3);
        assert_eq!(parse_word("a, b, BS"), parse_word("abBS"));
    }

    #[test]
    fn fresh_letters_avoid_collisions() {
        let taken = alphabet(&["0", "1", "BS"]);
        assert_eq!(fresh_letter("0", &taken).name(), "0'");
        assert_eq!(fresh_letter("2", &taken).name(), "2");
    }
}
