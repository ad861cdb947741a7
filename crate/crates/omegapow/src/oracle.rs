//! Membership predicates used as ground truth.

use std::fmt;
use std::sync::Arc;

use crate::letter::Letter;

type Predicate = Arc<dyn Fn(&[Letter]) -> bool + Send + Sync>;

/// A decidable language over a declared alphabet.
///
/// The optional prefix predicate must over-approximate: it may only return
/// `false` for words that extend to no member.
#[derive(Clone)]
pub struct LanguageOracle {
    alphabet: Vec<Letter>,
    tag: String,
    member: Predicate,
    viable: Option<Predicate>,
}

impl LanguageOracle {
    pub fn new(
        alphabet: Vec<Letter>,
        tag: impl Into<String>,
        member: impl Fn(&[Letter]) -> bool + Send + Sync + 'static,
    ) -> LanguageOracle {
        LanguageOracle {
            alphabet,
            tag: tag.into(),
            member: Arc::new(member),
            viable: None,
        }
    }

    pub fn with_prefix_viability(
        mut self,
        viable: impl Fn(&[Letter]) -> bool + Send + Sync + 'static,
    ) -> LanguageOracle {
        self.viable = Some(Arc::new(viable));
        self
    }

    pub fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn contains(&self, w: &[Letter]) -> bool {
        (self.member)(w)
    }

    pub fn has_prefix_viability(&self) -> bool {
        self.viable.is_some()
    }

    /// `false` only if no extension of `w` is a member.
    pub fn may_extend(&self, w: &[Letter]) -> bool {
        self.viable.as_ref().is_none_or(|v| v(w))
    }

    pub fn union(&self, other: &LanguageOracle, tag: impl Into<String>) -> LanguageOracle {
        let (a, b) = (self.clone(), other.clone());
        let mut letters = self.alphabet.clone();
        for &l in &other.alphabet {
            if !letters.contains(&l) {
                letters.push(l);
            }
        }
        let mut out = LanguageOracle::new(letters, tag, move |w| a.contains(w) || b.contains(w));
        if self.viable.is_some() && other.viable.is_some() {
            let (a, b) = (self.clone(), other.clone());
            out = out.with_prefix_viability(move |w| a.may_extend(w) || b.may_extend(w));
        }
        out
    }
}

impl fmt::Debug for LanguageOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LanguageOracle")
            .field("tag", &self.tag)
            .field("alphabet", &self.alphabet)
            .finish()
    }
}
