//! Counter automata and the constructions around one-counter ω-power
//! languages: eraser substitution, diagonal codings, the two build
//! pipelines, and finite-stage ω-power analysis.

pub mod crosscheck;
pub mod dfa;
pub mod diagonal;
pub mod eraser;
pub mod grammar;
pub mod letter;
pub mod machine;
pub mod omega;
pub mod oracle;
pub mod pi;
pub mod sigma;
pub mod suite;
