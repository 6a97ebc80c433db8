//! Hyperlanguages over finite words: nondeterministic finite hyperautomata,
//! realizability constructions, context-free hypergrammars and their
//! decision procedures.

pub mod cfg;
pub mod cfhg;
pub mod fixtures;
pub mod letter;
pub mod model;
pub mod nfa;
pub mod nfh;
pub mod realize;
pub mod text;

pub use letter::Letter;
pub use model::*;
pub use nfa::{Dfa, Nfa, NfaError, StateId, SymDfa, SymNfa, TrackNfa};
pub use nfh::{Nfh, NfhError};
pub use realize::{Caps, OrderedLanguageSpec, PartialOrderSpec, RealizeError};
pub use cfg::{Cfg, CfgError, GSym, Rule, SymCfg, TrackCfg};
pub use cfhg::{Cfhg, CfhgError, LeafPath, Problem};
