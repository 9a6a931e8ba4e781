//! pdtlab: construction, analysis and probabilistic lifting of push-down
//! transducers built from context-free grammars.
//!
//! The library covers:
//! - grammars: validation, reduction, left-corner relations, maximum-likelihood
//!   estimation, partition functions, consistency, derivation enumeration
//!   ([`grammar`]);
//! - push-down transducers: normal form, computation enumeration, symbolic
//!   string probabilities, trimming ([`automaton`]);
//! - structural properties: the leads-to relation, the completed-path and
//!   single-pop-target properties, dead-computation witnesses, mass bounds
//!   ([`properties`]);
//! - six parsing strategies (top-down, left-corner, PLR, epsilon-left-corner,
//!   extended left-corner, LR(0)) with output-to-derivation mappers and a
//!   behavioral contract checker ([`strategies`]);
//! - probability lifting from a grammar onto a transducer, the induced
//!   weighted grammar, the reverse translation, and feasibility analysis
//!   ([`lifting`]);
//! - tabular string- and prefix-probability computation ([`prefix`]).

pub mod automaton;
pub mod fixtures;
pub mod grammar;
pub mod lifting;
pub mod numeric;
pub mod prefix;
pub mod properties;
pub mod strategies;

pub use automaton::{Computation, Configuration, OutSym, Pdt, Ppdt, ProbMonomial, Transition};
pub use grammar::{Cfg, Corpus, Derivation, Pcfg, Rule, Symbol};
pub use numeric::{Rational, Value};
pub use strategies::StrategyKind;
