//! Parsing strategies: constructions of push-down transducers from reduced
//! grammars, mappings from transducer output back to leftmost derivations,
//! and a behavioral contract checker (computations on a string are in
//! bijection with its derivations, and the emitted rule multiset is
//! preserved by the mapping).

mod elr;
mod eps_left_corner;
mod left_corner;
mod lr0;
mod plr;
mod top_down;

use crate::automaton::{normalize, trim_pdt, OutSym, Pdt};
use crate::grammar::{
    enumerate_derivations, is_reduced, left_corner_relation, nullable_set, Cfg, Derivation,
    LeftCorners, Symbol,
};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StrategyKind {
    TopDown,
    LeftCorner,
    Plr,
    EpsLeftCorner,
    Elr,
    Lr0,
}

pub const ALL_STRATEGIES: [StrategyKind; 6] = [
    StrategyKind::TopDown,
    StrategyKind::LeftCorner,
    StrategyKind::Plr,
    StrategyKind::EpsLeftCorner,
    StrategyKind::Elr,
    StrategyKind::Lr0,
];

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StrategyKind::TopDown => "top_down",
            StrategyKind::LeftCorner => "left_corner",
            StrategyKind::Plr => "plr",
            StrategyKind::EpsLeftCorner => "eps_left_corner",
            StrategyKind::Elr => "elr",
            StrategyKind::Lr0 => "lr0",
        };
        write!(f, "{s}")
    }
}

impl FromStr for StrategyKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "top_down" => Ok(StrategyKind::TopDown),
            "left_corner" => Ok(StrategyKind::LeftCorner),
            "plr" => Ok(StrategyKind::Plr),
            "eps_left_corner" => Ok(StrategyKind::EpsLeftCorner),
            "elr" => Ok(StrategyKind::Elr),
            "lr0" => Ok(StrategyKind::Lr0),
            other => Err(format!("unknown strategy {other}")),
        }
    }
}

#[derive(Debug, thiserror::Error, Clone)]
pub enum StrategyError {
    #[error("the grammar is not reduced; call reduce first")]
    NotReduced,
    #[error("the start rule's right-hand side contains a nullable nonterminal ({0})")]
    NullablePrefixInStart(String),
    #[error("construction produced an automaton with an empty language")]
    EmptyConstruction,
}

#[derive(Debug, thiserror::Error, Clone)]
#[error("malformed transducer output: {0}")]
pub struct MalformedOutput(pub String);

/// Shared grammar context handed to the individual constructions.
pub(crate) struct Ctx<'a> {
    pub cfg: &'a Cfg,
    pub nullable: BTreeSet<String>,
    /// strict left-corner relation (reflexive-transitive)
    pub lc: LeftCorners,
    /// left-corner relation ignoring nullable prefixes
    pub lc_eps: LeftCorners,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a Cfg) -> Ctx<'a> {
        Ctx {
            cfg,
            nullable: nullable_set(cfg),
            lc: left_corner_relation(cfg, false),
            lc_eps: left_corner_relation(cfg, true),
        }
    }

    /// All grammar symbols (terminals and nonterminals).
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = self
            .cfg
            .terminals()
            .iter()
            .map(|t| Symbol::t(t))
            .collect();
        out.extend(self.cfg.nonterminals().iter().map(|n| Symbol::n(n)));
        out
    }
}

/// The raw construction: literal transition schemas (with shorthand forms
/// already expanded into primitives), before normal form and trimming.
pub fn construct_raw(kind: StrategyKind, cfg: &Cfg) -> Result<Pdt, StrategyError> {
    if !is_reduced(cfg) {
        return Err(StrategyError::NotReduced);
    }
    let ctx = Ctx::new(cfg);
    if kind == StrategyKind::EpsLeftCorner {
        let start_rhs = &cfg.rules[cfg.start_rule()].rhs;
        for s in start_rhs {
            if let Symbol::N(n) = s {
                if ctx.nullable.contains(n) {
                    return Err(StrategyError::NullablePrefixInStart(n.clone()));
                }
            }
        }
    }
    Ok(match kind {
        StrategyKind::TopDown => top_down::raw(&ctx),
        StrategyKind::LeftCorner => left_corner::raw(&ctx),
        StrategyKind::Plr => plr::raw(&ctx),
        StrategyKind::EpsLeftCorner => eps_left_corner::raw(&ctx),
        StrategyKind::Elr => elr::raw(&ctx),
        StrategyKind::Lr0 => lr0::raw(&ctx),
    })
}

/// Construct the transducer for a strategy: raw schemas, brought into normal
/// form, then trimmed to usable transitions.
pub fn construct(kind: StrategyKind, cfg: &Cfg) -> Result<Pdt, StrategyError> {
    let raw = construct_raw(kind, cfg)?;
    let norm = normalize(&raw);
    trim_pdt(&norm).map_err(|_| StrategyError::EmptyConstruction)
}

/// Map a complete computation's output string back to the leftmost
/// derivation it represents.
pub fn map_output(
    kind: StrategyKind,
    cfg: &Cfg,
    v: &[OutSym],
) -> Result<Derivation, MalformedOutput> {
    match kind {
        StrategyKind::TopDown => top_down::map_output(cfg, v),
        StrategyKind::LeftCorner => left_corner::map_output(cfg, v),
        StrategyKind::EpsLeftCorner => eps_left_corner::map_output(cfg, v),
        StrategyKind::Plr | StrategyKind::Elr | StrategyKind::Lr0 => {
            reversed_rightmost_to_leftmost(cfg, v)
        }
    }
}

/// Interpret the output as a rightmost derivation in reverse (the order of
/// completions), rebuild the parse tree, and linearize it leftmost.
pub(crate) fn reversed_rightmost_to_leftmost(
    cfg: &Cfg,
    v: &[OutSym],
) -> Result<Derivation, MalformedOutput> {
    // stack of completed subtrees: (root nonterminal, leftmost derivation)
    let mut stack: Vec<(String, Derivation)> = Vec::new();
    for sym in v {
        let rix = match sym {
            OutSym::Rule(id) => cfg
                .rule_by_id(id)
                .ok_or_else(|| MalformedOutput(format!("unknown rule id {id}")))?,
            other => {
                return Err(MalformedOutput(format!(
                    "unexpected output token {}",
                    other.render()
                )))
            }
        };
        let rule = &cfg.rules[rix];
        // pop one subtree per nonterminal child; children completed left to
        // right, so the stack holds them with the rightmost on top
        let mut children: Vec<Derivation> = Vec::new();
        for child in rule.rhs.iter().rev() {
            if let Symbol::N(n) = child {
                let (root, d) = stack
                    .pop()
                    .ok_or_else(|| MalformedOutput(format!("missing subtree for {n}")))?;
                if &root != n {
                    return Err(MalformedOutput(format!(
                        "subtree root {root} does not match child {n} of rule {}",
                        rule.id
                    )));
                }
                children.push(d);
            }
        }
        children.reverse();
        let mut d = vec![rix];
        for c in children {
            d.extend(c);
        }
        stack.push((rule.lhs.clone(), d));
    }
    if stack.len() != 1 || stack[0].0 != cfg.start {
        return Err(MalformedOutput(format!(
            "output does not assemble into a single derivation from {}",
            cfg.start
        )));
    }
    Ok(stack.pop().unwrap().1)
}

/// The rule tokens of an output string, in order.
pub fn rule_projection(cfg: &Cfg, v: &[OutSym]) -> Result<Vec<usize>, MalformedOutput> {
    let mut out = Vec::new();
    for s in v {
        if let OutSym::Rule(id) = s {
            out.push(
                cfg.rule_by_id(id)
                    .ok_or_else(|| MalformedOutput(format!("unknown rule id {id}")))?,
            );
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct ContractReport {
    pub ok: bool,
    pub strings_checked: usize,
    pub computations_checked: usize,
    pub failures: Vec<String>,
}

/// Check the behavioral contract of a strategy on a grammar: for every input
/// string (from derivations of at most `max_deriv_steps` rule applications),
/// the complete computations are in bijection with the string's leftmost
/// derivations via `map_output`, and each computation's emitted rule multiset
/// equals the rule multiset of its derivation.
pub fn verify_strategy_contract(
    kind: StrategyKind,
    cfg: &Cfg,
    max_deriv_steps: usize,
    max_comp_steps: usize,
) -> Result<ContractReport, StrategyError> {
    let pdt = construct(kind, cfg)?;
    let mut by_yield: BTreeMap<Vec<String>, BTreeSet<Derivation>> = BTreeMap::new();
    for (d, y) in enumerate_derivations(cfg, max_deriv_steps) {
        by_yield.entry(y).or_default().insert(d);
    }
    let mut report = ContractReport {
        ok: true,
        strings_checked: 0,
        computations_checked: 0,
        failures: Vec::new(),
    };
    let fail = |r: &mut ContractReport, msg: String| {
        r.ok = false;
        if r.failures.len() < 25 {
            r.failures.push(msg);
        }
    };
    for (w, derivs) in &by_yield {
        report.strings_checked += 1;
        let en = crate::automaton::enumerate_computations(&pdt, w, max_comp_steps);
        let label = w.join(" ");
        if en.bound_hit {
            fail(
                &mut report,
                format!("[{kind}] enumeration bound hit on \"{label}\""),
            );
            continue;
        }
        let mut mapped: BTreeSet<Derivation> = BTreeSet::new();
        for c in &en.complete {
            report.computations_checked += 1;
            let out = c.output(&pdt);
            let d = match map_output(kind, cfg, &out) {
                Ok(d) => d,
                Err(e) => {
                    fail(&mut report, format!("[{kind}] \"{label}\": {e}"));
                    continue;
                }
            };
            match cfg.replay(&d) {
                Ok(y) if &y == w => {}
                _ => {
                    fail(
                        &mut report,
                        format!("[{kind}] \"{label}\": mapped derivation invalid for input"),
                    );
                    continue;
                }
            }
            // rule multiset preservation
            let mut emitted = rule_projection(cfg, &out).unwrap_or_default();
            emitted.sort_unstable();
            let mut expect = d.clone();
            expect.sort_unstable();
            if emitted != expect {
                fail(
                    &mut report,
                    format!("[{kind}] \"{label}\": emitted rule multiset differs from derivation"),
                );
            }
            if !mapped.insert(d) {
                fail(
                    &mut report,
                    format!("[{kind}] \"{label}\": two computations map to the same derivation"),
                );
            }
        }
        if &mapped != derivs {
            fail(
                &mut report,
                format!(
                    "[{kind}] \"{label}\": {} computations vs {} derivations",
                    mapped.len(),
                    derivs.len()
                ),
            );
        }
    }
    Ok(report)
}

/// Symbols of a raw construction that are plain strategy items (excludes the
/// fresh intermediates introduced by shorthand expansion, which contain `@`
/// or `+`).
pub fn item_symbol_count(pdt: &Pdt) -> usize {
    pdt.symbols
        .iter()
        .filter(|s| !s.contains('@') && !s.contains('+') && !s.contains('!'))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::enumerate_computations;
    use crate::fixtures::{g_amb, g_lr, g_nullable, g_wr};
    use crate::grammar::Rule;

    fn rule(id: &str, lhs: &str, rhs: &[Symbol]) -> Rule {
        Rule {
            id: id.to_string(),
            lhs: lhs.to_string(),
            rhs: rhs.to_vec(),
        }
    }

    /// Nullables inside the grammar but not in the start rule's rhs:
    /// S -> B; B -> A b | b A; A -> eps | a.
    fn g_eps() -> Cfg {
        Cfg::new(
            "S",
            vec![
                rule("pi_S", "S", &[Symbol::n("B")]),
                rule("pi_B1", "B", &[Symbol::n("A"), Symbol::t("b")]),
                rule("pi_B2", "B", &[Symbol::t("b"), Symbol::n("A")]),
                rule("pi_A1", "A", &[]),
                rule("pi_A2", "A", &[Symbol::t("a")]),
            ],
        )
        .unwrap()
    }

    fn check(kind: StrategyKind, cfg: &Cfg, d: usize, c: usize) {
        let rep = verify_strategy_contract(kind, cfg, d, c).unwrap();
        assert!(
            rep.ok,
            "{kind}: {} strings, failures: {:#?}",
            rep.strings_checked, rep.failures
        );
        assert!(rep.computations_checked > 0, "{kind}: nothing checked");
    }

    #[test]
    fn top_down_dotted_symbol_count() {
        let cfg = g_lr();
        let raw = construct_raw(StrategyKind::TopDown, &cfg).unwrap();
        assert_eq!(item_symbol_count(&raw), 21);
        let full = construct(StrategyKind::TopDown, &cfg).unwrap();
        assert_eq!(item_symbol_count(&full), 21);
    }

    #[test]
    fn left_corner_smallest_output() {
        let cfg = Cfg::new("S", vec![rule("pi_S", "S", &[Symbol::t("a")])]).unwrap();
        let pdt = construct(StrategyKind::LeftCorner, &cfg).unwrap();
        let en = enumerate_computations(&pdt, &["a".to_string()], 50);
        assert!(!en.bound_hit);
        assert_eq!(en.complete.len(), 1);
        let out = en.complete[0].output(&pdt);
        let rendered: Vec<String> = out.iter().map(|o| o.render()).collect();
        assert_eq!(rendered.join(" "), "pi_S #end");
        assert_eq!(
            map_output(StrategyKind::LeftCorner, &cfg, &out).unwrap(),
            vec![0]
        );
    }

    #[test]
    fn eps_left_corner_mapper_trace() {
        // trace of the single computation on "b" for S -> AB; A -> eps; B -> b
        let cfg = g_nullable();
        let trace = vec![
            OutSym::Rule("pi_B".into()),
            OutSym::Mark(0),
            OutSym::Rule("pi_S".into()),
            OutSym::Mark(1),
            OutSym::Rule("pi_A".into()),
            OutSym::End,
        ];
        let d = map_output(StrategyKind::EpsLeftCorner, &cfg, &trace).unwrap();
        let ids: Vec<&str> = d.iter().map(|&i| cfg.rules[i].id.as_str()).collect();
        assert_eq!(ids, vec!["pi_S", "pi_A", "pi_B"]);
    }

    #[test]
    fn eps_left_corner_rejects_nullable_start_rhs() {
        let err = construct(StrategyKind::EpsLeftCorner, &g_nullable()).unwrap_err();
        assert!(matches!(err, StrategyError::NullablePrefixInStart(n) if n == "A"));
    }

    #[test]
    fn construct_rejects_unreduced_grammar() {
        let cfg = Cfg::new(
            "S",
            vec![
                rule("pi_S", "S", &[Symbol::n("A")]),
                rule("pi_A", "A", &[Symbol::t("a"), Symbol::n("A")]),
            ],
        )
        .unwrap();
        for kind in ALL_STRATEGIES {
            assert!(matches!(
                construct(kind, &cfg),
                Err(StrategyError::NotReduced)
            ));
        }
    }

    #[test]
    fn contract_two_level_grammar() {
        let cfg = g_lr();
        for kind in ALL_STRATEGIES {
            check(kind, &cfg, 5, 200);
        }
    }

    #[test]
    fn contract_linear_grammar() {
        let cfg = g_wr();
        for kind in ALL_STRATEGIES {
            check(kind, &cfg, 8, 300);
        }
    }

    #[test]
    fn contract_ambiguous_grammar() {
        let cfg = g_amb();
        for kind in ALL_STRATEGIES {
            if kind == StrategyKind::TopDown {
                continue; // left recursion: top-down predictions do not terminate
            }
            check(kind, &cfg, 6, 300);
        }
    }

    #[test]
    fn contract_nullable_grammar() {
        let cfg = g_nullable();
        for kind in ALL_STRATEGIES {
            if kind == StrategyKind::EpsLeftCorner {
                continue; // rejected: nullable nonterminal in the start rhs
            }
            check(kind, &cfg, 4, 100);
        }
    }

    #[test]
    fn contract_nullable_grammar_all_strategies() {
        let cfg = g_eps();
        for kind in ALL_STRATEGIES {
            check(kind, &cfg, 5, 150);
        }
    }
}
