//! Context-free grammars, probabilistic grammars, derivations, and the
//! grammar-level analyses: reduction, left-corner relations, maximum-likelihood
//! estimation, partition functions, consistency, derivation enumeration and
//! string probabilities.

use crate::numeric::{PolySystem, Rational, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    /// A terminal (input alphabet) symbol.
    T(String),
    /// A nonterminal.
    N(String),
}

impl Symbol {
    pub fn t(s: &str) -> Symbol {
        Symbol::T(s.to_string())
    }
    pub fn n(s: &str) -> Symbol {
        Symbol::N(s.to_string())
    }
    pub fn name(&self) -> &str {
        match self {
            Symbol::T(s) | Symbol::N(s) => s,
        }
    }
    pub fn is_terminal(&self) -> bool {
        matches!(self, Symbol::T(_))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    /// Stable display identifier (e.g. `pi_S`).
    pub id: String,
    pub lhs: String,
    pub rhs: Vec<Symbol>,
}

/// Rules are also addressed positionally; a derivation is the sequence of
/// positional rule indices of a leftmost derivation.
pub type RuleIx = usize;
pub type Derivation = Vec<RuleIx>;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("grammar must have exactly one rule for the start symbol {0}")]
    StartRuleCount(String),
    #[error("start rule must have a non-empty right-hand side")]
    EmptyStartRhs,
    #[error("the start symbol {0} may not occur in a right-hand side")]
    StartInRhs(String),
    #[error("duplicate rule id {0}")]
    DuplicateRuleId(String),
    #[error("symbol {0} is used as both a terminal and a nonterminal")]
    SymbolKindClash(String),
    #[error("nonterminal {0} appears in a right-hand side but has no rule")]
    UndeclaredNonterminal(String),
    #[error("the reduced grammar has an empty language")]
    EmptyLanguage,
    #[error("rule {0} does not occur in the corpus and cannot be estimated")]
    UncoveredRule(String),
    #[error("probability count does not match rule count")]
    ProbabilityArity,
    #[error("derivation is not a valid leftmost derivation (step {0})")]
    BadDerivation(usize),
}

/// A validated context-free grammar. Invariants: exactly one start rule whose
/// rhs is non-empty; the start symbol occurs in no rhs; every nonterminal used
/// in a rhs has at least one rule; no name is both terminal and nonterminal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cfg {
    pub start: String,
    pub rules: Vec<Rule>,
    terminals: BTreeSet<String>,
    nonterminals: BTreeSet<String>,
    start_rule: RuleIx,
}

impl Cfg {
    pub fn new(start: &str, rules: Vec<Rule>) -> Result<Cfg, GrammarError> {
        let mut ids = BTreeSet::new();
        for r in &rules {
            if !ids.insert(r.id.clone()) {
                return Err(GrammarError::DuplicateRuleId(r.id.clone()));
            }
        }
        let nonterminals: BTreeSet<String> = rules.iter().map(|r| r.lhs.clone()).collect();
        let mut terminals = BTreeSet::new();
        for r in &rules {
            for s in &r.rhs {
                match s {
                    Symbol::T(t) => {
                        if nonterminals.contains(t) {
                            return Err(GrammarError::SymbolKindClash(t.clone()));
                        }
                        terminals.insert(t.clone());
                    }
                    Symbol::N(n) => {
                        if !nonterminals.contains(n) {
                            return Err(GrammarError::UndeclaredNonterminal(n.clone()));
                        }
                        if n == start {
                            return Err(GrammarError::StartInRhs(start.to_string()));
                        }
                    }
                }
            }
        }
        let start_rules: Vec<usize> = rules
            .iter()
            .enumerate()
            .filter(|(_, r)| r.lhs == start)
            .map(|(i, _)| i)
            .collect();
        if start_rules.len() != 1 {
            return Err(GrammarError::StartRuleCount(start.to_string()));
        }
        let start_rule = start_rules[0];
        if rules[start_rule].rhs.is_empty() {
            return Err(GrammarError::EmptyStartRhs);
        }
        Ok(Cfg {
            start: start.to_string(),
            rules,
            terminals,
            nonterminals,
            start_rule,
        })
    }

    pub fn terminals(&self) -> &BTreeSet<String> {
        &self.terminals
    }
    pub fn nonterminals(&self) -> &BTreeSet<String> {
        &self.nonterminals
    }
    pub fn start_rule(&self) -> RuleIx {
        self.start_rule
    }

    pub fn rule_by_id(&self, id: &str) -> Option<RuleIx> {
        self.rules.iter().position(|r| r.id == id)
    }

    pub fn rules_for<'a>(&'a self, nt: &'a str) -> impl Iterator<Item = (RuleIx, &'a Rule)> + 'a {
        self.rules
            .iter()
            .enumerate()
            .filter(move |(_, r)| r.lhs == nt)
    }

    /// Grammar size: sum over rules of 1 + |rhs|.
    pub fn size(&self) -> usize {
        self.rules.iter().map(|r| 1 + r.rhs.len()).sum()
    }

    /// Replay a leftmost derivation; returns its terminal yield.
    pub fn replay(&self, d: &Derivation) -> Result<Vec<String>, GrammarError> {
        let mut form: Vec<Symbol> = vec![Symbol::n(&self.start)];
        let mut out = Vec::new();
        for (step, &rix) in d.iter().enumerate() {
            // consume leading terminals
            while let Some(Symbol::T(t)) = form.first() {
                out.push(t.clone());
                form.remove(0);
            }
            match form.first() {
                Some(Symbol::N(n)) => {
                    let rule = self
                        .rules
                        .get(rix)
                        .ok_or(GrammarError::BadDerivation(step))?;
                    if &rule.lhs != n {
                        return Err(GrammarError::BadDerivation(step));
                    }
                    form.splice(0..1, rule.rhs.iter().cloned());
                }
                _ => return Err(GrammarError::BadDerivation(step)),
            }
        }
        while let Some(Symbol::T(t)) = form.first() {
            out.push(t.clone());
            form.remove(0);
        }
        if !form.is_empty() {
            return Err(GrammarError::BadDerivation(d.len()));
        }
        Ok(out)
    }
}

/// The set of nonterminals that derive the empty string.
pub fn nullable_set(cfg: &Cfg) -> BTreeSet<String> {
    let mut nullable: BTreeSet<String> = BTreeSet::new();
    loop {
        let mut changed = false;
        for r in &cfg.rules {
            if !nullable.contains(&r.lhs)
                && r.rhs.iter().all(|s| match s {
                    Symbol::T(_) => false,
                    Symbol::N(n) => nullable.contains(n),
                })
            {
                nullable.insert(r.lhs.clone());
                changed = true;
            }
        }
        if !changed {
            return nullable;
        }
    }
}

/// Remove unproductive and unreachable rules/nonterminals. Errors with
/// `EmptyLanguage` when nothing productive remains for the start symbol.
pub fn reduce(cfg: &Cfg) -> Result<Cfg, GrammarError> {
    // productive nonterminals
    let mut productive: BTreeSet<String> = BTreeSet::new();
    loop {
        let mut changed = false;
        for r in &cfg.rules {
            if !productive.contains(&r.lhs)
                && r.rhs.iter().all(|s| match s {
                    Symbol::T(_) => true,
                    Symbol::N(n) => productive.contains(n),
                })
            {
                productive.insert(r.lhs.clone());
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if !productive.contains(&cfg.start) {
        return Err(GrammarError::EmptyLanguage);
    }
    // reachable via productive rules only
    let mut reachable: BTreeSet<String> = BTreeSet::new();
    reachable.insert(cfg.start.clone());
    let mut agenda = vec![cfg.start.clone()];
    while let Some(nt) = agenda.pop() {
        for (_, r) in cfg.rules_for(&nt) {
            if r.rhs.iter().all(|s| match s {
                Symbol::T(_) => true,
                Symbol::N(n) => productive.contains(n),
            }) {
                for s in &r.rhs {
                    if let Symbol::N(n) = s {
                        if reachable.insert(n.clone()) {
                            agenda.push(n.clone());
                        }
                    }
                }
            }
        }
    }
    let rules: Vec<Rule> = cfg
        .rules
        .iter()
        .filter(|r| {
            reachable.contains(&r.lhs)
                && r.rhs.iter().all(|s| match s {
                    Symbol::T(_) => true,
                    Symbol::N(n) => productive.contains(n) && reachable.contains(n),
                })
        })
        .cloned()
        .collect();
    Cfg::new(&cfg.start, rules)
}

/// True when every nonterminal with a rule is both reachable and productive.
pub fn is_reduced(cfg: &Cfg) -> bool {
    match reduce(cfg) {
        Ok(r) => r.rules.len() == cfg.rules.len(),
        Err(_) => false,
    }
}

/// The reflexive-transitive left-corner relation over grammar symbols.
/// With `ignore_nullable_prefix`, a symbol is a left corner of `A` when some
/// rule `A -> mu X beta` has `mu` nullable and `X` the corner (the relation
/// used by the epsilon-tolerant strategies); otherwise `mu` must be empty.
#[derive(Clone, Debug)]
pub struct LeftCorners {
    pairs: BTreeSet<(Symbol, Symbol)>,
}

impl LeftCorners {
    /// `x` is a (reflexive-transitive) left corner of `y`.
    pub fn holds(&self, x: &Symbol, y: &Symbol) -> bool {
        x == y || self.pairs.contains(&(x.clone(), y.clone()))
    }
    pub fn pairs(&self) -> &BTreeSet<(Symbol, Symbol)> {
        &self.pairs
    }
}

pub fn left_corner_relation(cfg: &Cfg, ignore_nullable_prefix: bool) -> LeftCorners {
    let nullable = if ignore_nullable_prefix {
        nullable_set(cfg)
    } else {
        BTreeSet::new()
    };
    // direct corners
    let mut pairs: BTreeSet<(Symbol, Symbol)> = BTreeSet::new();
    for r in &cfg.rules {
        for s in &r.rhs {
            pairs.insert((s.clone(), Symbol::n(&r.lhs)));
            match s {
                Symbol::N(n) if nullable.contains(n) => continue,
                _ => break,
            }
        }
    }
    // transitive closure
    loop {
        let mut added = Vec::new();
        for (a, b) in &pairs {
            for (c, d) in &pairs {
                if b == c && !pairs.contains(&(a.clone(), d.clone())) {
                    added.push((a.clone(), d.clone()));
                }
            }
        }
        if added.is_empty() {
            break;
        }
        pairs.extend(added);
    }
    LeftCorners { pairs }
}

/// A probabilistic CFG: a grammar plus one probability per rule (positionally
/// aligned with `cfg.rules`).
#[derive(Clone, Debug)]
pub struct Pcfg {
    pub cfg: Cfg,
    pub probs: Vec<Value>,
}

impl Pcfg {
    pub fn new(cfg: Cfg, probs: Vec<Value>) -> Result<Pcfg, GrammarError> {
        if probs.len() != cfg.rules.len() {
            return Err(GrammarError::ProbabilityArity);
        }
        Ok(Pcfg { cfg, probs })
    }

    pub fn prob(&self, rix: RuleIx) -> &Value {
        &self.probs[rix]
    }

    /// Proper: for every nonterminal the rule probabilities sum to one
    /// (exactly on the rational path, within `tol` otherwise) and none is
    /// negative.
    pub fn is_proper(&self, tol: f64) -> bool {
        for nt in self.cfg.nonterminals() {
            let mut sum = Value::zero();
            for (rix, _) in self.cfg.rules_for(nt) {
                if self.probs[rix].to_f64() < 0.0 {
                    return false;
                }
                sum = sum.add(&self.probs[rix]);
            }
            if !sum.approx_eq(&Value::one(), tol) {
                return false;
            }
        }
        true
    }

    /// Probability of a leftmost derivation: product of its rule probabilities.
    pub fn derivation_probability(&self, d: &Derivation) -> Value {
        d.iter()
            .fold(Value::one(), |acc, &rix| acc.mul(&self.probs[rix]))
    }
}

/// A corpus is a list of observed leftmost derivations.
#[derive(Clone, Debug, Default)]
pub struct Corpus {
    pub derivations: Vec<Derivation>,
}

/// Maximum-likelihood estimation of rule probabilities from a derivation
/// corpus: relative frequency among rules with the same lhs. A rule whose lhs
/// never occurs in the corpus cannot be normalized and triggers
/// `UncoveredRule`.
pub fn mle_estimate(cfg: &Cfg, corpus: &Corpus) -> Result<Pcfg, GrammarError> {
    let mut counts: Vec<u64> = vec![0; cfg.rules.len()];
    for d in &corpus.derivations {
        cfg.replay(d)?;
        for &rix in d {
            counts[rix] += 1;
        }
    }
    let mut lhs_totals: BTreeMap<&str, u64> = BTreeMap::new();
    for (rix, r) in cfg.rules.iter().enumerate() {
        *lhs_totals.entry(r.lhs.as_str()).or_insert(0) += counts[rix];
    }
    let mut probs = Vec::with_capacity(cfg.rules.len());
    for (rix, r) in cfg.rules.iter().enumerate() {
        let total = lhs_totals[r.lhs.as_str()];
        if total == 0 {
            return Err(GrammarError::UncoveredRule(r.id.clone()));
        }
        probs.push(Value::Exact(Rational::new(
            counts[rix].into(),
            total.into(),
        )));
    }
    Pcfg::new(cfg.clone(), probs)
}

/// Partition functions Z(A): the least non-negative solution of
/// Z(A) = sum over rules A -> alpha of p(rule) * prod of Z over the
/// nonterminals of alpha.
pub fn partition_functions(
    pcfg: &Pcfg,
    tol: f64,
    max_iter: usize,
) -> Result<BTreeMap<String, Value>, crate::numeric::NonConvergence> {
    let nts: Vec<&String> = pcfg.cfg.nonterminals().iter().collect();
    let index: BTreeMap<&str, usize> = nts.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut sys = PolySystem::new(nts.len());
    for (rix, r) in pcfg.cfg.rules.iter().enumerate() {
        let vars: Vec<usize> = r
            .rhs
            .iter()
            .filter_map(|s| match s {
                Symbol::N(n) => Some(index[n.as_str()]),
                Symbol::T(_) => None,
            })
            .collect();
        sys.add(index[r.lhs.as_str()], pcfg.probs[rix].clone(), vars);
    }
    let sol = sys.solve(tol, max_iter)?;
    Ok(nts
        .into_iter()
        .zip(sol)
        .map(|(n, v)| (n.clone(), v))
        .collect())
}

#[derive(Clone, Debug)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub z_start: Value,
}

/// A proper PCFG is consistent when the partition function of the start
/// symbol is one (all probability mass reaches finite derivations).
pub fn is_consistent(
    pcfg: &Pcfg,
    tol: f64,
    max_iter: usize,
) -> Result<ConsistencyReport, crate::numeric::NonConvergence> {
    let z = partition_functions(pcfg, tol, max_iter)?;
    let z_start = z[&pcfg.cfg.start].clone();
    // Iteration approaches the fixpoint from below, so allow tolerance slack.
    let consistent = z_start.approx_eq(&Value::one(), tol.max(1e-9) * 10.0);
    Ok(ConsistencyReport {
        consistent,
        z_start,
    })
}

/// Enumerate all leftmost derivations with at most `max_steps` rule
/// applications, in lexicographic order of their rule-index sequences.
/// Returns each derivation with its terminal yield.
pub fn enumerate_derivations(cfg: &Cfg, max_steps: usize) -> Vec<(Derivation, Vec<String>)> {
    let mut out = Vec::new();
    let mut deriv: Derivation = Vec::new();
    let form = vec![Symbol::n(&cfg.start)];
    walk(cfg, form, &mut deriv, max_steps, &mut out);
    return out;

    fn walk(
        cfg: &Cfg,
        form: Vec<Symbol>,
        deriv: &mut Derivation,
        left: usize,
        out: &mut Vec<(Derivation, Vec<String>)>,
    ) {
        match form.iter().position(|s| !s.is_terminal()) {
            None => {
                out.push((
                    deriv.clone(),
                    form.iter().map(|s| s.name().to_string()).collect(),
                ));
            }
            Some(pos) => {
                if left == 0 {
                    return;
                }
                let nt = form[pos].name().to_string();
                for (rix, r) in cfg.rules_for(&nt) {
                    let mut next = form.clone();
                    next.splice(pos..pos + 1, r.rhs.iter().cloned());
                    deriv.push(rix);
                    walk(cfg, next, deriv, left - 1, out);
                    deriv.pop();
                }
            }
        }
    }
}

/// Exact probability of a terminal string: the sum of the probabilities of
/// all its leftmost derivations with at most `max_steps` rule applications.
/// (For non-cyclic grammars any sufficiently large bound is exact.)
pub fn string_probability_cfg(pcfg: &Pcfg, input: &[String], max_steps: usize) -> Value {
    let mut total = Value::zero();
    let form = vec![Symbol::n(&pcfg.cfg.start)];
    walk(pcfg, form, 0, Value::one(), input, max_steps, &mut total);
    return total;

    #[allow(clippy::too_many_arguments)]
    fn walk(
        pcfg: &Pcfg,
        mut form: Vec<Symbol>,
        mut matched: usize,
        weight: Value,
        input: &[String],
        left: usize,
        total: &mut Value,
    ) {
        while let Some(Symbol::T(t)) = form.first() {
            if matched >= input.len() || input[matched] != *t {
                return;
            }
            matched += 1;
            form.remove(0);
        }
        if form.is_empty() {
            if matched == input.len() {
                *total = total.add(&weight);
            }
            return;
        }
        if left == 0 {
            return;
        }
        // prune: terminals already in the form can never shrink
        let pending_terminals = form.iter().filter(|s| s.is_terminal()).count();
        if matched + pending_terminals > input.len() {
            return;
        }
        let nt = form[0].name().to_string();
        for (rix, r) in pcfg.cfg.rules_for(&nt) {
            if pcfg.probs[rix].is_zero() {
                continue;
            }
            let mut next = form.clone();
            next.splice(0..1, r.rhs.iter().cloned());
            walk(
                pcfg,
                next,
                matched,
                weight.mul(&pcfg.probs[rix]),
                input,
                left - 1,
                total,
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::numeric::ratio;
    use num::{One, Zero};

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(|x| x.to_string()).collect()
    }

    #[test]
    fn validation_rejects_bad_grammars() {
        // two start rules
        let r = |id: &str, lhs: &str, rhs: Vec<Symbol>| Rule {
            id: id.into(),
            lhs: lhs.into(),
            rhs,
        };
        assert!(matches!(
            Cfg::new(
                "S",
                vec![
                    r("a", "S", vec![Symbol::t("a")]),
                    r("b", "S", vec![Symbol::t("b")])
                ]
            ),
            Err(GrammarError::StartRuleCount(_))
        ));
        // start in rhs
        assert!(matches!(
            Cfg::new("S", vec![r("a", "S", vec![Symbol::n("S")])]),
            Err(GrammarError::StartInRhs(_))
        ));
        // empty start rhs
        assert!(matches!(
            Cfg::new("S", vec![r("a", "S", vec![])]),
            Err(GrammarError::EmptyStartRhs)
        ));
        // undeclared nonterminal
        assert!(matches!(
            Cfg::new("S", vec![r("a", "S", vec![Symbol::n("B")])]),
            Err(GrammarError::UndeclaredNonterminal(_))
        ));
    }

    #[test]
    fn reduce_removes_junk_and_detects_empty() {
        let r = |id: &str, lhs: &str, rhs: Vec<Symbol>| Rule {
            id: id.into(),
            lhs: lhs.into(),
            rhs,
        };
        let cfg = Cfg::new(
            "S",
            vec![
                r("s", "S", vec![Symbol::n("A")]),
                r("a1", "A", vec![Symbol::t("a")]),
                // B unproductive (only self loop), C unreachable
                r("a2", "A", vec![Symbol::n("B")]),
                r("b", "B", vec![Symbol::n("B")]),
                r("c", "C", vec![Symbol::t("c")]),
            ],
        )
        .unwrap();
        let red = reduce(&cfg).unwrap();
        let ids: Vec<&str> = red.rules.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, vec!["s", "a1"]);
        assert!(is_reduced(&red));
        assert!(!is_reduced(&cfg));
        // reduce is idempotent
        assert_eq!(reduce(&red).unwrap(), red);

        let empty = Cfg::new("S", vec![r("s", "S", vec![Symbol::n("B")]), r("b", "B", vec![Symbol::n("B")])])
            .unwrap();
        assert_eq!(reduce(&empty), Err(GrammarError::EmptyLanguage));
    }

    #[test]
    fn left_corner_relations() {
        let g = fixtures::g_lr();
        let lc = left_corner_relation(&g, false);
        assert!(lc.holds(&Symbol::t("a"), &Symbol::n("A")));
        assert!(lc.holds(&Symbol::t("a"), &Symbol::n("S")));
        assert!(lc.holds(&Symbol::t("x"), &Symbol::n("C")));
        assert!(!lc.holds(&Symbol::t("b"), &Symbol::n("S")));
        assert!(lc.holds(&Symbol::n("A"), &Symbol::n("A"))); // reflexive

        // nullable prefixes: S0 -> S, S -> A B, A -> eps, B -> b
        let r = |id: &str, lhs: &str, rhs: Vec<Symbol>| Rule {
            id: id.into(),
            lhs: lhs.into(),
            rhs,
        };
        let g2 = Cfg::new(
            "S",
            vec![
                r("s", "S", vec![Symbol::n("A"), Symbol::n("B")]),
                r("a", "A", vec![]),
                r("b", "B", vec![Symbol::t("b")]),
            ],
        )
        .unwrap();
        let strict = left_corner_relation(&g2, false);
        let eps = left_corner_relation(&g2, true);
        assert!(!strict.holds(&Symbol::n("B"), &Symbol::n("S")));
        assert!(eps.holds(&Symbol::n("B"), &Symbol::n("S")));
        assert!(eps.holds(&Symbol::t("b"), &Symbol::n("S")));
        // the strict relation is contained in the eps-tolerant one
        for p in strict.pairs() {
            assert!(eps.pairs().contains(p));
        }
    }

    #[test]
    fn replay_and_enumerate() {
        let g = fixtures::g_lr();
        let d = vec![
            g.rule_by_id("pi_S").unwrap(),
            g.rule_by_id("pi_A1").unwrap(),
            g.rule_by_id("pi_C").unwrap(),
            g.rule_by_id("pi_B2").unwrap(),
            g.rule_by_id("pi_D").unwrap(),
        ];
        assert_eq!(g.replay(&d).unwrap(), toks("a x c b x d"));

        let all = enumerate_derivations(&g, 10);
        assert_eq!(all.len(), 4); // two choices for A, two for B
        // lexicographic by rule-index sequence
        let seqs: Vec<&Derivation> = all.iter().map(|(d, _)| d).collect();
        let mut sorted = seqs.clone();
        sorted.sort();
        assert_eq!(seqs, sorted);
        let yields: BTreeSet<String> = all.iter().map(|(_, y)| y.join(" ")).collect();
        assert!(yields.contains("a x c b x c"));
        assert!(yields.contains("a x d b x d"));
    }

    #[test]
    fn g_lr_string_probabilities() {
        let p = fixtures::pg_lr();
        assert!(p.is_proper(0.0));
        let cases = [
            ("a x c b x c", ratio(2, 9)),
            ("a x c b x d", ratio(1, 9)),
            ("a x d b x c", ratio(4, 9)),
            ("a x d b x d", ratio(2, 9)),
        ];
        let mut sum = Rational::zero();
        for (s, want) in cases {
            let got = string_probability_cfg(&p, &toks(s), 32);
            assert_eq!(got, Value::Exact(want.clone()), "string {s}");
            sum += want;
        }
        assert!(sum.is_one());
        assert_eq!(
            string_probability_cfg(&p, &toks("a x c b x"), 32),
            Value::zero()
        );
    }

    #[test]
    fn g_wr_probabilities_and_consistency() {
        let p = fixtures::pg_wr();
        assert!(p.is_proper(0.0));
        assert_eq!(
            string_probability_cfg(&p, &toks("a a b"), 32),
            Value::Exact(ratio(1, 27))
        );
        assert_eq!(
            string_probability_cfg(&p, &toks("b"), 32),
            Value::Exact(ratio(1, 3))
        );
        assert_eq!(
            string_probability_cfg(&p, &toks("c"), 32),
            Value::Exact(ratio(1, 6))
        );
        let rep = is_consistent(&p, 1e-13, 100_000).unwrap();
        assert!(rep.consistent);
        assert!((rep.z_start.to_f64() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn partition_function_oracles() {
        // S -> S S (0.4) | a (0.6): consistent, Z = 1.
        let r = |id: &str, lhs: &str, rhs: Vec<Symbol>| Rule {
            id: id.into(),
            lhs: lhs.into(),
            rhs,
        };
        let cfg = Cfg::new(
            "S0",
            vec![
                r("top", "S0", vec![Symbol::n("S")]),
                r("split", "S", vec![Symbol::n("S"), Symbol::n("S")]),
                r("leaf", "S", vec![Symbol::t("a")]),
            ],
        )
        .unwrap();
        let mk = |p_split: Rational, p_leaf: Rational| {
            Pcfg::new(
                cfg.clone(),
                vec![
                    Value::one(),
                    Value::Exact(p_split),
                    Value::Exact(p_leaf),
                ],
            )
            .unwrap()
        };
        let sub = mk(ratio(2, 5), ratio(3, 5));
        let z = partition_functions(&sub, 1e-13, 200_000).unwrap();
        assert!((z["S"].to_f64() - 1.0).abs() < 1e-9);
        assert!(is_consistent(&sub, 1e-13, 200_000).unwrap().consistent);

        // S -> S S (0.6) | a (0.4): inconsistent, Z = 2/3.
        let sup = mk(ratio(3, 5), ratio(2, 5));
        let z2 = partition_functions(&sup, 1e-13, 200_000).unwrap();
        assert!((z2["S"].to_f64() - 2.0 / 3.0).abs() < 1e-9);
        assert!(!is_consistent(&sup, 1e-13, 200_000).unwrap().consistent);
    }

    #[test]
    fn mle_from_derivations() {
        let g = fixtures::g_lr();
        let ix = |id: &str| g.rule_by_id(id).unwrap();
        let corpus = Corpus {
            derivations: vec![
                vec![ix("pi_S"), ix("pi_A1"), ix("pi_C"), ix("pi_B1"), ix("pi_C")],
                vec![ix("pi_S"), ix("pi_A2"), ix("pi_D"), ix("pi_B2"), ix("pi_D")],
            ],
        };
        let est = mle_estimate(&g, &corpus).unwrap();
        assert_eq!(est.probs[ix("pi_A1")], Value::Exact(ratio(1, 2)));
        assert_eq!(est.probs[ix("pi_C")], Value::one());
        assert!(est.is_proper(0.0));

        // a corpus that never uses C leaves pi_C uncovered
        let partial = Corpus {
            derivations: vec![vec![
                ix("pi_S"),
                ix("pi_A2"),
                ix("pi_D"),
                ix("pi_B2"),
                ix("pi_D"),
            ]],
        };
        assert!(matches!(
            mle_estimate(&g, &partial),
            Err(GrammarError::UncoveredRule(_))
        ));
    }
}
