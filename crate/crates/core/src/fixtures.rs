//! Reference grammars used throughout the test suite and benchmarks.

use crate::grammar::{Cfg, Pcfg, Rule, Symbol};
use crate::numeric::{ratio, Value};

fn rule(id: &str, lhs: &str, rhs: &[Symbol]) -> Rule {
    Rule {
        id: id.to_string(),
        lhs: lhs.to_string(),
        rhs: rhs.to_vec(),
    }
}

/// Two-level grammar whose left and right branches correlate: the string
/// probabilities are incompatible with any LR-style transition weighting.
///
/// S -> A B; A -> a C | a D; B -> b C | b D; C -> x c; D -> x d.
pub fn g_lr() -> Cfg {
    fn n(s: &str) -> Symbol {
        Symbol::n(s)
    }
    fn t(s: &str) -> Symbol {
        Symbol::t(s)
    }
    Cfg::new(
        "S",
        vec![
            rule("pi_S", "S", &[n("A"), n("B")]),
            rule("pi_A1", "A", &[t("a"), n("C")]),
            rule("pi_A2", "A", &[t("a"), n("D")]),
            rule("pi_B1", "B", &[t("b"), n("C")]),
            rule("pi_B2", "B", &[t("b"), n("D")]),
            rule("pi_C", "C", &[t("x"), t("c")]),
            rule("pi_D", "D", &[t("x"), t("d")]),
        ],
    )
    .unwrap()
}

/// g_lr with its reference probabilities: p(A->aC)=1/3, p(A->aD)=2/3,
/// p(B->bC)=2/3, p(B->bD)=1/3, the rest 1.
pub fn pg_lr() -> Pcfg {
    let cfg = g_lr();
    let probs = cfg
        .rules
        .iter()
        .map(|r| match r.id.as_str() {
            "pi_A1" => Value::Exact(ratio(1, 3)),
            "pi_A2" => Value::Exact(ratio(2, 3)),
            "pi_B1" => Value::Exact(ratio(2, 3)),
            "pi_B2" => Value::Exact(ratio(1, 3)),
            _ => Value::one(),
        })
        .collect();
    Pcfg::new(cfg, probs).unwrap()
}

/// Linear grammar with two competing geometric branches:
/// S -> A; A -> B | C; B -> a B | b; C -> a C | c.
pub fn g_wr() -> Cfg {
    fn n(s: &str) -> Symbol {
        Symbol::n(s)
    }
    fn t(s: &str) -> Symbol {
        Symbol::t(s)
    }
    Cfg::new(
        "S",
        vec![
            rule("pi_S", "S", &[n("A")]),
            rule("pi_A1", "A", &[n("B")]),
            rule("pi_A2", "A", &[n("C")]),
            rule("pi_B1", "B", &[t("a"), n("B")]),
            rule("pi_B2", "B", &[t("b")]),
            rule("pi_C1", "C", &[t("a"), n("C")]),
            rule("pi_C2", "C", &[t("c")]),
        ],
    )
    .unwrap()
}

/// g_wr with its reference probabilities: p(A->B)=p(A->C)=1/2,
/// p(B->aB)=1/3, p(B->b)=2/3, p(C->aC)=2/3, p(C->c)=1/3.
/// Then p(a^n b)/p(a^n c) = (1/2)^(n-1) · ... more precisely
/// p(a^n b) = 1/2·(1/3)^n·2/3 and p(a^n c) = 1/2·(2/3)^n·1/3.
pub fn pg_wr() -> Pcfg {
    let cfg = g_wr();
    let probs = cfg
        .rules
        .iter()
        .map(|r| match r.id.as_str() {
            "pi_S" => Value::one(),
            "pi_A1" | "pi_A2" => Value::Exact(ratio(1, 2)),
            "pi_B1" | "pi_C2" => Value::Exact(ratio(1, 3)),
            "pi_B2" | "pi_C1" => Value::Exact(ratio(2, 3)),
            _ => unreachable!(),
        })
        .collect();
    Pcfg::new(cfg, probs).unwrap()
}

/// Ambiguous grammar (augmented with a fresh start): S0 -> S;
/// S -> a S | S b | c. The string `a c b` has two leftmost derivations.
pub fn g_amb() -> Cfg {
    fn n(s: &str) -> Symbol {
        Symbol::n(s)
    }
    fn t(s: &str) -> Symbol {
        Symbol::t(s)
    }
    Cfg::new(
        "S0",
        vec![
            rule("pi_0", "S0", &[n("S")]),
            rule("pi_1", "S", &[t("a"), n("S")]),
            rule("pi_2", "S", &[n("S"), t("b")]),
            rule("pi_3", "S", &[t("c")]),
        ],
    )
    .unwrap()
}

/// Nullable-prefix example: S -> A B; A -> eps; B -> b.
pub fn g_nullable() -> Cfg {
    fn n(s: &str) -> Symbol {
        Symbol::n(s)
    }
    fn t(s: &str) -> Symbol {
        Symbol::t(s)
    }
    Cfg::new(
        "S",
        vec![
            rule("pi_S", "S", &[n("A"), n("B")]),
            rule("pi_A", "A", &[]),
            rule("pi_B", "B", &[t("b")]),
        ],
    )
    .unwrap()
}
