//! PLR strategy: like left-corner, but stack items record only the
//! recognized prefix of a rule (`[A->alpha.*]`), so rules sharing a prefix
//! share items, and rule identities are emitted only on completion rather
//! than on prediction. The output is therefore a rightmost derivation
//! in reverse. Epsilon-rule corners are emitted immediately (they complete at
//! once), mirroring the left-corner schema on the prefix items.

use super::Ctx;
use crate::automaton::{OutSym, Pdt, PdtBuilder};
use crate::grammar::Symbol;
use std::collections::BTreeSet;

const START: &str = "[.S?]";
const DONE: &str = "[S?.]";

fn prefix_name(lhs: &str, alpha: &[Symbol]) -> String {
    let names: Vec<&str> = alpha.iter().map(|s| s.name()).collect();
    format!("[{}->{}.*]", lhs, names.join(","))
}

fn corner_name(ctx_name: &str, corner: &Symbol) -> String {
    format!("{};{}", &ctx_name[..ctx_name.len() - 1], corner.name()) + "]"
}

pub(crate) fn raw(ctx: &Ctx) -> Pdt {
    let cfg = ctx.cfg;
    let mut b = PdtBuilder::new();
    let x_init = b.sym(START);
    let x_final = b.sym(DONE);

    // contexts: (lhs, alpha) pairs with alpha a non-empty proper or full
    // prefix of some rule, plus the virtual start context
    let mut prefixes: BTreeSet<(String, Vec<Symbol>)> = BTreeSet::new();
    for r in &cfg.rules {
        for k in 1..=r.rhs.len() {
            prefixes.insert((r.lhs.clone(), r.rhs[..k].to_vec()));
        }
    }

    // the virtual context plus each prefix context
    enum Kind {
        Virtual,
        Prefix(String, Vec<Symbol>),
    }
    let mut contexts: Vec<(usize, Kind)> = vec![(x_init, Kind::Virtual)];
    for (lhs, alpha) in &prefixes {
        let c = b.sym(&prefix_name(lhs, alpha));
        contexts.push((c, Kind::Prefix(lhs.clone(), alpha.clone())));
    }

    for (c, kind) in contexts {
        let cname = b.name_of(c).to_string();
        // the goals of this context: continuations allowed by some rule
        let (goals, advance_base): (BTreeSet<Symbol>, Option<(String, Vec<Symbol>)>) = match &kind
        {
            Kind::Virtual => ([Symbol::n(&cfg.start)].into_iter().collect(), None),
            Kind::Prefix(lhs, alpha) => {
                let mut g = BTreeSet::new();
                for r in cfg.rules_for(lhs) {
                    let (_, r) = r;
                    if r.rhs.len() > alpha.len() && r.rhs[..alpha.len()] == alpha[..] {
                        g.insert(r.rhs[alpha.len()].clone());
                    }
                }
                (g, Some((lhs.clone(), alpha.clone())))
            }
        };
        let advance = |b: &mut PdtBuilder, y: &Symbol| -> usize {
            match (&kind, y) {
                (Kind::Virtual, _) => x_final,
                (Kind::Prefix(lhs, alpha), y) => {
                    let mut ext = alpha.clone();
                    ext.push(y.clone());
                    b.sym(&prefix_name(lhs, &ext))
                }
            }
        };
        let _ = &advance_base;
        for goal in &goals {
            match goal {
                Symbol::T(a) => {
                    let next = advance(&mut b, goal);
                    b.swap(c, Some(a), vec![], next);
                }
                Symbol::N(_) => {
                    // terminal left corners
                    for a in cfg.terminals() {
                        if ctx.lc.holds(&Symbol::t(a), goal) {
                            let corner = b.sym(&corner_name(&cname, &Symbol::t(a)));
                            b.swap(c, Some(a), vec![], corner);
                        }
                    }
                    // epsilon-rule corners emit their rule immediately
                    for r2 in &cfg.rules {
                        if r2.rhs.is_empty() && ctx.lc.holds(&Symbol::n(&r2.lhs), goal) {
                            let corner = b.sym(&corner_name(&cname, &Symbol::n(&r2.lhs)));
                            b.swap(c, None, vec![OutSym::Rule(r2.id.clone())], corner);
                        }
                    }
                    for x in ctx.symbols() {
                        if !ctx.lc.holds(&x, goal) {
                            continue;
                        }
                        let corner = b.sym(&corner_name(&cname, &x));
                        // climbing pushes the shared prefix item, emitting
                        // nothing (the rule identity is not yet determined)
                        let climbers: BTreeSet<String> = cfg
                            .rules
                            .iter()
                            .filter(|r2| {
                                r2.rhs.first() == Some(&x)
                                    && ctx.lc.holds(&Symbol::n(&r2.lhs), goal)
                            })
                            .map(|r2| r2.lhs.clone())
                            .collect();
                        for lhs2 in &climbers {
                            let pushed = b.sym(&prefix_name(lhs2, std::slice::from_ref(&x)));
                            b.push(corner, pushed);
                        }
                        // completion: a fully recognized rule body announces
                        // its rule and collapses to a per-lhs symbol, so the
                        // silent pop's target depends only on the lhs
                        for r2 in &cfg.rules {
                            if r2.rhs.first() != Some(&x)
                                || !ctx.lc.holds(&Symbol::n(&r2.lhs), goal)
                            {
                                continue;
                            }
                            let done = b.sym(&prefix_name(&r2.lhs, &r2.rhs));
                            let fin = b.sym(&format!("[{}.]", r2.lhs));
                            b.swap(done, None, vec![OutSym::Rule(r2.id.clone())], fin);
                            let up = b.sym(&corner_name(&cname, &Symbol::n(&r2.lhs)));
                            b.pop(corner, fin, up);
                        }
                    }
                    // goal attainment
                    let at_goal = b.sym(&corner_name(&cname, goal));
                    let next = advance(&mut b, goal);
                    b.swap(at_goal, None, vec![], next);
                }
            }
        }
    }
    b.finalize(x_init, x_final)
}
