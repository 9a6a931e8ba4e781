//! Extended left-corner strategy with common-prefix merging. Stack symbols
//! are items `[{Γ}->α]`: the set Γ of nonterminals that have a rule starting
//! with the recognized prefix α (narrowed as α grows), in the context of the
//! goals of the item below. Rule emission is deferred to the completing pop,
//! so the output is a rightmost derivation in reverse. A virtual nonterminal
//! `#I` with the single pseudo-rule `#I -> S` provides the outermost context,
//! so the start rule is emitted by the ordinary completion schema.

use super::Ctx;
use crate::automaton::{OutSym, Pdt, PdtBuilder};
use crate::grammar::Symbol;
use std::collections::{BTreeSet, VecDeque};

const VIRT: &str = "#I";

type ItemKey = (BTreeSet<String>, Vec<Symbol>);

fn item_name(key: &ItemKey) -> String {
    let gamma: Vec<&str> = key.0.iter().map(|s| s.as_str()).collect();
    let alpha: Vec<&str> = key.1.iter().map(|s| s.name()).collect();
    format!("[{{{}}}->{}]", gamma.join(","), alpha.join(","))
}

fn corner_name(item: &str, x: &Symbol) -> String {
    format!("{};{}]", &item[..item.len() - 1], x.name())
}

/// Continuation symbols of an item: the symbols that can follow the
/// recognized prefix in a rule of some member of Γ. The virtual nonterminal
/// contributes its pseudo-rule here (and in prefix narrowing) only.
fn goals(ctx: &Ctx, key: &ItemKey) -> BTreeSet<Symbol> {
    let mut out = BTreeSet::new();
    for a in &key.0 {
        if a == VIRT {
            let rhs = [Symbol::n(&ctx.cfg.start)];
            if rhs.len() > key.1.len() && rhs[..key.1.len()] == key.1[..] {
                out.insert(rhs[key.1.len()].clone());
            }
            continue;
        }
        for (_, r) in ctx.cfg.rules_for(a) {
            if r.rhs.len() > key.1.len() && r.rhs[..key.1.len()] == key.1[..] {
                out.insert(r.rhs[key.1.len()].clone());
            }
        }
    }
    out
}

/// New item entered when the corner X is attached as the first symbol of a
/// fresh rule: all nonterminals with a rule starting with X that are left
/// corners of some goal.
fn enter_gamma(ctx: &Ctx, goal_set: &BTreeSet<Symbol>, x: &Symbol) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for r in &ctx.cfg.rules {
        if r.rhs.first() == Some(x)
            && goal_set
                .iter()
                .any(|g| ctx.lc.holds(&Symbol::n(&r.lhs), g))
        {
            out.insert(r.lhs.clone());
        }
    }
    out
}

/// Narrowed Γ after advancing the prefix of the current item by X.
fn advance_gamma(ctx: &Ctx, key: &ItemKey, x: &Symbol) -> BTreeSet<String> {
    let mut want = key.1.clone();
    want.push(x.clone());
    let mut out = BTreeSet::new();
    for a in &key.0 {
        let ok = if a == VIRT {
            let rhs = [Symbol::n(&ctx.cfg.start)];
            rhs.len() >= want.len() && rhs[..want.len()] == want[..]
        } else {
            ctx.cfg
                .rules_for(a)
                .any(|(_, r)| r.rhs.len() >= want.len() && r.rhs[..want.len()] == want[..])
        };
        if ok {
            out.insert(a.clone());
        }
    }
    out
}

/// Corner symbols reachable at an item: left corners of some goal.
fn corners(ctx: &Ctx, goal_set: &BTreeSet<Symbol>) -> BTreeSet<Symbol> {
    let mut out = BTreeSet::new();
    for x in ctx.symbols() {
        if goal_set.iter().any(|g| ctx.lc.holds(&x, g)) {
            out.insert(x);
        }
    }
    out
}

pub(crate) fn raw(ctx: &Ctx) -> Pdt {
    let cfg = ctx.cfg;
    let init_key: ItemKey = (BTreeSet::from([VIRT.to_string()]), Vec::new());
    let final_key: ItemKey = (
        BTreeSet::from([VIRT.to_string()]),
        vec![Symbol::n(&cfg.start)],
    );

    // close the item set under corner attachment and prefix advancement
    let mut items: BTreeSet<ItemKey> = BTreeSet::new();
    let mut wl: VecDeque<ItemKey> = VecDeque::new();
    items.insert(init_key.clone());
    wl.push_back(init_key.clone());
    while let Some(key) = wl.pop_front() {
        let gs = goals(ctx, &key);
        for x in corners(ctx, &gs) {
            let g2 = enter_gamma(ctx, &gs, &x);
            if !g2.is_empty() {
                let nk: ItemKey = (g2, vec![x.clone()]);
                if items.insert(nk.clone()) {
                    wl.push_back(nk);
                }
            }
            let g6 = advance_gamma(ctx, &key, &x);
            if !g6.is_empty() {
                let mut alpha = key.1.clone();
                alpha.push(x.clone());
                let nk: ItemKey = (g6, alpha);
                if items.insert(nk.clone()) {
                    wl.push_back(nk);
                }
            }
        }
    }

    let mut b = PdtBuilder::new();
    let x_init = b.sym(&item_name(&init_key));
    for key in &items {
        b.sym(&item_name(key));
    }
    let x_final = b.sym(&item_name(&final_key));

    for key in &items {
        let itsym = b.sym(&item_name(key));
        let iname = item_name(key);
        let gs = goals(ctx, key);
        // corner introduction: terminal scans and epsilon-rule corners
        for a in cfg.terminals() {
            let ta = Symbol::t(a);
            if gs.iter().any(|g| ctx.lc.holds(&ta, g)) {
                let csym = b.sym(&corner_name(&iname, &ta));
                b.swap(itsym, Some(a), vec![], csym);
            }
        }
        for r in &cfg.rules {
            if !r.rhs.is_empty() {
                continue;
            }
            let c = Symbol::n(&r.lhs);
            if gs.iter().any(|g| ctx.lc.holds(&c, g)) {
                let csym = b.sym(&corner_name(&iname, &c));
                b.swap(itsym, None, vec![OutSym::Rule(r.id.clone())], csym);
            }
        }
        // corner processing: attach (push), complete (pop), advance (swap)
        for x in corners(ctx, &gs) {
            let csym = b.sym(&corner_name(&iname, &x));
            let g2 = enter_gamma(ctx, &gs, &x);
            if !g2.is_empty() {
                let entered = b.sym(&item_name(&(g2, vec![x.clone()])));
                b.push(csym, entered);
            }
            for other in &items {
                if other.1.first() != Some(&x) {
                    continue;
                }
                for r in &cfg.rules {
                    if r.rhs != other.1 || !other.0.contains(&r.lhs) {
                        continue;
                    }
                    let c = Symbol::n(&r.lhs);
                    if !gs.iter().any(|g| ctx.lc.holds(&c, g)) {
                        continue;
                    }
                    let up = b.sym(&corner_name(&iname, &c));
                    let osym = b.sym(&item_name(other));
                    b.pop_swap(csym, osym, None, vec![OutSym::Rule(r.id.clone())], up);
                }
            }
            let g6 = advance_gamma(ctx, key, &x);
            if !g6.is_empty() {
                let mut alpha = key.1.clone();
                alpha.push(x.clone());
                let adv = b.sym(&item_name(&(g6, alpha)));
                b.swap(csym, None, vec![], adv);
            }
        }
    }

    b.finalize(x_init, x_final)
}
