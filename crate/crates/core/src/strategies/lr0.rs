//! LR(0) strategy. Stack symbols are the states of the canonical LR(0)
//! collection. Shifts push the successor state; a reduction by a rule with m
//! right-hand-side symbols walks down the stack through a chain of bracket
//! symbols (one per remaining child), emits the rule at the last step, and
//! re-enters via the goto state. The output lists rules in the order of
//! completion, i.e. a rightmost derivation in reverse. Acceptance replaces
//! the whole stack by a fresh final symbol when the start rule reduces.

use super::Ctx;
use crate::automaton::{OutSym, Pdt, PdtBuilder};
use crate::grammar::{Cfg, Symbol};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

type Item = (usize, usize);
type State = BTreeSet<Item>;

fn closure(cfg: &Cfg, mut set: State) -> State {
    let mut wl: Vec<Item> = set.iter().copied().collect();
    while let Some((rix, dot)) = wl.pop() {
        if let Some(Symbol::N(bn)) = cfg.rules[rix].rhs.get(dot) {
            for (rix2, _) in cfg.rules_for(bn) {
                if set.insert((rix2, 0)) {
                    wl.push((rix2, 0));
                }
            }
        }
    }
    set
}

fn goto(cfg: &Cfg, state: &State, x: &Symbol) -> State {
    let kernel: State = state
        .iter()
        .filter(|(rix, dot)| cfg.rules[*rix].rhs.get(*dot) == Some(x))
        .map(|&(rix, dot)| (rix, dot + 1))
        .collect();
    closure(cfg, kernel)
}

fn item_str(cfg: &Cfg, (rix, dot): Item) -> String {
    let r = &cfg.rules[rix];
    let mut parts: Vec<String> = r.rhs.iter().map(|s| s.name().to_string()).collect();
    parts.insert(dot, ".".into());
    format!("{}->{}", r.lhs, parts.join(","))
}

fn state_name(cfg: &Cfg, state: &State) -> String {
    let items: Vec<String> = state.iter().map(|&it| item_str(cfg, it)).collect();
    format!("{{{}}}", items.join("/"))
}

fn bracket_name(cfg: &Cfg, rix: usize, d: usize) -> String {
    format!("<{}:{}>", cfg.rules[rix].id, d)
}

pub(crate) fn raw(ctx: &Ctx) -> Pdt {
    let cfg = ctx.cfg;
    // canonical collection
    let q0 = closure(cfg, BTreeSet::from([(cfg.start_rule(), 0)]));
    let mut states: Vec<State> = vec![q0.clone()];
    let mut seen: BTreeMap<State, usize> = BTreeMap::from([(q0.clone(), 0)]);
    let mut gotos: BTreeMap<(usize, Symbol), usize> = BTreeMap::new();
    let mut wl: VecDeque<usize> = VecDeque::from([0]);
    while let Some(qi) = wl.pop_front() {
        for x in ctx.symbols() {
            let succ = goto(cfg, &states[qi].clone(), &x);
            if succ.is_empty() {
                continue;
            }
            let ix = match seen.get(&succ) {
                Some(&ix) => ix,
                None => {
                    let ix = states.len();
                    states.push(succ.clone());
                    seen.insert(succ, ix);
                    wl.push_back(ix);
                    ix
                }
            };
            gotos.insert((qi, x.clone()), ix);
        }
    }

    let mut b = PdtBuilder::new();
    let state_syms: Vec<usize> = states
        .iter()
        .map(|q| b.sym(&state_name(cfg, q)))
        .collect();
    let x_init = state_syms[0];
    let x_final = b.sym("acc");

    for (qi, q) in states.iter().enumerate() {
        let qsym = state_syms[qi];
        // shifts
        for a in cfg.terminals() {
            if let Some(&succ) = gotos.get(&(qi, Symbol::t(a))) {
                b.push_swap(qsym, Some(a), vec![], state_syms[succ]);
            }
        }
        // reductions
        for &(rix, dot) in q.iter() {
            let r = &cfg.rules[rix];
            if dot != r.rhs.len() {
                continue;
            }
            let m = r.rhs.len();
            if m == 0 {
                let succ = gotos[&(qi, Symbol::n(&r.lhs))];
                b.swap_push(
                    qsym,
                    None,
                    vec![OutSym::Rule(r.id.clone())],
                    qsym,
                    state_syms[succ],
                );
            } else {
                let br = b.sym(&bracket_name(cfg, rix, m));
                b.swap(qsym, None, vec![], br);
            }
        }
    }

    // bracket chains, shared across the states that trigger the reduction
    for (rix, r) in cfg.rules.iter().enumerate() {
        let m = r.rhs.len();
        if m == 0 {
            continue;
        }
        for d in (1..=m).rev() {
            let br = b.sym(&bracket_name(cfg, rix, d));
            for (qi, q) in states.iter().enumerate() {
                if !q.contains(&(rix, d - 1)) {
                    continue;
                }
                let qsym = state_syms[qi];
                if d > 1 {
                    let below = b.sym(&bracket_name(cfg, rix, d - 1));
                    b.pop(qsym, br, below);
                } else if r.lhs == cfg.start {
                    b.pop_swap(qsym, br, None, vec![OutSym::Rule(r.id.clone())], x_final);
                } else {
                    let red = b.sym(&format!("<{};{}>", b.name_of(qsym), r.lhs));
                    b.pop_swap(qsym, br, None, vec![OutSym::Rule(r.id.clone())], red);
                    let succ = gotos[&(qi, Symbol::n(&r.lhs))];
                    b.swap_push(red, None, vec![], qsym, state_syms[succ]);
                }
            }
        }
    }

    b.finalize(x_init, x_final)
}
