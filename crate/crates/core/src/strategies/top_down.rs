//! Top-down strategy: stack symbols are dotted rules. Predicting a rule for
//! the nonterminal after the dot pushes its initial item and emits the rule;
//! a terminal after the dot is scanned; a completed item is popped, advancing
//! the dot of the item below. The start rule is emitted by the first
//! transition (the one acting on the initial item), which keeps the output
//! exactly the leftmost derivation.

use super::{Ctx, MalformedOutput};
use crate::automaton::{OutSym, Pdt, PdtBuilder};
use crate::grammar::{Cfg, Derivation, Symbol};

pub(crate) fn item_name(cfg: &Cfg, rix: usize, dot: usize) -> String {
    let r = &cfg.rules[rix];
    let names: Vec<&str> = r.rhs.iter().map(|s| s.name()).collect();
    format!(
        "[{}->{}.{}]",
        r.lhs,
        names[..dot].join(","),
        names[dot..].join(",")
    )
}

pub(crate) fn raw(ctx: &Ctx) -> Pdt {
    let cfg = ctx.cfg;
    let mut b = PdtBuilder::new();
    let item = |b: &mut PdtBuilder, rix: usize, dot: usize| b.sym(&item_name(cfg, rix, dot));
    let x_init = item(&mut b, cfg.start_rule(), 0);
    let start_id = cfg.rules[cfg.start_rule()].id.clone();
    for (rix, r) in cfg.rules.iter().enumerate() {
        for dot in 0..r.rhs.len() {
            let here = item(&mut b, rix, dot);
            // the initial item additionally emits the start rule
            let prefix: Vec<OutSym> = if here == x_init {
                vec![OutSym::Rule(start_id.clone())]
            } else {
                Vec::new()
            };
            match &r.rhs[dot] {
                Symbol::T(a) => {
                    let next = item(&mut b, rix, dot + 1);
                    b.swap(here, Some(a), prefix, next);
                }
                Symbol::N(nt) => {
                    for (rix2, r2) in cfg.rules.iter().enumerate() {
                        if &r2.lhs != nt {
                            continue;
                        }
                        let mut out = prefix.clone();
                        out.push(OutSym::Rule(r2.id.clone()));
                        let predicted = item(&mut b, rix2, 0);
                        b.push_swap(here, None, out, predicted);
                        let done = item(&mut b, rix2, r2.rhs.len());
                        let next = item(&mut b, rix, dot + 1);
                        b.pop(here, done, next);
                    }
                }
            }
        }
    }
    let x_final = item(&mut b, cfg.start_rule(), cfg.rules[cfg.start_rule()].rhs.len());
    b.finalize(x_init, x_final)
}

/// The output of the top-down machine is the leftmost derivation itself.
pub(crate) fn map_output(cfg: &Cfg, v: &[OutSym]) -> Result<Derivation, MalformedOutput> {
    let mut d = Vec::with_capacity(v.len());
    for s in v {
        match s {
            OutSym::Rule(id) => d.push(
                cfg.rule_by_id(id)
                    .ok_or_else(|| MalformedOutput(format!("unknown rule id {id}")))?,
            ),
            other => {
                return Err(MalformedOutput(format!(
                    "top-down output may contain rules only, found {}",
                    other.render()
                )))
            }
        }
    }
    Ok(d)
}
