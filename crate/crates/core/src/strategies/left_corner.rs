//! Left-corner strategy. A context item `[A->alpha.B beta]` (or the virtual
//! start context with goal S) waits for its goal `B`. A terminal goal is
//! scanned directly. A nonterminal goal is recognized bottom-up: scan a
//! terminal left corner (or recognize an epsilon rule), then repeatedly climb
//! with a rule whose right-hand side starts with the current corner — the
//! rule's remainder is recognized top-down via a pushed item — until the
//! corner equals the goal, which is confirmed by emitting the end marker.

use super::{Ctx, MalformedOutput};
use crate::automaton::{OutSym, Pdt, PdtBuilder};
use crate::grammar::{Cfg, Derivation, Symbol};

const START: &str = "[.S?]";
const DONE: &str = "[S?.]";

fn corner_name(ctx_name: &str, corner: &Symbol) -> String {
    format!("{};{}", &ctx_name[..ctx_name.len() - 1], corner.name()) + "]"
}

pub(crate) fn raw(ctx: &Ctx) -> Pdt {
    let cfg = ctx.cfg;
    let mut b = PdtBuilder::new();
    let x_init = b.sym(START);
    let x_final = b.sym(DONE);

    // contexts: (symbol, goal, advance target); the virtual start context's
    // goal is the start nonterminal and it advances to the final symbol
    let mut contexts: Vec<(usize, Symbol, usize)> = Vec::new();
    contexts.push((x_init, Symbol::n(&cfg.start), x_final));
    for (rix, r) in cfg.rules.iter().enumerate() {
        for dot in 1..r.rhs.len() {
            let here = b.sym(&super::top_down::item_name(cfg, rix, dot));
            let next = b.sym(&super::top_down::item_name(cfg, rix, dot + 1));
            contexts.push((here, r.rhs[dot].clone(), next));
        }
    }

    for (c, goal, next) in contexts {
        let cname = b_name(&b, c);
        match &goal {
            // terminal goals are scanned directly
            Symbol::T(a) => b.swap(c, Some(a), vec![], next),
            Symbol::N(goal_nt) => {
                let goal_sym = goal.clone();
                // corner introduction by scanning a terminal left corner
                for a in cfg.terminals() {
                    if ctx.lc.holds(&Symbol::t(a), &goal_sym) {
                        let corner = b.sym(&corner_name(&cname, &Symbol::t(a)));
                        b.swap(c, Some(a), vec![], corner);
                    }
                }
                // corner introduction by an epsilon rule
                for r2 in cfg.rules.iter() {
                    if r2.rhs.is_empty() && ctx.lc.holds(&Symbol::n(&r2.lhs), &goal_sym) {
                        let corner = b.sym(&corner_name(&cname, &Symbol::n(&r2.lhs)));
                        b.swap(c, None, vec![OutSym::Rule(r2.id.clone())], corner);
                    }
                }
                // climbing: a rule C -> X gamma with C a left corner of the
                // goal extends corner X to corner C, recognizing gamma via a
                // pushed item
                for x in ctx.symbols() {
                    if !ctx.lc.holds(&x, &goal_sym) {
                        continue;
                    }
                    let corner = b.sym(&corner_name(&cname, &x));
                    for (rix2, r2) in cfg.rules.iter().enumerate() {
                        if r2.rhs.first() != Some(&x)
                            || !ctx.lc.holds(&Symbol::n(&r2.lhs), &goal_sym)
                        {
                            continue;
                        }
                        let pushed = b.sym(&super::top_down::item_name(cfg, rix2, 1));
                        b.push_swap(corner, None, vec![OutSym::Rule(r2.id.clone())], pushed);
                        let done = b.sym(&super::top_down::item_name(cfg, rix2, r2.rhs.len()));
                        let up = b.sym(&corner_name(&cname, &Symbol::n(&r2.lhs)));
                        b.pop(corner, done, up);
                    }
                }
                // goal attainment: the corner equals the goal
                let at_goal = b.sym(&corner_name(&cname, &goal_sym));
                b.swap(at_goal, None, vec![OutSym::End], next);
                let _ = goal_nt;
            }
        }
    }
    b.finalize(x_init, x_final)
}

fn b_name(b: &PdtBuilder, s: usize) -> String {
    b.name_of(s).to_string()
}

/// Recover the leftmost derivation from a left-corner output string.
/// One layer parses a rule, the corner's derivation (passed in), and the
/// subconstructions of the remaining right-hand side; the layer either ends
/// at the end marker or climbs into the next layer as its corner.
pub(crate) fn map_output(cfg: &Cfg, v: &[OutSym]) -> Result<Derivation, MalformedOutput> {
    let (d, pos) = parse_goal(cfg, v, 0)?;
    if pos != v.len() {
        return Err(MalformedOutput(format!(
            "trailing output after position {pos}"
        )));
    }
    Ok(d)
}

/// Parse a full goal subconstruction: climb layers until the end marker.
pub(crate) fn parse_goal(
    cfg: &Cfg,
    v: &[OutSym],
    mut pos: usize,
) -> Result<(Derivation, usize), MalformedOutput> {
    let mut corner_d: Derivation = Vec::new();
    loop {
        let (d, np) = parse_layer(cfg, v, pos, corner_d)?;
        pos = np;
        match v.get(pos) {
            Some(OutSym::End) => return Ok((d, pos + 1)),
            Some(_) => corner_d = d,
            None => {
                return Err(MalformedOutput(
                    "output ended before the goal was confirmed".into(),
                ))
            }
        }
    }
}

/// Parse one rule layer: the rule, then the subconstructions of its
/// right-hand side past the corner.
fn parse_layer(
    cfg: &Cfg,
    v: &[OutSym],
    mut pos: usize,
    corner_d: Derivation,
) -> Result<(Derivation, usize), MalformedOutput> {
    let rix = match v.get(pos) {
        Some(OutSym::Rule(id)) => cfg
            .rule_by_id(id)
            .ok_or_else(|| MalformedOutput(format!("unknown rule id {id}")))?,
        other => {
            return Err(MalformedOutput(format!(
                "expected a rule at position {pos}, found {:?}",
                other.map(|o| o.render())
            )))
        }
    };
    pos += 1;
    let rule = &cfg.rules[rix];
    if rule.rhs.is_empty() && !corner_d.is_empty() {
        return Err(MalformedOutput(format!(
            "epsilon rule {} cannot extend a corner",
            rule.id
        )));
    }
    if let (Some(Symbol::N(first)), false) = (rule.rhs.first(), corner_d.is_empty()) {
        let root = &cfg.rules[corner_d[0]].lhs;
        if first != root {
            return Err(MalformedOutput(format!(
                "corner root {root} does not match first symbol {first} of rule {}",
                rule.id
            )));
        }
    }
    let mut d = vec![rix];
    d.extend(corner_d);
    for s in rule.rhs.iter().skip(1) {
        if let Symbol::N(_) = s {
            let (sub, np) = parse_goal(cfg, v, pos)?;
            pos = np;
            d.extend(sub);
        }
    }
    Ok((d, pos))
}
