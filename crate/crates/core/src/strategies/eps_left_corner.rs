//! Epsilon-tolerant left-corner strategy. Each rule occurrence is split as
//! `lhs -> mu X gamma` where `mu` (the first `m` symbols) derives the empty
//! string in this derivation, `X` is the corner (the first symbol deriving
//! non-empty material), and `gamma` follows. The corner is recognized
//! bottom-up, `gamma` left-to-right via goals, and finally the `mu` part is
//! retrieved top-down (emitting bare rules). Rules entered during the
//! bottom-up phase are emitted with their split position as a marker. A goal
//! that derives the empty string is retrieved top-down through a dedicated
//! "goal satisfied" symbol, keeping computations in bijection with
//! derivations.

use super::{Ctx, MalformedOutput};
use crate::automaton::{OutSym, Pdt, PdtBuilder};
use crate::grammar::{Cfg, Derivation, Symbol};

const START: &str = "[.S?]";
const DONE: &str = "[S?.]";

/// Item: rule split at `m` (prefix `rhs[..m]` derives epsilon). With a
/// corner, `dot1` counts recognized symbols of `corner gamma` (from 1);
/// without (fully nullable retrieval), `dot1` is 0. `dot2` counts retrieved
/// prefix symbols.
#[derive(Clone, Copy, PartialEq, Eq)]
struct Item {
    rix: usize,
    m: usize,
    has_corner: bool,
    dot1: usize,
    dot2: usize,
}

fn item_name(cfg: &Cfg, it: Item) -> String {
    format!(
        "[{}:{}:{}:{}:{}]",
        cfg.rules[it.rix].id,
        it.m,
        if it.has_corner { "c" } else { "n" },
        it.dot1,
        it.dot2
    )
}

fn corner_name(ctx_name: &str, corner: &Symbol) -> String {
    format!("{};{}", &ctx_name[..ctx_name.len() - 1], corner.name()) + "]"
}

fn done_name(ctx_name: &str) -> String {
    format!("{};ok]", &ctx_name[..ctx_name.len() - 1])
}

/// Right-hand sides that derive epsilon: every symbol a nullable nonterminal.
fn fully_nullable(ctx: &Ctx, rhs: &[Symbol]) -> bool {
    rhs.iter().all(|s| match s {
        Symbol::N(n) => ctx.nullable.contains(n),
        Symbol::T(_) => false,
    })
}

pub(crate) fn raw(ctx: &Ctx) -> Pdt {
    let cfg = ctx.cfg;
    let mut b = PdtBuilder::new();
    let x_init = b.sym(START);
    let x_final = b.sym(DONE);

    // enumerate all items
    let mut items: Vec<Item> = Vec::new();
    for (rix, r) in cfg.rules.iter().enumerate() {
        // fully nullable retrieval items
        if fully_nullable(ctx, &r.rhs) {
            let m = r.rhs.len();
            for dot2 in 0..=m {
                items.push(Item {
                    rix,
                    m,
                    has_corner: false,
                    dot1: 0,
                    dot2,
                });
            }
        }
        // cornered items: split positions with nullable prefix
        for m in 0..r.rhs.len() {
            if !fully_nullable(ctx, &r.rhs[..m]) {
                break;
            }
            let glen = r.rhs.len() - m - 1;
            for dot1 in 1..=1 + glen {
                if dot1 < 1 + glen {
                    items.push(Item {
                        rix,
                        m,
                        has_corner: true,
                        dot1,
                        dot2: 0,
                    });
                } else {
                    for dot2 in 0..=m {
                        items.push(Item {
                            rix,
                            m,
                            has_corner: true,
                            dot1,
                            dot2,
                        });
                    }
                }
            }
        }
    }
    for &it in &items {
        b.sym(&item_name(cfg, it));
    }

    // corner-phase contexts: (symbol, goal, advance target)
    let mut contexts: Vec<(usize, Symbol, usize)> = Vec::new();
    contexts.push((x_init, Symbol::n(&cfg.start), x_final));
    for &it in &items {
        if !it.has_corner {
            continue;
        }
        let r = &cfg.rules[it.rix];
        let glen = r.rhs.len() - it.m - 1;
        if it.dot1 < 1 + glen {
            let here = b.sym(&item_name(cfg, it));
            let next = b.sym(&item_name(
                cfg,
                Item {
                    dot1: it.dot1 + 1,
                    ..it
                },
            ));
            contexts.push((here, r.rhs[it.m + it.dot1].clone(), next));
        }
    }

    for (c, goal, next) in contexts {
        let cname = b.name_of(c).to_string();
        match &goal {
            Symbol::T(a) => b.swap(c, Some(a), vec![], next),
            Symbol::N(goal_nt) => {
                // terminal left corners (nullable-prefix tolerant relation)
                for a in cfg.terminals() {
                    if ctx.lc_eps.holds(&Symbol::t(a), &goal) {
                        let corner = b.sym(&corner_name(&cname, &Symbol::t(a)));
                        b.swap(c, Some(a), vec![], corner);
                    }
                }
                // goal derives epsilon: retrieve one of its fully nullable
                // rules top-down, behind a marker; the dedicated done-symbol
                // only confirms the goal
                if ctx.nullable.contains(goal_nt) {
                    let cdone = b.sym(&done_name(&cname));
                    for (rix2, r2) in cfg.rules.iter().enumerate() {
                        if &r2.lhs != goal_nt || !fully_nullable(ctx, &r2.rhs) {
                            continue;
                        }
                        let m2 = r2.rhs.len();
                        let fresh = Item {
                            rix: rix2,
                            m: m2,
                            has_corner: false,
                            dot1: 0,
                            dot2: 0,
                        };
                        let donei = Item { dot2: m2, ..fresh };
                        let pushed = b.sym(&item_name(cfg, fresh));
                        let popped = b.sym(&item_name(cfg, donei));
                        b.push_swap(
                            c,
                            None,
                            vec![OutSym::Rule(r2.id.clone()), OutSym::Mark(m2)],
                            pushed,
                        );
                        b.pop(c, popped, cdone);
                    }
                    b.swap(cdone, None, vec![OutSym::End], next);
                }
                // climbing: rule C -> mu' X gamma' with nullable mu',
                // corner X, C a left corner of the goal
                for x in ctx.symbols() {
                    if !ctx.lc_eps.holds(&x, &goal) {
                        continue;
                    }
                    let corner = b.sym(&corner_name(&cname, &x));
                    for (rix2, r2) in cfg.rules.iter().enumerate() {
                        if !ctx.lc_eps.holds(&Symbol::n(&r2.lhs), &goal) {
                            continue;
                        }
                        for m2 in 0..r2.rhs.len() {
                            if !fully_nullable(ctx, &r2.rhs[..m2]) {
                                break;
                            }
                            if r2.rhs[m2] != x {
                                continue;
                            }
                            let glen2 = r2.rhs.len() - m2 - 1;
                            let entry = Item {
                                rix: rix2,
                                m: m2,
                                has_corner: true,
                                dot1: 1,
                                dot2: 0,
                            };
                            let donei = Item {
                                dot1: 1 + glen2,
                                dot2: m2,
                                ..entry
                            };
                            let pushed = b.sym(&item_name(cfg, entry));
                            let popped = b.sym(&item_name(cfg, donei));
                            b.push_swap(
                                corner,
                                None,
                                vec![OutSym::Rule(r2.id.clone()), OutSym::Mark(m2)],
                                pushed,
                            );
                            let up = b.sym(&corner_name(&cname, &Symbol::n(&r2.lhs)));
                            b.pop(corner, popped, up);
                        }
                    }
                }
                // goal attainment by a non-empty corner
                let at_goal = b.sym(&corner_name(&cname, &goal));
                b.swap(at_goal, None, vec![OutSym::End], next);
            }
        }
    }

    // top-down retrieval phase: items whose gamma part is recognized
    for &it in &items {
        let r = &cfg.rules[it.rix];
        let glen = if it.has_corner {
            r.rhs.len() - it.m - 1
        } else {
            0
        };
        let in_td = if it.has_corner {
            it.dot1 == 1 + glen
        } else {
            true
        };
        if !in_td || it.dot2 >= it.m {
            continue;
        }
        let here = b.sym(&item_name(cfg, it));
        let nextsym = b.sym(&item_name(
            cfg,
            Item {
                dot2: it.dot2 + 1,
                ..it
            },
        ));
        let bn = match &r.rhs[it.dot2] {
            Symbol::N(n) => n.clone(),
            Symbol::T(_) => unreachable!("nullable prefixes contain nonterminals only"),
        };
        for (rix2, r2) in cfg.rules.iter().enumerate() {
            if r2.lhs != bn || !fully_nullable(ctx, &r2.rhs) {
                continue;
            }
            let m2 = r2.rhs.len();
            let fresh = Item {
                rix: rix2,
                m: m2,
                has_corner: false,
                dot1: 0,
                dot2: 0,
            };
            let donei = Item { dot2: m2, ..fresh };
            let pushed = b.sym(&item_name(cfg, fresh));
            let popped = b.sym(&item_name(cfg, donei));
            // bare rule emission: the marker-free top-down phase
            b.push_swap(here, None, vec![OutSym::Rule(r2.id.clone())], pushed);
            b.pop(here, popped, nextsym);
        }
    }

    b.finalize(x_init, x_final)
}

/// Recover the leftmost derivation from an epsilon-left-corner output.
pub(crate) fn map_output(cfg: &Cfg, v: &[OutSym]) -> Result<Derivation, MalformedOutput> {
    let (d, pos) = parse_goal(cfg, v, 0)?;
    if pos != v.len() {
        return Err(MalformedOutput(format!(
            "trailing output after position {pos}"
        )));
    }
    Ok(d)
}

fn parse_goal(
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

/// One marked layer: rule, marker m; for a fully consumed marker (m equal to
/// the rule length) there is no corner and no gamma; otherwise the gamma
/// subconstructions follow, then the m top-down retrievals.
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
    let m = match v.get(pos) {
        Some(OutSym::Mark(m)) => *m,
        other => {
            return Err(MalformedOutput(format!(
                "expected a split marker at position {pos}, found {:?}",
                other.map(|o| o.render())
            )))
        }
    };
    pos += 1;
    let rule = &cfg.rules[rix];
    if m > rule.rhs.len() {
        return Err(MalformedOutput(format!(
            "marker {m} exceeds the length of rule {}",
            rule.id
        )));
    }
    let mut gamma_subs: Vec<Derivation> = Vec::new();
    if m == rule.rhs.len() {
        // fully nullable retrieval: no corner
        if !corner_d.is_empty() {
            return Err(MalformedOutput(format!(
                "fully nullable use of rule {} cannot extend a corner",
                rule.id
            )));
        }
    } else {
        // validate the corner symbol against the climbing subderivation
        if let (Symbol::N(x), false) = (&rule.rhs[m], corner_d.is_empty()) {
            let root = &cfg.rules[corner_d[0]].lhs;
            if root != x {
                return Err(MalformedOutput(format!(
                    "corner root {root} does not match symbol {x} of rule {}",
                    rule.id
                )));
            }
        }
        for s in rule.rhs.iter().skip(m + 1) {
            if let Symbol::N(_) = s {
                let (sub, np) = parse_goal(cfg, v, pos)?;
                pos = np;
                gamma_subs.push(sub);
            }
        }
    }
    // top-down retrievals for the nullable prefix
    let mut prefix_subs: Vec<Derivation> = Vec::new();
    for _ in 0..m {
        let (sub, np) = parse_td(cfg, v, pos)?;
        pos = np;
        prefix_subs.push(sub);
    }
    let mut d = vec![rix];
    for s in prefix_subs {
        d.extend(s);
    }
    d.extend(corner_d);
    for s in gamma_subs {
        d.extend(s);
    }
    Ok((d, pos))
}

/// Bare top-down retrieval of an epsilon subderivation: a rule without a
/// marker, followed by retrievals for each of its (nullable) children.
fn parse_td(
    cfg: &Cfg,
    v: &[OutSym],
    mut pos: usize,
) -> Result<(Derivation, usize), MalformedOutput> {
    let rix = match v.get(pos) {
        Some(OutSym::Rule(id)) => cfg
            .rule_by_id(id)
            .ok_or_else(|| MalformedOutput(format!("unknown rule id {id}")))?,
        other => {
            return Err(MalformedOutput(format!(
                "expected a retrieval rule at position {pos}, found {:?}",
                other.map(|o| o.render())
            )))
        }
    };
    pos += 1;
    let mut d = vec![rix];
    for s in cfg.rules[rix].rhs.clone() {
        match s {
            Symbol::N(_) => {
                let (sub, np) = parse_td(cfg, v, pos)?;
                pos = np;
                d.extend(sub);
            }
            Symbol::T(_) => {
                return Err(MalformedOutput(
                    "epsilon retrieval hit a terminal symbol".into(),
                ))
            }
        }
    }
    Ok((d, pos))
}
