//! Text file formats: grammars (optionally with rule probabilities),
//! automata (optionally with transition probabilities), and derivation
//! corpora.
//!
//! Grammar files consist of `start <NT>` and
//! `rule <id>: <NT> -> <sym>* [: <prob>]` lines. Nonterminals are
//! uppercase-initial identifiers; terminals are lowercase-initial
//! identifiers or single-quoted tokens; an empty right-hand side is written
//! `eps`. Automaton files consist of `init`, `final`, `inalpha`, `outalpha`
//! headers and `push`/`pop`/`swap` transition lines. Lines whose first
//! non-blank character is `#` are comments. Probabilities are `p/q`
//! rationals or decimals and must be present on all rules/transitions or on
//! none.

use anyhow::{anyhow, bail, Context, Result};
use pdtlab::automaton::{OutSym, Pdt, Ppdt, StackSym, Transition};
use pdtlab::grammar::{Cfg, Corpus, Pcfg, Rule, Symbol};
use pdtlab::numeric::{parse_value, Value};
use std::collections::BTreeSet;

fn meaningful_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_symbol(tok: &str) -> Result<Symbol> {
    if let Some(inner) = tok.strip_prefix('\'') {
        let inner = inner
            .strip_suffix('\'')
            .ok_or_else(|| anyhow!("unterminated quoted terminal {tok}"))?;
        if inner.is_empty() {
            bail!("empty quoted terminal");
        }
        return Ok(Symbol::t(inner));
    }
    let first = tok
        .chars()
        .next()
        .ok_or_else(|| anyhow!("empty symbol token"))?;
    if first.is_ascii_uppercase() {
        Ok(Symbol::n(tok))
    } else {
        Ok(Symbol::t(tok))
    }
}

fn write_symbol(sym: &Symbol) -> String {
    match sym {
        Symbol::N(n) => n.clone(),
        Symbol::T(t) => {
            let plain = t
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
                && !t.contains(char::is_whitespace);
            if plain {
                t.clone()
            } else {
                format!("'{t}'")
            }
        }
    }
}

/// Render a probability for a file: exact values as `p/q`, approximations
/// as `~<decimal>` so that the exactness kind survives a round trip.
fn value_literal(v: &Value) -> String {
    match v {
        Value::Exact(_) => v.render(),
        Value::Approx(f) => {
            let s = format!("{f:.20}");
            format!("~{}", s.trim_end_matches('0').trim_end_matches('.'))
        }
    }
}

fn parse_prob(text: &str) -> Option<Value> {
    if let Some(dec) = text.strip_prefix('~') {
        return dec.parse::<f64>().ok().map(Value::Approx);
    }
    parse_value(text)
}

/// Read a grammar file; probabilities are returned when every rule has one.
pub fn read_grammar(text: &str) -> Result<(Cfg, Option<Vec<Value>>)> {
    let mut start: Option<String> = None;
    let mut rules: Vec<Rule> = Vec::new();
    let mut probs: Vec<Option<Value>> = Vec::new();
    for (lineno, line) in meaningful_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let err = |msg: &str| anyhow!("line {lineno}: {msg}: {line}");
        match toks[0] {
            "start" => {
                if toks.len() != 2 {
                    return Err(err("expected `start <NT>`"));
                }
                start = Some(toks[1].to_string());
            }
            "rule" => {
                // rule <id>: <NT> -> <sym>* [: <prob>]
                if toks.len() < 4 {
                    return Err(err("truncated rule line"));
                }
                let id = toks[1]
                    .strip_suffix(':')
                    .ok_or_else(|| err("rule id must end with `:`"))?;
                let lhs = toks[2];
                if toks.get(3) != Some(&"->") {
                    return Err(err("expected `->` after the left-hand side"));
                }
                let rest = &toks[4..];
                let (body, prob) = match rest.iter().position(|t| *t == ":") {
                    Some(p) => {
                        if p + 2 != rest.len() {
                            return Err(err("expected a single probability after `:`"));
                        }
                        let v = parse_prob(rest[p + 1])
                            .ok_or_else(|| err("unreadable probability"))?;
                        (&rest[..p], Some(v))
                    }
                    None => (rest, None),
                };
                let rhs: Vec<Symbol> = if body == ["eps"] {
                    Vec::new()
                } else {
                    body.iter()
                        .map(|t| parse_symbol(t))
                        .collect::<Result<_>>()
                        .with_context(|| format!("line {lineno}"))?
                };
                rules.push(Rule {
                    id: id.to_string(),
                    lhs: lhs.to_string(),
                    rhs,
                });
                probs.push(prob);
            }
            other => return Err(err(&format!("unknown directive `{other}`"))),
        }
    }
    let start = start.ok_or_else(|| anyhow!("missing `start` line"))?;
    let cfg = Cfg::new(&start, rules).context("grammar is not well-formed")?;
    let with_prob = probs.iter().filter(|p| p.is_some()).count();
    let probs = if with_prob == 0 {
        None
    } else if with_prob == cfg.rules.len() {
        Some(probs.into_iter().map(|p| p.unwrap()).collect())
    } else {
        bail!("probabilities must be present on all rules or on none");
    };
    Ok((cfg, probs))
}

pub fn read_pcfg(text: &str) -> Result<Pcfg> {
    let (cfg, probs) = read_grammar(text)?;
    let probs = probs.ok_or_else(|| anyhow!("grammar file carries no probabilities"))?;
    Pcfg::new(cfg, probs).context("probabilities are not proper")
}

pub fn write_grammar(cfg: &Cfg, probs: Option<&[Value]>) -> String {
    let mut out = String::new();
    out.push_str(&format!("start {}\n", cfg.start));
    for (rix, r) in cfg.rules.iter().enumerate() {
        let body = if r.rhs.is_empty() {
            "eps".to_string()
        } else {
            r.rhs
                .iter()
                .map(write_symbol)
                .collect::<Vec<_>>()
                .join(" ")
        };
        out.push_str(&format!("rule {}: {} -> {}", r.id, r.lhs, body));
        if let Some(ps) = probs {
            out.push_str(&format!(" : {}", value_literal(&ps[rix])));
        }
        out.push('\n');
    }
    out
}

/// Read an automaton file; probabilities are returned when every transition
/// has one. Stack symbols are numbered in order of first occurrence.
pub fn read_automaton(text: &str) -> Result<(Pdt, Option<Vec<Value>>)> {
    let mut symbols: Vec<String> = Vec::new();
    let mut index: std::collections::HashMap<String, StackSym> = Default::default();
    let mut sym = |name: &str, symbols: &mut Vec<String>| -> StackSym {
        if let Some(&s) = index.get(name) {
            return s;
        }
        let s = symbols.len();
        symbols.push(name.to_string());
        index.insert(name.to_string(), s);
        s
    };
    let mut x_init: Option<StackSym> = None;
    let mut x_final: Option<StackSym> = None;
    let mut inalpha: BTreeSet<String> = BTreeSet::new();
    let mut transitions: Vec<Transition> = Vec::new();
    let mut probs: Vec<Option<Value>> = Vec::new();

    for (lineno, line) in meaningful_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let err = |msg: &str| anyhow!("line {lineno}: {msg}: {line}");
        // Split off a trailing standalone `: <prob>` pair.
        let split_prob = |rest: &[&str]| -> Result<(Vec<String>, Option<Value>)> {
            if rest.len() >= 2 && rest[rest.len() - 2] == ":" {
                let v = parse_prob(rest[rest.len() - 1])
                    .ok_or_else(|| err("unreadable probability"))?;
                Ok((
                    rest[..rest.len() - 2].iter().map(|s| s.to_string()).collect(),
                    Some(v),
                ))
            } else {
                Ok((rest.iter().map(|s| s.to_string()).collect(), None))
            }
        };
        match toks[0] {
            "init" if toks.len() == 2 => x_init = Some(sym(toks[1], &mut symbols)),
            "final" if toks.len() == 2 => x_final = Some(sym(toks[1], &mut symbols)),
            "inalpha" => inalpha.extend(toks[1..].iter().map(|s| s.to_string())),
            // The output alphabet is derivable from the transitions; the
            // header is written for readability and skipped on input.
            "outalpha" => {}
            "push" => {
                // push X -> X Y [: p]
                let (body, p) = split_prob(&toks[1..])?;
                if body.len() != 4 || body[1] != "->" || body[0] != body[2] {
                    return Err(err("expected `push X -> X Y`"));
                }
                let top = sym(&body[0], &mut symbols);
                let pushed = sym(&body[3], &mut symbols);
                transitions.push(Transition::Push { top, pushed });
                probs.push(p);
            }
            "pop" => {
                // pop Y X -> Z [: p]
                let (body, p) = split_prob(&toks[1..])?;
                if body.len() != 4 || body[2] != "->" {
                    return Err(err("expected `pop Y X -> Z`"));
                }
                let lower = sym(&body[0], &mut symbols);
                let top = sym(&body[1], &mut symbols);
                let target = sym(&body[3], &mut symbols);
                transitions.push(Transition::Pop { lower, top, target });
                probs.push(p);
            }
            "swap" => {
                // swap X / <x|eps> : <y-seq|eps> -> Y [: p]
                let (body, p) = split_prob(&toks[1..])?;
                if body.len() < 6 || body[1] != "/" || body[3] != ":" {
                    return Err(err("expected `swap X / <x|eps> : <y-seq|eps> -> Y`"));
                }
                let from = sym(&body[0], &mut symbols);
                let input = if body[2] == "eps" {
                    None
                } else {
                    Some(body[2].clone())
                };
                let arrow = body
                    .iter()
                    .position(|t| t == "->")
                    .ok_or_else(|| err("missing `->`"))?;
                if arrow + 2 != body.len() {
                    return Err(err("expected a single target after `->`"));
                }
                let ytoks = &body[4..arrow];
                let output: Vec<OutSym> = if ytoks == ["eps"] {
                    Vec::new()
                } else {
                    ytoks
                        .iter()
                        .map(|t| {
                            OutSym::parse(t).ok_or_else(|| err(&format!("bad output token {t}")))
                        })
                        .collect::<Result<_>>()?
                };
                let to = sym(&body[arrow + 1], &mut symbols);
                transitions.push(Transition::Swap {
                    from,
                    input,
                    output,
                    to,
                });
                probs.push(p);
            }
            other => return Err(err(&format!("unknown directive `{other}`"))),
        }
    }
    let x_init = x_init.ok_or_else(|| anyhow!("missing `init` line"))?;
    let x_final = x_final.ok_or_else(|| anyhow!("missing `final` line"))?;
    let pdt = Pdt::new(symbols, x_init, x_final, transitions, inalpha);
    let with_prob = probs.iter().filter(|p| p.is_some()).count();
    let probs = if with_prob == 0 {
        None
    } else if with_prob == pdt.transitions.len() {
        Some(probs.into_iter().map(|p| p.unwrap()).collect())
    } else {
        bail!("probabilities must be present on all transitions or on none");
    };
    Ok((pdt, probs))
}

pub fn read_ppdt(text: &str) -> Result<Ppdt> {
    let (pdt, probs) = read_automaton(text)?;
    let probs = probs.ok_or_else(|| anyhow!("automaton file carries no probabilities"))?;
    Ppdt::new(pdt, probs).map_err(|e| anyhow!("bad probabilities: {e}"))
}

pub fn write_automaton(pdt: &Pdt, probs: Option<&[Value]>) -> String {
    let mut out = String::new();
    out.push_str(&format!("init {}\n", pdt.symbols[pdt.x_init]));
    out.push_str(&format!("final {}\n", pdt.symbols[pdt.x_final]));
    let ins: Vec<&str> = pdt.input_alphabet.iter().map(|s| s.as_str()).collect();
    if !ins.is_empty() {
        out.push_str(&format!("inalpha {}\n", ins.join(" ")));
    }
    let outs: Vec<String> = pdt.output_alphabet().iter().map(|o| o.render()).collect();
    if !outs.is_empty() {
        out.push_str(&format!("outalpha {}\n", outs.join(" ")));
    }
    for (tix, t) in pdt.transitions.iter().enumerate() {
        let line = match t {
            Transition::Push { top, pushed } => format!(
                "push {} -> {} {}",
                pdt.symbols[*top], pdt.symbols[*top], pdt.symbols[*pushed]
            ),
            Transition::Pop { lower, top, target } => format!(
                "pop {} {} -> {}",
                pdt.symbols[*lower], pdt.symbols[*top], pdt.symbols[*target]
            ),
            Transition::Swap {
                from,
                input,
                output,
                to,
            } => {
                let x = input.as_deref().unwrap_or("eps");
                let y = if output.is_empty() {
                    "eps".to_string()
                } else {
                    output
                        .iter()
                        .map(|o| o.render())
                        .collect::<Vec<_>>()
                        .join(" ")
                };
                format!("swap {} / {} : {} -> {}", pdt.symbols[*from], x, y, pdt.symbols[*to])
            }
        };
        out.push_str(&line);
        if let Some(ps) = probs {
            out.push_str(&format!(" : {}", value_literal(&ps[tix])));
        }
        out.push('\n');
    }
    out
}

/// Read a corpus: one derivation per line as whitespace-separated rule ids.
pub fn read_corpus(text: &str, cfg: &Cfg) -> Result<Corpus> {
    let mut derivations = Vec::new();
    for (lineno, line) in meaningful_lines(text) {
        let d: Vec<usize> = line
            .split_whitespace()
            .map(|id| {
                cfg.rule_by_id(id)
                    .ok_or_else(|| anyhow!("line {lineno}: unknown rule id `{id}`"))
            })
            .collect::<Result<_>>()?;
        derivations.push(d);
    }
    Ok(Corpus { derivations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use pdtlab::fixtures::{pg_lr, pg_wr};
    use pdtlab::lifting::lift;
    use pdtlab::strategies::{construct, StrategyKind, ALL_STRATEGIES};

    #[test]
    fn grammar_file_round_trips() {
        for pcfg in [pg_lr(), pg_wr()] {
            let text = write_grammar(&pcfg.cfg, Some(&pcfg.probs));
            let reread = read_pcfg(&text).unwrap();
            assert_eq!(reread.cfg, pcfg.cfg);
            assert_eq!(reread.probs, pcfg.probs);
            assert_eq!(write_grammar(&reread.cfg, Some(&reread.probs)), text);
        }
    }

    #[test]
    fn grammar_without_probabilities_round_trips() {
        let cfg = pg_lr().cfg;
        let text = write_grammar(&cfg, None);
        let (reread, probs) = read_grammar(&text).unwrap();
        assert_eq!(reread, cfg);
        assert!(probs.is_none());
    }

    #[test]
    fn automaton_file_round_trips_for_all_strategies() {
        let cfg = pg_lr().cfg;
        for kind in ALL_STRATEGIES {
            let pdt = construct(kind, &cfg).unwrap();
            let text = write_automaton(&pdt, None);
            let (reread, probs) = read_automaton(&text).unwrap();
            assert!(probs.is_none());
            assert_eq!(write_automaton(&reread, None), text, "{kind:?}");
        }
    }

    #[test]
    fn probabilistic_automaton_round_trips_with_kinds_preserved() {
        let ppdt = lift(&pg_wr(), StrategyKind::EpsLeftCorner, 1e-13, 100_000).unwrap();
        let text = write_automaton(&ppdt.pdt, Some(&ppdt.probs));
        let reread = read_ppdt(&text).unwrap();
        assert_eq!(write_automaton(&reread.pdt, Some(&reread.probs)), text);
        for (a, b) in ppdt.probs.iter().zip(&reread.probs) {
            assert_eq!(a.is_exact(), b.is_exact());
            assert!(a.approx_eq(b, 1e-15));
        }
    }

    #[test]
    fn quoted_terminals_and_eps_bodies_survive() {
        let text = "start S\nrule r1: S -> 'X-odd' T\nrule r2: T -> eps\n";
        let (cfg, _) = read_grammar(text).unwrap();
        assert_eq!(cfg.rules[0].rhs[0], Symbol::t("X-odd"));
        assert!(cfg.rules[1].rhs.is_empty());
        assert_eq!(write_grammar(&cfg, None), text);
    }

    #[test]
    fn mixed_probability_presence_is_rejected() {
        let text = "start S\nrule r1: S -> a : 1/2\nrule r2: S -> b\n";
        assert!(read_grammar(text).is_err());
    }

    #[test]
    fn corpus_lines_resolve_rule_ids() {
        let cfg = pg_lr().cfg;
        let corpus = read_corpus("pi_S pi_A1 pi_C pi_B1 pi_C\n# comment\n", &cfg).unwrap();
        assert_eq!(corpus.derivations.len(), 1);
        assert!(cfg.replay(&corpus.derivations[0]).is_ok());
        assert!(read_corpus("pi_S nosuch\n", &cfg).is_err());
    }
}
