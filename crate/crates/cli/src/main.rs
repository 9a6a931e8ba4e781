//! Command-line workbench: construct transducers from grammars, check their
//! properties, lift probabilities, query string/prefix probabilities,
//! estimate grammars from corpora, and analyze probability-lifting
//! feasibility.
//!
//! Exit codes: 0 = success or verdict true; 1 = a checked property is false
//! or lifting is infeasible (the run itself is valid and the verdict is
//! printed); 2 = input or format error.

mod formats;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use pdtlab::automaton::enumerate_computations;
use pdtlab::grammar::{enumerate_derivations, is_consistent, mle_estimate};
use pdtlab::lifting::{feasibility_analysis, lift, ppda_to_pcfg, LiftError};
use pdtlab::prefix::{prefix_probability, string_probability_ppdt};
use pdtlab::properties::{check_cpp, check_spp};
use pdtlab::strategies::{construct, StrategyKind};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "pdtlab", version, about = "Push-down transducer workbench")]
struct Cli {
    /// Numeric tolerance for fixpoint iteration.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tolerance: f64,
    /// Iteration cap for fixpoint solving.
    #[arg(long, global = true, default_value_t = 100_000)]
    max_iter: usize,
    /// Step bound for enumeration-based operations.
    #[arg(long, global = true, default_value_t = 200)]
    max_steps: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Construct a transducer from a grammar under a parsing strategy.
    Construct {
        #[arg(long)]
        strategy: String,
        grammar: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Check automaton properties (all of them when no flag is given).
    Check {
        #[arg(long)]
        cpp: bool,
        #[arg(long)]
        spp: bool,
        #[arg(long)]
        reduced: bool,
        automaton: PathBuf,
    },
    /// Lift grammar probabilities onto the strategy's transducer.
    Lift {
        #[arg(long)]
        strategy: String,
        pcfg: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// String probability under a probabilistic transducer.
    Prob {
        ppdt: PathBuf,
        #[arg(long)]
        input: String,
    },
    /// Prefix probability under a probabilistic transducer.
    Prefix {
        ppdt: PathBuf,
        #[arg(long)]
        input: String,
    },
    /// Maximum-likelihood rule probabilities from a derivation corpus.
    Estimate {
        cfg: PathBuf,
        corpus: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Decide whether probe string probabilities refute probability lifting.
    Analyze {
        #[arg(long)]
        strategy: String,
        pcfg: PathBuf,
        #[arg(long = "probe")]
        probes: Vec<String>,
    },
    /// List derivations of a grammar or computations of an automaton.
    Enumerate {
        file: PathBuf,
        /// Input tokens for automaton computations (default: empty input).
        #[arg(long, default_value = "")]
        input: String,
    },
}

fn parse_strategy(name: &str) -> Result<StrategyKind> {
    Ok(match name {
        "top_down" => StrategyKind::TopDown,
        "left_corner" => StrategyKind::LeftCorner,
        "plr" => StrategyKind::Plr,
        "eps_left_corner" => StrategyKind::EpsLeftCorner,
        "elr" => StrategyKind::Elr,
        "lr0" => StrategyKind::Lr0,
        other => {
            return Err(anyhow!(
                "unknown strategy `{other}` (expected one of top_down, left_corner, plr, eps_left_corner, elr, lr0)"
            ))
        }
    })
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn tokens(input: &str) -> Vec<String> {
    input.split_whitespace().map(|t| t.to_string()).collect()
}

/// Runs a subcommand; Ok(code) is the process exit code for a valid run.
fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Construct {
            strategy,
            grammar,
            out,
        } => {
            let kind = parse_strategy(&strategy)?;
            let (cfg, _) = formats::read_grammar(&read(&grammar)?)?;
            let pdt = construct(kind, &cfg).context("construct")?;
            std::fs::write(&out, formats::write_automaton(&pdt, None))?;
            println!(
                "constructed {} automaton: {} stack symbols, {} transitions -> {}",
                strategy,
                pdt.symbols.len(),
                pdt.transitions.len(),
                out.display()
            );
            Ok(0)
        }
        Cmd::Check {
            cpp,
            spp,
            reduced,
            automaton,
        } => {
            let (pdt, _) = formats::read_automaton(&read(&automaton)?)?;
            let all = !(cpp || spp || reduced);
            let mut ok = true;
            if cpp || all {
                let report = check_cpp(&pdt, Some(cli.max_steps)).context("check --cpp")?;
                println!("CPP: {}", if report.holds { "yes" } else { "no" });
                if let Some(stack) = &report.dead_stack {
                    let names: Vec<&str> =
                        stack.iter().map(|&s| pdt.symbols[s].as_str()).collect();
                    println!("  dead stack: {}", names.join(" "));
                }
                ok &= report.holds;
            }
            if spp || all {
                let report = check_spp(&pdt);
                println!("SPP: {}", if report.holds { "yes" } else { "no" });
                for v in &report.violations {
                    println!(
                        "  push {} completed by pops to {} and {}",
                        pdt.render_transition(v.push),
                        pdt.render_transition(v.pop_a),
                        pdt.render_transition(v.pop_b)
                    );
                }
                ok &= report.holds;
            }
            if reduced || all {
                let is = pdtlab::automaton::is_reduced_pdt(&pdt);
                println!("reduced: {}", if is { "yes" } else { "no" });
                ok &= is;
            }
            Ok(if ok { 0 } else { 1 })
        }
        Cmd::Lift {
            strategy,
            pcfg,
            out,
        } => {
            let kind = parse_strategy(&strategy)?;
            let pcfg = formats::read_pcfg(&read(&pcfg)?)?;
            match lift(&pcfg, kind, cli.tolerance, cli.max_iter) {
                Ok(ppdt) => {
                    std::fs::write(&out, formats::write_automaton(&ppdt.pdt, Some(&ppdt.probs)))?;
                    println!(
                        "lifted {} automaton: {} transitions -> {}",
                        strategy,
                        ppdt.pdt.transitions.len(),
                        out.display()
                    );
                    Ok(0)
                }
                Err(e @ (LiftError::SppRequired(_) | LiftError::CppRequired(_))) => {
                    println!("lifting is not possible for this strategy: {e}");
                    Ok(1)
                }
                Err(e) => Err(anyhow!(e).context("lift")),
            }
        }
        Cmd::Prob { ppdt, input } => {
            let ppdt = formats::read_ppdt(&read(&ppdt)?)?;
            let p = string_probability_ppdt(&ppdt, &tokens(&input), cli.tolerance, cli.max_iter)
                .context("prob")?;
            println!("{}", p.render());
            Ok(0)
        }
        Cmd::Prefix { ppdt, input } => {
            let ppdt = formats::read_ppdt(&read(&ppdt)?)?;
            match ppda_to_pcfg(&ppdt).map_err(anyhow::Error::from).and_then(|g| {
                is_consistent(&g, cli.tolerance, cli.max_iter).map_err(anyhow::Error::from)
            }) {
                Ok(report) if report.consistent => {}
                Ok(report) => eprintln!(
                    "warning: transducer is not verified consistent (start mass {}); the prefix formula assumes consistency",
                    report.z_start.render()
                ),
                Err(e) => eprintln!("warning: consistency could not be verified: {e}"),
            }
            let p = prefix_probability(&ppdt, &tokens(&input), cli.tolerance, cli.max_iter)
                .context("prefix")?;
            println!("{}", p.render());
            Ok(0)
        }
        Cmd::Estimate { cfg, corpus, out } => {
            let (cfg, _) = formats::read_grammar(&read(&cfg)?)?;
            let corpus = formats::read_corpus(&read(&corpus)?, &cfg)?;
            let pcfg = mle_estimate(&cfg, &corpus).context("estimate")?;
            std::fs::write(&out, formats::write_grammar(&pcfg.cfg, Some(&pcfg.probs)))?;
            println!(
                "estimated probabilities for {} rules from {} derivations -> {}",
                pcfg.cfg.rules.len(),
                corpus.derivations.len(),
                out.display()
            );
            Ok(0)
        }
        Cmd::Analyze {
            strategy,
            pcfg,
            probes,
        } => {
            let kind = parse_strategy(&strategy)?;
            let pcfg = formats::read_pcfg(&read(&pcfg)?)?;
            if probes.len() < 2 {
                return Err(anyhow!("analyze needs at least two --probe strings"));
            }
            let probe_tokens: Vec<Vec<String>> = probes.iter().map(|p| tokens(p)).collect();
            let verdict = feasibility_analysis(&pcfg, kind, &probe_tokens, cli.max_steps)
                .context("analyze")?;
            if let Some(w) = &verdict.witness {
                println!(
                    "witness: \"{}\" vs \"{}\"",
                    w.string_a.join(" "),
                    w.string_b.join(" ")
                );
                println!(
                    "grammar ratio {}, forced automaton ratio {}",
                    w.grammar_ratio.render(),
                    w.automaton_ratio.render()
                );
                println!("{}", w.explanation);
            }
            for c in &verdict.constraints {
                println!(
                    "constraint: probes {} vs {} require free-probability ratio {}",
                    c.probe_a,
                    c.probe_b,
                    c.required_ratio.render()
                );
            }
            for note in &verdict.notes {
                println!("note: {note}");
            }
            if verdict.feasible {
                println!("verdict: not refuted by these probes");
                Ok(0)
            } else {
                println!("verdict: infeasible");
                Ok(1)
            }
        }
        Cmd::Enumerate { file, input } => {
            let text = read(&file)?;
            let first = text
                .lines()
                .map(str::trim)
                .find(|l| !l.is_empty() && !l.starts_with('#'))
                .unwrap_or("");
            let is_grammar = first.starts_with("start") || first.starts_with("rule");
            if is_grammar {
                let (cfg, probs) = formats::read_grammar(&text)?;
                for (d, yld) in enumerate_derivations(&cfg, cli.max_steps) {
                    let ids: Vec<&str> = d.iter().map(|&rix| cfg.rules[rix].id.as_str()).collect();
                    let mut line = format!("{} => {}", ids.join(" "), yld.join(" "));
                    if let Some(ps) = &probs {
                        let p = d
                            .iter()
                            .fold(pdtlab::numeric::Value::one(), |acc, &rix| acc.mul(&ps[rix]));
                        line.push_str(&format!(" : {}", p.render()));
                    }
                    println!("{line}");
                }
            } else {
                let (pdt, probs) = formats::read_automaton(&text)?;
                let en = enumerate_computations(&pdt, &tokens(&input), cli.max_steps);
                for c in &en.complete {
                    let out: Vec<String> = c.output(&pdt).iter().map(|o| o.render()).collect();
                    let mut line = out.join(" ");
                    if let Some(ps) = &probs {
                        let p = c.monomial().evaluate(ps);
                        line.push_str(&format!(" : {}", p.render()));
                    }
                    println!("{line}");
                }
                if en.bound_hit {
                    eprintln!("warning: step bound reached; the list may be incomplete");
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
