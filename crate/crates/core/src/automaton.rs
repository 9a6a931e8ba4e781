//! Push-down transducers: representation, normal form, computation
//! enumeration, symbolic string probabilities (monomials over transition
//! identities), trimming, and the probabilistic variant.
//!
//! Conventions: the stack grows to the right (the top is the last element);
//! a transducer starts on stack `[x_init]` and a computation is complete when
//! the whole input is consumed and the stack is exactly `[x_final]`.
//! Normal form: for every symbol other than `x_final`, all transitions acting
//! on it (push with that top, pop with that top, swap from it) have the same
//! kind, and `x_final` occurs in no left-hand side.

use crate::numeric::Value;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

pub type StackSym = usize;

/// Output alphabet symbols: rule identifiers, integer markers, and the end
/// marker.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OutSym {
    Rule(String),
    Mark(usize),
    End,
}

impl OutSym {
    /// Render as a whitespace-free token: rule ids verbatim, markers `#m`,
    /// the end marker `#end`.
    pub fn render(&self) -> String {
        match self {
            OutSym::Rule(r) => r.clone(),
            OutSym::Mark(m) => format!("#{m}"),
            OutSym::End => "#end".to_string(),
        }
    }

    pub fn parse(tok: &str) -> Option<OutSym> {
        if tok == "#end" {
            Some(OutSym::End)
        } else if let Some(m) = tok.strip_prefix('#') {
            m.parse().ok().map(OutSym::Mark)
        } else {
            Some(OutSym::Rule(tok.to_string()))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Transition {
    /// `X -> X Y` (push `pushed` on top of `top`).
    Push { top: StackSym, pushed: StackSym },
    /// `W X -> Z` (pop the top two, push `target`).
    Pop {
        lower: StackSym,
        top: StackSym,
        target: StackSym,
    },
    /// `X -(x, y)-> Y`: replace the top, optionally reading one input symbol
    /// and emitting a sequence of output symbols.
    Swap {
        from: StackSym,
        input: Option<String>,
        output: Vec<OutSym>,
        to: StackSym,
    },
}

impl Transition {
    /// The symbol this transition acts on (the top of the stack it requires).
    pub fn acting(&self) -> StackSym {
        match self {
            Transition::Push { top, .. } => *top,
            Transition::Pop { top, .. } => *top,
            Transition::Swap { from, .. } => *from,
        }
    }

    /// Number of stack-symbol occurrences when written out (a size measure).
    pub fn occurrences(&self) -> usize {
        match self {
            Transition::Push { .. } => 3,
            Transition::Pop { .. } => 3,
            Transition::Swap { .. } => 2,
        }
    }
}

#[derive(Debug, thiserror::Error, Clone)]
pub enum AutomatonError {
    #[error("computation enumeration exceeded the step bound ({found} complete computations found so far)")]
    BoundExceeded { found: usize },
    #[error("the transducer accepts no string (initial symbol cannot reach the final symbol)")]
    EmptyLanguage,
    #[error("probability count does not match transition count")]
    ProbabilityArity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pdt {
    pub symbols: Vec<String>,
    pub x_init: StackSym,
    pub x_final: StackSym,
    pub transitions: Vec<Transition>,
    pub input_alphabet: BTreeSet<String>,
    by_acting: Vec<Vec<usize>>,
}

impl Pdt {
    pub fn new(
        symbols: Vec<String>,
        x_init: StackSym,
        x_final: StackSym,
        transitions: Vec<Transition>,
        mut input_alphabet: BTreeSet<String>,
    ) -> Pdt {
        for t in &transitions {
            if let Transition::Swap {
                input: Some(a), ..
            } = t
            {
                input_alphabet.insert(a.clone());
            }
        }
        let mut by_acting = vec![Vec::new(); symbols.len()];
        for (i, t) in transitions.iter().enumerate() {
            by_acting[t.acting()].push(i);
        }
        Pdt {
            symbols,
            x_init,
            x_final,
            transitions,
            input_alphabet,
            by_acting,
        }
    }

    pub fn transitions_from(&self, sym: StackSym) -> &[usize] {
        &self.by_acting[sym]
    }

    pub fn output_alphabet(&self) -> BTreeSet<OutSym> {
        let mut out = BTreeSet::new();
        for t in &self.transitions {
            if let Transition::Swap { output, .. } = t {
                out.extend(output.iter().cloned());
            }
        }
        out
    }

    /// Size measured as the number of transitions.
    pub fn size(&self) -> usize {
        self.transitions.len()
    }

    /// Size measured as total stack-symbol occurrences in transitions.
    pub fn occ_size(&self) -> usize {
        self.transitions.iter().map(|t| t.occurrences()).sum()
    }

    pub fn render_transition(&self, ix: usize) -> String {
        match &self.transitions[ix] {
            Transition::Push { top, pushed } => format!(
                "push {} -> {} {}",
                self.symbols[*top], self.symbols[*top], self.symbols[*pushed]
            ),
            Transition::Pop { lower, top, target } => format!(
                "pop {} {} -> {}",
                self.symbols[*lower], self.symbols[*top], self.symbols[*target]
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
                format!("swap {} / {} : {} -> {}", self.symbols[*from], x, y, self.symbols[*to])
            }
        }
    }

    /// In normal form: every symbol except `x_final` acts in only one
    /// transition kind and `x_final` occurs in no left-hand side.
    pub fn is_normal_form(&self) -> bool {
        let mut kinds: Vec<BTreeSet<u8>> = vec![BTreeSet::new(); self.symbols.len()];
        for t in &self.transitions {
            let k = match t {
                Transition::Push { .. } => 0u8,
                Transition::Pop { .. } => 1,
                Transition::Swap { .. } => 2,
            };
            kinds[t.acting()].insert(k);
            if t.acting() == self.x_final {
                return false;
            }
            if let Transition::Pop { lower, .. } = t {
                if *lower == self.x_final {
                    return false;
                }
            }
        }
        kinds.iter().all(|k| k.len() <= 1)
    }

    /// Apply one transition to a configuration; `None` when not applicable.
    pub fn step(
        &self,
        stack: &[StackSym],
        consumed: usize,
        input: &[String],
        ix: usize,
    ) -> Option<(Vec<StackSym>, usize)> {
        match &self.transitions[ix] {
            Transition::Push { top, pushed } => {
                if stack.last() == Some(top) {
                    let mut s = stack.to_vec();
                    s.push(*pushed);
                    Some((s, consumed))
                } else {
                    None
                }
            }
            Transition::Pop { lower, top, target } => {
                let n = stack.len();
                if n >= 2 && stack[n - 1] == *top && stack[n - 2] == *lower {
                    let mut s = stack[..n - 2].to_vec();
                    s.push(*target);
                    Some((s, consumed))
                } else {
                    None
                }
            }
            Transition::Swap {
                from, input: inp, to, ..
            } => {
                if stack.last() != Some(from) {
                    return None;
                }
                match inp {
                    None => {
                        let mut s = stack.to_vec();
                        *s.last_mut().unwrap() = *to;
                        Some((s, consumed))
                    }
                    Some(a) => {
                        if consumed < input.len() && input[consumed] == *a {
                            let mut s = stack.to_vec();
                            *s.last_mut().unwrap() = *to;
                            Some((s, consumed + 1))
                        } else {
                            None
                        }
                    }
                }
            }
        }
    }
}

/// A snapshot of a run: current stack, input consumed so far, output so far.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub stack: Vec<StackSym>,
    pub consumed: usize,
    pub output: Vec<OutSym>,
}

/// A computation is the sequence of transition indices taken from the initial
/// configuration.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Computation {
    pub steps: Vec<usize>,
}

impl Computation {
    /// Replay against an input, producing every intermediate configuration
    /// (the first entry is the initial configuration).
    pub fn replay(&self, pdt: &Pdt, input: &[String]) -> Option<Vec<Configuration>> {
        let mut configs = vec![Configuration {
            stack: vec![pdt.x_init],
            consumed: 0,
            output: Vec::new(),
        }];
        for &ix in &self.steps {
            let cur = configs.last().unwrap();
            let (stack, consumed) = pdt.step(&cur.stack, cur.consumed, input, ix)?;
            let mut output = cur.output.clone();
            if let Transition::Swap { output: y, .. } = &pdt.transitions[ix] {
                output.extend(y.iter().cloned());
            }
            configs.push(Configuration {
                stack,
                consumed,
                output,
            });
        }
        Some(configs)
    }

    /// The emitted output string.
    pub fn output(&self, pdt: &Pdt) -> Vec<OutSym> {
        let mut out = Vec::new();
        for &ix in &self.steps {
            if let Transition::Swap { output, .. } = &pdt.transitions[ix] {
                out.extend(output.iter().cloned());
            }
        }
        out
    }

    /// The monomial of transition identities (with multiplicities).
    pub fn monomial(&self) -> ProbMonomial {
        let mut m = ProbMonomial::default();
        for &ix in &self.steps {
            *m.factors.entry(ix).or_insert(0) += 1;
        }
        m
    }
}

/// A product of transition probabilities, kept symbolically as transition
/// indices with multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProbMonomial {
    pub factors: BTreeMap<usize, u32>,
}

impl ProbMonomial {
    /// Evaluate under a probability assignment.
    pub fn evaluate(&self, probs: &[Value]) -> Value {
        let mut v = Value::one();
        for (&ix, &mult) in &self.factors {
            for _ in 0..mult {
                v = v.mul(&probs[ix]);
            }
        }
        v
    }

    /// Cancel common factors of two monomials, returning the residual pair.
    pub fn cancel(&self, other: &ProbMonomial) -> (ProbMonomial, ProbMonomial) {
        let mut a = self.clone();
        let mut b = other.clone();
        let keys: Vec<usize> = a
            .factors
            .keys()
            .filter(|k| b.factors.contains_key(k))
            .copied()
            .collect();
        for k in keys {
            let m = (*a.factors.get(&k).unwrap()).min(*b.factors.get(&k).unwrap());
            let ea = a.factors.get_mut(&k).unwrap();
            *ea -= m;
            if *ea == 0 {
                a.factors.remove(&k);
            }
            let eb = b.factors.get_mut(&k).unwrap();
            *eb -= m;
            if *eb == 0 {
                b.factors.remove(&k);
            }
        }
        (a, b)
    }
}

/// Result of a bounded enumeration of computations.
#[derive(Clone, Debug)]
pub struct Enumeration {
    /// Complete computations (whole input consumed, stack `[x_final]`),
    /// in ascending lexicographic order of transition-index sequences.
    pub complete: Vec<Computation>,
    /// True when some run was still extendable at the step bound, i.e. the
    /// enumeration may be incomplete.
    pub bound_hit: bool,
}

/// Depth-first enumeration of all computations on `input` of at most
/// `max_steps` transitions.
pub fn enumerate_computations(pdt: &Pdt, input: &[String], max_steps: usize) -> Enumeration {
    let mut result = Enumeration {
        complete: Vec::new(),
        bound_hit: false,
    };
    let mut steps = Vec::new();
    let stack = vec![pdt.x_init];
    dfs(pdt, input, max_steps, stack, 0, &mut steps, &mut result);
    return result;

    fn dfs(
        pdt: &Pdt,
        input: &[String],
        left: usize,
        stack: Vec<StackSym>,
        consumed: usize,
        steps: &mut Vec<usize>,
        result: &mut Enumeration,
    ) {
        if stack.len() == 1 && stack[0] == pdt.x_final && consumed == input.len() {
            result.complete.push(Computation {
                steps: steps.clone(),
            });
        }
        let top = match stack.last() {
            Some(&t) => t,
            None => return,
        };
        let mut candidates = Vec::new();
        for &ix in pdt.transitions_from(top) {
            if let Some(next) = pdt.step(&stack, consumed, input, ix) {
                candidates.push((ix, next));
            }
        }
        if candidates.is_empty() {
            return;
        }
        if left == 0 {
            result.bound_hit = true;
            return;
        }
        for (ix, (nstack, nconsumed)) in candidates {
            steps.push(ix);
            dfs(pdt, input, left - 1, nstack, nconsumed, steps, result);
            steps.pop();
        }
    }
}

/// The set of probability monomials of the complete computations on `input`.
/// Errors when the step bound is hit before enumeration is exhaustive.
pub fn symbolic_string_probability(
    pdt: &Pdt,
    input: &[String],
    max_steps: usize,
) -> Result<Vec<ProbMonomial>, AutomatonError> {
    let e = enumerate_computations(pdt, input, max_steps);
    if e.bound_hit {
        return Err(AutomatonError::BoundExceeded {
            found: e.complete.len(),
        });
    }
    Ok(e.complete.iter().map(|c| c.monomial()).collect())
}

/// Bring a transducer into normal form: give `x_final` a fresh identity when
/// it occurs in a left-hand side, and split every symbol that acts in more
/// than one transition kind into per-kind variants connected by epsilon
/// swaps. Idempotent; preserves the computation relation up to the inserted
/// bridging swaps.
pub fn normalize(pdt: &Pdt) -> Pdt {
    let mut symbols = pdt.symbols.clone();
    let mut transitions = pdt.transitions.clone();
    let mut x_final = pdt.x_final;

    let final_in_lhs = transitions.iter().any(|t| {
        t.acting() == x_final
            || matches!(t, Transition::Pop { lower, .. } if *lower == x_final)
    });
    if final_in_lhs || x_final == pdt.x_init {
        let fresh = symbols.len();
        symbols.push(format!("{}!done", symbols[x_final]));
        transitions.push(Transition::Swap {
            from: x_final,
            input: None,
            output: Vec::new(),
            to: fresh,
        });
        x_final = fresh;
    }

    // Which kinds does each symbol act in?
    const PUSH: usize = 0;
    const POP: usize = 1;
    const SWAP: usize = 2;
    let mut kinds: Vec<[bool; 3]> = vec![[false; 3]; symbols.len()];
    for t in &transitions {
        let k = match t {
            Transition::Push { .. } => PUSH,
            Transition::Pop { .. } => POP,
            Transition::Swap { .. } => SWAP,
        };
        kinds[t.acting()][k] = true;
    }
    let mixed: Vec<bool> = kinds
        .iter()
        .map(|k| k.iter().filter(|b| **b).count() > 1)
        .collect();
    if !mixed.iter().any(|m| *m) {
        if final_in_lhs || pdt.x_final == pdt.x_init {
            return Pdt::new(
                symbols,
                pdt.x_init,
                x_final,
                transitions,
                pdt.input_alphabet.clone(),
            );
        }
        return pdt.clone();
    }

    // Per-kind variants for mixed symbols.
    let mut variant: HashMap<(StackSym, usize), StackSym> = HashMap::new();
    for (s, m) in mixed.iter().enumerate() {
        if !m {
            continue;
        }
        for (k, suffix) in [(PUSH, "!pu"), (POP, "!po"), (SWAP, "!sw")] {
            if kinds[s][k] {
                let fresh = symbols.len();
                symbols.push(format!("{}{}", pdt.symbols[s].clone(), suffix));
                variant.insert((s, k), fresh);
            }
        }
    }
    let act = |s: StackSym, k: usize, variant: &HashMap<(StackSym, usize), StackSym>| {
        *variant.get(&(s, k)).unwrap_or(&s)
    };
    // A symbol occurring below the top was put there by a push, so pop
    // left-hand lowers are remapped to the push variant.
    let lower_of = |s: StackSym, variant: &HashMap<(StackSym, usize), StackSym>| {
        *variant.get(&(s, PUSH)).unwrap_or(&s)
    };
    let mut rewritten: Vec<Transition> = transitions
        .iter()
        .map(|t| match t {
            Transition::Push { top, pushed } => Transition::Push {
                top: act(*top, PUSH, &variant),
                pushed: *pushed,
            },
            Transition::Pop { lower, top, target } => Transition::Pop {
                lower: lower_of(*lower, &variant),
                top: act(*top, POP, &variant),
                target: *target,
            },
            Transition::Swap {
                from,
                input,
                output,
                to,
            } => Transition::Swap {
                from: act(*from, SWAP, &variant),
                input: input.clone(),
                output: output.clone(),
                to: *to,
            },
        })
        .collect();
    // Bridging swaps from each mixed symbol to its variants.
    for ((s, _k), v) in variant.iter() {
        rewritten.push(Transition::Swap {
            from: *s,
            input: None,
            output: Vec::new(),
            to: *v,
        });
    }
    rewritten.sort();
    rewritten.dedup();
    Pdt::new(
        symbols,
        pdt.x_init,
        x_final,
        rewritten,
        pdt.input_alphabet.clone(),
    )
}

/// Remove transitions (and then symbols) that occur in no complete
/// computation. Errors with `EmptyLanguage` when no complete computation
/// exists at all.
pub fn trim_pdt(pdt: &Pdt) -> Result<Pdt, AutomatonError> {
    let usable = crate::properties::usable_transitions(pdt);
    if !crate::properties::leadsto_relation(pdt).holds(pdt.x_init, pdt.x_final) {
        return Err(AutomatonError::EmptyLanguage);
    }
    let transitions: Vec<Transition> = pdt
        .transitions
        .iter()
        .enumerate()
        .filter(|(i, _)| usable.contains(i))
        .map(|(_, t)| t.clone())
        .collect();
    Ok(compact(pdt, transitions, &pdt.input_alphabet))
}

/// True when every transition occurs in some complete computation.
pub fn is_reduced_pdt(pdt: &Pdt) -> bool {
    let usable = crate::properties::usable_transitions(pdt);
    usable.len() == pdt.transitions.len()
        && crate::properties::leadsto_relation(pdt).holds(pdt.x_init, pdt.x_final)
}

/// Rebuild a Pdt keeping only symbols referenced by `transitions` (plus the
/// initial and final symbols), renumbering compactly.
fn compact(pdt: &Pdt, transitions: Vec<Transition>, input_alphabet: &BTreeSet<String>) -> Pdt {
    let mut used: BTreeSet<StackSym> = BTreeSet::new();
    used.insert(pdt.x_init);
    used.insert(pdt.x_final);
    for t in &transitions {
        match t {
            Transition::Push { top, pushed } => {
                used.insert(*top);
                used.insert(*pushed);
            }
            Transition::Pop { lower, top, target } => {
                used.insert(*lower);
                used.insert(*top);
                used.insert(*target);
            }
            Transition::Swap { from, to, .. } => {
                used.insert(*from);
                used.insert(*to);
            }
        }
    }
    let remap: BTreeMap<StackSym, StackSym> =
        used.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let symbols: Vec<String> = used.iter().map(|&s| pdt.symbols[s].clone()).collect();
    let transitions = transitions
        .into_iter()
        .map(|t| match t {
            Transition::Push { top, pushed } => Transition::Push {
                top: remap[&top],
                pushed: remap[&pushed],
            },
            Transition::Pop { lower, top, target } => Transition::Pop {
                lower: remap[&lower],
                top: remap[&top],
                target: remap[&target],
            },
            Transition::Swap {
                from,
                input,
                output,
                to,
            } => Transition::Swap {
                from: remap[&from],
                input,
                output,
                to: remap[&to],
            },
        })
        .collect();
    Pdt::new(
        symbols,
        remap[&pdt.x_init],
        remap[&pdt.x_final],
        transitions,
        input_alphabet.clone(),
    )
}

/// A probabilistic push-down transducer: a Pdt plus one probability per
/// transition (positionally aligned).
#[derive(Clone, Debug)]
pub struct Ppdt {
    pub pdt: Pdt,
    pub probs: Vec<Value>,
}

impl Ppdt {
    pub fn new(pdt: Pdt, probs: Vec<Value>) -> Result<Ppdt, AutomatonError> {
        if probs.len() != pdt.transitions.len() {
            return Err(AutomatonError::ProbabilityArity);
        }
        Ok(Ppdt { pdt, probs })
    }

    pub fn computation_probability(&self, c: &Computation) -> Value {
        c.steps
            .iter()
            .fold(Value::one(), |acc, &ix| acc.mul(&self.probs[ix]))
    }

    /// Properness groups: pushes from the same top, swaps from the same
    /// source, and pops with the same (lower, top) pair. Each group's
    /// probabilities must sum to one for the Ppdt to be proper.
    pub fn is_proper(&self, tol: f64) -> bool {
        for group in properness_groups(&self.pdt).values() {
            let mut sum = Value::zero();
            for &ix in group {
                if self.probs[ix].to_f64() < 0.0 {
                    return false;
                }
                sum = sum.add(&self.probs[ix]);
            }
            if !sum.approx_eq(&Value::one(), tol) {
                return false;
            }
        }
        true
    }
}

/// Key identifying a properness group.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum GroupKey {
    PushFrom(StackSym),
    SwapFrom(StackSym),
    PopPair(StackSym, StackSym),
}

pub fn properness_groups(pdt: &Pdt) -> BTreeMap<GroupKey, Vec<usize>> {
    let mut groups: BTreeMap<GroupKey, Vec<usize>> = BTreeMap::new();
    for (i, t) in pdt.transitions.iter().enumerate() {
        let key = match t {
            Transition::Push { top, .. } => GroupKey::PushFrom(*top),
            Transition::Swap { from, .. } => GroupKey::SwapFrom(*from),
            Transition::Pop { lower, top, .. } => GroupKey::PopPair(*lower, *top),
        };
        groups.entry(key).or_default().push(i);
    }
    groups
}

/// Transitions that are the sole member of their properness group (and hence
/// carry probability one in any proper assignment).
pub fn forced_transitions(pdt: &Pdt) -> BTreeSet<usize> {
    properness_groups(pdt)
        .values()
        .filter(|g| g.len() == 1)
        .map(|g| g[0])
        .collect()
}

/// Construction helper: interns symbol names, deduplicates transitions, and
/// expands the combined push/swap, pop/swap and swap/push shorthands into
/// normal-form primitives with fresh intermediate symbols.
#[derive(Default)]
pub struct PdtBuilder {
    symbols: Vec<String>,
    index: HashMap<String, StackSym>,
    transitions: BTreeSet<Transition>,
    /// swap/push introduces an alias that must inherit the pops of its base.
    aliases: Vec<(StackSym, StackSym)>,
}

impl PdtBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn name_of(&self, s: StackSym) -> &str {
        &self.symbols[s]
    }

    pub fn sym(&mut self, name: &str) -> StackSym {
        if let Some(&s) = self.index.get(name) {
            return s;
        }
        let s = self.symbols.len();
        self.symbols.push(name.to_string());
        self.index.insert(name.to_string(), s);
        s
    }

    pub fn push(&mut self, top: StackSym, pushed: StackSym) {
        self.transitions.insert(Transition::Push { top, pushed });
    }

    pub fn pop(&mut self, lower: StackSym, top: StackSym, target: StackSym) {
        self.transitions.insert(Transition::Pop { lower, top, target });
    }

    pub fn swap(
        &mut self,
        from: StackSym,
        input: Option<&str>,
        output: Vec<OutSym>,
        to: StackSym,
    ) {
        self.transitions.insert(Transition::Swap {
            from,
            input: input.map(|s| s.to_string()),
            output,
            to,
        });
    }

    fn label(input: Option<&str>, output: &[OutSym]) -> String {
        let x = input.unwrap_or("");
        let y: Vec<String> = output.iter().map(|o| o.render()).collect();
        format!("{}!{}", x, y.join(","))
    }

    /// `X -(x,y)-> X Y`: push, then read/emit on the new top.
    pub fn push_swap(
        &mut self,
        top: StackSym,
        input: Option<&str>,
        output: Vec<OutSym>,
        pushed: StackSym,
    ) {
        let mid_name = format!("{}@{}", self.symbols[pushed], Self::label(input, &output));
        let mid = self.sym(&mid_name);
        self.push(top, mid);
        self.swap(mid, input, output, pushed);
    }

    /// `W X -(x,y)-> Z`: pop, then read/emit.
    pub fn pop_swap(
        &mut self,
        lower: StackSym,
        top: StackSym,
        input: Option<&str>,
        output: Vec<OutSym>,
        target: StackSym,
    ) {
        let mid_name = format!("{}@{}", self.symbols[target], Self::label(input, &output));
        let mid = self.sym(&mid_name);
        self.pop(lower, top, mid);
        self.swap(mid, input, output, target);
    }

    /// `X -(x,y)-> Z Y`: read/emit, then push `Y` on what behaves like `Z`.
    /// The intermediate symbol inherits every pop whose lower symbol is `Z`.
    pub fn swap_push(
        &mut self,
        from: StackSym,
        input: Option<&str>,
        output: Vec<OutSym>,
        lower: StackSym,
        pushed: StackSym,
    ) {
        let mid_name = format!(
            "{}+{}",
            self.symbols[lower], self.symbols[pushed]
        );
        let mid = self.sym(&mid_name);
        self.swap(from, input, output, mid);
        self.push(mid, pushed);
        self.aliases.push((mid, lower));
    }

    pub fn finalize(mut self, x_init: StackSym, x_final: StackSym) -> Pdt {
        // Aliases inherit pops from their bases (to fixpoint, in case bases
        // are themselves aliases).
        loop {
            let mut added = Vec::new();
            for &(alias, base) in &self.aliases {
                for t in &self.transitions {
                    if let Transition::Pop { lower, top, target } = t {
                        if *lower == base {
                            let cand = Transition::Pop {
                                lower: alias,
                                top: *top,
                                target: *target,
                            };
                            if !self.transitions.contains(&cand) {
                                added.push(cand);
                            }
                        }
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            self.transitions.extend(added);
        }
        let transitions: Vec<Transition> = self.transitions.into_iter().collect();
        Pdt::new(
            self.symbols,
            x_init,
            x_final,
            transitions,
            BTreeSet::new(),
        )
    }
}

impl fmt::Display for Pdt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "init {}", self.symbols[self.x_init])?;
        writeln!(f, "final {}", self.symbols[self.x_final])?;
        for i in 0..self.transitions.len() {
            writeln!(f, "{}", self.render_transition(i))?;
        }
        Ok(())
    }
}
