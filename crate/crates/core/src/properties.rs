//! Structural properties of push-down transducers: the leads-to relation,
//! surface automata over stack contents, reachable/live stack analysis,
//! usable transitions, the completed-path property (every reachable stack can
//! still reach completion), the single-pop-target property (each push has a
//! unique matching pop target), dead-computation witnesses, and bounded mass
//! checks for probabilistic transducers.

use crate::automaton::{Computation, Pdt, Ppdt, StackSym, Transition};
use crate::numeric::Value;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

#[derive(Debug, thiserror::Error, Clone)]
pub enum PropertiesError {
    #[error("a dead stack exists but no witness computation was found within {bound} steps")]
    WitnessSearchExhausted { bound: usize },
}

/// `holds(y, z)` iff a stack consisting of the single symbol `y` can evolve
/// into the single symbol `z` (possibly growing and shrinking in between).
#[derive(Clone, Debug)]
pub struct LeadsToRelation {
    reach: Vec<BTreeSet<StackSym>>,
}

impl LeadsToRelation {
    pub fn holds(&self, y: StackSym, z: StackSym) -> bool {
        self.reach[y].contains(&z)
    }
    pub fn successors(&self, y: StackSym) -> &BTreeSet<StackSym> {
        &self.reach[y]
    }
}

pub fn leadsto_relation(pdt: &Pdt) -> LeadsToRelation {
    let n = pdt.symbols.len();
    let mut reach: Vec<BTreeSet<StackSym>> = (0..n).map(|y| BTreeSet::from([y])).collect();
    loop {
        let mut changed = false;
        for y in 0..n {
            let mut grow: Vec<StackSym> = Vec::new();
            for &z in &reach[y] {
                for &ix in pdt.transitions_from(z) {
                    match &pdt.transitions[ix] {
                        Transition::Swap { to, .. } => {
                            if !reach[y].contains(to) {
                                grow.push(*to);
                            }
                        }
                        Transition::Push { top, pushed } => {
                            debug_assert_eq!(*top, z);
                            // z pushes w; if w leads to w' and (z, w') pops
                            // to v, then y leads to v.
                            for &w2 in reach[*pushed].iter() {
                                for t in &pdt.transitions {
                                    if let Transition::Pop { lower, top, target } = t {
                                        if *lower == z && *top == w2 && !reach[y].contains(target)
                                        {
                                            grow.push(*target);
                                        }
                                    }
                                }
                            }
                        }
                        Transition::Pop { .. } => {}
                    }
                }
            }
            for g in grow {
                if reach[y].insert(g) {
                    changed = true;
                }
            }
        }
        if !changed {
            return LeadsToRelation { reach };
        }
    }
}

/// Saturated structural facts about a transducer. Reachable stacks form the
/// layered language `{ y1..yk : y1 in start, y(i+1) in next(yi) }` (bottom to
/// top); liveness of a stack is decided by folding `collapse` from the top.
pub struct Saturation {
    pub leads: LeadsToRelation,
    /// Symbols reachable as the single element of a stack from the initial
    /// symbol.
    pub start: BTreeSet<StackSym>,
    /// `next[x]`: symbols that can sit directly on top of an `x`.
    pub next: Vec<BTreeSet<StackSym>>,
    /// Symbols occurring in any reachable stack.
    pub reachable_syms: BTreeSet<StackSym>,
    /// `lc` contains `(x, z)` iff there is a context `delta` with
    /// `delta x` reachable and `delta z` live.
    pub lc: BTreeSet<(StackSym, StackSym)>,
    /// pops indexed by (lower, top).
    pops: HashMap<(StackSym, StackSym), Vec<(usize, StackSym)>>,
    pops_by_lower: HashMap<StackSym, Vec<(usize, StackSym, StackSym)>>,
    x_final: StackSym,
}

impl Saturation {
    pub fn up(&self, set: &BTreeSet<StackSym>) -> BTreeSet<StackSym> {
        let mut out = BTreeSet::new();
        for &x in set {
            out.extend(self.leads.successors(x).iter().copied());
        }
        out
    }

    /// The possible results of popping `w` against a top part that can
    /// evolve to any member of `set`.
    pub fn collapse(&self, w: StackSym, set: &BTreeSet<StackSym>) -> BTreeSet<StackSym> {
        let ups = self.up(set);
        let mut out = BTreeSet::new();
        if let Some(list) = self.pops_by_lower.get(&w) {
            for &(_, top, target) in list {
                if ups.contains(&top) {
                    out.insert(target);
                }
            }
        }
        out
    }

    /// A stack (bottom to top) can still reach the completed configuration.
    pub fn is_live(&self, stack: &[StackSym]) -> bool {
        if stack.is_empty() {
            return false;
        }
        let mut set = BTreeSet::from([*stack.last().unwrap()]);
        for &w in stack[..stack.len() - 1].iter().rev() {
            set = self.collapse(w, &set);
            if set.is_empty() {
                return false;
            }
        }
        self.up(&set).contains(&self.x_final)
    }

    /// A stack (bottom to top) is reachable from the initial configuration.
    pub fn is_reachable(&self, stack: &[StackSym]) -> bool {
        if stack.is_empty() {
            return false;
        }
        if !self.start.contains(&stack[0]) {
            return false;
        }
        stack.windows(2).all(|w| self.next[w[0]].contains(&w[1]))
    }
}

pub fn saturate(pdt: &Pdt) -> Saturation {
    let n = pdt.symbols.len();
    let leads = leadsto_relation(pdt);
    let start: BTreeSet<StackSym> = leads.successors(pdt.x_init).clone();
    let mut next: Vec<BTreeSet<StackSym>> = vec![BTreeSet::new(); n];
    for t in &pdt.transitions {
        if let Transition::Push { top, pushed } = t {
            next[*top].extend(leads.successors(*pushed).iter().copied());
        }
    }
    let mut reachable_syms = start.clone();
    let mut agenda: Vec<StackSym> = reachable_syms.iter().copied().collect();
    while let Some(x) = agenda.pop() {
        for &y in &next[x] {
            if reachable_syms.insert(y) {
                agenda.push(y);
            }
        }
    }
    let mut pops: HashMap<(StackSym, StackSym), Vec<(usize, StackSym)>> = HashMap::new();
    let mut pops_by_lower: HashMap<StackSym, Vec<(usize, StackSym, StackSym)>> = HashMap::new();
    for (i, t) in pdt.transitions.iter().enumerate() {
        if let Transition::Pop { lower, top, target } = t {
            pops.entry((*lower, *top)).or_default().push((i, *target));
            pops_by_lower
                .entry(*lower)
                .or_default()
                .push((i, *top, *target));
        }
    }
    let mut sat = Saturation {
        leads,
        start,
        next,
        reachable_syms,
        lc: BTreeSet::new(),
        pops,
        pops_by_lower,
        x_final: pdt.x_final,
    };
    // lc fixpoint: base (x, z) for x in start with z leading to x_final;
    // step: from lc(w, v), any x that can sit on w pairs with any z that can
    // evolve to a top z'' popping with w to v.
    let mut lc: BTreeSet<(StackSym, StackSym)> = BTreeSet::new();
    for &x in &sat.start {
        for z in 0..n {
            if sat.leads.holds(z, sat.x_final) {
                lc.insert((x, z));
            }
        }
    }
    loop {
        let mut added = Vec::new();
        for &(w, v) in &lc {
            for z in 0..n {
                // does z evolve to some z'' with pop (w, z'') -> v?
                let can = sat.leads.successors(z).iter().any(|&z2| {
                    sat.pops
                        .get(&(w, z2))
                        .map(|l| l.iter().any(|&(_, tgt)| tgt == v))
                        .unwrap_or(false)
                });
                if can {
                    for &x in &sat.next[w] {
                        if !lc.contains(&(x, z)) {
                            added.push((x, z));
                        }
                    }
                }
            }
        }
        if added.is_empty() {
            break;
        }
        lc.extend(added);
    }
    sat.lc = lc;
    sat
}

/// Indices of transitions that occur in at least one complete computation
/// (over some input string).
pub fn usable_transitions(pdt: &Pdt) -> BTreeSet<usize> {
    let sat = saturate(pdt);
    let mut usable = BTreeSet::new();
    for (i, t) in pdt.transitions.iter().enumerate() {
        let ok = match t {
            Transition::Swap { from, to, .. } => sat.lc.contains(&(*from, *to)),
            Transition::Push { top, pushed } => {
                let targets = sat.collapse(*top, &BTreeSet::from([*pushed]));
                targets.iter().any(|&z| sat.lc.contains(&(*top, z)))
            }
            Transition::Pop { lower, top, target } => {
                sat.next[*lower].contains(top) && sat.lc.contains(&(*lower, *target))
            }
        };
        if ok {
            usable.insert(i);
        }
    }
    usable
}

/// A nondeterministic finite automaton over stack symbols; stacks are read
/// from the top down. Used to describe the reachable-stack and live-stack
/// languages.
#[derive(Clone, Debug)]
pub struct SurfaceAutomaton {
    pub n_states: usize,
    pub initial: BTreeSet<usize>,
    pub accepting: BTreeSet<usize>,
    pub edges: Vec<BTreeMap<StackSym, BTreeSet<usize>>>,
}

impl SurfaceAutomaton {
    /// Membership of a stack, given bottom-to-top (read top-down).
    pub fn accepts(&self, stack_bottom_to_top: &[StackSym]) -> bool {
        let mut states = self.initial.clone();
        for &sym in stack_bottom_to_top.iter().rev() {
            let mut next = BTreeSet::new();
            for &q in &states {
                if let Some(s) = self.edges[q].get(&sym) {
                    next.extend(s.iter().copied());
                }
            }
            states = next;
            if states.is_empty() {
                return false;
            }
        }
        states.iter().any(|q| self.accepting.contains(q))
    }

    /// A word accepted by `self` but not by `other` (which must be
    /// deterministic: at most one initial state and one successor per edge).
    /// Words are stacks given bottom-to-top. Returns `None` when contained.
    pub fn containment_counterexample(&self, other: &SurfaceAutomaton) -> Option<Vec<StackSym>> {
        assert!(other.initial.len() <= 1);
        let dead = usize::MAX; // implicit rejecting sink of `other`
        let start_o = other.initial.iter().copied().next().unwrap_or(dead);
        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut queue: VecDeque<(usize, usize, Vec<StackSym>)> = VecDeque::new();
        for &q in &self.initial {
            if self.accepting.contains(&q)
                && !(start_o != dead && other.accepting.contains(&start_o))
            {
                return Some(Vec::new());
            }
            if seen.insert((q, start_o)) {
                queue.push_back((q, start_o, Vec::new()));
            }
        }
        while let Some((q, o, word)) = queue.pop_front() {
            for (&sym, succs) in &self.edges[q] {
                let no = if o == dead {
                    dead
                } else {
                    other.edges[o]
                        .get(&sym)
                        .and_then(|s| s.iter().copied().next())
                        .unwrap_or(dead)
                };
                for &nq in succs {
                    let mut w = word.clone();
                    // reading top-down means prepending at the bottom
                    w.insert(0, sym);
                    let o_accepts = no != dead && other.accepting.contains(&no);
                    if self.accepting.contains(&nq) && !o_accepts {
                        return Some(w);
                    }
                    if seen.insert((nq, no)) {
                        queue.push_back((nq, no, w));
                    }
                }
            }
        }
        None
    }
}

/// The automaton of reachable stacks (read top-down).
pub fn reachable_stack_automaton(pdt: &Pdt, sat: &Saturation) -> SurfaceAutomaton {
    let n = pdt.symbols.len();
    // state q_y = n-many, plus initial state n
    let mut edges: Vec<BTreeMap<StackSym, BTreeSet<usize>>> = vec![BTreeMap::new(); n + 1];
    for &y in &sat.reachable_syms {
        edges[n].entry(y).or_default().insert(y);
    }
    for (y, edge) in edges.iter_mut().enumerate().take(n) {
        for w in 0..n {
            // reading downward: from having read y, read the symbol w below
            // it; allowed when y can sit on top of w.
            if sat.next[w].contains(&y)
                && sat.reachable_syms.contains(&y)
                && sat.reachable_syms.contains(&w)
            {
                edge.entry(w).or_default().insert(w);
            }
        }
    }
    SurfaceAutomaton {
        n_states: n + 1,
        initial: BTreeSet::from([n]),
        accepting: sat.start.clone(),
        edges,
    }
}

/// The (deterministic) automaton of live stacks (read top-down), built by the
/// subset fold: reading the top symbol `y` enters `{y}`, reading `w` below
/// set `S` enters `collapse(w, S)`, and a full stack is accepted when the
/// final symbol is in the upward closure of the last set.
pub fn live_stack_automaton(pdt: &Pdt, sat: &Saturation) -> SurfaceAutomaton {
    let n = pdt.symbols.len();
    let mut sets: Vec<BTreeSet<StackSym>> = Vec::new();
    let mut index: BTreeMap<BTreeSet<StackSym>, usize> = BTreeMap::new();
    let mut edges_sets: Vec<BTreeMap<StackSym, usize>> = Vec::new();
    let mut agenda: Vec<usize> = Vec::new();
    let mut intern = |s: BTreeSet<StackSym>,
                      sets: &mut Vec<BTreeSet<StackSym>>,
                      edges_sets: &mut Vec<BTreeMap<StackSym, usize>>,
                      agenda: &mut Vec<usize>|
     -> usize {
        if let Some(&i) = index.get(&s) {
            return i;
        }
        let i = sets.len();
        index.insert(s.clone(), i);
        sets.push(s);
        edges_sets.push(BTreeMap::new());
        agenda.push(i);
        i
    };
    // seed states {y}
    let mut first: BTreeMap<StackSym, usize> = BTreeMap::new();
    for y in 0..n {
        let i = intern(BTreeSet::from([y]), &mut sets, &mut edges_sets, &mut agenda);
        first.insert(y, i);
    }
    while let Some(i) = agenda.pop() {
        for w in 0..n {
            let s = sat.collapse(w, &sets[i].clone());
            let j = intern(s, &mut sets, &mut edges_sets, &mut agenda);
            edges_sets[i].insert(w, j);
        }
    }
    // assemble: one initial state feeding into the singleton states
    let n_sets = sets.len();
    let init = n_sets;
    let mut edges: Vec<BTreeMap<StackSym, BTreeSet<usize>>> = vec![BTreeMap::new(); n_sets + 1];
    for (i, row) in edges_sets.iter().enumerate() {
        for (&sym, &j) in row {
            edges[i].entry(sym).or_default().insert(j);
        }
    }
    for (&y, &i) in &first {
        edges[init].entry(y).or_default().insert(i);
    }
    let accepting: BTreeSet<usize> = sets
        .iter()
        .enumerate()
        .filter(|(_, s)| sat.up(s).contains(&pdt.x_final))
        .map(|(i, _)| i)
        .collect();
    SurfaceAutomaton {
        n_states: n_sets + 1,
        initial: BTreeSet::from([init]),
        accepting,
        edges,
    }
}

/// A computation that has entered a dead stack: all proper prefixes of the
/// run pass through live stacks only.
#[derive(Clone, Debug)]
pub struct DeadWitness {
    pub computation: Computation,
    /// Input consumed along the witness run.
    pub input: Vec<String>,
    /// The dead stack reached (bottom to top).
    pub dead_stack: Vec<StackSym>,
}

#[derive(Clone, Debug)]
pub struct CppReport {
    pub holds: bool,
    /// A dead stack in the reachable language, if any (bottom to top).
    pub dead_stack: Option<Vec<StackSym>>,
    pub witness: Option<DeadWitness>,
}

/// The completed-path property: every reachable stack is live. Decided by
/// containment of the reachable-stack automaton in the live-stack automaton;
/// on failure a shortest witness computation into a dead stack is searched
/// breadth-first up to `bound` steps (default `10 * |symbols|`).
pub fn check_cpp(pdt: &Pdt, bound: Option<usize>) -> Result<CppReport, PropertiesError> {
    let sat = saturate(pdt);
    let counter = post_minus_live_counterexample(pdt, &sat);
    match counter {
        None => Ok(CppReport {
            holds: true,
            dead_stack: None,
            witness: None,
        }),
        Some(dead) => {
            let bound = bound.unwrap_or(10 * pdt.symbols.len());
            match shortest_dead_computation(pdt, &sat, bound) {
                Some(witness) => Ok(CppReport {
                    holds: false,
                    dead_stack: Some(dead),
                    witness: Some(witness),
                }),
                None => Err(PropertiesError::WitnessSearchExhausted { bound }),
            }
        }
    }
}

/// Containment of the reachable-stack language in the live-stack language,
/// checked on the surface automata (the live automaton is deterministic).
pub fn post_contained_in_pre(post: &SurfaceAutomaton, pre: &SurfaceAutomaton) -> bool {
    post.containment_counterexample(pre).is_none()
}

/// Direct product search for a reachable-but-dead stack (bottom to top).
fn post_minus_live_counterexample(pdt: &Pdt, sat: &Saturation) -> Option<Vec<StackSym>> {
    // states: (top-layer symbol y, fold set S); grow downward.
    let mut seen: BTreeSet<(StackSym, BTreeSet<StackSym>)> = BTreeSet::new();
    let mut queue: VecDeque<(StackSym, BTreeSet<StackSym>, Vec<StackSym>)> = VecDeque::new();
    for &y in &sat.reachable_syms {
        let s = BTreeSet::from([y]);
        if seen.insert((y, s.clone())) {
            queue.push_back((y, s, vec![y]));
        }
    }
    while let Some((y, s, stack)) = queue.pop_front() {
        if sat.start.contains(&y) && !sat.up(&s).contains(&pdt.x_final) {
            return Some(stack);
        }
        for w in 0..pdt.symbols.len() {
            if sat.next[w].contains(&y) && sat.reachable_syms.contains(&w) {
                let ns = sat.collapse(w, &s);
                if seen.insert((w, ns.clone())) {
                    let mut nstack = stack.clone();
                    nstack.insert(0, w);
                    queue.push_back((w, ns, nstack));
                }
            }
        }
    }
    None
}

/// Breadth-first search for a shortest computation entering a dead stack.
fn shortest_dead_computation(pdt: &Pdt, sat: &Saturation, bound: usize) -> Option<DeadWitness> {
    #[derive(Clone)]
    struct Node {
        stack: Vec<StackSym>,
        steps: Vec<usize>,
        input: Vec<String>,
    }
    if !sat.is_live(&[pdt.x_init]) {
        // the initial stack itself is dead
        return Some(DeadWitness {
            computation: Computation { steps: vec![] },
            input: vec![],
            dead_stack: vec![pdt.x_init],
        });
    }
    let mut seen: BTreeSet<Vec<StackSym>> = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(vec![pdt.x_init]);
    queue.push_back(Node {
        stack: vec![pdt.x_init],
        steps: vec![],
        input: vec![],
    });
    while let Some(node) = queue.pop_front() {
        if node.steps.len() >= bound {
            continue;
        }
        let top = match node.stack.last() {
            Some(&t) => t,
            None => continue,
        };
        for &ix in pdt.transitions_from(top) {
            // scans consume a chosen input letter: any letter is available
            let (nstack, letter) = match &pdt.transitions[ix] {
                Transition::Swap { input, .. } => {
                    let mut s = node.stack.clone();
                    if let Transition::Swap { to, .. } = &pdt.transitions[ix] {
                        *s.last_mut().unwrap() = *to;
                    }
                    (s, input.clone())
                }
                Transition::Push { pushed, .. } => {
                    let mut s = node.stack.clone();
                    s.push(*pushed);
                    (s, None)
                }
                Transition::Pop { lower, target, .. } => {
                    let k = node.stack.len();
                    if k < 2 || node.stack[k - 2] != *lower {
                        continue;
                    }
                    let mut s = node.stack[..k - 2].to_vec();
                    s.push(*target);
                    (s, None)
                }
            };
            let mut steps = node.steps.clone();
            steps.push(ix);
            let mut input = node.input.clone();
            if let Some(a) = letter {
                input.push(a);
            }
            if !sat.is_live(&nstack) {
                return Some(DeadWitness {
                    computation: Computation { steps },
                    input,
                    dead_stack: nstack,
                });
            }
            if seen.insert(nstack.clone()) {
                queue.push_back(Node {
                    stack: nstack,
                    steps,
                    input,
                });
            }
        }
    }
    None
}

#[derive(Clone, Debug)]
pub struct SppViolation {
    pub push: usize,
    pub pop_a: usize,
    pub pop_b: usize,
}

#[derive(Clone, Debug)]
pub struct SppReport {
    pub holds: bool,
    pub violations: Vec<SppViolation>,
}

/// The single-pop-target property: for every push `X -> X Y`, all pops
/// `X Y' -> Z` with `Y` leading to `Y'` agree on `Z`.
pub fn check_spp(pdt: &Pdt) -> SppReport {
    let leads = leadsto_relation(pdt);
    let mut violations = Vec::new();
    for (i, t) in pdt.transitions.iter().enumerate() {
        if let Transition::Push { top, pushed } = t {
            let mut by_target: BTreeMap<StackSym, usize> = BTreeMap::new();
            for (j, t2) in pdt.transitions.iter().enumerate() {
                if let Transition::Pop { lower, top: t2top, target } = t2 {
                    if lower == top && leads.holds(*pushed, *t2top) {
                        if let Some(&prev) = by_target.get(target) {
                            let _ = prev;
                        } else {
                            by_target.insert(*target, j);
                        }
                    }
                }
            }
            if by_target.len() > 1 {
                let mut it = by_target.values();
                let a = *it.next().unwrap();
                let b = *it.next().unwrap();
                violations.push(SppViolation {
                    push: i,
                    pop_a: a,
                    pop_b: b,
                });
            }
        }
    }
    SppReport {
        holds: violations.is_empty(),
        violations,
    }
}

#[derive(Clone, Debug)]
pub struct MassReport {
    /// Probability mass of complete computations within the step bound.
    pub complete_mass: Value,
    /// Mass of shortest dead computations within the step bound.
    pub dead_mass: Value,
    /// complete + dead; at most one for any proper transducer.
    pub total: Value,
    pub within_bound: bool,
}

/// Sum the probability of all complete computations and all shortest dead
/// computations of at most `max_steps` transitions, over all input strings.
/// For a proper probability assignment this partial sum never exceeds one.
pub fn check_mass_bound(ppdt: &Ppdt, max_steps: usize) -> MassReport {
    let pdt = &ppdt.pdt;
    let sat = saturate(pdt);
    let mut complete = Value::zero();
    let mut dead = Value::zero();
    // dynamic programming over live stacks; the consumed input itself is
    // irrelevant because scans are unconstrained when summing over all inputs
    let mut mass: BTreeMap<Vec<StackSym>, Value> = BTreeMap::new();
    let init = vec![pdt.x_init];
    if sat.is_live(&init) {
        mass.insert(init, Value::one());
    } else {
        dead = Value::one();
    }
    let mut leftover = false;
    for _ in 0..max_steps {
        let mut next: BTreeMap<Vec<StackSym>, Value> = BTreeMap::new();
        for (stack, m) in &mass {
            if stack.len() == 1 && stack[0] == pdt.x_final {
                complete = complete.add(m);
                continue;
            }
            let top = *stack.last().unwrap();
            for &ix in pdt.transitions_from(top) {
                let nstack = match &pdt.transitions[ix] {
                    Transition::Swap { to, .. } => {
                        let mut s = stack.clone();
                        *s.last_mut().unwrap() = *to;
                        s
                    }
                    Transition::Push { pushed, .. } => {
                        let mut s = stack.clone();
                        s.push(*pushed);
                        s
                    }
                    Transition::Pop { lower, target, .. } => {
                        let k = stack.len();
                        if k < 2 || stack[k - 2] != *lower {
                            continue;
                        }
                        let mut s = stack[..k - 2].to_vec();
                        s.push(*target);
                        s
                    }
                };
                let dm = m.mul(&ppdt.probs[ix]);
                if sat.is_live(&nstack) {
                    let e = next.entry(nstack).or_insert_with(Value::zero);
                    *e = e.add(&dm);
                } else {
                    dead = dead.add(&dm);
                }
            }
        }
        mass = next;
        if mass.is_empty() {
            break;
        }
    }
    // configurations surviving at the bound: count completed ones, flag the
    // rest as in-flight mass
    for (stack, m) in &mass {
        if stack.len() == 1 && stack[0] == pdt.x_final {
            complete = complete.add(m);
        } else {
            leftover = true;
        }
    }
    MassReport {
        total: complete.add(&dead),
        complete_mass: complete,
        dead_mass: dead,
        within_bound: !leftover,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{OutSym, PdtBuilder};

    /// A tiny hand-built transducer: init I pushes A, A swaps reading `a`
    /// to B, pop (I', B) -> F.
    fn toy() -> Pdt {
        let mut b = PdtBuilder::new();
        let i = b.sym("I");
        let ip = b.sym("Ip");
        let a = b.sym("A");
        let bb = b.sym("B");
        let f = b.sym("F");
        b.swap(i, None, vec![], ip);
        b.push(ip, a);
        b.swap(a, Some("a"), vec![OutSym::Rule("r".into())], bb);
        b.pop(ip, bb, f);
        b.finalize(i, f)
    }

    #[test]
    fn leadsto_and_liveness() {
        let pdt = toy();
        let sym = |n: &str| pdt.symbols.iter().position(|s| s == n).unwrap();
        let leads = leadsto_relation(&pdt);
        assert!(leads.holds(sym("I"), sym("F")));
        assert!(leads.holds(sym("Ip"), sym("F")));
        assert!(leads.holds(sym("A"), sym("B")));
        assert!(!leads.holds(sym("A"), sym("F")));

        let sat = saturate(&pdt);
        assert!(sat.is_live(&[sym("I")]));
        assert!(sat.is_live(&[sym("Ip"), sym("A")]));
        assert!(sat.is_reachable(&[sym("Ip"), sym("B")]));
        assert!(!sat.is_reachable(&[sym("A"), sym("B")]));
    }

    #[test]
    fn surface_automata_describe_stacks() {
        let pdt = toy();
        let sym = |n: &str| pdt.symbols.iter().position(|s| s == n).unwrap();
        let sat = saturate(&pdt);
        let post = reachable_stack_automaton(&pdt, &sat);
        let pre = live_stack_automaton(&pdt, &sat);
        assert!(post.accepts(&[sym("I")]));
        assert!(post.accepts(&[sym("Ip"), sym("A")]));
        assert!(!post.accepts(&[sym("A"), sym("Ip")]));
        assert!(pre.accepts(&[sym("Ip"), sym("A")]));
        assert!(pre.accepts(&[sym("F")]));
        assert!(!pre.accepts(&[sym("B")]));
        // containment agrees with the completed-path verdict
        assert!(post_contained_in_pre(&post, &pre));
    }

    #[test]
    fn cpp_holds_on_toy_and_fails_with_dead_push() {
        let pdt = toy();
        let rep = check_cpp(&pdt, None).unwrap();
        assert!(rep.holds);

        // add a push into a symbol with no continuation: dead stack
        let mut b = PdtBuilder::new();
        let i = b.sym("I");
        let ip = b.sym("Ip");
        let a = b.sym("A");
        let bb = b.sym("B");
        let f = b.sym("F");
        let dead_sym = b.sym("DEAD");
        b.swap(i, None, vec![], ip);
        b.push(ip, a);
        b.push(ip, dead_sym);
        b.swap(a, Some("a"), vec![], bb);
        b.pop(ip, bb, f);
        let pdt2 = b.finalize(i, f);
        let rep2 = check_cpp(&pdt2, None).unwrap();
        assert!(!rep2.holds);
        let w = rep2.witness.unwrap();
        // shortest witness: bridge swap + dead push = 2 steps
        assert_eq!(w.computation.steps.len(), 2);
        assert_eq!(w.dead_stack.len(), 2);
    }

    #[test]
    fn trim_removes_dead_push() {
        let mut b = PdtBuilder::new();
        let i = b.sym("I");
        let ip = b.sym("Ip");
        let a = b.sym("A");
        let bb = b.sym("B");
        let f = b.sym("F");
        let dead_sym = b.sym("DEAD");
        b.swap(i, None, vec![], ip);
        b.push(ip, a);
        b.push(ip, dead_sym);
        b.swap(a, Some("a"), vec![], bb);
        b.pop(ip, bb, f);
        let pdt = b.finalize(i, f);
        assert!(!crate::automaton::is_reduced_pdt(&pdt));
        let trimmed = crate::automaton::trim_pdt(&pdt).unwrap();
        assert!(crate::automaton::is_reduced_pdt(&trimmed));
        assert_eq!(trimmed.transitions.len(), 4);
        assert!(!trimmed.symbols.iter().any(|s| s == "DEAD"));
        // trimming the trimmed automaton changes nothing
        let again = crate::automaton::trim_pdt(&trimmed).unwrap();
        assert_eq!(again, trimmed);
        // cpp holds after trimming
        assert!(check_cpp(&trimmed, None).unwrap().holds);
    }

    #[test]
    fn spp_distinguishes_unique_and_ambiguous_pop_targets() {
        let pdt = toy();
        assert!(check_spp(&pdt).holds);

        let mut b = PdtBuilder::new();
        let i = b.sym("I");
        let ip = b.sym("Ip");
        let a = b.sym("A");
        let b1 = b.sym("B1");
        let b2 = b.sym("B2");
        let f = b.sym("F");
        let g = b.sym("G");
        b.swap(i, None, vec![], ip);
        b.push(ip, a);
        b.swap(a, Some("x"), vec![], b1);
        b.swap(a, Some("y"), vec![], b2);
        b.pop(ip, b1, f);
        b.pop(ip, b2, g);
        b.swap(g, None, vec![], f);
        let pdt2 = b.finalize(i, f);
        let rep = check_spp(&pdt2);
        assert!(!rep.holds);
        assert_eq!(rep.violations.len(), 1);
    }

    #[test]
    fn mass_bound_on_toy() {
        let pdt = toy();
        let probs = vec![Value::one(); pdt.transitions.len()];
        let ppdt = Ppdt::new(pdt, probs).unwrap();
        let rep = check_mass_bound(&ppdt, 10);
        assert_eq!(rep.total, Value::one());
        assert_eq!(rep.dead_mass, Value::zero());
        assert!(rep.within_bound);
    }
}
