//! Dynamic-programming simulation of probabilistic push-down transducers:
//! table items, their probabilities, string probabilities, and prefix
//! probabilities.

use std::collections::BTreeMap;

use crate::automaton::{Pdt, Ppdt, StackSym, Transition};
use crate::numeric::{NonConvergence, PolySystem, Value};

#[derive(Debug, thiserror::Error, Clone)]
pub enum PrefixError {
    #[error("transducer is not in normal form; normalize it first")]
    NotNormalized,
    #[error("item probabilities did not converge: {0}")]
    NonConvergence(#[from] NonConvergence),
    #[error("mixed scan behaviour on stack symbols {0}: each symbol must read terminals on all of its swaps or on none")]
    ScanUniformityViolation(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ItemKind {
    Forward,
    Inner,
}

/// A table item `forward(X, Y, i, j)` or `inner(X, Y, i, j)`: some
/// computation puts `Y` on top of `X` with the input between positions `i`
/// and `j` consumed. A `lower` of `None` is the imaginary stack symbol below
/// the bottom-of-stack element; it occurs only in forward items with `i = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TableItem {
    pub kind: ItemKind,
    pub lower: Option<StackSym>,
    pub upper: StackSym,
    pub i: usize,
    pub j: usize,
}

impl TableItem {
    fn forward(lower: Option<StackSym>, upper: StackSym, i: usize, j: usize) -> TableItem {
        TableItem {
            kind: ItemKind::Forward,
            lower,
            upper,
            i,
            j,
        }
    }

    fn inner(lower: StackSym, upper: StackSym, i: usize, j: usize) -> TableItem {
        TableItem {
            kind: ItemKind::Inner,
            lower: Some(lower),
            upper,
            i,
            j,
        }
    }

    pub fn render(&self, pdt: &Pdt) -> String {
        let kind = match self.kind {
            ItemKind::Forward => "forward",
            ItemKind::Inner => "inner",
        };
        let lower = match self.lower {
            Some(x) => pdt.symbols[x].clone(),
            None => "_".to_string(),
        };
        format!(
            "{kind}({lower}, {}, {}, {})",
            pdt.symbols[self.upper], self.i, self.j
        )
    }
}

/// The parse table: every derivable item stored once, with (after solving)
/// the sum of probabilities over all of its derivations.
#[derive(Clone, Debug)]
pub struct ItemTable {
    pub input: Vec<String>,
    pub items: Vec<TableItem>,
    index: BTreeMap<TableItem, usize>,
    /// Empty until `solve_item_probabilities` has run.
    pub probs: Vec<Value>,
}

impl ItemTable {
    pub fn contains(&self, item: &TableItem) -> bool {
        self.index.contains_key(item)
    }

    pub fn probability(&self, item: &TableItem) -> Value {
        match self.index.get(item) {
            Some(&ix) if ix < self.probs.len() => self.probs[ix].clone(),
            _ => Value::zero(),
        }
    }
}

/// Derive the least item set closed under the deduction rules: the initial
/// forward item, an inner item at every position for every push transition,
/// and the push/scan/pop closure of both kinds.
pub fn derive_items(pdt: &Pdt, input: &[String]) -> ItemTable {
    let n = input.len();
    let mut items: Vec<TableItem> = Vec::new();
    let mut index: BTreeMap<TableItem, usize> = BTreeMap::new();
    let mut agenda: Vec<usize> = Vec::new();
    // Combination indices for the pop rules: forward items by (upper, j),
    // inner items by (lower, i) and by (upper, j).
    let mut pops_by_pair: BTreeMap<(StackSym, StackSym), Vec<StackSym>> = BTreeMap::new();
    for t in &pdt.transitions {
        if let Transition::Pop { lower, top, target } = t {
            pops_by_pair
                .entry((*lower, *top))
                .or_default()
                .push(*target);
        }
    }

    struct Indices {
        fwd_by_upper: BTreeMap<(StackSym, usize), Vec<usize>>,
        inn_by_lower: BTreeMap<(StackSym, usize), Vec<usize>>,
        inn_by_upper: BTreeMap<(StackSym, usize), Vec<usize>>,
    }
    let mut idx = Indices {
        fwd_by_upper: BTreeMap::new(),
        inn_by_lower: BTreeMap::new(),
        inn_by_upper: BTreeMap::new(),
    };

    fn add(
        item: TableItem,
        items: &mut Vec<TableItem>,
        index: &mut BTreeMap<TableItem, usize>,
        agenda: &mut Vec<usize>,
        idx: &mut Indices,
    ) {
        if index.contains_key(&item) {
            return;
        }
        let ix = items.len();
        items.push(item);
        index.insert(item, ix);
        agenda.push(ix);
        match item.kind {
            ItemKind::Forward => {
                idx.fwd_by_upper
                    .entry((item.upper, item.j))
                    .or_default()
                    .push(ix);
            }
            ItemKind::Inner => {
                idx.inn_by_lower
                    .entry((item.lower.unwrap(), item.i))
                    .or_default()
                    .push(ix);
                idx.inn_by_upper
                    .entry((item.upper, item.j))
                    .or_default()
                    .push(ix);
            }
        }
    }

    add(
        TableItem::forward(None, pdt.x_init, 0, 0),
        &mut items,
        &mut index,
        &mut agenda,
        &mut idx,
    );
    // The inner push rule has no antecedents: every push transition yields
    // an inner item at every input position.
    for t in &pdt.transitions {
        if let Transition::Push { top, pushed } = t {
            for j in 0..=n {
                add(
                    TableItem::inner(*top, *pushed, j, j),
                    &mut items,
                    &mut index,
                    &mut agenda,
                    &mut idx,
                );
            }
        }
    }

    while let Some(ix) = agenda.pop() {
        let item = items[ix];
        let mut consequents: Vec<TableItem> = Vec::new();
        for &tix in pdt.transitions_from(item.upper) {
            match &pdt.transitions[tix] {
                Transition::Push { pushed, .. } => {
                    // Forward items spawn a forward item for the pushed
                    // symbol; inner push items are already seeded above.
                    if item.kind == ItemKind::Forward {
                        consequents.push(TableItem::forward(
                            Some(item.upper),
                            *pushed,
                            item.j,
                            item.j,
                        ));
                    }
                }
                Transition::Swap { input: x, to, .. } => {
                    let jp = match x {
                        None => Some(item.j),
                        Some(a) if item.j < n && input[item.j] == *a => Some(item.j + 1),
                        Some(_) => None,
                    };
                    if let Some(jp) = jp {
                        consequents.push(TableItem {
                            kind: item.kind,
                            lower: item.lower,
                            upper: *to,
                            i: item.i,
                            j: jp,
                        });
                    }
                }
                Transition::Pop { .. } => {}
            }
        }
        // Pop combinations: the item can be the left antecedent (its upper
        // symbol is the pop's lower symbol) or, for inner items, the right
        // antecedent.
        let rights: Vec<usize> = idx
            .inn_by_lower
            .get(&(item.upper, item.j))
            .cloned()
            .unwrap_or_default();
        for rix in rights {
            let right = items[rix];
            if let Some(targets) = pops_by_pair.get(&(right.lower.unwrap(), right.upper)) {
                for &z in targets {
                    consequents.push(TableItem {
                        kind: item.kind,
                        lower: item.lower,
                        upper: z,
                        i: item.i,
                        j: right.j,
                    });
                }
            }
        }
        if item.kind == ItemKind::Inner {
            if let Some(targets) = pops_by_pair.get(&(item.lower.unwrap(), item.upper)) {
                let mut lefts: Vec<usize> = idx
                    .fwd_by_upper
                    .get(&(item.lower.unwrap(), item.i))
                    .cloned()
                    .unwrap_or_default();
                lefts.extend(
                    idx.inn_by_upper
                        .get(&(item.lower.unwrap(), item.i))
                        .cloned()
                        .unwrap_or_default(),
                );
                for lix in lefts {
                    let left = items[lix];
                    for &z in targets {
                        consequents.push(TableItem {
                            kind: left.kind,
                            lower: left.lower,
                            upper: z,
                            i: left.i,
                            j: item.j,
                        });
                    }
                }
            }
        }
        for c in consequents {
            add(c, &mut items, &mut index, &mut agenda, &mut idx);
        }
    }

    ItemTable {
        input: input.to_vec(),
        items,
        index,
        probs: Vec::new(),
    }
}

/// Fill in the probability of every item: the sum over all of its
/// derivations of the product of the probabilities of the transitions used.
/// Each item's equation reads the deduction rules backwards; cyclic
/// dependencies are resolved by the least-fixpoint solver.
pub fn solve_item_probabilities(
    table: &ItemTable,
    ppdt: &Ppdt,
    tol: f64,
    max_iter: usize,
) -> Result<ItemTable, NonConvergence> {
    let pdt = &ppdt.pdt;
    let input = &table.input;
    let mut sys = PolySystem::new(table.items.len());

    // Transition lookups for the backward reading of each rule.
    let mut pushes_to: BTreeMap<StackSym, Vec<(StackSym, usize)>> = BTreeMap::new();
    let mut swaps_to: BTreeMap<StackSym, Vec<usize>> = BTreeMap::new();
    let mut pops_to: BTreeMap<StackSym, Vec<(StackSym, StackSym, usize)>> = BTreeMap::new();
    for (tix, t) in pdt.transitions.iter().enumerate() {
        match t {
            Transition::Push { top, pushed } => {
                pushes_to.entry(*pushed).or_default().push((*top, tix));
            }
            Transition::Swap { to, .. } => {
                swaps_to.entry(*to).or_default().push(tix);
            }
            Transition::Pop { lower, top, target } => {
                pops_to.entry(*target).or_default().push((*lower, *top, tix));
            }
        }
    }
    let mut by_upper_j: BTreeMap<(ItemKind, StackSym, usize), Vec<usize>> = BTreeMap::new();
    for (ix, item) in table.items.iter().enumerate() {
        by_upper_j
            .entry((item.kind, item.upper, item.j))
            .or_default()
            .push(ix);
    }

    for (ix, item) in table.items.iter().enumerate() {
        match item.kind {
            ItemKind::Forward => {
                if item.lower.is_none()
                    && item.upper == pdt.x_init
                    && item.i == 0
                    && item.j == 0
                {
                    sys.add(ix, Value::one(), vec![]);
                }
                // A push placed `upper` on `lower` at position i = j; any
                // forward item ending with `lower` on top at position i
                // is an antecedent.
                if item.i == item.j {
                    if let Some(lower) = item.lower {
                        for (top, tix) in pushes_to.get(&item.upper).into_iter().flatten() {
                            if *top != lower {
                                continue;
                            }
                            for &ant in by_upper_j
                                .get(&(ItemKind::Forward, lower, item.i))
                                .into_iter()
                                .flatten()
                            {
                                sys.add(ix, ppdt.probs[*tix].clone(), vec![ant]);
                            }
                        }
                    }
                }
            }
            ItemKind::Inner => {
                if item.i == item.j {
                    let lower = item.lower.unwrap();
                    for (top, tix) in pushes_to.get(&item.upper).into_iter().flatten() {
                        if *top == lower {
                            sys.add(ix, ppdt.probs[*tix].clone(), vec![]);
                        }
                    }
                }
            }
        }
        // Scan: a swap into `upper`, reading either nothing (same j) or the
        // input symbol at position j.
        for &tix in swaps_to.get(&item.upper).into_iter().flatten() {
            if let Transition::Swap { from, input: x, .. } = &pdt.transitions[tix] {
                let jp = match x {
                    None => Some(item.j),
                    Some(a) if item.j >= 1 && input[item.j - 1] == *a => Some(item.j - 1),
                    Some(_) => None,
                };
                if let Some(jp) = jp {
                    let ant = TableItem {
                        kind: item.kind,
                        lower: item.lower,
                        upper: *from,
                        i: item.i,
                        j: jp,
                    };
                    if let Some(&aix) = table.index.get(&ant) {
                        sys.add(ix, ppdt.probs[tix].clone(), vec![aix]);
                    }
                }
            }
        }
        // Pop: a left antecedent of the same kind reaching the pop's lower
        // symbol at some k, and an inner right antecedent from k to j.
        for (lower, top, tix) in pops_to.get(&item.upper).into_iter().flatten() {
            for k in item.i..=item.j {
                let left = TableItem {
                    kind: item.kind,
                    lower: item.lower,
                    upper: *lower,
                    i: item.i,
                    j: k,
                };
                let right = TableItem::inner(*lower, *top, k, item.j);
                if let (Some(&lix), Some(&rix)) =
                    (table.index.get(&left), table.index.get(&right))
                {
                    sys.add(ix, ppdt.probs[*tix].clone(), vec![lix, rix]);
                }
            }
        }
    }

    let probs = sys.solve(tol, max_iter)?;
    let mut solved = table.clone();
    solved.probs = probs;
    Ok(solved)
}

/// Probability assigned by the transducer to the input string: the
/// probability of the forward item that spans the whole input with the
/// final stack symbol on top of the imaginary bottom element.
pub fn string_probability_ppdt(
    ppdt: &Ppdt,
    input: &[String],
    tol: f64,
    max_iter: usize,
) -> Result<Value, PrefixError> {
    if !ppdt.pdt.is_normal_form() {
        return Err(PrefixError::NotNormalized);
    }
    let table = derive_items(&ppdt.pdt, input);
    let solved = solve_item_probabilities(&table, ppdt, tol, max_iter)?;
    Ok(solved.probability(&TableItem::forward(None, ppdt.pdt.x_final, 0, input.len())))
}

/// Report on whether each stack symbol reads terminals on all of its swap
/// transitions or on none of them. Mixing the two on one symbol would let a
/// computation be counted under several items in the prefix formula.
#[derive(Clone, Debug)]
pub struct ScanUniformityReport {
    pub holds: bool,
    pub mixed_symbols: Vec<String>,
}

pub fn check_scan_uniformity(pdt: &Pdt) -> ScanUniformityReport {
    let mut mixed_symbols = Vec::new();
    for sym in 0..pdt.symbols.len() {
        let mut reading = false;
        let mut silent = false;
        for &tix in pdt.transitions_from(sym) {
            if let Transition::Swap { input, .. } = &pdt.transitions[tix] {
                match input {
                    Some(_) => reading = true,
                    None => silent = true,
                }
            }
        }
        if reading && silent {
            mixed_symbols.push(pdt.symbols[sym].clone());
        }
    }
    ScanUniformityReport {
        holds: mixed_symbols.is_empty(),
        mixed_symbols,
    }
}

/// Total probability of all strings beginning with the given prefix: the
/// probability of the complete-computation item plus, for every forward item
/// spanning the prefix whose top symbol can scan a terminal, the full
/// forward mass of that item. Requires a proper and consistent transducer.
pub fn prefix_probability(
    ppdt: &Ppdt,
    input: &[String],
    tol: f64,
    max_iter: usize,
) -> Result<Value, PrefixError> {
    let pdt = &ppdt.pdt;
    if !pdt.is_normal_form() {
        return Err(PrefixError::NotNormalized);
    }
    let uniformity = check_scan_uniformity(pdt);
    if !uniformity.holds {
        return Err(PrefixError::ScanUniformityViolation(
            uniformity.mixed_symbols.join(", "),
        ));
    }
    let n = input.len();
    let table = derive_items(pdt, input);
    let solved = solve_item_probabilities(&table, ppdt, tol, max_iter)?;
    let mut scans_terminal = vec![false; pdt.symbols.len()];
    for t in &pdt.transitions {
        if let Transition::Swap {
            from,
            input: Some(_),
            ..
        } = t
        {
            scans_terminal[*from] = true;
        }
    }
    let mut total = solved.probability(&TableItem::forward(None, pdt.x_final, 0, n));
    for (ix, item) in solved.items.iter().enumerate() {
        if item.kind == ItemKind::Forward && item.j == n && scans_terminal[item.upper] {
            total = total.add(&solved.probs[ix]);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::enumerate_computations;
    use crate::fixtures::{pg_lr, pg_wr};
    use crate::lifting::lift;
    use crate::numeric::ratio;
    use crate::strategies::StrategyKind;

    const TOL: f64 = 1e-13;
    const ITERS: usize = 200_000;

    fn toks(s: &str) -> Vec<String> {
        if s.is_empty() {
            Vec::new()
        } else {
            s.split_whitespace().map(|t| t.to_string()).collect()
        }
    }

    fn lifted(kind: StrategyKind, wr: bool) -> Ppdt {
        let pcfg = if wr { pg_wr() } else { pg_lr() };
        lift(&pcfg, kind, TOL, ITERS).unwrap()
    }

    #[test]
    fn initial_item_is_always_present() {
        let ppdt = lifted(StrategyKind::TopDown, false);
        for input in [toks(""), toks("a x d b x c"), toks("z z")] {
            let table = derive_items(&ppdt.pdt, &input);
            assert!(table.contains(&TableItem::forward(None, ppdt.pdt.x_init, 0, 0)));
        }
    }

    #[test]
    fn final_item_tracks_language_membership() {
        let ppdt = lifted(StrategyKind::EpsLeftCorner, true);
        let accept = TableItem::forward(None, ppdt.pdt.x_final, 0, 1);
        let table = derive_items(&ppdt.pdt, &toks("b"));
        assert!(table.contains(&accept));
        let table = derive_items(&ppdt.pdt, &toks("z"));
        assert!(!table.contains(&accept));
    }

    #[test]
    fn string_probabilities_match_hand_computed_values() {
        let ppdt = lifted(StrategyKind::EpsLeftCorner, true);
        for (input, num, den) in [("b", 1, 3), ("c", 1, 6), ("a b", 1, 9), ("a a b", 1, 27)] {
            let p = string_probability_ppdt(&ppdt, &toks(input), TOL, ITERS).unwrap();
            assert!(
                p.approx_eq(&Value::Exact(ratio(num, den)), 1e-9),
                "p({input}) = {} expected {num}/{den}",
                p.render()
            );
        }
        let p = string_probability_ppdt(&ppdt, &toks("a a x"), TOL, ITERS).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn string_probability_is_exact_on_the_rational_path() {
        let ppdt = lifted(StrategyKind::TopDown, false);
        let p = string_probability_ppdt(&ppdt, &toks("a x d b x c"), TOL, ITERS).unwrap();
        assert_eq!(p.as_exact(), Some(&ratio(4, 9)));
    }

    #[test]
    fn string_probability_matches_computation_enumeration() {
        for kind in [
            StrategyKind::TopDown,
            StrategyKind::LeftCorner,
            StrategyKind::Plr,
        ] {
            let ppdt = lifted(kind, false);
            for input in ["a x c b x c", "a x d b x d", "a x c b x d"] {
                let toks = toks(input);
                let en = enumerate_computations(&ppdt.pdt, &toks, 400);
                let direct: Value = en
                    .complete
                    .iter()
                    .fold(Value::zero(), |acc, c| {
                        acc.add(&ppdt.computation_probability(c))
                    });
                let tabular = string_probability_ppdt(&ppdt, &toks, TOL, ITERS).unwrap();
                assert!(
                    tabular.approx_eq(&direct, 1e-12),
                    "{kind:?} on {input}: tabular {} direct {}",
                    tabular.render(),
                    direct.render()
                );
            }
        }
    }

    #[test]
    fn prefix_probabilities_match_geometric_series_oracle() {
        let ppdt = lifted(StrategyKind::EpsLeftCorner, true);
        let empty = prefix_probability(&ppdt, &toks(""), TOL, ITERS).unwrap();
        assert!(empty.approx_eq(&Value::one(), 1e-9), "got {}", empty.render());
        let a = prefix_probability(&ppdt, &toks("a"), TOL, ITERS).unwrap();
        assert!(
            a.approx_eq(&Value::Exact(ratio(1, 2)), 1e-9),
            "got {}",
            a.render()
        );
        // "a b" ends a string of the language: its prefix probability is its
        // string probability.
        let ab = prefix_probability(&ppdt, &toks("a b"), TOL, ITERS).unwrap();
        assert!(
            ab.approx_eq(&Value::Exact(ratio(1, 9)), 1e-9),
            "got {}",
            ab.render()
        );
    }

    #[test]
    fn prefix_probability_sums_all_continuations() {
        let ppdt = lifted(StrategyKind::TopDown, false);
        let p = prefix_probability(&ppdt, &toks("a x"), TOL, ITERS).unwrap();
        assert!(p.approx_eq(&Value::one(), 1e-9), "got {}", p.render());
        let p = prefix_probability(&ppdt, &toks("a x d b"), TOL, ITERS).unwrap();
        assert!(
            p.approx_eq(&Value::Exact(ratio(2, 3)), 1e-9),
            "got {}",
            p.render()
        );
    }

    #[test]
    fn prefix_probability_dominates_and_decreases() {
        let ppdt = lifted(StrategyKind::EpsLeftCorner, true);
        let mut prev = prefix_probability(&ppdt, &toks(""), TOL, ITERS).unwrap();
        for prefix in ["a", "a a", "a a b"] {
            let toks = toks(prefix);
            let pre = prefix_probability(&ppdt, &toks, TOL, ITERS).unwrap();
            let full = string_probability_ppdt(&ppdt, &toks, TOL, ITERS).unwrap();
            assert!(pre.to_f64() <= prev.to_f64() + 1e-12);
            assert!(full.to_f64() <= pre.to_f64() + 1e-12);
            prev = pre;
        }
    }

    #[test]
    fn scan_uniformity_holds_for_constructions_and_flags_mixed_symbols() {
        for kind in [
            StrategyKind::TopDown,
            StrategyKind::LeftCorner,
            StrategyKind::EpsLeftCorner,
        ] {
            let ppdt = lifted(kind, true);
            assert!(check_scan_uniformity(&ppdt.pdt).holds, "{kind:?}");
        }
        let mut b = crate::automaton::PdtBuilder::new();
        let i = b.sym("I");
        let m = b.sym("M");
        let f = b.sym("F");
        b.swap(i, Some("a"), vec![], m);
        b.swap(i, None, vec![], m);
        b.swap(m, None, vec![], f);
        let pdt = b.finalize(i, f);
        let report = check_scan_uniformity(&pdt);
        assert!(!report.holds);
        assert_eq!(report.mixed_symbols, vec!["I".to_string()]);
    }
}
