//! Probability values that are either exact rationals or floating-point
//! approximations, plus a hybrid solver for monotone polynomial fixpoint
//! systems (partition functions, item probabilities).

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;

pub type Rational = BigRational;

/// Build a rational from an integer numerator/denominator pair.
pub fn ratio(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// A probability (or weight): exact where possible, floating otherwise.
/// Any arithmetic that mixes the two degrades to floating point.
#[derive(Clone, Debug)]
pub enum Value {
    Exact(Rational),
    Approx(f64),
}

impl Value {
    pub fn zero() -> Self {
        Value::Exact(Rational::zero())
    }

    pub fn one() -> Self {
        Value::Exact(Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Value::Exact(Rational::from(BigInt::from(n)))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Exact(r) => r.is_zero(),
            Value::Approx(f) => *f == 0.0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Value::Approx(f) => *f,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Approx(_) => None,
        }
    }

    pub fn add(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a + b),
            _ => Value::Approx(self.to_f64() + other.to_f64()),
        }
    }

    pub fn sub(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a - b),
            _ => Value::Approx(self.to_f64() - other.to_f64()),
        }
    }

    pub fn mul(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a * b),
            _ => Value::Approx(self.to_f64() * other.to_f64()),
        }
    }

    pub fn div(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a / b),
            _ => Value::Approx(self.to_f64() / other.to_f64()),
        }
    }

    /// True when the two values agree within `tol` (exact pairs compare exactly).
    pub fn approx_eq(&self, other: &Value, tol: f64) -> bool {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a == b,
            _ => (self.to_f64() - other.to_f64()).abs() <= tol,
        }
    }

    /// Render exactly as `p/q` when rational, otherwise with 12 significant
    /// digits and an `approx` tag.
    pub fn render(&self) -> String {
        match self {
            Value::Exact(r) => {
                if r.denom().is_one() {
                    format!("{}", r.numer())
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            Value::Approx(f) => format!("{:.*e} approx", 11, f),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a == b,
            _ => self.to_f64() == other.to_f64(),
        }
    }
}

/// Parse a probability literal: `p/q` or a decimal. Decimals with a finite
/// representation are kept exact.
pub fn parse_value(text: &str) -> Option<Value> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Value::Exact(BigRational::new(n, d)));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        let digits = format!("{}{}", whole, frac);
        let n: BigInt = digits.parse().ok()?;
        let d = BigInt::from(10u32).pow(frac.len() as u32);
        return Some(Value::Exact(BigRational::new(n, d)));
    }
    let n: BigInt = text.parse().ok()?;
    Some(Value::Exact(BigRational::from(n)))
}

/// One monomial of a polynomial right-hand side: `coefficient * prod(vars)`.
#[derive(Clone, Debug)]
pub struct Monomial {
    pub coeff: Value,
    pub vars: Vec<usize>,
}

/// A system x_i = sum of monomials over the x_j, to be solved for the least
/// non-negative fixpoint.
#[derive(Clone, Debug, Default)]
pub struct PolySystem {
    pub equations: Vec<Vec<Monomial>>,
}

#[derive(Debug, thiserror::Error, Clone)]
#[error("fixpoint iteration did not converge within {max_iter} iterations (last delta {last_delta:.3e})")]
pub struct NonConvergence {
    pub max_iter: usize,
    pub last_delta: f64,
}

impl PolySystem {
    pub fn new(n: usize) -> Self {
        PolySystem {
            equations: vec![Vec::new(); n],
        }
    }

    pub fn add(&mut self, var: usize, coeff: Value, vars: Vec<usize>) {
        self.equations[var].push(Monomial { coeff, vars });
    }

    /// Least non-negative fixpoint. Strongly connected components of the
    /// variable dependency graph are solved in topological order; a component
    /// is solved by exact substitution when it is acyclic and all its inputs
    /// are exact, and by fixpoint iteration in `f64` otherwise.
    pub fn solve(&self, tol: f64, max_iter: usize) -> Result<Vec<Value>, NonConvergence> {
        let n = self.equations.len();
        let mut graph = petgraph::graph::DiGraph::<(), ()>::new();
        let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
        for (i, eq) in self.equations.iter().enumerate() {
            let mut seen = std::collections::BTreeSet::new();
            for m in eq {
                for &v in &m.vars {
                    if seen.insert(v) {
                        graph.add_edge(nodes[i], nodes[v], ());
                    }
                }
            }
        }
        // tarjan_scc returns components in reverse topological order, i.e.
        // dependencies first — exactly the evaluation order we need.
        let sccs = petgraph::algo::tarjan_scc(&graph);
        let mut values: Vec<Value> = vec![Value::zero(); n];
        for comp in sccs {
            let members: Vec<usize> = comp.iter().map(|ix| ix.index()).collect();
            let member_set: std::collections::BTreeSet<usize> = members.iter().copied().collect();
            let self_recursive = members.iter().any(|&i| {
                self.equations[i]
                    .iter()
                    .any(|m| m.vars.iter().any(|v| member_set.contains(v)))
            });
            let inputs_exact = members.iter().all(|&i| {
                self.equations[i].iter().all(|m| {
                    m.coeff.is_exact()
                        && m.vars
                            .iter()
                            .all(|v| member_set.contains(v) || values[*v].is_exact())
                })
            });
            if !self_recursive && inputs_exact {
                for &i in &members {
                    let mut total = Rational::zero();
                    for m in &self.equations[i] {
                        let mut prod = m.coeff.as_exact().unwrap().clone();
                        for &v in &m.vars {
                            prod *= values[v].as_exact().unwrap();
                        }
                        total += prod;
                    }
                    values[i] = Value::Exact(total);
                }
            } else if self_recursive
                && inputs_exact
                && self.solve_linear_component(&members, &member_set, &mut values)
            {
                // Self-recursive but linear within the component and
                // provably contracting: solved exactly by elimination.
            } else if !self_recursive {
                for &i in &members {
                    let mut total = 0.0f64;
                    for m in &self.equations[i] {
                        let mut prod = m.coeff.to_f64();
                        for &v in &m.vars {
                            prod *= values[v].to_f64();
                        }
                        total += prod;
                    }
                    values[i] = Value::Approx(total);
                }
            } else {
                let mut cur: BTreeMap<usize, f64> = members.iter().map(|&i| (i, 0.0)).collect();
                let mut converged = false;
                let mut last_delta = f64::INFINITY;
                for _ in 0..max_iter {
                    let mut delta: f64 = 0.0;
                    let mut next = cur.clone();
                    for &i in &members {
                        let mut total = 0.0f64;
                        for m in &self.equations[i] {
                            let mut prod = m.coeff.to_f64();
                            for &v in &m.vars {
                                prod *= match cur.get(&v) {
                                    Some(x) => *x,
                                    None => values[v].to_f64(),
                                };
                            }
                            total += prod;
                        }
                        delta = delta.max((total - cur[&i]).abs());
                        next.insert(i, total);
                    }
                    cur = next;
                    last_delta = delta;
                    if delta <= tol {
                        converged = true;
                        break;
                    }
                }
                if !converged {
                    return Err(NonConvergence {
                        max_iter,
                        last_delta,
                    });
                }
                for &i in &members {
                    values[i] = Value::Approx(cur[&i]);
                }
            }
        }
        Ok(values)
    }

    /// Try to solve one strongly connected component exactly when its
    /// equations are linear in the component's own variables: `x = C x + b`
    /// with non-negative `C` and `b`. The unique solution of such a system is
    /// the least fixpoint exactly when the iteration `C^k b` contracts, so
    /// the spectral radius of `C` is estimated first and the exact path is
    /// declined (returning false) unless it is safely below one.
    fn solve_linear_component(
        &self,
        members: &[usize],
        member_set: &std::collections::BTreeSet<usize>,
        values: &mut [Value],
    ) -> bool {
        let n = members.len();
        let local: BTreeMap<usize, usize> = members
            .iter()
            .enumerate()
            .map(|(loc, &glob)| (glob, loc))
            .collect();
        // matrix rows of (I - C) and the constant vector b
        let mut a: Vec<Vec<Rational>> = vec![vec![Rational::zero(); n]; n];
        let mut b: Vec<Rational> = vec![Rational::zero(); n];
        let mut c_f64: Vec<Vec<f64>> = vec![vec![0.0; n]; n];
        for (row, &i) in members.iter().enumerate() {
            a[row][row] = Rational::one();
            for m in &self.equations[i] {
                let inside: Vec<usize> = m
                    .vars
                    .iter()
                    .copied()
                    .filter(|v| member_set.contains(v))
                    .collect();
                if inside.len() > 1 {
                    return false;
                }
                let mut coeff = match m.coeff.as_exact() {
                    Some(r) => r.clone(),
                    None => return false,
                };
                for &v in &m.vars {
                    if !member_set.contains(&v) {
                        match values[v].as_exact() {
                            Some(r) => coeff *= r,
                            None => return false,
                        }
                    }
                }
                match inside.first() {
                    Some(&v) => {
                        let col = local[&v];
                        use num::ToPrimitive;
                        c_f64[row][col] += coeff.to_f64().unwrap_or(f64::INFINITY);
                        a[row][col] -= coeff;
                    }
                    None => b[row] += coeff,
                }
            }
        }
        // Power iteration for the spectral radius of the non-negative C.
        let mut v = vec![1.0f64; n];
        let mut rho = 0.0;
        for _ in 0..200 {
            let mut next = vec![0.0f64; n];
            for (row, cr) in c_f64.iter().enumerate() {
                for (col, &c) in cr.iter().enumerate() {
                    next[row] += c * v[col];
                }
            }
            let norm = next.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if !norm.is_finite() || norm == 0.0 {
                rho = norm;
                break;
            }
            rho = norm;
            for x in &mut next {
                *x /= norm;
            }
            v = next;
        }
        if rho >= 1.0 - 1e-9 || rho.is_nan() {
            return false;
        }
        // Gaussian elimination on (I - C) x = b with exact arithmetic.
        for col in 0..n {
            let pivot = match (col..n).find(|&r| !a[r][col].is_zero()) {
                Some(p) => p,
                None => return false,
            };
            a.swap(col, pivot);
            b.swap(col, pivot);
            let p = a[col][col].clone();
            for x in &mut a[col] {
                *x /= &p;
            }
            b[col] /= &p;
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, pc) in a[r].iter_mut().zip(&pivot_row) {
                    let sub = &f * pc;
                    *x -= sub;
                }
                let sub = &f * &b[col];
                b[r] -= sub;
            }
        }
        if b.iter().any(|x| x < &Rational::zero()) {
            return false;
        }
        for (row, &i) in members.iter().enumerate() {
            values[i] = Value::Exact(b[row].clone());
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render() {
        assert_eq!(parse_value("2/3").unwrap(), Value::Exact(ratio(2, 3)));
        assert_eq!(parse_value("0.25").unwrap(), Value::Exact(ratio(1, 4)));
        assert_eq!(parse_value("1").unwrap(), Value::one());
        assert_eq!(Value::Exact(ratio(4, 6)).render(), "2/3");
        assert!(Value::Approx(0.5).render().ends_with("approx"));
    }

    #[test]
    fn mixed_arithmetic_degrades() {
        let e = Value::Exact(ratio(1, 2));
        let a = Value::Approx(0.5);
        assert!(e.add(&e).is_exact());
        assert!(!e.add(&a).is_exact());
        assert!(e.mul(&a).approx_eq(&Value::Exact(ratio(1, 4)), 1e-12));
    }

    #[test]
    fn linear_system_exact() {
        // x = 1/2 + 1/2 * y ; y = 1/3  (acyclic -> exact)
        let mut sys = PolySystem::new(2);
        sys.add(0, Value::Exact(ratio(1, 2)), vec![]);
        sys.add(0, Value::Exact(ratio(1, 2)), vec![1]);
        sys.add(1, Value::Exact(ratio(1, 3)), vec![]);
        let sol = sys.solve(1e-12, 1000).unwrap();
        assert_eq!(sol[0], Value::Exact(ratio(2, 3)));
        assert_eq!(sol[1], Value::Exact(ratio(1, 3)));
    }

    #[test]
    fn quadratic_least_fixpoint() {
        // x = 0.4 x^2 + 0.6 has least fixpoint 1; x = 0.6 x^2 + 0.4 has 2/3.
        let mut a = PolySystem::new(1);
        a.add(0, Value::Exact(ratio(2, 5)), vec![0, 0]);
        a.add(0, Value::Exact(ratio(3, 5)), vec![]);
        let sa = a.solve(1e-13, 100_000).unwrap();
        assert!((sa[0].to_f64() - 1.0).abs() < 1e-9);

        let mut b = PolySystem::new(1);
        b.add(0, Value::Exact(ratio(3, 5)), vec![0, 0]);
        b.add(0, Value::Exact(ratio(2, 5)), vec![]);
        let sb = b.solve(1e-13, 100_000).unwrap();
        assert!((sb[0].to_f64() - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn nonconvergence_reported() {
        // x = x + 1 diverges.
        let mut sys = PolySystem::new(1);
        sys.add(0, Value::one(), vec![0]);
        sys.add(0, Value::one(), vec![]);
        assert!(sys.solve(1e-12, 50).is_err());
    }
}
