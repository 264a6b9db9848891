//! Abstract finite Menger (2,n)-semigroups given by operation tables.
//!
//! An [`AlgebraTable`] holds one total `(n+1)`-ary table for the superposition
//! `[x, y_0, .., y_{n-1}]` and `n` total binary tables for the Mann
//! compositions. Elements are `0..size`.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nfun::{self, decode_into, index_of, tuple_count, FunctionSet, PartialFn};
use crate::report::{Check, Report};

/// Default bound on the number of elements any closure may produce.
pub const DEFAULT_CAP: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AlgebraTable {
    n: usize,
    size: usize,
    sup: Vec<u32>,
    binops: Vec<Vec<u32>>,
}

impl AlgebraTable {
    pub fn new(n: usize, size: usize, sup: Vec<u32>, binops: Vec<Vec<u32>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Malformed("n must be positive".into()));
        }
        if size == 0 {
            return Err(Error::EmptyAlgebra);
        }
        let sup_len = tuple_count(size, n + 1);
        if sup.len() != sup_len {
            return Err(Error::Malformed(format!(
                "superposition table has {} entries, expected {}",
                sup.len(),
                sup_len
            )));
        }
        if binops.len() != n {
            return Err(Error::Malformed(format!(
                "expected {} binary tables, got {}",
                n,
                binops.len()
            )));
        }
        for (i, b) in binops.iter().enumerate() {
            if b.len() != size * size {
                return Err(Error::Malformed(format!(
                    "binary table {} has {} entries, expected {}",
                    i,
                    b.len(),
                    size * size
                )));
            }
        }
        let bad = sup
            .iter()
            .chain(binops.iter().flatten())
            .find(|&&v| v as usize >= size);
        if let Some(&v) = bad {
            return Err(Error::IndexOutOfRange {
                index: v as usize,
                bound: size,
            });
        }
        Ok(AlgebraTable {
            n,
            size,
            sup,
            binops,
        })
    }

    /// The one-element algebra.
    pub fn trivial(n: usize) -> Result<Self> {
        AlgebraTable::new(n, 1, vec![0], vec![vec![0]; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn sup_table(&self) -> &[u32] {
        &self.sup
    }

    pub fn binop_table(&self, i: usize) -> &[u32] {
        &self.binops[i]
    }

    pub fn binop_tables(&self) -> &[Vec<u32>] {
        &self.binops
    }

    /// `[x, ys..]`.
    pub fn sup(&self, x: usize, ys: &[usize]) -> usize {
        let idx = ys.iter().fold(x, |acc, &y| acc * self.size + y);
        self.sup[idx] as usize
    }

    /// `x o_i y`.
    pub fn compose(&self, i: usize, x: usize, y: usize) -> usize {
        self.binops[i][x * self.size + y] as usize
    }

    /// Mutable access used by the enumerator and by tests that corrupt tables.
    pub fn set_sup(&mut self, x: usize, ys: &[usize], v: usize) {
        let idx = ys.iter().fold(x, |acc, &y| acc * self.size + y);
        self.sup[idx] = v as u32;
    }

    pub fn set_compose(&mut self, i: usize, x: usize, y: usize, v: usize) {
        self.binops[i][x * self.size + y] = v as u32;
    }

    /// Relabels elements: element `x` becomes `perm[x]`.
    pub fn permuted(&self, perm: &[usize]) -> AlgebraTable {
        let s = self.size;
        let mut sup = vec![0u32; self.sup.len()];
        let mut buf = vec![0usize; self.n + 1];
        for (k, &v) in self.sup.iter().enumerate() {
            decode_into(s, k, &mut buf);
            buf.iter_mut().for_each(|a| *a = perm[*a]);
            sup[index_of(s, &buf)] = perm[v as usize] as u32;
        }
        let binops = self
            .binops
            .iter()
            .map(|b| {
                let mut out = vec![0u32; b.len()];
                for x in 0..s {
                    for y in 0..s {
                        out[perm[x] * s + perm[y]] = perm[b[x * s + y] as usize] as u32;
                    }
                }
                out
            })
            .collect();
        AlgebraTable {
            n: self.n,
            size: s,
            sup,
            binops,
        }
    }
}

fn first_assoc_failure(table: &[u32], s: usize) -> Option<Vec<usize>> {
    for x in 0..s {
        for y in 0..s {
            let xy = table[x * s + y] as usize;
            for z in 0..s {
                let yz = table[y * s + z] as usize;
                if table[xy * s + z] != table[x * s + yz] {
                    return Some(vec![x, y, z]);
                }
            }
        }
    }
    None
}

/// Scans with the right-hand tuple outermost, so each pass is a table lookup
/// per instance; only a failing algebra pays for the ordered scan that finds
/// the first counterexample.
fn first_superassoc_failure(alg: &AlgebraTable) -> Option<Vec<usize>> {
    let (n, s) = (alg.n, alg.size);
    let rows = tuple_count(s, n);
    let mut zs = vec![0usize; n];
    let mut ys = vec![0usize; n];
    let mut column = vec![0usize; s];
    let mut moved = vec![0usize; rows];
    let mut clean = true;
    'scan: for k in 0..rows {
        decode_into(s, k, &mut zs);
        for (y, c) in column.iter_mut().enumerate() {
            *c = alg.sup(y, &zs);
        }
        for (t, m) in moved.iter_mut().enumerate() {
            decode_into(s, t, &mut ys);
            *m = ys.iter().fold(0, |acc, &y| acc * s + column[y]);
        }
        for x in 0..s {
            let base = x * rows;
            for t in 0..rows {
                if column[alg.sup[base + t] as usize] != alg.sup[base + moved[t]] as usize {
                    clean = false;
                    break 'scan;
                }
            }
        }
    }
    if clean {
        return None;
    }
    first_superassoc_failure_ordered(alg)
}

fn first_superassoc_failure_ordered(alg: &AlgebraTable) -> Option<Vec<usize>> {
    let (n, s) = (alg.n, alg.size);
    let mut args = vec![0usize; 2 * n + 1];
    let mut inner = vec![0usize; n];
    for k in 0..tuple_count(s, 2 * n + 1) {
        decode_into(s, k, &mut args);
        let (x, ys, zs) = (args[0], &args[1..=n], &args[n + 1..]);
        let lhs = alg.sup(alg.sup(x, ys), zs);
        for (slot, &y) in inner.iter_mut().zip(ys) {
            *slot = alg.sup(y, zs);
        }
        if lhs != alg.sup(x, &inner) {
            return Some(args);
        }
    }
    None
}

/// Associativity of every Mann table and superassociativity of the bracket.
///
/// Counterexamples: `assoc_i` reports `[x, y, z]`; `superassociativity`
/// reports `[x, y_0..y_{n-1}, z_0..z_{n-1}]`.
pub fn check_axioms(alg: &AlgebraTable) -> Report {
    let mut report = Report::new();
    for i in 0..alg.n {
        report.push(Check::from_counterexample(
            format!("assoc_{i}"),
            first_assoc_failure(&alg.binops[i], alg.size),
        ));
    }
    report.push(Check::from_counterexample(
        "superassociativity",
        first_superassoc_failure(alg),
    ));
    report
}

/// Selector elements `e_0..e_{n-1}`, validated against an algebra.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectorSet {
    e: Vec<usize>,
}

impl SelectorSet {
    pub fn new(alg: &AlgebraTable, e: Vec<usize>) -> Result<Self> {
        if e.len() != alg.n {
            return Err(Error::Dimension(format!(
                "{} selectors for n = {}",
                e.len(),
                alg.n
            )));
        }
        if let Some(&bad) = e.iter().find(|&&x| x >= alg.size) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                bound: alg.size,
            });
        }
        if !is_selector_tuple(alg, &e) {
            return Err(Error::MissingSelectors);
        }
        Ok(SelectorSet { e })
    }

    pub fn elements(&self) -> &[usize] {
        &self.e
    }

    pub fn get(&self, i: usize) -> usize {
        self.e[i]
    }
}

fn is_selector_tuple(alg: &AlgebraTable, e: &[usize]) -> bool {
    let (n, s) = (alg.n, alg.size);
    // [x, e] = x
    if (0..s).any(|x| alg.sup(x, e) != x) {
        return false;
    }
    // [e_i, x] = x_i
    let mut xs = vec![0usize; n];
    for k in 0..tuple_count(s, n) {
        decode_into(s, k, &mut xs);
        if (0..n).any(|i| alg.sup(e[i], &xs) != xs[i]) {
            return false;
        }
    }
    // [x, e with slot i := y] = x o_i y
    let mut args = e.to_vec();
    for i in 0..n {
        for x in 0..s {
            for y in 0..s {
                args[i] = y;
                let ok = alg.sup(x, &args) == alg.compose(i, x, y);
                args[i] = e[i];
                if !ok {
                    return false;
                }
            }
        }
    }
    true
}

/// Scans every n-tuple for selectors. Selectors are unique when they exist, so
/// two passing tuples indicate a bug.
pub fn find_selectors(alg: &AlgebraTable) -> Result<Option<SelectorSet>> {
    let mut found: Option<Vec<usize>> = None;
    let mut e = vec![0usize; alg.n];
    for k in 0..tuple_count(alg.size, alg.n) {
        decode_into(alg.size, k, &mut e);
        if is_selector_tuple(alg, &e) {
            if let Some(prev) = &found {
                return Err(Error::Internal(format!(
                    "two selector tuples {prev:?} and {e:?}"
                )));
            }
            found = Some(e.clone());
        }
    }
    Ok(found.map(|e| SelectorSet { e }))
}

/// `x o_{i_1} y_1 o_{i_2} .. o_{i_s} y_s`, stored as `(slot, element)` steps and
/// evaluated left to right.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CompositionWord {
    steps: Vec<(usize, usize)>,
}

impl CompositionWord {
    pub fn new(steps: Vec<(usize, usize)>) -> Self {
        CompositionWord { steps }
    }

    pub fn empty() -> Self {
        CompositionWord::default()
    }

    pub fn steps(&self) -> &[(usize, usize)] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(&mut self, slot: usize, y: usize) {
        self.steps.push((slot, y));
    }

    pub fn appended(&self, slot: usize, y: usize) -> Self {
        let mut w = self.clone();
        w.push(slot, y);
        w
    }

    /// Flattened `[i_1, y_1, i_2, y_2, ..]`.
    pub fn flat(&self) -> Vec<usize> {
        self.steps.iter().flat_map(|&(i, y)| [i, y]).collect()
    }

    pub fn validate(&self, alg: &AlgebraTable) -> Result<()> {
        for &(i, y) in &self.steps {
            if i >= alg.n {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    bound: alg.n,
                });
            }
            if y >= alg.size {
                return Err(Error::IndexOutOfRange {
                    index: y,
                    bound: alg.size,
                });
            }
        }
        Ok(())
    }
}

/// `(mu_0(w), .., mu_{n-1}(w))`; `None` in slot `i` is the empty symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MuState(pub Vec<Option<usize>>);

impl MuState {
    pub fn empty(n: usize) -> Self {
        MuState(vec![None; n])
    }

    pub fn slots(&self) -> &[Option<usize>] {
        &self.0
    }

    /// True when every slot holds an element (the word mentions every slot).
    pub fn is_full(&self) -> bool {
        self.0.iter().all(Option::is_some)
    }

    /// Full state as a plain tuple.
    pub fn elements(&self) -> Option<Vec<usize>> {
        self.0.iter().copied().collect()
    }

    /// Renders empty slot `i` as the star element `size + i`.
    pub fn render(&self, size: usize) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .map(|(i, t)| t.unwrap_or(size + i))
            .collect()
    }

    /// Appending `o_j y`: filled slots absorb `y` through `o_j`, then an empty
    /// slot `j` takes `y`.
    pub fn step(&self, alg: &AlgebraTable, j: usize, y: usize) -> MuState {
        let mut next: Vec<Option<usize>> = self
            .0
            .iter()
            .map(|t| t.map(|t| alg.compose(j, t, y)))
            .collect();
        if next[j].is_none() {
            next[j] = Some(y);
        }
        MuState(next)
    }
}

pub fn mu_state(alg: &AlgebraTable, word: &CompositionWord) -> Result<MuState> {
    word.validate(alg)?;
    Ok(word
        .steps
        .iter()
        .fold(MuState::empty(alg.n), |st, &(j, y)| st.step(alg, j, y)))
}

/// `mu_i(w)`, `None` when slot `i` never occurs in `w`.
pub fn mu(alg: &AlgebraTable, word: &CompositionWord, i: usize) -> Result<Option<usize>> {
    if i >= alg.n {
        return Err(Error::IndexOutOfRange {
            index: i,
            bound: alg.n,
        });
    }
    Ok(mu_state(alg, word)?.0[i])
}

/// `mu*_i(w)` in star indexing: an element of `G`, or `size + i` for `e_i`.
pub fn mu_star(alg: &AlgebraTable, word: &CompositionWord, i: usize) -> Result<usize> {
    Ok(mu(alg, word, i)?.unwrap_or(alg.size + i))
}

pub fn eval_word(alg: &AlgebraTable, g: usize, word: &CompositionWord) -> Result<usize> {
    if g >= alg.size {
        return Err(Error::IndexOutOfRange {
            index: g,
            bound: alg.size,
        });
    }
    word.validate(alg)?;
    Ok(word.steps.iter().fold(g, |acc, &(i, y)| alg.compose(i, acc, y)))
}

/// Two words that reach the same mu-state but act differently on `element`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuCollision {
    pub state: MuState,
    pub first: CompositionWord,
    pub second: CompositionWord,
    pub element: usize,
    pub first_value: usize,
    pub second_value: usize,
}

/// Every mu-state reachable from the empty word, each with the action
/// `g -> g o w` of the first word found for it.
#[derive(Debug, Clone)]
pub struct MuReachability {
    states: Vec<MuState>,
    values: Vec<Vec<u32>>,
    witnesses: Vec<CompositionWord>,
    index: HashMap<MuState, usize>,
    collision: Option<MuCollision>,
}

impl MuReachability {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[MuState] {
        &self.states
    }

    pub fn state(&self, k: usize) -> &MuState {
        &self.states[k]
    }

    /// `g o w` for the witness word `w` of state `k`.
    pub fn value(&self, k: usize, g: usize) -> usize {
        self.values[k][g] as usize
    }

    pub fn values(&self, k: usize) -> &[u32] {
        &self.values[k]
    }

    pub fn witness(&self, k: usize) -> &CompositionWord {
        &self.witnesses[k]
    }

    pub fn lookup(&self, state: &MuState) -> Option<usize> {
        self.index.get(state).copied()
    }

    /// First violation of "equal mu-values force equal actions", if any.
    pub fn collision(&self) -> Option<&MuCollision> {
        self.collision.as_ref()
    }
}

/// Breadth-first search over mu-states, appending one step `o_j y` at a time.
pub fn reachable_mu_states(alg: &AlgebraTable) -> MuReachability {
    let (n, s) = (alg.n, alg.size);
    let root = MuState::empty(n);
    let mut reach = MuReachability {
        states: vec![root.clone()],
        values: vec![(0..s as u32).collect()],
        witnesses: vec![CompositionWord::empty()],
        index: HashMap::from([(root, 0)]),
        collision: None,
    };
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        for j in 0..n {
            for y in 0..s {
                let next = reach.states[k].step(alg, j, y);
                let vals: Vec<u32> = reach.values[k]
                    .iter()
                    .map(|&v| alg.compose(j, v as usize, y) as u32)
                    .collect();
                match reach.index.get(&next) {
                    Some(&t) => {
                        if reach.collision.is_none() && reach.values[t] != vals {
                            let g = (0..s).find(|&g| reach.values[t][g] != vals[g]).unwrap();
                            reach.collision = Some(MuCollision {
                                state: next,
                                first: reach.witnesses[t].clone(),
                                second: reach.witnesses[k].appended(j, y),
                                element: g,
                                first_value: reach.values[t][g] as usize,
                                second_value: vals[g] as usize,
                            });
                        }
                    }
                    None => {
                        let t = reach.states.len();
                        reach.index.insert(next.clone(), t);
                        reach.states.push(next);
                        reach.values.push(vals);
                        reach.witnesses.push(reach.witnesses[k].appended(j, y));
                        queue.push_back(t);
                    }
                }
            }
        }
    }
    reach
}

fn first_mann_bracket_failure(alg: &AlgebraTable) -> Option<Vec<usize>> {
    let (n, s) = (alg.n, alg.size);
    let mut zs = vec![0usize; n];
    let mut args = vec![0usize; n];
    for i in 0..n {
        for x in 0..s {
            for y in 0..s {
                for k in 0..tuple_count(s, n) {
                    decode_into(s, k, &mut zs);
                    let lhs = alg.sup(alg.compose(i, x, y), &zs);
                    args.copy_from_slice(&zs);
                    args[i] = alg.sup(y, &zs);
                    if lhs != alg.sup(x, &args) {
                        let mut c = vec![i, x, y];
                        c.extend(&zs);
                        return Some(c);
                    }
                }
            }
        }
    }
    None
}

fn first_bracket_mann_failure(alg: &AlgebraTable) -> Option<Vec<usize>> {
    let (n, s) = (alg.n, alg.size);
    let mut ys = vec![0usize; n];
    let mut args = vec![0usize; n];
    for i in 0..n {
        for x in 0..s {
            for k in 0..tuple_count(s, n) {
                decode_into(s, k, &mut ys);
                let head = alg.sup(x, &ys);
                for z in 0..s {
                    for (a, &y) in args.iter_mut().zip(&ys) {
                        *a = alg.compose(i, y, z);
                    }
                    if alg.compose(i, head, z) != alg.sup(x, &args) {
                        let mut c = vec![i, x];
                        c.extend(&ys);
                        c.push(z);
                        return Some(c);
                    }
                }
            }
        }
    }
    None
}

fn first_full_word_failure(alg: &AlgebraTable, reach: &MuReachability) -> Option<Vec<usize>> {
    for k in 0..reach.len() {
        let Some(t) = reach.state(k).elements() else {
            continue;
        };
        for x in 0..alg.size {
            if reach.value(k, x) != alg.sup(x, &t) {
                let mut c = vec![x];
                c.extend(reach.witness(k).flat());
                return Some(c);
            }
        }
    }
    None
}

/// The three identities and the implication characterising algebras of
/// n-place functions.
///
/// Counterexamples:
/// - `mann_bracket`: `[i, x, y, z_0..]` with `[x o_i y, z] != [x, z with slot i := [y, z]]`
/// - `bracket_mann`: `[i, x, y_0.., z]` with `[x, y] o_i z != [x, y_0 o_i z, ..]`
/// - `full_words`: `[x, i_1, y_1, ..]`, a word mentioning every slot where
///   `x o w != [x, mu(w)]`
/// - `word_collision`: `[g, s, i_1, y_1, .., i_s, y_s, j_1, z_1, ..]`, two words with equal
///   mu-values but `g o w1 != g o w2`
pub fn check_representability(alg: &AlgebraTable) -> Report {
    let reach = reachable_mu_states(alg);
    representability_with(alg, &reach)
}

pub fn representability_with(alg: &AlgebraTable, reach: &MuReachability) -> Report {
    let mut report = Report::new();
    report.push(Check::from_counterexample("mann_bracket", first_mann_bracket_failure(alg)));
    report.push(Check::from_counterexample("bracket_mann", first_bracket_mann_failure(alg)));
    report.push(Check::from_counterexample(
        "full_words",
        first_full_word_failure(alg, reach),
    ));
    let collision = reach.collision().map(|c| {
        let mut v = vec![c.element, c.first.len()];
        v.extend(c.first.flat());
        v.extend(c.second.flat());
        v
    });
    report.push(Check::from_counterexample("word_collision", collision));
    report
}

/// Axioms plus representability: the gate for every representation builder.
pub fn check_all(alg: &AlgebraTable) -> Report {
    let mut report = check_axioms(alg);
    report.extend(check_representability(alg));
    report
}

/// Builds abstract tables for a set of functions that is already closed.
pub fn algebra_of_closed(arity: usize, fns: &[PartialFn]) -> Result<AlgebraTable> {
    if fns.is_empty() {
        return Err(Error::EmptyAlgebra);
    }
    let s = fns.len();
    let lookup: HashMap<&[u32], usize> = fns
        .iter()
        .enumerate()
        .map(|(k, f)| (f.table(), k))
        .collect();
    let find = |f: &PartialFn| -> Result<u32> {
        lookup
            .get(f.table())
            .map(|&k| k as u32)
            .ok_or_else(|| Error::Precondition("function set is not closed".into()))
    };
    let mut sup = Vec::with_capacity(tuple_count(s, arity + 1));
    let mut combo = vec![0usize; arity + 1];
    for k in 0..tuple_count(s, arity + 1) {
        decode_into(s, k, &mut combo);
        let h = nfun::superpose_unchecked(&fns[combo[0]], combo[1..].iter().map(|&c| &fns[c]));
        sup.push(find(&h)?);
    }
    let mut binops = Vec::with_capacity(arity);
    for i in 0..arity {
        let mut t = Vec::with_capacity(s * s);
        for f in fns {
            for g in fns {
                t.push(find(&nfun::mann_unchecked(f, g, i))?);
            }
        }
        binops.push(t);
    }
    AlgebraTable::new(arity, s, sup, binops)
}

/// Closes a function set under both operations and tabulates the result.
/// Element `k` of the algebra is function `k` of the returned list; the input
/// functions come first, in order.
pub fn algebra_from_functions(fs: &FunctionSet, cap: usize) -> Result<(AlgebraTable, Vec<PartialFn>)> {
    if fs.is_empty() {
        return Err(Error::EmptyAlgebra);
    }
    let fns = nfun::close(fs.arity(), fs.carrier(), fs.functions().to_vec(), cap)?;
    let alg = algebra_of_closed(fs.arity(), &fns)?;
    Ok((alg, fns))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfun::projectors;

    fn g2() -> (AlgebraTable, Vec<PartialFn>) {
        let fs = FunctionSet::new(2, 2, projectors(2, 2).unwrap()).unwrap();
        algebra_from_functions(&fs, DEFAULT_CAP).unwrap()
    }

    fn constants() -> AlgebraTable {
        let fs = FunctionSet::new(
            2,
            2,
            vec![
                PartialFn::parse(2, 2, "0000").unwrap(),
                PartialFn::parse(2, 2, "1111").unwrap(),
            ],
        )
        .unwrap();
        let (alg, fns) = algebra_from_functions(&fs, DEFAULT_CAP).unwrap();
        assert_eq!(fns.len(), 2);
        alg
    }

    /// mu_i straight from its definition: the suffix starting at the first
    /// occurrence of slot `i`, folded with the abstract tables.
    fn mu_direct(alg: &AlgebraTable, w: &CompositionWord, i: usize) -> Option<usize> {
        let k = w.steps().iter().position(|&(j, _)| j == i)?;
        let (_, first) = w.steps()[k];
        Some(
            w.steps()[k + 1..]
                .iter()
                .fold(first, |acc, &(j, y)| alg.compose(j, acc, y)),
        )
    }

    fn all_words(n: usize, s: usize, max_len: usize) -> Vec<CompositionWord> {
        let mut out = vec![CompositionWord::empty()];
        let mut frontier = out.clone();
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &frontier {
                for j in 0..n {
                    for y in 0..s {
                        next.push(w.appended(j, y));
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    #[test]
    fn malformed_tables_rejected() {
        assert!(AlgebraTable::new(2, 0, vec![], vec![vec![], vec![]]).is_err());
        assert!(AlgebraTable::new(2, 1, vec![0, 0], vec![vec![0], vec![0]]).is_err());
        assert!(AlgebraTable::new(2, 1, vec![0], vec![vec![0]]).is_err());
        assert!(AlgebraTable::new(1, 2, vec![0, 1, 2, 0], vec![vec![0; 4]]).is_err());
    }

    #[test]
    fn axioms_hold_for_function_algebras() {
        let (alg, _) = g2();
        assert!(check_axioms(&alg).passed());
        assert!(check_axioms(&AlgebraTable::trivial(2).unwrap()).passed());
        assert!(check_axioms(&constants()).passed());
    }

    #[test]
    fn flipped_superposition_entry_is_caught() {
        let (mut alg, _) = g2();
        // [I1, I1, I1] = I1; flip it to I2.
        alg.set_sup(0, &[0, 0], 1);
        let report = check_axioms(&alg);
        let c = report.get("superassociativity").unwrap();
        assert!(!c.passed);
        let cex = c.counterexample.as_ref().unwrap();
        assert_eq!(cex.len(), 5);
        let (x, ys, zs) = (cex[0], &cex[1..3], &cex[3..5]);
        let inner: Vec<usize> = ys.iter().map(|&y| alg.sup(y, zs)).collect();
        assert_ne!(alg.sup(alg.sup(x, ys), zs), alg.sup(x, &inner));
    }

    #[test]
    fn selectors() {
        let (alg, fns) = g2();
        let sel = find_selectors(&alg).unwrap().unwrap();
        assert_eq!(fns[sel.get(0)], nfun::projector(2, 2, 0).unwrap());
        assert_eq!(fns[sel.get(1)], nfun::projector(2, 2, 1).unwrap());

        let t = find_selectors(&AlgebraTable::trivial(2).unwrap()).unwrap().unwrap();
        assert_eq!(t.elements(), &[0, 0]);

        assert!(find_selectors(&constants()).unwrap().is_none());
        assert!(SelectorSet::new(&constants(), vec![0, 1]).is_err());
    }

    #[test]
    fn mu_worked_example() {
        // Three slots are needed; the ternary projectors on {0,1} will do.
        let fs = FunctionSet::new(3, 2, projectors(2, 3).unwrap()).unwrap();
        let (alg, _) = algebra_from_functions(&fs, DEFAULT_CAP).unwrap();
        let (x, y, z) = (0, 1, 2);
        let w = CompositionWord::new(vec![(1, x), (0, y), (2, z)]);
        assert_eq!(mu(&alg, &w, 0).unwrap(), Some(alg.compose(2, y, z)));
        assert_eq!(
            mu(&alg, &w, 1).unwrap(),
            Some(alg.compose(2, alg.compose(0, x, y), z))
        );
        assert_eq!(mu(&alg, &w, 2).unwrap(), Some(z));
        assert!(mu(&alg, &w, 3).is_err());
        for i in 0..3 {
            assert_eq!(mu(&alg, &CompositionWord::empty(), i).unwrap(), None);
            assert_eq!(mu_star(&alg, &CompositionWord::empty(), i).unwrap(), 3 + i);
        }
    }

    #[test]
    fn mu_on_g2() {
        let (alg, _) = g2();
        let w = CompositionWord::new(vec![(0, 1)]);
        assert_eq!(mu(&alg, &w, 0).unwrap(), Some(1));
        assert_eq!(mu(&alg, &w, 1).unwrap(), None);
    }

    #[test]
    fn fold_agrees_with_direct_definition() {
        let mut algebras = vec![g2().0, AlgebraTable::trivial(3).unwrap(), constants()];
        let fs = FunctionSet::new(
            2,
            2,
            vec![PartialFn::parse(2, 2, "0-1-").unwrap(), PartialFn::parse(2, 2, "1--0").unwrap()],
        )
        .unwrap();
        let (a, _) = algebra_from_functions(&fs, DEFAULT_CAP).unwrap();
        if a.size() <= 3 {
            algebras.push(a);
        }
        let fs3 = FunctionSet::new(3, 2, vec![nfun::projector(2, 3, 0).unwrap()]).unwrap();
        algebras.push(algebra_from_functions(&fs3, DEFAULT_CAP).unwrap().0);
        for alg in &algebras {
            assert!(alg.size() <= 3 && alg.n() <= 3);
            for w in all_words(alg.n(), alg.size(), 4) {
                for i in 0..alg.n() {
                    assert_eq!(mu(alg, &w, i).unwrap(), mu_direct(alg, &w, i), "{w:?}");
                }
            }
        }
    }

    #[test]
    fn eval_word_examples() {
        let (alg, _) = g2();
        assert_eq!(eval_word(&alg, 0, &CompositionWord::new(vec![(0, 1)])).unwrap(), 1);
        assert_eq!(eval_word(&alg, 1, &CompositionWord::new(vec![(0, 0)])).unwrap(), 1);
        assert_eq!(eval_word(&alg, 1, &CompositionWord::empty()).unwrap(), 1);
        assert!(eval_word(&alg, 2, &CompositionWord::empty()).is_err());
    }

    #[test]
    fn reachability_examples() {
        let (alg, _) = g2();
        let r = reachable_mu_states(&alg);
        // Oracle: mu-states of every word of length <= 4, via the direct definition.
        let mut oracle: Vec<Vec<Option<usize>>> = all_words(2, 2, 4)
            .iter()
            .map(|w| (0..2).map(|i| mu_direct(&alg, w, i)).collect())
            .collect();
        oracle.sort();
        oracle.dedup();
        let mut got: Vec<Vec<Option<usize>>> = r.states().iter().map(|s| s.0.clone()).collect();
        got.sort();
        assert_eq!(got, oracle);
        // (I2, I1) is never produced: I1 o_2 y = I1 and I2 o_1 y = I2.
        assert_eq!(r.len(), 8);
        assert!(r.lookup(&MuState(vec![Some(1), Some(0)])).is_none());
        assert_eq!(r.state(0), &MuState::empty(2));
        assert_eq!(r.values(0), &[0, 1]);
        assert!(r.collision().is_none());

        for n in 1..=3 {
            let r = reachable_mu_states(&AlgebraTable::trivial(n).unwrap());
            assert_eq!(r.len(), 1 << n);
        }
    }

    #[test]
    fn representability_examples() {
        let (alg, _) = g2();
        assert!(check_representability(&alg).passed());
        assert!(check_representability(&AlgebraTable::trivial(2).unwrap()).passed());

        let (mut bad, _) = g2();
        // I1 o_1 I2 = I2; make it I1.
        bad.set_compose(0, 0, 1, 0);
        let report = check_representability(&bad);
        assert!(!report.passed());
        let names = report.failure_names();
        assert!(names.iter().any(|n| n == "mann_bracket" || n == "word_collision"), "{names:?}");
    }

    #[test]
    fn closure_examples() {
        let (alg, fns) = g2();
        assert_eq!(alg.size(), 2);
        assert_eq!(fns, projectors(2, 2).unwrap());

        let mut gens = vec![PartialFn::parse(2, 2, "0000").unwrap()];
        gens.extend(projectors(2, 2).unwrap());
        let fs = FunctionSet::new(2, 2, gens).unwrap();
        assert_eq!(algebra_from_functions(&fs, DEFAULT_CAP).unwrap().0.size(), 3);

        let empty = FunctionSet::new(2, 2, vec![]).unwrap();
        assert_eq!(algebra_from_functions(&empty, DEFAULT_CAP), Err(Error::EmptyAlgebra));
    }

    #[test]
    fn unitary_words_satisfy_star_identity() {
        // x o w = [x, mu*(w)] with empty slots read as the selectors.
        let (alg, _) = g2();
        let sel = find_selectors(&alg).unwrap().unwrap();
        for w in all_words(2, 2, 3) {
            let st = mu_state(&alg, &w).unwrap();
            let args: Vec<usize> = st
                .slots()
                .iter()
                .enumerate()
                .map(|(i, t)| t.unwrap_or(sel.get(i)))
                .collect();
            for x in 0..alg.size() {
                assert_eq!(eval_word(&alg, x, &w).unwrap(), alg.sup(x, &args));
            }
        }
    }

    #[test]
    fn column_scan_matches_ordered_scan() {
        let fs = FunctionSet::new(
            2,
            2,
            vec![PartialFn::parse(2, 2, "1---").unwrap(), PartialFn::parse(2, 2, "01-1").unwrap()],
        )
        .unwrap();
        let (alg, _) = algebra_from_functions(&fs, DEFAULT_CAP).unwrap();
        let s = alg.size();
        assert_eq!(first_superassoc_failure(&alg), None);
        assert_eq!(first_superassoc_failure_ordered(&alg), None);
        for x in 0..s {
            for t in 0..s * s {
                let ys = [t / s, t % s];
                let mut broken = alg.clone();
                broken.set_sup(x, &ys, (alg.sup(x, &ys) + 1) % s);
                assert_eq!(
                    first_superassoc_failure(&broken),
                    first_superassoc_failure_ordered(&broken),
                    "entry {x} {ys:?}"
                );
            }
        }
    }
}
