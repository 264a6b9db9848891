//! Partial n-place functions on a finite carrier and the two function-level
//! operations: superposition and Mann composition.
//!
//! A function is a flat table of length `m^n`. The tuple `(a_0, .., a_{n-1})`
//! lives at index `sum a_k * m^(n-1-k)`, so `a_0` is the most significant digit.
//! Undefined entries hold [`UNDEF`].

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Table entry for "undefined at this tuple".
pub const UNDEF: u32 = u32::MAX;

/// Size of a finite carrier `{0, .., m-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Carrier(usize);

impl Carrier {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyAlgebra);
        }
        Ok(Carrier(size))
    }

    pub fn size(self) -> usize {
        self.0
    }
}

/// `m^n`, the number of n-tuples over a carrier of size `m`.
pub fn tuple_count(m: usize, n: usize) -> usize {
    m.checked_pow(n as u32).expect("tuple space overflows usize")
}

/// Row-major index of a tuple.
pub fn index_of(m: usize, tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &a| acc * m + a)
}

/// Inverse of [`index_of`], writing into `out` (whose length fixes `n`).
pub fn decode_into(m: usize, mut index: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = index % m;
        index /= m;
    }
}

pub fn decode(m: usize, n: usize, index: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    decode_into(m, index, &mut out);
    out
}

/// All n-tuples over `{0..m-1}` in index order.
pub fn tuples(m: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..tuple_count(m, n)).map(move |k| decode(m, n, k))
}

/// A partial map `A^n -> A` stored as a flat table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialFn {
    arity: usize,
    carrier: usize,
    table: Vec<u32>,
}

impl PartialFn {
    pub fn new(arity: usize, carrier: usize, table: Vec<u32>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Malformed("arity must be positive".into()));
        }
        Carrier::new(carrier)?;
        let len = tuple_count(carrier, arity);
        if table.len() != len {
            return Err(Error::Malformed(format!(
                "table has {} entries, expected {}",
                table.len(),
                len
            )));
        }
        if let Some(&bad) = table.iter().find(|&&v| v != UNDEF && v as usize >= carrier) {
            return Err(Error::IndexOutOfRange {
                index: bad as usize,
                bound: carrier,
            });
        }
        Ok(PartialFn {
            arity,
            carrier,
            table,
        })
    }

    pub fn from_options(arity: usize, carrier: usize, entries: &[Option<usize>]) -> Result<Self> {
        let table = entries
            .iter()
            .map(|e| e.map_or(UNDEF, |v| v as u32))
            .collect();
        PartialFn::new(arity, carrier, table)
    }

    /// Builds a function from a closure over tuples; `None` marks undefined.
    pub fn from_fn(
        arity: usize,
        carrier: usize,
        mut f: impl FnMut(&[usize]) -> Option<usize>,
    ) -> Result<Self> {
        let mut buf = vec![0; arity];
        let table = (0..tuple_count(carrier, arity))
            .map(|k| {
                decode_into(carrier, k, &mut buf);
                f(&buf).map_or(UNDEF, |v| v as u32)
            })
            .collect();
        PartialFn::new(arity, carrier, table)
    }

    /// Parses a compact string such as `"1---"` or `"0110"`; `-` is undefined.
    /// Only usable for carriers of size at most 10.
    pub fn parse(arity: usize, carrier: usize, s: &str) -> Result<Self> {
        let entries: Vec<Option<usize>> = s
            .chars()
            .map(|c| match c {
                '-' => Ok(None),
                d => d
                    .to_digit(10)
                    .map(|v| Some(v as usize))
                    .ok_or_else(|| Error::Malformed(format!("bad table character {c:?}"))),
            })
            .collect::<Result<_>>()?;
        PartialFn::from_options(arity, carrier, &entries)
    }

    pub fn constant(arity: usize, carrier: usize, value: usize) -> Result<Self> {
        PartialFn::from_fn(arity, carrier, |_| Some(value))
    }

    pub fn nowhere(arity: usize, carrier: usize) -> Result<Self> {
        PartialFn::from_fn(arity, carrier, |_| None)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Value at a tuple index.
    pub fn get(&self, index: usize) -> Option<usize> {
        match self.table[index] {
            UNDEF => None,
            v => Some(v as usize),
        }
    }

    pub fn eval(&self, tuple: &[usize]) -> Option<usize> {
        self.get(index_of(self.carrier, tuple))
    }

    pub fn is_full(&self) -> bool {
        self.table.iter().all(|&v| v != UNDEF)
    }

    pub fn is_defined_at(&self, index: usize) -> bool {
        self.table[index] != UNDEF
    }

    /// Indices of the tuples where the function is defined.
    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.table.len()).filter(move |&k| self.table[k] != UNDEF)
    }

    fn same_shape(&self, other: &PartialFn) -> Result<()> {
        if self.arity != other.arity || self.carrier != other.carrier {
            return Err(Error::Dimension(format!(
                "({}-ary on {}) vs ({}-ary on {})",
                self.arity, self.carrier, other.arity, other.carrier
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for PartialFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &v in &self.table {
            if v == UNDEF {
                write!(f, "-")?;
            } else if self.carrier <= 10 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v},")?;
            }
        }
        Ok(())
    }
}

/// `[f, g_1, .., g_n]`: defined at `a` iff every `g_i` is defined at `a` and `f`
/// is defined at `(g_1(a), .., g_n(a))`.
pub fn superpose(f: &PartialFn, gs: &[PartialFn]) -> Result<PartialFn> {
    if gs.len() != f.arity {
        return Err(Error::Dimension(format!(
            "superposition of a {}-ary function needs {} arguments, got {}",
            f.arity,
            f.arity,
            gs.len()
        )));
    }
    for g in gs {
        f.same_shape(g)?;
    }
    Ok(superpose_unchecked(f, gs.iter()))
}

pub(crate) fn superpose_unchecked<'a>(
    f: &PartialFn,
    gs: impl Iterator<Item = &'a PartialFn> + Clone,
) -> PartialFn {
    let m = f.carrier;
    let table = (0..f.table.len())
        .map(|k| {
            let mut idx = 0usize;
            for g in gs.clone() {
                let v = g.table[k];
                if v == UNDEF {
                    return UNDEF;
                }
                idx = idx * m + v as usize;
            }
            f.table[idx]
        })
        .collect();
    PartialFn {
        arity: f.arity,
        carrier: m,
        table,
    }
}

/// `f o_i g`: substitutes `g` into argument slot `i` (0-based) of `f`.
pub fn mann_compose(f: &PartialFn, g: &PartialFn, i: usize) -> Result<PartialFn> {
    f.same_shape(g)?;
    if i >= f.arity {
        return Err(Error::IndexOutOfRange {
            index: i,
            bound: f.arity,
        });
    }
    Ok(mann_unchecked(f, g, i))
}

pub(crate) fn mann_unchecked(f: &PartialFn, g: &PartialFn, i: usize) -> PartialFn {
    let m = f.carrier;
    let stride = tuple_count(m, f.arity - 1 - i);
    let table = (0..f.table.len())
        .map(|k| match g.table[k] {
            UNDEF => UNDEF,
            v => {
                let a_i = (k / stride) % m;
                f.table[k - a_i * stride + v as usize * stride]
            }
        })
        .collect();
    PartialFn {
        arity: f.arity,
        carrier: m,
        table,
    }
}

/// The i-th projector `I_i(a) = a_i` (0-based `i`).
pub fn projector(carrier: usize, n: usize, i: usize) -> Result<PartialFn> {
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, bound: n });
    }
    PartialFn::from_fn(n, carrier, |t| Some(t[i]))
}

pub fn projectors(carrier: usize, n: usize) -> Result<Vec<PartialFn>> {
    (0..n).map(|i| projector(carrier, n, i)).collect()
}

/// `f ⊆ g`: the domain of `f` is contained in that of `g` and they agree on it.
pub fn is_included(f: &PartialFn, g: &PartialFn) -> Result<bool> {
    f.same_shape(g)?;
    Ok(included_unchecked(f, g))
}

pub(crate) fn included_unchecked(f: &PartialFn, g: &PartialFn) -> bool {
    f.table
        .iter()
        .zip(&g.table)
        .all(|(&a, &b)| a == UNDEF || a == b)
}

/// Restricts `f` to the tuples listed in `keep`.
pub fn restrict_to(f: &PartialFn, keep: &[Vec<usize>]) -> Result<PartialFn> {
    let mut mask = vec![false; f.table.len()];
    for t in keep {
        if t.len() != f.arity {
            return Err(Error::Dimension(format!(
                "tuple of length {} for a {}-ary function",
                t.len(),
                f.arity
            )));
        }
        if let Some(&bad) = t.iter().find(|&&a| a >= f.carrier) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                bound: f.carrier,
            });
        }
        mask[index_of(f.carrier, t)] = true;
    }
    Ok(restrict_to_mask(f, &mask))
}

/// Restricts `f` to the tuple indices whose mask entry is set.
pub fn restrict_to_mask(f: &PartialFn, mask: &[bool]) -> PartialFn {
    let table = f
        .table
        .iter()
        .zip(mask)
        .map(|(&v, &keep)| if keep { v } else { UNDEF })
        .collect();
    PartialFn {
        arity: f.arity,
        carrier: f.carrier,
        table,
    }
}

/// Totalises `f` over `A ∪ {c}` with `c = m`: `f` on its domain, `c` elsewhere
/// (including every tuple that mentions `c`).
pub fn complete_function(f: &PartialFn) -> PartialFn {
    let m = f.carrier;
    let c = m as u32;
    let mut buf = vec![0; f.arity];
    let table = (0..tuple_count(m + 1, f.arity))
        .map(|k| {
            decode_into(m + 1, k, &mut buf);
            if buf.iter().any(|&a| a == m) {
                c
            } else {
                match f.table[index_of(m, &buf)] {
                    UNDEF => c,
                    v => v,
                }
            }
        })
        .collect();
    PartialFn {
        arity: f.arity,
        carrier: m + 1,
        table,
    }
}

/// Re-embeds `f` into a larger carrier; tuples using new points are undefined.
pub fn widen(f: &PartialFn, carrier: usize) -> Result<PartialFn> {
    if carrier < f.carrier {
        return Err(Error::Dimension(format!(
            "cannot widen carrier {} to {}",
            f.carrier, carrier
        )));
    }
    let mut buf = vec![0; f.arity];
    let table = (0..tuple_count(carrier, f.arity))
        .map(|k| {
            decode_into(carrier, k, &mut buf);
            if buf.iter().any(|&a| a >= f.carrier) {
                UNDEF
            } else {
                f.table[index_of(f.carrier, &buf)]
            }
        })
        .collect();
    Ok(PartialFn {
        arity: f.arity,
        carrier,
        table,
    })
}

/// A set of distinct functions sharing arity and carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionSet {
    arity: usize,
    carrier: usize,
    fns: Vec<PartialFn>,
}

impl FunctionSet {
    /// Rejects duplicates and shape mismatches.
    pub fn new(arity: usize, carrier: usize, fns: Vec<PartialFn>) -> Result<Self> {
        Carrier::new(carrier)?;
        let mut seen = HashMap::new();
        for (k, f) in fns.iter().enumerate() {
            if f.arity != arity || f.carrier != carrier {
                return Err(Error::Dimension(format!(
                    "function {k} is {}-ary on {}, set is {}-ary on {}",
                    f.arity, f.carrier, arity, carrier
                )));
            }
            if let Some(prev) = seen.insert(&f.table, k) {
                return Err(Error::Malformed(format!(
                    "functions {prev} and {k} are equal"
                )));
            }
        }
        Ok(FunctionSet {
            arity,
            carrier,
            fns,
        })
    }

    /// Keeps the first occurrence of every table.
    pub fn dedup(arity: usize, carrier: usize, fns: impl IntoIterator<Item = PartialFn>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        let fns: Vec<_> = fns
            .into_iter()
            .filter(|f| seen.insert(f.table.clone()))
            .collect();
        FunctionSet::new(arity, carrier, fns)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    pub fn functions(&self) -> &[PartialFn] {
        &self.fns
    }

    pub fn into_functions(self) -> Vec<PartialFn> {
        self.fns
    }

    pub fn len(&self) -> usize {
        self.fns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fns.is_empty()
    }

    pub fn position(&self, f: &PartialFn) -> Option<usize> {
        self.fns.iter().position(|g| g == f)
    }

    pub fn contains(&self, f: &PartialFn) -> bool {
        self.position(f).is_some()
    }
}

/// Closes `generators` under superposition and all Mann compositions.
///
/// Generators keep their order; new functions are appended in discovery order,
/// so the result is deterministic. Fails once more than `cap` functions exist.
pub fn close(arity: usize, carrier: usize, generators: Vec<PartialFn>, cap: usize) -> Result<Vec<PartialFn>> {
    let mut fns: Vec<PartialFn> = Vec::new();
    let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
    for g in generators {
        if g.arity != arity || g.carrier != carrier {
            return Err(Error::Dimension("generator shape mismatch".into()));
        }
        if !index.contains_key(&g.table) {
            index.insert(g.table.clone(), fns.len());
            fns.push(g);
        }
    }
    if fns.len() > cap {
        return Err(Error::CapExceeded { cap });
    }

    // Semi-naive: each round only forms products that involve at least one
    // function discovered in the previous round.
    let mut done = 0usize;
    while done < fns.len() {
        let len = fns.len();
        let mut fresh = Vec::new();
        let push = |h: PartialFn, fresh: &mut Vec<PartialFn>, index: &mut HashMap<Vec<u32>, usize>| {
            if !index.contains_key(&h.table) {
                index.insert(h.table.clone(), len + fresh.len());
                fresh.push(h);
            }
        };
        let mut combo = vec![0usize; arity + 1];
        for k in 0..tuple_count(len, arity + 1) {
            decode_into(len, k, &mut combo);
            if combo.iter().all(|&c| c < done) {
                continue;
            }
            let h = superpose_unchecked(&fns[combo[0]], combo[1..].iter().map(|&c| &fns[c]));
            push(h, &mut fresh, &mut index);
            if fns.len() + fresh.len() > cap {
                return Err(Error::CapExceeded { cap });
            }
        }
        for a in 0..len {
            for b in 0..len {
                if a < done && b < done {
                    continue;
                }
                for i in 0..arity {
                    let h = mann_unchecked(&fns[a], &fns[b], i);
                    push(h, &mut fresh, &mut index);
                }
            }
            if fns.len() + fresh.len() > cap {
                return Err(Error::CapExceeded { cap });
            }
        }
        done = len;
        fns.extend(fresh);
    }
    Ok(fns)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PartialFn {
        PartialFn::parse(2, 2, s).unwrap()
    }

    /// Tuple-by-tuple evaluation straight from the definitions.
    fn superpose_oracle(f: &PartialFn, gs: &[PartialFn]) -> PartialFn {
        PartialFn::from_fn(f.arity(), f.carrier(), |t| {
            let inner: Option<Vec<usize>> = gs.iter().map(|g| g.eval(t)).collect();
            f.eval(&inner?)
        })
        .unwrap()
    }

    fn mann_oracle(f: &PartialFn, g: &PartialFn, i: usize) -> PartialFn {
        PartialFn::from_fn(f.arity(), f.carrier(), |t| {
            let v = g.eval(t)?;
            let mut u = t.to_vec();
            u[i] = v;
            f.eval(&u)
        })
        .unwrap()
    }

    #[test]
    fn superpose_examples() {
        let xor = p("0110");
        let i1 = projector(2, 2, 0).unwrap();
        let i2 = projector(2, 2, 1).unwrap();
        let swapped = superpose(&xor, &[i2.clone(), i1.clone()]).unwrap();
        assert_eq!(swapped, superpose_oracle(&xor, &[i2.clone(), i1.clone()]));
        assert_eq!(swapped.to_string(), "0110");

        assert_eq!(superpose(&xor, &[i1.clone(), i2.clone()]).unwrap(), xor);

        let c1 = p("1111");
        let one = p("1---");
        assert_eq!(superpose(&i1, &[c1, one]).unwrap().to_string(), "1---");
    }

    #[test]
    fn superpose_rejects_mismatch() {
        let f = p("0110");
        let g = PartialFn::parse(2, 3, "000000000").unwrap();
        assert!(matches!(superpose(&f, &[g.clone(), g]), Err(Error::Dimension(_))));
        assert!(matches!(superpose(&f, &[f.clone()]), Err(Error::Dimension(_))));
    }

    #[test]
    fn mann_examples() {
        let xor = p("0110");
        let c0 = p("0000");
        assert_eq!(mann_compose(&xor, &c0, 0).unwrap().to_string(), "0101");
        for i in 0..2 {
            let pi = projector(2, 2, i).unwrap();
            assert_eq!(mann_compose(&xor, &pi, i).unwrap(), xor);
        }
        // "1---" o_2 C0: defined where (a1, 0) = (0, 0), i.e. at (0,0) and (0,1).
        let one = p("1---");
        let got = mann_compose(&one, &c0, 1).unwrap();
        assert_eq!(got, mann_oracle(&one, &c0, 1));
        assert_eq!(got.to_string(), "11--");
        assert!(matches!(
            mann_compose(&xor, &c0, 2),
            Err(Error::IndexOutOfRange { index: 2, bound: 2 })
        ));
    }

    #[test]
    fn projector_tables() {
        assert_eq!(projector(2, 2, 0).unwrap().to_string(), "0011");
        assert_eq!(projector(2, 2, 1).unwrap().to_string(), "0101");
        assert_eq!(projector(3, 2, 0).unwrap().to_string(), "000111222");
        assert!(projector(2, 2, 2).is_err());
    }

    #[test]
    fn inclusion_and_restriction() {
        let one = p("1---");
        let c1 = p("1111");
        assert!(is_included(&one, &c1).unwrap());
        assert!(!is_included(&c1, &one).unwrap());
        assert!(is_included(&one, &one).unwrap());

        assert_eq!(restrict_to(&c1, &[vec![0, 0]]).unwrap(), one);
        let all: Vec<_> = tuples(2, 2).collect();
        assert_eq!(restrict_to(&c1, &all).unwrap(), c1);
        assert_eq!(restrict_to(&one, &[]).unwrap(), p("----"));
        assert!(restrict_to(&one, &[vec![2, 0]]).is_err());
    }

    #[test]
    fn completion_examples() {
        let f0 = complete_function(&p("1---"));
        assert_eq!(f0.carrier(), 3);
        assert_eq!(f0.to_string(), "122222222");

        let xor = complete_function(&p("0110"));
        assert_eq!(xor.to_string(), "012102222");

        let none = complete_function(&p("----"));
        assert_eq!(none, PartialFn::constant(2, 3, 2).unwrap());
    }

    #[test]
    fn parse_and_bounds() {
        assert!(PartialFn::parse(2, 2, "012").is_err());
        assert!(PartialFn::parse(2, 2, "0120").is_err());
        assert!(PartialFn::new(2, 0, vec![]).is_err());
        assert_eq!(index_of(3, &[2, 1]), 7);
        assert_eq!(decode(3, 2, 7), vec![2, 1]);
    }

    #[test]
    fn function_set_rejects_duplicates() {
        let a = p("0110");
        assert!(FunctionSet::new(2, 2, vec![a.clone(), a.clone()]).is_err());
        let s = FunctionSet::dedup(2, 2, vec![a.clone(), a.clone(), p("1---")]).unwrap();
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn closure_of_projectors_is_closed() {
        let fs = close(2, 2, projectors(2, 2).unwrap(), 512).unwrap();
        assert_eq!(fs.len(), 2);
        let c0 = p("0000");
        let mut gens = vec![c0];
        gens.extend(projectors(2, 2).unwrap());
        assert_eq!(close(2, 2, gens, 512).unwrap().len(), 3);
        assert!(matches!(
            close(2, 3, vec![PartialFn::parse(2, 3, "012120201").unwrap()], 1),
            Err(Error::CapExceeded { cap: 1 })
        ));
    }

    #[test]
    fn widen_keeps_values() {
        let w = widen(&p("1-0-"), 3).unwrap();
        assert_eq!(w.to_string(), "1--0-----");
    }
}
