//! Exhaustive and seeded generators of small algebras.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{algebra_of_closed, check_all, reachable_mu_states, AlgebraTable};
use crate::error::{Error, Result};
use crate::nfun::{self, decode_into, index_of, tuple_count, FunctionSet, PartialFn, UNDEF};

const UNSET: u32 = u32::MAX;

fn permutations(s: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                go(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; s], &mut out);
    out
}

/// Every associative operation on `0..s`, in lexicographic order of tables.
pub fn associative_tables(s: usize) -> Vec<Vec<u32>> {
    fn consistent(t: &[u32], s: usize) -> bool {
        for x in 0..s {
            for y in 0..s {
                let xy = t[x * s + y];
                if xy == UNSET {
                    continue;
                }
                for z in 0..s {
                    let yz = t[y * s + z];
                    if yz == UNSET {
                        continue;
                    }
                    let (l, r) = (t[xy as usize * s + z], t[x * s + yz as usize]);
                    if l != UNSET && r != UNSET && l != r {
                        return false;
                    }
                }
            }
        }
        true
    }
    fn go(t: &mut Vec<u32>, pos: usize, s: usize, out: &mut Vec<Vec<u32>>) {
        if pos == t.len() {
            out.push(t.clone());
            return;
        }
        for v in 0..s as u32 {
            t[pos] = v;
            if consistent(t, s) {
                go(t, pos + 1, s, out);
            }
        }
        t[pos] = UNSET;
    }
    let mut out = Vec::new();
    go(&mut vec![UNSET; s * s], 0, s, &mut out);
    out
}

fn permute_binop(b: &[u32], perm: &[usize], s: usize) -> Vec<u32> {
    let mut out = vec![0u32; b.len()];
    for x in 0..s {
        for y in 0..s {
            out[perm[x] * s + perm[y]] = perm[b[x * s + y] as usize] as u32;
        }
    }
    out
}

/// Comparison key: the Mann tables in slot order, then the bracket table.
fn encoding(alg: &AlgebraTable) -> Vec<u32> {
    let mut key: Vec<u32> = alg.binop_tables().concat();
    key.extend(alg.sup_table());
    key
}

/// Partial bracket table under construction, checked against every identity
/// instance whose cells are all filled.
struct SupSearch<'a> {
    n: usize,
    s: usize,
    binops: &'a [Vec<u32>],
    sup: Vec<u32>,
}

impl SupSearch<'_> {
    fn cell(&self, x: usize, ys: &[usize]) -> u32 {
        self.sup[ys.iter().fold(x, |acc, &y| acc * self.s + y)]
    }

    fn mann(&self, i: usize, x: usize, y: usize) -> usize {
        self.binops[i][x * self.s + y] as usize
    }

    fn consistent(&self) -> bool {
        let (n, s) = (self.n, self.s);
        let mut args = vec![0usize; 2 * n + 1];
        let mut inner = vec![0usize; n];
        // superassociativity
        'outer: for k in 0..tuple_count(s, 2 * n + 1) {
            decode_into(s, k, &mut args);
            let (x, ys, zs) = (args[0], &args[1..=n], &args[n + 1..]);
            let a = self.cell(x, ys);
            if a == UNSET {
                continue;
            }
            let lhs = self.cell(a as usize, zs);
            if lhs == UNSET {
                continue;
            }
            for (slot, &y) in inner.iter_mut().zip(ys) {
                let v = self.cell(y, zs);
                if v == UNSET {
                    continue 'outer;
                }
                *slot = v as usize;
            }
            let rhs = self.cell(x, &inner);
            if rhs != UNSET && lhs != rhs {
                return false;
            }
        }
        let mut zs = vec![0usize; n];
        let mut moved = vec![0usize; n];
        for i in 0..n {
            for x in 0..s {
                for y in 0..s {
                    // [x o_i y, z] = [x, z with slot i := [y, z]]
                    let xy = self.mann(i, x, y);
                    for k in 0..tuple_count(s, n) {
                        decode_into(s, k, &mut zs);
                        let lhs = self.cell(xy, &zs);
                        let yz = self.cell(y, &zs);
                        if lhs == UNSET || yz == UNSET {
                            continue;
                        }
                        moved.copy_from_slice(&zs);
                        moved[i] = yz as usize;
                        let rhs = self.cell(x, &moved);
                        if rhs != UNSET && lhs != rhs {
                            return false;
                        }
                    }
                }
                // [x, y] o_i z = [x, y_0 o_i z, ..]
                for k in 0..tuple_count(s, n) {
                    decode_into(s, k, &mut zs);
                    let head = self.cell(x, &zs);
                    if head == UNSET {
                        continue;
                    }
                    for z in 0..s {
                        for (m, &y) in moved.iter_mut().zip(&zs) {
                            *m = self.mann(i, y, z);
                        }
                        let rhs = self.cell(x, &moved);
                        if rhs != UNSET && self.mann(i, head as usize, z) as u32 != rhs {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn fill(&mut self, free: &[usize], pos: usize, out: &mut Vec<Vec<u32>>) {
        if pos == free.len() {
            out.push(self.sup.clone());
            return;
        }
        for v in 0..self.s as u32 {
            self.sup[free[pos]] = v;
            if self.consistent() {
                self.fill(free, pos + 1, out);
            }
        }
        self.sup[free[pos]] = UNSET;
    }
}

/// All bracket tables completing the given Mann tables to an algebra that
/// passes the axioms and the representability conditions.
fn completions(n: usize, s: usize, binops: &[Vec<u32>]) -> Result<Vec<AlgebraTable>> {
    let cells = tuple_count(s, n + 1);
    let probe = AlgebraTable::new(n, s, vec![0; cells], binops.to_vec())?;
    let reach = reachable_mu_states(&probe);
    if reach.collision().is_some() {
        return Ok(Vec::new());
    }
    let mut search = SupSearch {
        n,
        s,
        binops,
        sup: vec![UNSET; cells],
    };
    // A word touching every slot pins the bracket at its mu-tuple.
    let mut args = vec![0usize; n + 1];
    for k in 0..reach.len() {
        if let Some(t) = reach.state(k).elements() {
            args[1..].copy_from_slice(&t);
            for x in 0..s {
                args[0] = x;
                search.sup[index_of(s, &args)] = reach.value(k, x) as u32;
            }
        }
    }
    if !search.consistent() {
        return Ok(Vec::new());
    }
    let free: Vec<usize> = (0..cells).filter(|&c| search.sup[c] == UNSET).collect();
    let mut tables = Vec::new();
    search.fill(&free, 0, &mut tables);
    let mut out = Vec::new();
    for sup in tables {
        let alg = AlgebraTable::new(n, s, sup, binops.to_vec())?;
        if check_all(&alg).passed() {
            out.push(alg);
        }
    }
    Ok(out)
}

/// Every algebra on `0..size` with `n` Mann operations that passes the axioms
/// and the representability conditions, ordered by Mann tables then bracket
/// table. With `up_to_iso`, only the smallest relabeling of each algebra is
/// kept.
pub fn enumerate_abstract(n: usize, size: usize, up_to_iso: bool) -> Result<Vec<AlgebraTable>> {
    if n == 0 || size == 0 {
        return Err(Error::Malformed("n and size must be positive".into()));
    }
    let assoc = associative_tables(size);
    let perms = permutations(size);
    // Workers take disjoint ranges of Mann-table choices; the merged output is
    // sorted, so the result does not depend on scheduling.
    let chunks: Vec<Result<Vec<AlgebraTable>>> = (0..tuple_count(assoc.len(), n))
        .into_par_iter()
        .map(|k| {
            let mut choice = vec![0usize; n];
            decode_into(assoc.len(), k, &mut choice);
            let binops: Vec<Vec<u32>> = choice.iter().map(|&c| assoc[c].clone()).collect();
            if up_to_iso {
                let key = binops.concat();
                let smallest = perms.iter().all(|p| {
                    let moved: Vec<u32> =
                        binops.iter().flat_map(|b| permute_binop(b, p, size)).collect();
                    key <= moved
                });
                if !smallest {
                    return Ok(Vec::new());
                }
            }
            let mut kept = completions(n, size, &binops)?;
            if up_to_iso {
                kept.retain(|alg| {
                    let key = encoding(alg);
                    perms.iter().all(|p| encoding(&alg.permuted(p)) >= key)
                });
            }
            Ok(kept)
        })
        .collect();
    let mut out = Vec::new();
    for chunk in chunks {
        out.extend(chunk?);
    }
    out.sort_by_key(encoding);
    Ok(out)
}

/// Which closed function sets to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FunctionSearch {
    pub n: usize,
    pub carrier: usize,
    pub partial: bool,
    pub with_projectors: bool,
    /// Only closures of at most this many generators.
    pub max_generators: Option<usize>,
    pub cap: usize,
}

const MAX_UNIVERSE: usize = 1 << 16;

/// Candidate functions, indexed in lexicographic order of their tables (with
/// undefined sorting first in partial mode).
fn universe(n: usize, m: usize, partial: bool) -> Result<Vec<PartialFn>> {
    let len = tuple_count(m, n);
    let digits = if partial { m + 1 } else { m };
    let count = (digits as f64).powi(len as i32);
    if count > MAX_UNIVERSE as f64 {
        return Err(Error::Precondition(format!(
            "{count} candidate functions exceed the limit of {MAX_UNIVERSE}"
        )));
    }
    let mut buf = vec![0usize; len];
    (0..count as usize)
        .map(|k| {
            decode_into(digits, k, &mut buf);
            let table = buf
                .iter()
                .map(|&d| match (partial, d) {
                    (true, 0) => UNDEF,
                    (true, d) => (d - 1) as u32,
                    (false, d) => d as u32,
                })
                .collect();
            PartialFn::new(n, m, table)
        })
        .collect()
}

/// Closed nonempty function sets, each listed in universe order, sorted
/// lexicographically by member indices.
pub fn enumerate_function_sets(opts: &FunctionSearch) -> Result<Vec<FunctionSet>> {
    let (n, m) = (opts.n, opts.carrier);
    if n == 0 || m == 0 {
        return Err(Error::Malformed("n and carrier must be positive".into()));
    }
    let uni = universe(n, m, opts.partial)?;
    let id: HashMap<&[u32], usize> = uni.iter().enumerate().map(|(k, f)| (f.table(), k)).collect();
    let close_ids = |gens: &[usize]| -> Result<Vec<usize>> {
        let fns = nfun::close(n, m, gens.iter().map(|&g| uni[g].clone()).collect(), opts.cap)?;
        let mut ids: Vec<usize> = fns.iter().map(|f| id[f.table()]).collect();
        ids.sort_unstable();
        Ok(ids)
    };

    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    match opts.max_generators {
        Some(k) => {
            let mut gens = Vec::new();
            subsets(uni.len(), k, &mut gens, 0, &mut |g| {
                found.insert(close_ids(g)?);
                Ok(())
            })?;
        }
        None => {
            // Every closed set is reached by adding one function at a time.
            let mut queue = VecDeque::new();
            let mut seen = HashSet::new();
            for f in 0..uni.len() {
                let c = close_ids(&[f])?;
                if seen.insert(c.clone()) {
                    queue.push_back(c);
                }
            }
            while let Some(set) = queue.pop_front() {
                for f in 0..uni.len() {
                    if set.binary_search(&f).is_ok() {
                        continue;
                    }
                    let mut gens = set.clone();
                    gens.push(f);
                    let c = close_ids(&gens)?;
                    if seen.insert(c.clone()) {
                        queue.push_back(c);
                    }
                }
                found.insert(set);
            }
        }
    }

    let projs: Vec<usize> = nfun::projectors(m, n)?.iter().map(|p| id[p.table()]).collect();
    found
        .into_iter()
        .filter(|set| !opts.with_projectors || projs.iter().all(|p| set.binary_search(p).is_ok()))
        .map(|set| FunctionSet::new(n, m, set.iter().map(|&k| uni[k].clone()).collect()))
        .collect()
}

fn subsets(
    total: usize,
    max: usize,
    current: &mut Vec<usize>,
    start: usize,
    f: &mut impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if !current.is_empty() {
        f(current)?;
    }
    if current.len() == max {
        return Ok(());
    }
    for k in start..total {
        current.push(k);
        subsets(total, max, current, k + 1, f)?;
        current.pop();
    }
    Ok(())
}

const RANDOM_ATTEMPTS: usize = 20_000;

/// A seed-determined algebra of exactly `size` elements: the closure of a few
/// random partial functions on a carrier of at most 3 points, randomly
/// relabeled, kept only if it passes every algebra check.
pub fn random_algebra(seed: u64, size: usize, n: usize) -> Result<AlgebraTable> {
    if n == 0 || size == 0 {
        return Err(Error::Malformed("n and size must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_ATTEMPTS {
        let m = rng.gen_range(1..=3usize);
        let len = tuple_count(m, n);
        if len > 64 {
            continue;
        }
        let count = rng.gen_range(1..=3usize);
        let gens: Vec<PartialFn> = (0..count)
            .map(|_| {
                let table = (0..len)
                    .map(|_| {
                        if rng.gen_bool(0.3) {
                            UNDEF
                        } else {
                            rng.gen_range(0..m) as u32
                        }
                    })
                    .collect();
                PartialFn::new(n, m, table)
            })
            .collect::<Result<_>>()?;
        let fns = match nfun::close(n, m, gens, size) {
            Ok(f) if f.len() == size => f,
            Ok(_) | Err(Error::CapExceeded { .. }) => continue,
            Err(e) => return Err(e),
        };
        let mut perm: Vec<usize> = (0..size).collect();
        perm.shuffle(&mut rng);
        let alg = algebra_of_closed(n, &fns)?.permuted(&perm);
        if check_all(&alg).passed() {
            return Ok(alg);
        }
    }
    Err(Error::Precondition(format!(
        "no algebra of size {size} found in {RANDOM_ATTEMPTS} attempts"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn associative_counts() {
        assert_eq!(associative_tables(1).len(), 1);
        assert_eq!(associative_tables(2).len(), 8);
        assert_eq!(associative_tables(3).len(), 113);
    }

    /// Every table on two elements, filtered by the full check.
    #[test]
    fn abstract_size_two_matches_brute_force() {
        let (n, s) = (2, 2);
        let cells = tuple_count(s, n + 1) + n * s * s;
        let mut brute = Vec::new();
        for code in 0..1usize << cells {
            let bits: Vec<u32> = (0..cells).map(|k| (code >> (cells - 1 - k) & 1) as u32).collect();
            let binops = vec![bits[..4].to_vec(), bits[4..8].to_vec()];
            let alg = AlgebraTable::new(n, s, bits[8..].to_vec(), binops).unwrap();
            if check_all(&alg).passed() {
                brute.push(alg);
            }
        }
        brute.sort_by_key(encoding);
        let got = enumerate_abstract(n, s, false).unwrap();
        assert_eq!(got, brute);

        let iso = enumerate_abstract(n, s, true).unwrap();
        let classes: BTreeSet<Vec<u32>> = brute
            .iter()
            .map(|a| {
                permutations(s)
                    .iter()
                    .map(|p| encoding(&a.permuted(p)))
                    .min()
                    .unwrap()
            })
            .collect();
        assert_eq!(iso.len(), classes.len());
    }

    #[test]
    fn one_element_algebras() {
        for n in 1..=3 {
            assert_eq!(enumerate_abstract(n, 1, false).unwrap().len(), 1);
        }
    }

    #[test]
    fn closed_full_function_sets() {
        let opts = FunctionSearch {
            n: 2,
            carrier: 2,
            partial: false,
            with_projectors: false,
            max_generators: None,
            cap: 512,
        };
        let all = enumerate_function_sets(&opts).unwrap();
        assert_eq!(all.len(), 57);
        let with = enumerate_function_sets(&FunctionSearch {
            with_projectors: true,
            ..opts
        })
        .unwrap();
        assert_eq!(with.len(), 26);
        // Generated from at most 16 generators, the same sets appear.
        let by_gens = enumerate_function_sets(&FunctionSearch {
            max_generators: Some(2),
            ..opts
        })
        .unwrap();
        assert!(by_gens.iter().all(|s| all.contains(s)));
        for fs in &all {
            let closed = nfun::close(2, 2, fs.functions().to_vec(), 512).unwrap();
            assert_eq!(closed.len(), fs.len());
        }
    }

    #[test]
    fn random_is_seeded() {
        let a = random_algebra(0, 3, 2).unwrap();
        assert_eq!(a, random_algebra(0, 3, 2).unwrap());
        assert_eq!(a.size(), 3);
        let others: Vec<_> = (1..6).map(|s| random_algebra(s, 3, 2).unwrap()).collect();
        assert!(others.iter().any(|b| *b != a));
        assert!(check_all(&a).passed());
    }
}
