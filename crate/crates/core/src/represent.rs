//! Representations of abstract algebras by n-place functions.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::algebra::{
    algebra_of_closed, check_all, find_selectors, reachable_mu_states, AlgebraTable,
    MuReachability, SelectorSet,
};
use crate::error::{Error, Result};
use crate::nfun::{
    self, complete_function, decode_into, included_unchecked, index_of, tuple_count, FunctionSet,
    PartialFn, UNDEF,
};
use crate::relations::{BinaryRelation, QuasiOrder};
use crate::report::{Check, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepKind {
    Embedding,
    Unitary,
    General,
    Completed,
    Simplest,
    Sum,
    Union,
    Ordered,
    Given,
}

/// A map from algebra elements to partial functions on a common carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    n: usize,
    carrier: usize,
    images: Vec<PartialFn>,
    kind: RepKind,
    verified: Option<bool>,
    block_offsets: Vec<usize>,
}

impl Representation {
    pub fn new(n: usize, carrier: usize, images: Vec<PartialFn>, kind: RepKind) -> Result<Self> {
        if images.is_empty() {
            return Err(Error::EmptyAlgebra);
        }
        for (g, f) in images.iter().enumerate() {
            if f.arity() != n || f.carrier() != carrier {
                return Err(Error::Dimension(format!(
                    "image of {g} is {}-ary on {}, expected {}-ary on {}",
                    f.arity(),
                    f.carrier(),
                    n,
                    carrier
                )));
            }
        }
        Ok(Representation {
            n,
            carrier,
            images,
            kind,
            verified: None,
            block_offsets: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    pub fn source_size(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[PartialFn] {
        &self.images
    }

    pub fn image(&self, g: usize) -> &PartialFn {
        &self.images[g]
    }

    pub fn kind(&self) -> RepKind {
        self.kind
    }

    pub fn set_kind(&mut self, kind: RepKind) {
        self.kind = kind;
    }

    /// Outcome of the last [`Representation::verify`], if any.
    pub fn verified(&self) -> Option<bool> {
        self.verified
    }

    /// Carrier offsets of the summands, for sums.
    pub fn block_offsets(&self) -> &[usize] {
        &self.block_offsets
    }

    pub fn verify(&mut self, alg: &AlgebraTable) -> Result<Report> {
        let report = verify_representation(alg, self)?;
        self.verified = Some(report.passed());
        Ok(report)
    }

    fn check_source(&self, alg: &AlgebraTable) -> Result<()> {
        if self.images.len() != alg.size() || self.n != alg.n() {
            return Err(Error::SourceMismatch);
        }
        Ok(())
    }
}

/// Both homomorphism equations, exhaustively.
///
/// Counterexamples: `superposition` reports `[x, y_0..]`, `mann` reports
/// `[i, x, y]`. At most one per family.
pub fn verify_representation(alg: &AlgebraTable, rep: &Representation) -> Result<Report> {
    rep.check_source(alg)?;
    let (n, s) = (alg.n(), alg.size());
    let img = &rep.images;
    let mut report = Report::new();

    let mut args = vec![0usize; n + 1];
    let mut sup_cex = None;
    let scan = if superposition_holds(alg, img, rep.carrier) { 0 } else { tuple_count(s, n + 1) };
    for k in 0..scan {
        decode_into(s, k, &mut args);
        let lhs = &img[alg.sup(args[0], &args[1..])];
        let rhs = nfun::superpose_unchecked(&img[args[0]], args[1..].iter().map(|&y| &img[y]));
        if *lhs != rhs {
            sup_cex = Some(args.clone());
            break;
        }
    }
    report.push(Check::from_counterexample("superposition", sup_cex));

    let mut mann_cex = None;
    'outer: for i in 0..n {
        for x in 0..s {
            for y in 0..s {
                let rhs = nfun::mann_unchecked(&img[x], &img[y], i);
                if img[alg.compose(i, x, y)] != rhs {
                    mann_cex = Some(vec![i, x, y]);
                    break 'outer;
                }
            }
        }
    }
    report.push(Check::from_counterexample("mann", mann_cex));
    Ok(report)
}

/// Both sides of the superposition equation at a point depend only on the
/// column of image values there, so each distinct column is checked once.
fn superposition_holds(alg: &AlgebraTable, img: &[PartialFn], carrier: usize) -> bool {
    let (n, s) = (alg.n(), alg.size());
    let rows = tuple_count(s, n);
    let points = tuple_count(carrier, n);
    let columns: HashSet<Vec<u32>> = (0..points)
        .map(|p| img.iter().map(|f| f.table()[p]).collect())
        .collect();
    let sup = alg.sup_table();
    let mut ys = vec![0usize; n];
    let mut inner = vec![0u32; rows];
    for col in &columns {
        for (t, slot) in inner.iter_mut().enumerate() {
            decode_into(s, t, &mut ys);
            *slot = ys.iter().try_fold(0u32, |acc, &y| {
                let v = col[y];
                (v != UNDEF).then(|| acc * carrier as u32 + v)
            })
            .unwrap_or(UNDEF);
        }
        for (x, f) in img.iter().enumerate() {
            let table = f.table();
            for (t, &at) in inner.iter().enumerate() {
                let rhs = if at == UNDEF { UNDEF } else { table[at as usize] };
                if col[sup[x * rows + t] as usize] != rhs {
                    return false;
                }
            }
        }
    }
    true
}

/// Injectivity of the image map.
pub fn verify_faithful(alg: &AlgebraTable, rep: &Representation) -> Result<bool> {
    rep.check_source(alg)?;
    let mut seen = std::collections::HashSet::new();
    Ok(rep.images.iter().all(|f| seen.insert(f.table())))
}

fn require_verified(alg: &AlgebraTable, rep: &mut Representation, faithful: bool) -> Result<()> {
    let report = rep.verify(alg)?;
    if !report.passed() {
        return Err(Error::Internal(format!(
            "{:?} representation failed {:?}",
            rep.kind,
            report.failure_names()
        )));
    }
    if faithful && !verify_faithful(alg, rep)? {
        return Err(Error::Internal(format!("{:?} representation is not faithful", rep.kind)));
    }
    Ok(())
}

/// `g -> lambda_g` with `lambda_g(x) = [g, x]`, on the algebra's own elements.
pub fn rep_unitary(alg: &AlgebraTable, sel: &SelectorSet) -> Result<Representation> {
    SelectorSet::new(alg, sel.elements().to_vec())?;
    let (n, s) = (alg.n(), alg.size());
    let images = (0..s)
        .map(|g| PartialFn::from_fn(n, s, |x| Some(alg.sup(g, x))))
        .collect::<Result<Vec<_>>>()?;
    let mut rep = Representation::new(n, s, images, RepKind::Unitary)?;
    require_verified(alg, &mut rep, true)?;
    Ok(rep)
}

/// A unitary-extension view of an algebra: elements `0..size` are `G`, the
/// next `n` indices are the selectors, and further indices (if any) are other
/// elements of the extension.
///
/// `bracket` may be partial: `None` means the value is not realised by this
/// finite view.
pub trait StarAlgebra {
    fn base(&self) -> &AlgebraTable;

    fn reach(&self) -> &MuReachability;

    /// Number of elements of the finite view.
    fn star_size(&self) -> usize;

    fn bracket(&self, head: usize, args: &[usize]) -> Option<usize>;

    fn selector(&self, i: usize) -> usize {
        self.base().size() + i
    }

    fn selectors(&self) -> Vec<usize> {
        (0..self.base().n()).map(|i| self.selector(i)).collect()
    }

    /// `head o_i x = [head, e_0.., x at slot i, ..e_{n-1}]`.
    fn mann(&self, head: usize, x: usize, i: usize) -> Option<usize> {
        let mut args = self.selectors();
        args[i] = x;
        self.bracket(head, &args)
    }

    /// The mu*-tuple of reachable state `k`, empty slots rendered as selectors.
    fn star_state(&self, k: usize) -> Vec<usize> {
        self.reach().state(k).render(self.base().size())
    }
}

/// `G ∪ {e_0..e_{n-1}}` with the bracket known on `G^n`, at the selector tuple,
/// and at every reachable mu*-tuple.
#[derive(Debug, Clone)]
pub struct StarContext {
    alg: AlgebraTable,
    reach: MuReachability,
    state_index: HashMap<Vec<usize>, usize>,
    /// `state_index` as a flat table over all tuples, when that is small.
    dense: Option<Vec<u32>>,
}

const DENSE_LIMIT: usize = 1 << 22;

impl StarContext {
    pub fn new(alg: &AlgebraTable) -> Self {
        let reach = reachable_mu_states(alg);
        let state_index: HashMap<Vec<usize>, usize> = (0..reach.len())
            .map(|k| (reach.state(k).render(alg.size()), k))
            .collect();
        let width = alg.size() + alg.n();
        let dense = (width.checked_pow(alg.n() as u32).is_some_and(|t| t <= DENSE_LIMIT)).then(|| {
            let mut table = vec![u32::MAX; tuple_count(width, alg.n())];
            for (t, &k) in &state_index {
                table[index_of(width, t)] = k as u32;
            }
            table
        });
        StarContext {
            alg: alg.clone(),
            reach,
            state_index,
            dense,
        }
    }

    pub fn algebra(&self) -> &AlgebraTable {
        &self.alg
    }
}

impl StarAlgebra for StarContext {
    fn base(&self) -> &AlgebraTable {
        &self.alg
    }

    fn reach(&self) -> &MuReachability {
        &self.reach
    }

    fn star_size(&self) -> usize {
        self.alg.size() + self.alg.n()
    }

    fn bracket(&self, head: usize, args: &[usize]) -> Option<usize> {
        let s = self.alg.size();
        if head >= s {
            // [e_i, x] = x_i
            return args.get(head - s).copied();
        }
        if args.iter().all(|&a| a < s) {
            return Some(self.alg.sup(head, args));
        }
        let k = match &self.dense {
            Some(table) => {
                let width = s + self.alg.n();
                let at = args.iter().fold(0, |acc, &a| acc * width + a);
                Some(table[at]).filter(|&k| k != u32::MAX).map(|k| k as usize)
            }
            None => self.state_index.get(args).copied(),
        };
        k.map(|k| self.reach.value(k, head))
    }
}

/// `g -> lambda*_g` on `G ∪ {e_0..e_{n-1}}` for an algebra that passes the
/// axioms and the representability conditions. Faithfulness is checked on
/// every run.
pub fn rep_general(alg: &AlgebraTable) -> Result<(Representation, StarContext)> {
    let report = check_all(alg);
    if !report.passed() {
        return Err(Error::NotRepresentable(report.failure_names().join(", ")));
    }
    let star = StarContext::new(alg);
    let (n, s) = (alg.n(), alg.size());
    for k in 0..star.reach.len() {
        if let Some(t) = star.reach.state(k).elements() {
            for g in 0..s {
                if star.reach.value(k, g) != alg.sup(g, &t) {
                    return Err(Error::Internal(format!(
                        "mu-state {t:?} disagrees with the bracket at {g}"
                    )));
                }
            }
        }
    }
    let carrier = s + n;
    let images = (0..s)
        .map(|g| PartialFn::from_fn(n, carrier, |x| star.bracket(g, x)))
        .collect::<Result<Vec<_>>>()?;
    let mut rep = Representation::new(n, carrier, images, RepKind::General)?;
    require_verified(alg, &mut rep, true)?;
    Ok((rep, star))
}

/// Totalises every image over the carrier extended by one point.
pub fn completion_of_rep(alg: &AlgebraTable, rep: &Representation) -> Result<Representation> {
    rep.check_source(alg)?;
    let images: Vec<PartialFn> = rep.images.iter().map(complete_function).collect();
    let mut out = Representation::new(rep.n, rep.carrier + 1, images, RepKind::Completed)?;
    require_verified(alg, &mut out, false)?;
    if verify_faithful(alg, rep)? != verify_faithful(alg, &out)? {
        return Err(Error::Internal("completion is not injective on images".into()));
    }
    Ok(out)
}

/// `F_0 ⊆ F_1 ⊆ ..` up to the first level that repeats.
#[derive(Debug, Clone)]
pub struct ExtensionLevels {
    levels: Vec<FunctionSet>,
    input_meets_projectors: bool,
}

impl ExtensionLevels {
    pub fn levels(&self) -> &[FunctionSet] {
        &self.levels
    }

    /// The first `k` with `F_k = F_{k+1}`.
    pub fn fixed_point(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn closure(&self) -> &FunctionSet {
        self.levels.last().expect("at least F_0")
    }

    /// Whether the input already contained a projector. Never true for the
    /// images of a completed representation.
    pub fn input_meets_projectors(&self) -> bool {
        self.input_meets_projectors
    }

    /// The closure as an abstract algebra, element order as in [`Self::closure`].
    pub fn algebra(&self) -> Result<AlgebraTable> {
        let c = self.closure();
        algebra_of_closed(c.arity(), c.functions())
    }

    /// Selectors of the closure; they are the projectors.
    pub fn selectors(&self) -> Result<Option<SelectorSet>> {
        find_selectors(&self.algebra()?)
    }
}

/// Adjoins the projectors to a set of full functions and closes level by level.
pub fn unitary_extension(fs: &FunctionSet, cap: usize) -> Result<ExtensionLevels> {
    if let Some(k) = fs.functions().iter().position(|f| !f.is_full()) {
        return Err(Error::Precondition(format!("function {k} is not full")));
    }
    let (n, m) = (fs.arity(), fs.carrier());
    let projs = nfun::projectors(m, n)?;
    let input_meets_projectors = projs.iter().any(|p| fs.contains(p));
    let mut current: Vec<PartialFn> = fs.functions().to_vec();
    for p in projs {
        if !current.contains(&p) {
            current.push(p);
        }
    }
    if current.len() > cap {
        return Err(Error::CapExceeded { cap });
    }
    let mut index: HashMap<Vec<u32>, usize> = current
        .iter()
        .enumerate()
        .map(|(k, f)| (f.table().to_vec(), k))
        .collect();
    let mut levels = vec![FunctionSet::new(n, m, current.clone())?];
    // Products of F_k involving something new in F_k (relative to F_{k-1}).
    let mut done = 0usize;
    loop {
        let len = current.len();
        let mut fresh = Vec::new();
        let mut combo = vec![0usize; n + 1];
        for k in 0..tuple_count(len, n + 1) {
            decode_into(len, k, &mut combo);
            if combo.iter().all(|&c| c < done) {
                continue;
            }
            let h = nfun::superpose_unchecked(&current[combo[0]], combo[1..].iter().map(|&c| &current[c]));
            if !index.contains_key(h.table()) {
                index.insert(h.table().to_vec(), len + fresh.len());
                fresh.push(h);
                if len + fresh.len() > cap {
                    return Err(Error::CapExceeded { cap });
                }
            }
        }
        for a in 0..len {
            for b in 0..len {
                if a < done && b < done {
                    continue;
                }
                for i in 0..n {
                    let h = nfun::mann_unchecked(&current[a], &current[b], i);
                    if !index.contains_key(h.table()) {
                        index.insert(h.table().to_vec(), len + fresh.len());
                        fresh.push(h);
                        if len + fresh.len() > cap {
                            return Err(Error::CapExceeded { cap });
                        }
                    }
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        done = len;
        current.extend(fresh);
        levels.push(FunctionSet::new(n, m, current.clone())?);
    }
    Ok(ExtensionLevels {
        levels,
        input_meets_projectors,
    })
}

fn shared_shape(alg: &AlgebraTable, reps: &[Representation]) -> Result<()> {
    if reps.is_empty() {
        return Err(Error::Precondition("empty family of representations".into()));
    }
    for r in reps {
        r.check_source(alg)?;
    }
    Ok(())
}

/// Graph union over a common carrier (the largest one). Fails on a conflict;
/// otherwise the homomorphism verdict is attached, since a union need not be a
/// representation.
pub fn union_reps(alg: &AlgebraTable, reps: &[Representation]) -> Result<Representation> {
    shared_shape(alg, reps)?;
    let n = alg.n();
    let carrier = reps.iter().map(|r| r.carrier).max().unwrap_or(1);
    let mut images = Vec::with_capacity(alg.size());
    for g in 0..alg.size() {
        let mut table = vec![UNDEF; tuple_count(carrier, n)];
        for r in reps {
            let wide = nfun::widen(&r.images[g], carrier)?;
            for (k, (&v, slot)) in wide.table().iter().zip(table.iter_mut()).enumerate() {
                if v == UNDEF {
                    continue;
                }
                if *slot != UNDEF && *slot != v {
                    return Err(Error::UnionConflict {
                        element: g,
                        tuple: nfun::decode(carrier, n, k),
                        left: *slot as usize,
                        right: v as usize,
                    });
                }
                *slot = v;
            }
        }
        images.push(PartialFn::new(n, carrier, table)?);
    }
    let mut out = Representation::new(n, carrier, images, RepKind::Union)?;
    out.verify(alg)?;
    Ok(out)
}

/// Disjoint sum: summand `k` occupies carrier points `offset_k..offset_k + m_k`.
pub fn sum_reps(alg: &AlgebraTable, reps: &[Representation]) -> Result<Representation> {
    shared_shape(alg, reps)?;
    let n = alg.n();
    let mut offsets = Vec::with_capacity(reps.len());
    let mut total = 0;
    for r in reps {
        offsets.push(total);
        total += r.carrier;
    }
    let mut images = Vec::with_capacity(alg.size());
    let mut buf = vec![0usize; n];
    for g in 0..alg.size() {
        let mut table = vec![UNDEF; tuple_count(total, n)];
        for (r, &off) in reps.iter().zip(&offsets) {
            let img = &r.images[g];
            for k in 0..img.len() {
                if let Some(v) = img.get(k) {
                    decode_into(r.carrier, k, &mut buf);
                    let idx = buf.iter().fold(0, |acc, &a| acc * total + a + off);
                    table[idx] = (v + off) as u32;
                }
            }
        }
        images.push(PartialFn::new(n, total, table)?);
    }
    let mut out = Representation::new(n, total, images, RepKind::Sum)?;
    out.block_offsets = offsets;
    out.verify(alg)?;
    Ok(out)
}

/// `(g1, g2)` related iff `P(g1) ⊆ P(g2)`.
pub fn zeta_of_rep(rep: &Representation) -> QuasiOrder {
    let s = rep.images.len();
    BinaryRelation::from_fn(s, |a, b| included_unchecked(&rep.images[a], &rep.images[b]))
}

/// The representation given by an element -> function list, e.g. the closure
/// returned by `algebra_from_functions`.
pub fn embedding(fns: &[PartialFn]) -> Result<Representation> {
    let f = fns.first().ok_or(Error::EmptyAlgebra)?;
    Representation::new(f.arity(), f.carrier(), fns.to_vec(), RepKind::Embedding)
}
