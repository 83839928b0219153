//! The DG category `C_A` and bounded twisted complexes over it.
//!
//! An object of `C_A` is a finite complex of vector spaces with a basis
//! ([`FiberComplex`]); a morphism `V -> A ⊗ W` is a [`Chain`] over
//! [`HomLabel`]s `(source, a, target)`. Twisted complexes store their maps
//! `d_ij` un-twisted; all identities are checked in the sharp form
//! `d^#_ij = d_ij ⊗ t_{-i,-j}`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::complexes::{sign, Chain, Complex, ComplexError, GradedSpace};
use crate::dga::{opposite, validate, DgaPresentation};
use crate::exactlin::{self, int, LinError, Matrix, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TwistedError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("morphism is not closed of degree zero")]
    NotClosed,
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Lin(#[from] LinError),
}

/// A finite complex of vector spaces with a chosen basis, optionally with Tate weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberComplex {
    pub degrees: Vec<i32>,
    pub weights: Option<Vec<u32>>,
    /// `d(v_s) = Σ c v_t`.
    pub d: Vec<Vec<(usize, Scalar)>>,
}

impl FiberComplex {
    /// Zero differential.
    pub fn graded(degrees: Vec<i32>) -> Self {
        let n = degrees.len();
        FiberComplex { degrees, weights: None, d: vec![Vec::new(); n] }
    }

    /// The unit object: `k` in degree 0.
    pub fn unit() -> Self {
        FiberComplex::graded(vec![0])
    }

    pub fn with_weights(mut self, w: Vec<u32>) -> Self {
        self.weights = Some(w);
        self
    }

    pub fn with_differential(mut self, d: Vec<Vec<(usize, Scalar)>>) -> Self {
        self.d = d;
        self
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn weight(&self, s: usize) -> u32 {
        self.weights.as_ref().map_or(0, |w| w[s])
    }

    /// `d` as a chain on basis indices.
    pub fn d_of(&self, s: usize) -> Chain<usize> {
        self.d[s].iter().cloned().collect()
    }

    /// Incoming differential terms: `(s', c)` with `d(v_{s'}) ∋ c v_s`.
    pub(crate) fn incoming(&self) -> Vec<Vec<(usize, Scalar)>> {
        let mut inc = vec![Vec::new(); self.dim()];
        for (s, row) in self.d.iter().enumerate() {
            for (t, c) in row {
                inc[*t].push((s, c.clone()));
            }
        }
        inc
    }

    pub fn validate(&self) -> Result<(), TwistedError> {
        if self.d.len() != self.dim() || self.weights.as_ref().is_some_and(|w| w.len() != self.dim()) {
            return Err(TwistedError::InvalidInput("differential or weights have the wrong length".into()));
        }
        for (s, row) in self.d.iter().enumerate() {
            for (t, _) in row {
                if *t >= self.dim() || self.degrees[*t] != self.degrees[s] + 1 || self.weight(*t) != self.weight(s) {
                    return Err(TwistedError::InvalidInput(format!("differential of v{s} has a bad term v{t}")));
                }
            }
            let dd = self.d_of(s).map(|&t| self.d_of(t));
            if !dd.is_zero() {
                return Err(TwistedError::InvalidInput(format!("d² ≠ 0 on v{s}")));
            }
        }
        Ok(())
    }

    /// Direct sum; returns the offset of the second summand.
    fn direct_sum(parts: &[(FiberComplex, i32)]) -> FiberComplex {
        let weighted = parts.iter().any(|(f, _)| f.weights.is_some());
        let mut degrees = Vec::new();
        let mut weights = Vec::new();
        let mut d = Vec::new();
        for (f, shift) in parts {
            let off = degrees.len();
            for s in 0..f.dim() {
                degrees.push(f.degrees[s] + shift);
                weights.push(f.weight(s));
                d.push(f.d[s].iter().map(|(t, c)| (t + off, c.clone())).collect());
            }
        }
        FiberComplex { degrees, weights: weighted.then_some(weights), d }
    }
}

/// A basis element `v_src ↦ a ⊗ w_tgt` of `Hom(V, A ⊗ W)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HomLabel {
    pub src: usize,
    pub a: usize,
    pub tgt: usize,
}

impl HomLabel {
    pub fn new(src: usize, a: usize, tgt: usize) -> Self {
        HomLabel { src, a, tgt }
    }
}

pub type AMap = Chain<HomLabel>;

/// Operations of the DG category `C_A`.
#[derive(Clone, Copy, Debug)]
pub struct CategoryA<'a> {
    pub algebra: &'a DgaPresentation,
}

impl<'a> CategoryA<'a> {
    pub fn new(algebra: &'a DgaPresentation) -> Self {
        CategoryA { algebra }
    }

    pub fn degree(&self, l: &HomLabel, v: &FiberComplex, w: &FiberComplex) -> i32 {
        self.algebra.degree(l.a) + w.degrees[l.tgt] - v.degrees[l.src]
    }

    fn weight_ok(&self, l: &HomLabel, v: &FiberComplex, w: &FiberComplex) -> bool {
        if v.weights.is_none() && w.weights.is_none() {
            return true;
        }
        let wa = self.algebra.weight(l.a).unwrap_or(0) as i64;
        w.weight(l.tgt) as i64 - v.weight(l.src) as i64 == wa
    }

    /// Basis of `Hom(V, A ⊗ W)` grouped by degree; in the weighted case only
    /// labels valued in `A_{q-p}` occur.
    pub fn hom_basis(&self, v: &FiberComplex, w: &FiberComplex) -> BTreeMap<i32, Vec<HomLabel>> {
        let mut out: BTreeMap<i32, Vec<HomLabel>> = BTreeMap::new();
        for src in 0..v.dim() {
            for a in 0..self.algebra.dim() {
                for tgt in 0..w.dim() {
                    let l = HomLabel::new(src, a, tgt);
                    if self.weight_ok(&l, v, w) {
                        out.entry(self.degree(&l, v, w)).or_default().push(l);
                    }
                }
            }
        }
        out
    }

    /// `∂f = d_{A⊗W} ∘ f - (-1)^p f ∘ d_V` on a homogeneous basis label.
    pub fn differential_label(&self, l: &HomLabel, v: &FiberComplex, w: &FiberComplex, v_in: &[Vec<(usize, Scalar)>]) -> AMap {
        let a = self.algebra;
        let p = self.degree(l, v, w);
        let mut out = Chain::new();
        for (b, c) in a.d_basis(l.a) {
            out.add_term(HomLabel::new(l.src, *b, l.tgt), c.clone());
        }
        let s = int(sign::tensor_differential(a.degree(l.a)));
        for (t, c) in &w.d[l.tgt] {
            out.add_term(HomLabel::new(l.src, l.a, *t), c * &s);
        }
        let s = -int(sign::hom_differential(p));
        for (s0, c) in &v_in[l.src] {
            out.add_term(HomLabel::new(*s0, l.a, l.tgt), c * &s);
        }
        out
    }

    pub fn differential(&self, f: &AMap, v: &FiberComplex, w: &FiberComplex) -> AMap {
        let inc = v.incoming();
        f.map(|l| self.differential_label(l, v, w, &inc))
    }

    /// `(g ∘ f)(u) = Σ (-1)^{|a||g|} a·a' ⊗ w` for `f(u) = Σ a ⊗ v`, `g(v) = Σ a' ⊗ w`.
    pub fn compose(&self, g: &AMap, f: &AMap, v: &FiberComplex, w: &FiberComplex) -> AMap {
        let a = self.algebra;
        let mut by_src: BTreeMap<usize, Vec<(&HomLabel, &Scalar)>> = BTreeMap::new();
        for (l, c) in g.iter() {
            by_src.entry(l.src).or_default().push((l, c));
        }
        let mut out = Chain::new();
        for (lf, cf) in f.iter() {
            for (lg, cg) in by_src.get(&lf.tgt).into_iter().flatten() {
                let s = sign::koszul(a.degree(lf.a), self.degree(lg, v, w));
                let coef = cf * *cg * int(s);
                for (b, c) in a.mul_basis(lf.a, lg.a) {
                    out.add_term(HomLabel::new(lf.src, *b, lg.tgt), &coef * c);
                }
            }
        }
        out
    }

    /// `f ⊗ t_{y x}: V e^x -> W e^y`, sign `(-1)^{|v|(x-y)}` with `|v|` unshifted.
    pub fn shift(&self, f: &AMap, v: &FiberComplex, x: i32, y: i32) -> AMap {
        f.iter()
            .map(|(l, c)| (*l, c * int(sign::shift_token(x - y, v.degrees[l.src]))))
            .collect()
    }

    pub fn identity(&self, v: &FiberComplex) -> AMap {
        (0..v.dim()).map(|s| (HomLabel::new(s, self.algebra.unit(), s), Scalar::one())).collect()
    }
}

/// A bounded twisted complex `({M^i}, {d_ij}_{i>j})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedComplex {
    pub algebra: DgaPresentation,
    pub objects: BTreeMap<i32, FiberComplex>,
    /// `d_ij ∈ Hom^{j-i+1}(M^j, A ⊗ M^i)`, keyed by `(i, j)` with `i > j`, in local indices.
    pub maps: BTreeMap<(i32, i32), AMap>,
}

/// `s(M) = ⊕ M^q e^{-q}` with its basis bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotalObject {
    pub fiber: FiberComplex,
    /// `(position, local index)` for each global basis element.
    pub index: Vec<(i32, usize)>,
    /// Unshifted degree of each global basis element.
    pub local_degrees: Vec<i32>,
    pub offsets: BTreeMap<i32, usize>,
}

impl TotalObject {
    pub fn position(&self, g: usize) -> i32 {
        self.index[g].0
    }

    pub fn global(&self, pos: i32, local: usize) -> usize {
        self.offsets[&pos] + local
    }

    pub fn positions(&self) -> Vec<i32> {
        self.offsets.keys().copied().collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct McReport {
    pub object_failures: Vec<(i32, String)>,
    pub degree_failures: Vec<(i32, i32)>,
    /// Blocks `(i, j)` where `∂(d^#_ij) + Σ d^#_ip d^#_pj ≠ 0`.
    pub sharp_failures: Vec<(i32, i32)>,
    /// Blocks where the un-twisted signed form fails.
    pub untwisted_failures: Vec<(i32, i32)>,
}

impl McReport {
    pub fn is_ok(&self) -> bool {
        self.object_failures.is_empty() && self.degree_failures.is_empty() && self.sharp_failures.is_empty()
    }

    /// The two displayed forms of the Maurer–Cartan condition fail on the same blocks.
    pub fn forms_agree(&self) -> bool {
        self.sharp_failures == self.untwisted_failures
    }
}

impl TwistedComplex {
    pub fn new(algebra: &DgaPresentation) -> Self {
        TwistedComplex { algebra: algebra.clone(), objects: BTreeMap::new(), maps: BTreeMap::new() }
    }

    /// The unit object `k` at position 0.
    pub fn unit(algebra: &DgaPresentation) -> Self {
        TwistedComplex::new(algebra).with_object(0, FiberComplex::unit())
    }

    pub fn with_object(mut self, pos: i32, m: FiberComplex) -> Self {
        self.objects.insert(pos, m);
        self
    }

    pub fn with_map(mut self, i: i32, j: i32, d: AMap) -> Self {
        self.maps.insert((i, j), d);
        self
    }

    pub fn positions(&self) -> Vec<i32> {
        self.objects.keys().copied().collect()
    }

    /// Drops zero maps, so that equal twisted complexes compare equal.
    pub fn normalized(&self) -> Self {
        let mut out = self.clone();
        out.maps.retain(|_, d| !d.is_zero());
        out
    }

    pub fn is_empty(&self) -> bool {
        self.objects.values().all(|m| m.dim() == 0)
    }

    fn cat(&self) -> CategoryA<'_> {
        CategoryA::new(&self.algebra)
    }

    pub fn total(&self) -> TotalObject {
        let parts: Vec<(FiberComplex, i32)> = self.objects.iter().map(|(q, m)| (m.clone(), *q)).collect();
        let fiber = FiberComplex::direct_sum(&parts);
        let mut index = Vec::new();
        let mut local_degrees = Vec::new();
        let mut offsets = BTreeMap::new();
        for (q, m) in &self.objects {
            offsets.insert(*q, index.len());
            for s in 0..m.dim() {
                index.push((*q, s));
                local_degrees.push(m.degrees[s]);
            }
        }
        TotalObject { fiber, index, local_degrees, offsets }
    }

    /// `d^#_ij` in global indices of `s(M)`.
    pub fn sharp(&self, i: i32, j: i32, tot: &TotalObject) -> AMap {
        let Some(d) = self.maps.get(&(i, j)) else { return Chain::new() };
        let local = self.cat().shift(d, &self.objects[&j], -j, -i);
        local.iter().map(|(l, c)| (HomLabel::new(tot.global(j, l.src), l.a, tot.global(i, l.tgt)), c.clone())).collect()
    }

    /// `D^# = Σ_{i>j} d^#_ij` on `s(M)`.
    pub fn twisting(&self, tot: &TotalObject) -> AMap {
        let mut out = Chain::new();
        for &(i, j) in self.maps.keys() {
            out.add_scaled(&self.sharp(i, j, tot), &Scalar::one());
        }
        out
    }

    pub fn validate_mc(&self) -> McReport {
        let mut rep = McReport::default();
        if !validate(&self.algebra).is_ok() {
            rep.object_failures.push((0, "algebra fails validation".into()));
            return rep;
        }
        for (q, m) in &self.objects {
            if let Err(e) = m.validate() {
                rep.object_failures.push((*q, e.to_string()));
            }
            if m.weights.is_some() && !self.algebra.is_weighted() {
                rep.object_failures.push((*q, "weighted object over an unweighted algebra".into()));
            }
        }
        for (&(i, j), d) in &self.maps {
            let (Some(mj), Some(mi)) = (self.objects.get(&j), self.objects.get(&i)) else {
                rep.object_failures.push((i, format!("map d_{i}{j} between missing positions")));
                continue;
            };
            let bad_range = d.iter().any(|(l, _)| l.src >= mj.dim() || l.tgt >= mi.dim() || l.a >= self.algebra.dim());
            if i <= j || bad_range {
                rep.object_failures.push((i, format!("map d_{i}{j} is malformed")));
                continue;
            }
            if d.iter().any(|(l, _)| self.cat().degree(l, mj, mi) != j - i + 1 || !self.cat().weight_ok(l, mj, mi)) {
                rep.degree_failures.push((i, j));
            }
        }
        if !rep.object_failures.is_empty() {
            return rep;
        }
        let tot = self.total();
        let cat = self.cat();
        let big_d = self.twisting(&tot);
        let mut x = cat.differential(&big_d, &tot.fiber, &tot.fiber);
        x.add_scaled(&cat.compose(&big_d, &big_d, &tot.fiber, &tot.fiber), &Scalar::one());
        let blocks: BTreeSet<(i32, i32)> = x.iter().map(|(l, _)| (tot.position(l.tgt), tot.position(l.src))).collect();
        rep.sharp_failures = blocks.into_iter().collect();
        for &i in self.objects.keys() {
            for &j in self.objects.keys().filter(|&&j| j < i) {
                if !self.untwisted_mc(i, j).is_zero() {
                    rep.untwisted_failures.push((i, j));
                }
            }
        }
        rep
    }

    /// `∂(d_ij) + Σ_{i>p>j} (-1)^{(i-p)(p-j+1)} d_ip ∘ d_pj` on the unshifted objects.
    pub fn untwisted_mc(&self, i: i32, j: i32) -> AMap {
        let cat = self.cat();
        let (mj, mi) = (&self.objects[&j], &self.objects[&i]);
        let mut out = self.maps.get(&(i, j)).map(|d| cat.differential(d, mj, mi)).unwrap_or_default();
        for (&p, mp) in self.objects.range(j + 1..i) {
            if let (Some(dip), Some(dpj)) = (self.maps.get(&(i, p)), self.maps.get(&(p, j))) {
                let s = int(sign::sgn(((i - p) * (p - j + 1)) as i64));
                out.add_scaled(&cat.compose(dip, dpj, mp, mi), &s);
            }
        }
        out
    }
}

/// An element of `Hom_{KC_A}(M, N)` in sharp form on `s(M) -> A ⊗ s(N)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedHom {
    pub degree: i32,
    pub map: AMap,
}

impl TwistedHom {
    pub fn identity(m: &TwistedComplex) -> Self {
        let tot = m.total();
        TwistedHom { degree: 0, map: CategoryA::new(&m.algebra).identity(&tot.fiber) }
    }

    /// Builds the sharp form from un-twisted components `φ_{r,q}: M^q -> A ⊗ N^r`.
    pub fn from_components(
        m: &TwistedComplex,
        n: &TwistedComplex,
        degree: i32,
        comps: &BTreeMap<(i32, i32), AMap>,
    ) -> Result<Self, TwistedError> {
        let (tm, tn) = (m.total(), n.total());
        let cat = CategoryA::new(&m.algebra);
        let mut map = Chain::new();
        for (&(r, q), f) in comps {
            let (Some(mq), Some(nr)) = (m.objects.get(&q), n.objects.get(&r)) else {
                return Err(TwistedError::ShapeMismatch(format!("component ({r},{q}) outside the positions")));
            };
            if f.iter().any(|(l, _)| cat.degree(l, mq, nr) != degree + q - r) {
                return Err(TwistedError::ShapeMismatch(format!("component ({r},{q}) has the wrong degree")));
            }
            for (l, c) in cat.shift(f, mq, -q, -r).iter() {
                map.add_term(HomLabel::new(tm.global(q, l.src), l.a, tn.global(r, l.tgt)), c.clone());
            }
        }
        Ok(TwistedHom { degree, map })
    }

    /// `(self ∘ other)^# = self^# ∘ other^#` where `other: L -> M` and `self: M -> N`.
    pub fn compose(&self, other: &TwistedHom, m: &TwistedComplex, n: &TwistedComplex) -> TwistedHom {
        let (tm, tn) = (m.total(), n.total());
        let cat = CategoryA::new(&m.algebra);
        TwistedHom { degree: self.degree + other.degree, map: cat.compose(&self.map, &other.map, &tm.fiber, &tn.fiber) }
    }
}

/// `D(φ) = ∂φ + D_N ∘ φ - (-1)^k φ ∘ D_M` on sharp maps `s(M) -> A ⊗ s(N)`.
pub fn hom_differential(m: &TwistedComplex, n: &TwistedComplex, phi: &AMap) -> AMap {
    HomContext::new(m, n).differential(phi)
}

/// Cached data for differentials on `Hom_{KC_A}(M, N)`.
struct HomContext<'a> {
    cat: CategoryA<'a>,
    tm: TotalObject,
    tn: TotalObject,
    dm: AMap,
    dn: AMap,
    inc: Vec<Vec<(usize, Scalar)>>,
}

impl<'a> HomContext<'a> {
    fn new(m: &'a TwistedComplex, n: &TwistedComplex) -> Self {
        let (tm, tn) = (m.total(), n.total());
        let (dm, dn) = (m.twisting(&tm), n.twisting(&tn));
        let inc = tm.fiber.incoming();
        HomContext { cat: CategoryA::new(&m.algebra), tm, tn, dm, dn, inc }
    }

    fn differential_label(&self, l: &HomLabel) -> AMap {
        let (fm, fn_) = (&self.tm.fiber, &self.tn.fiber);
        let k = self.cat.degree(l, fm, fn_);
        let single = Chain::single(*l, Scalar::one());
        let mut out = self.cat.differential_label(l, fm, fn_, &self.inc);
        out.add_scaled(&self.cat.compose(&self.dn, &single, fn_, fn_), &Scalar::one());
        out.add_scaled(&self.cat.compose(&single, &self.dm, fm, fn_), &-int(sign::hom_differential(k)));
        out
    }

    fn differential(&self, phi: &AMap) -> AMap {
        phi.map(|l| self.differential_label(l))
    }
}

/// `Hom_{KC_A}(M, N)` as a finite complex on sharp basis labels.
#[derive(Clone, Debug)]
pub struct TwistedHomComplex {
    pub source: TotalObject,
    pub target: TotalObject,
    pub complex: Complex<HomLabel>,
}

pub fn hom_complex(m: &TwistedComplex, n: &TwistedComplex) -> Result<TwistedHomComplex, TwistedError> {
    if m.algebra != n.algebra {
        return Err(TwistedError::InvalidInput("twisted complexes over different algebras".into()));
    }
    for (name, x) in [("source", m), ("target", n)] {
        let r = x.validate_mc();
        if !r.is_ok() {
            return Err(TwistedError::InvalidInput(format!("{name} fails validation: {r:?}")));
        }
    }
    let ctx = HomContext::new(m, n);
    let basis = ctx.cat.hom_basis(&ctx.tm.fiber, &ctx.tn.fiber);
    let space = GradedSpace::new(basis)?;
    let complex = Complex::from_fn(space, |l| ctx.differential_label(l))?;
    Ok(TwistedHomComplex { source: ctx.tm.clone(), target: ctx.tn.clone(), complex })
}

/// Inverse of a closed degree-zero morphism, found by solving `g∘f = id`, `f∘g = id` jointly.
pub fn is_isomorphism(m: &TwistedComplex, n: &TwistedComplex, f: &TwistedHom) -> Result<Option<TwistedHom>, TwistedError> {
    if f.degree != 0 || !hom_differential(m, n, &f.map).is_zero() {
        return Err(TwistedError::NotClosed);
    }
    let (tm, tn) = (m.total(), n.total());
    let cat = CategoryA::new(&m.algebra);
    let unknowns = cat.hom_basis(&tn.fiber, &tm.fiber).remove(&0).unwrap_or_default();
    let id_m = cat.identity(&tm.fiber);
    let id_n = cat.identity(&tn.fiber);
    let mut rows: BTreeMap<(bool, HomLabel), usize> = BTreeMap::new();
    let mut columns = Vec::new();
    let key = |k: (bool, HomLabel), rows: &mut BTreeMap<(bool, HomLabel), usize>| {
        let len = rows.len();
        *rows.entry(k).or_insert(len)
    };
    for u in &unknowns {
        let g = Chain::single(*u, Scalar::one());
        let mut col = Vec::new();
        for (l, c) in cat.compose(&g, &f.map, &tn.fiber, &tm.fiber).iter() {
            col.push((key((false, *l), &mut rows), c.clone()));
        }
        for (l, c) in cat.compose(&f.map, &g, &tm.fiber, &tn.fiber).iter() {
            col.push((key((true, *l), &mut rows), c.clone()));
        }
        columns.push(col);
    }
    let mut rhs = Vec::new();
    for (l, c) in id_m.iter() {
        rhs.push((key((false, *l), &mut rows), c.clone()));
    }
    for (l, c) in id_n.iter() {
        rhs.push((key((true, *l), &mut rows), c.clone()));
    }
    let nrows = rows.len();
    let mat = Matrix::from_entries(
        nrows,
        unknowns.len(),
        columns.iter().enumerate().flat_map(|(j, col)| col.iter().map(move |(i, c)| (*i, j, c.clone()))),
    );
    let mut b = vec![Scalar::zero(); nrows];
    for (i, c) in rhs {
        b[i] += c;
    }
    Ok(exactlin::solve(&mat, &b).map(|x| TwistedHom {
        degree: 0,
        map: unknowns.iter().zip(x).filter(|(_, c)| !c.is_zero()).map(|(u, c)| (*u, c)).collect(),
    }))
}

/// Basis elements of `A` where `End(k)` disagrees with `A^op` (degree,
/// differential or a composite); empty when the structure constants match.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OppositeReport {
    pub pairs_checked: usize,
    pub mismatches: Vec<(usize, Option<usize>)>,
}

impl OppositeReport {
    pub fn is_ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

pub fn compare_end_of_unit(a: &DgaPresentation) -> Result<OppositeReport, TwistedError> {
    let u = TwistedComplex::unit(a);
    let h = hom_complex(&u, &u)?;
    let op = opposite(a);
    let cat = CategoryA::new(a);
    let f = &h.source.fiber;
    let mut rep = OppositeReport::default();
    let on_a = |c: &AMap| -> Chain<usize> { c.iter().map(|(l, x)| (l.a, x.clone())).collect() };
    for x in 0..a.dim() {
        let lx = Chain::single(HomLabel::new(0, x, 0), Scalar::one());
        let d = on_a(&h.complex.diff_of(&HomLabel::new(0, x, 0)));
        let deg_ok = h.complex.space().degree_of(&HomLabel::new(0, x, 0)) == Some(a.degree(x));
        if !deg_ok || d != op.d_basis(x).iter().cloned().collect() {
            rep.mismatches.push((x, None));
        }
        for y in 0..a.dim() {
            rep.pairs_checked += 1;
            let ly = Chain::single(HomLabel::new(0, y, 0), Scalar::one());
            if on_a(&cat.compose(&lx, &ly, f, f)) != op.mul_basis(x, y).iter().cloned().collect() {
                rep.mismatches.push((x, Some(y)));
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::examples::*;

    fn one(l: HomLabel) -> AMap {
        Chain::single(l, Scalar::one())
    }

    /// `M^0 = k`, `M^1 = k`, `M^2 = <w, z>` with `dw = z`; `d_10 = 1⊗id`, `d_21 = 1⊗(v ↦ z)`.
    fn three_step(c20: i64) -> TwistedComplex {
        let a = circle();
        let m2 = FiberComplex::graded(vec![-1, 0]).with_differential(vec![vec![(1, int(1))], vec![]]);
        let mut t = TwistedComplex::new(&a)
            .with_object(0, FiberComplex::unit())
            .with_object(1, FiberComplex::unit())
            .with_object(2, m2)
            .with_map(1, 0, one(HomLabel::new(0, 0, 0)))
            .with_map(2, 1, one(HomLabel::new(0, 0, 1)));
        if c20 != 0 {
            t = t.with_map(2, 0, Chain::single(HomLabel::new(0, 0, 0), int(c20)));
        }
        t
    }

    #[test]
    fn trivial_shapes() {
        let a = circle();
        assert!(TwistedComplex::unit(&a).validate_mc().is_ok());
        let e = a.index_of("e").unwrap();
        let two = TwistedComplex::new(&a)
            .with_object(0, FiberComplex::graded(vec![0]))
            .with_object(1, FiberComplex::graded(vec![-1]))
            .with_map(1, 0, one(HomLabel::new(0, e, 0)));
        let r = two.validate_mc();
        assert!(r.is_ok() && r.forms_agree(), "{r:?}");
        let bad = TwistedComplex::new(&a).with_object(0, FiberComplex::unit()).with_object(1, FiberComplex::unit()).with_map(
            1,
            0,
            one(HomLabel::new(0, e, 0)),
        );
        assert_eq!(bad.validate_mc().degree_failures, vec![(1, 0)]);
    }

    #[test]
    fn crafted_violation_and_repair() {
        let broken = three_step(0).validate_mc();
        assert_eq!(broken.sharp_failures, vec![(2, 0)]);
        assert!(broken.forms_agree());
        let fixed: Vec<i64> = [-1, 1].into_iter().filter(|&c| three_step(c).validate_mc().is_ok()).collect();
        assert_eq!(fixed.len(), 1);
        assert!(three_step(-fixed[0]).validate_mc().forms_agree());
    }

    #[test]
    fn end_of_unit_is_opposite_algebra() {
        for a in [circle(), contractible(), wedge(2), odd_contractible()] {
            assert!(compare_end_of_unit(&a).unwrap().is_ok());
            let u = TwistedComplex::unit(&a);
            let h = hom_complex(&u, &u).unwrap();
            let op = opposite(&a);
            let cat = CategoryA::new(&a);
            let f = &h.source.fiber;
            for x in 0..a.dim() {
                let lx = HomLabel::new(0, x, 0);
                assert_eq!(h.complex.space().degree_of(&lx), Some(a.degree(x)));
                let d: Chain<usize> = h.complex.diff_of(&lx).iter().map(|(l, c)| (l.a, c.clone())).collect();
                let expect: Chain<usize> = op.d_basis(x).iter().cloned().collect();
                assert_eq!(d, expect);
                for y in 0..a.dim() {
                    let prod = cat.compose(&one(lx), &one(HomLabel::new(0, y, 0)), f, f);
                    let got: Chain<usize> = prod.iter().map(|(l, c)| (l.a, c.clone())).collect();
                    let expect: Chain<usize> = op.mul_basis(x, y).iter().cloned().collect();
                    assert_eq!(got, expect, "{} {x} {y}", a.name());
                }
            }
        }
    }

    #[test]
    fn leibniz_and_associativity() {
        let m = three_step(three_step_fix());
        let h = hom_complex(&m, &m).unwrap();
        let labels: Vec<(i32, HomLabel)> = h.complex.space().iter().map(|(d, l)| (d, *l)).collect();
        let tm = m.total();
        let cat = CategoryA::new(&m.algebra);
        for (i, (dp, p)) in labels.iter().enumerate().step_by(3) {
            for (dq, q) in labels.iter().skip(i % 5).step_by(4) {
                let (p, q) = (one(*p), one(*q));
                let pq = cat.compose(&p, &q, &tm.fiber, &tm.fiber);
                let lhs = hom_differential(&m, &m, &pq);
                let mut rhs = cat.compose(&hom_differential(&m, &m, &p), &q, &tm.fiber, &tm.fiber);
                let dq_ = hom_differential(&m, &m, &q);
                rhs.add_scaled(&cat.compose(&p, &dq_, &tm.fiber, &tm.fiber), &int(sign::sgn(*dp as i64)));
                assert_eq!(lhs, rhs, "{dp} {dq}");
            }
        }
        let (x, y, z) = (one(labels[1].1), one(labels[2].1), one(labels[labels.len() - 1].1));
        let f = &tm.fiber;
        assert_eq!(
            cat.compose(&cat.compose(&x, &y, f, f), &z, f, f),
            cat.compose(&x, &cat.compose(&y, &z, f, f), f, f)
        );
    }

    fn three_step_fix() -> i64 {
        if three_step(1).validate_mc().is_ok() {
            1
        } else {
            -1
        }
    }

    #[test]
    fn shift_axiom() {
        let a = circle();
        let cat = CategoryA::new(&a);
        let v = FiberComplex::graded(vec![0, 1]);
        let e = a.index_of("e").unwrap();
        let phi = one(HomLabel::new(1, e, 0));
        let psi = Chain::single(HomLabel::new(0, e, 1), int(2));
        let (i, j, k) = (2, -1, 3);
        let deg_psi = cat.degree(&HomLabel::new(0, e, 1), &v, &v);
        let vk = shifted(&v, k);
        let vi = shifted(&v, i);
        let lhs = cat.compose(&cat.shift(&phi, &v, i, j), &cat.shift(&psi, &v, k, i), &vi, &shifted(&v, j));
        let rhs = cat.shift(&cat.compose(&phi, &psi, &v, &v), &v, k, j).scaled(&int(sign::shift_compose(i - j, deg_psi)));
        let _ = vk;
        assert_eq!(lhs, rhs);
    }

    fn shifted(v: &FiberComplex, x: i32) -> FiberComplex {
        FiberComplex::graded(v.degrees.iter().map(|d| d - x).collect())
    }

    #[test]
    fn isomorphisms() {
        let a = circle();
        let e = a.index_of("e").unwrap();
        let m = TwistedComplex::new(&a)
            .with_object(0, FiberComplex::graded(vec![0]))
            .with_object(1, FiberComplex::graded(vec![-1]))
            .with_map(1, 0, one(HomLabel::new(0, e, 0)));
        let id = TwistedHom::identity(&m);
        assert_eq!(is_isomorphism(&m, &m, &id).unwrap(), Some(id.clone()));
        // 2·id plus a closed off-diagonal piece.
        let mut f = id.map.scaled(&int(2));
        f.add_term(HomLabel::new(0, 0, 1), int(1));
        let f = TwistedHom { degree: 0, map: f };
        let g = is_isomorphism(&m, &m, &f).unwrap().expect("invertible");
        let tm = m.total();
        let cat = CategoryA::new(&a);
        assert_eq!(cat.compose(&g.map, &f.map, &tm.fiber, &tm.fiber), id.map);
        let zero = TwistedHom { degree: 0, map: AMap::new() };
        assert_eq!(is_isomorphism(&m, &m, &zero).unwrap(), None);
        let proj = TwistedHom { degree: 0, map: one(HomLabel::new(0, 0, 0)) };
        assert!(matches!(is_isomorphism(&m, &m, &proj), Err(TwistedError::NotClosed)));
    }
}
