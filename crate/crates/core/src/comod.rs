//! DG coalgebras given on word bases, comodules over them, the comodule Hom
//! complex, and the functors `φ` (twisted complex to comodule) and `ψ`
//! (comodule to twisted complex).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::bar::{induced_rank, BarError, BarShape, BarTruncation, BarWord, RedWord, ReducedShape};
use crate::complexes::{sign, Chain, Complex, ComplexError, GradedMap, GradedSpace};
use crate::dga::{Augmentation, DgaPresentation};
use crate::exactlin::{self, int, LinError, Matrix, Scalar};
use crate::twisted::{hom_complex, AMap, FiberComplex, HomLabel, TwistedComplex, TwistedError, TwistedHom};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComodError {
    #[error("positions {0:?} do not fit the bar window")]
    PositionsOutsideWindow(Vec<i32>),
    #[error("comodule is not bounded: {0}")]
    NotBounded(String),
    #[error("projector failure: {0}")]
    ProjectorFailure(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid comodule: {0}")]
    Invalid(String),
    #[error(transparent)]
    Twisted(#[from] TwistedError),
    #[error(transparent)]
    Bar(#[from] BarError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Lin(#[from] LinError),
}

/// A DG coalgebra presented on a basis of words.
pub trait WordCoalgebra {
    type Word: Ord + Clone + Debug;

    fn degree(&self, w: &Self::Word) -> i32;
    fn differential(&self, w: &Self::Word) -> Chain<Self::Word>;
    fn coproduct(&self, w: &Self::Word) -> Chain<(Self::Word, Self::Word)>;
    fn counit(&self, w: &Self::Word) -> Scalar;
    fn length(&self, w: &Self::Word) -> usize;
    /// All words of length at most `max_length`.
    fn basis(&self, max_length: usize) -> Vec<Self::Word>;
    /// Filtration degree used to truncate the comodule Hom complex; no term
    /// of the differential, coproduct or coaction may lower it.
    fn filtration(&self, w: &Self::Word) -> usize {
        self.length(w)
    }
    /// Bar indices carried by the word, if any.
    fn support(&self, _w: &Self::Word) -> Option<Vec<i32>> {
        None
    }
}

/// A coalgebra with a single group-like word spanning the length-zero part.
pub trait Coaugmented: WordCoalgebra {
    fn unit_word(&self) -> Self::Word;
}

impl WordCoalgebra for BarShape {
    type Word = BarWord;

    fn degree(&self, w: &BarWord) -> i32 {
        self.total_degree(w)
    }
    fn differential(&self, w: &BarWord) -> Chain<BarWord> {
        self.total(w)
    }
    fn coproduct(&self, w: &BarWord) -> Chain<(BarWord, BarWord)> {
        BarShape::coproduct(self, w)
    }
    fn counit(&self, w: &BarWord) -> Scalar {
        BarShape::counit(self, w)
    }
    fn length(&self, w: &BarWord) -> usize {
        w.letters.len()
    }
    fn basis(&self, max_length: usize) -> Vec<BarWord> {
        self.words().into_iter().filter(|w| w.letters.len() <= max_length).collect()
    }
    fn support(&self, w: &BarWord) -> Option<Vec<i32>> {
        Some(w.alpha.clone())
    }
}

impl WordCoalgebra for ReducedShape {
    type Word = RedWord;

    fn degree(&self, w: &RedWord) -> i32 {
        self.total_degree(w)
    }
    fn differential(&self, w: &RedWord) -> Chain<RedWord> {
        self.total(w)
    }
    fn coproduct(&self, w: &RedWord) -> Chain<(RedWord, RedWord)> {
        ReducedShape::coproduct(self, w)
    }
    fn counit(&self, w: &RedWord) -> Scalar {
        ReducedShape::counit(self, w)
    }
    fn length(&self, w: &RedWord) -> usize {
        w.len()
    }
    fn basis(&self, max_length: usize) -> Vec<RedWord> {
        self.words(max_length, None)
    }
    /// Total letter degree; merges preserve it and `d_A` raises it.
    fn filtration(&self, w: &RedWord) -> usize {
        self.inner_degree(w).max(0) as usize
    }
}

impl Coaugmented for ReducedShape {
    fn unit_word(&self) -> RedWord {
        RedWord(Vec::new())
    }
}

/// The ground field as a coalgebra.
#[derive(Clone, Copy, Debug, Default)]
pub struct GroundCoalgebra;

impl WordCoalgebra for GroundCoalgebra {
    type Word = ();

    fn degree(&self, _: &()) -> i32 {
        0
    }
    fn differential(&self, _: &()) -> Chain<()> {
        Chain::new()
    }
    fn coproduct(&self, _: &()) -> Chain<((), ())> {
        Chain::single(((), ()), Scalar::one())
    }
    fn counit(&self, _: &()) -> Scalar {
        Scalar::one()
    }
    fn length(&self, _: &()) -> usize {
        0
    }
    fn basis(&self, _: usize) -> Vec<()> {
        vec![()]
    }
}

impl Coaugmented for GroundCoalgebra {
    fn unit_word(&self) {}
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoalgebraCheck {
    pub words: usize,
    pub square_zero_failures: Vec<String>,
    pub coassociativity_failures: Vec<String>,
    pub counit_failures: Vec<String>,
    pub chain_map_failures: Vec<String>,
}

impl CoalgebraCheck {
    pub fn is_ok(&self) -> bool {
        self.square_zero_failures.is_empty()
            && self.coassociativity_failures.is_empty()
            && self.counit_failures.is_empty()
            && self.chain_map_failures.is_empty()
    }
}

fn pair_differential<B: WordCoalgebra>(b: &B, x: &B::Word, y: &B::Word) -> Chain<(B::Word, B::Word)> {
    let mut out = Chain::new();
    for (u, c) in b.differential(x).iter() {
        out.add_term((u.clone(), y.clone()), c.clone());
    }
    let s = int(sign::tensor_differential(b.degree(x)));
    for (v, c) in b.differential(y).iter() {
        out.add_term((x.clone(), v.clone()), c * &s);
    }
    out
}

/// Checks the DG coalgebra axioms on every word of length at most `max_length`.
pub fn check_coalgebra<B: WordCoalgebra>(b: &B, max_length: usize) -> CoalgebraCheck {
    let words = b.basis(max_length);
    let mut rep = CoalgebraCheck { words: words.len(), ..Default::default() };
    for w in &words {
        let tag = || format!("{w:?}");
        if !b.differential(w).map(|u| b.differential(u)).is_zero() {
            rep.square_zero_failures.push(tag());
        }
        let delta = b.coproduct(w);
        let left: Chain<(B::Word, B::Word, B::Word)> =
            delta.map(|(x, y)| b.coproduct(x).iter().map(|((p, q), c)| ((p.clone(), q.clone(), y.clone()), c.clone())).collect());
        let right: Chain<(B::Word, B::Word, B::Word)> =
            delta.map(|(x, y)| b.coproduct(y).iter().map(|((p, q), c)| ((x.clone(), p.clone(), q.clone()), c.clone())).collect());
        if left != right {
            rep.coassociativity_failures.push(tag());
        }
        let mut l1 = Chain::new();
        let mut l2 = Chain::new();
        for ((x, y), c) in delta.iter() {
            l1.add_term(y.clone(), c * b.counit(x));
            l2.add_term(x.clone(), c * b.counit(y));
        }
        let id = Chain::single(w.clone(), Scalar::one());
        if l1 != id || l2 != id {
            rep.counit_failures.push(tag());
        }
        let lhs = b.differential(w).map(|u| b.coproduct(u));
        let rhs = delta.map(|(x, y)| pair_differential(b, x, y));
        if lhs != rhs {
            rep.chain_map_failures.push(tag());
        }
    }
    rep
}

/// A left comodule `Δ_M: M -> B ⊗ M` on a finite complex with basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comodule<W: Ord> {
    /// The underlying complex with its differential `δ_M`.
    pub fiber: FiberComplex,
    /// Position label of each basis element, when the comodule is supported on a finite set.
    pub positions: Option<Vec<i32>>,
    /// `Δ_M(m_s) = Σ c w ⊗ m_t`.
    pub coaction: Vec<Chain<(W, usize)>>,
}

impl<W: Ord + Clone + Debug> Comodule<W> {
    pub fn dim(&self) -> usize {
        self.fiber.dim()
    }

    pub fn degree(&self, s: usize) -> i32 {
        self.fiber.degrees[s]
    }

    /// The comodule with coaction `m ↦ u ⊗ m` for a fixed group-like word `u`.
    pub fn trivial(fiber: FiberComplex, unit: W) -> Self {
        let coaction = (0..fiber.dim()).map(|s| Chain::single((unit.clone(), s), Scalar::one())).collect();
        Comodule { fiber, positions: None, coaction }
    }

    pub fn with_positions(mut self, positions: Vec<i32>) -> Self {
        self.positions = Some(positions);
        self
    }

    fn apply_coaction(&self, c: &Chain<usize>) -> Chain<(W, usize)> {
        c.map(|&s| self.coaction[s].clone())
    }
}

/// Positioned trivial comodule over the simplicial bar: `Δ(m) = [p] ⊗ m` for `m` at position `p`.
pub fn trivial_bar_comodule(fiber: FiberComplex, positions: Vec<i32>) -> Comodule<BarWord> {
    let coaction = positions.iter().enumerate().map(|(s, &p)| Chain::single((BarWord::new(vec![p], Vec::new()), s), Scalar::one())).collect();
    Comodule { fiber, positions: Some(positions), coaction }
}

/// `B` as a comodule over itself, on the given words (closed under `d` and the right factor of `Δ`).
pub fn regular_comodule<B: WordCoalgebra>(b: &B, words: &[B::Word]) -> Result<Comodule<B::Word>, ComodError> {
    let index: BTreeMap<&B::Word, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let find = |w: &B::Word| index.get(w).copied().ok_or_else(|| ComodError::Invalid(format!("word {w:?} outside the truncation")));
    let mut d = Vec::new();
    let mut coaction = Vec::new();
    for w in words {
        let mut row = Vec::new();
        for (u, c) in b.differential(w).iter() {
            row.push((find(u)?, c.clone()));
        }
        d.push(row);
        let mut co = Chain::new();
        for ((x, y), c) in b.coproduct(w).iter() {
            co.add_term((x.clone(), find(y)?), c.clone());
        }
        coaction.push(co);
    }
    let fiber = FiberComplex::graded(words.iter().map(|w| b.degree(w)).collect()).with_differential(d);
    Ok(Comodule { fiber, positions: None, coaction })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ComoduleReport {
    pub fiber_error: Option<String>,
    pub degree_failures: Vec<usize>,
    pub chain_map_failures: Vec<usize>,
    /// Basis element together with a word where the two sides of the square differ.
    pub coassociativity_failures: Vec<(usize, String)>,
    pub counit_failures: Vec<usize>,
    pub support_failures: Vec<usize>,
}

impl ComoduleReport {
    pub fn is_ok(&self) -> bool {
        self.fiber_error.is_none()
            && self.degree_failures.is_empty()
            && self.chain_map_failures.is_empty()
            && self.coassociativity_failures.is_empty()
            && self.counit_failures.is_empty()
            && self.support_failures.is_empty()
    }
}

pub fn validate_comodule<B: WordCoalgebra>(b: &B, m: &Comodule<B::Word>) -> ComoduleReport {
    let mut rep = ComoduleReport::default();
    if let Err(e) = m.fiber.validate() {
        rep.fiber_error = Some(e.to_string());
        return rep;
    }
    if m.coaction.len() != m.dim() || m.positions.as_ref().is_some_and(|p| p.len() != m.dim()) {
        rep.fiber_error = Some("coaction or positions have the wrong length".into());
        return rep;
    }
    if m.coaction.iter().any(|c| c.iter().any(|((_, t), _)| *t >= m.dim())) {
        rep.fiber_error = Some("coaction refers to a missing basis element".into());
        return rep;
    }
    let support: Option<BTreeSet<i32>> = m.positions.as_ref().map(|p| p.iter().copied().collect());
    for s in 0..m.dim() {
        let delta = &m.coaction[s];
        if delta.iter().any(|((w, t), _)| b.degree(w) + m.degree(*t) != m.degree(s)) {
            rep.degree_failures.push(s);
        }
        // (d_B ⊗ 1 + 1 ⊗ δ) Δ = Δ δ
        let mut lhs: Chain<(B::Word, usize)> = Chain::new();
        for ((w, t), c) in delta.iter() {
            for (u, e) in b.differential(w).iter() {
                lhs.add_term((u.clone(), *t), c * e);
            }
            let sg = int(sign::tensor_differential(b.degree(w)));
            for (u, e) in m.fiber.d_of(*t).iter() {
                lhs.add_term((w.clone(), *u), c * e * &sg);
            }
        }
        if lhs != m.apply_coaction(&m.fiber.d_of(s)) {
            rep.chain_map_failures.push(s);
        }
        let left: Chain<(B::Word, B::Word, usize)> =
            delta.map(|(w, t)| b.coproduct(w).iter().map(|((x, y), c)| ((x.clone(), y.clone(), *t), c.clone())).collect());
        let right: Chain<(B::Word, B::Word, usize)> =
            delta.map(|(w, t)| m.coaction[*t].iter().map(|((y, u), c)| ((w.clone(), y.clone(), *u), c.clone())).collect());
        if left != right {
            let mut diff = left.clone();
            diff.add_scaled(&right, &-Scalar::one());
            let witness = diff.iter().next().map(|((x, y, _), _)| format!("{x:?} ⊗ {y:?}")).unwrap_or_default();
            rep.coassociativity_failures.push((s, witness));
        }
        let mut counit = Chain::new();
        for ((w, t), c) in delta.iter() {
            counit.add_term(*t, c * b.counit(w));
        }
        if counit != Chain::single(s, Scalar::one()) {
            rep.counit_failures.push(s);
        }
        if let (Some(sup), Some(pos)) = (&support, &m.positions) {
            let bad = delta.iter().any(|((w, t), _)| match b.support(w) {
                Some(alpha) => {
                    alpha.iter().any(|x| !sup.contains(x))
                        || alpha.first() != Some(&pos[s])
                        || alpha.last() != Some(&pos[*t])
                }
                None => false,
            });
            if bad {
                rep.support_failures.push(s);
            }
        }
    }
    rep
}

/// `φ(M)`: the comodule on `s(M)` with `δ = d_M + D_ε` and `Δ = Σ_α D_α`.
pub fn phi_object(m: &TwistedComplex, eps: &Augmentation, t: BarTruncation) -> Result<Comodule<BarWord>, ComodError> {
    let rep = m.validate_mc();
    if !rep.is_ok() {
        return Err(ComodError::Invalid(format!("twisted complex fails the Maurer–Cartan check: {rep:?}")));
    }
    let positions = m.positions();
    let span = match (positions.first(), positions.last()) {
        (Some(lo), Some(hi)) => (hi - lo) as usize,
        _ => 0,
    };
    if positions.iter().any(|p| *p < t.lo || *p > t.hi) || span > t.max_length {
        return Err(ComodError::PositionsOutsideWindow(positions));
    }
    let a = &m.algebra;
    let tot = m.total();
    let big_d = m.twisting(&tot);
    let dim = tot.fiber.dim();
    let mut out_of: Vec<Vec<(usize, usize, Scalar)>> = vec![Vec::new(); dim];
    for (l, c) in big_d.iter() {
        out_of[l.src].push((l.a, l.tgt, c.clone()));
    }
    let mut d = Vec::new();
    for s in 0..dim {
        let mut row: Chain<usize> = tot.fiber.d_of(s);
        for (x, t, c) in &out_of[s] {
            row.add_term(*t, c * eps.at(*x));
        }
        d.push(row.terms());
    }
    let fiber = FiberComplex { degrees: tot.fiber.degrees.clone(), weights: tot.fiber.weights.clone(), d };
    let mut coaction = Vec::new();
    for s in 0..dim {
        let mut co = Chain::new();
        // (letters, alpha, current element, coefficient, Σ|a|)
        let mut stack = vec![(Vec::new(), vec![tot.position(s)], s, Scalar::one(), 0i32)];
        while let Some((letters, alpha, cur, coef, deg)) = stack.pop() {
            let n = letters.len();
            co.add_term((BarWord::new(alpha.clone(), letters.clone()), cur), &coef * int(sign::word_coaction(n, deg)));
            for (x, t, c) in &out_of[cur] {
                let mut l2 = letters.clone();
                l2.push(*x);
                let mut a2 = alpha.clone();
                a2.push(tot.position(*t));
                let e = &coef * c * int(sign::tensor_differential(deg));
                stack.push((l2, a2, *t, e, deg + a.degree(*x)));
            }
        }
        coaction.push(co);
    }
    let positions = (0..dim).map(|s| tot.position(s)).collect();
    Ok(Comodule { fiber, positions: Some(positions), coaction })
}

/// Projectors `p_α` read off the length-zero part of the coaction.
pub fn projectors(n: &Comodule<BarWord>) -> BTreeMap<i32, Matrix> {
    let dim = n.dim();
    let mut out: BTreeMap<i32, Matrix> = BTreeMap::new();
    for s in 0..dim {
        for ((w, t), c) in n.coaction[s].iter() {
            if w.letters.is_empty() {
                out.entry(w.alpha[0]).or_insert_with(|| Matrix::zeros(dim, dim)).add_at(*t, s, c);
            }
        }
    }
    out
}

/// Idempotent, pairwise orthogonal, summing to the identity.
pub fn check_projectors(ps: &BTreeMap<i32, Matrix>, dim: usize) -> Result<(), ComodError> {
    let mut sum = Matrix::zeros(dim, dim);
    for (i, p) in ps {
        if p.mul(p)? != *p {
            return Err(ComodError::ProjectorFailure(format!("p_{i} is not idempotent")));
        }
        for (j, q) in ps.range(i + 1..) {
            if !p.mul(q)?.is_zero() || !q.mul(p)?.is_zero() {
                return Err(ComodError::ProjectorFailure(format!("p_{i} and p_{j} are not orthogonal")));
            }
        }
        sum = sum.add(p)?;
    }
    if sum != Matrix::identity(dim) {
        return Err(ComodError::ProjectorFailure("projectors do not sum to the identity".into()));
    }
    Ok(())
}

/// `ψ(N)`: `M^i = im p_i` (degrees lowered by `i`), `d_{M^i} = p_i δ p_i`, and
/// `d_{α₁α₀}` read off the length-one part of the coaction.
pub fn psi_object(n: &Comodule<BarWord>, algebra: &DgaPresentation) -> Result<TwistedComplex, ComodError> {
    let shape_ok = n.coaction.iter().all(|c| c.iter().all(|((w, _), _)| w.alpha.len() == w.letters.len() + 1));
    if !shape_ok {
        return Err(ComodError::ShapeMismatch("coaction is not valued in an augmented bar".into()));
    }
    let dim = n.dim();
    if dim == 0 {
        return Ok(TwistedComplex::new(algebra));
    }
    let ps = projectors(n);
    if ps.is_empty() {
        return Err(ComodError::NotBounded("no length-zero coaction terms, so no support".into()));
    }
    check_projectors(&ps, dim)?;
    // Image bases: p_i e_s for the pivot columns s of p_i.
    let mut bases: BTreeMap<i32, (Vec<usize>, Matrix)> = BTreeMap::new();
    for (i, p) in &ps {
        let piv = exactlin::pivot_columns(p);
        let cols: Vec<Vec<Scalar>> = piv.iter().map(|&s| p.column(s)).collect();
        bases.insert(*i, (piv.clone(), Matrix::from_columns(dim, &cols)?));
    }
    let coords = |i: i32, v: &[Scalar]| -> Result<Vec<Scalar>, ComodError> {
        exactlin::solve(&bases[&i].1, v).ok_or_else(|| ComodError::ProjectorFailure(format!("vector outside im p_{i}")))
    };
    let delta = Matrix::from_entries(dim, dim, (0..dim).flat_map(|s| n.fiber.d[s].iter().map(move |(t, c)| (*t, s, c.clone()))));
    let mut tc = TwistedComplex::new(algebra);
    for (i, (piv, basis)) in &bases {
        let degrees: Vec<i32> = piv.iter().map(|&s| n.degree(s) - i).collect();
        let weights = n.fiber.weights.as_ref().map(|w| piv.iter().map(|&s| w[s]).collect::<Vec<_>>());
        let p = &ps[i];
        let mut d = Vec::new();
        for k in 0..piv.len() {
            let v = p.mul_vec(&delta.mul_vec(&basis.column(k))?)?;
            let c = coords(*i, &v)?;
            d.push(c.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect());
        }
        let mut f = FiberComplex::graded(degrees).with_differential(d);
        if let Some(w) = weights {
            f = f.with_weights(w);
        }
        tc = tc.with_object(*i, f);
    }
    let mut maps: BTreeMap<(i32, i32), AMap> = BTreeMap::new();
    for (i0, (piv, basis)) in &bases {
        for (k, &s0) in piv.iter().enumerate() {
            let local_deg = n.degree(s0) - i0;
            // Δ^{(1)} of the basis vector, grouped by (α₁, letter).
            let mut parts: BTreeMap<(i32, usize), Vec<Scalar>> = BTreeMap::new();
            for (s, c) in basis.column(k).iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for ((w, t), e) in n.coaction[s].iter() {
                    if w.letters.len() == 1 {
                        let v = parts.entry((w.alpha[1], w.letters[0])).or_insert_with(|| vec![Scalar::zero(); dim]);
                        v[*t] += c * e;
                    }
                }
            }
            for ((i1, x), v) in parts {
                let sg = int(sign::word_coaction(1, algebra.degree(x)) * sign::shift_token(i1 - i0, local_deg));
                for (tgt, c) in coords(i1, &v)?.into_iter().enumerate() {
                    if !c.is_zero() {
                        maps.entry((i1, *i0)).or_default().add_term(HomLabel::new(k, x, tgt), c * &sg);
                    }
                }
            }
        }
    }
    for ((i, j), d) in maps {
        if !d.is_zero() {
            tc = tc.with_map(i, j, d);
        }
    }
    let rep = tc.validate_mc();
    if !rep.is_ok() {
        return Err(ComodError::Invalid(format!("extracted twisted complex fails the Maurer–Cartan check: {rep:?}")));
    }
    Ok(tc)
}

/// `(cmp ⊗ 1) Δ_M`: the same comodule over the reduced bar.
pub fn to_reduced(m: &Comodule<BarWord>, red: &ReducedShape) -> Comodule<RedWord> {
    let coaction = m
        .coaction
        .iter()
        .map(|c| c.map(|(w, t)| red.compare(w).iter().map(|(r, e)| ((r.clone(), *t), e.clone())).collect()))
        .collect();
    Comodule { fiber: m.fiber.clone(), positions: m.positions.clone(), coaction }
}

/// Bounds of the finite model of the comodule Hom complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CobarTruncation {
    pub max_tensors: usize,
    /// Bound on the total filtration degree of the words; components beyond it are quotiented out.
    pub max_filtration: usize,
}

impl CobarTruncation {
    pub fn new(max_tensors: usize, max_filtration: usize) -> Self {
        CobarTruncation { max_tensors, max_filtration }
    }
}

/// A component `m_src ↦ w_1 ⊗ ⋯ ⊗ w_n ⊗ n_tgt` with every `w_i` of positive length.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComodLabel<W> {
    pub src: usize,
    pub words: Vec<W>,
    pub tgt: usize,
}

impl<W> ComodLabel<W> {
    pub fn tensors(&self) -> usize {
        self.words.len()
    }
}

/// `Hom_{B-com}(M, N)` modelled by `Π_n Hom(M, B̄^{⊗n} ⊗ N)` modulo the components
/// beyond the truncation. These form a subcomplex when every reduced word has
/// positive filtration degree, since no term of the differential lowers `n` or
/// the total filtration.
pub struct ComodHom<'a, B: Coaugmented> {
    pub coalgebra: &'a B,
    pub source: &'a Comodule<B::Word>,
    pub target: &'a Comodule<B::Word>,
    pub truncation: CobarTruncation,
    m_in: Vec<Vec<(usize, Scalar)>>,
    unit: B::Word,
}

impl<'a, B: Coaugmented> ComodHom<'a, B> {
    pub fn new(b: &'a B, m: &'a Comodule<B::Word>, n: &'a Comodule<B::Word>, t: CobarTruncation) -> Result<Self, ComodError> {
        if b.basis(1).iter().any(|w| b.length(w) > 0 && b.filtration(w) == 0) {
            return Err(ComodError::Invalid("a reduced letter has filtration degree zero, so the truncation is not exact".into()));
        }
        Ok(ComodHom { coalgebra: b, source: m, target: n, truncation: t, m_in: m.fiber.incoming(), unit: b.unit_word() })
    }

    pub fn filtration(&self, ws: &[B::Word]) -> usize {
        ws.iter().map(|w| self.coalgebra.filtration(w)).sum()
    }

    fn keep(&self, l: &ComodLabel<B::Word>) -> bool {
        l.tensors() <= self.truncation.max_tensors && self.filtration(&l.words) <= self.truncation.max_filtration
    }

    fn words_degree(&self, ws: &[B::Word]) -> i32 {
        ws.iter().map(|w| self.coalgebra.degree(w)).sum()
    }

    /// Degree of the underlying graded map.
    pub fn map_degree(&self, l: &ComodLabel<B::Word>) -> i32 {
        self.words_degree(&l.words) + self.target.degree(l.tgt) - self.source.degree(l.src)
    }

    /// Total degree: map degree plus the number of tensor factors.
    pub fn degree(&self, l: &ComodLabel<B::Word>) -> i32 {
        self.map_degree(l) + l.tensors() as i32
    }

    pub fn basis(&self) -> Vec<ComodLabel<B::Word>> {
        let b = self.coalgebra;
        let reduced: Vec<B::Word> = b
            .basis(self.truncation.max_filtration)
            .into_iter()
            .filter(|w| b.length(w) > 0 && b.filtration(w) <= self.truncation.max_filtration)
            .collect();
        let mut tuples: Vec<Vec<B::Word>> = vec![Vec::new()];
        let mut frontier = tuples.clone();
        for _ in 0..self.truncation.max_tensors {
            let mut next = Vec::new();
            for t in &frontier {
                let used = self.filtration(t);
                for w in &reduced {
                    if used + b.filtration(w) <= self.truncation.max_filtration {
                        let mut t2 = t.clone();
                        t2.push(w.clone());
                        next.push(t2);
                    }
                }
            }
            tuples.extend(next.iter().cloned());
            frontier = next;
        }
        let mut out = Vec::new();
        for ws in &tuples {
            for src in 0..self.source.dim() {
                for tgt in 0..self.target.dim() {
                    out.push(ComodLabel { src, words: ws.clone(), tgt });
                }
            }
        }
        out
    }

    /// Degree of a desuspended letter `s^{-1} w`.
    fn shifted(&self, w: &B::Word) -> i32 {
        self.coalgebra.degree(w) + 1
    }

    /// `D f = d_{ΩB ⊗_τ N} ∘ f - (-1)^{|f|} f ∘ (δ_M + τ_M)`, where `ΩB` carries
    /// `-s^{-1}d_B` and the desuspended reduced coproduct, and `τ` sends
    /// `m` to the positive-length part of its coaction.
    pub fn differential(&self, l: &ComodLabel<B::Word>) -> Chain<ComodLabel<B::Word>> {
        let b = self.coalgebra;
        let deg = self.degree(l);
        let mut out = Chain::new();
        let with = |ws: Vec<B::Word>, src: usize, tgt: usize| ComodLabel { src, words: ws, tgt };
        let mut before = 0;
        for (i, w) in l.words.iter().enumerate() {
            let s = sign::sgn(before as i64);
            for (u, c) in b.differential(w).iter() {
                let mut ws = l.words.clone();
                ws[i] = u.clone();
                out.add_term(with(ws, l.src, l.tgt), c * int(-s));
            }
            for ((x, y), c) in b.coproduct(w).iter() {
                if *x != self.unit && *y != self.unit {
                    let mut ws = l.words[..i].to_vec();
                    ws.push(x.clone());
                    ws.push(y.clone());
                    ws.extend(l.words[i + 1..].iter().cloned());
                    let e = s * sign::sgn(b.degree(x) as i64);
                    out.add_term(with(ws, l.src, l.tgt), c * int(e));
                }
            }
            before += self.shifted(w);
        }
        let s = sign::sgn(before as i64);
        for (t, c) in &self.target.fiber.d[l.tgt] {
            out.add_term(with(l.words.clone(), l.src, *t), c * int(s));
        }
        for ((w, t), c) in self.target.coaction[l.tgt].iter() {
            if *w != self.unit {
                let mut ws = l.words.clone();
                ws.push(w.clone());
                out.add_term(with(ws, l.src, *t), c * int(s));
            }
        }
        let s = -sign::hom_differential(deg);
        for (s0, c) in &self.m_in[l.src] {
            out.add_term(with(l.words.clone(), *s0, l.tgt), c * int(s));
        }
        for (s0, row) in self.source.coaction.iter().enumerate() {
            for ((w, t), c) in row.iter() {
                if *t == l.src && *w != self.unit {
                    let mut ws = vec![w.clone()];
                    ws.extend(l.words.iter().cloned());
                    let e = s * sign::koszul(deg, self.shifted(w));
                    out.add_term(with(ws, s0, l.tgt), c * int(e));
                }
            }
        }
        out.iter().filter(|(k, _)| self.keep(k)).map(|(k, c)| (k.clone(), c.clone())).collect()
    }

    pub fn differential_chain(&self, f: &Chain<ComodLabel<B::Word>>) -> Chain<ComodLabel<B::Word>> {
        f.map(|l| self.differential(l))
    }

    pub fn complex(&self) -> Result<Complex<ComodLabel<B::Word>>, ComodError> {
        let space = GradedSpace::from_labels(self.basis().into_iter().map(|l| (self.degree(&l), l)))?;
        Ok(Complex::from_fn(space, |l| self.differential(l))?)
    }
}

pub fn comod_hom_complex<B: Coaugmented>(
    b: &B,
    m: &Comodule<B::Word>,
    n: &Comodule<B::Word>,
    t: CobarTruncation,
) -> Result<Complex<ComodLabel<B::Word>>, ComodError> {
    ComodHom::new(b, m, n, t)?.complex()
}

/// `μ(f ⊗ g) = (1^{⊗j} ⊗ f) ∘ g` for `g: M_1 -> B̄^{⊗j} ⊗ M_2` and
/// `f: M_2 -> B̄^{⊗i} ⊗ M_3`; `f` of total degree `f_degree` passes the
/// desuspended letters of `g`, whose total degree is given by `letters_degree`.
pub fn compose_labels<W: Ord + Clone>(
    f: &Chain<ComodLabel<W>>,
    f_degree: i32,
    g: &Chain<ComodLabel<W>>,
    letters_degree: impl Fn(&[W]) -> i32,
) -> Chain<ComodLabel<W>> {
    let mut out = Chain::new();
    for (lg, cg) in g.iter() {
        let s = int(sign::koszul(letters_degree(&lg.words), f_degree));
        for (lf, cf) in f.iter() {
            if lf.src == lg.tgt {
                let mut ws = lg.words.clone();
                ws.extend(lf.words.iter().cloned());
                out.add_term(ComodLabel { src: lg.src, words: ws, tgt: lf.tgt }, cg * cf * &s);
            }
        }
    }
    out
}

impl<B: Coaugmented> ComodHom<'_, B> {
    /// Total degree of the desuspended letters.
    pub fn letters_degree(&self, ws: &[B::Word]) -> i32 {
        ws.iter().map(|w| self.shifted(w)).sum()
    }

    /// `μ` on Hom elements of homogeneous total degree.
    pub fn compose(&self, f: &Chain<ComodLabel<B::Word>>, g: &Chain<ComodLabel<B::Word>>) -> Chain<ComodLabel<B::Word>> {
        let mut out = Chain::new();
        for (lf, c) in f.iter() {
            let part = compose_labels(&Chain::single(lf.clone(), c.clone()), self.degree(lf), g, |ws| self.letters_degree(ws));
            out.add_scaled(&part, &Scalar::one());
        }
        out.iter().filter(|(k, _)| self.keep(k)).map(|(k, c)| (k.clone(), c.clone())).collect()
    }
}

/// `ψ(f)`: keep the components valued in `I^{⊗n} ⊗ N`, multiply the letters into `A`.
pub fn psi_morphism(red: &ReducedShape, f: &Chain<ComodLabel<RedWord>>) -> AMap {
    let a = &red.algebra;
    let mut out = Chain::new();
    for (l, c) in f.iter() {
        if l.words.iter().any(|w| w.len() != 1) {
            continue;
        }
        let mut prod = a.unit_vector();
        let mut degs = Vec::new();
        for w in &l.words {
            let y = w.0[0];
            prod = a.mul(&prod, &red.ideal.vectors[y]);
            degs.push(red.letter_degree(y));
        }
        let s = int(psi_sign(&degs));
        for (x, e) in prod.iter().enumerate() {
            if !e.is_zero() {
                out.add_term(HomLabel::new(l.src, x, l.tgt), c * e * &s);
            }
        }
    }
    out
}

/// `s^{-1}[y] ↦ (-1)^{|y|} y`, extended multiplicatively.
fn psi_sign(degs: &[i32]) -> i64 {
    sign::sgn(degs.iter().map(|&d| d as i64).sum())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub truncation: CobarTruncation,
    /// `H^0`, `H^1` of the twisted Hom complex.
    pub twisted: [usize; 2],
    /// `H^0`, `H^1` of the comodule Hom complex of the `φ`-images over the reduced bar.
    pub comodule: [usize; 2],
    /// The same at the next length bound; equal values mean the truncation has stabilized.
    pub comodule_next: [usize; 2],
    /// Rank of the map induced by `ψ` on `H^0`, `H^1`.
    pub psi_rank: [usize; 2],
    pub psi_is_chain_map: bool,
}

impl EquivalenceReport {
    pub fn is_ok(&self) -> bool {
        self.twisted == self.comodule && self.comodule == self.comodule_next && self.psi_rank == self.twisted && self.psi_is_chain_map
    }
}

/// Cross-checks `Hom_{KC_A}(M, N)` against `Hom_{B_red-com}(φM, φN)` in degrees 0 and 1.
pub fn equivalence_check(
    m: &TwistedComplex,
    n: &TwistedComplex,
    eps: &Augmentation,
    max_length: usize,
) -> Result<EquivalenceReport, ComodError> {
    let tw = hom_complex(m, n)?;
    let all: BTreeSet<i32> = m.positions().into_iter().chain(n.positions()).collect();
    let (lo, hi) = (all.first().copied().unwrap_or(0), all.last().copied().unwrap_or(0));
    let t = BarTruncation::new(lo, hi, (hi - lo) as usize);
    let red = ReducedShape::new(&m.algebra, eps);
    let pm = to_reduced(&phi_object(m, eps, t)?, &red);
    let pn = to_reduced(&phi_object(n, eps, t)?, &red);
    let dims = |len: usize| -> Result<([usize; 2], Option<(Complex<ComodLabel<RedWord>>, ComodHom<'_, ReducedShape>)>), ComodError> {
        let h = ComodHom::new(&red, &pm, &pn, CobarTruncation::new(len, len))?;
        let c = h.complex()?;
        Ok(([c.cohomology(0)?.dim(), c.cohomology(1)?.dim()], Some((c, h))))
    };
    let (comodule, built) = dims(max_length)?;
    let (comodule_next, _) = dims(max_length + 1)?;
    let (cc, h) = built.expect("built above");
    let twisted = [tw.complex.cohomology(0)?.dim(), tw.complex.cohomology(1)?.dim()];
    let psi = GradedMap::from_fn(cc.space(), tw.complex.space(), 0, |l| psi_morphism(&red, &Chain::single(l.clone(), Scalar::one())))?;
    // ψ D = D ψ, away from the top length where the truncation cuts terms.
    let mut psi_is_chain_map = true;
    for (_, l) in cc.space().iter() {
        if h.filtration(&l.words) + 1 >= max_length {
            continue;
        }
        let one = Chain::single(l.clone(), Scalar::one());
        let lhs = psi_morphism(&red, &h.differential_chain(&one));
        let rhs = crate::twisted::hom_differential(m, n, &psi_morphism(&red, &one));
        if lhs != rhs {
            psi_is_chain_map = false;
            break;
        }
    }
    let psi_rank = [induced_rank(&psi, &cc, &tw.complex, 0)?, induced_rank(&psi, &cc, &tw.complex, 1)?];
    Ok(EquivalenceReport {
        truncation: CobarTruncation::new(max_length, max_length),
        twisted,
        comodule,
        comodule_next,
        psi_rank,
        psi_is_chain_map,
    })
}

/// `ψ∘φ(M) = M` with identical matrices.
pub fn round_trip(m: &TwistedComplex, eps: &Augmentation) -> Result<bool, ComodError> {
    let ps = m.positions();
    let (lo, hi) = (ps.first().copied().unwrap_or(0), ps.last().copied().unwrap_or(0));
    let phi = phi_object(m, eps, BarTruncation::new(lo, hi, (hi - lo) as usize))?;
    let back = psi_object(&phi, &m.algebra)?;
    Ok(back.normalized() == m.normalized())
}

/// Convenience: the sharp identity as a comodule Hom element of length zero.
pub fn identity_labels<W: Ord + Clone>(dim: usize) -> Chain<ComodLabel<W>> {
    (0..dim).map(|s| (ComodLabel { src: s, words: Vec::new(), tgt: s }, Scalar::one())).collect()
}

/// `ψ` applied to a Hom element, packaged as a twisted morphism.
pub fn psi_hom(red: &ReducedShape, f: &Chain<ComodLabel<RedWord>>, degree: i32) -> TwistedHom {
    TwistedHom { degree, map: psi_morphism(red, f) }
}
