//! Integrable nilpotent connections over a DGA with `A^0 = k`.
//!
//! A connection lives on `V = k^n` (every basis vector in degree 0) and is
//! stored as `∇(v_s) = Σ c a ⊗ v_t` with `a ∈ A^1`. The twisted-complex side
//! enters through [`connection_from_twisted`], which reads `∇` off `D^#`.
//!
//! `H^0` of the reduced bar is kept in the normalized word basis
//! `ŵ = (-1)^{n(n+1)/2} w` for a word of length `n`. On degree-zero words this
//! turns the signed coproduct into plain deconcatenation, and the coaction of
//! a connection becomes `Δv = Σ_w ŵ ⊗ N_{a_n}⋯N_{a_1} v`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::bar::{RedWord, ReducedShape};
use crate::complexes::{sign, Chain};
use crate::dga::{reduced_model, Augmentation, DgaError, DgaPresentation, ReducedModel};
use crate::exactlin::{self, int, LinError, Matrix, Scalar};
use crate::twisted::{AMap, CategoryA, FiberComplex, HomLabel, TwistedComplex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConnectError {
    #[error("twisted complex is not of the K0 shape: {0}")]
    NotK0Shape(String),
    #[error("degree-zero part of the algebra is larger than the ground field")]
    LargeDegreeZero,
    #[error("invalid connection: {0}")]
    InvalidConnection(String),
    #[error("connection is not integrable; ∇² has a term {0:?}")]
    NotIntegrable(HomLabel),
    #[error("connection is not nilpotent in the given basis")]
    NotNilpotent,
    #[error("the given maps are not morphisms of connections")]
    NotMorphism,
    #[error("connections over different algebras")]
    AlgebraMismatch,
    #[error("connection is not valued in the reduced model")]
    NotInModel,
    #[error("iterated connection words exceed the length bound {0}")]
    LengthTooSmall(usize),
    #[error("coaction does not lie in the degree-zero cohomology of the bar")]
    NotInSlice,
    #[error("invalid comodule: {0}")]
    InvalidComodule(String),
    #[error("coproduct of a representative is not a product of cocycles")]
    CoproductNotDefined,
    #[error("round trip through connections changed the coaction")]
    RoundTrip,
    #[error(transparent)]
    Dga(#[from] DgaError),
    #[error(transparent)]
    Lin(#[from] LinError),
}

fn degree_zero_is_ground(a: &DgaPresentation) -> bool {
    a.of_degree(0) == vec![a.unit()]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    pub algebra: DgaPresentation,
    /// Filtration index of each basis vector; `∇` raises it strictly.
    pub positions: Vec<i32>,
    /// `∇(v_s) = Σ c a ⊗ v_t` with `a ∈ A^1`.
    pub nabla: AMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionReport {
    /// First term of `∇∘∇`, if any.
    pub curvature_witness: Option<HomLabel>,
    pub nilpotent: bool,
}

impl ConnectionReport {
    pub fn is_ok(&self) -> bool {
        self.curvature_witness.is_none() && self.nilpotent
    }
}

impl Connection {
    pub fn new(algebra: &DgaPresentation, positions: Vec<i32>, nabla: AMap) -> Result<Self, ConnectError> {
        if !degree_zero_is_ground(algebra) {
            return Err(ConnectError::LargeDegreeZero);
        }
        let n = positions.len();
        for (l, _) in nabla.iter() {
            if l.src >= n || l.tgt >= n || l.a >= algebra.dim() || algebra.degree(l.a) != 1 {
                return Err(ConnectError::InvalidConnection(format!("term {l:?} is not an A^1-valued map of V")));
            }
        }
        Ok(Connection { algebra: algebra.clone(), positions, nabla })
    }

    pub fn trivial(algebra: &DgaPresentation, dim: usize) -> Result<Self, ConnectError> {
        Connection::new(algebra, vec![0; dim], Chain::new())
    }

    pub fn dim(&self) -> usize {
        self.positions.len()
    }

    /// `V` as an object of `C_A`.
    pub fn fiber(&self) -> FiberComplex {
        FiberComplex::graded(vec![0; self.dim()])
    }

    /// `∇∘∇` with `∇(a ⊗ v) = da ⊗ v - a·∇v` on `A^1 ⊗ V`.
    pub fn curvature(&self) -> AMap {
        let a = &self.algebra;
        let by_src = self.by_source();
        let mut out = Chain::new();
        for (l, c) in self.nabla.iter() {
            for (b, cb) in a.d_basis(l.a) {
                out.add_term(HomLabel::new(l.src, *b, l.tgt), c * cb);
            }
            for (a2, t, c2) in &by_src[l.tgt] {
                for (b, cb) in a.mul_basis(l.a, *a2) {
                    out.add_term(HomLabel::new(l.src, *b, *t), -(c * c2 * cb));
                }
            }
        }
        out
    }

    pub fn is_nilpotent(&self) -> bool {
        self.nabla.iter().all(|(l, _)| self.positions[l.tgt] > self.positions[l.src])
    }

    pub fn check(&self) -> ConnectionReport {
        ConnectionReport {
            curvature_witness: self.curvature().iter().next().map(|(l, _)| *l),
            nilpotent: self.is_nilpotent(),
        }
    }

    /// `(a, t, c)` for every term `c a ⊗ v_t` of `∇(v_s)`, indexed by `s`.
    fn by_source(&self) -> Vec<Vec<(usize, usize, Scalar)>> {
        let mut out = vec![Vec::new(); self.dim()];
        for (l, c) in self.nabla.iter() {
            out[l.src].push((l.a, l.tgt, c.clone()));
        }
        out
    }

    /// `N_a` with `∇ = Σ a ⊗ N_a`, as a matrix acting on columns.
    pub fn matrix(&self, a: usize) -> Matrix {
        let n = self.dim();
        Matrix::from_entries(n, n, self.nabla.iter().filter(|(l, _)| l.a == a).map(|(l, c)| (l.tgt, l.src, c.clone())))
    }
}

/// `(⊕_i M^{-i,i}, D^#)`: every `M^i` must sit in the single degree `-i` with zero differential.
pub fn connection_from_twisted(m: &TwistedComplex) -> Result<Connection, ConnectError> {
    if !degree_zero_is_ground(&m.algebra) {
        return Err(ConnectError::LargeDegreeZero);
    }
    for (i, f) in &m.objects {
        if f.degrees.iter().any(|d| *d != -i) || f.d.iter().any(|r| !r.is_empty()) {
            return Err(ConnectError::NotK0Shape(format!("position {i} is not a vector space in degree {}", -i)));
        }
    }
    let tot = m.total();
    let nabla = m.twisting(&tot);
    if let Some((l, _)) = nabla.iter().find(|(l, _)| m.algebra.degree(l.a) != 1) {
        return Err(ConnectError::NotK0Shape(format!("map term {l:?} is not valued in A^1")));
    }
    let positions = (0..tot.fiber.dim()).map(|g| tot.position(g)).collect();
    Connection::new(&m.algebra, positions, nabla)
}

/// `f: V → W` is compatible with the connections: `∇_W f = f ∇_V`.
pub fn is_morphism(v: &Connection, w: &Connection, f: &Matrix) -> bool {
    if v.algebra != w.algebra || f.rows() != w.dim() || f.cols() != v.dim() {
        return false;
    }
    let mut diff: AMap = Chain::new();
    let wb = w.by_source();
    for s in 0..v.dim() {
        for t in 0..w.dim() {
            let c = f.get(t, s);
            if c.is_zero() {
                continue;
            }
            for (a, u, c2) in &wb[t] {
                diff.add_term(HomLabel::new(s, *a, *u), &c * c2);
            }
        }
    }
    for (l, c) in v.nabla.iter() {
        for u in 0..w.dim() {
            let c2 = f.get(u, l.tgt);
            if !c2.is_zero() {
                diff.add_term(HomLabel::new(l.src, l.a, u), -(c * c2));
            }
        }
    }
    diff.is_zero()
}

fn as_amap(a: &DgaPresentation, f: &Matrix) -> AMap {
    f.entries().into_iter().map(|(t, s, c)| (HomLabel::new(s, a.unit(), t), c)).collect()
}

/// A map `h: V → A^{-1} ⊗ W` with `f - g = ∇h + h∇`, if one exists.
pub fn homotopy_equivalent(v: &Connection, w: &Connection, f: &Matrix, g: &Matrix) -> Result<Option<AMap>, ConnectError> {
    if !is_morphism(v, w, f) || !is_morphism(v, w, g) {
        return Err(ConnectError::NotMorphism);
    }
    let a = &v.algebra;
    let target = as_amap(a, &f.sub(g)?);
    if target.is_zero() {
        return Ok(Some(Chain::new()));
    }
    let cat = CategoryA::new(a);
    let (fv, fw) = (v.fiber(), w.fiber());
    let unknowns = cat.hom_basis(&fv, &fw).remove(&-1).unwrap_or_default();
    let mut rows: BTreeMap<HomLabel, usize> = BTreeMap::new();
    let mut columns = Vec::new();
    for u in &unknowns {
        let h = Chain::single(*u, Scalar::one());
        // D(h) = ∂h + ∇_W ∘ h + h ∘ ∇_V in degree -1.
        let mut dh = cat.differential(&h, &fv, &fw);
        dh.add_scaled(&cat.compose(&w.nabla, &h, &fw, &fw), &Scalar::one());
        dh.add_scaled(&cat.compose(&h, &v.nabla, &fv, &fw), &Scalar::one());
        let col: Vec<(usize, Scalar)> = dh
            .iter()
            .map(|(l, c)| {
                let len = rows.len();
                (*rows.entry(*l).or_insert(len), c.clone())
            })
            .collect();
        columns.push(col);
    }
    let mut rhs_entries = Vec::new();
    for (l, c) in target.iter() {
        let len = rows.len();
        rhs_entries.push((*rows.entry(*l).or_insert(len), c.clone()));
    }
    let m = Matrix::from_entries(
        rows.len(),
        unknowns.len(),
        columns.iter().enumerate().flat_map(|(j, col)| col.iter().map(move |(i, c)| (*i, j, c.clone()))),
    );
    let mut rhs = vec![Scalar::zero(); rows.len()];
    for (i, c) in rhs_entries {
        rhs[i] = c;
    }
    Ok(exactlin::solve(&m, &rhs).map(|x| unknowns.iter().zip(x).filter(|(_, c)| !c.is_zero()).map(|(u, c)| (*u, c)).collect()))
}

/// `(-1)^{n(n+1)/2}` relating `ŵ` to the bar word `w` of length `n`.
pub fn normalization_sign(w: &RedWord) -> Scalar {
    let n = w.len() as i64;
    int(sign::sgn(n * (n + 1) / 2))
}

/// `H^0` of the reduced bar up to a length bound, as a coalgebra.
#[derive(Clone, Debug)]
pub struct CoalgebraSlice {
    /// The algebra the slice was requested for.
    pub source: DgaPresentation,
    pub model: ReducedModel,
    pub shape: ReducedShape,
    pub max_length: usize,
    /// Degree-zero words; coordinates below refer to their normalized versions `ŵ`.
    pub words: Vec<RedWord>,
    /// Cocycle representatives in normalized coordinates.
    pub basis: Vec<Vec<Scalar>>,
    /// `Δ z_i = Σ c z_j ⊗ z_k`.
    pub delta: Vec<Chain<(usize, usize)>>,
    pub counit: Vec<Scalar>,
    /// Rank of the incoming differential; representatives are unique when it is zero.
    pub coboundaries: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceCheck {
    pub coassociative: bool,
    pub counital: bool,
}

impl SliceCheck {
    pub fn is_ok(&self) -> bool {
        self.coassociative && self.counital
    }
}

/// Computes `H^0(B_red(A'))` up to `max_length`, where `A'` is the reduced model of `a`.
pub fn h0_coalgebra(a: &DgaPresentation, max_length: usize) -> Result<CoalgebraSlice, ConnectError> {
    let model = reduced_model(a)?;
    let alg = &model.algebra;
    let shape = ReducedShape::new(alg, &Augmentation::standard(alg));
    let all = shape.words(max_length, None);
    let words: Vec<RedWord> = all.iter().filter(|w| shape.total_degree(w) == 0).cloned().collect();
    let index: BTreeMap<&RedWord, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();

    let mut out_rows: BTreeMap<RedWord, usize> = BTreeMap::new();
    let mut d_out = Vec::new();
    for (j, w) in words.iter().enumerate() {
        let s = normalization_sign(w);
        for (x, c) in shape.total(w).iter() {
            let len = out_rows.len();
            d_out.push((*out_rows.entry(x.clone()).or_insert(len), j, c * &s));
        }
    }
    let d_out = Matrix::from_entries(out_rows.len(), words.len(), d_out);
    let mut d_in = Vec::new();
    let below: Vec<&RedWord> = all.iter().filter(|w| shape.total_degree(w) == -1).collect();
    for (j, w) in below.iter().enumerate() {
        for (x, c) in shape.total(w).iter() {
            if let Some(&i) = index.get(x) {
                d_in.push((i, j, c * normalization_sign(x)));
            }
        }
    }
    let coboundaries = exactlin::rank(&Matrix::from_entries(words.len(), below.len(), d_in));
    if coboundaries != 0 {
        return Err(ConnectError::CoproductNotDefined);
    }
    let basis = exactlin::kernel(&d_out).basis;
    let z = Matrix::from_columns(words.len(), &basis)?;

    let n = words.len();
    let mut delta = Vec::new();
    for v in &basis {
        let mut x = Matrix::zeros(n, n);
        for (j, c) in v.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let raw = c * normalization_sign(&words[j]);
            for ((w1, w2), e) in shape.coproduct(&words[j]).iter() {
                let (Some(&i1), Some(&i2)) = (index.get(w1), index.get(w2)) else {
                    return Err(ConnectError::CoproductNotDefined);
                };
                let coef = &raw * e * normalization_sign(w1) * normalization_sign(w2);
                x.add_at(i1, i2, &coef);
            }
        }
        // X = Z C Zᵀ: solve Z Y = X, then Z Cᵀ = Yᵀ.
        let y = exactlin::solve_many(&z, &x).ok_or(ConnectError::CoproductNotDefined)?;
        let ct = exactlin::solve_many(&z, &y.transpose()).ok_or(ConnectError::CoproductNotDefined)?;
        delta.push(ct.entries().into_iter().map(|(k, j, c)| ((j, k), c)).collect());
    }
    let empty = index[&RedWord(Vec::new())];
    let counit = basis.iter().map(|v| v[empty].clone()).collect();
    Ok(CoalgebraSlice { source: a.clone(), model, shape, max_length, words, basis, delta, counit, coboundaries })
}

impl CoalgebraSlice {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn algebra(&self) -> &DgaPresentation {
        &self.model.algebra
    }

    fn basis_matrix(&self) -> Matrix {
        Matrix::from_columns(self.words.len(), &self.basis).expect("columns have the word count")
    }

    /// Coordinates in the slice basis of a normalized word vector, if it is a cocycle.
    pub fn coords(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        exactlin::solve(&self.basis_matrix(), v)
    }

    /// The slice element represented by the empty word.
    pub fn unit(&self) -> usize {
        let mut e = vec![Scalar::zero(); self.words.len()];
        e[self.words.iter().position(|w| w.is_empty()).expect("empty word present")] = Scalar::one();
        let c = self.coords(&e).expect("the empty word is a cocycle");
        c.iter().position(|x| x.is_one()).expect("the empty word is a basis element")
    }

    /// Index of the basis element represented by the single normalized word `w`.
    pub fn word_element(&self, w: &RedWord) -> Option<usize> {
        let j = self.words.iter().position(|x| x == w)?;
        self.basis.iter().position(|v| v.iter().enumerate().all(|(i, c)| if i == j { c.is_one() } else { c.is_zero() }))
    }

    /// `λ(z) ∈ A^1`: the length-one part of `z`, read in normalized coordinates.
    fn linear_part(&self, k: usize) -> Vec<(usize, Scalar)> {
        self.words
            .iter()
            .zip(&self.basis[k])
            .filter(|(w, c)| w.len() == 1 && !c.is_zero())
            .map(|(w, c)| (self.shape.ideal.source[w.0[0]], c.clone()))
            .collect()
    }

    /// Rewrites a connection over the source algebra in terms of the reduced model.
    pub fn pull_back(&self, c: &Connection) -> Result<Connection, ConnectError> {
        if &c.algebra == self.algebra() {
            return Ok(c.clone());
        }
        if c.algebra != self.source {
            return Err(ConnectError::AlgebraMismatch);
        }
        let images = Matrix::from_columns(self.source.dim(), &self.model.inclusion.images)?;
        let mut nabla = Chain::new();
        for (l, x) in c.nabla.iter() {
            let coords = exactlin::solve(&images, &self.source.basis_vector(l.a)).ok_or(ConnectError::NotInModel)?;
            for (b, y) in coords.into_iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                nabla.add_term(HomLabel::new(l.src, b, l.tgt), x * y);
            }
        }
        Connection::new(self.algebra(), c.positions.clone(), nabla)
    }

    pub fn format_element(&self, k: usize) -> String {
        let alg = self.algebra();
        let terms: Vec<String> = self
            .words
            .iter()
            .zip(&self.basis[k])
            .filter(|(_, c)| !c.is_zero())
            .map(|(w, c)| {
                let word = if w.is_empty() {
                    "1".to_string()
                } else {
                    let ls: Vec<&str> = w.0.iter().map(|&y| alg.label(self.shape.ideal.source[y])).collect();
                    format!("[{}]", ls.join("|"))
                };
                if c.is_one() {
                    word
                } else {
                    format!("{}{}", exactlin::format_scalar(c), word)
                }
            })
            .collect();
        terms.join(" + ")
    }

    pub fn check(&self) -> SliceCheck {
        let mut coassociative = true;
        let mut counital = true;
        for i in 0..self.dim() {
            let mut left: Chain<(usize, usize, usize)> = Chain::new();
            let mut right: Chain<(usize, usize, usize)> = Chain::new();
            let mut ec: Chain<usize> = Chain::new();
            let mut ce: Chain<usize> = Chain::new();
            for ((j, k), c) in self.delta[i].iter() {
                for ((p, q), e) in self.delta[*j].iter() {
                    left.add_term((*p, *q, *k), c * e);
                }
                for ((p, q), e) in self.delta[*k].iter() {
                    right.add_term((*j, *p, *q), c * e);
                }
                ec.add_term(*k, c * &self.counit[*j]);
                ce.add_term(*j, c * &self.counit[*k]);
            }
            coassociative &= left == right;
            let id = Chain::single(i, Scalar::one());
            counital &= ec == id && ce == id;
        }
        SliceCheck { coassociative, counital }
    }
}

/// A right-hand comodule over a slice: `Δ m_s = Σ c z_k ⊗ m_t` stored as `(k, t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceComodule {
    pub coaction: Vec<Chain<(usize, usize)>>,
}

impl SliceComodule {
    pub fn dim(&self) -> usize {
        self.coaction.len()
    }

    pub fn trivial(slice: &CoalgebraSlice, dim: usize) -> Self {
        let u = slice.unit();
        SliceComodule { coaction: (0..dim).map(|s| Chain::single((u, s), Scalar::one())).collect() }
    }

    pub fn validate(&self, slice: &CoalgebraSlice) -> Result<(), ConnectError> {
        let n = self.dim();
        for (s, co) in self.coaction.iter().enumerate() {
            if co.iter().any(|((k, t), _)| *k >= slice.dim() || *t >= n) {
                return Err(ConnectError::InvalidComodule(format!("coaction of m{s} is out of range")));
            }
            let mut left: Chain<(usize, usize, usize)> = Chain::new();
            let mut right: Chain<(usize, usize, usize)> = Chain::new();
            let mut counit: Chain<usize> = Chain::new();
            for ((k, t), c) in co.iter() {
                for ((i, j), e) in slice.delta[*k].iter() {
                    left.add_term((*i, *j, *t), c * e);
                }
                for ((j, u), e) in self.coaction[*t].iter() {
                    right.add_term((*k, *j, *u), c * e);
                }
                counit.add_term(*t, c * &slice.counit[*k]);
            }
            if left != right {
                return Err(ConnectError::InvalidComodule(format!("coaction is not coassociative on m{s}")));
            }
            if counit != Chain::single(s, Scalar::one()) {
                return Err(ConnectError::InvalidComodule(format!("coaction is not counital on m{s}")));
            }
        }
        Ok(())
    }
}

/// `Δv = Σ_w ŵ ⊗ N_{a_n}⋯N_{a_1} v`, expressed in the slice basis.
pub fn connection_to_comodule(c: &Connection, slice: &CoalgebraSlice) -> Result<SliceComodule, ConnectError> {
    let c = &slice.pull_back(c)?;
    if let Some(l) = c.check().curvature_witness {
        return Err(ConnectError::NotIntegrable(l));
    }
    let by_src = c.by_source();
    let ideal = &slice.shape.ideal;
    let index: BTreeMap<&RedWord, usize> = slice.words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut coaction = Vec::new();
    for v in 0..c.dim() {
        let mut all: Chain<(RedWord, usize)> = Chain::new();
        let mut frontier: Chain<(RedWord, usize)> = Chain::single((RedWord(Vec::new()), v), Scalar::one());
        while !frontier.is_zero() {
            all.add_scaled(&frontier, &Scalar::one());
            let mut next = Chain::new();
            for ((w, u), coef) in frontier.iter() {
                if w.len() == slice.max_length && !by_src[*u].is_empty() {
                    return Err(ConnectError::LengthTooSmall(slice.max_length));
                }
                for (a, t, e) in &by_src[*u] {
                    for (y, p) in ideal.project_basis(*a) {
                        let mut letters = w.0.clone();
                        letters.push(y);
                        next.add_term((RedWord(letters), *t), coef * e * p);
                    }
                }
            }
            frontier = next;
        }
        let mut co = Chain::new();
        for t in 0..c.dim() {
            let mut vec = vec![Scalar::zero(); slice.words.len()];
            for ((w, u), coef) in all.iter().filter(|((_, u), _)| *u == t) {
                let _ = u;
                vec[*index.get(w).ok_or(ConnectError::NotInSlice)?] = coef.clone();
            }
            if vec.iter().all(|x| x.is_zero()) {
                continue;
            }
            let x = slice.coords(&vec).ok_or(ConnectError::NotInSlice)?;
            for (k, e) in x.into_iter().enumerate().filter(|(_, e)| !e.is_zero()) {
                co.add_term((k, t), e);
            }
        }
        coaction.push(co);
    }
    Ok(SliceComodule { coaction })
}

/// `M ≅ 𝓜 = ker(Δ_{H^0} ⊗ 1 - 1 ⊗ Δ_M)` through `u ⊗ 1`, with the connection
/// induced by splitting off the first bar letter. The filtration is the
/// longest `∇`-path ending at each basis vector.
pub fn comodule_to_connection(slice: &CoalgebraSlice, m: &SliceComodule) -> Result<Connection, ConnectError> {
    m.validate(slice)?;
    let (dh, dm) = (slice.dim(), m.dim());
    let col = |k: usize, t: usize| k * dm + t;
    let row = |i: usize, j: usize, t: usize| (i * dh + j) * dm + t;
    let mut entries = Vec::new();
    for k in 0..dh {
        for t in 0..dm {
            for ((i, j), c) in slice.delta[k].iter() {
                entries.push((row(*i, *j, t), col(k, t), c.clone()));
            }
            for ((j, u), c) in m.coaction[t].iter() {
                entries.push((row(k, *j, *u), col(k, t), -c.clone()));
            }
        }
    }
    let kernel = exactlin::kernel(&Matrix::from_entries(dh * dh * dm, dh * dm, entries));
    if kernel.dim() != dm {
        return Err(ConnectError::InvalidComodule(format!("kernel has dimension {} for a rank-{dm} comodule", kernel.dim())));
    }
    let counit = Matrix::from_entries(
        dm,
        dh * dm,
        (0..dh).flat_map(|k| (0..dm).map(move |t| (t, col(k, t), slice.counit[k].clone()))),
    );
    if exactlin::rank(&counit.mul(&kernel.as_matrix())?) != dm {
        return Err(ConnectError::InvalidComodule("counit does not identify the kernel with M".into()));
    }
    let mut nabla: AMap = Chain::new();
    for (s, co) in m.coaction.iter().enumerate() {
        let mut x = vec![Scalar::zero(); dh * dm];
        for ((k, t), c) in co.iter() {
            x[col(*k, *t)] = c.clone();
        }
        if !kernel.contains(&x) {
            return Err(ConnectError::InvalidComodule(format!("Δ(m{s}) is not in the kernel")));
        }
        for ((k, t), c) in co.iter() {
            for (a, e) in slice.linear_part(*k) {
                nabla.add_term(HomLabel::new(s, a, *t), c * e);
            }
        }
    }
    let positions = longest_paths(dm, &nabla).ok_or(ConnectError::NotNilpotent)?;
    let conn = Connection::new(slice.algebra(), positions, nabla)?;
    if let Some(l) = conn.check().curvature_witness {
        return Err(ConnectError::NotIntegrable(l));
    }
    if connection_to_comodule(&conn, slice)? != *m {
        return Err(ConnectError::RoundTrip);
    }
    Ok(conn)
}

fn longest_paths(n: usize, nabla: &AMap) -> Option<Vec<i32>> {
    let mut pos = vec![0i32; n];
    for _ in 0..=n {
        let mut changed = false;
        for (l, _) in nabla.iter() {
            if pos[l.tgt] <= pos[l.src] {
                pos[l.tgt] = pos[l.src] + 1;
                changed = true;
            }
        }
        if !changed {
            return Some(pos);
        }
    }
    None
}
