//! Finite-dimensional DGAs given by structure constants.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::complexes::{sign, ComplexError, Complex, GradedSpace, DEGREE_BOUND};
use crate::exactlin::{self, format_scalar, int, LinError, Matrix, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DgaError {
    #[error("unknown basis label {0}")]
    UnknownLabel(String),
    #[error("duplicate basis label {0}")]
    DuplicateLabel(String),
    #[error("basis index {0} out of range")]
    BadIndex(usize),
    #[error("degree {0} outside the supported window")]
    DegreeOutOfRange(i32),
    #[error("algebra is not connected")]
    NotConnected,
    #[error("algebra has elements of negative degree")]
    NegativeDegree,
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("validation failed: {0}")]
    ValidationFailed(String),
    #[error("weights are missing or inconsistent: {0}")]
    NotWeighted(String),
    #[error(transparent)]
    Lin(#[from] LinError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

pub type Terms = Vec<(usize, Scalar)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisElem {
    pub label: String,
    pub degree: i32,
    pub weight: Option<u32>,
}

impl BasisElem {
    pub fn new(label: &str, degree: i32) -> Self {
        BasisElem { label: label.to_string(), degree, weight: None }
    }

    pub fn weighted(label: &str, degree: i32, weight: u32) -> Self {
        BasisElem { label: label.to_string(), degree, weight: Some(weight) }
    }
}

/// A DGA with a chosen basis. Products and the differential are stored as
/// sparse term lists on basis elements; anything unspecified is zero, except
/// that products with the unit default to the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgaPresentation {
    name: String,
    basis: Vec<BasisElem>,
    unit: usize,
    mult: Vec<Vec<Terms>>,
    diff: Vec<Terms>,
}

fn clean(terms: Terms) -> Terms {
    let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
    for (i, c) in terms {
        *acc.entry(i).or_insert_with(Scalar::zero) += c;
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

impl DgaPresentation {
    pub fn new(
        name: &str,
        basis: Vec<BasisElem>,
        unit: usize,
        products: impl IntoIterator<Item = (usize, usize, Terms)>,
        differential: impl IntoIterator<Item = (usize, Terms)>,
    ) -> Result<Self, DgaError> {
        let n = basis.len();
        let mut seen = HashMap::new();
        for (i, b) in basis.iter().enumerate() {
            if seen.insert(b.label.clone(), i).is_some() {
                return Err(DgaError::DuplicateLabel(b.label.clone()));
            }
            if b.degree.abs() > DEGREE_BOUND {
                return Err(DgaError::DegreeOutOfRange(b.degree));
            }
        }
        if unit >= n {
            return Err(DgaError::BadIndex(unit));
        }
        let check = |i: usize| if i < n { Ok(()) } else { Err(DgaError::BadIndex(i)) };
        let mut mult: Vec<Vec<Option<Terms>>> = vec![vec![None; n]; n];
        for (a, b, t) in products {
            check(a)?;
            check(b)?;
            for (i, _) in &t {
                check(*i)?;
            }
            mult[a][b] = Some(clean(t));
        }
        let mult = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| match mult[a][b].take() {
                        Some(t) => t,
                        None if a == unit => vec![(b, Scalar::one())],
                        None if b == unit => vec![(a, Scalar::one())],
                        None => Vec::new(),
                    })
                    .collect()
            })
            .collect();
        let mut diff = vec![Vec::new(); n];
        for (a, t) in differential {
            check(a)?;
            for (i, _) in &t {
                check(*i)?;
            }
            diff[a] = clean(t);
        }
        Ok(DgaPresentation { name: name.to_string(), basis, unit, mult, diff })
    }

    /// Convenience constructor with labels and integer coefficients.
    pub fn from_labels(
        name: &str,
        basis: &[(&str, i32)],
        unit: &str,
        products: &[(&str, &str, &[(&str, i64)])],
        differential: &[(&str, &[(&str, i64)])],
    ) -> Result<Self, DgaError> {
        let elems: Vec<BasisElem> = basis.iter().map(|(l, d)| BasisElem::new(l, *d)).collect();
        let idx = |l: &str| {
            elems.iter().position(|b| b.label == l).ok_or_else(|| DgaError::UnknownLabel(l.to_string()))
        };
        let terms = |ts: &[(&str, i64)]| -> Result<Terms, DgaError> {
            ts.iter().map(|(l, c)| Ok((idx(l)?, int(*c)))).collect()
        };
        let mut prods = Vec::new();
        for (a, b, t) in products {
            prods.push((idx(a)?, idx(b)?, terms(t)?));
        }
        let mut ds = Vec::new();
        for (a, t) in differential {
            ds.push((idx(a)?, terms(t)?));
        }
        let u = idx(unit)?;
        DgaPresentation::new(name, elems, u, prods, ds)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElem] {
        &self.basis
    }

    pub fn label(&self, i: usize) -> &str {
        &self.basis[i].label
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.basis[i].degree
    }

    pub fn weight(&self, i: usize) -> Option<u32> {
        self.basis[i].weight
    }

    pub fn is_weighted(&self) -> bool {
        !self.basis.is_empty() && self.basis.iter().all(|b| b.weight.is_some())
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.label == label)
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn mul_basis(&self, a: usize, b: usize) -> &[(usize, Scalar)] {
        &self.mult[a][b]
    }

    pub fn d_basis(&self, a: usize) -> &[(usize, Scalar)] {
        &self.diff[a]
    }

    pub fn of_degree(&self, p: i32) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degree(i) == p).collect()
    }

    pub fn degrees(&self) -> Vec<i32> {
        let mut ds: Vec<i32> = self.basis.iter().map(|b| b.degree).collect();
        ds.sort();
        ds.dedup();
        ds
    }

    pub fn zero_vector(&self) -> Vec<Scalar> {
        vec![Scalar::zero(); self.dim()]
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Scalar> {
        let mut v = self.zero_vector();
        v[i] = Scalar::one();
        v
    }

    pub fn unit_vector(&self) -> Vec<Scalar> {
        self.basis_vector(self.unit)
    }

    pub fn mul(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let mut out = self.zero_vector();
        for (a, ca) in x.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (b, cb) in y.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                let cab = ca * cb;
                for (t, c) in &self.mult[a][b] {
                    out[*t] += &cab * c;
                }
            }
        }
        out
    }

    pub fn d(&self, x: &[Scalar]) -> Vec<Scalar> {
        let mut out = self.zero_vector();
        for (a, ca) in x.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (t, c) in &self.diff[a] {
                out[*t] += ca * c;
            }
        }
        out
    }

    fn terms_vector(&self, t: &[(usize, Scalar)]) -> Vec<Scalar> {
        let mut v = self.zero_vector();
        for (i, c) in t {
            v[*i] += c;
        }
        v
    }

    /// The differential as a matrix from degree `p` to degree `p+1`, in the
    /// order given by [`Self::of_degree`].
    pub fn d_block(&self, p: i32) -> Matrix {
        let src = self.of_degree(p);
        let tgt = self.of_degree(p + 1);
        let pos: HashMap<usize, usize> = tgt.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let mut m = Matrix::zeros(tgt.len(), src.len());
        for (col, &a) in src.iter().enumerate() {
            for (t, c) in &self.diff[a] {
                if let Some(&row) = pos.get(t) {
                    m.add_at(row, col, c);
                }
            }
        }
        m
    }

    /// Underlying complex, labelled by basis index.
    pub fn as_complex(&self) -> Result<Complex<usize>, DgaError> {
        let space = GradedSpace::from_labels((0..self.dim()).map(|i| (self.degree(i), i)))?;
        Ok(Complex::from_fn(space, |&a| self.diff[a].iter().cloned().collect())?)
    }

    pub fn format_vector(&self, v: &[Scalar]) -> String {
        let parts: Vec<String> = v
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                if c.is_one() {
                    self.label(i).to_string()
                } else {
                    format!("{} {}", format_scalar(c), self.label(i))
                }
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl fmt::Display for DgaPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.basis.iter().map(|b| format!("{}[{}]", b.label, b.degree)).collect();
        write!(f, "{} <{}>", self.name, labels.join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axiom {
    Unit,
    Associativity,
    DegreeAdditivity,
    DifferentialDegree,
    SquareZero,
    Leibniz,
    WeightAdditivity,
    WeightDifferential,
    UnitWeight,
    AugmentationUnit,
    AugmentationMultiplicative,
    AugmentationClosed,
    AugmentationDegree,
    MorphismDegree,
    MorphismUnit,
    MorphismProduct,
    MorphismDifferential,
    MorphismWeight,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn fails(&self, axiom: Axiom) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }

    fn push(&mut self, axiom: Axiom, witness: String) {
        self.violations.push(Violation { axiom, witness });
    }

    pub fn into_result(self) -> Result<(), DgaError> {
        if self.is_ok() {
            Ok(())
        } else {
            let msgs: Vec<String> = self.violations.iter().map(|v| format!("{:?} at {}", v.axiom, v.witness)).collect();
            Err(DgaError::ValidationFailed(msgs.join("; ")))
        }
    }
}

/// Checks every axiom on every basis tuple.
pub fn validate(a: &DgaPresentation) -> ValidationReport {
    let mut r = ValidationReport::default();
    let n = a.dim();
    let u = a.unit();
    let lab = |i: usize| a.label(i).to_string();
    for x in 0..n {
        let ex = a.basis_vector(x);
        let ux = a.terms_vector(a.mul_basis(u, x));
        let xu = a.terms_vector(a.mul_basis(x, u));
        if ux != ex || xu != ex {
            r.push(Axiom::Unit, lab(x));
        }
    }
    if a.degree(u) != 0 {
        r.push(Axiom::DegreeAdditivity, format!("unit {} has degree {}", lab(u), a.degree(u)));
    }
    let weighted = a.is_weighted();
    if weighted && a.weight(u) != Some(0) {
        r.push(Axiom::UnitWeight, lab(u));
    }
    for x in 0..n {
        for y in 0..n {
            for (t, _) in a.mul_basis(x, y) {
                if a.degree(*t) != a.degree(x) + a.degree(y) {
                    r.push(Axiom::DegreeAdditivity, format!("{}*{} -> {}", lab(x), lab(y), lab(*t)));
                }
                if weighted {
                    let w = a.weight(x).unwrap() + a.weight(y).unwrap();
                    if a.weight(*t) != Some(w) {
                        r.push(Axiom::WeightAdditivity, format!("{}*{} -> {}", lab(x), lab(y), lab(*t)));
                    }
                }
            }
        }
        for (t, _) in a.d_basis(x) {
            if a.degree(*t) != a.degree(x) + 1 {
                r.push(Axiom::DifferentialDegree, format!("d{} -> {}", lab(x), lab(*t)));
            }
            if weighted && a.weight(*t) != a.weight(x) {
                r.push(Axiom::WeightDifferential, format!("d{} -> {}", lab(x), lab(*t)));
            }
        }
        let ex = a.basis_vector(x);
        if a.d(&a.d(&ex)).iter().any(|c| !c.is_zero()) {
            r.push(Axiom::SquareZero, lab(x));
        }
    }
    let vecs: Vec<Vec<Scalar>> = (0..n).map(|i| a.basis_vector(i)).collect();
    let prods: Vec<Vec<Vec<Scalar>>> = (0..n).map(|x| (0..n).map(|y| a.terms_vector(a.mul_basis(x, y))).collect()).collect();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let left = a.mul(&prods[x][y], &vecs[z]);
                let right = a.mul(&vecs[x], &prods[y][z]);
                if left != right {
                    r.push(Axiom::Associativity, format!("({},{},{})", lab(x), lab(y), lab(z)));
                }
            }
            let lhs = a.d(&prods[x][y]);
            let mut rhs = a.mul(&a.d(&vecs[x]), &vecs[y]);
            let s = int(sign::tensor_differential(a.degree(x)));
            for (k, c) in a.mul(&vecs[x], &a.d(&vecs[y])).into_iter().enumerate() {
                rhs[k] += c * &s;
            }
            if lhs != rhs {
                r.push(Axiom::Leibniz, format!("({},{})", lab(x), lab(y)));
            }
        }
    }
    r
}

/// A DGA map to the ground field, given on basis elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Augmentation {
    pub name: String,
    pub values: Vec<Scalar>,
}

impl Augmentation {
    pub fn new(name: &str, values: Vec<Scalar>) -> Self {
        Augmentation { name: name.to_string(), values }
    }

    /// The augmentation that is 1 on the unit and 0 on every other basis element.
    pub fn standard(a: &DgaPresentation) -> Self {
        Augmentation::new("eps", a.unit_vector())
    }

    pub fn eval(&self, v: &[Scalar]) -> Scalar {
        self.values.iter().zip(v).fold(Scalar::zero(), |acc, (e, x)| acc + e * x)
    }

    pub fn at(&self, i: usize) -> &Scalar {
        &self.values[i]
    }
}

pub fn validate_augmentation(a: &DgaPresentation, eps: &Augmentation) -> ValidationReport {
    let mut r = ValidationReport::default();
    if eps.values.len() != a.dim() {
        r.push(Axiom::AugmentationDegree, format!("{} values for {} basis elements", eps.values.len(), a.dim()));
        return r;
    }
    if !eps.at(a.unit()).is_one() {
        r.push(Axiom::AugmentationUnit, a.label(a.unit()).to_string());
    }
    for x in 0..a.dim() {
        if a.degree(x) != 0 && !eps.at(x).is_zero() {
            r.push(Axiom::AugmentationDegree, a.label(x).to_string());
        }
        if !eps.eval(&a.d(&a.basis_vector(x))).is_zero() {
            r.push(Axiom::AugmentationClosed, a.label(x).to_string());
        }
        for y in 0..a.dim() {
            let p = a.terms_vector(a.mul_basis(x, y));
            if eps.eval(&p) != eps.at(x) * eps.at(y) {
                r.push(Axiom::AugmentationMultiplicative, format!("({},{})", a.label(x), a.label(y)));
            }
        }
    }
    r
}

/// Cohomology of the underlying complex, degree by degree.
pub fn cohomology_dims(a: &DgaPresentation) -> Result<BTreeMap<i32, usize>, DgaError> {
    Ok(a.as_complex()?.cohomology_dims())
}

pub fn is_connected(a: &DgaPresentation) -> bool {
    let Ok(dims) = cohomology_dims(a) else { return false };
    if dims.iter().any(|(d, n)| *d < 0 && *n > 0) || dims.get(&0) != Some(&1) {
        return false;
    }
    // [1] must be the nonzero class: 1 is never a boundary when d(A^{-1}) misses it.
    let deg0 = a.of_degree(0);
    let pos = deg0.iter().position(|&i| i == a.unit()).expect("unit has degree 0");
    let d_in = a.d_block(-1);
    let mut one = vec![Scalar::zero(); deg0.len()];
    one[pos] = Scalar::one();
    exactlin::solve(&d_in, &one).is_none()
}

/// A DGA map given by the images of basis elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgaMorphism {
    pub name: String,
    pub images: Vec<Vec<Scalar>>,
}

impl DgaMorphism {
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        let n = self.images.first().map_or(0, |x| x.len());
        let mut out = vec![Scalar::zero(); n];
        for (i, c) in v.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (k, x) in self.images[i].iter().enumerate() {
                out[k] += c * x;
            }
        }
        out
    }

    pub fn identity(a: &DgaPresentation) -> Self {
        DgaMorphism { name: "id".into(), images: (0..a.dim()).map(|i| a.basis_vector(i)).collect() }
    }

    /// Matrix of the map restricted to degree `p`.
    pub fn block(&self, src: &DgaPresentation, tgt: &DgaPresentation, p: i32) -> Matrix {
        let s = src.of_degree(p);
        let t = tgt.of_degree(p);
        let mut m = Matrix::zeros(t.len(), s.len());
        for (col, &i) in s.iter().enumerate() {
            for (row, &j) in t.iter().enumerate() {
                m.set(row, col, self.images[i][j].clone());
            }
        }
        m
    }
}

pub fn validate_morphism(src: &DgaPresentation, tgt: &DgaPresentation, f: &DgaMorphism) -> ValidationReport {
    let mut r = ValidationReport::default();
    if f.images.len() != src.dim() || f.images.iter().any(|v| v.len() != tgt.dim()) {
        r.push(Axiom::MorphismDegree, "image table has the wrong shape".into());
        return r;
    }
    let weighted = src.is_weighted() && tgt.is_weighted();
    for x in 0..src.dim() {
        for (k, c) in f.images[x].iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if tgt.degree(k) != src.degree(x) {
                r.push(Axiom::MorphismDegree, format!("{} -> {}", src.label(x), tgt.label(k)));
            }
            if weighted && tgt.weight(k) != src.weight(x) {
                r.push(Axiom::MorphismWeight, format!("{} -> {}", src.label(x), tgt.label(k)));
            }
        }
        let ex = src.basis_vector(x);
        if f.apply(&src.d(&ex)) != tgt.d(&f.images[x]) {
            r.push(Axiom::MorphismDifferential, src.label(x).to_string());
        }
        for y in 0..src.dim() {
            let lhs = f.apply(&src.terms_vector(src.mul_basis(x, y)));
            let rhs = tgt.mul(&f.images[x], &f.images[y]);
            if lhs != rhs {
                r.push(Axiom::MorphismProduct, format!("({},{})", src.label(x), src.label(y)));
            }
        }
    }
    if f.images[src.unit()] != tgt.unit_vector() {
        r.push(Axiom::MorphismUnit, src.label(src.unit()).to_string());
    }
    r
}

/// `a° b° = (-1)^{|a||b|} (ba)°`.
pub fn opposite(a: &DgaPresentation) -> DgaPresentation {
    let n = a.dim();
    let mut prods = Vec::new();
    for x in 0..n {
        for y in 0..n {
            let s = int(sign::opposite(a.degree(x), a.degree(y)));
            let t: Terms = a.mul_basis(y, x).iter().map(|(k, c)| (*k, c * &s)).collect();
            prods.push((x, y, t));
        }
    }
    let diff = (0..n).map(|x| (x, a.d_basis(x).to_vec()));
    DgaPresentation::new(&format!("{}^op", a.name()), a.basis.clone(), a.unit(), prods, diff)
        .expect("same basis as a valid presentation")
}

/// Cohomology of a DGA as a DGA with zero differential.
#[derive(Clone, Debug)]
pub struct CohomologyAlgebra {
    pub algebra: DgaPresentation,
    /// Representative cocycle in the original algebra for each basis element.
    pub representatives: Vec<Vec<Scalar>>,
}

impl CohomologyAlgebra {
    /// Induced augmentation on cohomology.
    pub fn augmentation(&self, eps: &Augmentation) -> Augmentation {
        let values = self
            .representatives
            .iter()
            .enumerate()
            .map(|(k, r)| if self.algebra.degree(k) == 0 { eps.eval(r) } else { Scalar::zero() })
            .collect();
        Augmentation::new(&eps.name, values)
    }
}

fn embed(a: &DgaPresentation, p: i32, local: &[Scalar]) -> Vec<Scalar> {
    let mut v = a.zero_vector();
    for (k, &i) in a.of_degree(p).iter().enumerate() {
        v[i] = local[k].clone();
    }
    v
}

fn restrict(a: &DgaPresentation, p: i32, v: &[Scalar]) -> Vec<Scalar> {
    a.of_degree(p).iter().map(|&i| v[i].clone()).collect()
}

pub fn cohomology_algebra(a: &DgaPresentation) -> Result<CohomologyAlgebra, DgaError> {
    let mut basis = Vec::new();
    let mut reps = Vec::new();
    let mut slices = BTreeMap::new();
    let mut unit = None;
    for p in a.degrees() {
        let d_in = a.d_block(p - 1);
        let d_out = a.d_block(p);
        let preferred = if p == 0 { vec![restrict(a, 0, &a.unit_vector())] } else { Vec::new() };
        let h = exactlin::cohomology_at_preferring(&d_in, &d_out, &preferred)?;
        for (k, r) in h.representatives.iter().enumerate() {
            let v = embed(a, p, r);
            if p == 0 && v == a.unit_vector() {
                unit = Some(basis.len());
            }
            let label = match v.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect::<Vec<_>>().as_slice() {
                [(i, c)] if c.is_one() => format!("[{}]", a.label(*i)),
                _ => format!("h{p}_{k}"),
            };
            basis.push(BasisElem { label, degree: p, weight: None });
            reps.push(v);
        }
        slices.insert(p, h);
    }
    let unit = unit.ok_or(DgaError::NotConnected)?;
    let offset: BTreeMap<i32, usize> = {
        let mut m = BTreeMap::new();
        for (k, b) in basis.iter().enumerate() {
            m.entry(b.degree).or_insert(k);
        }
        m
    };
    let mut prods = Vec::new();
    for x in 0..reps.len() {
        for y in 0..reps.len() {
            let p = basis[x].degree + basis[y].degree;
            let prod = a.mul(&reps[x], &reps[y]);
            let Some(h) = slices.get(&p) else { continue };
            let coords = h
                .class_of(&restrict(a, p, &prod))
                .ok_or_else(|| DgaError::ValidationFailed("product of cocycles is not a cocycle".into()))?;
            let t: Terms = coords.into_iter().enumerate().map(|(k, c)| (offset[&p] + k, c)).collect();
            prods.push((x, y, t));
        }
    }
    let algebra = DgaPresentation::new(&format!("H({})", a.name()), basis, unit, prods, Vec::new())?;
    Ok(CohomologyAlgebra { algebra, representatives: reps })
}

/// Reduced sub-DGA together with its inclusion.
#[derive(Clone, Debug)]
pub struct ReducedModel {
    pub algebra: DgaPresentation,
    pub inclusion: DgaMorphism,
    /// Chosen complement of the coboundaries inside the degree-one cocycles.
    pub splitting: Vec<Vec<Scalar>>,
    /// Chosen complement of the degree-one cocycles inside degree one.
    pub complement: Vec<Vec<Scalar>>,
}

fn weight_slices(a: &DgaPresentation, p: i32) -> BTreeMap<Option<u32>, Vec<usize>> {
    let mut m: BTreeMap<Option<u32>, Vec<usize>> = BTreeMap::new();
    for i in a.of_degree(p) {
        m.entry(if a.is_weighted() { a.weight(i) } else { None }).or_default().push(i);
    }
    m
}

/// Sub-DGA with `Ā^0 = k`, `Ā^1 = L ⊕ C` and `Ā^i = A^i` above, where
/// `Z^1 = B^1 ⊕ L` and `A^1 = Z^1 ⊕ C`. Keeping `C` makes the inclusion a
/// quasi-isomorphism in degree two as well. Splittings are chosen per weight.
pub fn reduced_model(a: &DgaPresentation) -> Result<ReducedModel, DgaError> {
    if a.degrees().iter().any(|&d| d < 0) {
        return Err(DgaError::NegativeDegree);
    }
    if !is_connected(a) {
        return Err(DgaError::NotConnected);
    }
    let mut splitting = Vec::new();
    let mut complement = Vec::new();
    let slices0 = weight_slices(a, 0);
    for (w, idx1) in weight_slices(a, 1) {
        let idx0 = slices0.get(&w).cloned().unwrap_or_default();
        let idx2: Vec<usize> = a.of_degree(2).into_iter().filter(|&i| !a.is_weighted() || a.weight(i) == w).collect();
        let sub = |src: &[usize], tgt: &[usize]| {
            let mut m = Matrix::zeros(tgt.len(), src.len());
            for (c, &s) in src.iter().enumerate() {
                for (t, x) in a.d_basis(s) {
                    if let Some(r) = tgt.iter().position(|q| q == t) {
                        m.add_at(r, c, x);
                    }
                }
            }
            m
        };
        let d0 = sub(&idx0, &idx1);
        let d1 = sub(&idx1, &idx2);
        let h = exactlin::cohomology_at(&d0, &d1)?;
        let lift = |local: &Vec<Scalar>| {
            let mut v = a.zero_vector();
            for (k, &i) in idx1.iter().enumerate() {
                v[i] = local[k].clone();
            }
            v
        };
        splitting.extend(h.representatives.iter().map(lift));
        let mut cols = h.cycles.basis.clone();
        let nz = cols.len();
        for k in 0..idx1.len() {
            let mut e = vec![Scalar::zero(); idx1.len()];
            e[k] = Scalar::one();
            cols.push(e);
        }
        let joint = Matrix::from_columns(idx1.len(), &cols)?;
        for j in exactlin::pivot_columns(&joint).into_iter().filter(|&j| j >= nz) {
            complement.push(lift(&cols[j]));
        }
    }
    let mut images: Vec<Vec<Scalar>> = vec![a.unit_vector()];
    let mut basis = vec![a.basis[a.unit()].clone()];
    let name_of = |v: &Vec<Scalar>, fallback: String| -> String {
        match v.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect::<Vec<_>>().as_slice() {
            [(i, c)] if c.is_one() => a.label(*i).to_string(),
            _ => fallback,
        }
    };
    let weight_of = |v: &Vec<Scalar>| -> Option<u32> {
        v.iter().enumerate().find(|(_, c)| !c.is_zero()).and_then(|(i, _)| a.weight(i))
    };
    for (k, v) in splitting.iter().enumerate() {
        basis.push(BasisElem { label: name_of(v, format!("l{k}")), degree: 1, weight: weight_of(v) });
        images.push(v.clone());
    }
    for (k, v) in complement.iter().enumerate() {
        basis.push(BasisElem { label: name_of(v, format!("c{k}")), degree: 1, weight: weight_of(v) });
        images.push(v.clone());
    }
    for i in (0..a.dim()).filter(|&i| a.degree(i) > 1) {
        basis.push(a.basis[i].clone());
        images.push(a.basis_vector(i));
    }
    // Coordinates in Ā: solve against the image vectors degree by degree.
    let img_matrix = Matrix::from_columns(a.dim(), &images)?;
    let coords = |v: &[Scalar]| -> Result<Vec<Scalar>, DgaError> {
        exactlin::solve(&img_matrix, v).ok_or_else(|| DgaError::ValidationFailed("reduced model is not closed".into()))
    };
    let n = images.len();
    let mut prods = Vec::new();
    let mut diff = Vec::new();
    for x in 0..n {
        for y in 0..n {
            let c = coords(&a.mul(&images[x], &images[y]))?;
            prods.push((x, y, c.into_iter().enumerate().collect()));
        }
        let c = coords(&a.d(&images[x]))?;
        diff.push((x, c.into_iter().enumerate().collect()));
    }
    let algebra = DgaPresentation::new(&format!("{}-reduced", a.name()), basis, 0, prods, diff)?;
    let inclusion = DgaMorphism { name: "inclusion".into(), images };
    validate(&algebra).into_result()?;
    validate_morphism(&algebra, a, &inclusion).into_result()?;
    Ok(ReducedModel { algebra, inclusion, splitting, complement })
}

/// Checks that a DGA map induces isomorphisms on cohomology in every degree.
pub fn is_quasi_isomorphism(src: &DgaPresentation, tgt: &DgaPresentation, f: &DgaMorphism) -> Result<bool, DgaError> {
    let mut degs = src.degrees();
    degs.extend(tgt.degrees());
    degs.sort();
    degs.dedup();
    for p in degs {
        let hs = exactlin::cohomology_at(&src.d_block(p - 1), &src.d_block(p))?;
        let ht = exactlin::cohomology_at(&tgt.d_block(p - 1), &tgt.d_block(p))?;
        if hs.dim() != ht.dim() || exactlin::induced_rank(&f.block(src, tgt, p), &hs, &ht)? != ht.dim() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Unit,
    One(usize),
    Two(usize),
    Twelve(usize),
}

/// `Ã^p = A_1^p ⊕ A_2^p ⊕ A_12^{p-1}`. The basis replaces the unit of `A_2` by
/// the unit `(1, 1, 0)` of `Ã`; the unit of `A_1` stays as the idempotent `(1, 0, 0)`.
#[derive(Clone, Debug)]
pub struct FiberProductDga {
    pub a1: DgaPresentation,
    pub a2: DgaPresentation,
    pub a12: DgaPresentation,
    pub u1: DgaMorphism,
    pub u2: DgaMorphism,
    pub total: DgaPresentation,
    pub slots: Vec<Slot>,
}

struct RawFiber<'a> {
    a1: &'a DgaPresentation,
    a2: &'a DgaPresentation,
    a12: &'a DgaPresentation,
    u1: &'a DgaMorphism,
    u2: &'a DgaMorphism,
}

type Triple = (Vec<Scalar>, Vec<Scalar>, Vec<Scalar>);

impl RawFiber<'_> {
    fn mul(&self, x: &Triple, y: &Triple, deg_y: i32) -> Triple {
        let p1 = self.a1.mul(&x.0, &y.0);
        let p2 = self.a2.mul(&x.1, &y.1);
        let mut p12 = self.a12.mul(&self.u1.apply(&x.0), &y.2);
        let s = int(sign::sgn(deg_y as i64));
        for (k, c) in self.a12.mul(&x.2, &self.u2.apply(&y.1)).into_iter().enumerate() {
            p12[k] += c * &s;
        }
        (p1, p2, p12)
    }

    /// `d(a_1, a_2, a_12) = (d a_1, d a_2, (-1)^p (u_1 a_1 - u_2 a_2) + d a_12)` on degree `p`.
    fn d(&self, x: &Triple, deg: i32) -> Triple {
        let s = int(sign::sgn(deg as i64));
        let mut t = self.u1.apply(&x.0);
        for (k, c) in self.u2.apply(&x.1).into_iter().enumerate() {
            t[k] -= c;
        }
        for v in t.iter_mut() {
            *v *= &s;
        }
        for (k, c) in self.a12.d(&x.2).into_iter().enumerate() {
            t[k] += c;
        }
        (self.a1.d(&x.0), self.a2.d(&x.1), t)
    }
}

impl FiberProductDga {
    fn raw_of(&self, i: usize) -> Triple {
        let mut t = (self.a1.zero_vector(), self.a2.zero_vector(), self.a12.zero_vector());
        match self.slots[i] {
            Slot::Unit => {
                t.0[self.a1.unit()] = Scalar::one();
                t.1[self.a2.unit()] = Scalar::one();
            }
            Slot::One(k) => t.0[k] = Scalar::one(),
            Slot::Two(k) => t.1[k] = Scalar::one(),
            Slot::Twelve(k) => t.2[k] = Scalar::one(),
        }
        t
    }

    fn from_raw(slots: &[Slot], a1_unit: usize, a2_unit: usize, t: &Triple) -> Vec<Scalar> {
        let c2 = t.1[a2_unit].clone();
        slots
            .iter()
            .map(|s| match s {
                Slot::Unit => c2.clone(),
                Slot::One(k) if *k == a1_unit => &t.0[*k] - &c2,
                Slot::One(k) => t.0[*k].clone(),
                Slot::Two(k) => t.1[*k].clone(),
                Slot::Twelve(k) => t.2[*k].clone(),
            })
            .collect()
    }

    /// Components `(a_1, a_2, a_12)` of an element of `Ã`.
    pub fn components(&self, v: &[Scalar]) -> Triple {
        let mut out = (self.a1.zero_vector(), self.a2.zero_vector(), self.a12.zero_vector());
        for (i, c) in v.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let r = self.raw_of(i);
            for (k, x) in r.0.iter().enumerate() {
                out.0[k] += c * x;
            }
            for (k, x) in r.1.iter().enumerate() {
                out.1[k] += c * x;
            }
            for (k, x) in r.2.iter().enumerate() {
                out.2[k] += c * x;
            }
        }
        out
    }

    /// `ε ∘ pr_1` when `first`, else `ε ∘ pr_2`.
    pub fn pulled_back(&self, eps: &Augmentation, first: bool) -> Augmentation {
        let values = (0..self.total.dim())
            .map(|i| {
                let t = self.raw_of(i);
                if first {
                    eps.eval(&t.0)
                } else {
                    eps.eval(&t.1)
                }
            })
            .collect();
        Augmentation::new(&eps.name, values)
    }

    /// Total basis index of `A_12` element `k`.
    pub fn twelve_index(&self, k: usize) -> usize {
        self.slots.iter().position(|s| *s == Slot::Twelve(k)).expect("every A_12 element has a slot")
    }

    pub fn one_index(&self, k: usize) -> usize {
        self.slots.iter().position(|s| *s == Slot::One(k)).expect("every A_1 element has a slot")
    }
}

pub fn fiber_product(
    a1: &DgaPresentation,
    a2: &DgaPresentation,
    a12: &DgaPresentation,
    u1: &DgaMorphism,
    u2: &DgaMorphism,
) -> Result<FiberProductDga, DgaError> {
    for (name, (src, f)) in [("u1", (a1, u1)), ("u2", (a2, u2))] {
        let rep = validate_morphism(src, a12, f);
        if !rep.is_ok() {
            return Err(DgaError::InvalidMorphism(format!("{name}: {:?}", rep.violations)));
        }
    }
    let weighted = a1.is_weighted() && a2.is_weighted() && a12.is_weighted();
    let w = |x: Option<u32>| if weighted { x } else { None };
    let mut slots = vec![Slot::Unit];
    let mut basis = vec![BasisElem { label: "1".into(), degree: 0, weight: w(Some(0)) }];
    for k in 0..a1.dim() {
        slots.push(Slot::One(k));
        basis.push(BasisElem { label: format!("1:{}", a1.label(k)), degree: a1.degree(k), weight: w(a1.weight(k)) });
    }
    for k in (0..a2.dim()).filter(|&k| k != a2.unit()) {
        slots.push(Slot::Two(k));
        basis.push(BasisElem { label: format!("2:{}", a2.label(k)), degree: a2.degree(k), weight: w(a2.weight(k)) });
    }
    for k in 0..a12.dim() {
        slots.push(Slot::Twelve(k));
        basis.push(BasisElem {
            label: format!("12:{}", a12.label(k)),
            degree: a12.degree(k) + 1,
            weight: w(a12.weight(k)),
        });
    }
    let raw = RawFiber { a1, a2, a12, u1, u2 };
    let mut fp = FiberProductDga {
        a1: a1.clone(),
        a2: a2.clone(),
        a12: a12.clone(),
        u1: u1.clone(),
        u2: u2.clone(),
        total: DgaPresentation::new("tmp", basis.clone(), 0, Vec::new(), Vec::new())?,
        slots: slots.clone(),
    };
    let n = slots.len();
    let raws: Vec<Triple> = (0..n).map(|i| fp.raw_of(i)).collect();
    let back = |t: &Triple| FiberProductDga::from_raw(&slots, a1.unit(), a2.unit(), t);
    let mut prods = Vec::new();
    let mut diff = Vec::new();
    for x in 0..n {
        for y in 0..n {
            let p = back(&raw.mul(&raws[x], &raws[y], basis[y].degree));
            prods.push((x, y, p.into_iter().enumerate().collect()));
        }
        let d = back(&raw.d(&raws[x], basis[x].degree));
        diff.push((x, d.into_iter().enumerate().collect()));
    }
    let name = format!("{}x{}", a1.name(), a2.name());
    fp.total = DgaPresentation::new(&name, basis, 0, prods, diff)?;
    validate(&fp.total).into_result()?;
    Ok(fp)
}

/// Standard small algebras used throughout the tests and the example corpus.
pub mod examples {
    use super::*;

    pub fn ground() -> DgaPresentation {
        DgaPresentation::from_labels("k", &[("1", 0)], "1", &[], &[]).expect("valid")
    }

    /// `<1, e>` with `e` in degree one, `e² = 0`, `d = 0`.
    pub fn circle() -> DgaPresentation {
        DgaPresentation::from_labels("circle", &[("1", 0), ("e", 1)], "1", &[], &[]).expect("valid")
    }

    /// `<1, e_1, .., e_n>`, all products of the `e_i` zero.
    pub fn wedge(n: usize) -> DgaPresentation {
        let labels: Vec<String> = (1..=n).map(|i| format!("e{i}")).collect();
        let mut basis = vec![("1", 0)];
        basis.extend(labels.iter().map(|l| (l.as_str(), 1)));
        DgaPresentation::from_labels(&format!("wedge{n}"), &basis, "1", &[], &[]).expect("valid")
    }

    /// `<1, u, v>` with `du = v`.
    pub fn contractible() -> DgaPresentation {
        DgaPresentation::from_labels("contractible", &[("1", 0), ("u", 0), ("v", 1)], "1", &[], &[("u", &[("v", 1)])])
            .expect("valid")
    }

    /// `<1, x>` with `x` in degree zero and `x² = 0`.
    pub fn dual_numbers() -> DgaPresentation {
        DgaPresentation::from_labels("dual", &[("1", 0), ("x", 0)], "1", &[], &[]).expect("valid")
    }

    /// The circle with the illegal differential `de = 1`.
    pub fn broken_circle() -> DgaPresentation {
        DgaPresentation::from_labels("broken", &[("1", 0), ("e", 1)], "1", &[], &[("e", &[("1", 1)])]).expect("indices valid")
    }

    /// `<1, y>` with `|y| = -1`, `dy = 1`: acyclic, with a degree `-1` element.
    pub fn odd_contractible() -> DgaPresentation {
        DgaPresentation::from_labels("odd-contractible", &[("1", 0), ("y", -1)], "1", &[], &[("y", &[("1", 1)])])
            .expect("valid")
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;
    use crate::exactlin::frac;
    use proptest::prelude::*;

    #[test]
    fn standard_examples_validate() {
        for a in [ground(), circle(), wedge(2), contractible(), dual_numbers(), odd_contractible()] {
            assert!(validate(&a).is_ok(), "{}: {:?}", a.name(), validate(&a).violations);
        }
    }

    #[test]
    fn broken_differential_is_flagged() {
        let b = broken_circle();
        let r = validate(&b);
        assert!(r.fails(Axiom::DifferentialDegree));
        let eps = Augmentation::standard(&b);
        assert!(validate_augmentation(&b, &eps).fails(Axiom::AugmentationClosed));
    }

    #[test]
    fn augmentations() {
        let c = circle();
        assert!(validate_augmentation(&c, &Augmentation::standard(&c)).is_ok());
        let d = dual_numbers();
        let bad = Augmentation::new("e", vec![int(1), int(1)]);
        assert!(validate_augmentation(&d, &bad).fails(Axiom::AugmentationMultiplicative));
        assert!(validate_augmentation(&d, &Augmentation::standard(&d)).is_ok());
    }

    #[test]
    fn connectedness() {
        assert!(is_connected(&ground()));
        assert!(is_connected(&circle()));
        assert!(is_connected(&contractible()));
        assert!(!is_connected(&dual_numbers()));
    }

    #[test]
    fn reduced_models() {
        let k = reduced_model(&ground()).unwrap();
        assert_eq!(k.algebra.dim(), 1);
        let c = reduced_model(&circle()).unwrap();
        assert_eq!(c.algebra.dim(), 2);
        assert_eq!(c.algebra.label(1), "e");
        let t = reduced_model(&contractible()).unwrap();
        assert_eq!(t.algebra.dim(), 1);
        assert!(is_quasi_isomorphism(&t.algebra, &contractible(), &t.inclusion).unwrap());
        assert!(matches!(reduced_model(&dual_numbers()), Err(DgaError::NotConnected)));
        assert!(matches!(reduced_model(&odd_contractible()), Err(DgaError::NegativeDegree)));
    }

    #[test]
    fn reduced_model_keeps_complement_of_cocycles() {
        // d a = w with a, b in degree one: Z^1 = <b>, and a is needed for H^2.
        let a = DgaPresentation::from_labels(
            "t",
            &[("1", 0), ("a", 1), ("b", 1), ("w", 2)],
            "1",
            &[],
            &[("a", &[("w", 1)])],
        )
        .unwrap();
        assert!(validate(&a).is_ok());
        let r = reduced_model(&a).unwrap();
        assert!(is_quasi_isomorphism(&r.algebra, &a, &r.inclusion).unwrap());
        assert_eq!(r.complement.len(), 1);
    }

    #[test]
    fn opposite_examples() {
        let c = circle();
        assert_eq!(opposite(&c).mult, c.mult);
        let o = odd_contractible();
        assert!(validate(&opposite(&o)).is_ok());
        assert_eq!(opposite(&opposite(&o)).mult, o.mult);
    }

    #[test]
    fn trivial_fiber_product() {
        let k = ground();
        let id = DgaMorphism::identity(&k);
        let fp = fiber_product(&k, &k, &k, &id, &id).unwrap();
        assert_eq!(fp.total.of_degree(0).len(), 2);
        assert_eq!(fp.total.of_degree(1).len(), 1);
        let dims = cohomology_dims(&fp.total).unwrap();
        assert_eq!(dims.get(&0), Some(&1));
        assert_eq!(dims.get(&1), None);
        // d of the A_1 idempotent is (0, 0, u1(1)).
        let x = fp.one_index(0);
        let dx = fp.components(&fp.total.d(&fp.total.basis_vector(x)));
        assert_eq!(dx.2, vec![int(1)]);
        for first in [true, false] {
            let e = fp.pulled_back(&Augmentation::standard(&k), first);
            assert!(validate_augmentation(&fp.total, &e).is_ok());
        }
    }

    #[test]
    fn circle_fiber_product() {
        let c = circle();
        let id = DgaMorphism::identity(&c);
        let fp = fiber_product(&c, &c, &c, &id, &id).unwrap();
        assert!(validate(&fp.total).is_ok());
        // Homotopy pullback of two identities is quasi-isomorphic to the circle.
        let dims = cohomology_dims(&fp.total).unwrap();
        assert_eq!(dims.get(&0), Some(&1));
        assert_eq!(dims.get(&1), Some(&1));
    }

    #[test]
    fn cohomology_algebra_of_contractible() {
        let h = cohomology_algebra(&contractible()).unwrap();
        assert_eq!(h.algebra.dim(), 1);
        let h = cohomology_algebra(&circle()).unwrap();
        assert_eq!(h.algebra.dim(), 2);
        assert!(validate(&h.algebra).is_ok());
    }

    // Random algebras: upper-triangular matrix algebras over degree-zero
    // idempotents are too rigid, so sample square-zero extensions instead:
    // k ⊕ V with V·V = 0 and V in degrees 0..2.
    fn square_zero(degs: &[i32], dvals: &[i64]) -> DgaPresentation {
        let labels: Vec<String> = (0..degs.len()).map(|i| format!("v{i}")).collect();
        let mut basis = vec![BasisElem::new("1", 0)];
        basis.extend(labels.iter().zip(degs).map(|(l, d)| BasisElem::new(l, *d)));
        let n = basis.len();
        let mut it = dvals.iter().cycle();
        // d on V: only between consecutive-degree vectors, strictly upper in index, d² = 0 by using
        // at most one nonzero differential per target chain.
        let mut diff = Vec::new();
        let mut used = vec![false; n];
        for i in 1..n {
            if used[i] {
                continue;
            }
            if let Some(j) = (i + 1..n).find(|&j| !used[j] && basis[j].degree == basis[i].degree + 1) {
                let c = *it.next().unwrap();
                if c != 0 {
                    diff.push((i, vec![(j, int(c))]));
                    used[i] = true;
                    used[j] = true;
                }
            }
        }
        DgaPresentation::new("sq", basis, 0, Vec::new(), diff).unwrap()
    }

    proptest! {
        #[test]
        fn opposite_is_involutive_and_valid(degs in proptest::collection::vec(0i32..3, 0..4), dv in proptest::collection::vec(-2i64..3, 1..4)) {
            let a = square_zero(&degs, &dv);
            prop_assert!(validate(&a).is_ok());
            let o = opposite(&a);
            prop_assert!(validate(&o).is_ok());
            prop_assert_eq!(opposite(&o), a.clone().with_name(&format!("{}^op^op", a.name())));
        }

        #[test]
        fn reduced_model_is_quasi_isomorphic(degs in proptest::collection::vec(1i32..4, 0..5), dv in proptest::collection::vec(-2i64..3, 1..4)) {
            let a = square_zero(&degs, &dv);
            let r = reduced_model(&a).unwrap();
            prop_assert!(is_quasi_isomorphism(&r.algebra, &a, &r.inclusion).unwrap());
            prop_assert_eq!(r.algebra.of_degree(0).len(), 1);
        }
    }

    #[test]
    fn rational_products_survive() {
        let a = DgaPresentation::new(
            "q",
            vec![BasisElem::new("1", 0), BasisElem::new("x", 2)],
            0,
            vec![(1, 1, vec![])],
            vec![],
        )
        .unwrap();
        let mut v = a.zero_vector();
        v[1] = frac(1, 2);
        assert_eq!(a.format_vector(&v), "1/2 x");
    }
}
