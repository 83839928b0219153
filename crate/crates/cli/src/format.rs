//! TOML documents for DGAs and twisted complexes.
//!
//! Coefficients are rational strings (`"3"`, `"-1/2"`); anything not listed
//! is zero, except that products with the unit default to the identity.
//! The schema is described in `docs/format.md`.

use std::collections::BTreeMap;

use dgbar_core::dga::{Augmentation, BasisElem, DgaMorphism, DgaPresentation};
use dgbar_core::exactlin::{format_scalar, parse_scalar, Scalar};
use dgbar_core::twisted::{AMap, FiberComplex, HomLabel, TwistedComplex};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("cannot parse document: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("cannot serialize document: {0}")]
    Serialize(#[from] toml::ser::Error),
    #[error("unsupported field {0:?}; only Q is supported")]
    Field(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("bad coefficient {0:?}")]
    Coefficient(String),
    #[error("unknown augmentation {0:?}")]
    UnknownAugmentation(String),
    #[error("unknown morphism {0:?}")]
    UnknownMorphism(String),
    #[error("morphism {name:?} targets {found:?}, expected {expected:?}")]
    MorphismTarget { name: String, found: String, expected: String },
    #[error("invalid twisted complex: {0}")]
    Twisted(String),
    #[error("invalid algebra: {0}")]
    Dga(#[from] dgbar_core::dga::DgaError),
}

/// Sparse linear combination: label to rational string.
pub type TermMap = BTreeMap<String, String>;

fn q() -> String {
    "Q".into()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisEntry {
    pub label: String,
    pub degree: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductEntry {
    pub left: String,
    pub right: String,
    pub terms: TermMap,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferentialEntry {
    pub source: String,
    pub terms: TermMap,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentationEntry {
    pub name: String,
    pub values: TermMap,
}

/// A DGA map out of the algebra of this file, given by the images of basis elements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismEntry {
    pub name: String,
    pub target: String,
    pub images: BTreeMap<String, TermMap>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DgaFile {
    pub name: String,
    #[serde(default = "q")]
    pub field: String,
    pub unit: String,
    pub basis: Vec<BasisEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub products: Vec<ProductEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub differential: Vec<DifferentialEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub augmentations: Vec<AugmentationEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub morphisms: Vec<MorphismEntry>,
    /// Free-form provenance, e.g. generator parameters.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub meta: BTreeMap<String, String>,
}

fn coefficient(s: &str) -> Result<Scalar, FormatError> {
    parse_scalar(s).map_err(|_| FormatError::Coefficient(s.to_string()))
}

fn terms_to_map(a: &DgaPresentation, ts: &[(usize, Scalar)]) -> TermMap {
    ts.iter().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (a.label(*i).to_string(), format_scalar(c))).collect()
}

fn vector_to_map(a: &DgaPresentation, v: &[Scalar]) -> TermMap {
    v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (a.label(i).to_string(), format_scalar(c))).collect()
}

impl DgaFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> Result<String, FormatError> {
        Ok(toml::to_string(self)?)
    }

    fn index(&self, label: &str) -> Result<usize, FormatError> {
        self.basis.iter().position(|b| b.label == label).ok_or_else(|| FormatError::UnknownLabel(label.to_string()))
    }

    fn terms(&self, m: &TermMap) -> Result<Vec<(usize, Scalar)>, FormatError> {
        m.iter().map(|(l, c)| Ok((self.index(l)?, coefficient(c)?))).collect()
    }

    fn vector(&self, m: &TermMap) -> Result<Vec<Scalar>, FormatError> {
        let mut v = vec![Scalar::zero(); self.basis.len()];
        for (i, c) in self.terms(m)? {
            v[i] += c;
        }
        Ok(v)
    }

    /// The presentation; it is not validated here.
    pub fn presentation(&self) -> Result<DgaPresentation, FormatError> {
        if self.field != "Q" {
            return Err(FormatError::Field(self.field.clone()));
        }
        let basis = self
            .basis
            .iter()
            .map(|b| BasisElem { label: b.label.clone(), degree: b.degree, weight: b.weight })
            .collect();
        let mut products = Vec::new();
        for p in &self.products {
            products.push((self.index(&p.left)?, self.index(&p.right)?, self.terms(&p.terms)?));
        }
        let mut diff = Vec::new();
        for d in &self.differential {
            diff.push((self.index(&d.source)?, self.terms(&d.terms)?));
        }
        Ok(DgaPresentation::new(&self.name, basis, self.index(&self.unit)?, products, diff)?)
    }

    pub fn augmentation(&self, name: &str) -> Result<Augmentation, FormatError> {
        let e = self.augmentations.iter().find(|e| e.name == name).ok_or_else(|| FormatError::UnknownAugmentation(name.to_string()))?;
        Ok(Augmentation::new(name, self.vector(&e.values)?))
    }

    /// The morphism `name`, with images read in the basis of `target`.
    pub fn morphism(&self, name: &str, target: &DgaFile) -> Result<DgaMorphism, FormatError> {
        let m = self.morphisms.iter().find(|m| m.name == name).ok_or_else(|| FormatError::UnknownMorphism(name.to_string()))?;
        if m.target != target.name {
            return Err(FormatError::MorphismTarget { name: name.into(), found: m.target.clone(), expected: target.name.clone() });
        }
        let mut images = vec![vec![Scalar::zero(); target.basis.len()]; self.basis.len()];
        for (l, img) in &m.images {
            images[self.index(l)?] = target.vector(img)?;
        }
        Ok(DgaMorphism { name: name.into(), images })
    }

    /// Serializable form of a presentation. Products are listed for every pair
    /// whose value differs from the unit default.
    pub fn from_presentation(a: &DgaPresentation) -> Self {
        let n = a.dim();
        let u = a.unit();
        let basis = a.basis().iter().map(|b| BasisEntry { label: b.label.clone(), degree: b.degree, weight: b.weight }).collect();
        let mut products = Vec::new();
        for x in 0..n {
            for y in 0..n {
                let t = a.mul_basis(x, y);
                let default: Vec<(usize, Scalar)> = if x == u {
                    vec![(y, Scalar::from_integer(1.into()))]
                } else if y == u {
                    vec![(x, Scalar::from_integer(1.into()))]
                } else {
                    Vec::new()
                };
                if t != default.as_slice() {
                    products.push(ProductEntry { left: a.label(x).into(), right: a.label(y).into(), terms: terms_to_map(a, t) });
                }
            }
        }
        let differential = (0..n)
            .filter(|&x| !a.d_basis(x).is_empty())
            .map(|x| DifferentialEntry { source: a.label(x).into(), terms: terms_to_map(a, a.d_basis(x)) })
            .collect();
        DgaFile {
            name: a.name().to_string(),
            field: q(),
            unit: a.label(u).into(),
            basis,
            products,
            differential,
            augmentations: Vec::new(),
            morphisms: Vec::new(),
            meta: BTreeMap::new(),
        }
    }

    pub fn with_augmentation(mut self, a: &DgaPresentation, e: &Augmentation) -> Self {
        self.augmentations.push(AugmentationEntry { name: e.name.clone(), values: vector_to_map(a, &e.values) });
        self
    }

    pub fn with_morphism(mut self, src: &DgaPresentation, tgt: &DgaPresentation, f: &DgaMorphism) -> Self {
        let images = (0..src.dim())
            .filter(|&i| f.images[i].iter().any(|c| !c.is_zero()))
            .map(|i| (src.label(i).to_string(), vector_to_map(tgt, &f.images[i])))
            .collect();
        self.morphisms.push(MorphismEntry { name: f.name.clone(), target: tgt.name().to_string(), images });
        self
    }

    /// Parses and builds the presentation; axioms are not checked here.
    pub fn load(text: &str) -> Result<(DgaFile, DgaPresentation), FormatError> {
        let f = DgaFile::parse(text)?;
        let a = f.presentation()?;
        Ok((f, a))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberTerm {
    pub src: usize,
    pub tgt: usize,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectEntry {
    pub position: i32,
    pub degrees: Vec<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub differential: Vec<FiberTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapTerm {
    pub src: usize,
    pub a: String,
    pub tgt: usize,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapEntry {
    pub i: i32,
    pub j: i32,
    pub terms: Vec<MapTerm>,
}

/// A bounded twisted complex over the algebra of a separate DGA file.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistedFile {
    #[serde(default)]
    pub objects: Vec<ObjectEntry>,
    #[serde(default)]
    pub maps: Vec<MapEntry>,
}

impl TwistedFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> Result<String, FormatError> {
        Ok(toml::to_string(self)?)
    }

    pub fn twisted_complex(&self, a: &DgaPresentation) -> Result<TwistedComplex, FormatError> {
        let mut m = TwistedComplex::new(a);
        for o in &self.objects {
            let n = o.degrees.len();
            let mut d = vec![Vec::new(); n];
            for t in &o.differential {
                if t.src >= n || t.tgt >= n {
                    return Err(FormatError::Twisted(format!("differential term out of range at position {}", o.position)));
                }
                d[t.src].push((t.tgt, coefficient(&t.coeff)?));
            }
            let mut f = FiberComplex::graded(o.degrees.clone()).with_differential(d);
            if let Some(w) = &o.weights {
                f = f.with_weights(w.clone());
            }
            if m.objects.contains_key(&o.position) {
                return Err(FormatError::Twisted(format!("position {} listed twice", o.position)));
            }
            m = m.with_object(o.position, f);
        }
        for e in &self.maps {
            let mut map = AMap::new();
            for t in &e.terms {
                let x = a.index_of(&t.a).ok_or_else(|| FormatError::UnknownLabel(t.a.clone()))?;
                map.add_term(HomLabel::new(t.src, x, t.tgt), coefficient(&t.coeff)?);
            }
            m = m.with_map(e.i, e.j, map);
        }
        Ok(m)
    }

    pub fn from_twisted(m: &TwistedComplex) -> Self {
        let a = &m.algebra;
        let objects = m
            .objects
            .iter()
            .map(|(p, f)| ObjectEntry {
                position: *p,
                degrees: f.degrees.clone(),
                weights: f.weights.clone(),
                differential: f
                    .d
                    .iter()
                    .enumerate()
                    .flat_map(|(s, row)| row.iter().map(move |(t, c)| FiberTerm { src: s, tgt: *t, coeff: format_scalar(c) }))
                    .collect(),
            })
            .collect();
        let maps = m
            .maps
            .iter()
            .map(|((i, j), d)| MapEntry {
                i: *i,
                j: *j,
                terms: d
                    .iter()
                    .map(|(l, c)| MapTerm { src: l.src, a: a.label(l.a).to_string(), tgt: l.tgt, coeff: format_scalar(c) })
                    .collect(),
            })
            .collect();
        TwistedFile { objects, maps }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dgbar_core::dga::examples::*;

    #[test]
    fn presentations_round_trip() {
        for a in [ground(), circle(), wedge(2), contractible(), dual_numbers(), broken_circle(), odd_contractible()] {
            let f = DgaFile::from_presentation(&a).with_augmentation(&a, &Augmentation::standard(&a));
            let text = f.to_toml().unwrap();
            let g = DgaFile::parse(&text).unwrap();
            assert_eq!(g, f);
            assert_eq!(g.presentation().unwrap(), a);
            assert_eq!(g.to_toml().unwrap(), text);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let bad = "name = \"x\"\nunit = \"1\"\n[[basis]]\nlabel = \"1\"\ndegree = 0\n[[differential]]\nsource = \"1\"\nterms = { z = \"1\" }\n";
        assert!(matches!(DgaFile::load(bad), Err(FormatError::UnknownLabel(_))));
        let frac = "name = \"x\"\nunit = \"1\"\n[[basis]]\nlabel = \"1\"\ndegree = 0\n[[augmentations]]\nname = \"e\"\nvalues = { \"1\" = \"1/0\" }\n";
        let (f, _) = DgaFile::load(frac).unwrap();
        assert!(matches!(f.augmentation("e"), Err(FormatError::Coefficient(_))));
        assert!(matches!(f.augmentation("nope"), Err(FormatError::UnknownAugmentation(_))));
    }

    #[test]
    fn twisted_round_trip() {
        let a = circle();
        let text = "[[objects]]\nposition = 0\ndegrees = [0]\n[[objects]]\nposition = 1\ndegrees = [-1]\n[[maps]]\ni = 1\nj = 0\nterms = [{ src = 0, a = \"e\", tgt = 0, coeff = \"1\" }]\n";
        let m = TwistedFile::parse(text).unwrap().twisted_complex(&a).unwrap();
        assert!(m.validate_mc().is_ok());
        let again = TwistedFile::parse(&TwistedFile::from_twisted(&m).to_toml().unwrap()).unwrap().twisted_complex(&a).unwrap();
        assert_eq!(again, m);
        assert!(TwistedFile::parse("").unwrap().twisted_complex(&a).unwrap().is_empty());
    }
}
