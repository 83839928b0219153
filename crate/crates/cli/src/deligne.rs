//! A finite surrogate for the Deligne algebra of a point.
//!
//! `ℂ` is replaced by `K = ℚ[α]/(α^d - 2)` and the lattice `(2πi)^i ℚ` by the
//! line `α^i ℚ ⊂ K`; weights above `W` are dropped. The three pieces are
//! - `A_1`: `K` in weight 0 (the Hodge side),
//! - `A_2`: `ℚ b_0 ⊕ … ⊕ ℚ b_W` with `b_i b_j = b_{i+j}` (the Betti side),
//! - `A_12`: `K t_0 ⊕ … ⊕ K t_W` (the comparison side),
//!
//! all in degree 0, with `u_1(α^k) = α^k t_0` and `u_2(b_i) = α^i t_i`.
//! For `d ≤ W` some lines `α^i ℚ` coincide; each weight-`i` piece still
//! contributes `K / α^i ℚ` of dimension `d - 1` to `H^1`, which is all the
//! bar computation sees, so any `d ≥ 1` is accepted.

use std::collections::BTreeMap;

use dgbar_core::bar::build_reduced_bar_weighted;
use dgbar_core::dga::{
    fiber_product, reduced_model, validate, Augmentation, BasisElem, DgaError, DgaMorphism, DgaPresentation,
    FiberProductDga,
};
use dgbar_core::exactlin::{int, Scalar};
use num_traits::One;
use thiserror::Error;

use crate::format::DgaFile;

#[derive(Debug, Error)]
pub enum DeligneError {
    #[error("ext degree must be at least 1, got d = {d} (W = {w})")]
    ParameterOrder { d: usize, w: u32 },
    #[error(transparent)]
    Dga(#[from] DgaError),
    #[error("bar computation failed: {0}")]
    Bar(String),
}

fn power_label(k: usize) -> String {
    match k {
        0 => "1".into(),
        1 => "al".into(),
        _ => format!("al{k}"),
    }
}

/// `α^k α^l` in `K`: `(exponent, coefficient)`.
fn times(d: usize, k: usize, l: usize) -> (usize, Scalar) {
    if k + l < d {
        (k + l, Scalar::one())
    } else {
        (k + l - d, int(2))
    }
}

#[derive(Clone, Debug)]
pub struct DeligneParts {
    pub a1: DgaPresentation,
    pub a2: DgaPresentation,
    pub a12: DgaPresentation,
    pub u1: DgaMorphism,
    pub u2: DgaMorphism,
}

pub fn deligne_parts(d: usize, max_weight: u32) -> Result<DeligneParts, DeligneError> {
    if d == 0 {
        return Err(DeligneError::ParameterOrder { d, w: max_weight });
    }
    let top = max_weight as usize;

    let a1_basis = (0..d).map(|k| BasisElem::weighted(&power_label(k), 0, 0)).collect();
    let mut a1_prods = Vec::new();
    for k in 0..d {
        for l in 0..d {
            let (e, c) = times(d, k, l);
            a1_prods.push((k, l, vec![(e, c)]));
        }
    }
    let a1 = DgaPresentation::new("hodge", a1_basis, 0, a1_prods, Vec::new())?;

    let a2_basis = (0..=top).map(|i| BasisElem::weighted(&if i == 0 { "1".into() } else { format!("b{i}") }, 0, i as u32)).collect();
    let mut a2_prods = Vec::new();
    for i in 0..=top {
        for j in 0..=top {
            let t = if i + j <= top { vec![(i + j, Scalar::one())] } else { Vec::new() };
            a2_prods.push((i, j, t));
        }
    }
    let a2 = DgaPresentation::new("betti", a2_basis, 0, a2_prods, Vec::new())?;

    // t_i α^k sits at index i·d + k.
    let at = |i: usize, k: usize| i * d + k;
    let mut a12_basis = Vec::new();
    for i in 0..=top {
        for k in 0..d {
            let label = if (i, k) == (0, 0) { "1".into() } else { format!("t{i}{}", power_label(k)) };
            a12_basis.push(BasisElem::weighted(&label, 0, i as u32));
        }
    }
    let mut a12_prods = Vec::new();
    for i in 0..=top {
        for k in 0..d {
            for j in 0..=top {
                for l in 0..d {
                    let t = if i + j <= top {
                        let (e, c) = times(d, k, l);
                        vec![(at(i + j, e), c)]
                    } else {
                        Vec::new()
                    };
                    a12_prods.push((at(i, k), at(j, l), t));
                }
            }
        }
    }
    let a12 = DgaPresentation::new("comparison", a12_basis, 0, a12_prods, Vec::new())?;

    let scaled_unit = |i: usize, c: Scalar| {
        let mut v = a12.zero_vector();
        v[i] = c;
        v
    };
    let u1 = DgaMorphism { name: "u1".into(), images: (0..d).map(|k| scaled_unit(at(0, k), Scalar::one())).collect() };
    // α^i = 2^{⌊i/d⌋} α^{i mod d}
    let u2 = DgaMorphism {
        name: "u2".into(),
        images: (0..=top).map(|i| scaled_unit(at(i, i % d), int(2).pow((i / d) as i32))).collect(),
    };
    Ok(DeligneParts { a1, a2, a12, u1, u2 })
}

/// `ε_B`: `b_0 ↦ 1` on the Betti side.
pub fn betti_augmentation(parts: &DeligneParts) -> Augmentation {
    Augmentation::new("eps_B", parts.a2.unit_vector())
}

pub fn deligne_fiber_product(d: usize, max_weight: u32) -> Result<(FiberProductDga, Augmentation), DeligneError> {
    let parts = deligne_parts(d, max_weight)?;
    let fp = fiber_product(&parts.a1, &parts.a2, &parts.a12, &parts.u1, &parts.u2)?;
    let eps = fp.pulled_back(&betti_augmentation(&parts), false);
    Ok((fp, eps))
}

/// The surrogate as a weighted DGA file carrying `ε_B`.
pub fn deligne_point_toy(d: usize, max_weight: u32) -> Result<DgaFile, DeligneError> {
    let (fp, eps) = deligne_fiber_product(d, max_weight)?;
    let a = fp.total.clone().with_name(&format!("deligne-point-d{d}-w{max_weight}"));
    validate(&a).into_result()?;
    let mut f = DgaFile::from_presentation(&a).with_augmentation(&a, &eps);
    f.meta.insert("generator".into(), "deligne-point".into());
    f.meta.insert("ext_degree".into(), d.to_string());
    f.meta.insert("max_weight".into(), max_weight.to_string());
    f.meta.insert("field_extension".into(), format!("Q[al]/(al^{d} - 2)"));
    Ok(f)
}

/// Dimension of the weight-`w` part of `H^0` of the bar, for `w ≤ max_weight`.
///
/// Computed on the reduced model: its positive-degree letters all have
/// positive weight here, so words of weight `w` have length at most `w` and the
/// weight-`≤ w` truncation is exact. Weight pieces split the complex, so each
/// slice is a difference of consecutive truncations.
pub fn h0_by_weight(a: &DgaPresentation, max_weight: u32) -> Result<BTreeMap<u32, usize>, DeligneError> {
    let model = reduced_model(a)?;
    let alg = &model.algebra;
    if (0..alg.dim()).any(|i| i != alg.unit() && alg.weight(i).unwrap_or(0) == 0) {
        return Err(DeligneError::Bar("reduced model has letters of weight zero".into()));
    }
    let eps = Augmentation::standard(alg);
    let mut out = BTreeMap::new();
    let mut below = 0;
    for w in 0..=max_weight {
        let bar = build_reduced_bar_weighted(alg, &eps, w as usize, Some(w)).map_err(|e| DeligneError::Bar(e.to_string()))?;
        let total = bar.cohomology(0).map_err(|e| DeligneError::Bar(e.to_string()))?.dim();
        out.insert(w, total - below);
        below = total;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Compositions of `w` into `n` positive parts, each part carrying `d - 1` choices.
    fn oracle(d: u64, w: u64) -> u64 {
        if w == 0 {
            return 1;
        }
        let binom = |n: u64, k: u64| (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1));
        (1..=w).map(|n| binom(w - 1, n - 1) * (d - 1).pow(n as u32)).sum()
    }

    #[test]
    fn parameter_order() {
        assert!(matches!(deligne_point_toy(0, 2), Err(DeligneError::ParameterOrder { .. })));
        assert!(deligne_point_toy(2, 3).is_ok());
        assert!(deligne_point_toy(1, 0).is_ok());
    }

    #[test]
    fn parts_are_valid_and_file_round_trips() {
        let p = deligne_parts(3, 2).unwrap();
        for a in [&p.a1, &p.a2, &p.a12] {
            assert!(validate(a).is_ok(), "{}", a.name());
        }
        let f = deligne_point_toy(3, 2).unwrap();
        let text = f.to_toml().unwrap();
        let g = DgaFile::parse(&text).unwrap();
        assert_eq!(g, f);
        assert_eq!(g.presentation().unwrap(), f.presentation().unwrap());
    }

    #[test]
    fn weight_slices_match_compositions() {
        let (fp, _) = deligne_fiber_product(4, 3).unwrap();
        let dims = h0_by_weight(&fp.total, 3).unwrap();
        for (w, n) in dims {
            assert_eq!(n as u64, oracle(4, w as u64), "w = {w}");
        }
        let (fp, _) = deligne_fiber_product(2, 3).unwrap();
        let dims = h0_by_weight(&fp.total, 3).unwrap();
        assert_eq!(dims.values().copied().collect::<Vec<_>>(), [1, 1, 2, 4]);
        let (fp, _) = deligne_fiber_product(1, 0).unwrap();
        assert_eq!(h0_by_weight(&fp.total, 0).unwrap(), BTreeMap::from([(0, 1)]));
    }
}
