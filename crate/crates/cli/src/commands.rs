//! The `dgbar` subcommands, as functions from file contents to reports.

use dgbar_core::bar::{
    build_augmented_bar, build_kml, build_reduced_bar, compare_cohomology, copath_check, homogeneous_bar, BarError,
    BarTruncation,
};
use dgbar_core::comod::{equivalence_check, round_trip, ComodError};
use dgbar_core::connect::{connection_from_twisted, ConnectError};
use dgbar_core::dga::{
    cohomology_dims, fiber_product, is_connected, validate, validate_augmentation, validate_morphism, Augmentation,
    DgaError, DgaPresentation, ValidationReport,
};
use dgbar_core::exactlin::format_scalar;
use dgbar_core::twisted::{compare_end_of_unit, FiberComplex, TwistedError};
use num_traits::Zero;
use thiserror::Error;

use crate::deligne::{deligne_fiber_product, deligne_point_toy, h0_by_weight, DeligneError};
use crate::format::{DgaFile, FormatError, TwistedFile};
use crate::report::Report;

/// Input problems; these map to exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Dga(#[from] DgaError),
    #[error(transparent)]
    Bar(#[from] BarError),
    #[error(transparent)]
    Twisted(#[from] TwistedError),
    #[error(transparent)]
    Comod(#[from] ComodError),
    #[error(transparent)]
    Deligne(#[from] DeligneError),
    #[error("{0}")]
    Usage(String),
}

fn joined(xs: impl IntoIterator<Item = impl ToString>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn violations(rep: &ValidationReport) -> Option<String> {
    rep.violations.first().map(|v| {
        let more = rep.violations.len() - 1;
        let tail = if more > 0 { format!(" and {more} more") } else { String::new() };
        format!("{:?} at {}{tail}", v.axiom, v.witness)
    })
}

/// `"a..b"` (inclusive) or a single integer.
pub fn parse_range(s: &str) -> Result<(i32, i32), CliError> {
    let bad = || CliError::Usage(format!("expected a..b or an integer, got {s:?}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let a = a.trim().parse().map_err(|_| bad())?;
            let b = b.trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            Ok((a, b))
        }
        None => {
            let a = s.trim().parse().map_err(|_| bad())?;
            Ok((a, a))
        }
    }
}

/// `"4,5,6"` or `"4..6"`.
pub fn parse_list(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("expected a list like 4,5,6 or 4..6, got {s:?}"));
    if s.contains("..") {
        let (a, b) = parse_range(s)?;
        if a < 0 {
            return Err(bad());
        }
        return Ok((a as usize..=b as usize).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
}

fn augmentation_or_standard(f: &DgaFile, a: &DgaPresentation, name: Option<&str>) -> Result<Augmentation, CliError> {
    match name {
        Some(n) => Ok(f.augmentation(n)?),
        None => match f.augmentations.first() {
            Some(e) => Ok(f.augmentation(&e.name)?),
            None => Ok(Augmentation::standard(a)),
        },
    }
}

pub fn cmd_validate(text: &str) -> Result<Report, CliError> {
    let (f, a) = DgaFile::load(text)?;
    let mut r = Report::new("validate");
    r.param("algebra", a.name());
    r.param("dim", a.dim());
    let rep = validate(&a);
    r.check("dga axioms", rep.is_ok(), violations(&rep));
    for e in &f.augmentations {
        let eps = f.augmentation(&e.name)?;
        let rep = validate_augmentation(&a, &eps);
        r.check(&format!("augmentation {}", e.name), rep.is_ok(), violations(&rep));
    }
    if rep.is_ok() {
        let h = cohomology_dims(&a)?;
        r.table("cohomology of the algebra", &["degree", "dim"], h.iter().map(|(k, d)| vec![k.to_string(), d.to_string()]).collect());
        r.note(if is_connected(&a) { "connected" } else { "not connected" });
    }
    Ok(r)
}

#[derive(Clone, Debug, Default)]
pub struct BarOptions {
    pub aug1: Option<String>,
    pub aug2: Option<String>,
    pub window: Option<(i32, i32)>,
    pub max_length: usize,
    pub degrees: Vec<i32>,
    pub reduced: bool,
    pub compare: Vec<usize>,
    pub weights: Option<u32>,
    pub coalgebra: bool,
    pub representatives: bool,
}

pub fn cmd_bar(text: &str, o: &BarOptions) -> Result<Report, CliError> {
    let (f, a) = DgaFile::load(text)?;
    validate(&a).into_result()?;
    let e1 = augmentation_or_standard(&f, &a, o.aug1.as_deref())?;
    let e2 = match &o.aug2 {
        Some(_) => augmentation_or_standard(&f, &a, o.aug2.as_deref())?,
        None => e1.clone(),
    };
    let (lo, hi) = o.window.unwrap_or((0, o.max_length as i32));
    let degrees = if o.degrees.is_empty() { vec![0, 1] } else { o.degrees.clone() };
    let mut r = Report::new("bar");
    r.param("algebra", a.name());
    r.param("aug1", &e1.name);
    r.param("aug2", &e2.name);
    r.param("max_length", o.max_length);

    if o.reduced {
        if e1 != e2 {
            return Err(CliError::Usage("the reduced bar needs aug1 = aug2".into()));
        }
        let red = build_reduced_bar(&a, &e1, o.max_length)?;
        let mut rows = Vec::new();
        for &k in &degrees {
            let h = red.cohomology(k)?;
            let mut row = vec![k.to_string(), h.dim().to_string()];
            if o.representatives {
                let labels = red.total.space().labels(k);
                let reps: Vec<String> = h
                    .representatives
                    .iter()
                    .map(|v| {
                        let terms: Vec<String> = v
                            .iter()
                            .zip(labels)
                            .filter(|(c, _)| !c.is_zero())
                            .map(|(c, (_, w))| format!("{} {}", format_scalar(c), red.format_word(w)))
                            .collect();
                        terms.join(" + ")
                    })
                    .collect();
                row.push(reps.join("; "));
            }
            rows.push(row);
        }
        let cols: &[&str] = if o.representatives { &["degree", "dim", "representatives"] } else { &["degree", "dim"] };
        r.table("reduced bar cohomology", cols, rows);
        let sq = red.total.space().degrees().iter().all(|&k| {
            let (d0, d1) = (red.total.d(k - 1), red.total.d(k));
            d1.mul(&d0).map(|m| m.is_zero()).unwrap_or(false)
        });
        r.check("d^2 = 0", sq, None);
    } else {
        r.param("window", format!("{lo}..{hi}"));
        let t = BarTruncation::new(lo, hi, o.max_length);
        let b = build_augmented_bar(&a, &e1, &e2, t)?;
        r.param("words", b.len());
        let rows = degrees.iter().map(|&k| Ok(vec![k.to_string(), b.cohomology(k)?.dim().to_string()])).collect::<Result<_, CliError>>()?;
        r.table("bar cohomology", &["degree", "dim"], rows);
        let bad = b.check_square_zero();
        r.check("d^2 = 0", bad.is_empty(), bad.first().map(|w| format!("{w:?}")));
        if o.coalgebra {
            if e1 != e2 {
                r.note("coalgebra checks skipped: they need aug1 = aug2");
            } else {
                let c = b.check_coalgebra()?;
                let w = c
                    .coassociativity_failures
                    .first()
                    .or(c.counit_failures.first())
                    .or(c.chain_map_failures.first())
                    .or(c.counit_chain_failures.first())
                    .map(|w| format!("{w:?}"));
                r.check("coalgebra axioms", c.is_ok(), w);
            }
        }
    }

    if !o.compare.is_empty() {
        let cmp = compare_cohomology(&a, &e1, o.max_length, &o.compare)?;
        let rows = cmp
            .rows
            .iter()
            .map(|row| {
                vec![
                    row.window.to_string(),
                    joined(row.simplicial),
                    joined(row.reduced),
                    joined(row.comparison_rank),
                    joined(row.simplicial_filtered),
                    joined(row.reduced_filtered),
                ]
            })
            .collect();
        r.table(
            "simplicial vs reduced (H^0, H^1)",
            &["window", "simplicial", "reduced", "rank", "filtered", "reduced filtered"],
            rows,
        );
        r.check("comparison consistent", cmp.is_consistent(), None);
    }

    if let Some(top) = o.weights {
        let t = BarTruncation::new(lo, hi, o.max_length).with_max_weight(top);
        let b = homogeneous_bar(&a, &e1, t)?;
        let mut rows = Vec::new();
        for w in 0..=top {
            let c = b.weight_component(w)?;
            let mut row = vec![w.to_string()];
            for &k in &degrees {
                row.push(c.cohomology(k)?.dim().to_string());
            }
            rows.push(row);
        }
        let heads: Vec<String> = std::iter::once("weight".to_string()).chain(degrees.iter().map(|k| format!("H^{k}"))).collect();
        let heads: Vec<&str> = heads.iter().map(|s| s.as_str()).collect();
        r.table("weight components", &heads, rows);
        let c = b.check_coalgebra()?;
        r.check("coproduct respects weights", c.weight_failures.is_empty(), c.weight_failures.first().map(|w| format!("{w:?}")));
    }
    Ok(r)
}

pub fn cmd_kml(m: usize, l: usize) -> Result<Report, CliError> {
    let rep = build_kml(m, l)?.report(true)?;
    let mut r = Report::new("kml");
    r.param("m", m);
    r.param("l", l);
    let degs: std::collections::BTreeSet<i32> = rep.dims.keys().chain(rep.cohomology.keys()).copied().collect();
    let rows = degs
        .iter()
        .map(|k| {
            vec![
                k.to_string(),
                rep.dims.get(k).copied().unwrap_or(0).to_string(),
                rep.cohomology.get(k).copied().unwrap_or(0).to_string(),
            ]
        })
        .collect();
    r.table("K_{m,l}", &["degree", "dim", "H"], rows);
    r.check("augmentation is a quasi-isomorphism onto k", rep.augmented_acyclic, Some(format!("H = {:?}", rep.cohomology)));
    if let Some(b) = rep.base_is_k {
        r.check("K_{l,l} = k", b, None);
    }
    if let Some(q) = rep.inclusion_qiso {
        r.check("K_{m,l} -> K_{m+1,l} is a quasi-isomorphism", q, None);
    }
    Ok(r)
}

#[derive(Clone, Debug, Default)]
pub struct TwistedOptions {
    pub aug: Option<String>,
    pub roundtrip: bool,
    pub hom: Option<usize>,
}

pub fn cmd_twisted(dga_text: &str, twisted_text: &str, o: &TwistedOptions) -> Result<Report, CliError> {
    let (f, a) = DgaFile::load(dga_text)?;
    validate(&a).into_result()?;
    let m = TwistedFile::parse(twisted_text)?.twisted_complex(&a)?;
    let mut r = Report::new("twisted");
    r.param("algebra", a.name());
    r.param("positions", format!("[{}]", joined(m.positions())));
    let rows = m.objects.iter().map(|(p, v)| vec![p.to_string(), v.dim().to_string(), joined(&v.degrees)]).collect();
    r.table("objects", &["position", "dim", "degrees"], rows);
    let mc = m.validate_mc();
    let w = mc
        .object_failures
        .first()
        .map(|(p, s)| format!("object at {p}: {s}"))
        .or(mc.degree_failures.first().map(|b| format!("degree of d{b:?}")))
        .or(mc.sharp_failures.first().map(|b| format!("block {b:?}")));
    r.check("Maurer-Cartan", mc.is_ok(), w);
    r.check("both Maurer-Cartan forms agree", mc.forms_agree(), None);
    if m.is_empty() {
        r.note("zero object");
    }
    if !mc.is_ok() {
        return Ok(r);
    }

    match connection_from_twisted(&m) {
        Ok(c) => {
            let rep = c.check();
            r.check("connection is integrable and nilpotent", rep.is_ok(), rep.curvature_witness.map(|h| format!("{h:?}")));
        }
        Err(ConnectError::LargeDegreeZero) => {}
        Err(e) => r.note(format!("no connection view: {e}")),
    }
    let is_unit = m.maps.is_empty() && m.objects.len() == 1 && m.objects.get(&0) == Some(&FiberComplex::unit());
    if is_unit {
        let op = compare_end_of_unit(&a)?;
        r.check("End(unit) is the opposite algebra", op.is_ok(), op.mismatches.first().map(|x| format!("{x:?}")));
        r.param("pairs_checked", op.pairs_checked);
    }
    let eps = augmentation_or_standard(&f, &a, o.aug.as_deref())?;
    if o.roundtrip {
        r.check("psi(phi(M)) = M", round_trip(&m, &eps)?, None);
    }
    if let Some(l) = o.hom {
        let e = equivalence_check(&m, &m, &eps, l)?;
        r.table(
            "End(M) (H^0, H^1)",
            &["twisted", "comodule", "comodule next", "psi rank"],
            vec![vec![joined(e.twisted), joined(e.comodule), joined(e.comodule_next), joined(e.psi_rank)]],
        );
        r.check("psi is a chain map", e.psi_is_chain_map, None);
        r.check("Hom dimensions agree", e.is_ok(), None);
    }
    Ok(r)
}

#[derive(Clone, Debug)]
pub struct FiberOptions {
    pub u1: String,
    pub u2: String,
    pub copath: Option<String>,
    pub width: usize,
}

/// Fiber product of `A_1 -> A_12 <- A_2`; `u1` is stored in the `A_1` file and `u2` in the `A_2` file.
pub fn cmd_fiber(a1_text: &str, a2_text: &str, a12_text: &str, o: &FiberOptions) -> Result<(Report, Option<DgaFile>), CliError> {
    let (f1, a1) = DgaFile::load(a1_text)?;
    let (f2, a2) = DgaFile::load(a2_text)?;
    let (f12, a12) = DgaFile::load(a12_text)?;
    let mut r = Report::new("fiber");
    r.param("a1", a1.name());
    r.param("a2", a2.name());
    r.param("a12", a12.name());
    for (name, a) in [("a1", &a1), ("a2", &a2), ("a12", &a12)] {
        let rep = validate(a);
        r.check(&format!("{name} axioms"), rep.is_ok(), violations(&rep));
    }
    let u1 = f1.morphism(&o.u1, &f12)?;
    let u2 = f2.morphism(&o.u2, &f12)?;
    for (name, src, u) in [("u1", &a1, &u1), ("u2", &a2, &u2)] {
        let rep = validate_morphism(src, &a12, u);
        r.check(&format!("{name} is a dga morphism"), rep.is_ok(), violations(&rep));
    }
    if !r.passed() {
        return Ok((r, None));
    }
    let fp = fiber_product(&a1, &a2, &a12, &u1, &u2)?;
    let rep = validate(&fp.total);
    r.check("fiber product axioms", rep.is_ok(), violations(&rep));
    r.param("dim", fp.total.dim());
    let h = cohomology_dims(&fp.total)?;
    r.table("cohomology of the fiber product", &["degree", "dim"], h.iter().map(|(k, d)| vec![k.to_string(), d.to_string()]).collect());
    if let Some(name) = &o.copath {
        let eps12 = f12.augmentation(name)?;
        let c = copath_check(&fp, &eps12, BarTruncation::full(o.width))?;
        r.param("copath_words", c.words_checked);
        let rows = c.worked_elements.iter().map(|(x, v)| vec![x.clone(), format_scalar(v)]).collect();
        r.table("p(D(1 x 1))", &["x", "value"], rows);
        r.check("copath is a cocycle", c.is_ok(), c.failures.first().map(|w| format!("{w:?}")));
    }
    Ok((r, Some(DgaFile::from_presentation(&fp.total))))
}

/// Generates the surrogate Deligne algebra and tabulates its weight slices.
pub fn cmd_gen_deligne(d: usize, max_weight: u32) -> Result<(Report, DgaFile), CliError> {
    let file = deligne_point_toy(d, max_weight)?;
    let (fp, _) = deligne_fiber_product(d, max_weight)?;
    let mut r = Report::new("gen-deligne");
    r.param("ext_degree", d);
    r.param("max_weight", max_weight);
    r.param("dim", fp.total.dim());
    let rep = validate(&fp.total);
    r.check("dga axioms (with weights)", rep.is_ok(), violations(&rep));
    let slices = h0_by_weight(&fp.total, max_weight)?;
    r.table("Gr^W H^0 of the bar", &["weight", "dim"], slices.iter().map(|(w, n)| vec![w.to_string(), n.to_string()]).collect());
    Ok((r, file))
}

#[cfg(test)]
mod tests {
    use super::*;

    const CIRCLE: &str = r#"
name = "circle"
unit = "1"
basis = [{ label = "1", degree = 0 }, { label = "e", degree = 1 }]
"#;

    #[test]
    fn ranges_and_lists() {
        assert_eq!(parse_range("0..3").unwrap(), (0, 3));
        assert_eq!(parse_range("-1..2").unwrap(), (-1, 2));
        assert!(parse_range("3..1").is_err());
        assert_eq!(parse_list("4..6").unwrap(), vec![4, 5, 6]);
        assert_eq!(parse_list("4, 6").unwrap(), vec![4, 6]);
        assert!(parse_list("x").is_err());
    }

    #[test]
    fn circle_commands() {
        let r = cmd_validate(CIRCLE).unwrap();
        assert!(r.passed());
        let o = BarOptions { max_length: 3, reduced: true, representatives: true, ..Default::default() };
        let r = cmd_bar(CIRCLE, &o).unwrap();
        assert!(r.passed());
        assert_eq!(r.tables[0].rows[0][1], "4");
        let o = BarOptions { max_length: 2, compare: vec![3, 4], coalgebra: true, ..Default::default() };
        let r = cmd_bar(CIRCLE, &o).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        let r = cmd_twisted(CIRCLE, "[[objects]]\nposition = 0\ndegrees = [0]\n", &TwistedOptions { roundtrip: true, hom: Some(2), ..Default::default() }).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        assert!(r.check_named("End(unit) is the opposite algebra").is_some());
    }

    #[test]
    fn kml_and_deligne() {
        let r = cmd_kml(3, 1).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        let (r, f) = cmd_gen_deligne(3, 2).unwrap();
        assert!(r.passed());
        assert_eq!(r.tables[0].rows.iter().map(|x| x[1].as_str()).collect::<Vec<_>>(), ["1", "2", "6"]);
        assert!(DgaFile::parse(&f.to_toml().unwrap()).is_ok());
        assert!(matches!(cmd_gen_deligne(0, 2), Err(CliError::Deligne(_))));
    }
}
