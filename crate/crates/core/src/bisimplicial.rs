//! Discrete-regime checkers for bisimplicial fibration notions: right
//! fibrations rowwise, the strict-pullback shadow of the homotopy-pullback
//! condition, Segal and completeness bijections, and the combined Cartesian
//! fibration checker over a constant base.
//!
//! Soundness contract: whenever the discreteness scan fails, every checker
//! answers inconclusive; bijection checks only stand in for equivalences on
//! levelwise-discrete data.

use crate::error::{Error, Result};
use crate::hom::{enumerate_hom, HomSearch};
use crate::lifting::{has_rlp, FibrationClass};
use crate::map::PresheafMap;
use crate::presheaf::PresheafRef;
use crate::report::{CheckReport, Exactness, Verdict, Witness};
use crate::shape::{Generator, IndexShape, Level, MainLevel};
use crate::standard::{build_ref, StandardObjectSpec as Spec};
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct DiscreteRegimeFlag {
    pub verified: bool,
    pub witness: Option<Witness>,
}

/// Every cell above second-level zero must be a second-direction degeneracy;
/// then bijection checks agree with the homotopy conditions they shadow.
pub fn discreteness_scan(x: &PresheafRef) -> DiscreteRegimeFlag {
    if !x.shape().is_bi() {
        return DiscreteRegimeFlag { verified: true, witness: None };
    }
    for lvl in x.levels() {
        let l = match lvl.second {
            Some(l) if l >= 1 => l,
            _ => continue,
        };
        let lower = Level { main: lvl.main, second: Some(l - 1) };
        for c in 0..x.cell_count(lvl) {
            let mut hit = false;
            'outer: for i in 0..l {
                for z in 0..x.cell_count(lower) {
                    if x.apply(lower, Generator::DegenSecond(i), z) == c {
                        hit = true;
                        break 'outer;
                    }
                }
            }
            if !hit {
                return DiscreteRegimeFlag {
                    verified: false,
                    witness: Some(Witness::Cell {
                        level: lvl.json_key(),
                        name: x.cell_name(lvl, c).to_string(),
                    }),
                };
            }
        }
    }
    DiscreteRegimeFlag { verified: true, witness: None }
}

/// A base is usable when its first-direction structure maps are bijections
/// (the constant-first embedding of a simplicial set).
pub fn first_constant(x: &PresheafRef) -> bool {
    for lvl in x.levels() {
        for (g, tgt) in x.generators(lvl) {
            let relevant = matches!(
                g,
                Generator::FaceMain(_)
                    | Generator::DegenMain(_)
                    | Generator::MarkToEdge
                    | Generator::VertexToMark
            );
            if !relevant {
                continue;
            }
            let action = x.generator_action(lvl, g).unwrap();
            let mut seen = vec![false; x.cell_count(tgt)];
            for &v in action {
                if std::mem::replace(&mut seen[v], true) {
                    return false;
                }
            }
            if seen.iter().any(|&s| !s) {
                return false;
            }
        }
    }
    true
}

/// The map of row simplicial sets at first level k, matched by cell names.
pub fn row_map(p: &PresheafMap, k: u8) -> Result<PresheafMap> {
    let ry = crate::ops::fix_main(&p.source, k)?;
    let rx = crate::ops::fix_main(&p.target, k)?;
    let mut components = BTreeMap::new();
    for lvl in ry.levels() {
        let l = match lvl.main {
            MainLevel::Ord(l) => l,
            _ => unreachable!(),
        };
        let bi = Level::bi(k, l);
        let mut comp = Vec::with_capacity(ry.cell_count(lvl));
        for name in ry.cells(lvl) {
            let yi = p.source.cell_index(bi, name).unwrap();
            let img = p.target.cell_name(bi, p.apply(bi, yi));
            comp.push(rx.cell_index(lvl, img).unwrap());
        }
        components.insert(lvl, comp);
    }
    PresheafMap::new(ry, rx, components)
}

/// Right-fibration check for every row over a first-constant base.
pub fn right_fib_rows(p: &PresheafMap, cap: u8) -> Result<CheckReport> {
    let rule = "rowwise-right-fibration";
    if !first_constant(&p.target) {
        return Err(Error::Precondition("base is not constant in the first direction".into()));
    }
    let mut worst_exact = Exactness::Exact;
    let mut saw_inconclusive = false;
    for k in 0..=p.source.dim().main {
        let rp = row_map(p, k)?;
        let rep = has_rlp(&rp, FibrationClass::Right, cap)?;
        match rep.verdict {
            Verdict::Fails => {
                return Ok(CheckReport {
                    rule: rule.into(),
                    verdict: Verdict::Fails,
                    witness: rep.witness,
                    exactness: rep.exactness,
                    notes: vec![format!("row {k}")],
                    elapsed: std::time::Duration::ZERO,
                })
            }
            Verdict::InconclusiveAtBound => saw_inconclusive = true,
            Verdict::Holds => {
                if let Exactness::BoundedAt(d) = rep.exactness {
                    worst_exact = Exactness::BoundedAt(d);
                }
            }
        }
    }
    if saw_inconclusive {
        return Ok(CheckReport::inconclusive(rule, "a row check hit the truncation"));
    }
    Ok(CheckReport::holds(rule, worst_exact))
}

/// Strict-pullback shadow of the homotopy-pullback condition at level n: the
/// square over the final-vertex map must be a bijection on discrete data.
pub fn hopullback_discrete(p: &PresheafMap, n: u8) -> Result<CheckReport> {
    let rule = "final-vertex-strict-pullback";
    let scan_r = discreteness_scan(&p.source);
    let scan_x = discreteness_scan(&p.target);
    if !scan_r.verified || !scan_x.verified {
        return Ok(CheckReport::inconclusive(rule, "levels are not discrete"));
    }
    if n > p.source.dim().main {
        return Err(Error::BoundExceeded(format!("level {n} above bound")));
    }
    if n == 0 {
        return Ok(CheckReport::holds(rule, Exactness::Exact));
    }
    let r = &p.source;
    let x = &p.target;
    let last_vertex: Vec<u8> = vec![n];
    let lvl = Level::bi(n, 0);
    let v_lvl = Level::bi(0, 0);
    // the fiber product of X_n -> X_0 <- R_0
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for xc in 0..x.cell_count(lvl) {
        let (l1, xv) = x.act_main_monotone(lvl, xc, &last_vertex);
        debug_assert_eq!(l1, v_lvl);
        for rc in 0..r.cell_count(v_lvl) {
            if p.apply(v_lvl, rc) == xv {
                pairs.push((xc, rc));
            }
        }
    }
    let mut hit: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for rn in 0..r.cell_count(lvl) {
        let (l1, rv) = r.act_main_monotone(lvl, rn, &last_vertex);
        debug_assert_eq!(l1, v_lvl);
        let key = (p.apply(lvl, rn), rv);
        if let Some(&other) = hit.get(&key) {
            return Ok(CheckReport::fails(
                rule,
                Exactness::Exact,
                Witness::CellPair {
                    level: lvl.json_key(),
                    left: r.cell_name(lvl, other).to_string(),
                    right: r.cell_name(lvl, rn).to_string(),
                },
            ));
        }
        hit.insert(key, rn);
    }
    if hit.len() != pairs.len() {
        let missing = pairs.iter().find(|k| !hit.contains_key(k)).unwrap();
        return Ok(CheckReport::fails(
            rule,
            Exactness::Exact,
            Witness::Text(format!(
                "no cell over ({}, {})",
                x.cell_name(lvl, missing.0),
                r.cell_name(v_lvl, missing.1)
            )),
        ));
    }
    Ok(CheckReport::holds(rule, Exactness::Exact))
}

/// Segal and completeness generators at the bounds of `w`.
fn segal_completeness_generators(w: &PresheafRef) -> Vec<(String, Spec, Spec)> {
    let mut gens = Vec::new();
    for n in 2..=w.dim().main {
        gens.push((format!("segal[{n}]"), Spec::GGen(n), Spec::FGen(n)));
    }
    gens.push(("completeness".into(), Spec::FGen(0), Spec::EGen(1)));
    gens
}

/// For each Segal/completeness generator `A -> B`, the restriction map
/// `Hom(B, w) -> Hom(A, w)` must be a bijection.
pub fn segal_completeness_check(w: &PresheafRef) -> Result<CheckReport> {
    let rule = "segal-completeness-bijections";
    let scan = discreteness_scan(w);
    if !scan.verified {
        return Ok(CheckReport {
            rule: rule.into(),
            verdict: Verdict::InconclusiveAtBound,
            witness: scan.witness,
            exactness: Exactness::BoundedAt(0),
            notes: vec!["levels are not discrete".into()],
            elapsed: std::time::Duration::ZERO,
        });
    }
    let dim = w.dim();
    let mut worst = Exactness::Exact;
    for (label, a_spec, b_spec) in segal_completeness_generators(w) {
        let a = build_ref(&a_spec, dim)?;
        let b = build_ref(&b_spec, dim)?;
        let incl = incl_for(&a_spec, &a, &b, dim)?;
        let hb = enumerate_hom(&b, w)?;
        let ha = enumerate_hom(&a, w)?;
        if let Exactness::BoundedAt(d) = hb.exactness {
            worst = Exactness::BoundedAt(d);
        }
        if let Some(witness) = restriction_bijection_witness(&incl, &hb.elements, &ha.elements)? {
            return Ok(CheckReport::fails(rule, worst, witness).with_note(label));
        }
    }
    Ok(CheckReport::holds(rule, worst))
}

fn incl_for(
    a_spec: &Spec,
    a: &PresheafRef,
    b: &PresheafRef,
    dim: crate::shape::Dim,
) -> Result<PresheafMap> {
    match a_spec {
        // the completeness generator is the point onto vertex zero
        Spec::FGen(0) => {
            let _ = dim;
            let mut components = BTreeMap::new();
            for lvl in a.levels() {
                let mut comp = Vec::with_capacity(a.cell_count(lvl));
                for name in a.cells(lvl) {
                    let idx = b
                        .cell_index(lvl, name)
                        .ok_or_else(|| Error::InvalidMap("constant cell missing".into()))?;
                    comp.push(idx);
                }
                components.insert(lvl, comp);
            }
            PresheafMap::new(a.clone(), b.clone(), components)
        }
        _ => crate::ops::inclusion_by_names(a, b),
    }
}

/// None when the restriction is a bijection; otherwise a collision pair or a
/// non-extendable element.
fn restriction_bijection_witness(
    incl: &PresheafMap,
    hb: &[PresheafMap],
    ha: &[PresheafMap],
) -> Result<Option<Witness>> {
    let mut seen: BTreeMap<Vec<(Level, Vec<usize>)>, usize> = BTreeMap::new();
    for (i, h) in hb.iter().enumerate() {
        let restricted = incl.then(h)?;
        let key = restricted.canonical_key();
        if let Some(&other) = seen.get(&key) {
            return Ok(Some(Witness::CellPair {
                level: "hom".into(),
                left: format!("element {other}"),
                right: format!("element {i}"),
            }));
        }
        seen.insert(key, i);
    }
    for (j, h) in ha.iter().enumerate() {
        if !seen.contains_key(&h.canonical_key()) {
            return Ok(Some(Witness::MapElement {
                description: format!("restricted element {j} has no extension"),
                data: serde_json::to_value(h.name_tables()).unwrap_or_default(),
            }));
        }
    }
    Ok(None)
}

/// Cylinders for the relative conditions: sub-objects of the base generated
/// by single cells, deduplicated, capped at a cell budget of eight.
fn base_cylinders(s_simp: &PresheafRef) -> Result<Vec<(PresheafRef, PresheafMap)>> {
    let mut out: Vec<(PresheafRef, PresheafMap)> = Vec::new();
    let mut seen: Vec<BTreeMap<Level, Vec<usize>>> = Vec::new();
    for lvl in s_simp.levels() {
        for c in 0..s_simp.cell_count(lvl) {
            let closure = s_simp.generated_closure(&[(lvl, c)]);
            let total: usize = closure.values().map(|v| v.len()).sum();
            if total > 8 || seen.contains(&closure) {
                continue;
            }
            seen.push(closure);
            out.push(crate::ops::generated_subobject(s_simp, &[(lvl, c)])?);
        }
    }
    Ok(out)
}

/// Cartesian fibration of bisimplicial sets over a first-constant base:
/// rowwise right fibrations plus relative Segal and completeness bijections
/// against base cylinders, all in the discrete regime.
pub fn is_cartesian_fibration_bisimplicial(p: &PresheafMap, cap: u8) -> Result<CheckReport> {
    let rule = "complete-segal-object-over-base";
    if !first_constant(&p.target) {
        return Err(Error::Precondition("base is not constant in the first direction".into()));
    }
    let scan = discreteness_scan(&p.source);
    if !scan.verified {
        return Ok(CheckReport {
            rule: rule.into(),
            verdict: Verdict::InconclusiveAtBound,
            witness: scan.witness,
            exactness: Exactness::BoundedAt(0),
            notes: vec!["total object is not levelwise discrete".into()],
            elapsed: std::time::Duration::ZERO,
        });
    }
    let rows = right_fib_rows(p, cap)?;
    match rows.verdict {
        Verdict::Fails => {
            return Ok(CheckReport {
                rule: rule.into(),
                verdict: Verdict::Fails,
                witness: rows.witness,
                exactness: rows.exactness,
                notes: {
                    let mut n = rows.notes;
                    n.insert(0, "rowwise right fibration fails".into());
                    n
                },
                elapsed: std::time::Duration::ZERO,
            })
        }
        Verdict::InconclusiveAtBound => {
            return Ok(CheckReport::inconclusive(rule, "rowwise check hit the truncation"))
        }
        Verdict::Holds => {}
    }
    let dim = p.source.dim();
    let s_simp = crate::ops::fix_main(&p.target, 0)?;
    let cylinders = base_cylinders(&s_simp)?;
    let mut worst = rows.exactness;
    for (label, a_spec, b_spec) in segal_completeness_generators(&p.source) {
        let a = build_ref(&a_spec, dim)?;
        let b = build_ref(&b_spec, dim)?;
        let incl_ab = incl_for(&a_spec, &a, &b, dim)?;
        for (k_obj, k_incl) in &cylinders {
            let k_bi = crate::ops::const_rows(k_obj, dim.main)?;
            let k_incl_bi = crate::ops::const_rows_map(k_incl, dim.main)?;
            // B × K over S, via projection to K then inclusion
            let (bk, _pb, pk_b) = crate::ops::product_with_projections(&b, &k_bi)?;
            let (ak, _pa, pk_a) = crate::ops::product_with_projections(&a, &k_bi)?;
            let to_s_b = pk_b.then(&k_incl_bi)?;
            let to_s_a = pk_a.then(&k_incl_bi)?;
            let hb = HomSearch::new(bk.clone(), p.source.clone())
                .over(p.clone(), to_s_b)
                .run()?;
            let ha = HomSearch::new(ak.clone(), p.source.clone())
                .over(p.clone(), to_s_a)
                .run()?;
            if let Exactness::BoundedAt(d) = hb.exactness {
                worst = Exactness::BoundedAt(d);
            }
            let incl = crate::ops::product_map(&ak, &bk, &incl_ab, &PresheafMap::identity(&k_bi))?;
            if let Some(witness) = restriction_bijection_witness(&incl, &hb.elements, &ha.elements)? {
                return Ok(CheckReport::fails(rule, worst, witness)
                    .with_note(format!("{label}, cylinder on {} cells", k_obj.total_cells()))
                    .with_note("cylinders limited to generated sub-objects with at most 8 cells".into()));
            }
        }
    }
    Ok(CheckReport::holds(rule, worst)
        .with_note("cylinders limited to generated sub-objects with at most 8 cells".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cat::{classification_diagram, FiniteCategory};
    use crate::lifting::to_terminal;
    use crate::shape::Dim;

    fn over_point(t: &PresheafRef) -> PresheafMap {
        to_terminal(t).unwrap()
    }

    #[test]
    fn constant_prolongations_are_discrete() {
        let n = crate::cat::nerve(&FiniteCategory::poset(2), Dim::simplicial(2)).unwrap();
        let w = crate::ops::const_second(&n, 2).unwrap();
        assert!(discreteness_scan(&w).verified);
    }

    #[test]
    fn segal_holds_for_nerve_prolongations() {
        let n = crate::cat::nerve(&FiniteCategory::poset(2), Dim::simplicial(3)).unwrap();
        let w = crate::ops::const_second(&n, 3).unwrap();
        let rep = segal_completeness_check(&w).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
    }

    #[test]
    fn completeness_fails_for_groupoid_prolongation() {
        let j1 = crate::cat::nerve(&FiniteCategory::chaotic_groupoid(1), Dim::simplicial(3)).unwrap();
        let w = crate::ops::const_second(&j1, 3).unwrap();
        let rep = segal_completeness_check(&w).unwrap();
        assert_eq!(rep.verdict, Verdict::Fails);
    }

    #[test]
    fn classification_diagram_is_cso_over_point() {
        let c = FiniteCategory::poset(2);
        let w = classification_diagram(&c, Dim::bisimplicial(3, 3)).unwrap();
        let rep = is_cartesian_fibration_bisimplicial(&over_point(&w), 2).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
    }

    #[test]
    fn nongaunt_classification_diagram_is_inconclusive() {
        let c = FiniteCategory::chaotic_groupoid(1);
        let w = classification_diagram(&c, Dim::bisimplicial(2, 2)).unwrap();
        let rep = is_cartesian_fibration_bisimplicial(&over_point(&w), 2).unwrap();
        assert_eq!(rep.verdict, Verdict::InconclusiveAtBound);
    }

    #[test]
    fn row_over_point_must_be_kan() {
        // a poset-nerve row over the point is not a right fibration
        let n = crate::cat::nerve(&FiniteCategory::poset(1), Dim::simplicial(3)).unwrap();
        let w = crate::ops::const_rows(&n, 3).unwrap();
        let rep = right_fib_rows(&over_point(&w), 3).unwrap();
        assert_eq!(rep.verdict, Verdict::Fails);
    }

    #[test]
    fn final_vertex_pullback_detects_loose_cells() {
        let c = FiniteCategory::poset(1);
        let n = crate::cat::nerve(&c, Dim::simplicial(2)).unwrap();
        let w = crate::ops::const_second(&n, 2).unwrap();
        let rep = hopullback_discrete(&PresheafMap::identity(&w), 1).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
    }
}
