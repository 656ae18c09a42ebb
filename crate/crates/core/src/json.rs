//! Canonical JSON formats for presheaves, maps, categories and Cat-valued
//! functors. Serialization is deterministic: objects are emitted with sorted
//! keys and a parse/serialize round trip is byte-identical.

use crate::cat::{CatValuedFunctor, FiniteCategory, Morphism};
use crate::error::{Error, Result};
use crate::map::PresheafMap;
use crate::presheaf::{PresheafBuilder, PresheafRef};
use crate::shape::{Dim, Generator, IndexShape, Level, MainLevel};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use std::sync::Arc;

fn sorted(map: BTreeMap<String, Value>) -> Value {
    let mut m = Map::new();
    for (k, v) in map {
        m.insert(k, v);
    }
    Value::Object(m)
}

/// Serialize a presheaf. Marked shapes carry their markings as edge-name
/// lists; the marked rows themselves are reconstructed on parse, so only
/// separated presheaves have a JSON form.
pub fn presheaf_to_json(p: &PresheafRef) -> Result<Value> {
    if p.shape().is_marked() && !p.separatedness().verdict.holds() {
        return Err(Error::Json("only separated presheaves serialize".into()));
    }
    let mut levels = BTreeMap::new();
    let mut faces = BTreeMap::new();
    let mut degeneracies = BTreeMap::new();
    for lvl in p.levels() {
        if lvl.main == MainLevel::Marked {
            continue;
        }
        levels.insert(
            lvl.json_key(),
            Value::Array(p.cells(lvl).iter().map(|n| json!(n)).collect()),
        );
        let mut face_entries = BTreeMap::new();
        let mut degen_entries = BTreeMap::new();
        for (g, tgt) in p.generators(lvl) {
            if matches!(g, Generator::MarkToEdge | Generator::VertexToMark) {
                continue;
            }
            let mut table = BTreeMap::new();
            for (i, name) in p.cells(lvl).iter().enumerate() {
                table.insert(name.clone(), json!(p.cell_name(tgt, p.apply(lvl, g, i))));
            }
            if g.is_degeneracy_like() {
                degen_entries.insert(g.json_key(p.shape()), sorted(table));
            } else {
                face_entries.insert(g.json_key(p.shape()), sorted(table));
            }
        }
        if !face_entries.is_empty() {
            faces.insert(lvl.json_key(), sorted(face_entries));
        }
        if !degen_entries.is_empty() {
            degeneracies.insert(lvl.json_key(), sorted(degen_entries));
        }
    }
    let dim_value = match p.dim().second {
        None => json!(p.dim().main),
        Some(s) => json!([p.dim().main, s]),
    };
    let mut root = BTreeMap::new();
    root.insert("shape".to_string(), json!(p.shape().json_name()));
    root.insert("dim".to_string(), dim_value);
    root.insert("levels".to_string(), sorted(levels));
    root.insert("faces".to_string(), sorted(faces));
    root.insert("degeneracies".to_string(), sorted(degeneracies));
    root.insert(
        "cosk".to_string(),
        p.cosk_certificate().map_or(Value::Null, |c| json!(c)),
    );
    if p.shape().is_marked() {
        let markings = match p.dim().second {
            None => {
                Value::Array(crate::marked::marking_names(p, None).into_iter().map(|n| json!(n)).collect())
            }
            Some(b) => {
                let mut rows = BTreeMap::new();
                for l in 0..=b {
                    rows.insert(
                        l.to_string(),
                        Value::Array(
                            crate::marked::marking_names(p, Some(l))
                                .into_iter()
                                .map(|n| json!(n))
                                .collect(),
                        ),
                    );
                }
                sorted(rows)
            }
        };
        root.insert("markings".to_string(), markings);
    }
    Ok(sorted(root))
}

pub fn presheaf_to_string(p: &PresheafRef) -> Result<String> {
    Ok(serde_json::to_string(&presheaf_to_json(p)?).map_err(|e| Error::Json(e.to_string()))?)
}

pub fn presheaf_from_json(v: &Value) -> Result<PresheafRef> {
    let obj = v.as_object().ok_or_else(|| Error::Json("expected an object".into()))?;
    let shape_name = obj
        .get("shape")
        .and_then(|s| s.as_str())
        .ok_or_else(|| Error::Json("missing shape".into()))?;
    let shape = IndexShape::from_json_name(shape_name)
        .ok_or_else(|| Error::Json(format!("unknown shape {shape_name}")))?;
    let dim = match obj.get("dim") {
        Some(Value::Number(n)) => Dim::simplicial(
            n.as_u64().ok_or_else(|| Error::Json("bad dim".into()))? as u8,
        ),
        Some(Value::Array(a)) if a.len() == 2 => Dim::bisimplicial(
            a[0].as_u64().ok_or_else(|| Error::Json("bad dim".into()))? as u8,
            a[1].as_u64().ok_or_else(|| Error::Json("bad dim".into()))? as u8,
        ),
        _ => return Err(Error::Json("missing dim".into())),
    };
    if shape.is_bi() != dim.second.is_some() {
        return Err(Error::Json("dim arity does not match the shape".into()));
    }
    // parse the unmarked carrier first
    let carrier_shape = match shape {
        IndexShape::MarkedSimplex => IndexShape::Simplex,
        IndexShape::MarkedBiSimplex => IndexShape::BiSimplex,
        s => s,
    };
    let mut b = PresheafBuilder::new(carrier_shape, dim);
    let levels = obj
        .get("levels")
        .and_then(|l| l.as_object())
        .ok_or_else(|| Error::Json("missing levels".into()))?;
    for (key, cells) in levels {
        let lvl = Level::from_json_key(key).ok_or_else(|| Error::Json(format!("bad level {key}")))?;
        for c in cells.as_array().ok_or_else(|| Error::Json("levels hold arrays".into()))? {
            b.cell(lvl, c.as_str().ok_or_else(|| Error::Json("cell names are strings".into()))?);
        }
    }
    for (field, degeneracy) in [("faces", false), ("degeneracies", true)] {
        if let Some(entries) = obj.get(field).and_then(|f| f.as_object()) {
            for (key, gens) in entries {
                let lvl = Level::from_json_key(key)
                    .ok_or_else(|| Error::Json(format!("bad level {key}")))?;
                for (gk, table) in gens.as_object().ok_or_else(|| Error::Json("bad generator table".into()))? {
                    let g = parse_generator(gk, carrier_shape, degeneracy)?;
                    for (from, to) in table.as_object().ok_or_else(|| Error::Json("bad action".into()))? {
                        b.map(lvl, g, from.clone(), to.as_str().ok_or_else(|| Error::Json("bad image".into()))?);
                    }
                }
            }
        }
    }
    if let Some(c) = obj.get("cosk").and_then(|c| c.as_u64()) {
        b.certificate(c as u8);
    }
    let carrier = Arc::new(b.build().map_err(|e| Error::Json(format!("invalid presheaf: {e}")))?);
    if !shape.is_marked() {
        return Ok(carrier);
    }
    let markings = obj
        .get("markings")
        .ok_or_else(|| Error::Json("marked shapes need markings".into()))?;
    match dim.second {
        None => {
            let names: Vec<String> = markings
                .as_array()
                .ok_or_else(|| Error::Json("markings are a list".into()))?
                .iter()
                .map(|v| v.as_str().map(str::to_string))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::Json("marking names are strings".into()))?;
            crate::marked::with_markings(&carrier, &names)
                .map_err(|e| Error::Json(format!("bad markings: {e}")))
        }
        Some(bnd) => {
            let rows = markings
                .as_object()
                .ok_or_else(|| Error::Json("markings are keyed by second level".into()))?;
            let mut lists = Vec::new();
            for l in 0..=bnd {
                let names: Vec<String> = rows
                    .get(&l.to_string())
                    .and_then(|v| v.as_array())
                    .ok_or_else(|| Error::Json(format!("missing markings for row {l}")))?
                    .iter()
                    .map(|v| v.as_str().map(str::to_string))
                    .collect::<Option<_>>()
                    .ok_or_else(|| Error::Json("marking names are strings".into()))?;
                lists.push(names);
            }
            crate::marked::with_markings_at(&carrier, &lists)
                .map_err(|e| Error::Json(format!("bad markings: {e}")))
        }
    }
}

fn parse_generator(key: &str, shape: IndexShape, degeneracy: bool) -> Result<Generator> {
    let (dir, idx) = match key.split_once(':') {
        Some(("1", i)) => (1u8, i),
        Some(("2", i)) => (2u8, i),
        Some(_) => return Err(Error::Json(format!("bad generator key {key}"))),
        None => (1u8, key),
    };
    if shape.is_bi() && !key.contains(':') {
        return Err(Error::Json(format!("bisimplicial generators need a direction: {key}")));
    }
    let i: u8 = idx.parse().map_err(|_| Error::Json(format!("bad generator index {key}")))?;
    Ok(match (dir, degeneracy) {
        (1, false) => Generator::FaceMain(i),
        (1, true) => Generator::DegenMain(i),
        (2, false) => Generator::FaceSecond(i),
        (2, true) => Generator::DegenSecond(i),
        _ => unreachable!(),
    })
}

pub fn presheaf_from_str(s: &str) -> Result<PresheafRef> {
    let v: Value = serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))?;
    presheaf_from_json(&v)
}

/// A map file: source and target either inline or as file paths (resolved by
/// the caller), plus per-level component tables.
pub fn map_to_json(m: &PresheafMap) -> Result<Value> {
    let mut root = BTreeMap::new();
    root.insert("source".to_string(), presheaf_to_json(&m.source)?);
    root.insert("target".to_string(), presheaf_to_json(&m.target)?);
    let mut comps = BTreeMap::new();
    for (lvl, table) in m.name_tables() {
        let mut t = BTreeMap::new();
        for (k, v) in table {
            t.insert(k, json!(v));
        }
        comps.insert(lvl, sorted(t));
    }
    root.insert("components".to_string(), sorted(comps));
    Ok(sorted(root))
}

pub fn map_from_json(v: &Value, resolve: &dyn Fn(&str) -> Result<PresheafRef>) -> Result<PresheafMap> {
    let obj = v.as_object().ok_or_else(|| Error::Json("expected an object".into()))?;
    let load = |field: &str| -> Result<PresheafRef> {
        match obj.get(field) {
            Some(Value::String(path)) => resolve(path),
            Some(val) => presheaf_from_json(val),
            None => Err(Error::Json(format!("missing {field}"))),
        }
    };
    let source = load("source")?;
    let target = load("target")?;
    let comps = obj
        .get("components")
        .and_then(|c| c.as_object())
        .ok_or_else(|| Error::Json("missing components".into()))?;
    let mut tables: BTreeMap<Level, BTreeMap<String, String>> = BTreeMap::new();
    for (key, table) in comps {
        let lvl = Level::from_json_key(key).ok_or_else(|| Error::Json(format!("bad level {key}")))?;
        let mut t = BTreeMap::new();
        for (from, to) in table.as_object().ok_or_else(|| Error::Json("bad component".into()))? {
            t.insert(
                from.clone(),
                to.as_str().ok_or_else(|| Error::Json("bad image".into()))?.to_string(),
            );
        }
        tables.insert(lvl, t);
    }
    // marked components are reconstructed from the edge level
    if source.shape().is_marked() {
        let seconds: Vec<Option<u8>> = match source.dim().second {
            None => vec![None],
            Some(b) => (0..=b).map(Some).collect(),
        };
        for sec in seconds {
            let m_lvl = Level { main: MainLevel::Marked, second: sec };
            let e_lvl = Level { main: MainLevel::Ord(1), second: sec };
            let mut t = BTreeMap::new();
            for name in source.cells(m_lvl) {
                let img = tables
                    .get(&e_lvl)
                    .and_then(|tab| tab.get(name))
                    .ok_or_else(|| Error::Json(format!("no image for marked edge {name}")))?;
                // the image edge must itself be marked in the target
                if target.cell_index(m_lvl, img).is_none() {
                    return Err(Error::Json(format!("image {img} of marking {name} is unmarked")));
                }
                t.insert(name.clone(), img.clone());
            }
            tables.insert(m_lvl, t);
        }
    }
    PresheafMap::from_names(source, target, &tables).map_err(|e| Error::Json(e.to_string()))
}

pub fn category_to_json(c: &FiniteCategory) -> Value {
    let mut homs = BTreeMap::new();
    for (ai, a) in c.objects.iter().enumerate() {
        for (bi, b) in c.objects.iter().enumerate() {
            let ms: Vec<Value> = c
                .hom(ai, bi)
                .into_iter()
                .map(|m| json!(c.morphisms[m].name))
                .collect();
            if !ms.is_empty() {
                homs.insert(format!("{a},{b}"), Value::Array(ms));
            }
        }
    }
    let mut comp = BTreeMap::new();
    for (&(f, g), &h) in &c.comp {
        if c.morphisms[f].dst == c.morphisms[g].src {
            comp.insert(
                format!("{},{}", c.morphisms[f].name, c.morphisms[g].name),
                json!(c.morphisms[h].name),
            );
        }
    }
    let mut ids = BTreeMap::new();
    for (o, &i) in c.ids.iter().enumerate() {
        ids.insert(c.objects[o].clone(), json!(c.morphisms[i].name));
    }
    let mut root = BTreeMap::new();
    root.insert("objects".to_string(), Value::Array(c.objects.iter().map(|o| json!(o)).collect()));
    root.insert("homs".to_string(), sorted(homs));
    root.insert("comp".to_string(), sorted(comp));
    root.insert("ids".to_string(), sorted(ids));
    sorted(root)
}

pub fn category_from_json(v: &Value) -> Result<FiniteCategory> {
    let obj = v.as_object().ok_or_else(|| Error::Json("expected an object".into()))?;
    let objects: Vec<String> = obj
        .get("objects")
        .and_then(|o| o.as_array())
        .ok_or_else(|| Error::Json("missing objects".into()))?
        .iter()
        .map(|v| v.as_str().map(str::to_string))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Json("object names are strings".into()))?;
    let mut morphisms: Vec<Morphism> = Vec::new();
    let homs = obj
        .get("homs")
        .and_then(|h| h.as_object())
        .ok_or_else(|| Error::Json("missing homs".into()))?;
    for (key, ms) in homs {
        let (a, b) = key
            .split_once(',')
            .ok_or_else(|| Error::Json(format!("bad hom key {key}")))?;
        let src = objects
            .iter()
            .position(|o| o == a)
            .ok_or_else(|| Error::Json(format!("unknown object {a}")))?;
        let dst = objects
            .iter()
            .position(|o| o == b)
            .ok_or_else(|| Error::Json(format!("unknown object {b}")))?;
        for m in ms.as_array().ok_or_else(|| Error::Json("homs hold arrays".into()))? {
            morphisms.push(Morphism {
                name: m.as_str().ok_or_else(|| Error::Json("morphism names are strings".into()))?.to_string(),
                src,
                dst,
            });
        }
    }
    morphisms.sort_by(|a, b| a.name.cmp(&b.name));
    let mor_idx = |name: &str| -> Result<usize> {
        morphisms
            .iter()
            .position(|m| m.name == name)
            .ok_or_else(|| Error::Json(format!("unknown morphism {name}")))
    };
    let mut comp = BTreeMap::new();
    for (key, h) in obj
        .get("comp")
        .and_then(|c| c.as_object())
        .ok_or_else(|| Error::Json("missing comp".into()))?
    {
        let (f, g) = key
            .split_once(',')
            .ok_or_else(|| Error::Json(format!("bad comp key {key}")))?;
        comp.insert(
            (mor_idx(f)?, mor_idx(g)?),
            mor_idx(h.as_str().ok_or_else(|| Error::Json("bad composite".into()))?)?,
        );
    }
    let ids_obj = obj
        .get("ids")
        .and_then(|i| i.as_object())
        .ok_or_else(|| Error::Json("missing ids".into()))?;
    let mut ids = Vec::with_capacity(objects.len());
    for o in &objects {
        let id = ids_obj
            .get(o)
            .and_then(|v| v.as_str())
            .ok_or_else(|| Error::Json(format!("missing identity for {o}")))?;
        ids.push(mor_idx(id)?);
    }
    let c = FiniteCategory { objects, morphisms, comp, ids };
    c.validate()?;
    Ok(c)
}

/// Cat-valued functor file: the base, one fiber per object, and one
/// transition table per base morphism.
pub fn functor_to_json(f: &CatValuedFunctor) -> Value {
    let mut fibers = BTreeMap::new();
    for (o, fib) in f.base.objects.iter().zip(&f.fibers) {
        fibers.insert(o.clone(), category_to_json(fib));
    }
    let mut transitions = BTreeMap::new();
    for (m, (objs, mors)) in f.base.morphisms.iter().zip(&f.transitions) {
        let fiber_src = &f.fibers[m.dst];
        let fiber_dst = &f.fibers[m.src];
        let mut o_table = BTreeMap::new();
        for (x, &fx) in objs.iter().enumerate() {
            o_table.insert(fiber_src.objects[x].clone(), json!(fiber_dst.objects[fx]));
        }
        let mut m_table = BTreeMap::new();
        for (x, &fx) in mors.iter().enumerate() {
            m_table.insert(
                fiber_src.morphisms[x].name.clone(),
                json!(fiber_dst.morphisms[fx].name),
            );
        }
        let mut t = BTreeMap::new();
        t.insert("objects".to_string(), sorted(o_table));
        t.insert("morphisms".to_string(), sorted(m_table));
        transitions.insert(m.name.clone(), sorted(t));
    }
    let mut root = BTreeMap::new();
    root.insert("base".to_string(), category_to_json(&f.base));
    root.insert("fibers".to_string(), sorted(fibers));
    root.insert("transitions".to_string(), sorted(transitions));
    sorted(root)
}

pub fn functor_from_json(v: &Value) -> Result<CatValuedFunctor> {
    let obj = v.as_object().ok_or_else(|| Error::Json("expected an object".into()))?;
    let base = category_from_json(obj.get("base").ok_or_else(|| Error::Json("missing base".into()))?)?;
    let fibers_obj = obj
        .get("fibers")
        .and_then(|f| f.as_object())
        .ok_or_else(|| Error::Json("missing fibers".into()))?;
    let mut fibers = Vec::with_capacity(base.objects.len());
    for o in &base.objects {
        fibers.push(category_from_json(
            fibers_obj.get(o).ok_or_else(|| Error::Json(format!("missing fiber for {o}")))?,
        )?);
    }
    let transitions_obj = obj
        .get("transitions")
        .and_then(|t| t.as_object())
        .ok_or_else(|| Error::Json("missing transitions".into()))?;
    let mut transitions = Vec::with_capacity(base.morphisms.len());
    for m in &base.morphisms {
        let t = transitions_obj
            .get(&m.name)
            .and_then(|t| t.as_object())
            .ok_or_else(|| Error::Json(format!("missing transition for {}", m.name)))?;
        let fiber_src = &fibers[m.dst];
        let fiber_dst = &fibers[m.src];
        let o_table = t
            .get("objects")
            .and_then(|o| o.as_object())
            .ok_or_else(|| Error::Json("missing transition objects".into()))?;
        let mut objs = Vec::with_capacity(fiber_src.objects.len());
        for x in &fiber_src.objects {
            let img = o_table
                .get(x)
                .and_then(|v| v.as_str())
                .ok_or_else(|| Error::Json(format!("missing image of object {x}")))?;
            objs.push(
                fiber_dst
                    .objects
                    .iter()
                    .position(|o| o == img)
                    .ok_or_else(|| Error::Json(format!("unknown image object {img}")))?,
            );
        }
        let m_table = t
            .get("morphisms")
            .and_then(|o| o.as_object())
            .ok_or_else(|| Error::Json("missing transition morphisms".into()))?;
        let mut mors = Vec::with_capacity(fiber_src.morphisms.len());
        for x in &fiber_src.morphisms {
            let img = m_table
                .get(&x.name)
                .and_then(|v| v.as_str())
                .ok_or_else(|| Error::Json(format!("missing image of morphism {}", x.name)))?;
            mors.push(
                fiber_dst
                    .morphisms
                    .iter()
                    .position(|m2| m2.name == img)
                    .ok_or_else(|| Error::Json(format!("unknown image morphism {img}")))?,
            );
        }
        transitions.push((objs, mors));
    }
    let fv = CatValuedFunctor { base, fibers, transitions };
    fv.validate()?;
    Ok(fv)
}

pub fn to_canonical_string(v: &Value) -> String {
    serde_json::to_string(v).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standard::{build_ref, StandardObjectSpec as Spec};

    #[test]
    fn presheaf_round_trip_is_byte_identical() {
        for p in [
            build_ref(&Spec::Simplex(2), Dim::simplicial(2)).unwrap(),
            build_ref(&Spec::GroupoidNerve(1), Dim::simplicial(3)).unwrap(),
            build_ref(&Spec::FGen(1), Dim::bisimplicial(2, 2)).unwrap(),
            build_ref(&Spec::SharpSimplex(1), Dim::simplicial(2)).unwrap(),
        ] {
            let s1 = presheaf_to_string(&p).unwrap();
            let q = presheaf_from_str(&s1).unwrap();
            let s2 = presheaf_to_string(&q).unwrap();
            assert_eq!(s1, s2);
            assert_eq!(*p, *q);
        }
    }

    #[test]
    fn category_round_trip() {
        let c = crate::cat::FiniteCategory::poset(2);
        let v = category_to_json(&c);
        let c2 = category_from_json(&v).unwrap();
        assert_eq!(category_to_json(&c2), v);
    }

    #[test]
    fn map_round_trip() {
        let d1 = build_ref(&Spec::Simplex(1), Dim::simplicial(2)).unwrap();
        let d2 = build_ref(&Spec::Simplex(2), Dim::simplicial(2)).unwrap();
        let m = crate::standard::simplex_induced_map_into(&[0, 2], 2, Dim::simplicial(2)).unwrap();
        let _ = (&d1, &d2);
        let v = map_to_json(&m).unwrap();
        let resolver = |_: &str| -> crate::error::Result<PresheafRef> {
            Err(Error::Json("no paths in tests".into()))
        };
        let m2 = map_from_json(&v, &resolver).unwrap();
        assert_eq!(m.components, m2.components);
    }
}
