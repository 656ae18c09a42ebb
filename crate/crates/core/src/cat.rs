//! Finite categories with exhaustively validated composition tables, their
//! nerves, Grothendieck constructions and classification diagrams. These are
//! the independent oracles for the fibration and Cartesian-edge checkers:
//! everything here is computed from the tables, never through the presheaf
//! machinery it is meant to check.

use crate::delta;
use crate::error::{Error, Result};
use crate::map::PresheafMap;
use crate::presheaf::{PresheafBuilder, PresheafRef};
use crate::shape::{Dim, Generator, IndexShape, Level};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    pub name: String,
    pub src: usize,
    pub dst: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteCategory {
    pub objects: Vec<String>,
    pub morphisms: Vec<Morphism>,
    /// `comp[(f, g)] = g ∘ f` for composable `f: a -> b`, `g: b -> c`.
    pub comp: BTreeMap<(usize, usize), usize>,
    /// Identity morphism per object.
    pub ids: Vec<usize>,
}

impl FiniteCategory {
    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn morphism_index(&self, name: &str) -> Option<usize> {
        self.morphisms.iter().position(|m| m.name == name)
    }

    pub fn compose(&self, f: usize, g: usize) -> usize {
        self.comp[&(f, g)]
    }

    pub fn hom(&self, a: usize, b: usize) -> Vec<usize> {
        (0..self.morphisms.len())
            .filter(|&m| self.morphisms[m].src == a && self.morphisms[m].dst == b)
            .collect()
    }

    pub fn is_identity(&self, f: usize) -> bool {
        self.ids.contains(&f)
    }

    pub fn is_iso(&self, f: usize) -> bool {
        let m = &self.morphisms[f];
        self.hom(m.dst, m.src).iter().any(|&g| {
            self.compose(f, g) == self.ids[m.src] && self.compose(g, f) == self.ids[m.dst]
        })
    }

    pub fn isos(&self) -> Vec<usize> {
        (0..self.morphisms.len()).filter(|&f| self.is_iso(f)).collect()
    }

    pub fn is_groupoid(&self) -> bool {
        (0..self.morphisms.len()).all(|f| self.is_iso(f))
    }

    /// No non-identity isomorphisms; classification diagrams of such
    /// categories are levelwise discrete.
    pub fn is_gaunt(&self) -> bool {
        (0..self.morphisms.len()).all(|f| !self.is_iso(f) || self.is_identity(f))
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.morphisms.len();
        if self.ids.len() != self.objects.len() {
            return Err(Error::InvalidCategory("one identity per object".into()));
        }
        for (o, &i) in self.ids.iter().enumerate() {
            if self.morphisms[i].src != o || self.morphisms[i].dst != o {
                return Err(Error::InvalidCategory(format!(
                    "identity of {} has wrong endpoints",
                    self.objects[o]
                )));
            }
        }
        for f in 0..n {
            for g in 0..n {
                let composable = self.morphisms[f].dst == self.morphisms[g].src;
                match self.comp.get(&(f, g)) {
                    Some(&h) if composable => {
                        if self.morphisms[h].src != self.morphisms[f].src
                            || self.morphisms[h].dst != self.morphisms[g].dst
                        {
                            return Err(Error::InvalidCategory(format!(
                                "composite of {} and {} has wrong endpoints",
                                self.morphisms[f].name, self.morphisms[g].name
                            )));
                        }
                    }
                    Some(_) => {
                        return Err(Error::InvalidCategory(format!(
                            "non-composable pair ({}, {}) in the table",
                            self.morphisms[f].name, self.morphisms[g].name
                        )))
                    }
                    None if composable => {
                        return Err(Error::InvalidCategory(format!(
                            "missing composite of {} and {}",
                            self.morphisms[f].name, self.morphisms[g].name
                        )))
                    }
                    None => {}
                }
            }
        }
        for f in 0..n {
            let m = &self.morphisms[f];
            if self.compose(self.ids[m.src], f) != f || self.compose(f, self.ids[m.dst]) != f {
                return Err(Error::InvalidCategory(format!("unit law fails at {}", m.name)));
            }
        }
        for f in 0..n {
            for g in 0..n {
                for h in 0..n {
                    if self.morphisms[f].dst == self.morphisms[g].src
                        && self.morphisms[g].dst == self.morphisms[h].src
                    {
                        let left = self.compose(self.compose(f, g), h);
                        let right = self.compose(f, self.compose(g, h));
                        if left != right {
                            return Err(Error::InvalidCategory(format!(
                                "associativity fails at ({}, {}, {})",
                                self.morphisms[f].name,
                                self.morphisms[g].name,
                                self.morphisms[h].name
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The poset category `[n]`.
    pub fn poset(n: u8) -> FiniteCategory {
        let objects: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
        let mut morphisms = Vec::new();
        for a in 0..=n {
            for b in a..=n {
                morphisms.push(Morphism {
                    name: format!("{a}{b}"),
                    src: a as usize,
                    dst: b as usize,
                });
            }
        }
        let idx = |a: u8, b: u8| -> usize {
            morphisms
                .iter()
                .position(|m| m.src == a as usize && m.dst == b as usize)
                .unwrap()
        };
        let mut comp = BTreeMap::new();
        for a in 0..=n {
            for b in a..=n {
                for c in b..=n {
                    comp.insert((idx(a, b), idx(b, c)), idx(a, c));
                }
            }
        }
        let ids = (0..=n).map(|a| idx(a, a)).collect();
        FiniteCategory { objects, morphisms, comp, ids }
    }

    /// The chaotic groupoid on `l + 1` objects: a unique morphism between
    /// any ordered pair.
    pub fn chaotic_groupoid(l: u8) -> FiniteCategory {
        let objects: Vec<String> = (0..=l).map(|i| i.to_string()).collect();
        let mut morphisms = Vec::new();
        for a in 0..=l {
            for b in 0..=l {
                morphisms.push(Morphism {
                    name: format!("{a}{b}"),
                    src: a as usize,
                    dst: b as usize,
                });
            }
        }
        let idx = |a: u8, b: u8| (a as usize) * (l as usize + 1) + b as usize;
        let mut comp = BTreeMap::new();
        for a in 0..=l {
            for b in 0..=l {
                for c in 0..=l {
                    comp.insert((idx(a, b), idx(b, c)), idx(a, c));
                }
            }
        }
        let ids = (0..=l).map(|a| idx(a, a)).collect();
        FiniteCategory { objects, morphisms, comp, ids }
    }

    /// Two-object discrete category extended by a pair of mutually inverse
    /// arrows; handy as a non-gaunt test groupoid.
    pub fn two_object_groupoid() -> FiniteCategory {
        FiniteCategory::chaotic_groupoid(1)
    }

    /// Product category `self × other`.
    pub fn product(&self, other: &FiniteCategory) -> FiniteCategory {
        let mut objects = Vec::new();
        for a in &self.objects {
            for b in &other.objects {
                objects.push(format!("({a}|{b})"));
            }
        }
        let o_idx = |a: usize, b: usize| a * other.objects.len() + b;
        let mut morphisms = Vec::new();
        for (fi, f) in self.morphisms.iter().enumerate() {
            for (gi, g) in other.morphisms.iter().enumerate() {
                let _ = (fi, gi);
                morphisms.push(Morphism {
                    name: format!("({}|{})", f.name, g.name),
                    src: o_idx(f.src, g.src),
                    dst: o_idx(f.dst, g.dst),
                });
            }
        }
        let m_idx = |f: usize, g: usize| f * other.morphisms.len() + g;
        let mut comp = BTreeMap::new();
        for (fi, f) in self.morphisms.iter().enumerate() {
            for (gi, g) in other.morphisms.iter().enumerate() {
                for (fj, f2) in self.morphisms.iter().enumerate() {
                    for (gj, g2) in other.morphisms.iter().enumerate() {
                        if f.dst == f2.src && g.dst == g2.src {
                            comp.insert(
                                (m_idx(fi, gi), m_idx(fj, gj)),
                                m_idx(self.compose(fi, fj), other.compose(gi, gj)),
                            );
                        }
                    }
                }
            }
        }
        let ids = (0..objects.len())
            .map(|o| {
                let (a, b) = (o / other.objects.len(), o % other.objects.len());
                m_idx(self.ids[a], other.ids[b])
            })
            .collect();
        FiniteCategory { objects, morphisms, comp, ids }
    }

    /// Composable chains of length `k` (identities allowed).
    pub fn chains(&self, k: u8) -> Vec<Vec<usize>> {
        if k == 0 {
            return self.objects.iter().enumerate().map(|_| Vec::new()).collect();
        }
        let mut out: Vec<Vec<usize>> = self
            .morphisms
            .iter()
            .enumerate()
            .map(|(i, _)| vec![i])
            .collect();
        for _ in 1..k {
            let mut next = Vec::new();
            for chain in &out {
                let last = *chain.last().unwrap();
                for (g, m) in self.morphisms.iter().enumerate() {
                    if m.src == self.morphisms[last].dst {
                        let mut c = chain.clone();
                        c.push(g);
                        next.push(c);
                    }
                }
            }
            out = next;
        }
        out
    }
}

/// A functor between finite categories; `contravariant` reverses arrows.
#[derive(Debug, Clone)]
pub struct CatFunctor {
    pub source: FiniteCategory,
    pub target: FiniteCategory,
    pub on_objects: Vec<usize>,
    pub on_morphisms: Vec<usize>,
    pub contravariant: bool,
}

impl CatFunctor {
    pub fn validate(&self) -> Result<()> {
        for (f, m) in self.source.morphisms.iter().enumerate() {
            let fm = &self.target.morphisms[self.on_morphisms[f]];
            let (want_src, want_dst) = if self.contravariant {
                (self.on_objects[m.dst], self.on_objects[m.src])
            } else {
                (self.on_objects[m.src], self.on_objects[m.dst])
            };
            if fm.src != want_src || fm.dst != want_dst {
                return Err(Error::InvalidFunctor(format!("endpoints wrong at {}", m.name)));
            }
        }
        for (o, &i) in self.source.ids.iter().enumerate() {
            if self.on_morphisms[i] != self.target.ids[self.on_objects[o]] {
                return Err(Error::InvalidFunctor(format!(
                    "identity of {} not preserved",
                    self.source.objects[o]
                )));
            }
        }
        for f in 0..self.source.morphisms.len() {
            for g in 0..self.source.morphisms.len() {
                if self.source.morphisms[f].dst == self.source.morphisms[g].src {
                    let lhs = self.on_morphisms[self.source.compose(f, g)];
                    let rhs = if self.contravariant {
                        self.target.compose(self.on_morphisms[g], self.on_morphisms[f])
                    } else {
                        self.target.compose(self.on_morphisms[f], self.on_morphisms[g])
                    };
                    if lhs != rhs {
                        return Err(Error::InvalidFunctor(format!(
                            "composition not preserved at ({}, {})",
                            self.source.morphisms[f].name, self.source.morphisms[g].name
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Nerve of a validated category: k-cells are composable k-chains, named by
/// the chain of morphism names. Carries certificate 2.
pub fn nerve(c: &FiniteCategory, dim: Dim) -> Result<PresheafRef> {
    c.validate()?;
    if dim.second.is_some() {
        return Err(Error::IllegalParameters("nerve is simplicial".into()));
    }
    let chain_name = |chain: &[usize]| -> String {
        chain
            .iter()
            .map(|&f| c.morphisms[f].name.clone())
            .collect::<Vec<_>>()
            .join("|")
    };
    let mut b = PresheafBuilder::new(IndexShape::Simplex, dim);
    let mut by_level: BTreeMap<u8, Vec<Vec<usize>>> = BTreeMap::new();
    for k in 0..=dim.main {
        let cells: Vec<Vec<usize>> = if k == 0 {
            c.objects.iter().enumerate().map(|(i, _)| vec![usize::MAX, i]).collect()
        } else {
            c.chains(k)
        };
        by_level.insert(k, cells);
    }
    let cell_name = |k: u8, chain: &[usize]| -> String {
        if k == 0 {
            c.objects[chain[1]].clone()
        } else {
            chain_name(chain)
        }
    };
    // face of a chain: drop an outer arrow or compose at an inner vertex
    let face = |chain: &[usize], i: u8| -> Vec<usize> {
        let k = chain.len();
        if i == 0 {
            chain[1..].to_vec()
        } else if (i as usize) == k {
            chain[..k - 1].to_vec()
        } else {
            let mut out = Vec::with_capacity(k - 1);
            out.extend_from_slice(&chain[..i as usize - 1]);
            out.push(c.compose(chain[i as usize - 1], chain[i as usize]));
            out.extend_from_slice(&chain[i as usize + 1..]);
            out
        }
    };
    let degen = |chain: &[usize], i: u8, k: u8| -> Vec<usize> {
        let mut out = Vec::with_capacity(chain.len() + 1);
        let obj = if i == 0 {
            if k == 0 {
                chain[1]
            } else {
                c.morphisms[chain[0]].src
            }
        } else if k == 0 {
            chain[1]
        } else {
            c.morphisms[chain[i as usize - 1]].dst
        };
        if k == 0 {
            out.push(c.ids[obj]);
        } else {
            out.extend_from_slice(&chain[..i as usize]);
            out.push(c.ids[obj]);
            out.extend_from_slice(&chain[i as usize..]);
        }
        out
    };
    for (&k, cells) in &by_level {
        for chain in cells {
            b.cell(Level::ord(k), cell_name(k, chain));
        }
        for chain in cells {
            let name = cell_name(k, chain);
            for i in 0..=k {
                if k >= 1 {
                    let f = face(chain, i);
                    let fname = if k == 1 {
                        let obj = if i == 0 {
                            c.morphisms[chain[0]].dst
                        } else {
                            c.morphisms[chain[0]].src
                        };
                        c.objects[obj].clone()
                    } else {
                        cell_name(k - 1, &f)
                    };
                    b.map(Level::ord(k), Generator::FaceMain(i), name.clone(), fname);
                }
                if k + 1 <= dim.main {
                    let s = degen(chain, i, k);
                    b.map(
                        Level::ord(k),
                        Generator::DegenMain(i),
                        name.clone(),
                        cell_name(k + 1, &s),
                    );
                }
            }
        }
    }
    let p = b.build()?;
    Ok(Arc::new(p.with_certificate(2)?))
}

/// Marked nerve: the nerve with the isomorphisms marked.
pub fn marked_nerve(c: &FiniteCategory, dim: Dim) -> Result<PresheafRef> {
    let plain = nerve(c, dim)?;
    let marked: Vec<String> = c
        .isos()
        .into_iter()
        .map(|f| c.morphisms[f].name.clone())
        .collect();
    crate::marked::with_markings(&plain, &marked)
}

/// A strict contravariant Cat-valued functor on a finite base.
#[derive(Debug, Clone)]
pub struct CatValuedFunctor {
    pub base: FiniteCategory,
    pub fibers: Vec<FiniteCategory>,
    /// For each base morphism `f: a -> b`, a functor `fibers[b] -> fibers[a]`
    /// given by object and morphism tables.
    pub transitions: Vec<(Vec<usize>, Vec<usize>)>,
}

impl CatValuedFunctor {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.fibers.len() != self.base.objects.len() {
            return Err(Error::InvalidFunctor("one fiber per base object".into()));
        }
        for fib in &self.fibers {
            fib.validate()?;
        }
        if self.transitions.len() != self.base.morphisms.len() {
            return Err(Error::InvalidFunctor("one transition per base morphism".into()));
        }
        for (f, m) in self.base.morphisms.iter().enumerate() {
            let functor = CatFunctor {
                source: self.fibers[m.dst].clone(),
                target: self.fibers[m.src].clone(),
                on_objects: self.transitions[f].0.clone(),
                on_morphisms: self.transitions[f].1.clone(),
                contravariant: false,
            };
            functor.validate().map_err(|e| {
                Error::InvalidFunctor(format!("transition along {}: {e}", m.name))
            })?;
        }
        // identities act as identities, composites compose contravariantly
        for (o, &i) in self.base.ids.iter().enumerate() {
            let (obj_t, mor_t) = &self.transitions[i];
            let fib = &self.fibers[o];
            if obj_t.iter().enumerate().any(|(a, &b)| a != b)
                || mor_t.iter().enumerate().any(|(a, &b)| a != b)
            {
                let _ = fib;
                return Err(Error::InvalidFunctor(format!(
                    "transition along id_{} is not the identity",
                    self.base.objects[o]
                )));
            }
        }
        for f in 0..self.base.morphisms.len() {
            for g in 0..self.base.morphisms.len() {
                if self.base.morphisms[f].dst == self.base.morphisms[g].src {
                    let h = self.base.compose(f, g);
                    let fib_c = &self.fibers[self.base.morphisms[g].dst];
                    for x in 0..fib_c.objects.len() {
                        if self.transitions[f].0[self.transitions[g].0[x]]
                            != self.transitions[h].0[x]
                        {
                            return Err(Error::InvalidFunctor("transitions do not compose".into()));
                        }
                    }
                    for x in 0..fib_c.morphisms.len() {
                        if self.transitions[f].1[self.transitions[g].1[x]]
                            != self.transitions[h].1[x]
                        {
                            return Err(Error::InvalidFunctor("transitions do not compose".into()));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn transition_obj(&self, f: usize, x: usize) -> usize {
        self.transitions[f].0[x]
    }

    pub fn transition_mor(&self, f: usize, phi: usize) -> usize {
        self.transitions[f].1[phi]
    }
}

pub struct Grothendieck {
    pub total: FiniteCategory,
    /// Projection to the base, as object and morphism tables.
    pub proj_objects: Vec<usize>,
    pub proj_morphisms: Vec<usize>,
    /// For each total morphism, its base part and fiber part.
    pub parts: Vec<(usize, usize)>,
}

/// Total category of a contravariant Cat-valued functor: objects are pairs
/// `(c, x ∈ F(c))`, morphisms `(c,x) -> (d,y)` are pairs `(f: c -> d,
/// φ: x -> F(f)(y))` with the fiber part living in the source fiber.
pub fn grothendieck(fv: &CatValuedFunctor) -> Result<Grothendieck> {
    fv.validate()?;
    let base = &fv.base;
    let mut objects = Vec::new();
    let mut obj_pairs = Vec::new();
    for (c, fib) in fv.fibers.iter().enumerate() {
        for (x, xn) in fib.objects.iter().enumerate() {
            objects.push(format!("{}.{}", base.objects[c], xn));
            obj_pairs.push((c, x));
        }
    }
    let obj_idx = |c: usize, x: usize| obj_pairs.iter().position(|&p| p == (c, x)).unwrap();
    let mut morphisms = Vec::new();
    let mut mor_pairs: Vec<(usize, usize)> = Vec::new();
    for (f, fm) in base.morphisms.iter().enumerate() {
        let (c, d) = (fm.src, fm.dst);
        for y in 0..fv.fibers[d].objects.len() {
            let fy = fv.transition_obj(f, y);
            for x in 0..fv.fibers[c].objects.len() {
                for &phi in &fv.fibers[c].hom(x, fy) {
                    morphisms.push(Morphism {
                        name: format!("{}.{}", fm.name, fv.fibers[c].morphisms[phi].name),
                        src: obj_idx(c, x),
                        dst: obj_idx(d, y),
                    });
                    mor_pairs.push((f, phi));
                }
            }
        }
    }
    let mor_idx = |f: usize, phi: usize, src: usize, dst: usize| {
        morphisms
            .iter()
            .zip(&mor_pairs)
            .position(|(m, &(bf, bphi))| bf == f && bphi == phi && m.src == src && m.dst == dst)
            .unwrap()
    };
    let mut comp = BTreeMap::new();
    for (i, m1) in morphisms.iter().enumerate() {
        for (j, m2) in morphisms.iter().enumerate() {
            if m1.dst != m2.src {
                continue;
            }
            let (f, phi) = mor_pairs[i];
            let (g, psi) = mor_pairs[j];
            let h = base.compose(f, g);
            // φ: x -> F(f)(y), ψ: y -> F(g)(z); composite fiber part is
            // F(f)(ψ) ∘ φ : x -> F(gf)(z)
            let c = base.morphisms[f].src;
            let pulled = fv.transition_mor(f, psi);
            let chi = fv.fibers[c].compose(phi, pulled);
            comp.insert((i, j), mor_idx(h, chi, m1.src, m2.dst));
        }
    }
    let ids = (0..objects.len())
        .map(|o| {
            let (c, x) = obj_pairs[o];
            mor_idx(base.ids[c], fv.fibers[c].ids[x], o, o)
        })
        .collect();
    let total = FiniteCategory { objects, morphisms, comp, ids };
    total.validate()?;
    let proj_objects = obj_pairs.iter().map(|&(c, _)| c).collect();
    let proj_morphisms = mor_pairs.iter().map(|&(f, _)| f).collect();
    Ok(Grothendieck { total, proj_objects, proj_morphisms, parts: mor_pairs })
}

/// Classical Cartesian morphisms of the projection: pairs whose fiber part
/// is invertible in its fiber.
pub fn classical_cartesian_edges(fv: &CatValuedFunctor, g: &Grothendieck) -> Vec<usize> {
    (0..g.total.morphisms.len())
        .filter(|&i| {
            let (f, phi) = g.parts[i];
            let c = fv.base.morphisms[f].src;
            fv.fibers[c].is_iso(phi)
        })
        .collect()
}

/// Nerve of a strict covariant functor: the induced map of nerves, matched
/// through the chain naming scheme.
pub fn nerve_functor_map(f: &CatFunctor, dim: Dim) -> Result<PresheafMap> {
    if f.contravariant {
        return Err(Error::Unsupported("nerve of a contravariant functor".into()));
    }
    f.validate()?;
    let src = nerve(&f.source, dim)?;
    let tgt = nerve(&f.target, dim)?;
    let mut components = BTreeMap::new();
    for lvl in src.levels() {
        let k = match lvl.main {
            crate::shape::MainLevel::Ord(k) => k,
            _ => unreachable!(),
        };
        let mut comp = Vec::with_capacity(src.cell_count(lvl));
        for name in src.cells(lvl) {
            let image = if k == 0 {
                let o = f.source.object_index(name).unwrap();
                f.target.objects[f.on_objects[o]].clone()
            } else {
                name.split('|')
                    .map(|mn| {
                        let m = f.source.morphism_index(mn).unwrap();
                        f.target.morphisms[f.on_morphisms[m]].name.clone()
                    })
                    .collect::<Vec<_>>()
                    .join("|")
            };
            let idx = tgt
                .cell_index(lvl, &image)
                .ok_or_else(|| Error::InvalidMap(format!("projected chain {image} missing")))?;
            comp.push(idx);
        }
        components.insert(lvl, comp);
    }
    PresheafMap::new(src, tgt, components)
}

/// Nerve of the Grothendieck projection: `N(total) -> N(base)`.
pub fn nerve_of_projection(fv: &CatValuedFunctor, g: &Grothendieck, dim: Dim) -> Result<PresheafMap> {
    let proj = CatFunctor {
        source: g.total.clone(),
        target: fv.base.clone(),
        on_objects: g.proj_objects.clone(),
        on_morphisms: g.proj_morphisms.clone(),
        contravariant: false,
    };
    nerve_functor_map(&proj, dim)
}

/// A functor `[n] × I[m] -> C` in grid form: the object grid, the row
/// chains (n arrows per row), and the vertical isomorphism layers (n+1
/// arrows per layer).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct Grid {
    objs: Vec<Vec<usize>>,
    rows: Vec<Vec<usize>>,
    verts: Vec<Vec<usize>>,
}

impl Grid {
    fn name(&self, c: &FiniteCategory) -> String {
        let rows: Vec<String> = self
            .objs
            .iter()
            .zip(&self.rows)
            .map(|(objs, row)| {
                if row.is_empty() {
                    c.objects[objs[0]].clone()
                } else {
                    row.iter().map(|&f| c.morphisms[f].name.clone()).collect::<Vec<_>>().join("|")
                }
            })
            .collect();
        let verts: Vec<String> = self
            .verts
            .iter()
            .map(|vs| vs.iter().map(|&f| c.morphisms[f].name.clone()).collect::<Vec<_>>().join("|"))
            .collect();
        if verts.is_empty() {
            rows.join(";")
        } else {
            format!("{}#{}", rows.join(";"), verts.join(";"))
        }
    }

    fn reindex_main(&self, c: &FiniteCategory, f: &[u8]) -> Grid {
        // precompose the column direction with a monotone map into [n]
        let objs: Vec<Vec<usize>> = self
            .objs
            .iter()
            .map(|row| f.iter().map(|&i| row[i as usize]).collect())
            .collect();
        let rows: Vec<Vec<usize>> = self
            .objs
            .iter()
            .zip(&self.rows)
            .map(|(orow, row)| reindex_chain(c, orow, row, f))
            .collect();
        let verts: Vec<Vec<usize>> = self
            .verts
            .iter()
            .map(|vs| f.iter().map(|&i| vs[i as usize]).collect())
            .collect();
        Grid { objs, rows, verts }
    }

    fn reindex_second(&self, c: &FiniteCategory, f: &[u8]) -> Grid {
        // precompose the row direction with a monotone map into [m]; the
        // new vertical layer from row f(j) to f(j+1) is the composite of the
        // layers in between (all isomorphisms, so any span composes)
        let objs: Vec<Vec<usize>> = f.iter().map(|&j| self.objs[j as usize].clone()).collect();
        let rows: Vec<Vec<usize>> = f.iter().map(|&j| self.rows[j as usize].clone()).collect();
        let mut verts = Vec::new();
        for w in f.windows(2) {
            let (a, b) = (w[0] as usize, w[1] as usize);
            let width = self.objs[0].len();
            let layer: Vec<usize> = (0..width)
                .map(|i| {
                    let mut acc = c.ids[self.objs[a][i]];
                    for j in a..b {
                        acc = c.compose(acc, self.verts[j][i]);
                    }
                    acc
                })
                .collect();
            verts.push(layer);
        }
        Grid { objs, rows, verts }
    }
}

fn reindex_chain(c: &FiniteCategory, objs: &[usize], row: &[usize], f: &[u8]) -> Vec<usize> {
    // chain arrows of the reindexed row: composite from position f(i) to f(i+1)
    f.windows(2)
        .map(|w| {
            let (a, b) = (w[0] as usize, w[1] as usize);
            let mut acc = c.ids[objs[a]];
            for i in a..b {
                acc = c.compose(acc, row[i]);
            }
            acc
        })
        .collect()
}

fn chain_objects(c: &FiniteCategory, chain: &[usize], start: usize) -> Vec<usize> {
    if chain.is_empty() {
        vec![start]
    } else {
        let mut objs = vec![c.morphisms[chain[0]].src];
        for &f in chain {
            objs.push(c.morphisms[f].dst);
        }
        objs
    }
}

fn inverse_of(c: &FiniteCategory, f: usize) -> usize {
    let m = &c.morphisms[f];
    c.hom(m.dst, m.src)
        .into_iter()
        .find(|&g| c.compose(f, g) == c.ids[m.src] && c.compose(g, f) == c.ids[m.dst])
        .expect("isomorphism has an inverse")
}

/// Classification diagram of a category: level `(n, m)` is the set of
/// functors `[n] × I[m] -> C`, i.e. length-n chains together with m layers
/// of object-wise isomorphisms. Columns and rows are nerves, so the object
/// carries certificate 2.
pub fn classification_diagram(c: &FiniteCategory, dim: Dim) -> Result<PresheafRef> {
    c.validate()?;
    let d2 = dim
        .second
        .ok_or_else(|| Error::IllegalParameters("classification diagram is bisimplicial".into()))?;
    let isos_from: Vec<Vec<usize>> = (0..c.objects.len())
        .map(|o| c.isos().into_iter().filter(|&f| c.morphisms[f].src == o).collect())
        .collect();
    let mut cells: BTreeMap<Level, Vec<Grid>> = BTreeMap::new();
    for n in 0..=dim.main {
        let base: Vec<(Vec<usize>, Vec<usize>)> = if n == 0 {
            (0..c.objects.len()).map(|o| (vec![o], Vec::new())).collect()
        } else {
            c.chains(n)
                .into_iter()
                .map(|ch| {
                    let objs = chain_objects(c, &ch, 0);
                    (objs, ch)
                })
                .collect()
        };
        for m in 0..=d2 {
            let mut stack: Vec<Grid> = base
                .iter()
                .map(|(objs, row)| Grid {
                    objs: vec![objs.clone()],
                    rows: vec![row.clone()],
                    verts: Vec::new(),
                })
                .collect();
            for _ in 0..m {
                let mut next = Vec::new();
                for grid in &stack {
                    let last_objs = grid.objs.last().unwrap().clone();
                    let last_row = grid.rows.last().unwrap().clone();
                    let mut choices: Vec<Vec<usize>> = vec![Vec::new()];
                    for &o in &last_objs {
                        let mut grown = Vec::new();
                        for ch in &choices {
                            for &u in &isos_from[o] {
                                let mut c2 = ch.clone();
                                c2.push(u);
                                grown.push(c2);
                            }
                        }
                        choices = grown;
                    }
                    for vert in choices {
                        let new_objs: Vec<usize> =
                            vert.iter().map(|&u| c.morphisms[u].dst).collect();
                        let new_row: Vec<usize> = (0..last_row.len())
                            .map(|i| {
                                let back = inverse_of(c, vert[i]);
                                c.compose(c.compose(back, last_row[i]), vert[i + 1])
                            })
                            .collect();
                        let mut g2 = grid.clone();
                        g2.objs.push(new_objs);
                        g2.rows.push(new_row);
                        g2.verts.push(vert);
                        next.push(g2);
                    }
                }
                stack = next;
            }
            stack.sort();
            cells.insert(Level::bi(n, m), stack);
        }
    }
    let mut b = PresheafBuilder::new(IndexShape::BiSimplex, dim);
    for (&lvl, lc) in &cells {
        for grid in lc {
            b.cell(lvl, grid.name(c));
        }
    }
    for (&lvl, lc) in &cells {
        let (n, m) = match (lvl.main, lvl.second) {
            (crate::shape::MainLevel::Ord(n), Some(m)) => (n, m),
            _ => unreachable!(),
        };
        for grid in lc {
            let name = grid.name(c);
            for (g, _tgt) in crate::shape::generators_from(IndexShape::BiSimplex, dim, lvl) {
                let image = match g {
                    Generator::FaceMain(i) => grid.reindex_main(c, &delta::coface(n, i)),
                    Generator::DegenMain(i) => grid.reindex_main(c, &delta::codegeneracy(n, i)),
                    Generator::FaceSecond(i) => grid.reindex_second(c, &delta::coface(m, i)),
                    Generator::DegenSecond(i) => grid.reindex_second(c, &delta::codegeneracy(m, i)),
                    _ => unreachable!(),
                };
                b.map(lvl, g, name.clone(), image.name(c));
            }
        }
    }
    let p = b.build()?;
    Ok(Arc::new(p.with_certificate(2)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poset_and_groupoid_validate() {
        FiniteCategory::poset(2).validate().unwrap();
        FiniteCategory::chaotic_groupoid(2).validate().unwrap();
        assert!(FiniteCategory::chaotic_groupoid(1).is_groupoid());
        assert!(!FiniteCategory::poset(1).is_groupoid());
        assert!(FiniteCategory::poset(3).is_gaunt());
        assert!(!FiniteCategory::chaotic_groupoid(1).is_gaunt());
    }

    #[test]
    fn nerve_of_poset_is_simplex() {
        let n2 = nerve(&FiniteCategory::poset(2), Dim::simplicial(3)).unwrap();
        let d2 = crate::standard::build_ref(
            &crate::standard::StandardObjectSpec::Simplex(2),
            Dim::simplicial(3),
        )
        .unwrap();
        assert!(crate::map::isomorphic(&n2, &d2).unwrap());
    }

    #[test]
    fn nerve_of_chaotic_groupoid_is_groupoid_nerve() {
        let j1 = nerve(&FiniteCategory::chaotic_groupoid(1), Dim::simplicial(3)).unwrap();
        let j1_std = crate::standard::build_ref(
            &crate::standard::StandardObjectSpec::GroupoidNerve(1),
            Dim::simplicial(3),
        )
        .unwrap();
        assert!(crate::map::isomorphic(&j1, &j1_std).unwrap());
    }
}
