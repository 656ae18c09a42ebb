//! The four index shapes and their truncated level lattices.
//!
//! A shape names the base category a presheaf lives over: the simplex
//! category, its square, the marked simplex category (the simplex category
//! with one extra object `1+` receiving the edge object and mapping to the
//! point, so that a separated presheaf is exactly a marked simplicial set),
//! or the marked square. Truncation keeps the finitely many levels below a
//! per-direction dimension bound.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IndexShape {
    Simplex,
    BiSimplex,
    MarkedSimplex,
    MarkedBiSimplex,
}

impl IndexShape {
    pub fn is_marked(self) -> bool {
        matches!(self, IndexShape::MarkedSimplex | IndexShape::MarkedBiSimplex)
    }

    pub fn is_bi(self) -> bool {
        matches!(self, IndexShape::BiSimplex | IndexShape::MarkedBiSimplex)
    }

    pub fn json_name(self) -> &'static str {
        match self {
            IndexShape::Simplex => "simplicial",
            IndexShape::BiSimplex => "bisimplicial",
            IndexShape::MarkedSimplex => "marked-simplicial",
            IndexShape::MarkedBiSimplex => "marked-bisimplicial",
        }
    }

    pub fn from_json_name(s: &str) -> Option<Self> {
        Some(match s {
            "simplicial" => IndexShape::Simplex,
            "bisimplicial" => IndexShape::BiSimplex,
            "marked-simplicial" => IndexShape::MarkedSimplex,
            "marked-bisimplicial" => IndexShape::MarkedBiSimplex,
            _ => return None,
        })
    }
}

/// Dimension bound per simplicial direction. `second` is set exactly for
/// the bisimplicial shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dim {
    pub main: u8,
    pub second: Option<u8>,
}

impl Dim {
    pub fn simplicial(d: u8) -> Self {
        Dim { main: d, second: None }
    }

    pub fn bisimplicial(d1: u8, d2: u8) -> Self {
        Dim { main: d1, second: Some(d2) }
    }
}

/// Index object in the main direction: an ordinal level or the edge-marking
/// object `1+`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MainLevel {
    Ord(u8),
    Marked,
}

/// An index object of the (possibly truncated) base category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Level {
    pub main: MainLevel,
    pub second: Option<u8>,
}

impl Level {
    pub fn ord(n: u8) -> Self {
        Level { main: MainLevel::Ord(n), second: None }
    }

    pub fn bi(k: u8, l: u8) -> Self {
        Level { main: MainLevel::Ord(k), second: Some(l) }
    }

    pub fn marked() -> Self {
        Level { main: MainLevel::Marked, second: None }
    }

    pub fn marked_bi(l: u8) -> Self {
        Level { main: MainLevel::Marked, second: Some(l) }
    }

    /// Sort key: total dimension first, marked rows after the ordinary level
    /// of the same total dimension. Faces and the marking edge map always
    /// descend in this order, degeneracies and the marking vertex map ascend.
    pub fn height(&self) -> (u16, u8, u8) {
        let sec = self.second.unwrap_or(0);
        match self.main {
            MainLevel::Ord(n) => (n as u16 + sec as u16, 0, sec),
            MainLevel::Marked => (1 + sec as u16, 1, sec),
        }
    }

    pub fn json_key(&self) -> String {
        let main = match self.main {
            MainLevel::Ord(n) => n.to_string(),
            MainLevel::Marked => "1+".to_string(),
        };
        match self.second {
            None => main,
            Some(l) => format!("{main},{l}"),
        }
    }

    pub fn from_json_key(s: &str) -> Option<Level> {
        let (main_s, second) = match s.split_once(',') {
            Some((m, l)) => (m, Some(l.parse::<u8>().ok()?)),
            None => (s, None),
        };
        let main = if main_s == "1+" {
            MainLevel::Marked
        } else {
            MainLevel::Ord(main_s.parse::<u8>().ok()?)
        };
        Some(Level { main, second })
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.json_key())
    }
}

/// Generating structure map acting *out of* a level (the action of a coface,
/// codegeneracy, or one of the two marking generators on cells).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    /// Face `d_i` in the main direction: level `n` to `n-1`.
    FaceMain(u8),
    /// Degeneracy `s_i` in the main direction: level `n` to `n+1`.
    DegenMain(u8),
    /// Face in the second direction.
    FaceSecond(u8),
    /// Degeneracy in the second direction.
    DegenSecond(u8),
    /// Underlying-edge map out of the marked row (`1+` cells to 1-cells);
    /// injective exactly when the presheaf is separated.
    MarkToEdge,
    /// Degenerate-marking map into the marked row (0-cells to `1+` cells);
    /// composes with `MarkToEdge` to the edge degeneracy `s_0`.
    VertexToMark,
}

impl Generator {
    pub fn is_degeneracy_like(self) -> bool {
        matches!(
            self,
            Generator::DegenMain(_) | Generator::DegenSecond(_) | Generator::VertexToMark
        )
    }

    pub fn json_key(self, shape: IndexShape) -> String {
        match self {
            Generator::FaceMain(i) | Generator::DegenMain(i) => {
                if shape.is_bi() {
                    format!("1:{i}")
                } else {
                    format!("{i}")
                }
            }
            Generator::FaceSecond(i) | Generator::DegenSecond(i) => format!("2:{i}"),
            Generator::MarkToEdge => "mark".to_string(),
            Generator::VertexToMark => "mark".to_string(),
        }
    }
}

/// Target level of a generator applied at `level`, or `None` if the
/// generator does not act there (or leaves the truncation).
pub fn generator_target(shape: IndexShape, dim: Dim, level: Level, g: Generator) -> Option<Level> {
    let second_bound = dim.second;
    match g {
        Generator::FaceMain(i) => match level.main {
            MainLevel::Ord(n) if n >= 1 && i <= n => {
                Some(Level { main: MainLevel::Ord(n - 1), second: level.second })
            }
            _ => None,
        },
        Generator::DegenMain(i) => match level.main {
            MainLevel::Ord(n) if n + 1 <= dim.main && i <= n => {
                Some(Level { main: MainLevel::Ord(n + 1), second: level.second })
            }
            _ => None,
        },
        Generator::FaceSecond(i) => match (level.second, second_bound) {
            (Some(l), Some(_)) if l >= 1 && i <= l => {
                Some(Level { main: level.main, second: Some(l - 1) })
            }
            _ => None,
        },
        Generator::DegenSecond(i) => match (level.second, second_bound) {
            (Some(l), Some(b)) if l + 1 <= b && i <= l => {
                Some(Level { main: level.main, second: Some(l + 1) })
            }
            _ => None,
        },
        Generator::MarkToEdge => {
            if shape.is_marked() && level.main == MainLevel::Marked {
                Some(Level { main: MainLevel::Ord(1), second: level.second })
            } else {
                None
            }
        }
        Generator::VertexToMark => {
            if shape.is_marked() && level.main == MainLevel::Ord(0) && dim.main >= 1 {
                Some(Level { main: MainLevel::Marked, second: level.second })
            } else {
                None
            }
        }
    }
}

/// Generators acting out of `level`, with their targets, in a fixed order.
pub fn generators_from(shape: IndexShape, dim: Dim, level: Level) -> Vec<(Generator, Level)> {
    let mut out = Vec::new();
    let mut push = |g| {
        if let Some(t) = generator_target(shape, dim, level, g) {
            out.push((g, t));
        }
    };
    if let MainLevel::Ord(n) = level.main {
        for i in 0..=n {
            push(Generator::FaceMain(i));
        }
        for i in 0..=n {
            push(Generator::DegenMain(i));
        }
    }
    if let Some(l) = level.second {
        for i in 0..=l {
            push(Generator::FaceSecond(i));
        }
        for i in 0..=l {
            push(Generator::DegenSecond(i));
        }
    }
    push(Generator::MarkToEdge);
    push(Generator::VertexToMark);
    out
}

/// Every level of the truncated base category, sorted by height.
pub fn levels(shape: IndexShape, dim: Dim) -> Vec<Level> {
    let mut out = Vec::new();
    let seconds: Vec<Option<u8>> = match dim.second {
        None => vec![None],
        Some(b) => (0..=b).map(Some).collect(),
    };
    for &sec in &seconds {
        for n in 0..=dim.main {
            out.push(Level { main: MainLevel::Ord(n), second: sec });
        }
        if shape.is_marked() && dim.main >= 1 {
            out.push(Level { main: MainLevel::Marked, second: sec });
        }
    }
    out.sort_by_key(|l| l.height());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_order_keeps_faces_descending() {
        for shape in [
            IndexShape::Simplex,
            IndexShape::BiSimplex,
            IndexShape::MarkedSimplex,
            IndexShape::MarkedBiSimplex,
        ] {
            let dim = if shape.is_bi() {
                Dim::bisimplicial(3, 2)
            } else {
                Dim::simplicial(3)
            };
            for level in levels(shape, dim) {
                for (g, target) in generators_from(shape, dim, level) {
                    if g.is_degeneracy_like() {
                        assert!(target.height() > level.height());
                    } else {
                        assert!(target.height() < level.height());
                    }
                }
            }
        }
    }

    #[test]
    fn json_keys_round_trip() {
        for lvl in [Level::ord(2), Level::bi(1, 3), Level::marked(), Level::marked_bi(2)] {
            assert_eq!(Level::from_json_key(&lvl.json_key()), Some(lvl));
        }
    }
}
