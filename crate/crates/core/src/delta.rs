//! Maps of finite ordinals `[n] = {0,...,n}`, the raw material for every
//! representable object and structure-map action in the crate.
//!
//! A map `[a] -> [b]` is stored as its image vector of length `a + 1`.
//! Monotone maps are the morphisms of the simplex-shape index category;
//! arbitrary maps appear as cells of chaotic-groupoid nerves.

/// Image vector of a map `[a] -> [b]`; entry `i` is the image of `i`.
pub type OrdMap = Vec<u8>;

pub fn is_monotone(f: &[u8]) -> bool {
    f.windows(2).all(|w| w[0] <= w[1])
}

pub fn is_surjective(f: &[u8], codomain: u8) -> bool {
    (0..=codomain).all(|v| f.contains(&v))
}

pub fn is_injective(f: &[u8]) -> bool {
    // monotone maps are injective iff strictly increasing
    f.windows(2).all(|w| w[0] != w[1])
}

/// Composite `g ∘ f` for `f: [a] -> [b]`, `g: [b] -> [c]`.
pub fn compose(g: &[u8], f: &[u8]) -> OrdMap {
    f.iter().map(|&i| g[i as usize]).collect()
}

pub fn identity(n: u8) -> OrdMap {
    (0..=n).collect()
}

/// Coface `δ_i: [n-1] -> [n]`, the injection missing `i`.
pub fn coface(n: u8, i: u8) -> OrdMap {
    assert!(n >= 1 && i <= n);
    (0..n).map(|j| if j < i { j } else { j + 1 }).collect()
}

/// Codegeneracy `σ_i: [n+1] -> [n]`, the surjection repeating `i`.
pub fn codegeneracy(n: u8, i: u8) -> OrdMap {
    assert!(i <= n);
    (0..=n + 1).map(|j| if j <= i { j } else { j - 1 }).collect()
}

/// All monotone maps `[a] -> [b]`, in lexicographic order.
pub fn monotone_maps(a: u8, b: u8) -> Vec<OrdMap> {
    let mut out = Vec::new();
    let mut cur = vec![0u8; a as usize + 1];
    loop {
        out.push(cur.clone());
        // next weakly increasing vector
        let mut k = cur.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if cur[k] < b {
                break;
            }
        }
        let v = cur[k] + 1;
        for slot in cur.iter_mut().skip(k) {
            *slot = v;
        }
    }
}

/// All maps `[a] -> [b]` (not necessarily monotone), lexicographic.
pub fn all_maps(a: u8, b: u8) -> Vec<OrdMap> {
    let mut out = Vec::new();
    let mut cur = vec![0u8; a as usize + 1];
    loop {
        out.push(cur.clone());
        let mut k = cur.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if cur[k] < b {
                cur[k] += 1;
                for slot in cur.iter_mut().skip(k + 1) {
                    *slot = 0;
                }
                break;
            }
        }
    }
}

/// All monotone surjections `[a] ->> [b]`.
pub fn surjections(a: u8, b: u8) -> Vec<OrdMap> {
    monotone_maps(a, b)
        .into_iter()
        .filter(|f| is_surjective(f, b))
        .collect()
}

/// Epi-mono factorization of a monotone map: `f = mono ∘ epi`.
pub fn epi_mono(f: &[u8]) -> (OrdMap, OrdMap) {
    let mut image: Vec<u8> = f.to_vec();
    image.dedup();
    let epi = f
        .iter()
        .map(|&v| image.iter().position(|&w| w == v).unwrap() as u8)
        .collect();
    (epi, image)
}

/// Render a map as a digit string; cells of standard objects are named this way.
pub fn digits(f: &[u8]) -> String {
    assert!(f.iter().all(|&v| v < 10), "ordinal too large for digit naming");
    f.iter().map(|v| char::from(b'0' + v)).collect()
}

pub fn from_digits(s: &str) -> Option<OrdMap> {
    s.chars()
        .map(|c| c.to_digit(10).map(|d| d as u8))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_binomials() {
        // |Hom([k],[n])| = C(n+k+1, k+1)
        assert_eq!(monotone_maps(1, 1).len(), 3);
        assert_eq!(monotone_maps(1, 2).len(), 6);
        assert_eq!(monotone_maps(2, 2).len(), 10);
        assert_eq!(monotone_maps(1, 3).len(), 10);
        assert_eq!(all_maps(1, 1).len(), 4);
    }

    #[test]
    fn simplicial_identities_on_generators() {
        // δ_j δ_i = δ_i δ_{j-1} for i < j
        for n in 1..4u8 {
            for j in 0..=n {
                for i in 0..j {
                    let lhs = compose(&coface(n + 1, j + 1), &coface(n, i));
                    let rhs = compose(&coface(n + 1, i), &coface(n, j));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn epi_mono_recomposes() {
        for f in monotone_maps(3, 2) {
            let (e, m) = epi_mono(&f);
            assert!(is_surjective(&e, (m.len() - 1) as u8));
            assert!(is_injective(&m));
            assert_eq!(compose(&m, &e), f);
        }
    }
}
