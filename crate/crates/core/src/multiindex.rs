//! The multi-index sets `I_m`, `Î_m`, `I_m⁺` and `Î_m⁺`.
//!
//! An element is a pair of integer walks `(j_1..j_{m(+1)} | k_1..k_m)` with
//! `j_1 = 0` and, at each step `s`, either `k_s = j_s = j_{s+1} + 1` or
//! `k_s = j_s + 1 = j_{s+1}`. Indices are 1-based in every public interface:
//! `pair.j[0]` holds `j_1`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest supported depth `m`; `|I_m| = 2^m`.
pub const MAX_DEPTH: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    I,
    IHat,
    IPlus,
    IHatPlus,
}

impl Variant {
    pub fn is_hatted(self) -> bool {
        matches!(self, Variant::IHat | Variant::IHatPlus)
    }

    pub fn is_plus(self) -> bool {
        matches!(self, Variant::IPlus | Variant::IHatPlus)
    }

    /// The variant with the same positivity constraint and opposite hat.
    pub fn toggle_hat(self) -> Variant {
        match self {
            Variant::I => Variant::IHat,
            Variant::IHat => Variant::I,
            Variant::IPlus => Variant::IHatPlus,
            Variant::IHatPlus => Variant::IPlus,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndexPair {
    /// `j_1..j_m`, or `j_1..j_{m+1}` for hatted variants.
    pub j: Vec<i32>,
    /// `k_1..k_m`.
    pub k: Vec<i32>,
    pub variant: Variant,
}

impl MultiIndexPair {
    pub fn depth(&self) -> usize {
        self.k.len()
    }

    /// `j_{m+1}`, stored for hatted variants and implied by `(j_m, k_m)`
    /// otherwise.
    pub fn j_last(&self) -> i32 {
        let m = self.depth();
        if self.variant.is_hatted() {
            self.j[m]
        } else if self.k[m - 1] == self.j[m - 1] {
            self.j[m - 1] - 1
        } else {
            self.j[m - 1] + 1
        }
    }
}

impl fmt::Display for MultiIndexPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[i32]| v.iter().map(i32::to_string).collect::<Vec<_>>().join(",");
        write!(f, "({}|{})", join(&self.j), join(&self.k))
    }
}

fn check_depth(m: usize) -> Result<()> {
    if m == 0 || m > MAX_DEPTH {
        return Err(Error::Argument(format!("multi-index depth must lie in 1..={MAX_DEPTH}, got {m}")));
    }
    Ok(())
}

/// Visits every element of the set in lexicographic `(j, k)` order without
/// allocating per element. The callback receives `j_1..j_{m+1}` (always
/// including the final step) and `k_1..k_m`.
pub fn for_each(variant: Variant, m: usize, mut visit: impl FnMut(&[i32], &[i32])) -> Result<()> {
    check_depth(m)?;
    let mut j = vec![0i32; m + 1];
    let mut k = vec![0i32; m];
    walk(variant.is_plus(), 0, &mut j, &mut k, &mut visit);
    Ok(())
}

fn walk(plus: bool, s: usize, j: &mut [i32], k: &mut [i32], visit: &mut impl FnMut(&[i32], &[i32])) {
    if s == k.len() {
        visit(j, k);
        return;
    }
    let js = j[s];
    // step down first so that output is lexicographic
    if !plus || js >= 1 {
        k[s] = js;
        j[s + 1] = js - 1;
        walk(plus, s + 1, j, k, visit);
    }
    if !plus || js >= 0 {
        k[s] = js + 1;
        j[s + 1] = js + 1;
        walk(plus, s + 1, j, k, visit);
    }
}

/// All elements of the set, sorted lexicographically by `(j, k)`.
pub fn generate(variant: Variant, m: usize) -> Result<Vec<MultiIndexPair>> {
    let mut out = Vec::with_capacity(cardinality(variant, m)? as usize);
    let keep = if variant.is_hatted() { m + 1 } else { m };
    for_each(variant, m, |j, k| {
        out.push(MultiIndexPair { j: j[..keep].to_vec(), k: k.to_vec(), variant });
    })?;
    Ok(out)
}

/// `|generate(variant, m)|`, by dynamic programming over the walk height.
pub fn cardinality(variant: Variant, m: usize) -> Result<u64> {
    check_depth(m)?;
    if !variant.is_plus() {
        return Ok(1u64 << m);
    }
    // counts[h] = number of admissible prefixes ending at height h
    let mut counts = vec![0u64; m + 2];
    counts[0] = 1;
    for _ in 0..m {
        let mut next = vec![0u64; m + 2];
        for h in 0..=m {
            let c = counts[h];
            if c == 0 {
                continue;
            }
            if h >= 1 {
                next[h - 1] += c;
            }
            next[h + 1] += c;
        }
        counts = next;
    }
    Ok(counts.iter().sum())
}

/// Re-verifies the defining relations of a pair element by element.
pub fn satisfies_constraints(pair: &MultiIndexPair) -> bool {
    let m = pair.k.len();
    let expected_j = if pair.variant.is_hatted() { m + 1 } else { m };
    if m == 0 || pair.j.len() != expected_j || pair.j[0] != 0 {
        return false;
    }
    for s in 0..m {
        let (js, ks) = (pair.j[s], pair.k[s]);
        let step_ok = match pair.j.get(s + 1) {
            Some(&jn) => (ks == js && js == jn + 1) || (ks == js + 1 && js + 1 == jn),
            None => ks == js || ks == js + 1,
        };
        if !step_ok {
            return false;
        }
        if pair.variant.is_plus() && (js < 0 || ks < 1) {
            return false;
        }
    }
    !(pair.variant == Variant::IHatPlus && pair.j[m] < 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn show(v: Variant, m: usize) -> Vec<String> {
        generate(v, m).unwrap().iter().map(ToString::to_string).collect()
    }

    #[test]
    fn small_plus_sets() {
        assert_eq!(show(Variant::IPlus, 1), ["(0|1)"]);
        assert_eq!(show(Variant::IPlus, 2), ["(0,1|1,1)", "(0,1|1,2)"]);
        assert_eq!(show(Variant::IPlus, 3), ["(0,1,0|1,1,1)", "(0,1,2|1,2,2)", "(0,1,2|1,2,3)"]);
    }

    #[test]
    fn full_set_depth_two() {
        assert_eq!(show(Variant::I, 2), ["(0,-1|0,-1)", "(0,-1|0,0)", "(0,1|1,1)", "(0,1|1,2)"]);
        assert_eq!(show(Variant::IHat, 1), ["(0,-1|0)", "(0,1|1)"]);
    }

    #[test]
    fn implied_last_step() {
        let set = generate(Variant::I, 3).unwrap();
        let hat = generate(Variant::IHat, 3).unwrap();
        for (p, h) in set.iter().zip(&hat) {
            assert_eq!(p.j_last(), h.j_last());
            assert_eq!(&h.j[..3], &p.j[..]);
        }
    }

    #[test]
    fn depth_bounds() {
        assert!(generate(Variant::I, 0).is_err());
        assert!(cardinality(Variant::IPlus, MAX_DEPTH + 1).is_err());
        assert_eq!(cardinality(Variant::I, MAX_DEPTH).unwrap(), 1 << 24);
    }

    #[test]
    fn checker_rejects_broken_pairs() {
        let mut p = generate(Variant::IPlus, 3).unwrap().remove(0);
        assert!(satisfies_constraints(&p));
        p.k[1] = 3;
        assert!(!satisfies_constraints(&p));
        let neg = MultiIndexPair { j: vec![0, -1], k: vec![0, 0], variant: Variant::IPlus };
        assert!(!satisfies_constraints(&neg));
    }
}
