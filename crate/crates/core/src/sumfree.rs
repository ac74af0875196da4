//! Verifiers for tri-coloured sum-free triple systems and progression-free
//! sets in `Z_p^n`, plus the diagonal embedding connecting the two.

use std::collections::HashMap;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SumfreeError {
    #[error("input elements must be distinct")]
    Duplicates,
}

/// An element of `Z_p^n`, coordinates reduced mod `p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupVec {
    p: u32,
    coords: Vec<u32>,
}

impl GroupVec {
    /// Reduces arbitrary integer coordinates mod `p` (`p >= 2`).
    pub fn new(p: u32, coords: &[i64]) -> Self {
        assert!(p >= 2, "modulus must be at least 2");
        GroupVec {
            p,
            coords: coords
                .iter()
                .map(|&c| c.rem_euclid(p as i64) as u32)
                .collect(),
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn add(&self, other: &GroupVec) -> GroupVec {
        assert!(self.p == other.p && self.coords.len() == other.coords.len());
        GroupVec {
            p: self.p,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| (a + b) % self.p)
                .collect(),
        }
    }

    pub fn neg(&self) -> GroupVec {
        GroupVec {
            p: self.p,
            coords: self.coords.iter().map(|&c| (self.p - c) % self.p).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

/// A list of triples `(a_i, b_i, c_i)` of elements of `Z_p^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleSystem {
    p: u32,
    n: usize,
    triples: Vec<[GroupVec; 3]>,
}

impl TripleSystem {
    /// Panics unless all entries share `p` and `n`.
    pub fn new(p: u32, n: usize, triples: Vec<[GroupVec; 3]>) -> Self {
        assert!(p >= 2);
        for t in &triples {
            for v in t {
                assert!(
                    v.p == p && v.coords.len() == n,
                    "inconsistent triple entries"
                );
            }
        }
        TripleSystem { p, n, triples }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn triples(&self) -> &[[GroupVec; 3]] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }
}

/// Verdict of [`verify_trisystem`]; indices are zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrisystemReport {
    pub ok: bool,
    /// Lexicographically first `(i, j, k)` at which the sum-free condition
    /// fails, when it does.
    pub violation: Option<(usize, usize, usize)>,
}

/// Checks that `a_i + b_j + c_k = 0` holds exactly when `i = j = k`.
///
/// Runs in `O(m^2)` group operations by indexing the `c_k` values in a
/// multimap rather than scanning all `(i, j, k)` cubes; duplicate `c` values
/// are handled by keeping every index.
pub fn verify_trisystem(ts: &TripleSystem) -> TrisystemReport {
    let mut by_c: HashMap<&[u32], Vec<usize>> = HashMap::new();
    for (k, t) in ts.triples.iter().enumerate() {
        by_c.entry(t[2].coords()).or_default().push(k);
    }
    for (i, ti) in ts.triples.iter().enumerate() {
        for (j, tj) in ts.triples.iter().enumerate() {
            let needed = ti[0].add(&tj[1]).neg();
            let mut first: Option<usize> = None;
            if let Some(ks) = by_c.get(needed.coords()) {
                // Indices were inserted in ascending order.
                first = ks.iter().copied().find(|&k| !(i == j && k == i));
            }
            if i == j && ti[2].coords() != needed.coords() {
                // Diagonal triple fails to sum to zero.
                first = Some(first.map_or(i, |k| k.min(i)));
            }
            if let Some(k) = first {
                return TrisystemReport {
                    ok: false,
                    violation: Some((i, j, k)),
                };
            }
        }
    }
    TrisystemReport {
        ok: true,
        violation: None,
    }
}

/// True iff no three distinct elements `x, y, z` of `xs` satisfy
/// `x + z = 2y`. Errors on repeated elements.
pub fn ap_free_check(xs: &[GroupVec]) -> Result<bool, SumfreeError> {
    let mut doubled: HashMap<Vec<u32>, Vec<usize>> = HashMap::new();
    for (idx, x) in xs.iter().enumerate() {
        doubled
            .entry(x.add(x).coords.clone())
            .or_default()
            .push(idx);
    }
    let mut seen: HashMap<&[u32], usize> = HashMap::new();
    for x in xs {
        *seen.entry(x.coords()).or_insert(0) += 1;
    }
    if seen.values().any(|&c| c > 1) {
        return Err(SumfreeError::Duplicates);
    }
    for (i, xi) in xs.iter().enumerate() {
        for (j, xj) in xs.iter().enumerate().skip(i + 1) {
            let sum = xi.add(xj);
            if let Some(ys) = doubled.get(sum.coords()) {
                if ys.iter().any(|&y| y != i && y != j) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The diagonal embedding `x -> (x, x, -2x)`, which turns a progression-free
/// set in a group of odd order into a tri-coloured sum-free system. Panics
/// on an empty input (the group parameters come from the elements).
pub fn embed_diagonal(xs: &[GroupVec]) -> TripleSystem {
    let first = xs.first().expect("embedding needs at least one element");
    let (p, n) = (first.p(), first.n());
    let triples = xs
        .iter()
        .map(|x| [x.clone(), x.clone(), x.add(x).neg()])
        .collect();
    TripleSystem::new(p, n, triples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gv(p: u32, coords: &[i64]) -> GroupVec {
        GroupVec::new(p, coords)
    }

    fn system(p: u32, rows: &[[i64; 3]]) -> TripleSystem {
        TripleSystem::new(
            p,
            1,
            rows.iter()
                .map(|r| [gv(p, &[r[0]]), gv(p, &[r[1]]), gv(p, &[r[2]])])
                .collect(),
        )
    }

    #[test]
    fn verify_small_systems() {
        let ts = system(3, &[[0, 0, 0]]);
        assert_eq!(
            verify_trisystem(&ts),
            TrisystemReport {
                ok: true,
                violation: None
            }
        );

        let ts = system(3, &[[0, 0, 0], [1, 1, 1]]);
        assert!(verify_trisystem(&ts).ok);

        // a_0 + b_0 + c_1 = 0 + 0 + 0 = 0 with indices (0,0,1).
        let ts = system(3, &[[0, 0, 0], [1, 2, 0]]);
        assert_eq!(
            verify_trisystem(&ts),
            TrisystemReport {
                ok: false,
                violation: Some((0, 0, 1))
            }
        );
    }

    #[test]
    fn verify_reports_broken_diagonal() {
        let ts = system(3, &[[0, 0, 1]]);
        assert_eq!(
            verify_trisystem(&ts),
            TrisystemReport {
                ok: false,
                violation: Some((0, 0, 0))
            }
        );
    }

    #[test]
    fn ap_free_cases() {
        let set =
            |p: u32, vals: &[i64]| -> Vec<GroupVec> { vals.iter().map(|&v| gv(p, &[v])).collect() };
        assert_eq!(ap_free_check(&set(3, &[0, 1])), Ok(true));
        assert_eq!(ap_free_check(&set(3, &[0, 1, 2])), Ok(false));
        assert_eq!(ap_free_check(&set(7, &[0, 1, 3])), Ok(true));
        assert_eq!(
            ap_free_check(&set(5, &[1, 1])),
            Err(SumfreeError::Duplicates)
        );
    }

    #[test]
    fn embed_diagonal_cases() {
        let ts = embed_diagonal(&[gv(3, &[0])]);
        assert_eq!(ts.triples(), system(3, &[[0, 0, 0]]).triples());

        // -2*1 = 1 mod 3.
        let ts = embed_diagonal(&[gv(3, &[0]), gv(3, &[1])]);
        assert_eq!(ts.triples(), system(3, &[[0, 0, 0], [1, 1, 1]]).triples());

        let ts = embed_diagonal(&[gv(7, &[0]), gv(7, &[1]), gv(7, &[3])]);
        assert_eq!(ts.len(), 3);
        assert!(verify_trisystem(&ts).ok);
    }

    /// Cubic reference checker for cross-validation.
    fn brute_force(ts: &TripleSystem) -> TrisystemReport {
        let m = ts.len();
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let sum = ts.triples()[i][0]
                        .add(&ts.triples()[j][1])
                        .add(&ts.triples()[k][2]);
                    if sum.is_zero() != (i == j && j == k) {
                        return TrisystemReport {
                            ok: false,
                            violation: Some((i, j, k)),
                        };
                    }
                }
            }
        }
        TrisystemReport {
            ok: true,
            violation: None,
        }
    }

    #[test]
    fn indexed_check_agrees_with_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let p = [3u32, 5, 7][rng.random_range(0..3)];
            let n = rng.random_range(1..=2);
            let m = rng.random_range(1..=8);
            let mut triples = Vec::new();
            for _ in 0..m {
                let mut vec3 = Vec::new();
                for _ in 0..3 {
                    let coords: Vec<i64> = (0..n).map(|_| rng.random_range(0..p as i64)).collect();
                    vec3.push(GroupVec::new(p, &coords));
                }
                triples.push([vec3[0].clone(), vec3[1].clone(), vec3[2].clone()]);
            }
            let ts = TripleSystem::new(p, n, triples);
            assert_eq!(verify_trisystem(&ts), brute_force(&ts));
        }
    }

    #[test]
    fn duplicate_c_values_are_indexed_correctly() {
        // Two triples sharing the same c; the multimap must surface both.
        let ts = system(5, &[[0, 0, 0], [1, 4, 0]]);
        // a_0 + b_1 + c_0 = 0 + 4 + 0 = 4 != 0; a_0+b_0+c_1 = 0 -> violation.
        let report = verify_trisystem(&ts);
        assert!(!report.ok);
        assert_eq!(report.violation, Some((0, 0, 1)));
    }
}
