//! Constructs explicit couplings witnessing that decreasing distributions on
//! `{0..p-1}` with means summing to `p-1` admit a joint distribution whose
//! coordinate sum is constantly `p-1`.
//!
//! The engine combines four pieces:
//! - a closed-form pair coupling making the sum of two independentish
//!   uniforms uniform ([`couple_uniform_pair`]);
//! - a coin-flip construction coupling a uniform, the full-alphabet uniform
//!   and a two-uniform blend ([`couple_uniform_blend`]);
//! - an inductive peeling step reducing alphabet `p` to `p-1`
//!   ([`couple_induction_step`]);
//! - a dispatcher that splits an arbitrary triple through the staircase
//!   transform and the simple decomposition, couples each simple term, and
//!   mixes the results ([`couple`]).
//!
//! All arithmetic is exact; every produced coupling has exactly the requested
//! marginals.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::decompose::simple_decompose;
use crate::dist::{rat_int, Dist, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoupleError {
    #[error("invalid triple: {0}")]
    BadTriple(String),
    #[error("distribution at position {0} has mass at the top of the alphabet")]
    TopMass(usize),
    #[error("invalid parameters: need i > 0 and i + j < p - 1")]
    BadParams,
    #[error("mixture weights must be non-negative and sum to exactly 1")]
    BadWeights,
    #[error("couplings being mixed disagree on alphabet or sum")]
    MixedShapes,
}

/// Sparse exact joint distribution of three coordinates in `{0..p-1}` with
/// constant coordinate sum `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coupling {
    p: usize,
    s: usize,
    entries: BTreeMap<(usize, usize, usize), Rat>,
}

impl Coupling {
    /// Builds a coupling, dropping zero masses. Panics if an entry is
    /// negative, a key leaves the plane `a+b+c = s` or the box `[0,p)^3`, or
    /// the total mass is not exactly 1; those indicate an engine bug, not a
    /// data error (use [`Coupling::from_raw`] for untrusted data).
    pub fn new(p: usize, s: usize, entries: BTreeMap<(usize, usize, usize), Rat>) -> Self {
        let mut kept = BTreeMap::new();
        let mut total = Rat::zero();
        for ((a, b, c), mass) in entries {
            assert!(
                !mass.is_negative(),
                "negative coupling mass at ({a},{b},{c})"
            );
            if mass.is_zero() {
                continue;
            }
            assert!(a < p && b < p && c < p, "coupling key outside alphabet");
            assert!(a + b + c == s, "coupling key off the constant-sum plane");
            total += &mass;
            kept.insert((a, b, c), mass);
        }
        assert!(total.is_one(), "coupling mass must total exactly 1");
        Coupling {
            p,
            s,
            entries: kept,
        }
    }

    /// Wraps arbitrary entries without validation, for parsers and for
    /// exercising [`verify_coupling`] on bad data.
    pub fn from_raw(p: usize, s: usize, entries: BTreeMap<(usize, usize, usize), Rat>) -> Self {
        Coupling { p, s, entries }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize, usize), Rat> {
        &self.entries
    }

    /// Marginal mass vector of coordinate `coord` (0, 1 or 2), or `None` if
    /// some key falls outside `{0..p-1}`.
    pub fn marginal(&self, coord: usize) -> Option<Vec<Rat>> {
        let mut mass = vec![Rat::zero(); self.p];
        for (key, m) in &self.entries {
            let v = [key.0, key.1, key.2][coord];
            if v >= self.p {
                return None;
            }
            mass[v] += m;
        }
        Some(mass)
    }

    /// Relabels coordinates: output coordinate `i` reads input coordinate
    /// `perm[i]`. The marginals permute accordingly.
    pub fn permuted(&self, perm: [usize; 3]) -> Coupling {
        let mut entries = BTreeMap::new();
        for (key, mass) in &self.entries {
            let k = [key.0, key.1, key.2];
            entries.insert((k[perm[0]], k[perm[1]], k[perm[2]]), mass.clone());
        }
        Coupling {
            p: self.p,
            s: self.s,
            entries,
        }
    }
}

/// Sparse exact joint distribution of a pair `(X, Y)` with `0 <= X <= m`,
/// `0 <= Y <= n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairCoupling {
    m: usize,
    n: usize,
    entries: BTreeMap<(usize, usize), Rat>,
}

impl PairCoupling {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), Rat> {
        &self.entries
    }
}

/// Couples `X` uniform on `{0..m}` and `Y` uniform on `{0..n}` so that
/// `X + Y` is uniform on `{0..m+n}`.
///
/// Closed form: `q(x,y) = C(m,x) C(n,y) / ((m+n+1) C(m+n, x+y))`, the joint
/// law of the counts of two groups of exchangeable variables falling below a
/// common pivot.
pub fn couple_uniform_pair(m: usize, n: usize) -> PairCoupling {
    let denom_scale = BigInt::from(m as u64 + n as u64 + 1);
    let mut entries = BTreeMap::new();
    for x in 0..=m {
        let cx = binomial(BigInt::from(m as u64), BigInt::from(x as u64));
        for y in 0..=n {
            let cy = binomial(BigInt::from(n as u64), BigInt::from(y as u64));
            let cs = binomial(BigInt::from((m + n) as u64), BigInt::from((x + y) as u64));
            let q = Rat::new(&cx * &cy, &denom_scale * cs);
            entries.insert((x, y), q);
        }
    }
    PairCoupling { m, n, entries }
}

/// Coin-flip coupling of `U_i`, `U_{p-1}` and the two-uniform blend on
/// `{0..j}` / `{0..p-1}` with mean `(p-1-i)/2`, for `i > 0`, `j >= 0`,
/// `i + j < p - 1`. The coordinate sum is constantly `p-1`.
///
/// Heads (probability `(i+j+1)/p`) couples uniforms on `{0..i}` and `{0..j}`
/// and emits `(X, (p-1)-X-Y, Y)`; tails couples uniforms on `{0..i}` and
/// `{0..p-i-j-2}` and emits `(X', Y', (p-1)-X'-Y')`.
pub fn couple_uniform_blend(i: usize, j: usize, p: usize) -> Result<Coupling, CoupleError> {
    if i == 0 || i + j >= p.saturating_sub(1) {
        return Err(CoupleError::BadParams);
    }
    let heads = Rat::new(BigInt::from((i + j + 1) as u64), BigInt::from(p as u64));
    let tails = Rat::one() - &heads;
    let mut entries: BTreeMap<(usize, usize, usize), Rat> = BTreeMap::new();

    for ((x, y), q) in couple_uniform_pair(i, j).entries() {
        let key = (*x, (p - 1) - x - y, *y);
        *entries.entry(key).or_insert_with(Rat::zero) += &heads * q;
    }
    for ((x, y), q) in couple_uniform_pair(i, p - (i + j + 2)).entries() {
        let key = (*x, *y, (p - 1) - x - y);
        *entries.entry(key).or_insert_with(Rat::zero) += &tails * q;
    }
    Ok(Coupling::new(p, p - 1, entries))
}

/// Validates a triple for the coupling engine: common alphabet, decreasing,
/// means summing to exactly `p-1`. Returns the alphabet size.
fn validate_triple(ds: [&Dist; 3]) -> Result<usize, CoupleError> {
    let p = ds[0].p();
    if ds.iter().any(|d| d.p() != p) {
        return Err(CoupleError::BadTriple(format!(
            "alphabet mismatch: {} / {} / {}",
            ds[0].p(),
            ds[1].p(),
            ds[2].p()
        )));
    }
    for (i, d) in ds.iter().enumerate() {
        if !d.is_decreasing() {
            return Err(CoupleError::BadTriple(format!(
                "distribution {} is not decreasing",
                i + 1
            )));
        }
    }
    let mean_sum: Rat = ds.iter().map(|d| d.mean()).sum();
    if mean_sum != rat_int(p as i64 - 1) {
        return Err(CoupleError::BadTriple(format!(
            "means sum to {mean_sum}, expected {}",
            p - 1
        )));
    }
    Ok(p)
}

/// Slack in the tail inequality
/// `P(pi1 = 0) <= P(pi2 > t) + P(pi3 >= (p-1)-t)` for `0 <= t < p`:
/// returns the right side minus the left, which is non-negative for every
/// valid decreasing triple with mean sum `p-1`.
pub fn tail_inequality_gap(d1: &Dist, d2: &Dist, d3: &Dist, t: usize) -> Result<Rat, CoupleError> {
    let p = validate_triple([d1, d2, d3])?;
    if t >= p {
        return Err(CoupleError::BadTriple(format!(
            "threshold {t} outside [0, {p})"
        )));
    }
    Ok(d2.prob_greater(t) + d3.prob_at_least((p - 1) - t) - d1.mass(0))
}

/// Coupling engine with a memo table shared across recursive calls. Reusing
/// one `Coupler` across many instances lets repeated sub-triples (uniform
/// families, residual tails) hit the cache.
#[derive(Debug, Default)]
pub struct Coupler {
    memo: BTreeMap<[Vec<Rat>; 3], Coupling>,
}

impl Coupler {
    pub fn new() -> Self {
        Coupler::default()
    }

    /// Couples a decreasing triple with mean sum `p-1` so that the
    /// coordinate sum is constantly `p-1`.
    ///
    /// The output is permutation-equivariant: coupling a permuted triple
    /// yields the correspondingly permuted entries. This is arranged by
    /// canonicalising the component order (descending lexicographic on mass
    /// vectors), coupling once, and averaging over the permutations that fix
    /// the canonical triple.
    pub fn couple(&mut self, d1: &Dist, d2: &Dist, d3: &Dist) -> Result<Coupling, CoupleError> {
        let ds = [d1, d2, d3];
        let p = validate_triple(ds)?;
        if p == 1 {
            return Ok(trivial_coupling());
        }

        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| ds[b].masses().cmp(ds[a].masses()).then(a.cmp(&b)));
        let sorted = [ds[order[0]], ds[order[1]], ds[order[2]]];

        let key = [
            sorted[0].masses().to_vec(),
            sorted[1].masses().to_vec(),
            sorted[2].masses().to_vec(),
        ];
        let core = if let Some(hit) = self.memo.get(&key) {
            hit.clone()
        } else {
            let raw = self.couple_canonical(sorted, p)?;
            let sym = symmetrize(raw, sorted);
            self.memo.insert(key, sym.clone());
            sym
        };
        // Output coordinate order[i] reads canonical coordinate i.
        let mut unsort = [0usize; 3];
        for (canonical, &original) in order.iter().enumerate() {
            unsort[original] = canonical;
        }
        Ok(core.permuted(unsort))
    }

    /// Couples a triple already in canonical order.
    fn couple_canonical(&mut self, ds: [&Dist; 3], p: usize) -> Result<Coupling, CoupleError> {
        let has_top: Vec<usize> = (0..3)
            .filter(|&i| ds[i].mass(p - 1).is_positive())
            .collect();
        if has_top.len() <= 1 {
            // Induction applies directly: the only possible top-mass carrier
            // goes to the first position.
            let first = has_top.first().copied().unwrap_or(0);
            return Ok(self.induction_arranged(ds, p, first));
        }

        // Split through the staircase transform into simple terms.
        let phis: Vec<Dist> = ds
            .iter()
            .map(|d| d.unhat().expect("validated triples are decreasing"))
            .collect();
        let dec = simple_decompose(&phis);
        let mut parts: Vec<(Rat, Coupling)> = Vec::with_capacity(dec.terms().len());
        for (w, tuple) in dec.terms() {
            let shapes: Vec<Shape> = tuple.components().iter().map(classify).collect();
            let hatted: Vec<Dist> = tuple.components().iter().map(Dist::hat).collect();
            let coupling = self.couple_simple_term(&shapes, &hatted, p)?;
            parts.push((w.clone(), coupling));
        }
        mix_couplings(&parts)
    }

    /// Couples one simple term: two uniforms plus at most one two-uniform
    /// blend, with mean sum `p-1`.
    fn couple_simple_term(
        &mut self,
        shapes: &[Shape],
        hatted: &[Dist],
        p: usize,
    ) -> Result<Coupling, CoupleError> {
        let vee = shapes.iter().position(|s| matches!(s, Shape::Vee { .. }));
        match vee {
            None => {
                let ks: Vec<usize> = shapes
                    .iter()
                    .map(|s| match s {
                        Shape::Uniform(k) => *k,
                        Shape::Vee { .. } => unreachable!(),
                    })
                    .collect();
                let tops: Vec<usize> = (0..3).filter(|&i| ks[i] == p - 1).collect();
                if tops.len() >= 2 {
                    // Two full-alphabet uniforms force the third component to
                    // be constant zero; couple them explicitly.
                    let constant = (0..3).find(|i| !tops[..2].contains(i)).unwrap();
                    debug_assert_eq!(ks[constant], 0);
                    Ok(explicit_two_uniforms(tops[0], tops[1], constant, p))
                } else {
                    let first = tops.first().copied().unwrap_or(0);
                    Ok(self.induction_arranged([&hatted[0], &hatted[1], &hatted[2]], p, first))
                }
            }
            Some(v) => {
                let Shape::Vee { lo, hi } = shapes[v] else {
                    unreachable!()
                };
                let unis: Vec<(usize, usize)> = (0..3)
                    .filter(|&i| i != v)
                    .map(|i| match shapes[i] {
                        Shape::Uniform(k) => (i, k),
                        Shape::Vee { .. } => {
                            unreachable!("simple tuples have at most one wide component")
                        }
                    })
                    .collect();
                let uni_tops: Vec<usize> = unis
                    .iter()
                    .filter(|&&(_, k)| k == p - 1)
                    .map(|&(i, _)| i)
                    .collect();
                if hi == p - 1 {
                    match uni_tops.len() {
                        0 => {
                            Ok(self.induction_arranged([&hatted[0], &hatted[1], &hatted[2]], p, v))
                        }
                        1 => {
                            // The coin-flip construction covers exactly this
                            // shape: U_i, U_{p-1} and a blend reaching the top.
                            let top_u = uni_tops[0];
                            let (low_u, i) =
                                unis.iter().copied().find(|&(idx, _)| idx != top_u).unwrap();
                            assert!(i >= 1 && i + lo < p - 1, "blend would be degenerate");
                            let c = couple_uniform_blend(i, lo, p)?;
                            // couple_uniform_blend coordinates: (U_i, U_{p-1}, blend).
                            let mut from = [0usize; 3];
                            from[low_u] = 0;
                            from[top_u] = 1;
                            from[v] = 2;
                            Ok(c.permuted(from))
                        }
                        _ => unreachable!("two top uniforms force a degenerate blend"),
                    }
                } else {
                    debug_assert!(uni_tops.len() <= 1);
                    let first = uni_tops.first().copied().unwrap_or(0);
                    Ok(self.induction_arranged([&hatted[0], &hatted[1], &hatted[2]], p, first))
                }
            }
        }
    }

    /// Runs the induction step with position `first` moved to the front and
    /// un-permutes the result.
    fn induction_arranged(&mut self, ds: [&Dist; 3], p: usize, first: usize) -> Coupling {
        let rest: Vec<usize> = (0..3).filter(|&i| i != first).collect();
        let arranged = [ds[first], ds[rest[0]], ds[rest[1]]];
        let sub = self.induction_step(arranged, p);
        // Output coordinate `first` reads arranged coordinate 0, etc.
        let mut unarrange = [0usize; 3];
        unarrange[first] = 0;
        unarrange[rest[0]] = 1;
        unarrange[rest[1]] = 2;
        sub.permuted(unarrange)
    }

    /// Peels the event `X1 = 0` against the anti-diagonal, then recurses on
    /// the rescaled residual triple at alphabet `p-1`.
    ///
    /// Requires (unchecked here; the public wrapper checks) a valid
    /// decreasing triple with mean sum `p-1` whose second and third
    /// components have no mass at `p-1`.
    fn induction_step(&mut self, ds: [&Dist; 3], p: usize) -> Coupling {
        if p == 1 {
            return trivial_coupling();
        }
        debug_assert!(ds[1].mass(p - 1).is_zero() && ds[2].mass(p - 1).is_zero());

        let anti: Vec<Rat> = (0..p)
            .map(|k| ds[1].mass(k).min(ds[2].mass(p - 1 - k)).clone())
            .collect();
        let target = ds[0].mass(0).clone();
        let x = smallest_cap(&anti, &target);
        let f: Vec<Rat> = anti.iter().map(|m| m.min(&x).clone()).collect();
        debug_assert_eq!(f.iter().sum::<Rat>(), target);

        let mut entries: BTreeMap<(usize, usize, usize), Rat> = BTreeMap::new();
        for (k, fk) in f.iter().enumerate() {
            if fk.is_positive() {
                entries.insert((0, k, p - 1 - k), fk.clone());
            }
        }

        let leftover = Rat::one() - &target;
        if leftover.is_zero() {
            return Coupling::new(p, p - 1, entries);
        }

        // Residuals: trim the peeled mass, check they stayed monotone, then
        // rescale to distributions on the smaller alphabet.
        let r2: Vec<Rat> = (0..p).map(|k| ds[1].mass(k) - &f[k]).collect();
        let r3: Vec<Rat> = (0..p).map(|k| ds[2].mass(k) - &f[p - 1 - k]).collect();
        for (name, r) in [("second", &r2), ("third", &r3)] {
            assert!(
                r.windows(2).all(|w| w[0] >= w[1]),
                "{name} residual lost monotonicity"
            );
            assert!(r[p - 1].is_zero(), "{name} residual kept top mass");
        }

        let shrink = |mass: &[Rat]| -> Dist {
            let scaled: Vec<Rat> = mass[..p - 1].iter().map(|m| m / &leftover).collect();
            Dist::new(p - 1, scaled).expect("residuals rescale to a distribution")
        };
        let sub1 = shrink(&ds[0].masses()[1..]);
        let sub2 = shrink(&r2);
        let sub3 = shrink(&r3);
        let sub = self
            .couple(&sub1, &sub2, &sub3)
            .expect("residual triple satisfies the induction invariants");

        for ((a, b, c), mass) in sub.entries() {
            entries.insert((a + 1, *b, *c), &leftover * mass);
        }
        Coupling::new(p, p - 1, entries)
    }
}

/// Shape of a simple-tuple component after the staircase transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    /// Uniform on `{0..k}`.
    Uniform(usize),
    /// Blend of the uniforms on `{0..lo}` and `{0..hi}`, both with positive
    /// weight (so it has mass at `hi`).
    Vee { lo: usize, hi: usize },
}

fn classify(component: &Dist) -> Shape {
    let support = component.support();
    match support.as_slice() {
        [v] => Shape::Uniform(*v),
        [lo, hi] => Shape::Vee { lo: *lo, hi: *hi },
        _ => unreachable!("simple tuple component supported on more than two values"),
    }
}

fn trivial_coupling() -> Coupling {
    Coupling::new(1, 0, BTreeMap::from([((0, 0, 0), Rat::one())]))
}

/// Coupling of two full-alphabet uniforms (coordinates `a`, `b`) and a
/// constant zero (coordinate `z`): one anti-diagonal line of mass `1/p`.
fn explicit_two_uniforms(a: usize, b: usize, z: usize, p: usize) -> Coupling {
    let w = Rat::new(BigInt::one(), BigInt::from(p as u64));
    let mut entries = BTreeMap::new();
    for k in 0..p {
        let mut key = [0usize; 3];
        key[a] = k;
        key[b] = p - 1 - k;
        key[z] = 0;
        entries.insert((key[0], key[1], key[2]), w.clone());
    }
    Coupling::new(p, p - 1, entries)
}

/// Smallest `x >= 0` with `sum_k min(values[k], x) = target`, solved exactly
/// on the piecewise-linear segments. Panics if `target` exceeds the total,
/// which the tail inequality rules out for valid triples.
fn smallest_cap(values: &[Rat], target: &Rat) -> Rat {
    if target.is_zero() {
        return Rat::zero();
    }
    let mut sorted = values.to_vec();
    sorted.sort();
    let n = sorted.len();
    let mut prefix = Rat::zero(); // sum of the values below the segment
    let mut start = Rat::zero(); // segment lower endpoint
    for (t, v) in sorted.iter().enumerate() {
        let slope = rat_int((n - t) as i64);
        let candidate = (target - &prefix) / &slope;
        if candidate >= start && candidate <= *v {
            return candidate;
        }
        prefix += v;
        start = v.clone();
    }
    panic!("cap target exceeds the available mass; the tail inequality fails");
}

/// Averages a coupling over the coordinate permutations that fix the triple,
/// making the output symmetric in equal components.
fn symmetrize(core: Coupling, ds: [&Dist; 3]) -> Coupling {
    let stab: Vec<[usize; 3]> = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ]
    .into_iter()
    .filter(|perm| (0..3).all(|i| ds[perm[i]] == ds[i]))
    .collect();
    if stab.len() == 1 {
        return core;
    }
    let w = Rat::new(BigInt::one(), BigInt::from(stab.len() as u64));
    let parts: Vec<(Rat, Coupling)> = stab
        .into_iter()
        .map(|perm| (w.clone(), core.permuted(perm)))
        .collect();
    mix_couplings(&parts).expect("uniform weights over the stabilizer")
}

/// Couples a decreasing triple with mean sum `p-1`; see [`Coupler::couple`].
pub fn couple(d1: &Dist, d2: &Dist, d3: &Dist) -> Result<Coupling, CoupleError> {
    Coupler::new().couple(d1, d2, d3)
}

/// One step of the inductive construction, exposed with its own validation:
/// requires a valid triple whose second and third components have no mass at
/// `p-1`. Alphabet 1 couples trivially.
pub fn couple_induction_step(d1: &Dist, d2: &Dist, d3: &Dist) -> Result<Coupling, CoupleError> {
    let p = validate_triple([d1, d2, d3])?;
    if p > 1 {
        if d2.mass(p - 1).is_positive() {
            return Err(CoupleError::TopMass(2));
        }
        if d3.mass(p - 1).is_positive() {
            return Err(CoupleError::TopMass(3));
        }
    }
    Ok(Coupler::new().induction_step([d1, d2, d3], p))
}

/// Keywise convex combination of couplings sharing `p` and `s`; zero-mass
/// keys are dropped.
pub fn mix_couplings(terms: &[(Rat, Coupling)]) -> Result<Coupling, CoupleError> {
    let Some(((_, first), _)) = terms.split_first() else {
        return Err(CoupleError::BadWeights);
    };
    let (p, s) = (first.p, first.s);
    let mut total = Rat::zero();
    let mut entries: BTreeMap<(usize, usize, usize), Rat> = BTreeMap::new();
    for (w, c) in terms {
        if w.is_negative() {
            return Err(CoupleError::BadWeights);
        }
        if c.p != p || c.s != s {
            return Err(CoupleError::MixedShapes);
        }
        total += w;
        if w.is_zero() {
            continue;
        }
        for (key, mass) in &c.entries {
            *entries.entry(*key).or_insert_with(Rat::zero) += w * mass;
        }
    }
    if !total.is_one() {
        return Err(CoupleError::BadWeights);
    }
    Ok(Coupling::new(p, s, entries))
}

/// Exactness report for a coupling against prescribed marginals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingReport {
    pub mass_total_ok: bool,
    pub support_on_plane: bool,
    pub masses_positive: bool,
    pub marginals_ok: [bool; 3],
}

impl CouplingReport {
    pub fn pass(&self) -> bool {
        self.mass_total_ok
            && self.support_on_plane
            && self.masses_positive
            && self.marginals_ok.iter().all(|&ok| ok)
    }
}

/// Checks a coupling exactly: total mass 1, support on the plane
/// `a+b+c = s`, positive masses, and coordinate marginals equal to the three
/// given distributions.
pub fn verify_coupling(c: &Coupling, d1: &Dist, d2: &Dist, d3: &Dist) -> CouplingReport {
    let total: Rat = c.entries.values().sum();
    let mass_total_ok = total.is_one();
    let support_on_plane = c.entries.keys().all(|&(a, b, q)| a + b + q == c.s);
    let masses_positive = c.entries.values().all(|m| m.is_positive());
    let dists = [d1, d2, d3];
    let mut marginals_ok = [false; 3];
    for coord in 0..3 {
        marginals_ok[coord] = dists[coord].p() == c.p
            && c.marginal(coord)
                .is_some_and(|mass| mass.as_slice() == dists[coord].masses());
    }
    CouplingReport {
        mass_total_ok,
        support_on_plane,
        masses_positive,
        marginals_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{rat, uniform, v_dist};

    fn d(p: usize, vals: &[(i64, i64)]) -> Dist {
        Dist::new(p, vals.iter().map(|&(a, b)| rat(a, b)).collect()).unwrap()
    }

    type Frac = (i64, i64);

    fn pair_map(entries: &[((usize, usize), Frac)]) -> BTreeMap<(usize, usize), Rat> {
        entries.iter().map(|&(k, (a, b))| (k, rat(a, b))).collect()
    }

    fn triple_map(
        entries: &[((usize, usize, usize), Frac)],
    ) -> BTreeMap<(usize, usize, usize), Rat> {
        entries.iter().map(|&(k, (a, b))| (k, rat(a, b))).collect()
    }

    #[test]
    fn uniform_pair_small_cases() {
        assert_eq!(
            *couple_uniform_pair(1, 1).entries(),
            pair_map(&[
                ((0, 0), (1, 3)),
                ((0, 1), (1, 6)),
                ((1, 0), (1, 6)),
                ((1, 1), (1, 3)),
            ])
        );
        assert_eq!(
            *couple_uniform_pair(3, 0).entries(),
            pair_map(&[
                ((0, 0), (1, 4)),
                ((1, 0), (1, 4)),
                ((2, 0), (1, 4)),
                ((3, 0), (1, 4)),
            ])
        );
        assert_eq!(
            *couple_uniform_pair(2, 1).entries(),
            pair_map(&[
                ((0, 0), (1, 4)),
                ((0, 1), (1, 12)),
                ((1, 0), (1, 6)),
                ((1, 1), (1, 6)),
                ((2, 0), (1, 12)),
                ((2, 1), (1, 4)),
            ])
        );
    }

    #[test]
    fn uniform_pair_marginals_exact() {
        for m in 0..=8 {
            for n in 0..=8 {
                let pc = couple_uniform_pair(m, n);
                let mut mx = vec![Rat::zero(); m + 1];
                let mut my = vec![Rat::zero(); n + 1];
                let mut msum = vec![Rat::zero(); m + n + 1];
                for ((x, y), q) in pc.entries() {
                    mx[*x] += q;
                    my[*y] += q;
                    msum[x + y] += q;
                }
                assert!(mx.iter().all(|v| *v == rat(1, m as i64 + 1)));
                assert!(my.iter().all(|v| *v == rat(1, n as i64 + 1)));
                assert!(msum.iter().all(|v| *v == rat(1, (m + n) as i64 + 1)));
            }
        }
    }

    #[test]
    fn lastcase_examples() {
        let c = couple_uniform_blend(1, 0, 3).unwrap();
        assert_eq!(
            *c.entries(),
            triple_map(&[
                ((0, 2, 0), (1, 3)),
                ((1, 1, 0), (1, 3)),
                ((0, 0, 2), (1, 6)),
                ((1, 0, 1), (1, 6)),
            ])
        );
        let report = verify_coupling(
            &c,
            &uniform(1).pad(3).unwrap(),
            &uniform(2),
            &v_dist(0, 2, &rat_int(1)).unwrap(),
        );
        assert!(report.pass());

        assert_eq!(couple_uniform_blend(1, 1, 2), Err(CoupleError::BadParams));
        assert_eq!(couple_uniform_blend(0, 1, 4), Err(CoupleError::BadParams));

        let c = couple_uniform_blend(2, 0, 4).unwrap();
        let report = verify_coupling(
            &c,
            &uniform(2).pad(4).unwrap(),
            &uniform(3),
            &v_dist(0, 3, &rat_int(1)).unwrap(),
        );
        assert!(report.pass());
    }

    #[test]
    fn tail_inequality_gap_examples() {
        let two_thirds = d(2, &[(2, 3), (1, 3)]);
        assert_eq!(
            tail_inequality_gap(&two_thirds, &two_thirds, &two_thirds, 0).unwrap(),
            Rat::zero()
        );
        assert_eq!(
            tail_inequality_gap(&two_thirds, &two_thirds, &two_thirds, 1).unwrap(),
            rat(1, 3)
        );
        assert!(matches!(
            tail_inequality_gap(&uniform(2), &uniform(2), &uniform(2), 0),
            Err(CoupleError::BadTriple(_))
        ));
    }

    #[test]
    fn induction_step_examples() {
        let half = d(3, &[(1, 2), (1, 2), (0, 1)]);
        let c = couple_induction_step(&uniform(2), &half, &half).unwrap();
        assert_eq!(
            *c.entries(),
            triple_map(&[
                ((0, 1, 1), (1, 3)),
                ((1, 0, 1), (1, 6)),
                ((1, 1, 0), (1, 6)),
                ((2, 0, 0), (1, 3)),
            ])
        );

        let point = Dist::point(1, 0);
        let c = couple_induction_step(&point, &point, &point).unwrap();
        assert_eq!(*c.entries(), triple_map(&[((0, 0, 0), (1, 1))]));

        let padded_zero = Dist::point(3, 0);
        assert_eq!(
            couple_induction_step(&uniform(2), &uniform(2), &padded_zero),
            Err(CoupleError::TopMass(2))
        );
    }

    #[test]
    fn couple_zero_uniform_uniform() {
        for p in [2usize, 3, 5, 7] {
            let zero = Dist::point(p, 0);
            let u = uniform(p - 1);
            let c = couple(&zero, &u, &u).unwrap();
            let expect: BTreeMap<_, _> = (0..p)
                .map(|k| ((0, k, p - 1 - k), rat(1, p as i64)))
                .collect();
            assert_eq!(*c.entries(), expect);
        }
    }

    #[test]
    fn couple_p2_triple_is_forced() {
        let t = d(2, &[(2, 3), (1, 3)]);
        let c = couple(&t, &t, &t).unwrap();
        assert_eq!(
            *c.entries(),
            triple_map(&[
                ((1, 0, 0), (1, 3)),
                ((0, 1, 0), (1, 3)),
                ((0, 0, 1), (1, 3)),
            ])
        );
    }

    #[test]
    fn couple_rejects_bad_triples() {
        assert!(matches!(
            couple(&uniform(2), &uniform(2), &uniform(2)),
            Err(CoupleError::BadTriple(_))
        ));
        let rising = Dist::new(2, vec![rat(1, 3), rat(2, 3)]).unwrap();
        assert!(matches!(
            couple(&rising, &uniform(1), &Dist::point(2, 0)),
            Err(CoupleError::BadTriple(_))
        ));
        assert!(matches!(
            couple(&uniform(1), &uniform(1), &Dist::point(3, 0)),
            Err(CoupleError::BadTriple(_))
        ));
    }

    #[test]
    fn couple_full_support_triple() {
        // All three carry top mass, forcing the decomposition path.
        let t = d(3, &[(1, 2), (1, 3), (1, 6)]);
        let c = couple(&t, &t, &t).unwrap();
        assert!(verify_coupling(&c, &t, &t, &t).pass());
    }

    #[test]
    fn mix_couplings_cases() {
        let t = d(2, &[(2, 3), (1, 3)]);
        let c = couple(&t, &t, &t).unwrap();
        assert_eq!(mix_couplings(&[(rat_int(1), c.clone())]).unwrap(), c);

        let a = Coupling::new(2, 1, triple_map(&[((1, 0, 0), (1, 1))]));
        let b = Coupling::new(2, 1, triple_map(&[((0, 1, 0), (1, 1))]));
        let m = mix_couplings(&[(rat(1, 2), a.clone()), (rat(1, 2), b.clone())]).unwrap();
        assert_eq!(
            *m.entries(),
            triple_map(&[((1, 0, 0), (1, 2)), ((0, 1, 0), (1, 2))])
        );

        assert_eq!(
            mix_couplings(&[(rat(1, 3), a.clone()), (rat(1, 3), b)]),
            Err(CoupleError::BadWeights)
        );
        let other = Coupling::new(3, 2, triple_map(&[((0, 1, 1), (1, 1))]));
        assert_eq!(
            mix_couplings(&[(rat(1, 2), a), (rat(1, 2), other)]),
            Err(CoupleError::MixedShapes)
        );
    }

    #[test]
    fn verify_coupling_detects_failures() {
        let t = d(2, &[(2, 3), (1, 3)]);
        let good = couple(&t, &t, &t).unwrap();
        assert!(verify_coupling(&good, &t, &t, &t).pass());

        let off_plane = Coupling::from_raw(
            2,
            1,
            triple_map(&[((1, 1, 0), (1, 2)), ((0, 0, 1), (1, 2))]),
        );
        let report = verify_coupling(&off_plane, &t, &t, &t);
        assert!(!report.support_on_plane);
        assert!(!report.pass());

        let half = d(2, &[(1, 2), (1, 2)]);
        let report = verify_coupling(&good, &half, &half, &half);
        assert!(report.mass_total_ok && report.support_on_plane);
        assert_eq!(report.marginals_ok, [false, false, false]);
    }

    #[test]
    fn coupling_as_mixture_recombines() {
        // Mixing couplings of the same triple still verifies.
        let t = d(3, &[(1, 2), (1, 3), (1, 6)]);
        let c = couple(&t, &t, &t).unwrap();
        let m = mix_couplings(&[(rat(1, 2), c.clone()), (rat(1, 2), c.clone())]).unwrap();
        assert_eq!(m, c);
        assert!(verify_coupling(&m, &t, &t, &t).pass());
    }

    #[test]
    fn equal_components_give_symmetric_couplings() {
        let t = d(3, &[(1, 2), (1, 3), (1, 6)]);
        let c = couple(&t, &t, &t).unwrap();
        for perm in [[0, 2, 1], [1, 0, 2], [2, 1, 0], [1, 2, 0], [2, 0, 1]] {
            assert_eq!(c.permuted(perm), c);
        }
    }
}
