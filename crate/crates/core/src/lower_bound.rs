//! Pairwise-incompatibility certificates for dimension lower bounds.
//!
//! Two losing coalitions `a`, `b` are incompatible when there are winning
//! coalitions `p`, `q` with `p ∪ q = a ∪ b` and `p ∩ q = a ∩ b`. Any weighted
//! game admitting `p` and `q` gives `w(a) + w(b) = w(p) + w(q) >= 2·quota`, so
//! it cannot keep both `a` and `b` losing. A family of `k` pairwise
//! incompatible losing coalitions therefore needs `k` distinct weighted games
//! in any intersection representation.
//!
//! The search only considers `p = (a∩b) ∪ X`, `q = (a∩b) ∪ (Δ \ X)` for
//! `X ⊆ Δ = a △ b`. Nothing is lost: any winning pair with `p ∪ q ⊆ a ∪ b`
//! and `p ∩ q ⊆ a ∩ b` can be enlarged (monotonicity keeps both winning) until
//! both contain `a ∩ b` and together split `Δ`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coalition::{full_mask, Coalition};
use crate::compiled::Compiled;
use crate::error::{GameError, Result};
use crate::game::{GameExpr, WeightedGame};
use crate::sweep::{install, maximal_satisfying, IntervalPredicate, SweepConfig};

/// Default limit on `|a △ b|` for a pair search.
pub const DEFAULT_DELTA_CAP: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IncompatibilityCertificate {
    pub a: Coalition,
    pub b: Coalition,
    /// Part of `a △ b` assigned to `p`.
    pub x: Coalition,
    pub p: Coalition,
    pub q: Coalition,
}

impl IncompatibilityCertificate {
    /// Re-checks the set identities and the four evaluations against `v`.
    pub fn check(&self, v: &GameExpr) -> Result<bool> {
        let union = self.a.union(&self.b)?;
        let common = self.a.intersection(&self.b)?;
        let delta = self.a.symmetric_difference(&self.b)?;
        Ok(self.x.is_subset(&delta)?
            && self.p.union(&self.q)? == union
            && self.p.intersection(&self.q)? == common
            && v.evaluate(&self.p)?
            && v.evaluate(&self.q)?
            && !v.evaluate(&self.a)?
            && !v.evaluate(&self.b)?)
    }
}

fn find_in(
    v: &Compiled,
    a: u32,
    b: u32,
    n: usize,
) -> Option<(u32, u32, u32)> {
    let common = a & b;
    let delta = a ^ b;
    if delta == 0 {
        return None;
    }
    // Fixing the lowest element of Δ inside X removes the X ↔ Δ\X symmetry.
    let lowest = delta & delta.wrapping_neg();
    let rest = delta & !lowest;
    let mut sub = 0u32;
    loop {
        let x = lowest | sub;
        let p = common | x;
        let q = common | (delta & !x);
        if v.wins(p) && v.wins(q) {
            debug_assert!(p | q == (a | b) & full_mask(n));
            return Some((x, p, q));
        }
        sub = sub.wrapping_sub(rest) & rest;
        if sub == 0 {
            return None;
        }
    }
}

/// Searches splits of `a △ b` in increasing order of `X` and returns the
/// first certificate found.
pub fn find_certificate(
    v: &GameExpr,
    a: &Coalition,
    b: &Coalition,
    delta_cap: usize,
) -> Result<Option<IncompatibilityCertificate>> {
    find_with(&Compiled::new(v), v, a, b, delta_cap)
}

fn find_with(
    compiled: &Compiled,
    v: &GameExpr,
    a: &Coalition,
    b: &Coalition,
    delta_cap: usize,
) -> Result<Option<IncompatibilityCertificate>> {
    let n = v.n();
    for s in [a, b] {
        if s.n() != n {
            return Err(GameError::UniverseMismatch { left: n, right: s.n() });
        }
        if v.evaluate(s)? {
            return Err(GameError::NotLosing { coalition: *s });
        }
    }
    let size = a.symmetric_difference(b)?.len();
    if size > delta_cap {
        return Err(GameError::SearchCapExceeded { size, cap: delta_cap });
    }
    let found = find_in(compiled, a.bits(), b.bits(), n).map(|(x, p, q)| {
        IncompatibilityCertificate {
            a: *a,
            b: *b,
            x: Coalition::from_bits_unchecked(x, n),
            p: Coalition::from_bits_unchecked(p, n),
            q: Coalition::from_bits_unchecked(q, n),
        }
    });
    if let Some(cert) = &found {
        assert!(cert.check(v)?, "certificate failed its own check: {cert:?}");
    }
    Ok(found)
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum PairStatus {
    Certified { certificate: IncompatibilityCertificate },
    /// No split works. This does not prove the pair compatible.
    NotCertified,
    /// One side is winning; the pair was not searched.
    Skipped,
    NotAttempted { delta_size: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct PairResult {
    pub i: usize,
    pub j: usize,
    #[serde(flatten)]
    pub status: PairStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateSetReport {
    pub coalitions: Vec<Coalition>,
    pub losing: Vec<bool>,
    pub all_losing: bool,
    /// Pairs `(i, j)` with `i < j` in row-major order.
    pub pairs: Vec<PairResult>,
    /// The set size, present only when every coalition loses and every pair
    /// is certified. Implies that the game's dimension is at least this.
    pub lower_bound: Option<usize>,
}

impl CertificateSetReport {
    pub fn certified_pairs(&self) -> usize {
        self.pairs
            .iter()
            .filter(|p| matches!(p.status, PairStatus::Certified { .. }))
            .count()
    }
}

pub fn verify_certificate_set(
    v: &GameExpr,
    coalitions: &[Coalition],
    delta_cap: usize,
    cfg: SweepConfig,
) -> Result<CertificateSetReport> {
    if coalitions.is_empty() {
        return Err(GameError::InvalidExpr("empty coalition list".into()));
    }
    for (i, c) in coalitions.iter().enumerate() {
        if c.n() != v.n() {
            return Err(GameError::UniverseMismatch { left: v.n(), right: c.n() });
        }
        if coalitions[..i].contains(c) {
            return Err(GameError::DuplicateCoalition(*c));
        }
    }
    let compiled = Compiled::new(v);
    let losing: Vec<bool> = coalitions.iter().map(|c| !compiled.wins(c.bits())).collect();
    let index_pairs: Vec<(usize, usize)> = (0..coalitions.len())
        .flat_map(|i| (i + 1..coalitions.len()).map(move |j| (i, j)))
        .collect();
    let pairs = install(cfg, || {
        index_pairs
            .par_iter()
            .map(|&(i, j)| {
                let status = if !(losing[i] && losing[j]) {
                    Ok(PairStatus::Skipped)
                } else {
                    match find_with(
                        &compiled,
                        v,
                        &coalitions[i],
                        &coalitions[j],
                        delta_cap,
                    ) {
                        Ok(Some(certificate)) => Ok(PairStatus::Certified { certificate }),
                        Ok(None) => Ok(PairStatus::NotCertified),
                        Err(GameError::SearchCapExceeded { size, .. }) => {
                            Ok(PairStatus::NotAttempted { delta_size: size })
                        }
                        Err(e) => Err(e),
                    }
                };
                status.map(|status| PairResult { i, j, status })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let all_losing = losing.iter().all(|&l| l);
    let all_pairs = pairs
        .iter()
        .all(|p| matches!(p.status, PairStatus::Certified { .. }));
    Ok(CertificateSetReport {
        coalitions: coalitions.to_vec(),
        losing,
        all_losing,
        pairs,
        lower_bound: (all_losing && all_pairs).then_some(coalitions.len()),
    })
}

/// Best-effort search for a large certified set.
///
/// The pool mixes a seeded sample of maximal losing coalitions with random
/// greedy completions to maximal losing coalitions. Up to `pair_budget` pairs
/// are tested, then a clique is grown greedily from each of the highest-degree
/// vertices. No optimality claim.
pub fn search_certificate_set(
    v: &GameExpr,
    pool_budget: usize,
    pair_budget: usize,
    seed: u64,
    cfg: SweepConfig,
) -> Result<CertificateSetReport> {
    if pool_budget == 0 || pair_budget == 0 {
        return Err(GameError::InvalidExpr("budgets must be positive".into()));
    }
    let n = v.n();
    let compiled = Compiled::new(v);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let nonempty: GameExpr = WeightedGame::unit(n, 1)?.into();
    let frontier = maximal_satisfying(&IntervalPredicate::new(nonempty, v.clone())?, cfg);
    let mut maximal: Vec<u32> = frontier.maximal_elements.iter().map(|c| c.bits()).collect();
    maximal.shuffle(&mut rng);

    let mut pool: Vec<u32> = maximal.iter().take(pool_budget.div_ceil(2)).copied().collect();
    let mut attempts = 0;
    while pool.len() < pool_budget && !maximal.is_empty() && attempts < 4 * pool_budget {
        attempts += 1;
        let mut s = maximal[rng.random_range(0..maximal.len())];
        for _ in 0..2 {
            if s != 0 {
                let members: Vec<u32> = (0..n as u32).filter(|j| s & (1 << j) != 0).collect();
                s &= !(1 << members[rng.random_range(0..members.len())]);
            }
        }
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.shuffle(&mut rng);
        for j in order {
            if s & (1 << j) == 0 && !compiled.wins(s | (1 << j)) {
                s |= 1 << j;
            }
        }
        if !pool.contains(&s) {
            pool.push(s);
        }
    }
    if pool.is_empty() {
        // Only the empty coalition loses.
        pool.push(0);
    }

    let m = pool.len();
    let candidates: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .filter(|&(i, j)| ((pool[i] ^ pool[j]).count_ones() as usize) <= DEFAULT_DELTA_CAP)
        .take(pair_budget)
        .collect();
    let edges: Vec<bool> = install(cfg, || {
        candidates
            .par_iter()
            .map(|&(i, j)| find_in(&compiled, pool[i], pool[j], n).is_some())
            .collect()
    });
    let mut adjacent = vec![vec![false; m]; m];
    for (&(i, j), &e) in candidates.iter().zip(&edges) {
        adjacent[i][j] = e;
        adjacent[j][i] = e;
    }
    let degree: Vec<usize> = adjacent.iter().map(|r| r.iter().filter(|&&e| e).count()).collect();
    let mut by_degree: Vec<usize> = (0..m).collect();
    by_degree.sort_by_key(|&i| (std::cmp::Reverse(degree[i]), i));

    let mut best = vec![by_degree[0]];
    for &start in by_degree.iter().take(32) {
        let mut clique = vec![start];
        for &cand in &by_degree {
            if clique.iter().all(|&c| adjacent[c][cand]) {
                clique.push(cand);
            }
        }
        if clique.len() > best.len() {
            best = clique;
        }
    }
    let coalitions: Vec<Coalition> = best
        .into_iter()
        .map(|i| Coalition::from_bits_unchecked(pool[i], n))
        .collect();
    verify_certificate_set(v, &coalitions, DEFAULT_DELTA_CAP, cfg)
}
