//! Rewriting games as intersections of weighted games.
//!
//! Two constructions are provided:
//!
//! * [`construction_one`]: given `v` and a weighted intersection `v'` with
//!   `W(v) ⊆ W(v')`, every inclusion-maximal coalition that wins in `v'` but
//!   loses in `v` contributes one veto game, and `v = v' ∧ ⋀ veto(S)`.
//! * [`theorem_one`]: rewrites a union `v_A ∨ v_B` of two weighted games. The
//!   gap set `D` holds coalitions losing in `v_A` and winning in `v_B`. Each
//!   player `k` common to all of `D` yields a boosted copy of `v_A` in which
//!   `w_k` grows by `u = q_A - min_{S∈D} w_A(S)`. The boosted games admit every
//!   winner of the union, and [`construction_one`] closes the remaining gap.

use serde::Serialize;

use crate::coalition::{full_mask, Coalition};
use crate::error::{GameError, Result};
use crate::game::{GameExpr, WeightedGame};
use crate::sweep::{
    equivalent, maximal_satisfying, stream, Equivalence, IntervalPredicate, SweepConfig,
    SweepVisitor,
};

/// Default number of gap coalitions kept verbatim in a [`DSummary`].
pub const DEFAULT_MEMBER_CAP: usize = 1_000_000;

/// Streamed summary of the gap set `D = {S : w_A(S) < q_A, w_B(S) >= q_B}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DSummary {
    pub member_count: u64,
    /// Intersection of all members; the grand coalition when `D` is empty.
    pub t_set: Coalition,
    /// `min w_A(S)` over `D`, in the game's own (scaled) units.
    pub min_weight_in_a: Option<u64>,
    /// `q_A - min_weight_in_a`; at least 1 whenever `D` is non-empty.
    pub u: Option<u64>,
    /// Sorted members, kept only when `member_count <= cap`.
    pub members: Option<Vec<Coalition>>,
}

impl DSummary {
    pub fn is_empty(&self) -> bool {
        self.member_count == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Theorem1,
    Construction1,
    TrivialA,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionResult {
    /// Weighted games whose intersection equals the input.
    pub games: Vec<WeightedGame>,
    pub d_summary: Option<DSummary>,
    /// Players whose weight was boosted, one game each (theorem-1 only).
    pub boosted: Vec<usize>,
    pub f_set: Vec<Coalition>,
    pub method: Method,
}

impl DecompositionResult {
    pub fn intersection(&self) -> Result<GameExpr> {
        GameExpr::all_of(self.games.clone())
    }
}

/// `[1; 1_{j∉S}]`: the only losing coalitions are the subsets of `s`.
pub fn veto_game(s: &Coalition) -> Result<WeightedGame> {
    if s.is_grand() {
        return Err(GameError::InvalidGame(
            "veto game of the grand coalition has no weight".into(),
        ));
    }
    let weights = (0..s.n()).map(|j| u64::from(!s.contains(j))).collect();
    WeightedGame::new(weights, 1)
}

/// `v = v' ∧ ⋀_{S∈F} veto(S)` where `F` is the set of maximal coalitions
/// winning in `v'` and losing in `v`. `v_prime` must be an AND-only tree.
pub fn construction_one(
    v: &GameExpr,
    v_prime: &GameExpr,
    cfg: SweepConfig,
) -> Result<DecompositionResult> {
    if v.n() != v_prime.n() {
        return Err(GameError::UniverseMismatch {
            left: v.n(),
            right: v_prime.n(),
        });
    }
    if !v_prime.is_intersection() {
        return Err(GameError::InvalidExpr(
            "the candidate game must be an intersection of weighted games".into(),
        ));
    }
    let both = GameExpr::and(vec![v.clone(), v_prime.clone()])?;
    if let Equivalence::Differ { coalition, .. } = equivalent(v, &both, cfg)? {
        return Err(GameError::ContainmentViolated { witness: coalition });
    }
    let f_set = gap_frontier(v_prime, v, cfg)?;
    let mut games: Vec<WeightedGame> = v_prime.leaves().into_iter().cloned().collect();
    for s in &f_set {
        games.push(veto_game(s)?);
    }
    Ok(DecompositionResult {
        games,
        d_summary: None,
        boosted: Vec::new(),
        f_set,
        method: Method::Construction1,
    })
}

fn gap_frontier(up: &GameExpr, down: &GameExpr, cfg: SweepConfig) -> Result<Vec<Coalition>> {
    let p = IntervalPredicate::new(up.clone(), down.clone())?;
    Ok(maximal_satisfying(&p, cfg).maximal_elements)
}

struct GapAccumulator<'a> {
    game_a: &'a WeightedGame,
    cap: usize,
    count: u64,
    common: u32,
    min_weight: u64,
    members: Option<Vec<Coalition>>,
}

impl SweepVisitor for GapAccumulator<'_> {
    fn visit(&mut self, s: Coalition) {
        self.count += 1;
        self.common &= s.bits();
        self.min_weight = self.min_weight.min(self.game_a.weight_sum_bits(s.bits()));
        if let Some(m) = self.members.as_mut() {
            if m.len() < self.cap {
                m.push(s);
            } else {
                self.members = None;
            }
        }
    }

    fn merge(&mut self, later: Self) {
        self.count += later.count;
        self.common &= later.common;
        self.min_weight = self.min_weight.min(later.min_weight);
        self.members = match (self.members.take(), later.members) {
            (Some(mut a), Some(b)) if a.len() + b.len() <= self.cap => {
                a.extend(b);
                Some(a)
            }
            _ => None,
        };
    }
}

pub fn compute_d_summary(
    game_a: &WeightedGame,
    game_b: &WeightedGame,
    cap: usize,
    cfg: SweepConfig,
) -> Result<DSummary> {
    let n = game_a.n();
    let p = IntervalPredicate::new(game_b.clone().into(), game_a.clone().into())?;
    let (report, acc) = stream(&p, cfg, || GapAccumulator {
        game_a,
        cap,
        count: 0,
        common: full_mask(n),
        min_weight: u64::MAX,
        members: Some(Vec::new()),
    });
    debug_assert_eq!(report.satisfying_count, acc.count);
    let empty = acc.count == 0;
    let min_weight_in_a = (!empty).then_some(acc.min_weight);
    let mut members = acc.members;
    if let Some(m) = members.as_mut() {
        m.sort();
    }
    Ok(DSummary {
        member_count: acc.count,
        t_set: Coalition::from_bits_unchecked(acc.common, n),
        min_weight_in_a,
        u: min_weight_in_a.map(|w| game_a.quota() - w),
        members,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct TheoremOneOptions {
    pub member_cap: usize,
    /// Added to `u` before the boosted games are built. Only for exercising
    /// the verification path with a deliberately broken construction.
    #[doc(hidden)]
    pub u_offset: i64,
}

impl Default for TheoremOneOptions {
    fn default() -> Self {
        Self {
            member_cap: DEFAULT_MEMBER_CAP,
            u_offset: 0,
        }
    }
}

/// Rewrites `v_A ∨ v_B` as `⋀_{k∈T} v^k ∧ ⋀_{S∈F} veto(S)`.
///
/// Fails with [`GameError::Inapplicable`] when the gap set is non-empty but
/// has no common player.
pub fn theorem_one(
    game_a: &WeightedGame,
    game_b: &WeightedGame,
    cfg: SweepConfig,
) -> Result<DecompositionResult> {
    theorem_one_with(game_a, game_b, TheoremOneOptions::default(), cfg)
}

pub fn theorem_one_with(
    game_a: &WeightedGame,
    game_b: &WeightedGame,
    opts: TheoremOneOptions,
    cfg: SweepConfig,
) -> Result<DecompositionResult> {
    if game_a.n() != game_b.n() {
        return Err(GameError::UniverseMismatch {
            left: game_a.n(),
            right: game_b.n(),
        });
    }
    let summary = compute_d_summary(game_a, game_b, opts.member_cap, cfg)?;
    let Some(u) = summary.u else {
        return Ok(DecompositionResult {
            games: vec![game_a.clone()],
            d_summary: Some(summary),
            boosted: Vec::new(),
            f_set: Vec::new(),
            method: Method::TrivialA,
        });
    };
    if summary.t_set.is_empty() {
        return Err(GameError::Inapplicable {
            summary: Box::new(summary),
        });
    }
    let u = u.checked_add_signed(opts.u_offset).unwrap_or(0);
    let boosted: Vec<usize> = summary.t_set.players().collect();
    let mut games = Vec::with_capacity(boosted.len());
    for &k in &boosted {
        let mut weights = game_a.weights().to_vec();
        weights[k] += u;
        games.push(WeightedGame::new(weights, game_a.quota())?);
    }
    let up = GameExpr::all_of(games.clone())?;
    let union = GameExpr::or(vec![game_a.clone().into(), game_b.clone().into()])?;
    let f_set = gap_frontier(&up, &union, cfg)?;
    for s in &f_set {
        games.push(veto_game(s)?);
    }
    Ok(DecompositionResult {
        games,
        d_summary: Some(summary),
        boosted,
        f_set,
        method: Method::Theorem1,
    })
}
