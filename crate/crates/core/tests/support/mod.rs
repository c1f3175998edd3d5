//! Brute-force oracles and random game generators shared by the
//! integration tests. Nothing here goes through the sweep engine.

#![allow(dead_code)]

use rand::Rng;
use votedim::{Coalition, GameExpr, WeightedGame};

pub fn all(n: usize) -> impl Iterator<Item = Coalition> {
    (0..(1u64 << n)).map(move |b| Coalition::from_bits(b as u32, n).unwrap())
}

pub fn random_game<R: Rng>(rng: &mut R, n: usize, max_weight: u64) -> WeightedGame {
    let mut w: Vec<u64> = (0..n).map(|_| rng.random_range(0..=max_weight)).collect();
    if w.iter().all(|&x| x == 0) {
        w[rng.random_range(0..n)] = 1;
    }
    let total: u64 = w.iter().sum();
    let q = rng.random_range(1..=total);
    WeightedGame::new(w, q).unwrap()
}

pub fn random_expr<R: Rng>(rng: &mut R, n: usize, depth: usize) -> GameExpr {
    if depth == 0 || rng.random_bool(0.3) {
        return random_game(rng, n, 7).into();
    }
    let k = rng.random_range(2..=3);
    let children = (0..k).map(|_| random_expr(rng, n, depth - 1)).collect();
    if rng.random_bool(0.5) {
        GameExpr::and(children).unwrap()
    } else {
        GameExpr::or(children).unwrap()
    }
}

pub fn wins(v: &GameExpr, s: &Coalition) -> bool {
    v.evaluate(s).unwrap()
}

pub fn same_game(a: &GameExpr, b: &GameExpr) -> bool {
    all(a.n()).all(|s| wins(a, &s) == wins(b, &s))
}

/// Inclusion-maximal members of a family.
pub fn maximal(family: &[Coalition]) -> Vec<Coalition> {
    let mut out: Vec<_> = family
        .iter()
        .filter(|s| !family.iter().any(|t| t != *s && s.is_subset(t).unwrap()))
        .copied()
        .collect();
    out.sort();
    out
}

pub fn maximal_losing(v: &GameExpr) -> Vec<Coalition> {
    let losing: Vec<_> = all(v.n()).filter(|s| !s.is_empty() && !wins(v, s)).collect();
    maximal(&losing)
}

pub struct UnionOracle {
    pub d: Vec<Coalition>,
    pub t: Coalition,
    pub u: u64,
    pub f: Vec<Coalition>,
}

/// Gap set, core, slack and frontier of `a ∨ b` computed from the
/// definitions. `None` when the gap set is empty.
pub fn union_oracle(a: &WeightedGame, b: &WeightedGame) -> Option<UnionOracle> {
    let n = a.n();
    let d: Vec<_> = all(n)
        .filter(|s| !a.is_winning(s).unwrap() && b.is_winning(s).unwrap())
        .collect();
    if d.is_empty() {
        return None;
    }
    let t = d
        .iter()
        .fold(Coalition::grand(n).unwrap(), |t, s| t.intersection(s).unwrap());
    let u = a.quota() - d.iter().map(|s| a.weight_sum(s).unwrap()).min().unwrap();
    let boosted_wins = |s: &Coalition| {
        t.players().all(|k| {
            let bonus = if s.contains(k) { u } else { 0 };
            a.weight_sum(s).unwrap() + bonus >= a.quota()
        })
    };
    let gap: Vec<_> = all(n)
        .filter(|s| boosted_wins(s) && !a.is_winning(s).unwrap() && !b.is_winning(s).unwrap())
        .collect();
    Some(UnionOracle {
        d,
        t,
        u,
        f: maximal(&gap),
    })
}

/// Minimal winning coalitions of `v`.
pub fn minimal_winning(v: &GameExpr) -> Vec<Coalition> {
    let winning: Vec<_> = all(v.n()).filter(|s| wins(v, s)).collect();
    winning
        .iter()
        .filter(|s| !winning.iter().any(|t| t != *s && t.is_subset(s).unwrap()))
        .copied()
        .collect()
}

/// Searches integer games with weights and quota in `0..=max` that admit
/// every winner of `v` while `a` and `b` both lose. Returns one if found.
///
/// Exhaustive over the grid with two exact reductions: branches where `a` or
/// `b` already reaches the quota are cut (weights only add), and players
/// outside `a ∪ b` take the largest weight (that can only help winners and
/// never affects `a` or `b`).
pub fn covering_game_on_grid(
    v: &GameExpr,
    a: &Coalition,
    b: &Coalition,
    max: u64,
) -> Option<(Vec<u64>, u64)> {
    let n = v.n();
    let winners = minimal_winning(v);
    let inside: Vec<usize> = a.union(b).unwrap().players().collect();
    for quota in 0..=max {
        let mut w: Vec<u64> = (0..n).map(|j| if a.contains(j) || b.contains(j) { 0 } else { max }).collect();
        if let Some(found) = grid_rec(&winners, a, b, quota, max, &inside, 0, &mut w, 0, 0) {
            return Some(found);
        }
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn grid_rec(
    winners: &[Coalition],
    a: &Coalition,
    b: &Coalition,
    quota: u64,
    max: u64,
    inside: &[usize],
    pos: usize,
    w: &mut Vec<u64>,
    wa: u64,
    wb: u64,
) -> Option<(Vec<u64>, u64)> {
    if wa >= quota || wb >= quota {
        return None;
    }
    if pos == inside.len() {
        let sum = |s: &Coalition| s.players().map(|j| w[j]).sum::<u64>();
        return winners
            .iter()
            .all(|s| sum(s) >= quota)
            .then(|| (w.clone(), quota));
    }
    let j = inside[pos];
    for x in 0..=max {
        w[j] = x;
        let na = wa + if a.contains(j) { x } else { 0 };
        let nb = wb + if b.contains(j) { x } else { 0 };
        if na >= quota || nb >= quota {
            break;
        }
        if let Some(found) = grid_rec(winners, a, b, quota, max, inside, pos + 1, w, na, nb) {
            return Some(found);
        }
    }
    w[j] = 0;
    None
}

fn combinations(n: usize, k: usize) -> Vec<u32> {
    fn rec(start: usize, n: usize, k: usize, acc: u32, out: &mut Vec<u32>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for j in start..n {
            rec(j + 1, n, k - 1, acc | 1 << j, out);
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, 0, &mut out);
    out
}

/// The union rewrite for the population-or-blocking pair worked straight
/// from a population column in plain integer arithmetic, with population
/// weights scaled by 20 against a quota of 13/20 of the total.
///
/// The blocking game needs all but at most `blocking_minority - 1` members,
/// so gap coalitions are found by listing those small complements. Frontier
/// coalitions must contain the core (a boosted game for a core player
/// outside S would otherwise make S win the population game), so only
/// supersets of the core are listed.
pub fn eu_union_oracle(pops: &[u64], blocking_minority: usize) -> Option<UnionOracle> {
    let n = pops.len();
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let weight = |s: u32| (0..n).filter(|&j| s >> j & 1 == 1).map(|j| 20 * pops[j]).sum::<u64>();
    let quota = 13 * pops.iter().sum::<u64>();
    let blocking_quota = n + 1 - blocking_minority;
    let coalition = |s: u32| Coalition::from_bits(s, n).unwrap();

    let mut d: Vec<u32> = (0..blocking_minority)
        .flat_map(|k| combinations(n, k))
        .map(|c| full & !c)
        .filter(|&s| weight(s) < quota)
        .collect();
    if d.is_empty() {
        return None;
    }
    d.sort_unstable();
    let t = d.iter().fold(full, |t, s| t & s);
    let u = quota - d.iter().map(|&s| weight(s)).min().unwrap();

    let outside: Vec<usize> = (0..n).filter(|&j| t >> j & 1 == 0).collect();
    let in_gap = |s: u32| {
        let w = weight(s);
        w < quota && w + u >= quota && (s.count_ones() as usize) < blocking_quota
    };
    let mut f = Vec::new();
    for bits in 0u64..1 << outside.len() {
        let s = outside
            .iter()
            .enumerate()
            .filter(|(i, _)| bits >> i & 1 == 1)
            .fold(t, |s, (_, &j)| s | 1 << j);
        // Above a gap coalition the gap conditions only get harder to meet,
        // so maximality reduces to the single-player extensions.
        if in_gap(s) && outside.iter().all(|&j| s >> j & 1 == 1 || !in_gap(s | 1 << j)) {
            f.push(coalition(s));
        }
    }
    f.sort();
    Some(UnionOracle {
        d: d.into_iter().map(coalition).collect(),
        t: coalition(t),
        u,
        f,
    })
}

/// A random simple game given as the union of unanimity games on a few
/// random coalitions. Every simple game has this form, so this reaches
/// games that are far from weighted.
pub fn random_simple_game<R: Rng>(rng: &mut R, n: usize) -> GameExpr {
    let k = rng.random_range(1..=6);
    let full = (1u64 << n) - 1;
    let parts = (0..k)
        .map(|_| {
            let bits = rng.random_range(1..=full) as u32;
            let s = Coalition::from_bits(bits, n).unwrap();
            let w = (0..n).map(|j| s.contains(j) as u64).collect();
            WeightedGame::new(w, s.len() as u64).unwrap()
        })
        .collect();
    GameExpr::any_of(parts).unwrap()
}
