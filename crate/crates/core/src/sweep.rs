//! Exhaustive enumeration of all `2^n` coalitions.
//!
//! The coalition space is cut into contiguous blocks by the high-order bits.
//! Blocks run on a rayon pool of the configured size and their results are
//! merged in block order, so every public result is independent of the
//! worker count.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::coalition::{full_mask, Coalition};
use crate::compiled::{Compiled, CHUNK_BITS};
use crate::error::{GameError, Result};
use crate::game::GameExpr;

/// Number of high-order bits used to form blocks (capped by `n`).
const BLOCK_BITS: usize = 8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SweepConfig {
    /// Worker threads; `0` means the machine's available parallelism.
    pub threads: usize,
}

impl SweepConfig {
    pub fn with_threads(threads: usize) -> Self {
        Self { threads }
    }

    fn resolved_threads(&self) -> usize {
        if self.threads == 0 {
            std::thread::available_parallelism().map_or(1, |p| p.get())
        } else {
            self.threads
        }
    }
}

/// Coalitions that win in `up` and lose in `down`.
///
/// Winning sets of `up` are upward-closed and losing sets of `down` are
/// downward-closed, so the satisfying set is an interval-shaped family.
#[derive(Clone, Debug)]
pub struct IntervalPredicate {
    up: GameExpr,
    down: GameExpr,
}

impl IntervalPredicate {
    pub fn new(up: GameExpr, down: GameExpr) -> Result<Self> {
        if up.n() != down.n() {
            return Err(GameError::UniverseMismatch {
                left: up.n(),
                right: down.n(),
            });
        }
        Ok(Self { up, down })
    }

    pub fn n(&self) -> usize {
        self.up.n()
    }

    pub fn up(&self) -> &GameExpr {
        &self.up
    }

    pub fn down(&self) -> &GameExpr {
        &self.down
    }

    pub fn holds(&self, s: &Coalition) -> Result<bool> {
        Ok(self.up.evaluate(s)? && !self.down.evaluate(s)?)
    }
}

#[derive(Clone, Debug, Default)]
pub struct SweepReport {
    pub satisfying_count: u64,
    /// Sorted ascending; empty for plain streams.
    pub maximal_elements: Vec<Coalition>,
    pub elapsed: Duration,
    pub coalitions_visited: u64,
}

/// Per-block accumulator for [`stream`]. Later blocks are merged into
/// earlier ones in block order.
pub trait SweepVisitor: Send {
    fn visit(&mut self, s: Coalition);
    fn merge(&mut self, later: Self)
    where
        Self: Sized;
}

/// Counts only.
#[derive(Default)]
pub struct NoopVisitor;

impl SweepVisitor for NoopVisitor {
    fn visit(&mut self, _: Coalition) {}
    fn merge(&mut self, _: Self) {}
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Equivalence {
    Equal,
    /// Smallest coalition (as an unsigned bit pattern) on which the two
    /// games disagree, and whether the left-hand game wins on it.
    Differ { coalition: Coalition, left_wins: bool },
}

impl Equivalence {
    pub fn is_equal(&self) -> bool {
        matches!(self, Equivalence::Equal)
    }
}

struct Blocks {
    count: usize,
    size: u64,
}

impl Blocks {
    fn new(n: usize) -> Self {
        // Blocks never split a chunk.
        let bits = BLOCK_BITS.min(n - n.min(CHUNK_BITS));
        Self {
            count: 1 << bits,
            size: 1u64 << (n - bits),
        }
    }

    fn range(&self, b: usize) -> std::ops::Range<u64> {
        let start = b as u64 * self.size;
        start..start + self.size
    }
}

/// Runs `f` on a pool sized by `cfg`; inline when one worker is requested.
pub(crate) fn install<R: Send>(cfg: SweepConfig, f: impl FnOnce() -> R + Send) -> R {
    let threads = cfg.resolved_threads();
    if threads <= 1 {
        return f();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("failed to build sweep thread pool")
        .install(f)
}

fn run_blocks<R, F>(n: usize, cfg: SweepConfig, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize, std::ops::Range<u64>) -> R + Sync,
{
    let blocks = Blocks::new(n);
    if cfg.resolved_threads() <= 1 {
        return (0..blocks.count).map(|b| f(b, blocks.range(b))).collect();
    }
    install(cfg, || {
        (0..blocks.count)
            .into_par_iter()
            .map(|b| f(b, blocks.range(b)))
            .collect()
    })
}

/// Exhaustively compares two games on every coalition.
pub fn equivalent(a: &GameExpr, b: &GameExpr, cfg: SweepConfig) -> Result<Equivalence> {
    if a.n() != b.n() {
        return Err(GameError::UniverseMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    let n = a.n();
    let (ca, cb) = (Compiled::new(a), Compiled::new(b));
    let first_hit = AtomicUsize::new(usize::MAX);
    let hits = run_blocks(n, cfg, |block, range| {
        if block > first_hit.load(Ordering::Relaxed) {
            return None;
        }
        for base in range.step_by(ca.chunk_len() as usize) {
            let base = base as u32;
            let left = ca.wins_chunk(base);
            let diff = left ^ cb.wins_chunk(base);
            if diff != 0 {
                first_hit.fetch_min(block, Ordering::Relaxed);
                let j = diff.trailing_zeros();
                return Some((base | j, left >> j & 1 == 1));
            }
        }
        None
    });
    Ok(match hits.into_iter().flatten().next() {
        Some((bits, left_wins)) => Equivalence::Differ {
            coalition: Coalition::from_bits_unchecked(bits, n),
            left_wins,
        },
        None => Equivalence::Equal,
    })
}

/// Visits every coalition satisfying `p` exactly once.
pub fn stream<V, F>(p: &IntervalPredicate, cfg: SweepConfig, make: F) -> (SweepReport, V)
where
    V: SweepVisitor,
    F: Fn() -> V + Sync,
{
    let started = Instant::now();
    let n = p.n();
    let (up, down) = (Compiled::new(&p.up), Compiled::new(&p.down));
    let parts = run_blocks(n, cfg, |_, range| {
        let mut visitor = make();
        let mut count = 0u64;
        for base in range.step_by(up.chunk_len() as usize) {
            let base = base as u32;
            let mut hits = up.wins_chunk(base);
            if hits != 0 {
                hits &= !down.wins_chunk(base);
            }
            count += u64::from(hits.count_ones());
            while hits != 0 {
                let j = hits.trailing_zeros();
                visitor.visit(Coalition::from_bits_unchecked(base | j, n));
                hits &= hits - 1;
            }
        }
        (count, visitor)
    });
    let mut total = 0;
    let mut merged: Option<V> = None;
    for (count, v) in parts {
        total += count;
        match merged.as_mut() {
            None => merged = Some(v),
            Some(m) => m.merge(v),
        }
    }
    let report = SweepReport {
        satisfying_count: total,
        maximal_elements: Vec::new(),
        elapsed: started.elapsed(),
        coalitions_visited: 1u64 << n,
    };
    (report, merged.expect("at least one block"))
}

/// Inclusion-maximal coalitions satisfying `p`.
///
/// `S` is maximal iff it satisfies `p` and `S ∪ {j}` wins in the down-part
/// for every `j ∉ S`: the extension still wins the up-part, so it can only
/// fail by winning the down-part, and every larger superset inherits that.
pub fn maximal_satisfying(p: &IntervalPredicate, cfg: SweepConfig) -> SweepReport {
    let started = Instant::now();
    let n = p.n();
    let full = full_mask(n);
    let (up, down) = (Compiled::new(&p.up), Compiled::new(&p.down));
    let parts = run_blocks(n, cfg, |_, range| {
        let mut count = 0u64;
        let mut maximal = Vec::new();
        let low = (up.chunk_len() - 1) as u32;
        for base in range.step_by(up.chunk_len() as usize) {
            let base = base as u32;
            let mut hits = up.wins_chunk(base);
            if hits == 0 {
                continue;
            }
            let down_hits = down.wins_chunk(base);
            hits &= !down_hits;
            count += u64::from(hits.count_ones());
            while hits != 0 {
                let j = hits.trailing_zeros();
                hits &= hits - 1;
                let s = base | j;
                // One-player extensions inside the chunk are read off the
                // chunk mask; the rest are evaluated directly.
                let mut inside = !j & low;
                let mut is_max = true;
                while inside != 0 {
                    let bit = inside & inside.wrapping_neg();
                    if down_hits >> (j | bit) & 1 == 0 {
                        is_max = false;
                        break;
                    }
                    inside &= inside - 1;
                }
                let mut outside = !s & full & !low;
                while is_max && outside != 0 {
                    let bit = outside & outside.wrapping_neg();
                    is_max = down.wins(s | bit);
                    outside &= outside - 1;
                }
                if is_max {
                    maximal.push(s);
                }
            }
        }
        (count, maximal)
    });
    let mut report = SweepReport {
        coalitions_visited: 1u64 << n,
        ..SweepReport::default()
    };
    for (count, maximal) in parts {
        report.satisfying_count += count;
        report
            .maximal_elements
            .extend(maximal.into_iter().map(|s| Coalition::from_bits_unchecked(s, n)));
    }
    report.elapsed = started.elapsed();
    report
}

#[cfg(test)]
pub(crate) fn all_coalitions(n: usize) -> impl Iterator<Item = Coalition> {
    (0..(1u64 << n)).map(move |b| Coalition::from_bits_unchecked(b as u32, n))
}
