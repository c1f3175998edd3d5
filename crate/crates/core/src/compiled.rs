//! Flattened, table-driven form of a [`GameExpr`] for exhaustive sweeps.
//!
//! Leaves with equal non-zero weights become popcount tests. Other leaves get
//! two partial-sum tables, one for the low half of the player bits and one for
//! the high half, so a weight sum costs two lookups and an add. Runs of
//! quota-1 indicator leaves inside an intersection (veto games) are packed into
//! one mask list.

use crate::coalition::full_mask;
use crate::game::{GameExpr, Node, Op, WeightedGame};

/// Width of a chunk: 64 coalitions that differ only in players `0..6`.
pub(crate) const CHUNK_BITS: usize = 6;

enum CNode {
    /// `popcount(s & mask) >= min`. `by_need[k]` marks the chunk offsets
    /// with at least `k` members of `mask` among the low players.
    Count {
        mask: u32,
        min: u32,
        by_need: [u64; CHUNK_BITS + 2],
    },
    Sum(Box<SumLeaf>),
    /// Wins iff `s & m != 0` for every mask.
    Vetoes {
        masks: Box<[u32]>,
        /// Per mask: the high part and the chunk offsets hit by the low part.
        split: Box<[(u32, u64)]>,
    },
    And(Box<[CNode]>),
    Or(Box<[CNode]>),
}

struct SumLeaf {
    lo: Box<[u64]>,
    hi: Box<[u64]>,
    quota: u64,
    /// Weight sums of the chunk offsets, ascending.
    chunk_sums: [u64; 1 << CHUNK_BITS],
    /// `suffix[i]`: offsets whose sum ranks at position `i` or later.
    suffix: [u64; (1 << CHUNK_BITS) + 1],
}

impl CNode {
    fn cost(&self) -> usize {
        match self {
            CNode::Count { .. } => 1,
            CNode::Sum(_) => 2,
            CNode::Vetoes { masks, .. } => 1 + masks.len() / 4,
            CNode::And(cs) | CNode::Or(cs) => cs.iter().map(CNode::cost).sum(),
        }
    }
}

pub(crate) struct Compiled {
    n: usize,
    split: u32,
    lo_mask: u32,
    /// Offsets inside a chunk that are real coalitions (all 64 once n >= 6).
    valid: u64,
    root: CNode,
}

impl Compiled {
    pub(crate) fn new(expr: &GameExpr) -> Self {
        let n = expr.n();
        let split = (n as u32).div_ceil(2);
        let width = n.min(CHUNK_BITS);
        let mut c = Self {
            n,
            split,
            lo_mask: full_mask(split as usize),
            valid: if width == CHUNK_BITS {
                u64::MAX
            } else {
                (1u64 << (1 << width)) - 1
            },
            root: CNode::And(Box::new([])),
        };
        c.root = c.compile(expr);
        c
    }

    /// Coalitions per chunk.
    pub(crate) fn chunk_len(&self) -> u64 {
        1 << self.n.min(CHUNK_BITS)
    }

    fn compile(&self, expr: &GameExpr) -> CNode {
        match expr.node() {
            Node::Leaf(g) => self.compile_leaf(g),
            Node::Branch(op, children) => {
                let mut flat = Vec::new();
                for child in children {
                    match (op, self.compile(child)) {
                        (Op::And, CNode::And(inner)) | (Op::Or, CNode::Or(inner)) => {
                            flat.extend(inner.into_vec())
                        }
                        (_, node) => flat.push(node),
                    }
                }
                if *op == Op::And {
                    flat = group_vetoes(flat);
                }
                flat.sort_by_key(CNode::cost);
                match op {
                    Op::And => CNode::And(flat.into_boxed_slice()),
                    Op::Or => CNode::Or(flat.into_boxed_slice()),
                }
            }
        }
    }

    fn compile_leaf(&self, g: &WeightedGame) -> CNode {
        let weights = g.weights();
        let mut mask = 0u32;
        let mut unit = None;
        let mut uniform = true;
        for (i, &w) in weights.iter().enumerate() {
            if w == 0 {
                continue;
            }
            mask |= 1 << i;
            match unit {
                None => unit = Some(w),
                Some(u) if u != w => uniform = false,
                _ => {}
            }
        }
        if uniform {
            // quota <= total weight, so some weight is non-zero.
            let w = unit.expect("game with zero total weight");
            let mut by_need = [0u64; CHUNK_BITS + 2];
            for (k, slot) in by_need.iter_mut().enumerate() {
                for j in 0..64u32 {
                    if (j & mask).count_ones() as usize >= k {
                        *slot |= 1 << j;
                    }
                }
            }
            return CNode::Count {
                mask,
                min: g.quota().div_ceil(w) as u32,
                by_need,
            };
        }
        let lo_bits = self.split as usize;
        let low_chunk = &weights[..self.n.min(CHUNK_BITS)];
        let mut offsets: Vec<(u64, u32)> = (0..64u32)
            .map(|j| {
                let sum = (0..low_chunk.len())
                    .filter(|&i| j & (1 << i) != 0)
                    .map(|i| low_chunk[i])
                    .sum();
                (sum, j)
            })
            .collect();
        offsets.sort();
        let mut chunk_sums = [0u64; 64];
        let mut suffix = [0u64; 65];
        for (i, &(sum, _)) in offsets.iter().enumerate() {
            chunk_sums[i] = sum;
        }
        for i in (0..64).rev() {
            suffix[i] = suffix[i + 1] | (1u64 << offsets[i].1);
        }
        CNode::Sum(Box::new(SumLeaf {
            lo: partial_sums(&weights[..lo_bits]),
            hi: partial_sums(&weights[lo_bits..]),
            quota: g.quota(),
            chunk_sums,
            suffix,
        }))
    }

    #[inline]
    pub(crate) fn wins(&self, s: u32) -> bool {
        self.eval(&self.root, s)
    }

    #[inline]
    fn sum(&self, leaf: &SumLeaf, s: u32) -> u64 {
        // split <= 16, so the shift is in range even for n = 32.
        leaf.lo[(s & self.lo_mask) as usize] + leaf.hi[(s >> self.split) as usize]
    }

    fn eval(&self, node: &CNode, s: u32) -> bool {
        match node {
            CNode::Count { mask, min, .. } => (s & mask).count_ones() >= *min,
            CNode::Sum(leaf) => self.sum(leaf, s) >= leaf.quota,
            CNode::Vetoes { masks, .. } => hits_all(masks, s),
            CNode::And(cs) => cs.iter().all(|c| self.eval(c, s)),
            CNode::Or(cs) => cs.iter().any(|c| self.eval(c, s)),
        }
    }

    /// Outcomes for the chunk starting at `base` (low chunk bits clear): bit
    /// `j` is set iff coalition `base | j` wins.
    #[inline]
    pub(crate) fn wins_chunk(&self, base: u32) -> u64 {
        debug_assert!((base as u64).is_multiple_of(self.chunk_len()));
        self.eval_chunk(&self.root, base) & self.valid
    }

    fn eval_chunk(&self, node: &CNode, base: u32) -> u64 {
        match node {
            CNode::Count { mask, min, by_need } => {
                let have = (base & mask).count_ones();
                let need = min.saturating_sub(have) as usize;
                by_need[need.min(CHUNK_BITS + 1)]
            }
            CNode::Sum(leaf) => {
                let have = self.sum(leaf, base);
                let need = leaf.quota.saturating_sub(have);
                let idx = leaf.chunk_sums.partition_point(|&x| x < need);
                leaf.suffix[idx]
            }
            CNode::Vetoes { split, .. } => {
                let mut acc = u64::MAX;
                for group in split.chunks(32) {
                    for &(high, low) in group {
                        let hit = u64::from(base & high != 0);
                        acc &= low | hit.wrapping_neg();
                    }
                    if acc == 0 {
                        break;
                    }
                }
                acc
            }
            CNode::And(cs) => {
                let mut acc = u64::MAX;
                for c in cs.iter() {
                    acc &= self.eval_chunk(c, base);
                    if acc & self.valid == 0 {
                        break;
                    }
                }
                acc
            }
            CNode::Or(cs) => {
                let mut acc = 0;
                for c in cs.iter() {
                    acc |= self.eval_chunk(c, base);
                    if acc & self.valid == self.valid {
                        break;
                    }
                }
                acc
            }
        }
    }
}

fn group_vetoes(nodes: Vec<CNode>) -> Vec<CNode> {
    let (vetoes, mut rest): (Vec<_>, Vec<_>) = nodes
        .into_iter()
        .partition(|n| matches!(n, CNode::Count { min: 1, .. } | CNode::Vetoes { .. }));
    if vetoes.len() < 2 {
        rest.extend(vetoes);
        return rest;
    }
    let mut masks = Vec::new();
    for v in vetoes {
        match v {
            CNode::Count { mask, .. } => masks.push(mask),
            CNode::Vetoes { masks: ms, .. } => masks.extend(ms.iter().copied()),
            _ => unreachable!(),
        }
    }
    let low = (1u32 << CHUNK_BITS) - 1;
    let split = masks
        .iter()
        .map(|&m| {
            let mut hit = 0u64;
            for j in 0..64u32 {
                if j & m & low != 0 {
                    hit |= 1 << j;
                }
            }
            (m & !low, hit)
        })
        .collect();
    rest.push(CNode::Vetoes {
        masks: masks.into_boxed_slice(),
        split,
    });
    rest
}

#[inline]
fn hits_all(masks: &[u32], s: u32) -> bool {
    for chunk in masks.chunks(16) {
        let mut miss = false;
        for &m in chunk {
            miss |= s & m == 0;
        }
        if miss {
            return false;
        }
    }
    true
}

fn partial_sums(weights: &[u64]) -> Box<[u64]> {
    let size = 1usize << weights.len();
    let mut table = vec![0u64; size];
    for s in 1..size {
        let low = s.trailing_zeros() as usize;
        table[s] = table[s & (s - 1)] + weights[low];
    }
    table.into_boxed_slice()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalition::Coalition;
    use proptest::prelude::*;

    fn arb_game(n: usize) -> impl Strategy<Value = WeightedGame> {
        proptest::collection::vec(0u64..6, n).prop_flat_map(|mut w| {
            if w.iter().all(|&x| x == 0) {
                w[0] = 1;
            }
            let total: u64 = w.iter().sum();
            (Just(w), 1..=total).prop_map(|(w, q)| WeightedGame::new(w, q).unwrap())
        })
    }

    fn arb_expr(n: usize) -> impl Strategy<Value = GameExpr> {
        let leaf = arb_game(n).prop_map(GameExpr::leaf);
        leaf.prop_recursive(3, 16, 4, |inner| {
            (any::<bool>(), proptest::collection::vec(inner, 2..4)).prop_map(|(and, cs)| {
                if and {
                    GameExpr::and(cs).unwrap()
                } else {
                    GameExpr::or(cs).unwrap()
                }
            })
        })
    }

    proptest! {
        #[test]
        fn compiled_matches_tree_walk(e in (1usize..=9).prop_flat_map(arb_expr)) {
            let c = Compiled::new(&e);
            for bits in 0..(1u32 << e.n()) {
                let s = Coalition::from_bits(bits, e.n()).unwrap();
                prop_assert_eq!(c.wins(bits), e.evaluate(&s).unwrap());
            }
            let step = c.chunk_len() as u32;
            for base in (0..(1u32 << e.n())).step_by(step as usize) {
                let chunk = c.wins_chunk(base);
                for j in 0..64u32 {
                    let expected = j < step && c.wins(base | j);
                    prop_assert_eq!(chunk >> j & 1 == 1, expected);
                }
            }
        }
    }

    #[test]
    fn vetoes_are_grouped_and_exact() {
        let n = 5;
        let games: Vec<_> = [0b00011u32, 0b01100, 0b10001]
            .iter()
            .map(|&s| {
                let w = (0..n).map(|j| u64::from(s & (1 << j) == 0)).collect();
                WeightedGame::new(w, 1).unwrap()
            })
            .chain([WeightedGame::new(vec![1, 2, 3, 4, 5], 6).unwrap()])
            .collect();
        let e = GameExpr::all_of(games).unwrap();
        let c = Compiled::new(&e);
        assert!(matches!(&c.root, CNode::And(cs) if cs.iter().any(|n| matches!(n, CNode::Vetoes { masks, .. } if masks.len() == 3))));
        for bits in 0..32 {
            assert_eq!(c.wins(bits), e.wins_bits(bits));
            assert_eq!(c.wins_chunk(0) >> bits & 1 == 1, e.wins_bits(bits));
        }
    }

    #[test]
    fn full_width_tables() {
        let w: Vec<u64> = (1..=32).collect();
        let g = WeightedGame::new(w, 400).unwrap();
        let c = Compiled::new(&GameExpr::leaf(g.clone()));
        for bits in [0u32, u32::MAX, 0xF0F0_F0F0, 0x8000_0001, 0x7FFF_0000] {
            assert_eq!(c.wins(bits), g.wins_bits(bits));
            let chunk = c.wins_chunk(bits & !63);
            assert_eq!(chunk >> (bits & 63) & 1 == 1, g.wins_bits(bits));
        }
    }
}
