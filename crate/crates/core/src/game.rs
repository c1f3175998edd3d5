//! Weighted games and boolean combinations of them.

use std::fmt;

use serde::Serialize;

use crate::coalition::{check_player_count, full_mask, Coalition};
use crate::error::{GameError, Result};

/// Largest individual weight accepted. With at most 32 players every weight
/// sum stays below 2^45, far inside `u64`.
pub const MAX_WEIGHT: u64 = 1 << 40;

/// `[quota; w_1, …, w_n]`: a coalition wins iff its weight sum is at least
/// the quota.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct WeightedGame {
    quota: u64,
    weights: Vec<u64>,
}

impl WeightedGame {
    pub fn new(weights: Vec<u64>, quota: u64) -> Result<Self> {
        check_player_count(weights.len())?;
        if let Some(w) = weights.iter().find(|&&w| w > MAX_WEIGHT) {
            return Err(GameError::InvalidGame(format!(
                "weight {w} exceeds the 2^40 limit"
            )));
        }
        if quota == 0 {
            return Err(GameError::InvalidGame("quota must be at least 1".into()));
        }
        let total: u64 = weights.iter().sum();
        if quota > total {
            return Err(GameError::InvalidGame(format!(
                "quota {quota} exceeds the total weight {total}; the grand coalition would lose"
            )));
        }
        Ok(Self { quota, weights })
    }

    /// `[quota; 1, …, 1]`.
    pub fn unit(n: usize, quota: u64) -> Result<Self> {
        Self::new(vec![1; n], quota)
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn quota(&self) -> u64 {
        self.quota
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.iter().sum()
    }

    fn check(&self, s: &Coalition) -> Result<()> {
        if s.n() != self.n() {
            return Err(GameError::UniverseMismatch {
                left: self.n(),
                right: s.n(),
            });
        }
        Ok(())
    }

    pub fn weight_sum(&self, s: &Coalition) -> Result<u64> {
        self.check(s)?;
        Ok(self.weight_sum_bits(s.bits()))
    }

    pub fn is_winning(&self, s: &Coalition) -> Result<bool> {
        Ok(self.weight_sum(s)? >= self.quota)
    }

    #[inline]
    pub(crate) fn weight_sum_bits(&self, mut bits: u32) -> u64 {
        let mut sum = 0;
        while bits != 0 {
            sum += self.weights[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }
        sum
    }

    #[inline]
    pub(crate) fn wins_bits(&self, bits: u32) -> bool {
        self.weight_sum_bits(bits) >= self.quota
    }

    /// Multiplies the quota and every weight by `factor`.
    pub fn scaled(&self, factor: u64) -> Result<Self> {
        if factor == 0 {
            return Err(GameError::InvalidGame("scale factor must be positive".into()));
        }
        let weights = self
            .weights
            .iter()
            .map(|w| w.checked_mul(factor))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| GameError::InvalidGame("scaled weight overflows".into()))?;
        let quota = self
            .quota
            .checked_mul(factor)
            .ok_or_else(|| GameError::InvalidGame("scaled quota overflows".into()))?;
        Self::new(weights, quota)
    }
}

impl fmt::Display for WeightedGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}; ", self.quota)?;
        for (i, w) in self.weights.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{w}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for WeightedGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    And,
    Or,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Leaf(WeightedGame),
    Branch(Op, Vec<GameExpr>),
}

/// A simple game written as an AND/OR tree over weighted games.
///
/// All leaves share one player count. Construction checks that the empty
/// coalition loses and the grand coalition wins at every node; monotonicity
/// follows from the leaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameExpr {
    n: usize,
    node: Node,
}

impl GameExpr {
    pub fn leaf(game: WeightedGame) -> Self {
        Self {
            n: game.n(),
            node: Node::Leaf(game),
        }
    }

    /// Intersection: wins iff every child wins.
    pub fn and(children: Vec<GameExpr>) -> Result<Self> {
        Self::branch(Op::And, children)
    }

    /// Union: wins iff some child wins.
    pub fn or(children: Vec<GameExpr>) -> Result<Self> {
        Self::branch(Op::Or, children)
    }

    /// Intersection of one or more weighted games; a single game becomes a leaf.
    pub fn all_of(games: Vec<WeightedGame>) -> Result<Self> {
        match games.len() {
            0 => Err(GameError::InvalidExpr("empty intersection".into())),
            1 => Ok(Self::leaf(games.into_iter().next().unwrap())),
            _ => Self::and(games.into_iter().map(Self::leaf).collect()),
        }
    }

    /// Union of one or more weighted games; a single game becomes a leaf.
    pub fn any_of(games: Vec<WeightedGame>) -> Result<Self> {
        match games.len() {
            0 => Err(GameError::InvalidExpr("empty union".into())),
            1 => Ok(Self::leaf(games.into_iter().next().unwrap())),
            _ => Self::or(games.into_iter().map(Self::leaf).collect()),
        }
    }

    fn branch(op: Op, children: Vec<GameExpr>) -> Result<Self> {
        if children.len() < 2 {
            return Err(GameError::InvalidExpr(format!(
                "{op:?} needs at least two children, got {}",
                children.len()
            )));
        }
        let n = children[0].n;
        if let Some(c) = children.iter().find(|c| c.n != n) {
            return Err(GameError::UniverseMismatch { left: n, right: c.n });
        }
        let expr = Self {
            n,
            node: Node::Branch(op, children),
        };
        if expr.wins_bits(0) {
            return Err(GameError::InvalidExpr("empty coalition wins".into()));
        }
        if !expr.wins_bits(full_mask(n)) {
            return Err(GameError::InvalidExpr("grand coalition loses".into()));
        }
        Ok(expr)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn evaluate(&self, s: &Coalition) -> Result<bool> {
        if s.n() != self.n {
            return Err(GameError::UniverseMismatch {
                left: self.n,
                right: s.n(),
            });
        }
        Ok(self.wins_bits(s.bits()))
    }

    /// Tree-walking evaluation. The sweep engine uses a compiled form instead.
    pub(crate) fn wins_bits(&self, bits: u32) -> bool {
        match &self.node {
            Node::Leaf(g) => g.wins_bits(bits),
            Node::Branch(Op::And, cs) => cs.iter().all(|c| c.wins_bits(bits)),
            Node::Branch(Op::Or, cs) => cs.iter().any(|c| c.wins_bits(bits)),
        }
    }

    /// Number of weighted-game leaves.
    pub fn leaf_count(&self) -> usize {
        match &self.node {
            Node::Leaf(_) => 1,
            Node::Branch(_, cs) => cs.iter().map(Self::leaf_count).sum(),
        }
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<&WeightedGame> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a WeightedGame>) {
        match &self.node {
            Node::Leaf(g) => out.push(g),
            Node::Branch(_, cs) => cs.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    /// True when the tree uses AND nodes only.
    pub fn is_intersection(&self) -> bool {
        match &self.node {
            Node::Leaf(_) => true,
            Node::Branch(Op::And, cs) => cs.iter().all(Self::is_intersection),
            Node::Branch(Op::Or, _) => false,
        }
    }
}

impl From<WeightedGame> for GameExpr {
    fn from(game: WeightedGame) -> Self {
        Self::leaf(game)
    }
}
