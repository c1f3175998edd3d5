//! Coalitions as fixed-width bit-sets.
//!
//! Players are indexed `0..n` internally. Everything that faces a user
//! (reports, coalition files, `Display`) uses 1-based ranks, so player `i`
//! prints as `i + 1`.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{GameError, Result};

/// Largest supported player count; a coalition fits in one `u32`.
pub const MAX_PLAYERS: usize = 32;

/// Bit mask with the low `n` bits set.
#[inline]
pub(crate) fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

pub(crate) fn check_player_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_PLAYERS {
        return Err(GameError::PlayerCount(n));
    }
    Ok(())
}

/// A subset of the player set `{0, …, n-1}`.
///
/// The derived ordering compares the bit pattern as an unsigned integer
/// first; this is the "smallest coalition" order used throughout the crate.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coalition {
    bits: u32,
    n: u8,
}

impl Coalition {
    pub fn empty(n: usize) -> Result<Self> {
        check_player_count(n)?;
        Ok(Self { bits: 0, n: n as u8 })
    }

    pub fn grand(n: usize) -> Result<Self> {
        check_player_count(n)?;
        Ok(Self {
            bits: full_mask(n),
            n: n as u8,
        })
    }

    pub fn from_bits(bits: u32, n: usize) -> Result<Self> {
        check_player_count(n)?;
        if bits & !full_mask(n) != 0 {
            let index = 31 - (bits & !full_mask(n)).leading_zeros() as usize;
            return Err(GameError::PlayerIndex { index, n });
        }
        Ok(Self { bits, n: n as u8 })
    }

    /// Callers guarantee `bits ⊆ full_mask(n)` and `1 <= n <= 32`.
    #[inline]
    pub(crate) fn from_bits_unchecked(bits: u32, n: usize) -> Self {
        debug_assert!(bits & !full_mask(n) == 0);
        Self { bits, n: n as u8 }
    }

    /// Builds a coalition from 0-based player indices.
    pub fn from_players<I: IntoIterator<Item = usize>>(players: I, n: usize) -> Result<Self> {
        check_player_count(n)?;
        let mut bits = 0u32;
        for index in players {
            if index >= n {
                return Err(GameError::PlayerIndex { index, n });
            }
            bits |= 1 << index;
        }
        Ok(Self { bits, n: n as u8 })
    }

    /// Builds a coalition from 1-based ranks.
    pub fn from_ranks<I: IntoIterator<Item = usize>>(ranks: I, n: usize) -> Result<Self> {
        let mut players = Vec::new();
        for rank in ranks {
            if rank == 0 || rank > n {
                return Err(GameError::PlayerIndex {
                    index: rank.wrapping_sub(1),
                    n,
                });
            }
            players.push(rank - 1);
        }
        Self::from_players(players, n)
    }

    #[inline]
    pub fn bits(&self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_grand(&self) -> bool {
        self.bits == full_mask(self.n())
    }

    #[inline]
    pub fn contains(&self, player: usize) -> bool {
        player < self.n() && self.bits & (1 << player) != 0
    }

    pub fn with(&self, player: usize) -> Result<Self> {
        if player >= self.n() {
            return Err(GameError::PlayerIndex {
                index: player,
                n: self.n(),
            });
        }
        Ok(Self {
            bits: self.bits | (1 << player),
            n: self.n,
        })
    }

    pub fn without(&self, player: usize) -> Result<Self> {
        if player >= self.n() {
            return Err(GameError::PlayerIndex {
                index: player,
                n: self.n(),
            });
        }
        Ok(Self {
            bits: self.bits & !(1 << player),
            n: self.n,
        })
    }

    /// 0-based member indices in increasing order.
    pub fn players(&self) -> impl Iterator<Item = usize> + '_ {
        BitIter(self.bits)
    }

    /// 1-based ranks in increasing order.
    pub fn ranks(&self) -> Vec<usize> {
        self.players().map(|p| p + 1).collect()
    }

    /// `N \ S`.
    pub fn complement(&self) -> Self {
        Self {
            bits: !self.bits & full_mask(self.n()),
            n: self.n,
        }
    }

    pub(crate) fn same_universe(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(GameError::UniverseMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        Ok(())
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.same_universe(other)?;
        Ok(Self {
            bits: self.bits | other.bits,
            n: self.n,
        })
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.same_universe(other)?;
        Ok(Self {
            bits: self.bits & other.bits,
            n: self.n,
        })
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.same_universe(other)?;
        Ok(Self {
            bits: self.bits & !other.bits,
            n: self.n,
        })
    }

    pub fn symmetric_difference(&self, other: &Self) -> Result<Self> {
        self.same_universe(other)?;
        Ok(Self {
            bits: self.bits ^ other.bits,
            n: self.n,
        })
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool> {
        self.same_universe(other)?;
        Ok(self.bits & !other.bits == 0)
    }
}

struct BitIter(u32);

impl Iterator for BitIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, rank) in self.ranks().into_iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{rank}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coalition({self} of {})", self.n)
    }
}

/// Serializes as the list of 1-based ranks.
impl Serialize for Coalition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.ranks())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_are_one_based() {
        let c = Coalition::from_players([0, 2, 27], 28).unwrap();
        assert_eq!(c.ranks(), vec![1, 3, 28]);
        assert_eq!(c.to_string(), "{1,3,28}");
        assert_eq!(Coalition::from_ranks([1, 3, 28], 28).unwrap(), c);
    }

    #[test]
    fn set_algebra_rejects_mixed_universes() {
        let a = Coalition::from_players([0], 3).unwrap();
        let b = Coalition::from_players([0], 4).unwrap();
        assert!(matches!(
            a.union(&b),
            Err(GameError::UniverseMismatch { left: 3, right: 4 })
        ));
        assert!(a.intersection(&b).is_err());
        assert!(a.symmetric_difference(&b).is_err());
        assert!(a.is_subset(&b).is_err());
    }

    #[test]
    fn complement_stays_in_universe() {
        let a = Coalition::from_players([0, 2], 3).unwrap();
        assert_eq!(a.complement().bits(), 0b010);
        let full = Coalition::grand(32).unwrap();
        assert!(full.complement().is_empty());
        assert_eq!(full.len(), 32);
    }

    #[test]
    fn out_of_range_players_rejected() {
        assert!(Coalition::from_players([3], 3).is_err());
        assert!(Coalition::from_bits(0b1000, 3).is_err());
        assert!(Coalition::from_ranks([0], 3).is_err());
        assert!(Coalition::empty(0).is_err());
        assert!(Coalition::empty(33).is_err());
    }

    #[test]
    fn symmetric_difference_matches_definition() {
        let a = Coalition::from_players([0, 1, 2], 5).unwrap();
        let b = Coalition::from_players([2, 3], 5).unwrap();
        let delta = a.symmetric_difference(&b).unwrap();
        let expected = a
            .union(&b)
            .unwrap()
            .difference(&a.intersection(&b).unwrap())
            .unwrap();
        assert_eq!(delta, expected);
        assert_eq!(delta.ranks(), vec![1, 2, 4]);
    }
}
