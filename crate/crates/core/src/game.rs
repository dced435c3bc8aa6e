//! Exact classic and grouped Shapley values for small cooperative games
//! given by an explicit value function.
//!
//! Coalitions are bitmasks over players `0..p` (bit `i` set means player `i`
//! is in the coalition). Permutation weights `|S|!(k-|S|-1)!` are exact
//! 128-bit integers; the division by `k!` happens once per result, so games
//! with rational payoffs come out exact.

use std::collections::HashMap;
use std::ops::{Add, Sub};

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::partition::FeaturePartition;

/// Coalition bitmask.
pub type Coalition = u32;

/// Enumeration is exponential in the player count.
pub const MAX_PLAYERS: usize = 24;

/// Exact rational payoff.
pub type Rational = Ratio<i128>;

/// Payoff type a value function can return.
pub trait Payoff: Clone + Add<Output = Self> + Sub<Output = Self> {
    fn zero() -> Self;
    /// `self * factor`
    fn scale(&self, factor: u128) -> Self;
    /// `self / divisor`
    fn divide(self, divisor: u128) -> Self;
}

impl Payoff for f64 {
    fn zero() -> Self {
        0.0
    }

    fn scale(&self, factor: u128) -> Self {
        self * factor as f64
    }

    fn divide(self, divisor: u128) -> Self {
        self / divisor as f64
    }
}

impl Payoff for Rational {
    fn zero() -> Self {
        Ratio::from_integer(0)
    }

    fn scale(&self, factor: u128) -> Self {
        self * Ratio::from_integer(factor as i128)
    }

    fn divide(self, divisor: u128) -> Self {
        self / Ratio::from_integer(divisor as i128)
    }
}

/// `n!` for `n <= MAX_PLAYERS`.
pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Numerator of the Shapley permutation weight, `s!(k-s-1)!`; the full weight
/// is this divided by `k!`.
pub fn permutation_weight_numerator(subset_size: usize, k: usize) -> u128 {
    debug_assert!(subset_size < k);
    factorial(subset_size) * factorial(k - subset_size - 1)
}

/// A game `(P, v)` with `P = {0, .., p-1}`.
pub struct CooperativeGame<F> {
    players: usize,
    value: F,
}

impl<V: Payoff, F: Fn(Coalition) -> V> CooperativeGame<F> {
    pub fn new(players: usize, value: F) -> Result<Self> {
        if players == 0 {
            return Err(Error::InvalidPartition(
                "a game needs at least one player".into(),
            ));
        }
        if players > MAX_PLAYERS {
            return Err(Error::GuardExceeded {
                what: "game",
                count: players,
                limit: MAX_PLAYERS,
            });
        }
        Ok(Self { players, value })
    }

    pub fn player_count(&self) -> usize {
        self.players
    }

    pub fn value(&self, coalition: Coalition) -> V {
        (self.value)(coalition)
    }

    pub fn grand_coalition(&self) -> Coalition {
        ((1u64 << self.players) - 1) as Coalition
    }

    /// Classic Shapley value of `player`.
    pub fn classic_shapley(&self, player: usize) -> Result<V> {
        if player >= self.players {
            return Err(Error::IndexOutOfRange {
                index: player,
                len: self.players,
            });
        }
        let bit: Coalition = 1 << player;
        let mut acc = V::zero();
        for s in 0..=self.grand_coalition() {
            if s & bit != 0 {
                continue;
            }
            let size = s.count_ones() as usize;
            let marginal = self.value(s | bit) - self.value(s);
            acc = acc + marginal.scale(permutation_weight_numerator(size, self.players));
        }
        Ok(acc.divide(factorial(self.players)))
    }

    /// Grouped Shapley value of `group`: the group's members are treated as a
    /// single player and averaged over coalitions of the other groups.
    pub fn grouped_shapley(&self, partition: &FeaturePartition, group: usize) -> Result<V> {
        let masks = self.group_masks(partition)?;
        if group >= masks.len() {
            return Err(Error::IndexOutOfRange {
                index: group,
                len: masks.len(),
            });
        }
        let mut memo = HashMap::new();
        Ok(self.grouped_with_memo(&masks, group, &mut memo))
    }

    /// Grouped Shapley values of every group, sharing the coalition memo.
    pub fn grouped_shapley_all(&self, partition: &FeaturePartition) -> Result<Vec<V>> {
        let masks = self.group_masks(partition)?;
        let mut memo = HashMap::new();
        Ok((0..masks.len())
            .map(|g| self.grouped_with_memo(&masks, g, &mut memo))
            .collect())
    }

    /// Sum of the members' classic Shapley values. The naive baseline that
    /// the grouped value replaces.
    pub fn naive_group_sum(&self, partition: &FeaturePartition, group: usize) -> Result<V> {
        let masks = self.group_masks(partition)?;
        let members = &partition
            .group(group)
            .ok_or(Error::IndexOutOfRange {
                index: group,
                len: masks.len(),
            })?
            .features;
        members
            .iter()
            .try_fold(V::zero(), |acc, &p| Ok(acc + self.classic_shapley(p)?))
    }

    fn group_masks(&self, partition: &FeaturePartition) -> Result<Vec<Coalition>> {
        if partition.feature_count() != self.players {
            return Err(Error::InvalidPartition(format!(
                "partition covers {} players, game has {}",
                partition.feature_count(),
                self.players
            )));
        }
        Ok(partition
            .groups()
            .iter()
            .map(|g| g.features.iter().fold(0, |m, &p| m | (1 << p)))
            .collect())
    }

    fn grouped_with_memo(
        &self,
        masks: &[Coalition],
        group: usize,
        memo: &mut HashMap<Coalition, V>,
    ) -> V {
        let k = masks.len();
        let mut value_of =
            |s: Coalition| -> V { memo.entry(s).or_insert_with(|| (self.value)(s)).clone() };
        let mut acc = V::zero();
        // `chosen` enumerates subsets of the other k-1 groups, with `group`'s
        // bit squeezed out.
        for chosen in 0u32..(1 << (k - 1)) {
            let mut union = 0;
            let mut size = 0;
            for (g, &mask) in masks.iter().enumerate() {
                if g == group {
                    continue;
                }
                let bit = if g < group { g } else { g - 1 };
                if chosen & (1 << bit) != 0 {
                    union |= mask;
                    size += 1;
                }
            }
            let marginal = value_of(union | masks[group]) - value_of(union);
            acc = acc + marginal.scale(permutation_weight_numerator(size, k));
        }
        acc.divide(factorial(k))
    }
}

/// Glove game with `left_gloves` left-glove holders (players `0..left_gloves`)
/// and one right-glove holder (the last player). A coalition is worth 1 iff it
/// holds a matching pair.
pub fn glove_game(left_gloves: usize) -> Result<CooperativeGame<impl Fn(Coalition) -> Rational>> {
    let right: Coalition = 1 << left_gloves;
    let lefts: Coalition = right - 1;
    CooperativeGame::new(left_gloves + 1, move |s: Coalition| {
        Ratio::from_integer(i128::from(s & right != 0 && s & lefts != 0))
    })
}

/// The glove game's natural grouping: all left gloves, then the right glove.
pub fn glove_partition(left_gloves: usize) -> Result<FeaturePartition> {
    use crate::partition::FeatureGroup;
    FeaturePartition::new(
        vec![
            FeatureGroup {
                name: "left".into(),
                features: (0..left_gloves).collect(),
            },
            FeatureGroup {
                name: "right".into(),
                features: vec![left_gloves],
            },
        ],
        left_gloves + 1,
    )
}
