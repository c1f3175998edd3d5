//! Dimension upper bound for the Lisbon rule `v_count ∧ (v_pop ∨ v_block)`.
//!
//! The count game is a single weighted game, so the dimension of the rule is
//! at most one plus the number of games in an intersection representation of
//! `v_pop ∨ v_block`, which [`theorem_one`] provides.

use serde::Serialize;

use crate::coalition::Coalition;
use crate::data::{build_eu_rule, EuRule, PopulationTable, RuleConfig};
use crate::decomposition::{theorem_one_with, DecompositionResult, TheoremOneOptions};
use crate::error::{GameError, Result};
use crate::game::GameExpr;
use crate::sweep::SweepConfig;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Roles {
    /// `v_A` is the population game, `v_B` the blocking game.
    #[default]
    PopulationFirst,
    /// `v_A` is the blocking game, `v_B` the population game.
    BlockingFirst,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct BoundOptions {
    pub roles: Roles,
    pub theorem: TheoremOneOptions,
}

/// `u` in the units of game A and converted back to the source units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Slack {
    pub scaled: u64,
    /// Divisor from game-A units to source units (20 for the population game).
    pub scale: u64,
    /// `ceil(scaled / scale)`.
    pub ceiling: u64,
}

impl Slack {
    fn new(scaled: u64, scale: u64) -> Self {
        Self {
            scaled,
            scale,
            ceiling: scaled.div_ceil(scale),
        }
    }

    /// `scaled / scale` in lowest terms.
    pub fn exact(&self) -> (u64, u64) {
        let g = gcd(self.scaled, self.scale);
        (self.scaled / g, self.scale / g)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

#[derive(Clone, Debug)]
pub struct BoundReport {
    pub dataset: String,
    pub excluded: Vec<String>,
    pub rule: EuRule,
    pub roles: Roles,
    pub decomposition: DecompositionResult,
    pub slack: Option<Slack>,
    /// `1 + |games|`.
    pub bound: usize,
}

impl BoundReport {
    /// `v_count` followed by the decomposition games.
    pub fn all_games(&self) -> Vec<crate::game::WeightedGame> {
        std::iter::once(self.rule.count_game.clone())
            .chain(self.decomposition.games.iter().cloned())
            .collect()
    }

    pub fn intersection(&self) -> Result<GameExpr> {
        GameExpr::all_of(self.all_games())
    }
}

impl EuRule {
    /// Source-table ranks of the members of `c`.
    pub fn ranks_of(&self, c: &Coalition) -> Vec<usize> {
        c.players().map(|i| self.players[i].rank).collect()
    }

    /// Coalition from source-table ranks; excluded or unknown ranks fail.
    pub fn coalition_from_ranks(&self, ranks: &[usize]) -> Result<Coalition> {
        let mut players = Vec::with_capacity(ranks.len());
        for &rank in ranks {
            let i = self
                .players
                .iter()
                .position(|p| p.rank == rank)
                .ok_or_else(|| GameError::PlayerIndex {
                    index: rank,
                    n: self.n(),
                })?;
            players.push(i);
        }
        Coalition::from_players(players, self.n())
    }
}

pub fn eu_upper_bound(
    table: &PopulationTable,
    exclude: &[&str],
    config: RuleConfig,
    opts: BoundOptions,
    cfg: SweepConfig,
) -> Result<BoundReport> {
    let rule = build_eu_rule(table, exclude, config)?;
    let (a, b, scale) = match opts.roles {
        Roles::PopulationFirst => (
            &rule.population_game,
            &rule.blocking_game,
            rule.population_scale(),
        ),
        Roles::BlockingFirst => (&rule.blocking_game, &rule.population_game, 1),
    };
    let decomposition = theorem_one_with(a, b, opts.theorem, cfg)?;
    let slack = decomposition
        .d_summary
        .as_ref()
        .and_then(|d| d.u)
        .map(|u| Slack::new(u, scale));
    let bound = 1 + decomposition.games.len();
    Ok(BoundReport {
        dataset: table.year_label.clone(),
        excluded: exclude.iter().map(|s| s.to_string()).collect(),
        rule,
        roles: opts.roles,
        decomposition,
        slack,
        bound,
    })
}
