//! Population tables and the Lisbon qualified-majority rule.
//!
//! Tables are CSV with header `rank,country,population`. An optional row whose
//! rank field is `total` states the expected population sum and is checked.

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{GameError, Result};
use crate::game::{GameExpr, WeightedGame};

const EU2014: &str = include_str!("../data/eu2014.csv");
const EU2016: &str = include_str!("../data/eu2016.csv");
const EU2017: &str = include_str!("../data/eu2017.csv");
const EU2018: &str = include_str!("../data/eu2018.csv");

/// Years shipped with the crate.
pub const BUILTIN_YEARS: [&str; 4] = ["2014", "2016", "2017", "2018"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountryRow {
    pub rank: usize,
    pub country: String,
    pub population: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PopulationTable {
    pub year_label: String,
    pub rows: Vec<CountryRow>,
    pub stated_total: Option<u64>,
    /// Non-fatal findings such as population ties.
    #[serde(skip)]
    pub warnings: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct RawRow {
    rank: String,
    country: String,
    population: String,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct LoadOptions {
    /// Accept populations that are not in descending order.
    pub allow_unordered: bool,
}

impl PopulationTable {
    pub fn load(bytes: &[u8], year_label: &str) -> Result<Self> {
        Self::load_with(bytes, year_label, LoadOptions::default())
    }

    pub fn load_with(bytes: &[u8], year_label: &str, opts: LoadOptions) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(bytes);
        let headers = reader.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["rank", "country", "population"] {
            return Err(GameError::Table(format!(
                "expected header `rank,country,population`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut rows = Vec::new();
        let mut stated_total = None;
        for (i, record) in reader.deserialize::<RawRow>().enumerate() {
            let line = i + 2;
            let raw = record?;
            let population: u64 = raw.population.parse().map_err(|_| {
                GameError::Table(format!(
                    "line {line}: population {:?} is not a non-negative integer",
                    raw.population
                ))
            })?;
            if raw.rank.eq_ignore_ascii_case("total") {
                stated_total = Some(population);
                continue;
            }
            if stated_total.is_some() {
                return Err(GameError::Table(format!(
                    "line {line}: rows after the total row"
                )));
            }
            let rank: usize = raw.rank.parse().map_err(|_| {
                GameError::Table(format!("line {line}: rank {:?} is not an integer", raw.rank))
            })?;
            if rank != rows.len() + 1 {
                return Err(GameError::Table(format!(
                    "line {line}: expected rank {}, found {rank}",
                    rows.len() + 1
                )));
            }
            if population == 0 {
                return Err(GameError::Table(format!(
                    "line {line}: population must be positive"
                )));
            }
            if raw.country.is_empty() {
                return Err(GameError::Table(format!("line {line}: empty country name")));
            }
            rows.push(CountryRow {
                rank,
                country: raw.country,
                population,
            });
        }
        if rows.is_empty() {
            return Err(GameError::Table("no rows".into()));
        }
        let mut warnings = Vec::new();
        for pair in rows.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if a.population == b.population {
                warnings.push(format!(
                    "ranks {} and {} tie at {}; input order kept",
                    a.rank, b.rank, a.population
                ));
            } else if a.population < b.population {
                if !opts.allow_unordered {
                    return Err(GameError::Table(format!(
                        "rank {} ({}) has fewer people than rank {} ({})",
                        a.rank, a.population, b.rank, b.population
                    )));
                }
                warnings.push(format!("ranks {} and {} out of order", a.rank, b.rank));
            }
        }
        let table = Self {
            year_label: year_label.to_string(),
            rows,
            stated_total,
            warnings,
        };
        if let Some(total) = stated_total {
            if total != table.total() {
                return Err(GameError::Table(format!(
                    "stated total {total} differs from the row sum {}",
                    table.total()
                )));
            }
        }
        Ok(table)
    }

    /// One of [`BUILTIN_YEARS`].
    pub fn builtin(year: &str) -> Result<Self> {
        let src = match year {
            "2014" => EU2014,
            "2016" => EU2016,
            "2017" => EU2017,
            "2018" => EU2018,
            _ => return Err(GameError::Table(format!("no builtin dataset {year:?}"))),
        };
        Self::load(src.as_bytes(), year)
    }

    pub fn total(&self) -> u64 {
        self.rows.iter().map(|r| r.population).sum()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,country,population\n");
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(Vec::new());
        for r in &self.rows {
            w.write_record([r.rank.to_string(), r.country.clone(), r.population.to_string()])
                .expect("in-memory csv write");
        }
        if let Some(t) = self.stated_total {
            w.write_record(["total", "Total population", &t.to_string()])
                .expect("in-memory csv write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf-8"));
        out
    }
}

/// Exact non-negative rational `num / den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

impl Fraction {
    pub const fn new(num: u64, den: u64) -> Self {
        Self { num, den }
    }

    pub fn ceil_mul(&self, x: u64) -> u64 {
        (self.num * x).div_ceil(self.den)
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RuleConfig {
    pub member_quota_fraction: Fraction,
    pub population_quota_fraction: Fraction,
    pub blocking_minority_size: usize,
}

impl Default for RuleConfig {
    /// 55% of members, 65% of population, blocking minority of four.
    fn default() -> Self {
        Self {
            member_quota_fraction: Fraction::new(11, 20),
            population_quota_fraction: Fraction::new(13, 20),
            blocking_minority_size: 4,
        }
    }
}

impl RuleConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, f) in [
            ("member", self.member_quota_fraction),
            ("population", self.population_quota_fraction),
        ] {
            if f.den == 0 || f.num == 0 || f.num > f.den {
                return Err(GameError::InvalidGame(format!(
                    "{name} quota fraction {f} outside (0, 1]"
                )));
            }
        }
        if self.blocking_minority_size == 0 {
            return Err(GameError::InvalidGame(
                "blocking minority size must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// The rule `v_count ∧ (v_pop ∨ v_block)` over the members left after
/// exclusions. Internal player `i` is `players[i]`, which keeps its rank from
/// the source table.
#[derive(Clone, Debug)]
pub struct EuRule {
    pub players: Vec<CountryRow>,
    pub config: RuleConfig,
    /// `[ceil(m·11/20); 1, …, 1]`.
    pub count_game: WeightedGame,
    /// Population game in scaled units: weights `den·w_j`, quota `num·Σw`.
    pub population_game: WeightedGame,
    /// `[m − (blocking − 1); 1, …, 1]`.
    pub blocking_game: WeightedGame,
    pub expr: GameExpr,
}

impl EuRule {
    pub fn n(&self) -> usize {
        self.players.len()
    }

    /// Factor between population units and the population game's units.
    pub fn population_scale(&self) -> u64 {
        self.config.population_quota_fraction.den
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.players.iter().map(|p| p.rank).collect()
    }

    /// `(v_count ∧ v_pop) ∨ v_block`.
    pub fn alternative_form(&self) -> Result<GameExpr> {
        GameExpr::or(vec![
            GameExpr::and(vec![
                self.count_game.clone().into(),
                self.population_game.clone().into(),
            ])?,
            self.blocking_game.clone().into(),
        ])
    }
}

pub fn build_eu_rule(table: &PopulationTable, exclude: &[&str], cfg: RuleConfig) -> Result<EuRule> {
    cfg.validate()?;
    for name in exclude {
        if !table.rows.iter().any(|r| r.country.eq_ignore_ascii_case(name)) {
            return Err(GameError::UnknownCountry(name.to_string()));
        }
    }
    let players: Vec<CountryRow> = table
        .rows
        .iter()
        .filter(|r| !exclude.iter().any(|e| r.country.eq_ignore_ascii_case(e)))
        .cloned()
        .collect();
    let m = players.len();
    if m < 2 {
        return Err(GameError::InvalidGame(format!(
            "the rule needs at least two members, {m} left"
        )));
    }
    if m < cfg.blocking_minority_size {
        return Err(GameError::InvalidGame(format!(
            "blocking minority of {} exceeds the {m} members",
            cfg.blocking_minority_size
        )));
    }
    let total: u64 = players.iter().map(|p| p.population).sum();
    let frac = cfg.population_quota_fraction;
    let count_game = WeightedGame::unit(m, cfg.member_quota_fraction.ceil_mul(m as u64))?;
    let population_game = WeightedGame::new(
        players.iter().map(|p| frac.den * p.population).collect(),
        frac.num * total,
    )?;
    let blocking_game = WeightedGame::unit(m, (m - (cfg.blocking_minority_size - 1)) as u64)?;
    let expr = GameExpr::and(vec![
        count_game.clone().into(),
        GameExpr::or(vec![
            population_game.clone().into(),
            blocking_game.clone().into(),
        ])?,
    ])?;
    Ok(EuRule {
        players,
        config: cfg,
        count_game,
        population_game,
        blocking_game,
        expr,
    })
}
