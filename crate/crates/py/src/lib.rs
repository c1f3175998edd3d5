//! Python bindings for `votedim`.
//!
//! Coalitions cross the boundary as lists of 0-based player indices, except
//! where a function says it takes table ranks.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use votedim_core::cli::ReportDocument;
use votedim_core::data::LoadOptions;
use votedim_core::eu::BoundOptions;
use votedim_core::lower_bound::PairStatus;
use votedim_core::{
    Coalition, DecompositionResult, Equivalence, GameError, PopulationTable, RuleConfig,
    SweepConfig,
};

fn err(e: GameError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn coalition(players: Vec<usize>, n: usize) -> PyResult<Coalition> {
    Coalition::from_players(players, n).map_err(err)
}

fn players(c: &Coalition) -> Vec<usize> {
    c.players().collect()
}

fn sweep(threads: usize) -> SweepConfig {
    SweepConfig::with_threads(threads)
}

/// Weighted game `[quota; weights]`.
#[pyclass(name = "WeightedGame", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyWeightedGame(votedim_core::WeightedGame);

#[pymethods]
impl PyWeightedGame {
    #[new]
    fn new(weights: Vec<u64>, quota: u64) -> PyResult<Self> {
        votedim_core::WeightedGame::new(weights, quota)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn weights(&self) -> Vec<u64> {
        self.0.weights().to_vec()
    }

    #[getter]
    fn quota(&self) -> u64 {
        self.0.quota()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn is_winning(&self, coalition_: Vec<usize>) -> PyResult<bool> {
        let c = coalition(coalition_, self.0.n())?;
        self.0.is_winning(&c).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("WeightedGame({})", self.0)
    }
}

/// Intersection/union tree over weighted games.
#[pyclass(name = "GameExpr", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGameExpr(votedim_core::GameExpr);

fn expr_of(obj: &Bound<'_, PyAny>) -> PyResult<votedim_core::GameExpr> {
    if let Ok(g) = obj.cast::<PyWeightedGame>() {
        return Ok(g.get().0.clone().into());
    }
    if let Ok(e) = obj.cast::<PyGameExpr>() {
        return Ok(e.get().0.clone());
    }
    Err(PyValueError::new_err("expected a WeightedGame or GameExpr"))
}

fn exprs_of(items: &Bound<'_, PyList>) -> PyResult<Vec<votedim_core::GameExpr>> {
    items.iter().map(|x| expr_of(&x)).collect()
}

#[pymethods]
impl PyGameExpr {
    /// Game won exactly by coalitions that win every listed game.
    #[staticmethod]
    fn intersection(games: &Bound<'_, PyList>) -> PyResult<Self> {
        let mut children = exprs_of(games)?;
        if children.len() == 1 {
            return Ok(Self(children.remove(0)));
        }
        votedim_core::GameExpr::and(children).map(Self).map_err(err)
    }

    /// Game won by coalitions that win at least one listed game.
    #[staticmethod]
    fn union(games: &Bound<'_, PyList>) -> PyResult<Self> {
        let mut children = exprs_of(games)?;
        if children.len() == 1 {
            return Ok(Self(children.remove(0)));
        }
        votedim_core::GameExpr::or(children).map(Self).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn leaf_count(&self) -> usize {
        self.0.leaf_count()
    }

    fn leaves(&self) -> Vec<PyWeightedGame> {
        self.0.leaves().into_iter().cloned().map(PyWeightedGame).collect()
    }

    fn is_winning(&self, coalition_: Vec<usize>) -> PyResult<bool> {
        let c = coalition(coalition_, self.0.n())?;
        self.0.evaluate(&c).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("GameExpr(n={}, leaves={})", self.0.n(), self.0.leaf_count())
    }
}

/// Compares two games over every coalition. Returns `None` when they agree,
/// otherwise `(coalition, first_game_wins)` for the smallest disagreement.
#[pyfunction]
#[pyo3(signature = (a, b, threads = 0))]
fn equivalent(
    a: &Bound<'_, PyAny>,
    b: &Bound<'_, PyAny>,
    threads: usize,
) -> PyResult<Option<(Vec<usize>, bool)>> {
    let (a, b) = (expr_of(a)?, expr_of(b)?);
    match votedim_core::equivalent(&a, &b, sweep(threads)).map_err(err)? {
        Equivalence::Equal => Ok(None),
        Equivalence::Differ {
            coalition,
            left_wins,
        } => Ok(Some((players(&coalition), left_wins))),
    }
}

fn decomposition_dict<'py>(py: Python<'py>, r: &DecompositionResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("method", format!("{:?}", r.method))?;
    let games: Vec<PyWeightedGame> = r.games.iter().cloned().map(PyWeightedGame).collect();
    d.set_item("games", games)?;
    let f: Vec<Vec<usize>> = r.f_set.iter().map(players).collect();
    d.set_item("f", f)?;
    if let Some(s) = &r.d_summary {
        d.set_item("d_count", s.member_count)?;
        d.set_item("t", players(&s.t_set))?;
        d.set_item("u", s.u)?;
        let members: Option<Vec<Vec<usize>>> =
            s.members.as_ref().map(|m| m.iter().map(players).collect());
        d.set_item("d", members)?;
    }
    d.set_item("intersection", PyGameExpr(r.intersection().map_err(err)?))?;
    Ok(d)
}

/// Rewrites the union of two weighted games as an intersection of weighted
/// games. Raises `ValueError` when the gap coalitions share no player.
#[pyfunction]
#[pyo3(signature = (a, b, threads = 0))]
fn theorem_one<'py>(
    py: Python<'py>,
    a: &PyWeightedGame,
    b: &PyWeightedGame,
    threads: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let r = votedim_core::theorem_one(&a.0, &b.0, sweep(threads)).map_err(err)?;
    decomposition_dict(py, &r)
}

/// Writes `v` as `v_prime` intersected with one veto game per maximal
/// coalition winning in `v_prime` but losing in `v`.
#[pyfunction]
#[pyo3(signature = (v, v_prime, threads = 0))]
fn construction_one<'py>(
    py: Python<'py>,
    v: &Bound<'py, PyAny>,
    v_prime: &Bound<'py, PyAny>,
    threads: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let (v, vp) = (expr_of(v)?, expr_of(v_prime)?);
    let r = votedim_core::construction_one(&v, &vp, sweep(threads)).map_err(err)?;
    decomposition_dict(py, &r)
}

fn load(data: &str, allow_unordered: bool) -> PyResult<PopulationTable> {
    if let Some(year) = data.strip_prefix("builtin:") {
        return PopulationTable::builtin(year).map_err(err);
    }
    let bytes = std::fs::read(data).map_err(|e| PyValueError::new_err(format!("{data}: {e}")))?;
    PopulationTable::load_with(&bytes, data, LoadOptions { allow_unordered }).map_err(err)
}

/// Rows of a population table as `(rank, country, population)`.
#[pyfunction]
#[pyo3(signature = (data, allow_unordered = false))]
fn load_table(data: &str, allow_unordered: bool) -> PyResult<Vec<(usize, String, u64)>> {
    let t = load(data, allow_unordered)?;
    Ok(t.rows
        .into_iter()
        .map(|r| (r.rank, r.country, r.population))
        .collect())
}

fn rule_config(blocking_minority: usize) -> RuleConfig {
    RuleConfig {
        blocking_minority_size: blocking_minority,
        ..RuleConfig::default()
    }
}

/// Council voting rule for a table, as a `GameExpr` plus the table ranks of
/// its players.
#[pyfunction]
#[pyo3(signature = (data, exclude = Vec::new(), blocking_minority = 4))]
fn eu_rule(
    data: &str,
    exclude: Vec<String>,
    blocking_minority: usize,
) -> PyResult<(PyGameExpr, Vec<usize>)> {
    let t = load(data, false)?;
    let ex: Vec<&str> = exclude.iter().map(String::as_str).collect();
    let rule = votedim_core::build_eu_rule(&t, &ex, rule_config(blocking_minority)).map_err(err)?;
    Ok((PyGameExpr(rule.expr.clone()), rule.ranks()))
}

/// Upper bound report for a table, as the same dictionary the CLI prints
/// with `analyze --json`.
#[pyfunction]
#[pyo3(signature = (data, exclude = Vec::new(), blocking_minority = 4, threads = 0))]
fn eu_upper_bound<'py>(
    py: Python<'py>,
    data: &str,
    exclude: Vec<String>,
    blocking_minority: usize,
    threads: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let t = load(data, false)?;
    let ex: Vec<&str> = exclude.iter().map(String::as_str).collect();
    let report = votedim_core::eu_upper_bound(
        &t,
        &ex,
        rule_config(blocking_minority),
        BoundOptions::default(),
        sweep(threads),
    )
    .map_err(err)?;
    let json = ReportDocument::from_report(&report).to_json();
    py.import("json")?.call_method1("loads", (json,))
}

/// Checks a list of coalitions for pairwise incompatibility in `v`.
#[pyfunction]
#[pyo3(signature = (v, coalitions, delta_cap = 30, threads = 0))]
fn verify_certificate_set<'py>(
    py: Python<'py>,
    v: &Bound<'py, PyAny>,
    coalitions: Vec<Vec<usize>>,
    delta_cap: usize,
    threads: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let v = expr_of(v)?;
    let cs = coalitions
        .into_iter()
        .map(|c| coalition(c, v.n()))
        .collect::<PyResult<Vec<_>>>()?;
    let r = votedim_core::verify_certificate_set(&v, &cs, delta_cap, sweep(threads)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("losing", r.losing.clone())?;
    d.set_item("certified_pairs", r.certified_pairs())?;
    d.set_item("lower_bound", r.lower_bound)?;
    let pairs = PyList::empty(py);
    for p in &r.pairs {
        let item = PyDict::new(py);
        item.set_item("i", p.i)?;
        item.set_item("j", p.j)?;
        match &p.status {
            PairStatus::Certified { certificate } => {
                item.set_item("status", "certified")?;
                item.set_item("p", players(&certificate.p))?;
                item.set_item("q", players(&certificate.q))?;
            }
            PairStatus::NotCertified => item.set_item("status", "not-certified")?,
            PairStatus::Skipped => item.set_item("status", "skipped")?,
            PairStatus::NotAttempted { delta_size } => {
                item.set_item("status", "not-attempted")?;
                item.set_item("delta_size", delta_size)?;
            }
        }
        pairs.append(item)?;
    }
    d.set_item("pairs", pairs)?;
    Ok(d)
}

#[pymodule]
fn votedim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWeightedGame>()?;
    m.add_class::<PyGameExpr>()?;
    m.add_function(wrap_pyfunction!(equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(theorem_one, m)?)?;
    m.add_function(wrap_pyfunction!(construction_one, m)?)?;
    m.add_function(wrap_pyfunction!(load_table, m)?)?;
    m.add_function(wrap_pyfunction!(eu_rule, m)?)?;
    m.add_function(wrap_pyfunction!(eu_upper_bound, m)?)?;
    m.add_function(wrap_pyfunction!(verify_certificate_set, m)?)?;
    Ok(())
}
