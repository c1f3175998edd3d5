//! Regressions on the bundled population tables, each checked against a
//! plain-arithmetic oracle and by an exhaustive sweep of every coalition.

mod support;

use support::eu_union_oracle;
use votedim::eu::BoundOptions;
use votedim::{
    equivalent, eu_upper_bound, BoundReport, Coalition, Method, PopulationTable, RuleConfig,
    SweepConfig,
};

fn report(year: &str, exclude: &[&str]) -> BoundReport {
    let table = PopulationTable::builtin(year).unwrap();
    eu_upper_bound(
        &table,
        exclude,
        RuleConfig::default(),
        BoundOptions::default(),
        SweepConfig::default(),
    )
    .unwrap()
}

fn ranks(r: &BoundReport, c: &Coalition) -> Vec<usize> {
    r.rule.ranks_of(c)
}

fn complement_of(r: &BoundReport, out: &[usize]) -> Vec<usize> {
    r.rule.ranks().into_iter().filter(|k| !out.contains(k)).collect()
}

fn check_against_oracle(r: &BoundReport) {
    let pops: Vec<u64> = r.rule.players.iter().map(|row| row.population).collect();
    let oracle = eu_union_oracle(&pops, r.rule.config.blocking_minority_size).unwrap();
    let d = r.decomposition.d_summary.as_ref().unwrap();
    let mut members = d.members.clone().unwrap();
    members.sort();
    assert_eq!(members, oracle.d);
    assert_eq!(d.t_set, oracle.t);
    assert_eq!(d.u, Some(oracle.u));
    assert_eq!(r.decomposition.f_set, oracle.f);
}

fn check_exhaustively(r: &BoundReport) {
    let eq = equivalent(&r.intersection().unwrap(), &r.rule.expr, SweepConfig::default()).unwrap();
    assert!(eq.is_equal(), "{eq:?}");
}

#[test]
fn bundled_tables_load_with_stated_totals() {
    for (year, total) in [
        ("2014", 507_416_607),
        ("2016", 510_277_177),
        ("2017", 511_521_686),
        ("2018", 512_710_966),
    ] {
        let t = PopulationTable::builtin(year).unwrap();
        assert_eq!(t.len(), 28);
        assert_eq!(t.total(), total);
        assert_eq!(t.stated_total, Some(total));
        assert_eq!(t.rows[0].country, "Germany");
        let reloaded = PopulationTable::load(t.to_csv().as_bytes(), year).unwrap();
        assert_eq!(reloaded.rows, t.rows);
    }
}

#[test]
fn eu2014() {
    let r = report("2014", &[]);
    assert_eq!(r.decomposition.method, Method::Theorem1);
    assert_eq!(r.bound, 24);
    let d = r.decomposition.d_summary.as_ref().unwrap();
    assert_eq!(d.member_count, 10);
    let mut outs: Vec<Vec<usize>> = d
        .members
        .as_ref()
        .unwrap()
        .iter()
        .map(|m| complement_of(&r, &ranks(&r, m)))
        .collect();
    outs.sort();
    assert_eq!(
        outs,
        [
            [1, 2, 3],
            [1, 2, 4],
            [1, 2, 5],
            [1, 2, 6],
            [1, 3, 4],
            [1, 3, 5],
            [1, 3, 6],
            [1, 4, 5],
            [1, 4, 6],
            [2, 3, 4]
        ]
    );
    assert_eq!(ranks(&r, &d.t_set), (7..=28).collect::<Vec<_>>());
    let slack = r.slack.unwrap();
    assert_eq!((slack.scaled, slack.ceiling), (666_981_151, 33_349_058));
    let f: Vec<_> = r.decomposition.f_set.iter().map(|c| ranks(&r, c)).collect();
    assert_eq!(f, [complement_of(&r, &[3, 4, 5, 6])]);
    check_against_oracle(&r);
    check_exhaustively(&r);
}

#[test]
fn eu2016_to_2018() {
    for (year, members, ceiling) in [
        ("2016", 10, 35_691_682),
        ("2017", 11, 36_286_719),
        ("2018", 11, 36_861_112),
    ] {
        let r = report(year, &[]);
        assert_eq!(r.bound, 25, "{year}");
        let d = r.decomposition.d_summary.as_ref().unwrap();
        assert_eq!(d.member_count, members, "{year}");
        assert_eq!(ranks(&r, &d.t_set), (7..=28).collect::<Vec<_>>());
        assert_eq!(r.slack.unwrap().ceiling, ceiling, "{year}");
        let f: Vec<_> = r.decomposition.f_set.iter().map(|c| ranks(&r, c)).collect();
        assert_eq!(
            f,
            [complement_of(&r, &[3, 4, 5, 6]), complement_of(&r, &[2, 4, 5, 6])],
            "{year}"
        );
        if members == 11 {
            let extra = complement_of(&r, &[2, 3, 5]);
            assert!(d
                .members
                .as_ref()
                .unwrap()
                .iter()
                .any(|m| ranks(&r, m) == extra));
        }
        check_against_oracle(&r);
        check_exhaustively(&r);
    }
}

#[test]
fn eu2018_without_the_largest_departing_member() {
    let r = report("2018", &["United Kingdom"]);
    assert_eq!(r.rule.n(), 27);
    assert!(!r.rule.ranks().contains(&3));
    let d = r.decomposition.d_summary.as_ref().unwrap();
    assert_eq!(d.member_count, 20);
    assert_eq!(ranks(&r, &d.t_set), (17..=28).collect::<Vec<_>>());
    assert_eq!(r.decomposition.f_set.len(), 1351);
    assert_eq!(r.bound, 1364);
    check_against_oracle(&r);
    check_exhaustively(&r);
}
