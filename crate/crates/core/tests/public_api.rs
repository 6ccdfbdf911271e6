use kannan_core::condition::{ConditionSpec, Verdict};
use kannan_core::map::MapSpec;
use kannan_core::oracle::{enumerate_census, random_finite_space};
use kannan_core::space::SpaceSpec;
use kannan_core::{
    compare, evaluate_condition, lt_sqrt, orbit, q, run_picard, verify_metric_axioms, ConditionKind, OrbitStatus,
    PairSource, Scalar, SelfMap, Space,
};
use std::cmp::Ordering;

#[test]
fn scalar_examples() {
    assert_eq!(compare(&q(1, 3), &"2/6".parse().unwrap()), Ordering::Equal);
    assert_eq!(compare(&q(7, 6), &q(3, 2)), Ordering::Less);
    assert!(lt_sqrt(&q(1, 1), &q(9, 4)).unwrap());
    assert!(!lt_sqrt(&q(3, 2), &q(9, 4)).unwrap());
    assert!(lt_sqrt(&q(-1, 1), &q(0, 1)).unwrap());
    assert!(lt_sqrt(&q(1, 1), &q(-1, 1)).is_err());
}

#[test]
fn json_specs_round_trip_through_the_core() {
    let space: SpaceSpec =
        serde_json::from_str(r#"{"kind":"finite","labels":["a","b","c"],"d":[["0","1","1"],["1","0","1"],["1","1","0"]]}"#)
            .unwrap();
    let space = Space::from_spec(&space).unwrap();
    let map: MapSpec = serde_json::from_str(r#"{"kind":"table","assign":{"a":"a","b":"a","c":"b"}}"#).unwrap();
    let map = SelfMap::from_spec(&map, &space).unwrap();
    let cond = ConditionSpec::parse("strict_kannan").unwrap().resolve(&space).unwrap();
    let r = evaluate_condition(&cond, &space, &map, &PairSource::Exhaustive).unwrap();
    // (a, b) holds with 0 < 1/2; (a, c) fails with d(a, b) = 1 against (0 + 1) / 2
    assert_eq!(r.pairs_checked, 2);
    match r.verdict {
        Verdict::Violated(v) => assert_eq!((v.x.to_string(), v.y.to_string()), ("a".into(), "c".into())),
        Verdict::Holds => panic!("expected a violation"),
    }
    let run = run_picard(&space, &map, &space.parse_point("c").unwrap(), 8).unwrap();
    assert_eq!(run.fixed_point.unwrap().to_string(), "a");
}

#[test]
fn axioms_reject_broken_matrices() {
    let tri = vec![vec![q(0, 1), q(1, 1), q(5, 1)], vec![q(1, 1), q(0, 1), q(1, 1)], vec![q(5, 1), q(1, 1), q(0, 1)]];
    let r = verify_metric_axioms(&["a", "b", "c"], &tri);
    assert!(!r.passed());
    assert!(Space::finite(&["a", "b", "c"], tri).is_err());
}

#[test]
fn census_rows_agree_with_direct_evaluation() {
    let space = random_finite_space(3, 42).unwrap();
    let census = enumerate_census(&space, &[ConditionKind::kannan_k(q(1, 3)).unwrap()]).unwrap();
    assert_eq!(census.rows.len(), 27);
    assert!(census.defects.is_empty());
    for row in &census.rows {
        let targets: Vec<usize> = row.map_id.chars().map(|c| c.to_digit(10).unwrap() as usize).collect();
        let map = SelfMap::table(&space, targets).unwrap();
        let direct = evaluate_condition(&ConditionKind::StrictKannan, &space, &map, &PairSource::Exhaustive).unwrap();
        assert_eq!(direct.holds(), row.strict_kannan, "map {}", row.map_id);
    }
}

#[test]
fn catalog_orbits() {
    let s = Space::half_line();
    let o = orbit(&s, &SelfMap::stair_scale(), &s.point(q(3, 2)).unwrap(), 5).unwrap();
    assert_eq!(o.points[1].value(), Some(&q(1, 2)));
    assert_eq!(o.status, OrbitStatus::Truncated { horizon: 5 });
    let g = Space::gornicki_nat();
    let o = orbit(&g, &SelfMap::triple_nat(), &g.point(q(1, 1)).unwrap(), 4).unwrap();
    assert_eq!(o.last().value(), Some(&q(81, 1)));
    assert!(g.point(Scalar::zero()).is_err());
}
