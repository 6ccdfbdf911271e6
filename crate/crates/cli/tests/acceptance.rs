//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Exits nonzero if any criterion fails, except those listed in
//! `KNOWN_UNATTAINABLE`, which still print FAIL with the reason.

use std::time::{Duration, Instant};

use kannan_core::completeness::{
    build_reciprocal_witness, construct_counterexample_map, fixed_point_scan, verify_counterexample,
    verify_gornicki_answer, verify_gornicki_answer_with,
};
use kannan_core::condition::{check_epsdelta_orbit, evaluate_condition, ConditionKind, PairSource};
use kannan_core::oracle::{decode_map_id, enumerate_census, random_finite_space_with, Generator};
use kannan_core::{lt_sqrt, q, run_picard, Parallelism, Point, Scalar, SelfMap, Space};

/// Criteria whose stated outcome contradicts the checker's own definition.
const KNOWN_UNATTAINABLE: &[(u32, &str)] = &[(
    6,
    "the Scale 2 orbit from 1 has all pairwise distances >= 1, so d < eps + delta <= 1/2 never \
     holds and the implication is vacuously true for eps = 1/4",
)];

type Criterion = (u32, fn() -> (bool, String));

struct Line {
    id: u32,
    pass: bool,
    detail: String,
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        (1, gornicki_reproduction),
        (2, piecewise_drop_reproduction),
        (3, strict_kannan_invariants),
        (4, reciprocal_construction),
        (5, condition_cross_checks),
        (6, epsdelta_checker),
        (7, determinism),
    ];
    let mut lines = Vec::new();
    for (id, f) in criteria {
        let t = Instant::now();
        let (pass, detail) = f();
        let line = Line { id, pass, detail: format!("{detail} [{:.1?}]", t.elapsed()) };
        println!(
            "criterion {}: {} - {}",
            line.id,
            if line.pass { "PASS" } else { "FAIL" },
            line.detail
        );
        lines.push(line);
    }
    let mut unexpected = 0;
    for l in lines.iter().filter(|l| !l.pass) {
        match KNOWN_UNATTAINABLE.iter().find(|(id, _)| *id == l.id) {
            Some((_, why)) => println!("criterion {}: known unattainable: {why}", l.id),
            None => unexpected += 1,
        }
    }
    let passed = lines.iter().filter(|l| l.pass).count();
    println!("acceptance: {passed}/{} passed, {unexpected} unexpected failures", lines.len());
    if unexpected > 0 {
        std::process::exit(1);
    }
}

fn gornicki_reproduction() -> (bool, String) {
    let t = Instant::now();
    let small = verify_gornicki_answer_with(1000, Parallelism::Serial).expect("N = 1000 runs");
    let small_time = t.elapsed();
    let r = verify_gornicki_answer(10_000).expect("N = 10^4 runs");
    let pass = r.as_expected()
        && r.pairs_checked == 49_995_000
        && small.as_expected()
        && small_time < Duration::from_secs(5);
    (
        pass,
        format!(
            "N=10^4: {} pairs, closed forms {}, strict {}, fixed points {:?}; N=10^3 in {:.2?}",
            r.pairs_checked, r.closed_forms_match, r.strict_kannan_holds, r.fixed_points, small_time
        ),
    )
}

fn piecewise_drop_reproduction() -> (bool, String) {
    let s = Space::split_set();
    let t = SelfMap::piecewise_drop();
    let mut points: Vec<Point> = [q(2, 1), q(-1, 1), q(0, 1)].into_iter().map(|v| s.point(v).unwrap()).collect();
    for p in s.sample(400, 2024) {
        if points.len() == 200 {
            break;
        }
        if !points.contains(&p) {
            points.push(p);
        }
    }
    let report =
        evaluate_condition(&ConditionKind::StrictKannan, &s, &t, &PairSource::Sample { points: points.clone(), seed: None })
            .unwrap();
    let zero = s.point(Scalar::zero()).unwrap();
    let fixed: Vec<&Point> = points.iter().filter(|p| t.apply(&s, p).unwrap() == **p).collect();
    let mut worst = 0;
    let mut all_reach = true;
    for p in &points {
        let run = run_picard(&s, &t, p, 8).unwrap();
        match (run.fixed_point.clone(), run.steps_to_fixed_point()) {
            (Some(z), Some(k)) if z == zero => worst = worst.max(k),
            _ => all_reach = false,
        }
    }
    let pass = points.len() == 200 && report.holds() && report.pairs_checked == 19_900 && fixed == [&zero] && all_reach && worst <= 3;
    (
        pass,
        format!(
            "{} points, {} pairs, strict holds {}, fixed {:?}, max steps to 0 = {worst}",
            points.len(),
            report.pairs_checked,
            report.holds(),
            fixed.iter().map(|p| p.to_string()).collect::<Vec<_>>()
        ),
    )
}

fn random_space(seed: u64) -> Space {
    let size = 2 + (seed % 4) as usize;
    let generator = if seed.is_multiple_of(2) { Generator::UnitBand } else { Generator::Line };
    random_finite_space_with(size, seed, generator).expect("random space")
}

fn strict_kannan_invariants() -> (bool, String) {
    let mut maps = 0;
    let mut runs = 0;
    let mut failures = Vec::new();
    for seed in 0..100 {
        let space = random_space(seed);
        let n = space.size().unwrap();
        let census = enumerate_census(&space, &[]).unwrap();
        failures.extend(census.defects.iter().cloned());
        let points = space.points().unwrap();
        for row in census.strict_kannan_rows() {
            maps += 1;
            let id = u64::from_str_radix(&row.map_id, n as u32).unwrap();
            let map = SelfMap::table(&space, decode_map_id(n, id)).unwrap();
            let mut limit = None;
            for p in &points {
                runs += 1;
                let r = run_picard(&space, &map, p, n + 1).unwrap();
                let steps = r.steps_to_fixed_point();
                let ok = r.gap_monotone
                    && r.pairwise_bound_ok
                    && steps.is_some_and(|k| k <= n)
                    && r.fixed_point.is_some()
                    && limit.get_or_insert_with(|| r.fixed_point.clone()) == &r.fixed_point;
                if !ok {
                    failures.push(format!("seed {seed} map {} from {p}", row.map_id));
                }
            }
            if row.fixed_point_count != 1 {
                failures.push(format!("seed {seed} map {}: {} fixed points", row.map_id, row.fixed_point_count));
            }
        }
    }
    (
        failures.is_empty() && maps > 0,
        format!("100 spaces, {maps} strict Kannan maps, {runs} Picard runs, {} counterexamples {:?}", failures.len(), failures.first()),
    )
}

fn reciprocal_construction() -> (bool, String) {
    let w = build_reciprocal_witness();
    let cm = construct_counterexample_map(&w).unwrap();
    let t1 = cm.choose(&w.term(1)).unwrap().target_index;
    let t2 = cm.choose(&w.term(2)).unwrap().target_index;
    let r = verify_counterexample(&cm, 200).unwrap();
    let scan = fixed_point_scan(&cm, 10_000).unwrap();
    let s = w.space();
    let (a, b) = (w.term(1), w.term(2));
    let (ta, tb) = (cm.apply(&a).unwrap(), cm.apply(&b).unwrap());
    let lhs = s.dist(&ta, &tb).unwrap();
    let rhs = (s.dist(&a, &ta).unwrap() + s.dist(&b, &tb).unwrap()).half();
    let pass = (t1, t2) == (5, 13)
        && r.report.holds()
        && r.report.pairs_checked == 19_900
        && scan.is_empty()
        && lhs == q(8, 65)
        && rhs == q(159, 260)
        && lhs < rhs;
    (
        pass,
        format!(
            "x_1 -> x_{t1}, x_2 -> x_{t2}; {} pairs, holds {}; fixed points in first 10^4: {}; spot {lhs} < {rhs}",
            r.report.pairs_checked,
            r.report.holds(),
            scan.len()
        ),
    )
}

/// Khan verdict for one pair in floating point, or `None` within 2^-20 of the
/// boundary.
fn khan_float(lhs: &Scalar, radicand: &Scalar) -> Option<bool> {
    let (l, r) = (lhs.to_f64(), radicand.to_f64().sqrt());
    ((l - r).abs() > 2f64.powi(-20)).then_some(l < r)
}

fn condition_cross_checks() -> (bool, String) {
    let ks = [q(1, 4), q(1, 3), q(49, 100)];
    let mut conds: Vec<ConditionKind> = ks.iter().map(|k| ConditionKind::kannan_k(k.clone()).unwrap()).collect();
    conds.push(ConditionKind::chen_yeh_zero());
    conds.push(ConditionKind::Khan);
    let (mut rows, mut kannan_rows, mut khan_pairs, mut khan_skipped) = (0, 0, 0, 0);
    let mut failures = Vec::new();
    for seed in 0..100 {
        let space = random_space(seed);
        let n = space.size().unwrap();
        let points = space.points().unwrap();
        let census = enumerate_census(&space, &conds).unwrap();
        for row in &census.rows {
            rows += 1;
            let kannan = &row.satisfies[..ks.len()];
            let (chen_yeh, khan) = (row.satisfies[ks.len()], row.satisfies[ks.len() + 1]);
            if kannan.iter().any(|&b| b) {
                kannan_rows += 1;
                if !row.strict_kannan {
                    failures.push(format!("seed {seed} map {}: kannan_k without strict", row.map_id));
                }
            }
            if row.strict_kannan && !chen_yeh {
                failures.push(format!("seed {seed} map {}: strict without chen_yeh(0,0)", row.map_id));
            }
            let id = u64::from_str_radix(&row.map_id, n as u32).unwrap();
            let map = SelfMap::table(&space, decode_map_id(n, id)).unwrap();
            let mut exact_all = true;
            for i in 0..n {
                for j in (i + 1)..n {
                    let (x, y) = (&points[i], &points[j]);
                    let (tx, ty) = (map.apply(&space, x).unwrap(), map.apply(&space, y).unwrap());
                    let lhs = space.dist(&tx, &ty).unwrap();
                    let radicand = space.dist(x, &tx).unwrap() * space.dist(y, &ty).unwrap();
                    let exact = lt_sqrt(&lhs, &radicand).unwrap();
                    exact_all &= exact;
                    match khan_float(&lhs, &radicand) {
                        Some(f) => {
                            khan_pairs += 1;
                            if f != exact {
                                failures.push(format!("seed {seed} map {} pair ({x},{y}): khan float {f}, exact {exact}", row.map_id));
                            }
                        }
                        None => khan_skipped += 1,
                    }
                }
            }
            if exact_all != khan {
                failures.push(format!("seed {seed} map {}: khan row verdict disagrees with pairwise lt_sqrt", row.map_id));
            }
        }
    }
    (
        failures.is_empty(),
        format!(
            "{rows} census rows, {kannan_rows} kannan_k rows, khan float agreement on {khan_pairs} pairs ({khan_skipped} near boundary skipped), {} disagreements {:?}",
            failures.len(),
            failures.first()
        ),
    )
}

fn epsdelta_checker() -> (bool, String) {
    let s = Space::half_line();
    let one = s.point(Scalar::one()).unwrap();
    let mut halving_ok = true;
    for e in 1..=10 {
        let eps = Scalar::pow2(-e);
        let r = check_epsdelta_orbit(&s, &SelfMap::scale(q(1, 2)), &one, std::slice::from_ref(&eps), std::slice::from_ref(&eps), 64).unwrap();
        halving_ok &= r.rows.iter().all(|row| row.passed());
    }
    let r = check_epsdelta_orbit(&s, &SelfMap::scale(q(2, 1)), &one, &[q(1, 4)], &[q(1, 4), q(1, 8)], 16).unwrap();
    let doubling_fails = r.rows.iter().all(|row| !row.passed());
    let found = r.rows[0].passing_delta.as_ref().map(|d| d.to_string()).unwrap_or_else(|| "none".into());
    (
        halving_ok && doubling_fails,
        format!("scale 1/2 passes all 10 eps: {halving_ok}; scale 2 at eps 1/4 fails for all delta: {doubling_fails} (passing delta found: {found})"),
    )
}

fn determinism() -> (bool, String) {
    let run = |args: &[&str]| {
        let mut v = vec!["kannan"];
        v.extend_from_slice(args);
        kannan_cli::run(v)
    };
    let gallery = ["gallery"];
    let census = ["census", "--size", "4", "--seed", "7", "--condition", "kannan_k(1/3)", "--condition", "khan", "--format", "csv"];
    let g1 = run(&gallery);
    let g2 = run(&gallery);
    let gp = run(&["gallery", "--parallel"]);
    let c1 = run(&census);
    let c2 = run(&census);
    let mut cpar: Vec<&str> = census.to_vec();
    cpar.push("--parallel");
    let cp = run(&cpar);
    let ok = g1.code == 0 && c1.code == 0 && g1 == g2 && g1 == gp && c1 == c2 && c1 == cp;
    (
        ok,
        format!(
            "gallery {} bytes, census {} bytes; repeat identical {}, serial = parallel {}",
            g1.stdout.len(),
            c1.stdout.len(),
            g1 == g2 && c1 == c2,
            g1 == gp && c1 == cp
        ),
    )
}
