//! The worked examples, run end to end with their expected verdicts.

use serde::Serialize;
use serde_json::{json, Value};

use crate::completeness::{
    build_reciprocal_witness, construct_counterexample_map, fixed_point_scan, verify_counterexample_with,
    verify_gornicki_answer_with,
};
use crate::condition::{evaluate_condition_with, ConditionKind, PairSource, Parallelism};
use crate::error::{Error, Result};
use crate::map::{orbit, orbit_cluster_probe, OrbitStatus, SelfMap};
use crate::picard::run_picard;
use crate::scalar::{q, Scalar};
use crate::space::{Point, Space};

#[derive(Clone, Debug)]
pub struct GalleryOptions {
    pub gornicki_n: u64,
    pub prefix: u64,
    pub sample_size: usize,
    pub seed: u64,
    /// Space for the piecewise drop example; the split set when absent.
    pub split_space: Option<Space>,
    pub parallelism: Parallelism,
}

impl Default for GalleryOptions {
    fn default() -> Self {
        GalleryOptions {
            gornicki_n: 1000,
            prefix: 200,
            sample_size: 200,
            seed: 0,
            split_space: None,
            parallelism: Parallelism::Serial,
        }
    }
}

impl GalleryOptions {
    pub fn validate(&self) -> Result<()> {
        if self.prefix < 2 {
            return Err(Error::InvalidParameter("prefix must be at least 2".into()));
        }
        if self.sample_size < 3 {
            return Err(Error::InvalidParameter("sample size must be at least 3".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GallerySection {
    pub name: String,
    pub as_expected: bool,
    pub details: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GalleryReport {
    pub sections: Vec<GallerySection>,
}

impl GalleryReport {
    pub fn all_as_expected(&self) -> bool {
        self.sections.iter().all(|s| s.as_expected)
    }

    pub fn first_failure(&self) -> Option<&str> {
        self.sections.iter().find(|s| !s.as_expected).map(|s| s.name.as_str())
    }
}

pub fn run_gallery(opts: &GalleryOptions) -> Result<GalleryReport> {
    opts.validate()?;
    Ok(GalleryReport {
        sections: vec![
            orbit_probes()?,
            unit_interval_picard()?,
            piecewise_drop(opts)?,
            gornicki(opts)?,
            reciprocal_counterexample(opts)?,
        ],
    })
}

fn section(name: &str, as_expected: bool, details: Value) -> GallerySection {
    GallerySection { name: name.into(), as_expected, details }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn orbit_probes() -> Result<GallerySection> {
    let s = Space::half_line();
    let stair = orbit(&s, &SelfMap::stair_scale(), &s.point(q(3, 2))?, 20)?;
    let stair_probe = orbit_cluster_probe(&s, &stair, &q(1, 10));
    let dbl = orbit(&s, &SelfMap::scale(q(2, 1)), &s.point(q(1, 1))?, 10)?;
    let dbl_probe = orbit_cluster_probe(&s, &dbl, &q(9, 10));
    let ok = stair_probe.cluster_found && !dbl_probe.cluster_found && dbl_probe.gaps_nondecreasing;
    Ok(section(
        "orbit_probes",
        ok,
        json!({
            "stair_scale_from_3/2": { "orbit": to_value(&stair), "probe": to_value(&stair_probe) },
            "scale_2_from_1": { "orbit": to_value(&dbl), "probe": to_value(&dbl_probe) },
        }),
    ))
}

fn unit_interval_picard() -> Result<GallerySection> {
    let s = Space::unit_interval_right();
    let run = run_picard(&s, &SelfMap::scale(q(1, 2)), &s.point(q(1, 2))?, 20)?;
    let halving = run.orbit.gaps.windows(2).all(|w| w[1] == w[0].half());
    let ok = run.orbit.status == (OrbitStatus::Truncated { horizon: 20 })
        && halving
        && run.gap_monotone
        && run.fixed_point.is_none()
        && run.cauchy_evidence < Scalar::pow2(-16);
    Ok(section(
        "unit_interval_picard",
        ok,
        json!({
            "map": "scale(1/2)",
            "start": "1/2",
            "horizon": 20,
            "gaps_halving": halving,
            "run": to_value(&run),
        }),
    ))
}

fn piecewise_drop(opts: &GalleryOptions) -> Result<GallerySection> {
    let s = opts.split_space.clone().unwrap_or_else(Space::split_set);
    let map = SelfMap::piecewise_drop();
    let anchors = [s.point(q(2, 1))?, s.point(q(-1, 1))?, s.point(q(0, 1))?];
    let mut points: Vec<Point> = anchors.to_vec();
    for p in s.sample(opts.sample_size + anchors.len(), opts.seed) {
        if points.len() == opts.sample_size {
            break;
        }
        if !points.contains(&p) {
            points.push(p);
        }
    }
    let report = evaluate_condition_with(
        &ConditionKind::StrictKannan,
        &s,
        &map,
        &PairSource::Sample { points: points.clone(), seed: Some(opts.seed) },
        opts.parallelism,
    )?;

    let zero = s.point(Scalar::zero())?;
    let t2 = map.apply(&s, &anchors[0])?;
    let mut fixed = Vec::new();
    let mut max_steps = 0;
    let mut all_reach_zero = true;
    let mut unit_distance_to_t2 = true;
    for p in &points {
        let tp = map.apply(&s, p)?;
        if tp == *p {
            fixed.push(p.clone());
        }
        if *p != anchors[0] && s.dist(&tp, &t2)? != Scalar::one() {
            unit_distance_to_t2 = false;
        }
        let run = run_picard(&s, &map, p, 8)?;
        match (run.fixed_point.as_ref(), run.steps_to_fixed_point()) {
            (Some(z), Some(k)) if *z == zero => max_steps = max_steps.max(k),
            _ => all_reach_zero = false,
        }
    }
    let ok = report.holds() && fixed == [zero] && all_reach_zero && max_steps <= 3 && unit_distance_to_t2;
    Ok(section(
        "piecewise_drop_split_set",
        ok,
        json!({
            "sample_points": points.len(),
            "condition": to_value(&report),
            "fixed_points_in_sample": to_value(&fixed),
            "all_starts_reach_0": all_reach_zero,
            "max_steps_to_0": max_steps,
            "d(Tx,T2)_is_1_for_x_ne_2": unit_distance_to_t2,
        }),
    ))
}

fn gornicki(opts: &GalleryOptions) -> Result<GallerySection> {
    let r = verify_gornicki_answer_with(opts.gornicki_n, opts.parallelism)?;
    let s = Space::gornicki_nat();
    let t = SelfMap::triple_nat();
    let (one, two) = (s.point(q(1, 1))?, s.point(q(2, 1))?);
    let lhs = s.dist(&t.apply(&s, &one)?, &t.apply(&s, &two)?)?;
    let rhs = (s.dist(&one, &t.apply(&s, &one)?)? + s.dist(&two, &t.apply(&s, &two)?)?).half();
    let spot_ok = lhs == q(7, 6) && rhs == q(3, 2);
    Ok(section(
        "gornicki_answer",
        r.as_expected() && spot_ok,
        json!({
            "report": to_value(&r),
            "spot_pair": { "x": "1", "y": "2", "lhs": lhs, "rhs": rhs },
        }),
    ))
}

fn reciprocal_counterexample(opts: &GalleryOptions) -> Result<GallerySection> {
    let w = build_reciprocal_witness();
    let cm = construct_counterexample_map(&w)?;
    let t1 = cm.choose(&w.term(1))?.target_index;
    let t2 = cm.choose(&w.term(2))?.target_index;
    let r = verify_counterexample_with(&cm, opts.prefix, opts.parallelism)?;
    let scan = fixed_point_scan(&cm, opts.prefix)?;
    let s = w.space();
    let (a, b) = (w.term(1), w.term(2));
    let (ta, tb) = (cm.apply(&a)?, cm.apply(&b)?);
    let lhs = s.dist(&ta, &tb)?;
    let rhs = (s.dist(&a, &ta)? + s.dist(&b, &tb)?).half();
    let spot_ok = lhs == q(8, 65) && rhs == q(159, 260);
    let targets_ok = (t1, t2) == (5, 13);
    let expected_pairs = (opts.prefix * (opts.prefix - 1) / 2) as usize;
    let ok = r.as_expected() && r.report.pairs_checked == expected_pairs && scan.is_empty() && spot_ok && targets_ok;
    Ok(section(
        "reciprocal_counterexample",
        ok,
        json!({
            "targets": { "x_1": format!("x_{t1}"), "x_2": format!("x_{t2}") },
            "spot_pair": { "x": "1", "y": "1/2", "lhs": lhs, "rhs": rhs },
            "fixed_points_in_prefix": scan,
            "verification": to_value(&r),
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> GalleryOptions {
        GalleryOptions { gornicki_n: 50, prefix: 40, sample_size: 40, ..Default::default() }
    }

    #[test]
    fn small_gallery_is_as_expected() {
        let r = run_gallery(&small()).unwrap();
        assert_eq!(r.sections.len(), 5);
        assert!(r.all_as_expected(), "{:?}", r.first_failure());
    }

    #[test]
    fn gornicki_single_pair() {
        let r = gornicki(&GalleryOptions { gornicki_n: 2, ..small() }).unwrap();
        assert!(r.as_expected);
        assert_eq!(r.details["report"]["pairs_checked"], 1);
    }

    #[test]
    fn parallel_matches_serial() {
        let a = run_gallery(&small()).unwrap();
        let b = run_gallery(&GalleryOptions { parallelism: Parallelism::Parallel, ..small() }).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn wrong_space_surfaces_membership() {
        let opts = GalleryOptions { split_space: Some(Space::half_line()), ..small() };
        let e = run_gallery(&opts).unwrap_err();
        assert!(e.is_membership(), "{e}");
    }
}
