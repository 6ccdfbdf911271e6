//! Picard iteration with the diagnostics of the strict Kannan existence proof.
//!
//! There is no tolerance anywhere: a run ends at an exact fixed point, an exact
//! cycle, or the horizon.

use std::fmt::Write as _;

use serde::Serialize;

use crate::condition::{evaluate_condition, ConditionKind, PairSource};
use crate::error::{Error, Result};
use crate::map::{orbit, Orbit, OrbitStatus, SelfMap};
use crate::scalar::Scalar;
use crate::space::{Point, Space};

pub const DEFAULT_HORIZON: usize = 64;
pub const MAX_HORIZON: usize = 512;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PicardRun {
    pub orbit: Orbit,
    /// s_n < s_{n-1} wherever both gaps are nonzero.
    pub gap_monotone: bool,
    /// d(x_n, x_m) < (s_{n-1} + s_{m-1}) / 2 for all 1 <= n < m in the orbit.
    pub pairwise_bound_ok: bool,
    /// Largest d(x_n, x_m) over 1 <= n < m; below s_0 whenever the bound holds.
    pub max_pairwise_distance: Scalar,
    /// The last computed gap.
    pub gap_limit_evidence: Scalar,
    pub fixed_point: Option<Point>,
    /// Largest distance between points of the last quarter of the orbit.
    pub cauchy_evidence: Scalar,
}

impl PicardRun {
    /// Steps taken before the fixed point was first reached.
    pub fn steps_to_fixed_point(&self) -> Option<usize> {
        match self.orbit.status {
            OrbitStatus::FixedPointReached { at } => Some(at),
            _ => None,
        }
    }

    /// `step,point,gap` rows; the final point has an empty gap.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("step,point,gap\n");
        for (i, p) in self.orbit.points.iter().enumerate() {
            let gap = self.orbit.gaps.get(i).map(|g| g.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{i},{p},{gap}");
        }
        out
    }
}

pub fn run_picard(space: &Space, map: &SelfMap, x0: &Point, horizon: usize) -> Result<PicardRun> {
    if horizon == 0 || horizon > MAX_HORIZON {
        return Err(Error::InvalidParameter(format!(
            "Picard horizon {horizon} outside 1..={MAX_HORIZON}"
        )));
    }
    let orbit = orbit(space, map, x0, horizon)?;
    let pts = &orbit.points;
    let gaps = &orbit.gaps;

    let gap_monotone = (1..gaps.len())
        .filter(|&n| !gaps[n].is_zero() && !gaps[n - 1].is_zero())
        .all(|n| gaps[n] < gaps[n - 1]);

    // Points x_1 .. x_last; s_{n-1} exists for each of them.
    let last = pts.len() - 1;
    let mut pairwise_bound_ok = true;
    let mut max_pairwise_distance = Scalar::zero();
    for n in 1..=last {
        for m in (n + 1)..=last {
            let d = space.dist_unchecked(&pts[n], &pts[m]);
            if d >= (&gaps[n - 1] + &gaps[m - 1]).half() {
                pairwise_bound_ok = false;
            }
            if d > max_pairwise_distance {
                max_pairwise_distance = d;
            }
        }
    }

    let tail_len = (pts.len() / 4).max(1);
    let tail = &pts[pts.len() - tail_len..];
    let mut cauchy_evidence = Scalar::zero();
    for (i, p) in tail.iter().enumerate() {
        for r in &tail[i + 1..] {
            let d = space.dist_unchecked(p, r);
            if d > cauchy_evidence {
                cauchy_evidence = d;
            }
        }
    }

    let fixed_point = match orbit.status {
        OrbitStatus::FixedPointReached { at } => {
            let z = pts[at].clone();
            debug_assert_eq!(map.apply(space, &z)?, z);
            Some(z)
        }
        _ => None,
    };

    Ok(PicardRun {
        gap_limit_evidence: gaps.last().cloned().unwrap_or_else(Scalar::zero),
        orbit,
        gap_monotone,
        pairwise_bound_ok,
        max_pairwise_distance,
        fixed_point,
        cauchy_evidence,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixedPointCheck {
    pub is_fixed: bool,
    pub residual: Scalar,
}

/// d(z, Tz) and whether it is exactly zero.
pub fn verify_fixed_point(space: &Space, map: &SelfMap, z: &Point) -> Result<FixedPointCheck> {
    let image = map.apply(space, z)?;
    let residual = space.dist_unchecked(z, &image);
    Ok(FixedPointCheck { is_fixed: residual.is_zero(), residual })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniquenessProbe {
    pub fixed_points: Vec<Point>,
    pub strict_kannan_on_candidates: bool,
}

/// Every exact fixed point among `candidates`. When the strict Kannan
/// condition holds on all distinct candidate pairs, more than one fixed point
/// is reported as a theorem contradiction.
pub fn uniqueness_probe(space: &Space, map: &SelfMap, candidates: &[Point]) -> Result<UniquenessProbe> {
    let mut fixed_points = Vec::new();
    for c in candidates {
        if verify_fixed_point(space, map, c)?.is_fixed && !fixed_points.contains(c) {
            fixed_points.push(c.clone());
        }
    }
    let report = evaluate_condition(
        &ConditionKind::StrictKannan,
        space,
        map,
        &PairSource::Sample { points: candidates.to_vec(), seed: None },
    )?;
    let strict = report.holds();
    if strict && fixed_points.len() > 1 {
        return Err(Error::TheoremContradiction(format!(
            "{} distinct fixed points under a strict Kannan map on {}",
            fixed_points.len(),
            space.name()
        )));
    }
    Ok(UniquenessProbe { fixed_points, strict_kannan_on_candidates: strict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn pt(s: &Space, n: i64, d: i64) -> Point {
        s.point(q(n, d)).unwrap()
    }

    #[test]
    fn piecewise_drop_run() {
        let s = Space::split_set();
        let r = run_picard(&s, &SelfMap::piecewise_drop(), &pt(&s, 2, 1), DEFAULT_HORIZON).unwrap();
        assert_eq!(r.fixed_point, Some(pt(&s, 0, 1)));
        assert!(r.gap_monotone && r.pairwise_bound_ok);
        assert_eq!(r.orbit.gaps, vec![q(3, 1), q(1, 1), q(0, 1)]);
        assert_eq!(r.steps_to_fixed_point(), Some(2));
        assert_eq!(r.trace_csv(), "step,point,gap\n0,2,3\n1,-1,1\n2,0,0\n3,0,\n");
    }

    #[test]
    fn halving_on_unit_interval() {
        let s = Space::unit_interval_right();
        let r = run_picard(&s, &SelfMap::scale(q(1, 2)), &pt(&s, 1, 2), 20).unwrap();
        assert_eq!(r.orbit.status, OrbitStatus::Truncated { horizon: 20 });
        for w in r.orbit.gaps.windows(2) {
            assert_eq!(w[1], w[0].half());
        }
        assert!(r.gap_monotone);
        // halving is a contraction but not strict Kannan: x = 1/2, y = 1/8
        assert!(!r.pairwise_bound_ok);
        assert!(r.fixed_point.is_none());
        // last quarter spans x_16 .. x_20 = 2^-17 .. 2^-21
        assert_eq!(r.cauchy_evidence, Scalar::pow2(-17) - Scalar::pow2(-21));
        assert!(r.cauchy_evidence <= Scalar::pow2(-16));
    }

    #[test]
    fn run_from_fixed_point() {
        let s = Space::split_set();
        let r = run_picard(&s, &SelfMap::piecewise_drop(), &pt(&s, 0, 1), 8).unwrap();
        assert_eq!(r.fixed_point, Some(pt(&s, 0, 1)));
        assert_eq!(r.steps_to_fixed_point(), Some(0));
        assert!(r.gap_monotone && r.pairwise_bound_ok);
    }

    #[test]
    fn horizon_limits() {
        let s = Space::split_set();
        let m = SelfMap::piecewise_drop();
        assert!(run_picard(&s, &m, &pt(&s, 2, 1), 0).is_err());
        assert!(run_picard(&s, &m, &pt(&s, 2, 1), MAX_HORIZON + 1).is_err());
        assert!(run_picard(&s, &m, &pt(&s, 2, 1), MAX_HORIZON).is_ok());
    }

    #[test]
    fn doubling_breaks_monotonicity() {
        let s = Space::half_line();
        let r = run_picard(&s, &SelfMap::scale(q(2, 1)), &pt(&s, 1, 1), 8).unwrap();
        assert!(!r.gap_monotone);
        assert!(!r.pairwise_bound_ok);
    }

    #[test]
    fn fixed_point_checks() {
        let split = Space::split_set();
        let c = verify_fixed_point(&split, &SelfMap::piecewise_drop(), &pt(&split, 0, 1)).unwrap();
        assert_eq!(c, FixedPointCheck { is_fixed: true, residual: q(0, 1) });
        let g = Space::gornicki_nat();
        let c = verify_fixed_point(&g, &SelfMap::triple_nat(), &pt(&g, 1, 1)).unwrap();
        assert_eq!(c, FixedPointCheck { is_fixed: false, residual: q(5, 3) });
        let h = Space::half_line();
        assert!(verify_fixed_point(&h, &SelfMap::identity(), &pt(&h, 7, 3)).unwrap().is_fixed);
        assert!(verify_fixed_point(&h, &SelfMap::identity(), &Point::Value(q(-1, 1))).is_err());
    }

    #[test]
    fn uniqueness_examples() {
        let split = Space::split_set();
        let mut cands = split.sample(47, 9);
        cands.extend([pt(&split, 2, 1), pt(&split, -1, 1), pt(&split, 0, 1)]);
        let u = uniqueness_probe(&split, &SelfMap::piecewise_drop(), &cands).unwrap();
        assert_eq!(u.fixed_points, vec![pt(&split, 0, 1)]);
        assert!(u.strict_kannan_on_candidates);

        let g = Space::gornicki_nat();
        let nat: Vec<_> = (1..=100).map(|n| pt(&g, n, 1)).collect();
        let u = uniqueness_probe(&g, &SelfMap::triple_nat(), &nat).unwrap();
        assert!(u.fixed_points.is_empty());
        assert!(u.strict_kannan_on_candidates);

        let f = Space::finite(&["a", "b"], vec![vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(0, 1)]]).unwrap();
        let u = uniqueness_probe(&f, &SelfMap::identity(), &f.points().unwrap()).unwrap();
        assert_eq!(u.fixed_points.len(), 2);
        assert!(!u.strict_kannan_on_candidates);
    }
}
