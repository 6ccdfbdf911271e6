//! Fixed-point-free strict Kannan maps on incomplete and on noncompact spaces.
//!
//! From a Cauchy sequence with no limit in the space, [`construct_counterexample_map`]
//! builds the map that sends every point far enough down the sequence that
//! the strict Kannan inequality holds while no point is fixed. The only
//! shipped witness is x_n = 1/n in {1/n : n >= 1}, where every quantity is a
//! closed-form rational.
//!
//! [`verify_gornicki_answer`] checks the complementary example: x -> 3x on the
//! positive integers with d(x, y) = 1 + |1/x - 1/y|, a complete noncompact
//! space carrying a continuous fixed-point-free strict Kannan map.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::condition::{evaluate_condition_with, ConditionKind, ConditionReport, Parallelism, PairSource};
use crate::error::{Error, Result};
use crate::map::SelfMap;
use crate::scalar::Scalar;
use crate::space::{Point, Space};

type TermFn = Arc<dyn Fn(u64) -> Point + Send + Sync>;
type IndexOfFn = Arc<dyn Fn(&Point) -> Option<u64> + Send + Sync>;
type BoundFn = Arc<dyn Fn(u64) -> Scalar + Send + Sync>;
type OutsideFn = Arc<dyn Fn(&Point) -> Scalar + Send + Sync>;

/// Largest sequence index a construction may select.
pub const MAX_INDEX: u64 = 1 << 60;

/// A Cauchy sequence of distinct points with no limit in its space, plus
/// certified bounds the construction relies on.
#[derive(Clone)]
pub struct IncompleteWitness {
    name: String,
    space: Space,
    term: TermFn,
    index_of: IndexOfFn,
    /// n -> lower bound on inf_{k != n} d(x_k, x_n), positive.
    gap_lower_bound: BoundFn,
    /// N -> upper bound on sup_{m, m' >= N} d(x_m, x_m'), nonincreasing to 0.
    tail_bound: BoundFn,
    /// Certified positive lower bound on d(x, A) for x outside the sequence.
    outside_bound: Option<OutsideFn>,
}

impl fmt::Debug for IncompleteWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IncompleteWitness")
            .field("name", &self.name)
            .field("space", &self.space.name())
            .finish()
    }
}

impl IncompleteWitness {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    /// x_n for n >= 1.
    pub fn term(&self, n: u64) -> Point {
        (self.term)(n)
    }

    pub fn index_of(&self, p: &Point) -> Option<u64> {
        (self.index_of)(p)
    }

    pub fn gap_lower_bound(&self, n: u64) -> Scalar {
        (self.gap_lower_bound)(n)
    }

    pub fn tail_bound(&self, n: u64) -> Scalar {
        (self.tail_bound)(n)
    }

    /// Spot-checks the witness invariants on x_1 .. x_prefix: distinct
    /// members, gap bounds positive and below every observed gap, tail bounds
    /// nonincreasing and above every observed tail distance.
    pub fn check_prefix(&self, prefix: u64) -> Result<()> {
        let pts: Vec<Point> = (1..=prefix).map(|n| self.term(n)).collect();
        for (i, p) in pts.iter().enumerate() {
            let n = i as u64 + 1;
            self.space.check(p)?;
            if self.index_of(p) != Some(n) {
                return Err(Error::Construction(format!("term {n} does not index back to itself")));
            }
            let gap = self.gap_lower_bound(n);
            if !gap.is_positive() {
                return Err(Error::Construction(format!("gap bound at {n} is not positive")));
            }
            let tail = self.tail_bound(n);
            if n > 1 && tail > self.tail_bound(n - 1) {
                return Err(Error::Construction(format!("tail bound increases at {n}")));
            }
            for (j, r) in pts.iter().enumerate() {
                if i == j {
                    continue;
                }
                let d = self.space.dist(p, r)?;
                if d.is_zero() {
                    return Err(Error::Construction(format!("terms {} and {} coincide", n, j + 1)));
                }
                if d < gap {
                    return Err(Error::Construction(format!("gap bound at {n} exceeds d(x_{n}, x_{})", j + 1)));
                }
                if j > i && d > tail {
                    return Err(Error::Construction(format!("tail bound at {n} below d(x_{n}, x_{})", j + 1)));
                }
            }
        }
        Ok(())
    }
}

/// x_n = 1/n in {1/n}, the set itself being the sequence's range.
pub fn build_reciprocal_witness() -> IncompleteWitness {
    IncompleteWitness {
        name: "reciprocal".into(),
        space: Space::reciprocal_set(),
        term: Arc::new(|n| Point::Value(Scalar::recip_int(n as i64))),
        index_of: Arc::new(|p| {
            let v = p.value()?;
            let (num, den) = v.as_small()?;
            (num == 1 && den > 0).then_some(den as u64)
        }),
        // nearest neighbour of 1/n is 1/(n+1)
        gap_lower_bound: Arc::new(|n| Scalar::recip_int(n as i64) * Scalar::recip_int(n as i64 + 1)),
        tail_bound: Arc::new(|n| Scalar::recip_int(n as i64)),
        outside_bound: None,
    }
}

/// Which branch of the construction handled a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// x = x_{source}; target index n_0' > source.
    OnSequence,
    /// x outside the sequence; target index n_x.
    OffSequence,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstructionEntry {
    pub branch: Branch,
    pub source_index: Option<u64>,
    pub target_index: u64,
}

/// The fixed-point-free map built from an [`IncompleteWitness`].
#[derive(Clone, Debug)]
pub struct ConstructedMap {
    witness: IncompleteWitness,
}

impl ConstructedMap {
    pub fn witness(&self) -> &IncompleteWitness {
        &self.witness
    }

    /// Smallest index above `after` whose tail bound is below `threshold`.
    /// Relies on the tail bound being nonincreasing.
    fn minimal_index(&self, after: u64, threshold: &Scalar) -> Result<u64> {
        let ok = |n: u64| self.witness.tail_bound(n) < *threshold;
        let mut step = 1u64;
        while !ok(after + step) {
            step = step.checked_mul(2).filter(|s| after + s <= MAX_INDEX).ok_or_else(|| {
                Error::Construction(format!("no index below {MAX_INDEX} meets tail bound {threshold}"))
            })?;
        }
        // answer lies in (after + step/2, after + step]
        let (mut lo, mut hi) = (after + step / 2, after + step);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Branch and target index for a point of the witness space.
    pub fn choose(&self, x: &Point) -> Result<ConstructionEntry> {
        let w = &self.witness;
        w.space.check(x)?;
        if let Some(n0) = w.index_of(x) {
            let threshold = w.gap_lower_bound(n0).half();
            let target = self.minimal_index(n0, &threshold)?;
            return Ok(ConstructionEntry { branch: Branch::OnSequence, source_index: Some(n0), target_index: target });
        }
        let bound = w
            .outside_bound
            .as_ref()
            .ok_or_else(|| Error::Construction(format!("witness {} has no bound for {x}", w.name)))?;
        let lb = bound(x);
        if !lb.is_positive() {
            return Err(Error::Construction(format!("distance bound for {x} is not positive")));
        }
        let target = self.minimal_index(0, &lb.half())?;
        Ok(ConstructionEntry { branch: Branch::OffSequence, source_index: None, target_index: target })
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        let e = self.choose(x)?;
        Ok(self.witness.term(e.target_index))
    }

    /// The construction as a [`SelfMap`] on the witness space.
    pub fn as_self_map(&self) -> SelfMap {
        let me = self.clone();
        SelfMap::custom(format!("counterexample({})", self.witness.name), move |p| me.apply(p))
    }
}

pub fn construct_counterexample_map(w: &IncompleteWitness) -> Result<ConstructedMap> {
    w.check_prefix(64)?;
    Ok(ConstructedMap { witness: w.clone() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub witness: String,
    pub prefix: u64,
    #[serde(flatten)]
    pub report: ConditionReport,
    pub construction: Vec<ConstructionEntry>,
    pub fixed_points: Vec<Point>,
}

impl CounterexampleReport {
    pub fn as_expected(&self) -> bool {
        self.report.holds() && self.fixed_points.is_empty()
    }
}

/// Strict Kannan over every distinct pair of x_1 .. x_prefix, plus a fixed
/// point scan of the same terms.
pub fn verify_counterexample(cm: &ConstructedMap, prefix: u64) -> Result<CounterexampleReport> {
    verify_counterexample_with(cm, prefix, Parallelism::Serial)
}

pub fn verify_counterexample_with(
    cm: &ConstructedMap,
    prefix: u64,
    parallelism: Parallelism,
) -> Result<CounterexampleReport> {
    if prefix == 0 {
        return Err(Error::InvalidParameter("prefix must be at least 1".into()));
    }
    let w = &cm.witness;
    let points: Vec<Point> = (1..=prefix).map(|n| w.term(n)).collect();
    let construction = points.iter().map(|p| cm.choose(p)).collect::<Result<Vec<_>>>()?;
    let fixed_points = points
        .iter()
        .zip(&construction)
        .filter(|(p, e)| e.source_index == Some(e.target_index) || w.term(e.target_index) == **p)
        .map(|(p, _)| p.clone())
        .collect();
    let report = evaluate_condition_with(
        &ConditionKind::StrictKannan,
        &w.space,
        &cm.as_self_map(),
        &PairSource::Sample { points, seed: None },
        parallelism,
    )?;
    Ok(CounterexampleReport { witness: w.name.clone(), prefix, report, construction, fixed_points })
}

/// Indices n <= limit whose term the map fixes.
pub fn fixed_point_scan(cm: &ConstructedMap, limit: u64) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for n in 1..=limit {
        let x = cm.witness.term(n);
        let e = cm.choose(&x)?;
        if e.target_index == n || cm.witness.term(e.target_index) == x {
            out.push(n);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GornickiFailure {
    pub x: u64,
    pub y: u64,
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GornickiReport {
    pub n: u64,
    pub pairs_checked: u64,
    /// d(Tx,Ty) = 1 + 1/(3x) - 1/(3y) and half the displacement sum equals
    /// 1 + 1/(3x) + 1/(3y) on every pair.
    pub closed_forms_match: bool,
    pub strict_kannan_holds: bool,
    /// Every pair of distinct points sits at distance in (1, 2].
    pub distances_in_unit_band: bool,
    pub fixed_points: Vec<u64>,
    pub first_failure: Option<GornickiFailure>,
}

impl GornickiReport {
    pub fn as_expected(&self) -> bool {
        self.closed_forms_match
            && self.strict_kannan_holds
            && self.distances_in_unit_band
            && self.fixed_points.is_empty()
    }
}

/// Exhaustive exact check of x -> 3x on {1..=n} with the 1 + |1/x - 1/y| metric.
pub fn verify_gornicki_answer(n: u64) -> Result<GornickiReport> {
    verify_gornicki_answer_with(n, Parallelism::Parallel)
}

pub fn verify_gornicki_answer_with(n: u64, parallelism: Parallelism) -> Result<GornickiReport> {
    if n < 2 {
        return Err(Error::InvalidParameter("need N >= 2".into()));
    }
    if n > (i64::MAX / 3) as u64 {
        return Err(Error::SizeBound(format!("N = {n} too large")));
    }
    let space = Space::gornicki_nat();
    let map = SelfMap::triple_nat();
    let one = Scalar::one();
    let two = Scalar::from_int(2);

    // index 0 unused
    let mut pts = vec![Point::Value(Scalar::zero())];
    let mut images = vec![Point::Value(Scalar::zero())];
    let mut displacement = vec![Scalar::zero()];
    let mut third_recip = vec![Scalar::zero()];
    let mut fixed_points = Vec::new();
    for x in 1..=n {
        let p = space.point(Scalar::from_int(x as i64))?;
        let tp = map.apply(&space, &p)?;
        let d = space.dist_unchecked(&p, &tp);
        if d.is_zero() {
            fixed_points.push(x);
        }
        pts.push(p);
        images.push(tp);
        displacement.push(d);
        third_recip.push(Scalar::recip_int(3 * x as i64));
    }

    let row = |x: u64| -> (u64, Option<GornickiFailure>) {
        let xi = x as usize;
        let mut first = None;
        for y in (x + 1)..=n {
            let yi = y as usize;
            let lhs = space.dist_unchecked(&images[xi], &images[yi]);
            let rhs = (&displacement[xi] + &displacement[yi]).half();
            let fail = |reason: &str| GornickiFailure { x, y, lhs: lhs.clone(), rhs: rhs.clone(), reason: reason.into() };
            if lhs != &(&one + &third_recip[xi]) - &third_recip[yi] {
                first = Some(fail("lhs closed form"));
            } else if rhs != &(&one + &third_recip[xi]) + &third_recip[yi] {
                first = Some(fail("rhs closed form"));
            } else if lhs >= rhs {
                first = Some(fail("strict inequality"));
            } else {
                let d = space.dist_unchecked(&pts[xi], &pts[yi]);
                if d <= one || d > two {
                    first = Some(fail("distance outside (1, 2]"));
                }
            }
            if first.is_some() {
                return (y - x, first);
            }
        }
        (n - x, None)
    };

    let rows: Vec<(u64, Option<GornickiFailure>)> = match parallelism {
        Parallelism::Serial => (1..n).map(row).collect(),
        Parallelism::Parallel => (1..n).into_par_iter().map(row).collect(),
    };
    let mut pairs_checked = 0;
    let mut first_failure = None;
    for (count, failure) in rows {
        pairs_checked += count;
        if failure.is_some() {
            first_failure = failure;
            break;
        }
    }
    let reason = first_failure.as_ref().map(|f| f.reason.as_str());
    Ok(GornickiReport {
        n,
        pairs_checked,
        closed_forms_match: !matches!(reason, Some("lhs closed form") | Some("rhs closed form")),
        strict_kannan_holds: !matches!(reason, Some("strict inequality")),
        distances_in_unit_band: !matches!(reason, Some(r) if r.starts_with("distance")),
        fixed_points,
        first_failure,
    })
}
