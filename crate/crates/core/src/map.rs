//! Self-maps, the map catalog, and orbit generation.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{Point, Space};

/// A rule supplied by the host program. It receives a member of the domain
/// space; its image is membership-checked by [`SelfMap::apply`].
pub type CustomRule = Arc<dyn Fn(&Point) -> Result<Point> + Send + Sync>;

#[derive(Clone)]
pub enum MapKind {
    /// `targets[i]` is the index of the image of point `i`.
    Table(Vec<usize>),
    /// x -> c x
    Scale(Scalar),
    /// x -> x / (n + 1) where n - 1 <= x < n.
    StairScale,
    /// x -> -1 if x = 2, otherwise 0.
    PiecewiseDrop,
    /// x -> 3x
    TripleNat,
    Custom { name: String, rule: CustomRule },
}

impl fmt::Debug for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapKind::Table(t) => f.debug_tuple("Table").field(t).finish(),
            MapKind::Scale(c) => f.debug_tuple("Scale").field(c).finish(),
            MapKind::StairScale => f.write_str("StairScale"),
            MapKind::PiecewiseDrop => f.write_str("PiecewiseDrop"),
            MapKind::TripleNat => f.write_str("TripleNat"),
            MapKind::Custom { name, .. } => f.debug_struct("Custom").field("name", name).finish(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SelfMap {
    kind: MapKind,
}

/// JSON map definition. Table maps are resolved against a finite space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    Table { assign: BTreeMap<String, String> },
    Scale { c: Scalar },
    StairScale,
    PiecewiseDrop,
    TripleNat,
}

impl SelfMap {
    /// A lookup-table map on a finite space; closure is checked exhaustively.
    pub fn table(space: &Space, targets: Vec<usize>) -> Result<SelfMap> {
        let n = space.size().ok_or_else(|| Error::Domain {
            map: "table".into(),
            space: space.name(),
        })?;
        if targets.len() != n {
            return Err(Error::InvalidParameter(format!(
                "table has {} entries for a space of {} points",
                targets.len(),
                n
            )));
        }
        if let Some((i, &t)) = targets.iter().enumerate().find(|(_, &t)| t >= n) {
            return Err(Error::Closure {
                map: "table".into(),
                point: space.point_at(i)?.to_string(),
                image: format!("#{t}"),
                space: space.name(),
            });
        }
        Ok(SelfMap { kind: MapKind::Table(targets) })
    }

    pub fn scale(c: Scalar) -> SelfMap {
        SelfMap { kind: MapKind::Scale(c) }
    }

    pub fn stair_scale() -> SelfMap {
        SelfMap { kind: MapKind::StairScale }
    }

    pub fn piecewise_drop() -> SelfMap {
        SelfMap { kind: MapKind::PiecewiseDrop }
    }

    pub fn triple_nat() -> SelfMap {
        SelfMap { kind: MapKind::TripleNat }
    }

    pub fn custom(
        name: impl Into<String>,
        rule: impl Fn(&Point) -> Result<Point> + Send + Sync + 'static,
    ) -> SelfMap {
        SelfMap { kind: MapKind::Custom { name: name.into(), rule: Arc::new(rule) } }
    }

    /// Identity on any space.
    pub fn identity() -> SelfMap {
        SelfMap::custom("identity", |p| Ok(p.clone()))
    }

    /// Constant map onto `target`.
    pub fn constant(target: Point) -> SelfMap {
        SelfMap::custom(format!("constant({target})"), move |_| Ok(target.clone()))
    }

    pub fn from_spec(spec: &MapSpec, space: &Space) -> Result<SelfMap> {
        Ok(match spec {
            MapSpec::Table { assign } => {
                let points = space
                    .points()
                    .ok_or_else(|| Error::Domain { map: "table".into(), space: space.name() })?;
                let mut targets = Vec::with_capacity(points.len());
                for p in &points {
                    let label = p.to_string();
                    let image = assign.get(&label).ok_or_else(|| {
                        Error::InvalidParameter(format!("table has no image for {label:?}"))
                    })?;
                    let image = space.parse_point(image).map_err(|_| Error::Closure {
                        map: "table".into(),
                        point: label.clone(),
                        image: image.clone(),
                        space: space.name(),
                    })?;
                    targets.push(image.index().expect("finite point"));
                }
                if let Some(extra) = assign.keys().find(|k| space.parse_point(k).is_err()) {
                    return Err(Error::Membership { point: extra.clone(), space: space.name() });
                }
                SelfMap::table(space, targets)?
            }
            MapSpec::Scale { c } => SelfMap::scale(c.clone()),
            MapSpec::StairScale => SelfMap::stair_scale(),
            MapSpec::PiecewiseDrop => SelfMap::piecewise_drop(),
            MapSpec::TripleNat => SelfMap::triple_nat(),
        })
    }

    pub fn from_json(text: &str, space: &Space) -> Result<SelfMap> {
        let spec: MapSpec =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("map: {e}")))?;
        SelfMap::from_spec(&spec, space)
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn name(&self) -> String {
        match &self.kind {
            MapKind::Table(t) => {
                format!("table({})", t.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","))
            }
            MapKind::Scale(c) => format!("scale({c})"),
            MapKind::StairScale => "stair_scale".into(),
            MapKind::PiecewiseDrop => "piecewise_drop".into(),
            MapKind::TripleNat => "triple_nat".into(),
            MapKind::Custom { name, .. } => name.clone(),
        }
    }

    /// The exact, membership-checked image of `p`.
    pub fn apply(&self, space: &Space, p: &Point) -> Result<Point> {
        space.check(p)?;
        let image = match (&self.kind, p) {
            (MapKind::Table(t), Point::Finite { index, .. }) => {
                if Some(t.len()) != space.size() {
                    return Err(Error::Domain { map: self.name(), space: space.name() });
                }
                return space.point_at(t[*index]);
            }
            (MapKind::Table(_), _) => {
                return Err(Error::Domain { map: self.name(), space: space.name() })
            }
            (MapKind::Custom { rule, .. }, _) => rule(p)?,
            (_, Point::Finite { .. }) => {
                return Err(Error::Domain { map: self.name(), space: space.name() })
            }
            (MapKind::Scale(c), Point::Value(x)) => Point::Value(c * x),
            (MapKind::StairScale, Point::Value(x)) => Point::Value(stair_scale(x)?),
            (MapKind::PiecewiseDrop, Point::Value(x)) => {
                if *x == Scalar::from_int(2) {
                    Point::Value(Scalar::from_int(-1))
                } else {
                    Point::Value(Scalar::zero())
                }
            }
            (MapKind::TripleNat, Point::Value(x)) => Point::Value(Scalar::from_int(3) * x),
        };
        if !space.contains(&image) {
            return Err(Error::Closure {
                map: self.name(),
                point: p.to_string(),
                image: image.to_string(),
                space: space.name(),
            });
        }
        Ok(image)
    }

    /// `T^k p`.
    pub fn apply_n(&self, space: &Space, p: &Point, k: usize) -> Result<Point> {
        let mut cur = p.clone();
        for _ in 0..k {
            cur = self.apply(space, &cur)?;
        }
        Ok(cur)
    }
}

/// x / (n + 1) for the unique positive integer n with n - 1 <= x < n.
fn stair_scale(x: &Scalar) -> Result<Scalar> {
    if x.is_negative() {
        return Err(Error::InvalidParameter(format!("stair_scale is undefined at {x}")));
    }
    // n - 1 = floor(x), so n + 1 = floor(x) + 2
    let divisor = x.floor() + BigInt::from(2);
    let divisor = Scalar::from(num_rational::BigRational::from_integer(divisor));
    Ok(x / &divisor)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OrbitStatus {
    FixedPointReached { at: usize },
    CycleDetected { entry: usize, period: usize },
    Truncated { horizon: usize },
}

/// A finite prefix of the orbit x_0, T x_0, T^2 x_0, ...
///
/// `gaps[i]` is d(x_i, x_{i+1}). Generation stops at the first exact
/// recurrence: a zero gap (fixed point, the repeated point is kept) or a return
/// to an earlier point (cycle, the returning point is kept).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Orbit {
    pub start: Point,
    pub points: Vec<Point>,
    pub gaps: Vec<Scalar>,
    pub status: OrbitStatus,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> &Point {
        self.points.last().expect("orbit has a start point")
    }
}

/// Iterates `map` from `x0` for at most `horizon` steps.
pub fn orbit(space: &Space, map: &SelfMap, x0: &Point, horizon: usize) -> Result<Orbit> {
    if horizon == 0 {
        return Err(Error::InvalidParameter("orbit horizon must be at least 1".into()));
    }
    space.check(x0)?;
    let mut points = vec![x0.clone()];
    let mut gaps = Vec::new();
    let mut seen: HashMap<Point, usize> = HashMap::new();
    seen.insert(x0.clone(), 0);
    let mut status = OrbitStatus::Truncated { horizon };
    for i in 0..horizon {
        let next = map.apply(space, &points[i])?;
        let gap = space.dist_unchecked(&points[i], &next);
        gaps.push(gap);
        let recurrence = seen.get(&next).copied();
        points.push(next.clone());
        if gaps[i].is_zero() {
            status = OrbitStatus::FixedPointReached { at: i };
            break;
        }
        if let Some(entry) = recurrence {
            status = OrbitStatus::CycleDetected { entry, period: i + 1 - entry };
            break;
        }
        seen.insert(next, i + 1);
    }
    Ok(Orbit { start: x0.clone(), points, gaps, status })
}

/// `steps + 1` raw iterates x_0 .. x_steps, without early stopping.
pub fn iterates(space: &Space, map: &SelfMap, x0: &Point, steps: usize) -> Result<Vec<Point>> {
    space.check(x0)?;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(x0.clone());
    for i in 0..steps {
        let next = map.apply(space, &out[i])?;
        out.push(next);
    }
    Ok(out)
}

/// Finite-horizon evidence about orbital compactness. Never a proof.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterProbe {
    pub evidence_only: bool,
    /// The orbit hit an exact fixed point or cycle, so the whole infinite
    /// orbit is a finite set.
    pub eventually_periodic: bool,
    pub cluster_found: bool,
    pub center_index: Option<usize>,
    pub neighbours: usize,
    pub required: usize,
    pub radius: Scalar,
    pub diameter: Scalar,
    /// Every gap is positive and at least the previous one.
    pub gaps_nondecreasing: bool,
}

/// Looks for an orbit point with at least ceil(len / 2) other orbit points
/// within `radius`, and reports the orbit's diameter.
pub fn orbit_cluster_probe(space: &Space, orbit: &Orbit, radius: &Scalar) -> ClusterProbe {
    let pts = &orbit.points;
    let n = pts.len();
    let required = n.div_ceil(2);
    let mut diameter = Scalar::zero();
    let mut best: Option<(usize, usize)> = None;
    for i in 0..n {
        let mut within = 0;
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = space.dist_unchecked(&pts[i], &pts[j]);
            if d <= *radius {
                within += 1;
            }
            if j > i && d > diameter {
                diameter = d;
            }
        }
        if best.is_none_or(|(_, w)| within > w) {
            best = Some((i, within));
        }
    }
    let eventually_periodic = !matches!(orbit.status, OrbitStatus::Truncated { .. });
    let (center, neighbours) = best.unwrap_or((0, 0));
    let dense = n >= 2 && neighbours >= required;
    let gaps_nondecreasing = !orbit.gaps.is_empty()
        && orbit.gaps.iter().all(Scalar::is_positive)
        && orbit.gaps.windows(2).all(|w| w[1] >= w[0]);
    ClusterProbe {
        evidence_only: true,
        eventually_periodic,
        cluster_found: eventually_periodic || dense,
        center_index: (dense || eventually_periodic).then_some(center),
        neighbours,
        required,
        radius: radius.clone(),
        diameter,
        gaps_nondecreasing,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn pt(s: &Space, n: i64, d: i64) -> Point {
        s.point(q(n, d)).unwrap()
    }

    #[test]
    fn stair_scale_examples() {
        let s = Space::half_line();
        let m = SelfMap::stair_scale();
        assert_eq!(m.apply(&s, &pt(&s, 3, 2)).unwrap(), pt(&s, 1, 2));
        assert_eq!(m.apply(&s, &pt(&s, 0, 1)).unwrap(), pt(&s, 0, 1));
        // n = 2 exactly at x = 1
        assert_eq!(m.apply(&s, &pt(&s, 1, 1)).unwrap(), pt(&s, 1, 3));
        assert_eq!(m.apply(&s, &pt(&s, 1, 2)).unwrap(), pt(&s, 1, 4));
    }

    #[test]
    fn catalog_images() {
        let split = Space::split_set();
        let drop = SelfMap::piecewise_drop();
        assert_eq!(drop.apply(&split, &pt(&split, 2, 1)).unwrap(), pt(&split, -1, 1));
        assert_eq!(drop.apply(&split, &pt(&split, 3, 2)).unwrap(), pt(&split, 0, 1));
        let g = Space::gornicki_nat();
        assert_eq!(SelfMap::triple_nat().apply(&g, &pt(&g, 1, 1)).unwrap(), pt(&g, 3, 1));
    }

    #[test]
    fn closure_and_membership_errors() {
        let s = Space::unit_interval_right();
        let doubling = SelfMap::scale(q(2, 1));
        assert!(matches!(doubling.apply(&s, &pt(&s, 3, 4)), Err(Error::Closure { .. })));
        assert!(matches!(
            doubling.apply(&s, &Point::Value(q(3, 2))),
            Err(Error::Membership { .. })
        ));
        let f = Space::finite(&["a"], vec![vec![q(0, 1)]]).unwrap();
        assert!(matches!(doubling.apply(&f, &f.point_at(0).unwrap()), Err(Error::Domain { .. })));
        assert!(SelfMap::table(&f, vec![1]).is_err());
        assert!(SelfMap::table(&s, vec![0]).is_err());
    }

    #[test]
    fn piecewise_drop_orbit() {
        let s = Space::split_set();
        let o = orbit(&s, &SelfMap::piecewise_drop(), &pt(&s, 2, 1), 10).unwrap();
        assert_eq!(o.points, vec![pt(&s, 2, 1), pt(&s, -1, 1), pt(&s, 0, 1), pt(&s, 0, 1)]);
        assert_eq!(o.gaps, vec![q(3, 1), q(1, 1), q(0, 1)]);
        assert_eq!(o.status, OrbitStatus::FixedPointReached { at: 2 });
    }

    #[test]
    fn doubling_orbit_truncates() {
        let s = Space::half_line();
        let o = orbit(&s, &SelfMap::scale(q(2, 1)), &pt(&s, 1, 1), 10).unwrap();
        let expected: Vec<_> = (0..=10).map(|k| pt(&s, 1 << k, 1)).collect();
        assert_eq!(o.points, expected);
        assert_eq!(o.status, OrbitStatus::Truncated { horizon: 10 });
    }

    #[test]
    fn orbit_from_fixed_point() {
        let s = Space::split_set();
        let zero = pt(&s, 0, 1);
        let o = orbit(&s, &SelfMap::piecewise_drop(), &zero, 5).unwrap();
        assert_eq!(o.points, vec![zero.clone(), zero]);
        assert_eq!(o.status, OrbitStatus::FixedPointReached { at: 0 });
        assert!(orbit(&s, &SelfMap::piecewise_drop(), &pt(&s, 0, 1), 0).is_err());
    }

    #[test]
    fn cycle_detection() {
        let f = Space::finite(&["a", "b", "c"], vec![
            vec![q(0, 1), q(1, 1), q(1, 1)],
            vec![q(1, 1), q(0, 1), q(1, 1)],
            vec![q(1, 1), q(1, 1), q(0, 1)],
        ])
        .unwrap();
        let m = SelfMap::table(&f, vec![1, 2, 1]).unwrap();
        let o = orbit(&f, &m, &f.point_at(0).unwrap(), 10).unwrap();
        assert_eq!(o.status, OrbitStatus::CycleDetected { entry: 1, period: 2 });
        assert_eq!(o.points.len(), 4);
    }

    #[test]
    fn table_orbits_terminate_within_size() {
        let n: usize = 4;
        let d: Vec<Vec<Scalar>> =
            (0..n).map(|i| (0..n).map(|j| q((i != j) as i64, 1)).collect()).collect();
        let labels: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let f = Space::finite(&labels, d).unwrap();
        for code in 0..n.pow(n as u32) {
            let targets: Vec<usize> = (0..n).map(|i| code / n.pow(i as u32) % n).collect();
            let m = SelfMap::table(&f, targets).unwrap();
            for p in f.points().unwrap() {
                let o = orbit(&f, &m, &p, n).unwrap();
                assert!(!matches!(o.status, OrbitStatus::Truncated { .. }));
            }
        }
    }

    #[test]
    fn orbit_deterministic() {
        let s = Space::half_line();
        let a = orbit(&s, &SelfMap::stair_scale(), &pt(&s, 7, 3), 30).unwrap();
        let b = orbit(&s, &SelfMap::stair_scale(), &pt(&s, 7, 3), 30).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cluster_probe_examples() {
        let s = Space::half_line();
        let stair = orbit(&s, &SelfMap::stair_scale(), &pt(&s, 3, 2), 20).unwrap();
        let p = orbit_cluster_probe(&s, &stair, &q(1, 10));
        assert!(p.cluster_found && !p.eventually_periodic && p.evidence_only);
        let c = p.center_index.unwrap();
        assert!(stair.points[c].value().unwrap() < &q(1, 10));

        let dbl = orbit(&s, &SelfMap::scale(q(2, 1)), &pt(&s, 1, 1), 10).unwrap();
        let p = orbit_cluster_probe(&s, &dbl, &q(9, 10));
        assert!(!p.cluster_found);
        assert!(p.gaps_nondecreasing);
        assert_eq!(p.diameter, q(1023, 1));

        let konst = SelfMap::constant(pt(&s, 5, 1));
        let o = orbit(&s, &konst, &pt(&s, 1, 1), 10).unwrap();
        let p = orbit_cluster_probe(&s, &o, &q(1, 100));
        assert!(p.cluster_found && p.eventually_periodic);
    }

    #[test]
    fn map_json() {
        let f = Space::from_json(r#"{"kind":"finite","labels":["a","b"],"d":[["0","1"],["1","0"]]}"#)
            .unwrap();
        let m = SelfMap::from_json(r#"{"kind":"table","assign":{"a":"b","b":"b"}}"#, &f).unwrap();
        let b = f.parse_point("b").unwrap();
        assert_eq!(m.apply(&f, &f.parse_point("a").unwrap()).unwrap(), b);
        assert!(SelfMap::from_json(r#"{"kind":"table","assign":{"a":"z","b":"b"}}"#, &f).is_err());
        assert!(SelfMap::from_json(r#"{"kind":"table","assign":{"a":"a"}}"#, &f).is_err());
        let h = Space::half_line();
        let half = SelfMap::from_json(r#"{"kind":"scale","c":"1/2"}"#, &h).unwrap();
        assert_eq!(half.apply(&h, &pt(&h, 1, 1)).unwrap(), pt(&h, 1, 2));
        assert!(SelfMap::from_json(r#"{"kind":"table","assign":{}}"#, &h).is_err());
    }
}
