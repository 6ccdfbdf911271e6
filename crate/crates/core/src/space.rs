//! Metric spaces: explicit finite spaces and the closed-form catalog spaces.
//!
//! Catalog spaces over subsets of the reals are only ever evaluated at
//! rational points, so distances stay exact. Compactness-type flags are
//! recorded facts about each space, not something computed from distances.

use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{q, Scalar};

/// An element of some [`Space`].
///
/// Membership is checked by the owning space whenever a point is built from
/// raw data or handed to [`Space::dist`].
#[derive(Clone, Debug)]
pub enum Point {
    /// A rational point of a catalog space.
    Value(Scalar),
    /// A point of a finite space; identity is the index, the label is for
    /// display only.
    Finite { index: usize, label: Arc<str> },
}

impl Point {
    pub fn value(&self) -> Option<&Scalar> {
        match self {
            Point::Value(v) => Some(v),
            Point::Finite { .. } => None,
        }
    }

    pub fn index(&self) -> Option<usize> {
        match self {
            Point::Value(_) => None,
            Point::Finite { index, .. } => Some(*index),
        }
    }
}

impl PartialEq for Point {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Point::Value(a), Point::Value(b)) => a == b,
            (Point::Finite { index: a, .. }, Point::Finite { index: b, .. }) => a == b,
            _ => false,
        }
    }
}

impl Eq for Point {}

impl Hash for Point {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Point::Value(v) => {
                0u8.hash(state);
                v.hash(state);
            }
            Point::Finite { index, .. } => {
                1u8.hash(state);
                index.hash(state);
            }
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Value(v) => write!(f, "{v}"),
            Point::Finite { label, .. } => f.write_str(label),
        }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Facts about a space that cannot be decided from its distance function.
/// `None` means unknown.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SpaceFlags {
    pub complete: Option<bool>,
    pub boundedly_compact: Option<bool>,
    pub compact: Option<bool>,
    /// Closed subset of some R^n under the usual metric; every strict Kannan
    /// self-map of such a space has a unique fixed point.
    pub closed_in_euclidean: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct FiniteSpace {
    labels: Vec<Arc<str>>,
    d: Vec<Vec<Scalar>>,
}

impl FiniteSpace {
    pub fn labels(&self) -> &[Arc<str>] {
        &self.labels
    }

    pub fn matrix(&self) -> &[Vec<Scalar>] {
        &self.d
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Clone, Debug)]
pub enum SpaceKind {
    Finite(FiniteSpace),
    /// Positive integers with d(x, y) = 1 + |1/x - 1/y| for x != y.
    GornickiNat,
    /// [0, inf) with the usual metric.
    HalfLineUsual,
    /// [0, 1) with the usual metric.
    UnitIntervalRight,
    /// (1, 2] together with {-1, 0}, usual metric.
    SplitSet,
    /// {1/n : n >= 1}, usual metric.
    ReciprocalSet,
}

#[derive(Clone, Debug)]
pub struct Space {
    kind: SpaceKind,
    flags: SpaceFlags,
}

/// The first failure found while checking a distance matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum AxiomViolation {
    Shape { detail: String },
    Identity { a: String },
    Symmetry { a: String, b: String },
    Positivity { a: String, b: String },
    Triangle { a: String, b: String, c: String },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::Shape { detail } => write!(f, "malformed matrix: {detail}"),
            AxiomViolation::Identity { a } => write!(f, "d({a}, {a}) != 0"),
            AxiomViolation::Symmetry { a, b } => write!(f, "d({a}, {b}) != d({b}, {a})"),
            AxiomViolation::Positivity { a, b } => write!(f, "d({a}, {b}) <= 0"),
            AxiomViolation::Triangle { a, b, c } => {
                write!(f, "d({a}, {c}) > d({a}, {b}) + d({b}, {c})")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub symmetry: bool,
    pub identity: bool,
    pub positivity: bool,
    pub triangle: bool,
    pub first_violation: Option<AxiomViolation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Checks identity, symmetry, positivity and the triangle inequality on a raw
/// labelled matrix, reporting the first violation in that order.
pub fn verify_metric_axioms<L: AsRef<str>>(labels: &[L], d: &[Vec<Scalar>]) -> AxiomReport {
    let n = labels.len();
    let name = |i: usize| labels[i].as_ref().to_string();
    let mut report = AxiomReport {
        symmetry: true,
        identity: true,
        positivity: true,
        triangle: true,
        first_violation: None,
    };
    let shape_error = if d.len() != n {
        Some(format!("{} rows for {} labels", d.len(), n))
    } else if let Some(i) = d.iter().position(|row| row.len() != n) {
        Some(format!("row {} has {} entries, expected {}", i, d[i].len(), n))
    } else {
        let mut seen = HashSet::new();
        labels
            .iter()
            .map(AsRef::as_ref)
            .find(|l| !seen.insert(*l))
            .map(|l| format!("duplicate label {l:?}"))
    };
    if let Some(detail) = shape_error {
        report.symmetry = false;
        report.identity = false;
        report.positivity = false;
        report.triangle = false;
        report.first_violation = Some(AxiomViolation::Shape { detail });
        return report;
    }

    let mut violations = Vec::new();
    for i in 0..n {
        if !d[i][i].is_zero() {
            report.identity = false;
            violations.push((0, AxiomViolation::Identity { a: name(i) }));
            break;
        }
    }
    'sym: for i in 0..n {
        for j in (i + 1)..n {
            if d[i][j] != d[j][i] {
                report.symmetry = false;
                violations.push((1, AxiomViolation::Symmetry { a: name(i), b: name(j) }));
                break 'sym;
            }
        }
    }
    'pos: for i in 0..n {
        for j in 0..n {
            if i != j && !d[i][j].is_positive() {
                report.positivity = false;
                violations.push((2, AxiomViolation::Positivity { a: name(i), b: name(j) }));
                break 'pos;
            }
        }
    }
    'tri: for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if d[a][c] > &d[a][b] + &d[b][c] {
                    report.triangle = false;
                    violations.push((
                        3,
                        AxiomViolation::Triangle { a: name(a), b: name(b), c: name(c) },
                    ));
                    break 'tri;
                }
            }
        }
    }
    report.first_violation = violations.into_iter().min_by_key(|(k, _)| *k).map(|(_, v)| v);
    report
}

/// JSON space definition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    Finite { labels: Vec<String>, d: Vec<Vec<Scalar>> },
    GornickiNat,
    #[serde(alias = "half_line_usual")]
    HalfLine,
    UnitIntervalRight,
    SplitSet,
    ReciprocalSet,
}

impl Space {
    pub fn finite<L: AsRef<str>>(labels: &[L], d: Vec<Vec<Scalar>>) -> Result<Space> {
        let report = verify_metric_axioms(labels, &d);
        if let Some(v) = report.first_violation {
            return Err(Error::MetricAxiom(v));
        }
        Ok(Space {
            kind: SpaceKind::Finite(FiniteSpace {
                labels: labels.iter().map(|l| Arc::from(l.as_ref())).collect(),
                d,
            }),
            flags: SpaceFlags {
                complete: Some(true),
                boundedly_compact: Some(true),
                compact: Some(true),
                closed_in_euclidean: None,
            },
        })
    }

    pub fn gornicki_nat() -> Space {
        Space {
            kind: SpaceKind::GornickiNat,
            // Cauchy sequences are eventually constant; (n) is bounded with no
            // convergent subsequence.
            flags: SpaceFlags {
                complete: Some(true),
                boundedly_compact: Some(false),
                compact: Some(false),
                closed_in_euclidean: Some(false),
            },
        }
    }

    pub fn half_line() -> Space {
        Space {
            kind: SpaceKind::HalfLineUsual,
            flags: SpaceFlags {
                complete: Some(true),
                boundedly_compact: Some(true),
                compact: Some(false),
                closed_in_euclidean: Some(true),
            },
        }
    }

    pub fn unit_interval_right() -> Space {
        Space {
            kind: SpaceKind::UnitIntervalRight,
            flags: SpaceFlags {
                complete: Some(false),
                boundedly_compact: Some(false),
                compact: Some(false),
                closed_in_euclidean: Some(false),
            },
        }
    }

    pub fn split_set() -> Space {
        Space {
            kind: SpaceKind::SplitSet,
            flags: SpaceFlags {
                complete: Some(false),
                boundedly_compact: Some(false),
                compact: Some(false),
                closed_in_euclidean: Some(false),
            },
        }
    }

    pub fn reciprocal_set() -> Space {
        Space {
            kind: SpaceKind::ReciprocalSet,
            flags: SpaceFlags {
                complete: Some(false),
                boundedly_compact: Some(false),
                compact: Some(false),
                closed_in_euclidean: Some(false),
            },
        }
    }

    pub fn from_spec(spec: &SpaceSpec) -> Result<Space> {
        Ok(match spec {
            SpaceSpec::Finite { labels, d } => Space::finite(labels, d.clone())?,
            SpaceSpec::GornickiNat => Space::gornicki_nat(),
            SpaceSpec::HalfLine => Space::half_line(),
            SpaceSpec::UnitIntervalRight => Space::unit_interval_right(),
            SpaceSpec::SplitSet => Space::split_set(),
            SpaceSpec::ReciprocalSet => Space::reciprocal_set(),
        })
    }

    pub fn from_json(text: &str) -> Result<Space> {
        let spec: SpaceSpec =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("space: {e}")))?;
        Space::from_spec(&spec)
    }

    pub fn to_spec(&self) -> SpaceSpec {
        match &self.kind {
            SpaceKind::Finite(f) => SpaceSpec::Finite {
                labels: f.labels.iter().map(|l| l.to_string()).collect(),
                d: f.d.clone(),
            },
            SpaceKind::GornickiNat => SpaceSpec::GornickiNat,
            SpaceKind::HalfLineUsual => SpaceSpec::HalfLine,
            SpaceKind::UnitIntervalRight => SpaceSpec::UnitIntervalRight,
            SpaceKind::SplitSet => SpaceSpec::SplitSet,
            SpaceKind::ReciprocalSet => SpaceSpec::ReciprocalSet,
        }
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    pub fn flags(&self) -> SpaceFlags {
        self.flags
    }

    pub fn name(&self) -> String {
        match &self.kind {
            SpaceKind::Finite(f) => format!("finite({})", f.len()),
            SpaceKind::GornickiNat => "gornicki_nat".into(),
            SpaceKind::HalfLineUsual => "half_line".into(),
            SpaceKind::UnitIntervalRight => "unit_interval_right".into(),
            SpaceKind::SplitSet => "split_set".into(),
            SpaceKind::ReciprocalSet => "reciprocal_set".into(),
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteSpace> {
        match &self.kind {
            SpaceKind::Finite(f) => Some(f),
            _ => None,
        }
    }

    /// Number of points, for finite spaces.
    pub fn size(&self) -> Option<usize> {
        self.as_finite().map(FiniteSpace::len)
    }

    /// Every point of a finite space, in index order.
    pub fn points(&self) -> Option<Vec<Point>> {
        self.as_finite().map(|f| {
            f.labels
                .iter()
                .enumerate()
                .map(|(index, label)| Point::Finite { index, label: label.clone() })
                .collect()
        })
    }

    fn value_member(&self, v: &Scalar) -> bool {
        match self.kind {
            SpaceKind::Finite(_) => false,
            SpaceKind::GornickiNat => v.is_integer() && v.is_positive(),
            SpaceKind::HalfLineUsual => !v.is_negative(),
            SpaceKind::UnitIntervalRight => !v.is_negative() && *v < Scalar::one(),
            SpaceKind::SplitSet => {
                (*v > Scalar::one() && *v <= Scalar::from_int(2))
                    || v.is_zero()
                    || *v == Scalar::from_int(-1)
            }
            SpaceKind::ReciprocalSet => v.is_positive() && v.numer() == 1.into(),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match (&self.kind, p) {
            (SpaceKind::Finite(f), Point::Finite { index, label }) => {
                f.labels.get(*index).is_some_and(|l| l == label)
            }
            (SpaceKind::Finite(_), Point::Value(_)) => false,
            (_, Point::Value(v)) => self.value_member(v),
            (_, Point::Finite { .. }) => false,
        }
    }

    fn membership_error(&self, p: &Point) -> Error {
        Error::Membership { point: p.to_string(), space: self.name() }
    }

    pub fn check(&self, p: &Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(self.membership_error(p))
        }
    }

    /// A membership-checked catalog point.
    pub fn point(&self, v: Scalar) -> Result<Point> {
        let p = Point::Value(v);
        self.check(&p)?;
        Ok(p)
    }

    pub fn point_at(&self, index: usize) -> Result<Point> {
        match &self.kind {
            SpaceKind::Finite(f) if index < f.len() => {
                Ok(Point::Finite { index, label: f.labels[index].clone() })
            }
            _ => Err(Error::Membership { point: format!("#{index}"), space: self.name() }),
        }
    }

    /// Parses a label (finite spaces) or a scalar (catalog spaces).
    pub fn parse_point(&self, text: &str) -> Result<Point> {
        match &self.kind {
            SpaceKind::Finite(f) => f
                .labels
                .iter()
                .position(|l| &**l == text)
                .map(|index| Point::Finite { index, label: f.labels[index].clone() })
                .ok_or_else(|| Error::Membership { point: text.into(), space: self.name() }),
            _ => self.point(text.parse()?),
        }
    }

    /// Exact distance between two members.
    pub fn dist(&self, p: &Point, q: &Point) -> Result<Scalar> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.dist_unchecked(p, q))
    }

    /// Distance for points already known to belong to this space.
    pub(crate) fn dist_unchecked(&self, p: &Point, q: &Point) -> Scalar {
        match (&self.kind, p, q) {
            (SpaceKind::Finite(f), Point::Finite { index: i, .. }, Point::Finite { index: j, .. }) => {
                f.d[*i][*j].clone()
            }
            (SpaceKind::GornickiNat, Point::Value(x), Point::Value(y)) => {
                if x == y {
                    Scalar::zero()
                } else {
                    let gap = x.recip().expect("positive") - y.recip().expect("positive");
                    Scalar::one() + gap.abs()
                }
            }
            (_, Point::Value(x), Point::Value(y)) => (x - y).abs(),
            _ => unreachable!("membership checked by caller"),
        }
    }

    /// `count` distinct membership-checked points drawn deterministically from
    /// `seed`. Finite spaces return all points (up to `count`).
    pub fn sample(&self, count: usize, seed: u64) -> Vec<Point> {
        if let Some(points) = self.points() {
            return points.into_iter().take(count).collect();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while out.len() < count && attempts < count.saturating_mul(64).max(1024) {
            attempts += 1;
            let den = rng.gen_range(1..=64i64);
            let v = match self.kind {
                SpaceKind::GornickiNat => Scalar::from_int(rng.gen_range(1..=1_000)),
                SpaceKind::HalfLineUsual => q(rng.gen_range(0..=10 * den), den),
                SpaceKind::UnitIntervalRight => q(rng.gen_range(0..den), den),
                SpaceKind::SplitSet => match rng.gen_range(0..20) {
                    0 => Scalar::from_int(-1),
                    1 => Scalar::zero(),
                    _ => q(rng.gen_range(den + 1..=2 * den), den),
                },
                SpaceKind::ReciprocalSet => Scalar::recip_int(rng.gen_range(1..=1_000)),
                SpaceKind::Finite(_) => unreachable!(),
            };
            let p = Point::Value(v);
            debug_assert!(self.contains(&p));
            if seen.insert(p.clone()) {
                out.push(p);
            }
        }
        out
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[(i64, i64)]]) -> Vec<Vec<Scalar>> {
        rows.iter().map(|r| r.iter().map(|&(a, b)| q(a, b)).collect()).collect()
    }

    #[test]
    fn gornicki_distance() {
        let s = Space::gornicki_nat();
        let one = s.point(q(1, 1)).unwrap();
        let two = s.point(q(2, 1)).unwrap();
        assert_eq!(s.dist(&one, &two).unwrap(), q(3, 2));
        assert_eq!(s.dist(&two, &two).unwrap(), Scalar::zero());
        assert!(s.point(q(0, 1)).is_err());
        assert!(s.point(q(1, 2)).is_err());
    }

    #[test]
    fn split_set_distance_and_membership() {
        let s = Space::split_set();
        let two = s.point(q(2, 1)).unwrap();
        let m1 = s.point(q(-1, 1)).unwrap();
        assert_eq!(s.dist(&two, &m1).unwrap(), q(3, 1));
        assert!(s.point(q(1, 1)).is_err());
        assert!(s.point(q(1, 2)).is_err());
        assert!(s.point(q(5, 2)).is_err());
        assert!(s.point(q(3, 2)).is_ok());
        assert!(s.point(q(0, 1)).is_ok());
    }

    #[test]
    fn catalog_membership() {
        assert!(Space::unit_interval_right().point(q(1, 1)).is_err());
        assert!(Space::unit_interval_right().point(q(0, 1)).is_ok());
        assert!(Space::half_line().point(q(-1, 3)).is_err());
        assert!(Space::reciprocal_set().point(q(1, 7)).is_ok());
        assert!(Space::reciprocal_set().point(q(2, 7)).is_err());
        assert!(Space::reciprocal_set().point(q(0, 1)).is_err());
        let finite = Space::finite(&["a"], m(&[&[(0, 1)]])).unwrap();
        assert!(finite.check(&Point::Value(q(1, 1))).is_err());
        assert!(Space::half_line().check(&finite.point_at(0).unwrap()).is_err());
    }

    #[test]
    fn flags_recorded() {
        assert_eq!(Space::gornicki_nat().flags().complete, Some(true));
        assert_eq!(Space::gornicki_nat().flags().compact, Some(false));
        assert_eq!(Space::unit_interval_right().flags().complete, Some(false));
        assert_eq!(Space::reciprocal_set().flags().complete, Some(false));
        assert_eq!(Space::half_line().flags().closed_in_euclidean, Some(true));
    }

    #[test]
    fn axioms_pass_three_points() {
        let d = m(&[
            &[(0, 1), (1, 1), (2, 1)],
            &[(1, 1), (0, 1), (3, 2)],
            &[(2, 1), (3, 2), (0, 1)],
        ]);
        let r = verify_metric_axioms(&["a", "b", "c"], &d);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn axioms_detect_asymmetry() {
        let d = m(&[&[(0, 1), (1, 1)], &[(2, 1), (0, 1)]]);
        let r = verify_metric_axioms(&["a", "b"], &d);
        assert!(!r.symmetry);
        assert_eq!(
            r.first_violation,
            Some(AxiomViolation::Symmetry { a: "a".into(), b: "b".into() })
        );
        assert!(matches!(Space::finite(&["a", "b"], d), Err(Error::MetricAxiom(_))));
    }

    #[test]
    fn axioms_detect_triangle_and_positivity() {
        let d = m(&[
            &[(0, 1), (1, 1), (3, 1)],
            &[(1, 1), (0, 1), (1, 1)],
            &[(3, 1), (1, 1), (0, 1)],
        ]);
        let r = verify_metric_axioms(&["a", "b", "c"], &d);
        assert!(!r.triangle && r.symmetry && r.positivity);
        assert_eq!(
            r.first_violation,
            Some(AxiomViolation::Triangle { a: "a".into(), b: "b".into(), c: "c".into() })
        );
        let d = m(&[&[(0, 1), (0, 1)], &[(0, 1), (0, 1)]]);
        assert!(!verify_metric_axioms(&["a", "b"], &d).positivity);
        let d = m(&[&[(1, 1)]]);
        assert!(!verify_metric_axioms(&["a"], &d).identity);
    }

    #[test]
    fn axioms_single_point_and_shape() {
        assert!(verify_metric_axioms(&["a"], &m(&[&[(0, 1)]])).passed());
        let r = verify_metric_axioms(&["a", "b"], &m(&[&[(0, 1)]]));
        assert!(matches!(r.first_violation, Some(AxiomViolation::Shape { .. })));
        let r = verify_metric_axioms(&["a", "a"], &m(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]));
        assert!(matches!(r.first_violation, Some(AxiomViolation::Shape { .. })));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"kind":"finite","labels":["a","b"],"d":[["0","1/2"],["1/2","0"]]}"#;
        let s = Space::from_json(text).unwrap();
        let a = s.parse_point("a").unwrap();
        let b = s.parse_point("b").unwrap();
        assert_eq!(s.dist(&a, &b).unwrap(), q(1, 2));
        assert!(s.parse_point("c").is_err());
        let again = serde_json::to_string(&s.to_spec()).unwrap();
        assert_eq!(again, text);
        let g = Space::from_json(r#"{"kind":"gornicki_nat"}"#).unwrap();
        assert_eq!(g.name(), "gornicki_nat");
        assert!(Space::from_json(r#"{"kind":"nope"}"#).is_err());
    }

    #[test]
    fn samples_are_members_and_deterministic() {
        for s in [
            Space::gornicki_nat(),
            Space::half_line(),
            Space::unit_interval_right(),
            Space::split_set(),
            Space::reciprocal_set(),
        ] {
            let a = s.sample(100, 7);
            assert_eq!(a.len(), 100);
            assert!(a.iter().all(|p| s.contains(p)));
            assert_eq!(a, s.sample(100, 7));
        }
    }

    #[test]
    fn catalog_symmetry_and_identity_on_samples() {
        for s in [Space::gornicki_nat(), Space::half_line(), Space::split_set()] {
            let pts = s.sample(40, 3);
            for p in &pts {
                for r in &pts {
                    let d = s.dist(p, r).unwrap();
                    assert_eq!(d, s.dist(r, p).unwrap());
                    assert_eq!(d.is_zero(), p == r);
                }
            }
        }
    }

    #[test]
    fn gornicki_distances_bounded() {
        let s = Space::gornicki_nat();
        let pts: Vec<_> = (1..=60).map(|n| s.point(Scalar::from_int(n)).unwrap()).collect();
        for (i, p) in pts.iter().enumerate() {
            for r in &pts[i + 1..] {
                let d = s.dist(p, r).unwrap();
                assert!(d > Scalar::one() && d <= Scalar::from_int(2));
            }
        }
    }
}
