//! Contractive conditions and an exact checker over explicit pair sets.
//!
//! A report only speaks for the pairs it checked. For infinite spaces the
//! caller supplies a rational sample and `domain_exhausted` stays false.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::map::{iterates, SelfMap};
use crate::scalar::{lt_sqrt, Scalar};
use crate::space::{Point, Space};

/// A non-negative pair-indexed coefficient for the Chen-Yeh condition.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficient {
    Constant(Scalar),
    /// Symmetric lookup; a missing pair is an error.
    Table(HashMap<(Point, Point), Scalar>),
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient::Constant(Scalar::zero())
    }

    pub fn at(&self, x: &Point, y: &Point) -> Result<Scalar> {
        let v = match self {
            Coefficient::Constant(c) => c.clone(),
            Coefficient::Table(t) => t
                .get(&(x.clone(), y.clone()))
                .or_else(|| t.get(&(y.clone(), x.clone())))
                .cloned()
                .ok_or_else(|| Error::MissingCoefficient(x.to_string(), y.to_string()))?,
        };
        if v.is_negative() {
            return Err(Error::NegativeCoefficient { x: x.to_string(), y: y.to_string(), value: v });
        }
        Ok(v)
    }

    fn is_zero(&self) -> bool {
        matches!(self, Coefficient::Constant(c) if c.is_zero())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConditionKind {
    /// d(Tx,Ty) <= k (d(x,Tx) + d(y,Ty)), 0 <= k < 1/2.
    KannanK { k: Scalar },
    /// d(Tx,Ty) < (d(x,Tx) + d(y,Ty)) / 2.
    StrictKannan,
    /// d(Tx,Ty) < (d(x,Ty) + d(y,Tx)) / 2.
    Fisher,
    /// d(Tx,Ty) < sqrt(d(x,Tx) d(y,Ty)).
    Khan,
    /// d(Tx,Ty) below the largest of the seven Chen-Yeh terms. With
    /// `uniqueness_refinement` the report also checks a <= 1/d(x,y), b <= 1.
    ChenYeh { a: Coefficient, b: Coefficient, uniqueness_refinement: bool },
    /// StrictKannan for T^{m+1} against displacements at T^m.
    IteratedKannan { m: usize },
}

impl ConditionKind {
    pub fn kannan_k(k: Scalar) -> Result<Self> {
        let c = ConditionKind::KannanK { k };
        c.validate()?;
        Ok(c)
    }

    pub fn chen_yeh_zero() -> Self {
        ConditionKind::ChenYeh {
            a: Coefficient::zero(),
            b: Coefficient::zero(),
            uniqueness_refinement: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let ConditionKind::KannanK { k } = self {
            if k.is_negative() || *k >= Scalar::one().half() {
                return Err(Error::InvalidParameter(format!("Kannan constant {k} not in [0, 1/2)")));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> String {
        match self {
            ConditionKind::KannanK { k } => format!("kannan_k({k})"),
            ConditionKind::StrictKannan => "strict_kannan".into(),
            ConditionKind::Fisher => "fisher".into(),
            ConditionKind::Khan => "khan".into(),
            ConditionKind::ChenYeh { a, b, .. } if a.is_zero() && b.is_zero() => {
                "chen_yeh(0,0)".into()
            }
            ConditionKind::ChenYeh { .. } => "chen_yeh".into(),
            ConditionKind::IteratedKannan { m } => format!("iterated_kannan({m})"),
        }
    }
}

impl fmt::Display for ConditionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl Serialize for ConditionKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// One entry of a coefficient table in JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairValue {
    pub x: String,
    pub y: String,
    pub value: Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefficientSpec {
    Constant(Scalar),
    Table(Vec<PairValue>),
}

impl Default for CoefficientSpec {
    fn default() -> Self {
        CoefficientSpec::Constant(Scalar::zero())
    }
}

/// JSON condition definition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConditionSpec {
    KannanK { k: Scalar },
    StrictKannan,
    Fisher,
    Khan,
    ChenYeh {
        #[serde(default)]
        a: CoefficientSpec,
        #[serde(default)]
        b: CoefficientSpec,
        #[serde(default)]
        uniqueness_refinement: bool,
    },
    IteratedKannan { m: usize },
}

fn resolve_coefficient(spec: &CoefficientSpec, space: &Space) -> Result<Coefficient> {
    Ok(match spec {
        CoefficientSpec::Constant(c) => Coefficient::Constant(c.clone()),
        CoefficientSpec::Table(rows) => {
            let mut t = HashMap::new();
            for r in rows {
                t.insert((space.parse_point(&r.x)?, space.parse_point(&r.y)?), r.value.clone());
            }
            Coefficient::Table(t)
        }
    })
}

impl ConditionSpec {
    pub fn resolve(&self, space: &Space) -> Result<ConditionKind> {
        let c = match self {
            ConditionSpec::KannanK { k } => ConditionKind::KannanK { k: k.clone() },
            ConditionSpec::StrictKannan => ConditionKind::StrictKannan,
            ConditionSpec::Fisher => ConditionKind::Fisher,
            ConditionSpec::Khan => ConditionKind::Khan,
            ConditionSpec::ChenYeh { a, b, uniqueness_refinement } => ConditionKind::ChenYeh {
                a: resolve_coefficient(a, space)?,
                b: resolve_coefficient(b, space)?,
                uniqueness_refinement: *uniqueness_refinement,
            },
            ConditionSpec::IteratedKannan { m } => ConditionKind::IteratedKannan { m: *m },
        };
        c.validate()?;
        Ok(c)
    }

    /// Accepts a JSON object or a bare kind name such as `strict_kannan`.
    pub fn parse(text: &str) -> Result<ConditionSpec> {
        let t = text.trim();
        let json = if t.starts_with('{') { t.to_string() } else { format!(r#"{{"kind":"{t}"}}"#) };
        serde_json::from_str(&json).map_err(|e| Error::Parse(format!("condition: {e}")))
    }
}

/// Where the checked pairs come from.
#[derive(Clone, Debug)]
pub enum PairSource {
    /// All unordered distinct pairs of a finite space.
    Exhaustive,
    /// All unordered distinct pairs of an explicit point list.
    Sample { points: Vec<Point>, seed: Option<u64> },
    /// An explicit list of pairs.
    Pairs(Vec<(Point, Point)>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PairSourceSummary {
    Exhaustive { size: usize },
    Sample { points: usize, seed: Option<u64> },
    Pairs { count: usize },
}

/// The right-hand side a violated pair failed to stay below.
#[derive(Clone, Debug, PartialEq)]
pub enum Bound {
    Value(Scalar),
    Sqrt(Scalar),
    Max(Vec<Bound>),
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Value(v) => write!(f, "{v}"),
            Bound::Sqrt(v) => write!(f, "sqrt({v})"),
            Bound::Max(terms) => {
                f.write_str("max(")?;
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub x: Point,
    pub y: Point,
    pub lhs: Scalar,
    pub rhs: Bound,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum Verdict {
    Holds,
    Violated(Violation),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub condition: ConditionKind,
    pub pair_source: PairSourceSummary,
    pub pairs_checked: usize,
    pub domain_exhausted: bool,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uniqueness_refinement: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ConditionReport {
    pub fn holds(&self) -> bool {
        matches!(self.verdict, Verdict::Holds)
    }

    pub fn violation(&self) -> Option<&Violation> {
        match &self.verdict {
            Verdict::Violated(v) => Some(v),
            Verdict::Holds => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Parallelism {
    #[default]
    Serial,
    Parallel,
}

/// Per-point data the pair checks need: T^{m+1} x and d(T^m x, T^{m+1} x).
struct Prepared {
    image: Point,
    displacement: Scalar,
}

struct PairSet {
    points: Vec<Point>,
    pairs: Vec<(usize, usize)>,
    summary: PairSourceSummary,
    exhausted: bool,
}

fn expand_pairs(space: &Space, source: &PairSource) -> Result<PairSet> {
    let all_pairs = |n: usize| {
        (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j))).collect::<Vec<_>>()
    };
    match source {
        PairSource::Exhaustive => {
            let points = space.points().ok_or_else(|| Error::NotFinite(space.name()))?;
            let n = points.len();
            Ok(PairSet { pairs: all_pairs(n), points, summary: PairSourceSummary::Exhaustive { size: n }, exhausted: true })
        }
        PairSource::Sample { points, seed } => {
            let mut uniq: Vec<Point> = Vec::with_capacity(points.len());
            let mut seen = std::collections::HashSet::new();
            for p in points {
                space.check(p)?;
                if seen.insert(p.clone()) {
                    uniq.push(p.clone());
                }
            }
            let exhausted = space.size() == Some(uniq.len());
            let n = uniq.len();
            Ok(PairSet {
                pairs: all_pairs(n),
                points: uniq,
                summary: PairSourceSummary::Sample { points: n, seed: *seed },
                exhausted,
            })
        }
        PairSource::Pairs(list) => {
            let mut index: HashMap<Point, usize> = HashMap::new();
            let mut points = Vec::new();
            let mut pairs = Vec::with_capacity(list.len());
            for (x, y) in list {
                space.check(x)?;
                space.check(y)?;
                if x == y {
                    return Err(Error::PairNotDistinct(x.to_string(), y.to_string()));
                }
                let mut idx = |p: &Point| {
                    *index.entry(p.clone()).or_insert_with(|| {
                        points.push(p.clone());
                        points.len() - 1
                    })
                };
                let (i, j) = (idx(x), idx(y));
                pairs.push((i, j));
            }
            Ok(PairSet { points, pairs, summary: PairSourceSummary::Pairs { count: list.len() }, exhausted: false })
        }
    }
}

fn prepare(cond: &ConditionKind, space: &Space, map: &SelfMap, points: &[Point]) -> Result<Vec<Prepared>> {
    let shift = match cond {
        ConditionKind::IteratedKannan { m } => *m,
        _ => 0,
    };
    points
        .iter()
        .map(|p| {
            let it = iterates(space, map, p, shift + 1)?;
            let image = it[shift + 1].clone();
            let displacement = space.dist_unchecked(&it[shift], &image);
            Ok(Prepared { image, displacement })
        })
        .collect()
}

/// Result of a single pair: `Ok(None)` when the condition holds on it.
fn check_pair(
    cond: &ConditionKind,
    space: &Space,
    x: &Point,
    y: &Point,
    px: &Prepared,
    py: &Prepared,
) -> Result<Option<Violation>> {
    let lhs = space.dist_unchecked(&px.image, &py.image);
    let (dx, dy) = (&px.displacement, &py.displacement);
    let violated = |rhs: Bound| Some(Violation { x: x.clone(), y: y.clone(), lhs: lhs.clone(), rhs });
    Ok(match cond {
        ConditionKind::KannanK { k } => {
            let rhs = k * &(dx + dy);
            (lhs > rhs).then(|| violated(Bound::Value(rhs))).flatten()
        }
        ConditionKind::StrictKannan | ConditionKind::IteratedKannan { .. } => {
            let rhs = (dx + dy).half();
            (lhs >= rhs).then(|| violated(Bound::Value(rhs))).flatten()
        }
        ConditionKind::Fisher => {
            let rhs = (space.dist_unchecked(x, &py.image) + space.dist_unchecked(y, &px.image)).half();
            (lhs >= rhs).then(|| violated(Bound::Value(rhs))).flatten()
        }
        ConditionKind::Khan => {
            let radicand = dx * dy;
            if lt_sqrt(&lhs, &radicand)? {
                None
            } else {
                violated(Bound::Sqrt(radicand))
            }
        }
        ConditionKind::ChenYeh { a, b, .. } => {
            let terms = chen_yeh_terms(space, x, y, px, py, a, b)?;
            let mut below_some = false;
            for t in &terms {
                let ok = match t {
                    Bound::Value(v) => lhs < *v,
                    Bound::Sqrt(u) => lt_sqrt(&lhs, u)?,
                    Bound::Max(_) => unreachable!(),
                };
                if ok {
                    below_some = true;
                    break;
                }
            }
            if below_some {
                None
            } else {
                violated(Bound::Max(terms))
            }
        }
    })
}

/// The seven terms of the Chen-Yeh maximum, with square roots left symbolic.
fn chen_yeh_terms(
    space: &Space,
    x: &Point,
    y: &Point,
    px: &Prepared,
    py: &Prepared,
    a: &Coefficient,
    b: &Coefficient,
) -> Result<Vec<Bound>> {
    let dxy = space.dist_unchecked(x, y);
    let (dx, dy) = (&px.displacement, &py.displacement);
    let d_x_ty = space.dist_unchecked(x, &py.image);
    let d_y_tx = space.dist_unchecked(y, &px.image);
    let a = a.at(x, y)?;
    let b = b.at(x, y)?;
    let cross = &d_x_ty * &d_y_tx;
    let ratio = (dx * dy).checked_div(&dxy).ok_or(Error::DivisionByZero)?;
    Ok(vec![
        Bound::Value(dxy),
        Bound::Value((dx + dy).half()),
        Bound::Value((&d_x_ty + &d_y_tx).half()),
        Bound::Value(ratio),
        Bound::Sqrt(dx * dy),
        Bound::Value(&a * &cross),
        // b sqrt(u) = sqrt(b^2 u) for b >= 0
        Bound::Sqrt(&b.square() * &cross),
    ])
}

/// Checks `cond` for `map` on every pair of `pairs`.
pub fn evaluate_condition(
    cond: &ConditionKind,
    space: &Space,
    map: &SelfMap,
    pairs: &PairSource,
) -> Result<ConditionReport> {
    evaluate_condition_with(cond, space, map, pairs, Parallelism::Serial)
}

/// As [`evaluate_condition`]; the parallel mode reports the same first
/// violation in pair order as the serial one.
pub fn evaluate_condition_with(
    cond: &ConditionKind,
    space: &Space,
    map: &SelfMap,
    pairs: &PairSource,
    parallelism: Parallelism,
) -> Result<ConditionReport> {
    cond.validate()?;
    let set = expand_pairs(space, pairs)?;
    let prepared = prepare(cond, space, map, &set.points)?;
    let eval = |&(i, j): &(usize, usize)| {
        check_pair(cond, space, &set.points[i], &set.points[j], &prepared[i], &prepared[j])
    };
    let first_bad = match parallelism {
        Parallelism::Serial => set.pairs.iter().map(eval).enumerate().find(|(_, r)| !matches!(r, Ok(None))),
        Parallelism::Parallel => set
            .pairs
            .par_iter()
            .map(eval)
            .enumerate()
            .find_first(|(_, r)| !matches!(r, Ok(None))),
    };
    let (pairs_checked, verdict) = match first_bad {
        None => (set.pairs.len(), Verdict::Holds),
        Some((_, Err(e))) => return Err(e),
        Some((idx, Ok(Some(v)))) => (idx + 1, Verdict::Violated(v)),
        Some((_, Ok(None))) => unreachable!(),
    };

    let mut notes = Vec::new();
    let mut uniqueness_refinement = None;
    if let ConditionKind::ChenYeh { a, b, uniqueness_refinement: want } = cond {
        let degenerate = set
            .pairs
            .iter()
            .filter(|&&(i, j)| prepared[i].displacement.is_zero() || prepared[j].displacement.is_zero())
            .count();
        if degenerate > 0 {
            notes.push(format!(
                "{degenerate} pair(s) contain a fixed point; the d(x,Tx)d(y,Ty)/d(x,y) term is 0 there"
            ));
        }
        if *want {
            let mut ok = true;
            for &(i, j) in &set.pairs {
                let (x, y) = (&set.points[i], &set.points[j]);
                let dxy = space.dist_unchecked(x, y);
                if &a.at(x, y)? * &dxy > Scalar::one() || b.at(x, y)? > Scalar::one() {
                    ok = false;
                    break;
                }
            }
            uniqueness_refinement = Some(ok);
        }
    }

    Ok(ConditionReport {
        condition: cond.clone(),
        pair_source: set.summary,
        pairs_checked,
        domain_exhausted: set.exhausted,
        verdict,
        uniqueness_refinement,
        notes,
    })
}

/// Re-evaluates a reported violation; true when it is still a violation.
pub fn replay_violation(cond: &ConditionKind, space: &Space, map: &SelfMap, v: &Violation) -> Result<bool> {
    let r = evaluate_condition(cond, space, map, &PairSource::Pairs(vec![(v.x.clone(), v.y.clone())]))?;
    Ok(r.violation().is_some_and(|w| w.lhs == v.lhs && w.rhs == v.rhs))
}

/// Largest observed d(Tx,Ty) / (d(x,Tx) + d(y,Ty)) over pairs with a nonzero
/// denominator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KannanRatio {
    pub ratio: Scalar,
    pub x: Point,
    pub y: Point,
}

pub fn kannan_ratio(space: &Space, map: &SelfMap, pairs: &PairSource) -> Result<Option<KannanRatio>> {
    let set = expand_pairs(space, pairs)?;
    let prepared = prepare(&ConditionKind::StrictKannan, space, map, &set.points)?;
    let mut best: Option<KannanRatio> = None;
    for &(i, j) in &set.pairs {
        let denom = &prepared[i].displacement + &prepared[j].displacement;
        if denom.is_zero() {
            continue;
        }
        let lhs = space.dist_unchecked(&prepared[i].image, &prepared[j].image);
        let ratio = &lhs / &denom;
        if best.as_ref().is_none_or(|b| ratio > b.ratio) {
            best = Some(KannanRatio { ratio, x: set.points[i].clone(), y: set.points[j].clone() });
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaAttempt {
    pub delta: Scalar,
    /// First (i, j) with d(x_i, x_j) < eps + delta but d(x_{i+1}, x_{j+1}) > eps.
    pub witness: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsRow {
    pub eps: Scalar,
    pub passing_delta: Option<Scalar>,
    pub attempts: Vec<DeltaAttempt>,
}

impl EpsRow {
    pub fn passed(&self) -> bool {
        self.passing_delta.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsDeltaReport {
    pub evidence_only: bool,
    pub start: Point,
    pub horizon: usize,
    pub rows: Vec<EpsRow>,
}

/// Finite-horizon scan of the orbit condition: for each eps, the first
/// candidate delta such that for all 0 <= i < j <= horizon,
/// d(x_i, x_j) < eps + delta implies d(x_{i+1}, x_{j+1}) <= eps.
pub fn check_epsdelta_orbit(
    space: &Space,
    map: &SelfMap,
    x0: &Point,
    eps_grid: &[Scalar],
    delta_candidates: &[Scalar],
    horizon: usize,
) -> Result<EpsDeltaReport> {
    if horizon < 2 {
        return Err(Error::InvalidParameter("epsilon-delta horizon must be at least 2".into()));
    }
    if let Some(bad) = eps_grid.iter().chain(delta_candidates).find(|v| !v.is_positive()) {
        return Err(Error::InvalidParameter(format!("epsilon and delta must be positive, got {bad}")));
    }
    let pts = iterates(space, map, x0, horizon + 1)?;
    let n = pts.len();
    let mut d = vec![vec![Scalar::zero(); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = space.dist_unchecked(&pts[i], &pts[j]);
            d[j][i] = v.clone();
            d[i][j] = v;
        }
    }
    let rows = eps_grid
        .iter()
        .map(|eps| {
            let mut passing_delta = None;
            let mut attempts = Vec::new();
            for delta in delta_candidates {
                let window = eps + delta;
                let witness = (0..=horizon)
                    .flat_map(|i| ((i + 1)..=horizon).map(move |j| (i, j)))
                    .find(|&(i, j)| d[i][j] < window && d[i + 1][j + 1] > *eps);
                attempts.push(DeltaAttempt { delta: delta.clone(), witness });
                if witness.is_none() {
                    passing_delta = Some(delta.clone());
                    break;
                }
            }
            EpsRow { eps: eps.clone(), passing_delta, attempts }
        })
        .collect();
    Ok(EpsDeltaReport { evidence_only: true, start: x0.clone(), horizon, rows })
}
