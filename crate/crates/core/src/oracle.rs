//! Brute-force ground truth on small finite spaces.
//!
//! Every self-map of a finite space is enumerated and classified. Finite
//! spaces are compact and every self-map is continuous, so a map satisfying
//! the strict Kannan condition must have exactly one fixed point reached from
//! every start; any row that disagrees is a defect.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::condition::{evaluate_condition, ConditionKind, PairSource};
use crate::error::{Error, Result};
use crate::map::{orbit, OrbitStatus, SelfMap};
use crate::scalar::{q, Scalar};
use crate::space::{Point, Space};

pub const MIN_RANDOM_SIZE: usize = 2;
pub const MAX_RANDOM_SIZE: usize = 8;
/// Census size limit, |X|^|X| maps.
pub const MAX_CENSUS_MAPS: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    /// Off-diagonal distances drawn from [1, 2]; the triangle inequality is
    /// automatic.
    #[default]
    UnitBand,
    /// Distinct rational points on a line, absolute differences.
    Line,
}

pub fn random_finite_space(n: usize, seed: u64) -> Result<Space> {
    random_finite_space_with(n, seed, Generator::UnitBand)
}

pub fn random_finite_space_with(n: usize, seed: u64, generator: Generator) -> Result<Space> {
    if !(MIN_RANDOM_SIZE..=MAX_RANDOM_SIZE).contains(&n) {
        return Err(Error::SizeBound(format!(
            "random space size {n} outside {MIN_RANDOM_SIZE}..={MAX_RANDOM_SIZE}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let mut d = vec![vec![Scalar::zero(); n]; n];
    match generator {
        Generator::UnitBand => {
            for i in 0..n {
                for j in (i + 1)..n {
                    let den = rng.gen_range(1..=6i64);
                    let v = q(rng.gen_range(den..=2 * den), den);
                    d[i][j] = v.clone();
                    d[j][i] = v;
                }
            }
        }
        Generator::Line => {
            let mut xs: Vec<Scalar> = Vec::with_capacity(n);
            while xs.len() < n {
                let den = rng.gen_range(1..=6i64);
                let v = q(rng.gen_range(0..=4 * den), den);
                if !xs.contains(&v) {
                    xs.push(v);
                }
            }
            for i in 0..n {
                for j in 0..n {
                    d[i][j] = (&xs[i] - &xs[j]).abs();
                }
            }
        }
    }
    Space::finite(&labels, d)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    /// Image indices of points 0, 1, ... as base-|X| digits.
    pub map_id: String,
    pub strict_kannan: bool,
    /// One verdict per requested condition, in request order.
    pub satisfies: Vec<bool>,
    pub fixed_point_count: usize,
    pub converges: bool,
    pub common_limit: Option<String>,
    /// Steps the slowest start needed to reach the common limit.
    pub max_steps: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Census {
    pub size: usize,
    pub conditions: Vec<String>,
    pub rows: Vec<CensusRow>,
    /// Rows contradicting a fixed point theorem for compact spaces.
    pub defects: Vec<String>,
}

impl Census {
    /// `map_id, strict_kannan, <conditions...>, fixed_point_count, converges, common_limit`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("map_id,strict_kannan");
        for c in &self.conditions {
            let _ = write!(out, ",{c}");
        }
        out.push_str(",fixed_point_count,converges,common_limit\n");
        for r in &self.rows {
            let _ = write!(out, "{},{}", r.map_id, r.strict_kannan);
            for s in &r.satisfies {
                let _ = write!(out, ",{s}");
            }
            let _ = writeln!(
                out,
                ",{},{},{}",
                r.fixed_point_count,
                r.converges,
                r.common_limit.as_deref().unwrap_or("")
            );
        }
        out
    }

    pub fn strict_kannan_rows(&self) -> impl Iterator<Item = &CensusRow> {
        self.rows.iter().filter(|r| r.strict_kannan)
    }
}

fn map_count(n: usize) -> Result<u64> {
    (n as u64)
        .checked_pow(n as u32)
        .filter(|&c| c <= MAX_CENSUS_MAPS)
        .ok_or_else(|| Error::SizeBound(format!("{n}^{n} self-maps exceed {MAX_CENSUS_MAPS}")))
}

/// Image table of map number `id`; point 0 is the most significant digit.
pub fn decode_map_id(n: usize, mut id: u64) -> Vec<usize> {
    let mut targets = vec![0; n];
    for slot in targets.iter_mut().rev() {
        *slot = (id % n as u64) as usize;
        id /= n as u64;
    }
    targets
}

pub fn encode_map_id(targets: &[usize]) -> String {
    targets.iter().map(|t| char::from_digit(*t as u32, 36).expect("size <= 36")).collect()
}

/// Whether satisfying `cond` on a compact space guarantees a fixed point.
fn guarantees_fixed_point(cond: &ConditionKind) -> bool {
    matches!(
        cond,
        ConditionKind::StrictKannan
            | ConditionKind::KannanK { .. }
            | ConditionKind::Fisher
            | ConditionKind::Khan
            | ConditionKind::ChenYeh { .. }
    )
}

fn classify(space: &Space, conditions: &[ConditionKind], points: &[Point], id: u64) -> Result<(CensusRow, Vec<String>)> {
    let n = points.len();
    let targets = decode_map_id(n, id);
    let map_id = encode_map_id(&targets);
    let map = SelfMap::table(space, targets.clone())?;
    let holds = |c: &ConditionKind| -> Result<bool> {
        Ok(evaluate_condition(c, space, &map, &PairSource::Exhaustive)?.holds())
    };
    let strict_kannan = holds(&ConditionKind::StrictKannan)?;
    let satisfies = conditions.iter().map(holds).collect::<Result<Vec<_>>>()?;
    let fixed_point_count = targets.iter().enumerate().filter(|(i, t)| *i == **t).count();

    let mut limit: Option<Point> = None;
    let mut converges = true;
    let mut max_steps = 0;
    for p in points {
        let o = orbit(space, &map, p, n)?;
        match o.status {
            OrbitStatus::FixedPointReached { at } => {
                let z = &o.points[at];
                max_steps = max_steps.max(at);
                match &limit {
                    None => limit = Some(z.clone()),
                    Some(l) if l == z => {}
                    Some(_) => converges = false,
                }
            }
            _ => converges = false,
        }
    }
    let common_limit = if converges { limit.map(|p| p.to_string()) } else { None };

    let mut defects = Vec::new();
    if strict_kannan && !(fixed_point_count == 1 && converges) {
        defects.push(format!(
            "map {map_id}: strict Kannan holds but fixed points = {fixed_point_count}, converges = {converges}"
        ));
    }
    for (c, ok) in conditions.iter().zip(&satisfies) {
        if *ok && guarantees_fixed_point(c) && fixed_point_count == 0 {
            defects.push(format!("map {map_id}: {c} holds but the map has no fixed point"));
        }
    }
    let row = CensusRow {
        map_id,
        strict_kannan,
        satisfies,
        fixed_point_count,
        converges,
        common_limit,
        max_steps: converges.then_some(max_steps),
    };
    Ok((row, defects))
}

/// One classified row per self-map, in map id order.
pub fn enumerate_census(space: &Space, conditions: &[ConditionKind]) -> Result<Census> {
    enumerate_census_with(space, conditions, crate::condition::Parallelism::Serial)
}

pub fn enumerate_census_with(
    space: &Space,
    conditions: &[ConditionKind],
    parallelism: crate::condition::Parallelism,
) -> Result<Census> {
    let points = space.points().ok_or_else(|| Error::NotFinite(space.name()))?;
    let total = map_count(points.len())?;
    for c in conditions {
        c.validate()?;
    }
    let results: Vec<(CensusRow, Vec<String>)> = match parallelism {
        crate::condition::Parallelism::Serial => {
            (0..total).map(|id| classify(space, conditions, &points, id)).collect::<Result<_>>()?
        }
        crate::condition::Parallelism::Parallel => (0..total)
            .into_par_iter()
            .map(|id| classify(space, conditions, &points, id))
            .collect::<Result<_>>()?,
    };
    let mut rows = Vec::with_capacity(results.len());
    let mut defects = Vec::new();
    for (r, d) in results {
        rows.push(r);
        defects.extend(d);
    }
    Ok(Census {
        size: points.len(),
        conditions: conditions.iter().map(ConditionKind::name).collect(),
        rows,
        defects,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Tightness {
    /// max over pairs of 2 d(Tx,Ty) / (d(x,Tx) + d(y,Ty)); always < 1.
    pub ratio: Scalar,
    pub map_id: String,
    pub x: String,
    pub y: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TightnessReport {
    pub satisfying_maps: usize,
    /// `None` when no map satisfies the strict Kannan condition.
    pub sup: Option<Tightness>,
}

/// Over all strict Kannan maps, how close the inequality comes to equality.
pub fn tightness_scan(space: &Space) -> Result<TightnessReport> {
    let points = space.points().ok_or_else(|| Error::NotFinite(space.name()))?;
    let n = points.len();
    let total = map_count(n)?;
    let mut satisfying_maps = 0;
    let mut sup: Option<Tightness> = None;
    for id in 0..total {
        let targets = decode_map_id(n, id);
        let map = SelfMap::table(space, targets.clone())?;
        if !evaluate_condition(&ConditionKind::StrictKannan, space, &map, &PairSource::Exhaustive)?.holds() {
            continue;
        }
        satisfying_maps += 1;
        let disp: Vec<Scalar> = (0..n).map(|i| space.dist_unchecked(&points[i], &points[targets[i]])).collect();
        for i in 0..n {
            for j in (i + 1)..n {
                let denom = &disp[i] + &disp[j];
                // strict Kannan on a distinct pair forces denom > lhs >= 0
                let lhs = space.dist_unchecked(&points[targets[i]], &points[targets[j]]);
                let ratio = Scalar::from_int(2) * (&lhs / &denom);
                if sup.as_ref().is_none_or(|s| ratio > s.ratio) {
                    sup = Some(Tightness {
                        ratio,
                        map_id: encode_map_id(&targets),
                        x: points[i].to_string(),
                        y: points[j].to_string(),
                    });
                }
            }
        }
    }
    Ok(TightnessReport { satisfying_maps, sup })
}
