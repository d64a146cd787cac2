//! Mission objectives: coverage accounting, hover-count + over-coverage
//! score, closed-tour length, the combined score, and the feasibility-first
//! ordering used by the cover solver.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::geometry::{covers, HoverPoint};
use crate::psod2p::Tour;
use crate::scenario::Scenario;

/// A set of hover points; the mission charges every node from some point of
/// the set. `k` is simply the number of points.
#[derive(Debug, Clone, PartialEq)]
pub struct HoverPlan {
    pub points: Vec<HoverPoint>,
}

impl HoverPlan {
    pub fn new(points: Vec<HoverPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Validation("a hover plan needs at least one point".into()));
        }
        Ok(HoverPlan { points })
    }

    pub fn k(&self) -> usize {
        self.points.len()
    }

    pub fn validate_in_region(&self, scenario: &Scenario) -> Result<()> {
        for (i, p) in self.points.iter().enumerate() {
            if !scenario.region.contains(p.x, p.y) {
                return Err(Error::Validation(format!(
                    "hover point {i} at ({}, {}) lies outside the region",
                    p.x, p.y
                )));
            }
        }
        Ok(())
    }
}

/// Coverage accounting for one plan. `total_cover_incidences` counts every
/// (node, hover point) in-range pair; `s_rc` is the repeated-coverage count:
/// incidences minus the node count when every node is covered, and
/// incidences minus the covered count otherwise (so it stays non-negative
/// and only measures over-coverage among reached nodes).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageReport {
    pub covered_count: usize,
    pub total_cover_incidences: usize,
    pub s_rc: usize,
    pub feasible: bool,
    pub uncovered_ids: Vec<usize>,
}

/// Scalar objective plus the full-coverage flag that dominates comparisons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveValue {
    pub feasible: bool,
    pub value: f64,
}

impl ObjectiveValue {
    pub fn new(feasible: bool, value: f64) -> Self {
        ObjectiveValue { feasible, value }
    }
}

/// Feasibility-first total order: any plan that charges every node ranks
/// strictly better than any plan that does not, no matter the values;
/// within the same class, smaller values win.
pub fn compare_feasibility_first(a: &ObjectiveValue, b: &ObjectiveValue) -> Ordering {
    match (a.feasible, b.feasible) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        _ => a.value.total_cmp(&b.value),
    }
}

/// Weights of the cover objective w1·k + w2·s_rc. The plain unweighted sum
/// is the default.
#[derive(Debug, Clone, Copy)]
pub struct CsopWeights {
    pub w1: f64,
    pub w2: f64,
}

impl Default for CsopWeights {
    fn default() -> Self {
        CsopWeights { w1: 1.0, w2: 1.0 }
    }
}

/// Spatial hash of the scenario's nodes with cell size equal to the ground
/// coverage radius, so a hover point only needs to test the 3x3 cell
/// neighborhood around itself. Build once per scenario and reuse across
/// evaluations.
pub struct CoverageEval<'a> {
    scenario: &'a Scenario,
    cell: f64,
    cols: usize,
    rows: usize,
    buckets: Vec<Vec<u32>>,
}

impl<'a> CoverageEval<'a> {
    pub fn new(scenario: &'a Scenario) -> Self {
        let cell = scenario.ground_radius().max(1e-9);
        let cols = (scenario.region.width / cell).ceil() as usize + 1;
        let rows = (scenario.region.height / cell).ceil() as usize + 1;
        let mut buckets = vec![Vec::new(); cols * rows];
        for node in &scenario.nodes {
            let cx = ((node.x / cell) as usize).min(cols - 1);
            let cy = ((node.y / cell) as usize).min(rows - 1);
            buckets[cy * cols + cx].push(node.id as u32);
        }
        CoverageEval { scenario, cell, cols, rows, buckets }
    }

    pub fn scenario(&self) -> &Scenario {
        self.scenario
    }

    /// Per-node cover multiplicities for the point set.
    fn cover_counts(&self, points: impl Iterator<Item = (f64, f64)>) -> Vec<u32> {
        let mut counts = vec![0u32; self.scenario.nodes.len()];
        for (px, py) in points {
            let p = HoverPoint::new(px, py);
            let cx = (p.x / self.cell).floor() as isize;
            let cy = (p.y / self.cell).floor() as isize;
            let x_lo = (cx - 1).max(0) as usize;
            let y_lo = (cy - 1).max(0) as usize;
            // Empty ranges (x_lo > x_hi) fall out naturally for points far
            // outside the grid.
            let x_hi = ((cx + 1).max(0) as usize).min(self.cols - 1);
            let y_hi = ((cy + 1).max(0) as usize).min(self.rows - 1);
            for y in y_lo..=y_hi {
                for x in x_lo..=x_hi {
                    for &id in &self.buckets[y * self.cols + x] {
                        let node = &self.scenario.nodes[id as usize];
                        if covers(&p, node, self.scenario) {
                            counts[id as usize] += 1;
                        }
                    }
                }
            }
        }
        counts
    }

    pub fn report(&self, points: &[HoverPoint]) -> CoverageReport {
        self.report_xy(points.iter().map(|p| (p.x, p.y)))
    }

    /// Like [`CoverageEval::report`] but over a flat (x, y) stream, so
    /// solvers can evaluate coordinate buffers without building points.
    pub fn report_xy(&self, points: impl Iterator<Item = (f64, f64)>) -> CoverageReport {
        let counts = self.cover_counts(points);
        let n = counts.len();
        let covered_count = counts.iter().filter(|&&c| c > 0).count();
        let total: usize = counts.iter().map(|&c| c as usize).sum();
        let feasible = covered_count == n;
        let s_rc = if feasible { total - n } else { total - covered_count };
        let uncovered_ids = if feasible {
            Vec::new()
        } else {
            counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c == 0)
                .map(|(i, _)| i)
                .collect()
        };
        CoverageReport {
            covered_count,
            total_cover_incidences: total,
            s_rc,
            feasible,
            uncovered_ids,
        }
    }

    /// Cover objective w1·k + w2·s_rc with the feasibility flag attached.
    pub fn csop_value(&self, points: &[HoverPoint], weights: &CsopWeights) -> ObjectiveValue {
        let report = self.report(points);
        ObjectiveValue::new(
            report.feasible,
            weights.w1 * points.len() as f64 + weights.w2 * report.s_rc as f64,
        )
    }

    /// [`CoverageEval::csop_value`] over an interleaved [x0, y0, x1, y1, ..]
    /// coordinate buffer.
    pub fn csop_value_xy(&self, coords: &[f64], weights: &CsopWeights) -> ObjectiveValue {
        debug_assert!(coords.len() % 2 == 0);
        let report = self.report_xy(coords.chunks_exact(2).map(|c| (c[0], c[1])));
        ObjectiveValue::new(
            report.feasible,
            weights.w1 * (coords.len() / 2) as f64 + weights.w2 * report.s_rc as f64,
        )
    }

    /// True iff every node is covered (skips the full report).
    pub fn is_feasible(&self, points: &[HoverPoint]) -> bool {
        self.report(points).feasible
    }
}

/// Coverage accounting for `plan` against `scenario`.
pub fn evaluate_coverage(plan: &HoverPlan, scenario: &Scenario) -> CoverageReport {
    CoverageEval::new(scenario).report(&plan.points)
}

/// The cover objective for a plan: number of hover points plus weighted
/// repeated-coverage count, with feasibility attached.
pub fn f_csop(plan: &HoverPlan, scenario: &Scenario, weights: &CsopWeights) -> ObjectiveValue {
    CoverageEval::new(scenario).csop_value(&plan.points, weights)
}

fn check_permutation(tour: &Tour, k: usize) -> Result<()> {
    if tour.order.len() != k {
        return Err(Error::Contract(format!(
            "tour over {} entries does not match {k} points",
            tour.order.len()
        )));
    }
    let mut seen = vec![false; k];
    for &i in &tour.order {
        if i >= k || seen[i] {
            return Err(Error::Contract(format!(
                "tour is not a permutation of 0..{k}: offending index {i}"
            )));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Closed-tour length of visiting `points` in `tour` order and returning to
/// the start.
pub fn f_ctop(tour: &Tour, points: &[HoverPoint]) -> Result<f64> {
    check_permutation(tour, points.len())?;
    Ok(closed_tour_length(&tour.order, points))
}

/// Open-path variant: same visiting order but without the closing leg back
/// to the first point.
pub fn f_ctop_open(tour: &Tour, points: &[HoverPoint]) -> Result<f64> {
    check_permutation(tour, points.len())?;
    let mut total = 0.0;
    for w in tour.order.windows(2) {
        total += points[w[0]].planar_dist(&points[w[1]]);
    }
    Ok(total)
}

/// Length of the closed polyline visiting `points` in `order`. Callers must
/// guarantee `order` is a permutation.
pub(crate) fn closed_tour_length(order: &[usize], points: &[HoverPoint]) -> f64 {
    let k = order.len();
    if k < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    for i in 0..k {
        let a = &points[order[i]];
        let b = &points[order[(i + 1) % k]];
        total += a.planar_dist(b);
    }
    total
}

/// Combined mission score: hover count + repeated coverage + tour length.
/// Only defined for plans that charge every node.
pub fn f_jstop(plan: &HoverPlan, tour: &Tour, scenario: &Scenario) -> Result<f64> {
    let report = evaluate_coverage(plan, scenario);
    if !report.feasible {
        return Err(Error::Infeasible(format!(
            "{} of {} nodes uncharged",
            report.uncovered_ids.len(),
            scenario.nodes.len()
        )));
    }
    let tour_len = f_ctop(tour, &plan.points)?;
    Ok(plan.k() as f64 + report.s_rc as f64 + tour_len)
}
