//! Reference schedulers, tour heuristics, and small-instance exact oracles.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::HoverPoint;
use crate::objective::{closed_tour_length, CoverageEval, HoverPlan};
use crate::psod2p::Tour;
use crate::scenario::Scenario;

/// The closed set of reference methods the harness can select.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    UniformGrid,
    RandomSchedule,
    NearestNeighbor,
    SimAnneal,
    BruteTsp,
    BruteCover,
}

impl BaselineKind {
    pub fn parse(tag: &str) -> Result<Self> {
        match tag {
            "uniform_grid" | "uniform" => Ok(BaselineKind::UniformGrid),
            "random_schedule" | "random" => Ok(BaselineKind::RandomSchedule),
            "nearest_neighbor" | "nn" => Ok(BaselineKind::NearestNeighbor),
            "sim_anneal" | "sa" => Ok(BaselineKind::SimAnneal),
            "brute_tsp" | "brute" => Ok(BaselineKind::BruteTsp),
            "brute_cover" => Ok(BaselineKind::BruteCover),
            other => Err(Error::Config(format!("unknown baseline '{other}'"))),
        }
    }
}

/// Hover points on a near-square lattice over the region, row-major,
/// truncated to exactly `count`. Deterministic: no seed involved.
pub fn uniform_grid(scenario: &Scenario, count: usize) -> Result<HoverPlan> {
    if count == 0 {
        return Err(Error::Config("grid point count must be at least 1".into()));
    }
    let w = scenario.region.width;
    let h = scenario.region.height;
    let cols = ((count as f64 * w / h).sqrt().ceil() as usize).max(1);
    let rows = count.div_ceil(cols);
    let mut points = Vec::with_capacity(count);
    'outer: for r in 0..rows {
        for c in 0..cols {
            if points.len() == count {
                break 'outer;
            }
            points.push(HoverPoint::new(
                (c as f64 + 0.5) * w / cols as f64,
                (r as f64 + 0.5) * h / rows as f64,
            ));
        }
    }
    HoverPlan::new(points)
}

/// `k` hover points drawn uniformly from the region.
pub fn random_schedule(scenario: &Scenario, k: usize, seed: u64) -> Result<HoverPlan> {
    if k == 0 {
        return Err(Error::Config("random schedule needs k >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..k)
        .map(|_| {
            HoverPoint::new(
                rng.gen_range(0.0..=scenario.region.width),
                rng.gen_range(0.0..=scenario.region.height),
            )
        })
        .collect();
    HoverPlan::new(points)
}

/// Greedy nearest-unvisited chaining from `start`; ties break toward the
/// lower point index.
pub fn nearest_neighbor_tour(points: &[HoverPoint], start: usize) -> Result<Tour> {
    let k = points.len();
    if k == 0 {
        return Err(Error::Contract("no points to tour".into()));
    }
    if start >= k {
        return Err(Error::Contract(format!(
            "start index {start} out of range for {k} points"
        )));
    }
    let mut order = Vec::with_capacity(k);
    let mut visited = vec![false; k];
    let mut current = start;
    visited[start] = true;
    order.push(start);
    for _ in 1..k {
        let mut next = usize::MAX;
        let mut best = f64::INFINITY;
        for (i, p) in points.iter().enumerate() {
            if !visited[i] {
                let d = points[current].planar_dist(p);
                if d < best {
                    best = d;
                    next = i;
                }
            }
        }
        visited[next] = true;
        order.push(next);
        current = next;
    }
    Ok(Tour { order })
}

/// Cooling schedule and chain layout of the annealing tour baseline.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct SaParams {
    /// Initial temperature.
    pub t0: f64,
    /// Moves attempted at each temperature level.
    pub moves_per_temp: usize,
    /// Geometric cooling factor per level.
    pub cooling: f64,
    /// Temperature at which a chain stops.
    pub t_min: f64,
    /// Independent restarts; the best tour seen anywhere is returned.
    pub chains: usize,
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams { t0: 500.0, moves_per_temp: 200, cooling: 0.98, t_min: 1e-2, chains: 150 }
    }
}

impl SaParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.t0 > 0.0) || !(self.t_min > 0.0) {
            return Err(Error::Config("temperatures must be positive".into()));
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(Error::Config(format!(
                "cooling factor must lie in (0, 1), got {}",
                self.cooling
            )));
        }
        if self.chains == 0 || self.moves_per_temp == 0 {
            return Err(Error::Config("chains and moves_per_temp must be positive".into()));
        }
        Ok(())
    }
}

/// Metropolis annealing on the swap neighborhood: propose exchanging two
/// visiting positions, always accept improvements, accept degradations with
/// probability exp(-Δ/T), cool geometrically. Returns the best tour seen
/// across all chains.
pub fn sim_anneal_tour(points: &[HoverPoint], params: &SaParams, seed: u64) -> Result<Tour> {
    params.validate()?;
    let k = points.len();
    if k < 2 {
        return Err(Error::Contract(format!(
            "annealing needs at least 2 points, got {k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_order: Option<Vec<usize>> = None;
    let mut best_len = f64::INFINITY;

    for _ in 0..params.chains {
        let mut order = Tour::random(k, &mut rng).order;
        let mut len = closed_tour_length(&order, points);
        if len < best_len {
            best_len = len;
            best_order = Some(order.clone());
        }
        let mut temp = params.t0;
        while temp > params.t_min {
            for _ in 0..params.moves_per_temp {
                let i = rng.gen_range(0..k);
                let mut j = rng.gen_range(0..k - 1);
                if j >= i {
                    j += 1;
                }
                let delta = swap_delta(&mut order, points, i, j);
                if delta <= 0.0 || rng.gen::<f64>() < (-delta / temp).exp() {
                    order.swap(i, j);
                    len += delta;
                    if len < best_len {
                        best_len = len;
                        best_order = Some(order.clone());
                    }
                }
            }
            temp *= params.cooling;
        }
    }

    // Accumulated deltas drift; recompute the stored best exactly.
    let order = best_order.expect("at least one chain ran");
    Ok(Tour { order })
}

/// Length change of swapping positions i and j, leaving the order intact.
fn swap_delta(order: &mut [usize], points: &[HoverPoint], i: usize, j: usize) -> f64 {
    let k = order.len();
    let mut edges = [usize::MAX; 4];
    let mut m = 0;
    for e in [(i + k - 1) % k, i, (j + k - 1) % k, j] {
        if !edges[..m].contains(&e) {
            edges[m] = e;
            m += 1;
        }
    }
    let segment_sum = |order: &[usize]| -> f64 {
        edges[..m]
            .iter()
            .map(|&e| points[order[e]].planar_dist(&points[order[(e + 1) % k]]))
            .sum()
    };
    let before = segment_sum(order);
    order.swap(i, j);
    let after = segment_sum(order);
    order.swap(i, j);
    after - before
}

/// Exact shortest closed tour by enumeration with a fixed anchor. Guarded
/// to at most 10 points.
pub fn brute_tsp(points: &[HoverPoint]) -> Result<(Tour, f64)> {
    let k = points.len();
    if k == 0 {
        return Err(Error::Contract("no points to tour".into()));
    }
    if k > 10 {
        return Err(Error::Guard(format!(
            "exhaustive tour search is limited to 10 points, got {k}"
        )));
    }
    let mut order: Vec<usize> = (0..k).collect();
    let mut best = order.clone();
    let mut best_len = closed_tour_length(&order, points);
    permute_from(&mut order, 1, &mut |candidate| {
        let len = closed_tour_length(candidate, points);
        if len < best_len {
            best_len = len;
            best.copy_from_slice(candidate);
        }
    });
    Ok((Tour { order: best }, best_len))
}

fn permute_from(order: &mut Vec<usize>, at: usize, visit: &mut impl FnMut(&[usize])) {
    if at == order.len() {
        visit(order);
        return;
    }
    for i in at..order.len() {
        order.swap(at, i);
        permute_from(order, at + 1, visit);
        order.swap(at, i);
    }
}

/// Exact decision oracle: can `k` ground disks of the coverage radius cover
/// every node? Searches node positions, circle-pair intersections, and a
/// fine in-region lattice around the nodes. Returns a witness plan when
/// coverable. Guarded to n <= 8 nodes and k <= 3 disks.
pub fn brute_cover(scenario: &Scenario, k: usize) -> Result<(bool, Option<HoverPlan>)> {
    let n = scenario.nodes.len();
    if n > 8 {
        return Err(Error::Guard(format!(
            "exhaustive cover search is limited to 8 nodes, got {n}"
        )));
    }
    if k == 0 || k > 3 {
        return Err(Error::Guard(format!(
            "exhaustive cover search is limited to 1..=3 disks, got {k}"
        )));
    }
    let r = scenario.ground_radius();
    let eval = CoverageEval::new(scenario);
    let candidates = cover_candidates(scenario, r);

    let covered_by = |combo: &[HoverPoint]| eval.report(combo).feasible;

    let c = candidates.len();
    let mut combo = Vec::with_capacity(k);
    let found = match k.min(c) {
        0 => false,
        1 => candidates.iter().any(|&p| {
            combo.clear();
            combo.push(p);
            covered_by(&combo)
        }),
        2 => (0..c).any(|i| {
            (i + 1..c).any(|j| {
                combo.clear();
                combo.extend([candidates[i], candidates[j]]);
                covered_by(&combo)
            })
        }),
        _ => (0..c).any(|i| {
            (i + 1..c).any(|j| {
                (j + 1..c).any(|l| {
                    combo.clear();
                    combo.extend([candidates[i], candidates[j], candidates[l]]);
                    covered_by(&combo)
                })
            })
        }),
    };
    if found {
        Ok((true, Some(HoverPlan::new(combo)?)))
    } else {
        Ok((false, None))
    }
}

fn cover_candidates(scenario: &Scenario, r: f64) -> Vec<HoverPoint> {
    let mut candidates: Vec<HoverPoint> = Vec::new();
    let mut push = |x: f64, y: f64| {
        if scenario.region.contains(x, y) {
            candidates.push(HoverPoint::new(x, y));
        }
    };

    for node in &scenario.nodes {
        push(node.x, node.y);
    }
    // Intersections of the radius-r circles around node pairs: centers
    // placed there cover both nodes right at the boundary.
    for a in &scenario.nodes {
        for b in scenario.nodes.iter().skip(a.id + 1) {
            let dx = b.x - a.x;
            let dy = b.y - a.y;
            let d2 = dx * dx + dy * dy;
            let d = d2.sqrt();
            if d > 2.0 * r || d == 0.0 {
                continue;
            }
            let mx = (a.x + b.x) / 2.0;
            let my = (a.y + b.y) / 2.0;
            push(mx, my);
            let half = (r * r - d2 / 4.0).max(0.0).sqrt();
            push(mx + half * (-dy / d), my + half * (dx / d));
            push(mx - half * (-dy / d), my - half * (dx / d));
        }
    }
    // Fine lattice restricted to cells within reach of some node.
    let step = r / 2.0;
    let cols = (scenario.region.width / step).ceil() as usize + 1;
    let rows = (scenario.region.height / step).ceil() as usize + 1;
    for gy in 0..rows {
        for gx in 0..cols {
            let x = (gx as f64 * step).min(scenario.region.width);
            let y = (gy as f64 * step).min(scenario.region.height);
            let near = scenario.nodes.iter().any(|node| {
                let dx = node.x - x;
                let dy = node.y - y;
                dx * dx + dy * dy <= r * r
            });
            if near {
                candidates.push(HoverPoint::new(x, y));
            }
        }
    }
    candidates
}
