//! Lloyd-style k-means over the sensor coordinates, used to seed and
//! refresh hover positions.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::HoverPoint;
use crate::scenario::Scenario;

const MAX_LLOYD_ITERS: usize = 100;

/// Cluster the sensor positions into `k` groups and return the cluster
/// centers as hover points. Centers are clamped to the region; empty
/// clusters are reseeded at the node farthest from its current center.
pub fn kmeans_hover(scenario: &Scenario, k: usize, seed: u64) -> Result<Vec<HoverPoint>> {
    let n = scenario.nodes.len();
    if k < 2 || k > n {
        return Err(Error::Contract(format!(
            "cluster count must satisfy 2 <= k <= {n}, got {k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(lloyd(scenario, k, &mut rng, None))
}

/// Solver-internal entry point sharing the caller's RNG stream. `k` must
/// already satisfy 2 <= k <= n.
pub(crate) fn kmeans_hover_rng(
    scenario: &Scenario,
    k: usize,
    rng: &mut impl Rng,
) -> Vec<HoverPoint> {
    lloyd(scenario, k, rng, None)
}

fn lloyd(
    scenario: &Scenario,
    k: usize,
    rng: &mut impl Rng,
    mut sse_trace: Option<&mut Vec<f64>>,
) -> Vec<HoverPoint> {
    let nodes = &scenario.nodes;
    let n = nodes.len();
    debug_assert!(k >= 1 && k <= n);

    if k == n {
        // Zero within-cluster variance: every node its own center.
        return nodes.iter().map(|s| HoverPoint::new(s.x, s.y)).collect();
    }

    // D²-weighted seeding: each new seed is drawn with probability
    // proportional to the squared distance from the already chosen seeds,
    // so nodes sitting next to a seed stay unseeded and end up merged.
    let mut centers: Vec<HoverPoint> = Vec::with_capacity(k);
    let first = rng.gen_range(0..n);
    centers.push(HoverPoint::new(nodes[first].x, nodes[first].y));
    let mut d2 = vec![0.0f64; n];
    for (i, node) in nodes.iter().enumerate() {
        let dx = node.x - centers[0].x;
        let dy = node.y - centers[0].y;
        d2[i] = dx * dx + dy * dy;
    }
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total <= 0.0 {
            // All remaining nodes coincide with seeds; any unseeded node (or
            // node 0) keeps the center count intact.
            d2.iter().position(|&d| d > 0.0).unwrap_or(0)
        } else {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                target -= w;
                if target <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        };
        let center = HoverPoint::new(nodes[next].x, nodes[next].y);
        for (i, node) in nodes.iter().enumerate() {
            let dx = node.x - center.x;
            let dy = node.y - center.y;
            d2[i] = d2[i].min(dx * dx + dy * dy);
        }
        centers.push(center);
    }

    let mut assign = vec![usize::MAX; n];
    let mut counts = vec![0usize; k];

    for _ in 0..MAX_LLOYD_ITERS {
        // Assignment step; ties go to the lower center index.
        let mut changed = false;
        for (i, node) in nodes.iter().enumerate() {
            let mut best = 0usize;
            let mut best_d2 = f64::INFINITY;
            for (c, center) in centers.iter().enumerate() {
                let dx = node.x - center.x;
                let dy = node.y - center.y;
                let d2 = dx * dx + dy * dy;
                if d2 < best_d2 {
                    best_d2 = d2;
                    best = c;
                }
            }
            if assign[i] != best {
                assign[i] = best;
                changed = true;
            }
        }

        counts.iter_mut().for_each(|c| *c = 0);
        for &a in &assign {
            counts[a] += 1;
        }

        // Reseed each empty cluster at the node farthest from its current
        // center, skipping nodes whose own cluster would become empty.
        for empty in 0..k {
            if counts[empty] > 0 {
                continue;
            }
            let mut victim = usize::MAX;
            let mut victim_d2 = -1.0;
            for (i, node) in nodes.iter().enumerate() {
                if counts[assign[i]] < 2 {
                    continue;
                }
                let c = &centers[assign[i]];
                let dx = node.x - c.x;
                let dy = node.y - c.y;
                let d2 = dx * dx + dy * dy;
                if d2 > victim_d2 {
                    victim_d2 = d2;
                    victim = i;
                }
            }
            debug_assert!(victim != usize::MAX, "some cluster has >= 2 members when k <= n");
            centers[empty] = HoverPoint::new(nodes[victim].x, nodes[victim].y);
            counts[assign[victim]] -= 1;
            assign[victim] = empty;
            counts[empty] = 1;
            changed = true;
        }

        if let Some(trace) = sse_trace.as_deref_mut() {
            trace.push(sse(nodes, &centers, &assign));
        }

        if !changed {
            break;
        }

        // Update step: move each center to its cluster centroid.
        let mut sums = vec![(0.0f64, 0.0f64); k];
        for (i, node) in nodes.iter().enumerate() {
            sums[assign[i]].0 += node.x;
            sums[assign[i]].1 += node.y;
        }
        for c in 0..k {
            let (sx, sy) = sums[c];
            let m = counts[c] as f64;
            let (x, y) = scenario.region.clamp(sx / m, sy / m);
            centers[c] = HoverPoint::new(x, y);
        }
    }

    centers
}

fn sse(nodes: &[crate::scenario::SensorNode], centers: &[HoverPoint], assign: &[usize]) -> f64 {
    nodes
        .iter()
        .zip(assign)
        .map(|(node, &a)| {
            let dx = node.x - centers[a].x;
            let dy = node.y - centers[a].y;
            dx * dx + dy * dy
        })
        .sum()
}
