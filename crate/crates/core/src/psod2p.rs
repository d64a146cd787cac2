//! Discrete particle swarm for the visiting-tour problem.
//!
//! Positions are visiting orders over the hover points; velocities are
//! ordered lists of position swaps. Moving a particle applies its swap list;
//! the difference of two tours is the shortest swap list transforming one
//! into the other. Every 20th iteration each particle additionally runs a
//! 2-opt sweep and an edge-uncrossing pass.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{segments_intersect, HoverPoint, Segment};
use crate::objective::closed_tour_length;

/// A visiting order over hover points 0..k-1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tour {
    pub order: Vec<usize>,
}

impl Tour {
    /// Validates that `order` is exactly a permutation of 0..len-1.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let k = order.len();
        if k == 0 {
            return Err(Error::Contract("a tour needs at least one stop".into()));
        }
        let mut seen = vec![false; k];
        for &i in &order {
            if i >= k || seen[i] {
                return Err(Error::Contract(format!(
                    "order is not a permutation of 0..{k}: offending index {i}"
                )));
            }
            seen[i] = true;
        }
        Ok(Tour { order })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn random(k: usize, rng: &mut impl Rng) -> Self {
        let mut order: Vec<usize> = (0..k).collect();
        order.shuffle(rng);
        Tour { order }
    }

    pub fn save(&self, path: impl AsRef<Path>, length_m: f64) -> Result<()> {
        let file = TourFile { order: self.order.clone(), length_m };
        fs::write(path, serde_json::to_string_pretty(&file).expect("tour serialization"))?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        let file: TourFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        Tour::new(file.order)
    }
}

#[derive(Serialize, Deserialize)]
struct TourFile {
    order: Vec<usize>,
    length_m: f64,
}

/// An ordered list of position swaps: applying the pairs left to right to a
/// tour's order yields a new tour. Pairs name positions in the sequence,
/// not point ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SwapVelocity {
    pub pairs: Vec<(usize, usize)>,
}

impl SwapVelocity {
    pub fn empty() -> Self {
        SwapVelocity { pairs: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Applies the swaps of `v` to `tour`, left to right.
pub fn apply_velocity(tour: &Tour, v: &SwapVelocity) -> Result<Tour> {
    let k = tour.len();
    let mut order = tour.order.clone();
    for &(a, b) in &v.pairs {
        if a >= k || b >= k {
            return Err(Error::Contract(format!(
                "swap ({a}, {b}) out of range for a {k}-stop tour"
            )));
        }
        order.swap(a, b);
    }
    Ok(Tour { order })
}

/// The shortest swap list turning `from` into `to`: its length equals k
/// minus the number of cycles of the relating permutation.
pub fn simplest_velocity(from: &Tour, to: &Tour) -> Result<SwapVelocity> {
    if from.len() != to.len() {
        return Err(Error::Contract(format!(
            "tour lengths differ: {} vs {}",
            from.len(),
            to.len()
        )));
    }
    let k = from.len();
    let mut current = from.order.clone();
    let mut pos = vec![0usize; k];
    for (p, &id) in current.iter().enumerate() {
        pos[id] = p;
    }
    let mut pairs = Vec::new();
    for p in 0..k {
        let want = to.order[p];
        if current[p] != want {
            let q = pos[want];
            pairs.push((p, q));
            pos[current[p]] = q;
            pos[want] = p;
            current.swap(p, q);
        }
    }
    Ok(SwapVelocity { pairs })
}

/// Concatenates the components in order, keeping each swap independently
/// with its component's retention probability.
pub fn merge_velocities(
    parts: &[(f64, &SwapVelocity)],
    rng: &mut impl Rng,
) -> SwapVelocity {
    let mut pairs = Vec::new();
    for (prob, v) in parts {
        for &pair in &v.pairs {
            if rng.gen::<f64>() < *prob {
                pairs.push(pair);
            }
        }
    }
    SwapVelocity { pairs }
}

/// One sweep of 2-opt: for every edge pair (j, j+1), (h, h+1) of the open
/// sequence, if reconnecting as (j, h), (j+1, h+1) is shorter, the
/// subsequence j+1..=h is reversed. Never increases the tour length.
pub fn two_opt(tour: &Tour, points: &[HoverPoint]) -> Tour {
    let mut order = tour.order.clone();
    let n = order.len();
    if n < 4 {
        return Tour { order };
    }
    let d = |a: usize, b: usize| points[a].planar_dist(&points[b]);
    for j in 0..n - 3 {
        for h in (j + 2)..n - 1 {
            let removed = d(order[j], order[j + 1]) + d(order[h], order[h + 1]);
            let added = d(order[j], order[h]) + d(order[j + 1], order[h + 1]);
            if removed > added {
                order[j + 1..=h].reverse();
            }
        }
    }
    Tour { order }
}

/// Removes crossing edge pairs: whenever two non-adjacent edges of the
/// closed tour intersect, the enclosed subsequence is reversed and the scan
/// restarts. Repeats until a full pass finds nothing to fix, so the result
/// carries no crossing pair on inputs in general position. Each reversal
/// strictly shortens the tour, which bounds the loop.
pub fn uncross(tour: &Tour, points: &[HoverPoint]) -> Tour {
    let mut order = tour.order.clone();
    let n = order.len();
    if n < 4 {
        return Tour { order };
    }
    let d = |a: usize, b: usize| points[a].planar_dist(&points[b]);
    loop {
        let mut changed = false;
        for j in 0..n - 2 {
            let mut h = j + 2;
            while h <= n - 1 {
                let ja = order[j];
                let jb = order[j + 1];
                let ha = order[h];
                let hb = order[(h + 1) % n];
                let pj = Segment::new(points[ja], points[jb]);
                let ph = Segment::new(points[ha], points[hb]);
                if segments_intersect(&pj, &ph) {
                    let delta = d(ja, ha) + d(jb, hb) - d(ja, jb) - d(ha, hb);
                    if delta < 0.0 {
                        order[j + 1..=h].reverse();
                        changed = true;
                        h = j + 2;
                        continue;
                    }
                }
                h += 1;
            }
        }
        if !changed {
            return Tour { order };
        }
    }
}

/// How the cognitive/social retention probabilities of the velocity merge
/// are formed from the learning factors c1, c2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RetentionMode {
    /// Retain with probability c·r, r drawn uniformly per particle per
    /// iteration.
    ScaledUniform,
    /// Retain with the fixed probability c.
    Fixed,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct Psod2pParams {
    pub population: usize,
    pub iters: usize,
    pub c1: f64,
    pub c2: f64,
    pub w: f64,
    pub local_search_period: usize,
    pub retention: RetentionMode,
}

impl Default for Psod2pParams {
    fn default() -> Self {
        Psod2pParams {
            population: 20,
            iters: 200,
            c1: 0.8,
            c2: 0.8,
            w: 1.0,
            local_search_period: 20,
            retention: RetentionMode::ScaledUniform,
        }
    }
}

impl Psod2pParams {
    pub fn validate(&self) -> Result<()> {
        if self.population == 0 || self.iters == 0 || self.local_search_period == 0 {
            return Err(Error::Config(
                "population, iters and local_search_period must be positive".into(),
            ));
        }
        for (name, v) in [("c1", self.c1), ("c2", self.c2), ("w", self.w)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!(
                    "{name} is a retention probability and must lie in [0, 1], got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CtopTracePoint {
    pub iter: usize,
    pub best_length: f64,
}

#[derive(Debug, Clone)]
pub struct Psod2pOutcome {
    pub tour: Tour,
    pub length: f64,
    pub trace: Vec<CtopTracePoint>,
}

struct TourParticle {
    order: Vec<usize>,
    length: f64,
    velocity: SwapVelocity,
    pbest_order: Vec<usize>,
    pbest_length: f64,
}

/// Runs the tour swarm over `points`. Deterministic for a fixed seed; the
/// best length of the trace never increases.
pub fn run(points: &[HoverPoint], params: &Psod2pParams, seed: u64) -> Result<Psod2pOutcome> {
    params.validate()?;
    let k = points.len();
    if k < 2 {
        return Err(Error::Contract(format!(
            "tour optimization needs at least 2 points, got {k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len_of = |order: &[usize]| closed_tour_length(order, points);

    let mut swarm: Vec<TourParticle> = (0..params.population)
        .map(|_| {
            let tour = Tour::random(k, &mut rng);
            let length = len_of(&tour.order);
            TourParticle {
                pbest_order: tour.order.clone(),
                pbest_length: length,
                order: tour.order,
                length,
                velocity: SwapVelocity::empty(),
            }
        })
        .collect();

    let best = swarm
        .iter()
        .min_by(|a, b| a.pbest_length.total_cmp(&b.pbest_length))
        .expect("population is non-empty");
    let mut gbest_order = best.pbest_order.clone();
    let mut gbest_length = best.pbest_length;

    let mut trace = Vec::with_capacity(params.iters);
    for it in 1..=params.iters {
        let local_search = it % params.local_search_period == 0;
        for m in 0..swarm.len() {
            let (p1, p2) = match params.retention {
                RetentionMode::ScaledUniform => (
                    params.c1 * rng.gen::<f64>(),
                    params.c2 * rng.gen::<f64>(),
                ),
                RetentionMode::Fixed => (params.c1, params.c2),
            };
            let particle = &mut swarm[m];
            let current = Tour { order: particle.order.clone() };
            let to_pbest = simplest_velocity(
                &current,
                &Tour { order: particle.pbest_order.clone() },
            )?;
            let to_gbest =
                simplest_velocity(&current, &Tour { order: gbest_order.clone() })?;
            let merged = merge_velocities(
                &[(params.w, &particle.velocity), (p1, &to_pbest), (p2, &to_gbest)],
                &mut rng,
            );
            let mut moved = apply_velocity(&current, &merged)?;
            let mut length = len_of(&moved.order);

            if local_search {
                // Sweeps repeat until no reconnection improves, then the
                // crossing cleanup runs; both accept greedily.
                loop {
                    let improved = two_opt(&moved, points);
                    let improved_len = len_of(&improved.order);
                    if improved_len < length - 1e-9 {
                        moved = improved;
                        length = improved_len;
                    } else {
                        break;
                    }
                }
                let straightened = uncross(&moved, points);
                let straightened_len = len_of(&straightened.order);
                debug_assert!(straightened_len <= length + 1e-9);
                moved = straightened;
                length = straightened_len;
            }

            particle.order = moved.order;
            particle.length = length;
            if particle.length < particle.pbest_length {
                particle.pbest_order = particle.order.clone();
                particle.pbest_length = particle.length;
            }
            if particle.pbest_length < gbest_length {
                gbest_order = particle.pbest_order.clone();
                gbest_length = particle.pbest_length;
            }
            particle.velocity =
                simplest_velocity(&current, &Tour { order: particle.order.clone() })?;
        }
        trace.push(CtopTracePoint { iter: it, best_length: gbest_length });
    }

    Ok(Psod2pOutcome {
        tour: Tour { order: gbest_order },
        length: gbest_length,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::test_rng;
    use std::collections::{HashMap, VecDeque};

    fn tour(order: &[usize]) -> Tour {
        Tour::new(order.to_vec()).unwrap()
    }

    #[test]
    fn apply_single_swap_matches_worked_example() {
        // (q1, q2, qi, qj, qt) with a swap of the positions holding qi, qj.
        let q = tour(&[0, 1, 2, 3, 4]);
        let v = SwapVelocity { pairs: vec![(2, 3)] };
        assert_eq!(apply_velocity(&q, &v).unwrap().order, vec![0, 1, 3, 2, 4]);
    }

    #[test]
    fn empty_velocity_is_identity_and_swap_is_involution() {
        let q = tour(&[3, 1, 0, 2]);
        assert_eq!(apply_velocity(&q, &SwapVelocity::empty()).unwrap(), q);
        let v = SwapVelocity { pairs: vec![(0, 2), (0, 2)] };
        assert_eq!(apply_velocity(&q, &v).unwrap(), q);
    }

    #[test]
    fn apply_rejects_out_of_range() {
        let q = tour(&[0, 1, 2]);
        let v = SwapVelocity { pairs: vec![(0, 3)] };
        assert!(matches!(apply_velocity(&q, &v), Err(Error::Contract(_))));
    }

    #[test]
    fn simplest_velocity_of_identity_is_empty() {
        let q = tour(&[4, 2, 0, 1, 3]);
        assert!(simplest_velocity(&q, &q).unwrap().is_empty());
    }

    #[test]
    fn single_transposition_gives_one_pair() {
        let a = tour(&[0, 1, 2, 3]);
        let b = tour(&[0, 3, 2, 1]);
        let v = simplest_velocity(&a, &b).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(apply_velocity(&a, &v).unwrap(), b);
    }

    #[test]
    fn length_mismatch_rejected() {
        let a = tour(&[0, 1, 2]);
        let b = tour(&[0, 1]);
        assert!(matches!(simplest_velocity(&a, &b), Err(Error::Contract(_))));
    }

    fn cycle_count(from: &[usize], to: &[usize]) -> usize {
        // Cycles of the permutation sending each position's occupant in
        // `from` to the position it needs in `to`.
        let k = from.len();
        let mut pos_in_to = vec![0usize; k];
        for (p, &id) in to.iter().enumerate() {
            pos_in_to[id] = p;
        }
        let perm: Vec<usize> = (0..k).map(|p| pos_in_to[from[p]]).collect();
        let mut seen = vec![false; k];
        let mut cycles = 0;
        for start in 0..k {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                p = perm[p];
            }
        }
        cycles
    }

    #[test]
    fn simplest_velocity_length_is_k_minus_cycles() {
        use rand::Rng;
        let mut rng = test_rng(31);
        for _ in 0..500 {
            let k = rng.gen_range(2..12usize);
            let a = Tour::random(k, &mut rng);
            let b = Tour::random(k, &mut rng);
            let v = simplest_velocity(&a, &b).unwrap();
            assert_eq!(apply_velocity(&a, &v).unwrap(), b);
            assert_eq!(v.len(), k - cycle_count(&a.order, &b.order));
            assert!(v.len() <= k.saturating_sub(1));
        }
    }

    /// Breadth-first search over single swaps: the true minimum number of
    /// transpositions from one order to another.
    fn bfs_swap_distance(from: &[usize], to: &[usize]) -> usize {
        let mut dist: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        dist.insert(from.to_vec(), 0);
        queue.push_back(from.to_vec());
        while let Some(state) = queue.pop_front() {
            let d = dist[&state];
            if state == to {
                return d;
            }
            for i in 0..state.len() {
                for j in (i + 1)..state.len() {
                    let mut next = state.clone();
                    next.swap(i, j);
                    if !dist.contains_key(&next) {
                        dist.insert(next.clone(), d + 1);
                        queue.push_back(next);
                    }
                }
            }
        }
        unreachable!("swap graph is connected");
    }

    #[test]
    fn simplest_velocity_matches_bfs_oracle() {
        use rand::Rng;
        let mut rng = test_rng(37);
        for _ in 0..60 {
            let k = rng.gen_range(2..8usize);
            let a = Tour::random(k, &mut rng);
            let b = Tour::random(k, &mut rng);
            let v = simplest_velocity(&a, &b).unwrap();
            assert_eq!(v.len(), bfs_swap_distance(&a.order, &b.order));
        }
    }

    #[test]
    fn merge_extremes() {
        let mut rng = test_rng(41);
        let v1 = SwapVelocity { pairs: vec![(0, 1), (2, 3)] };
        let v2 = SwapVelocity { pairs: vec![(1, 2)] };
        let all = merge_velocities(&[(1.0, &v1), (1.0, &v2)], &mut rng);
        assert_eq!(all.pairs, vec![(0, 1), (2, 3), (1, 2)]);
        let none = merge_velocities(&[(0.0, &v1), (0.0, &v2)], &mut rng);
        assert!(none.is_empty());
    }

    #[test]
    fn merge_retention_statistics() {
        let mut rng = test_rng(43);
        let v = SwapVelocity { pairs: vec![(0, 1)] };
        let prob = 0.3;
        let trials = 100_000;
        let mut kept = 0usize;
        for _ in 0..trials {
            kept += merge_velocities(&[(prob, &v)], &mut rng).len();
        }
        let expected = prob * trials as f64;
        let sigma = (trials as f64 * prob * (1.0 - prob)).sqrt();
        assert!(
            (kept as f64 - expected).abs() < 3.0 * sigma,
            "kept {kept} of {trials}, expected {expected} ± {sigma:.1}"
        );
    }

    fn pts(coords: &[(f64, f64)]) -> Vec<HoverPoint> {
        coords.iter().map(|&(x, y)| HoverPoint::new(x, y)).collect()
    }

    #[test]
    fn two_opt_fixes_single_crossing() {
        // Visiting order a, b, c, d, e where edges b→c and d→e cross; the
        // sweep reconnects them by swapping c and d in the order.
        let points = pts(&[(0.0, 0.0), (4.0, 0.0), (5.2, 5.0), (5.0, 4.0), (1.0, 4.0)]);
        let t = tour(&[0, 1, 2, 3, 4]);
        let improved = two_opt(&t, &points);
        assert_eq!(improved.order, vec![0, 1, 3, 2, 4]);
        assert!(
            closed_tour_length(&improved.order, &points)
                < closed_tour_length(&t.order, &points)
        );
    }

    #[test]
    fn two_opt_leaves_convex_tour_alone() {
        // Convex position, visited in hull order: already 2-opt optimal.
        let points = pts(&[
            (0.0, 0.0),
            (4.0, 0.0),
            (6.0, 3.0),
            (4.0, 6.0),
            (0.0, 6.0),
            (-2.0, 3.0),
        ]);
        let t = tour(&[0, 1, 2, 3, 4, 5]);
        assert_eq!(two_opt(&t, &points).order, t.order);
    }

    #[test]
    fn two_opt_noop_for_triangles() {
        let points = pts(&[(0.0, 0.0), (5.0, 0.0), (0.0, 5.0)]);
        let t = tour(&[2, 0, 1]);
        assert_eq!(two_opt(&t, &points).order, t.order);
    }

    #[test]
    fn uncross_removes_x_crossing() {
        let points = pts(&[(0.0, 0.0), (2.0, 2.0), (2.0, 0.0), (0.0, 2.0)]);
        let t = tour(&[0, 1, 2, 3]);
        let fixed = uncross(&t, &points);
        let before = closed_tour_length(&t.order, &points);
        let after = closed_tour_length(&fixed.order, &points);
        assert!(after < before);
        assert!(!has_crossing(&fixed.order, &points));
    }

    #[test]
    fn uncross_keeps_clean_tour() {
        let points = pts(&[(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)]);
        let t = tour(&[0, 1, 2, 3]);
        assert_eq!(uncross(&t, &points).order, t.order);
    }

    pub(crate) fn has_crossing(order: &[usize], points: &[HoverPoint]) -> bool {
        let n = order.len();
        for i in 0..n {
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue; // cyclically adjacent
                }
                let a = Segment::new(points[order[i]], points[order[(i + 1) % n]]);
                let b = Segment::new(points[order[j]], points[order[(j + 1) % n]]);
                if segments_intersect(&a, &b) {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn local_search_never_lengthens_random_tours() {
        use rand::Rng;
        let mut rng = test_rng(47);
        for _ in 0..200 {
            let k = rng.gen_range(4..25usize);
            let points: Vec<HoverPoint> = (0..k)
                .map(|_| HoverPoint::new(rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)))
                .collect();
            let t = Tour::random(k, &mut rng);
            let base = closed_tour_length(&t.order, &points);
            let after_2opt = two_opt(&t, &points);
            assert!(closed_tour_length(&after_2opt.order, &points) <= base + 1e-9);
            let after_uncross = uncross(&t, &points);
            assert!(closed_tour_length(&after_uncross.order, &points) <= base + 1e-9);
            assert!(!has_crossing(&after_uncross.order, &points));
        }
    }

    #[test]
    fn run_is_deterministic_and_monotone() {
        use rand::Rng;
        let mut rng = test_rng(53);
        let points: Vec<HoverPoint> = (0..15)
            .map(|_| HoverPoint::new(rng.gen_range(0.0..200.0), rng.gen_range(0.0..200.0)))
            .collect();
        let params = Psod2pParams { iters: 60, ..Default::default() };
        let a = run(&points, &params, 99).unwrap();
        let b = run(&points, &params, 99).unwrap();
        assert_eq!(a.tour, b.tour);
        assert_eq!(a.length, b.length);
        assert_eq!(a.trace, b.trace);
        for w in a.trace.windows(2) {
            assert!(w[1].best_length <= w[0].best_length);
        }
        assert_eq!(a.trace.len(), 60);
    }

    #[test]
    fn run_two_points_is_immediate() {
        let points = pts(&[(0.0, 0.0), (30.0, 40.0)]);
        let params = Psod2pParams { iters: 5, ..Default::default() };
        let out = run(&points, &params, 1).unwrap();
        assert!((out.length - 100.0).abs() < 1e-12);
    }

    #[test]
    fn run_rejects_single_point() {
        let points = pts(&[(0.0, 0.0)]);
        assert!(run(&points, &Psod2pParams::default(), 1).is_err());
    }

    #[test]
    fn every_update_preserves_permutations() {
        use rand::Rng;
        let mut rng = test_rng(59);
        for _ in 0..100 {
            let k = rng.gen_range(2..10usize);
            let a = Tour::random(k, &mut rng);
            let b = Tour::random(k, &mut rng);
            let v = simplest_velocity(&a, &b).unwrap();
            let moved = apply_velocity(&a, &v).unwrap();
            assert!(Tour::new(moved.order).is_ok());
        }
    }
}
