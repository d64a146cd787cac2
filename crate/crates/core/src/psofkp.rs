//! Particle swarm for the hover-point cover problem.
//!
//! Each particle carries a variable number of hover points k alongside its
//! coordinate vector. Vectors are padded with random auxiliary coordinates
//! up to the swarm-wide maximum dimension so that the standard velocity
//! update applies; only the first 2k entries enter the objective. A
//! punish-compensate step nudges each particle's k toward (or away from)
//! the global best's k depending on whether the particle currently charges
//! every node, and a periodic k-means refresh injects cluster-center
//! candidates that compete 1:1 with the moved particles. Selection is
//! feasibility-first: plans that charge all nodes always beat plans that
//! do not.

use std::cmp::Ordering;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::HoverPoint;
use crate::kmeans::kmeans_hover_rng;
use crate::objective::{
    compare_feasibility_first, CoverageEval, CsopWeights, HoverPlan, ObjectiveValue,
};
use crate::scenario::{Region, Scenario};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct PsofkpParams {
    pub population: usize,
    pub iters: usize,
    pub c1: f64,
    pub c2: f64,
    pub w: f64,
    /// Probability of applying the punish-compensate step to a particle in
    /// a given iteration.
    pub rho_pc: f64,
    /// Generate the k-means candidate every this many iterations. The
    /// per-iteration default is what drives k down to the cover frontier;
    /// larger periods starve the search and leave k near its start value.
    #[serde(alias = "kt")]
    pub kmeans_period: usize,
    /// Draw one r1/r2 pair per particle instead of per dimension.
    pub scalar_r: bool,
}

impl Default for PsofkpParams {
    fn default() -> Self {
        PsofkpParams {
            population: 20,
            iters: 200,
            c1: 2.0,
            c2: 2.0,
            w: 0.73,
            rho_pc: 0.5,
            kmeans_period: 1,
            scalar_r: false,
        }
    }
}

impl PsofkpParams {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::Config(format!(
                "population must be at least 2, got {}",
                self.population
            )));
        }
        if self.iters == 0 || self.kmeans_period == 0 {
            return Err(Error::Config(
                "iters and kmeans_period must be positive".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.rho_pc) {
            return Err(Error::Config(format!(
                "rho_pc is a probability and must lie in [0, 1], got {}",
                self.rho_pc
            )));
        }
        Ok(())
    }
}

/// Per-iteration k adjustment: decrement by max(1, round(n/100)) so the
/// step stays a positive integer on small instances.
pub fn k_step(n: usize) -> usize {
    (((n as f64) / 100.0).round() as usize).max(1)
}

/// A remembered best position: the hover count, the full padded coordinate
/// vector, and its objective.
#[derive(Debug, Clone)]
pub struct BestSnapshot {
    pub k: usize,
    pub coords: Vec<f64>,
    pub objective: ObjectiveValue,
}

/// One swarm member. `coords` and `velocity` share the swarm-wide padded
/// length 2·k_max; the objective only ever reads the first 2k entries.
#[derive(Debug, Clone)]
pub struct FlexParticle {
    pub k: usize,
    pub coords: Vec<f64>,
    pub velocity: Vec<f64>,
    pub objective: ObjectiveValue,
    pub pbest: BestSnapshot,
}

/// Punish-compensate update of a particle's hover count.
///
/// With probability `rho_pc`: a particle that currently charges every node
/// shrinks its k (or adopts the global best's k if its personal best is
/// already below it); a particle that does not charge every node grows its
/// k (or adopts the global best's k if its personal best is already above
/// it). Guards bounce k off the [2, n] boundaries.
pub fn punish_compensate(
    particle: &FlexParticle,
    gbest_k: usize,
    feasible: bool,
    n: usize,
    k_step: usize,
    rho_pc: f64,
    rng: &mut impl Rng,
) -> usize {
    if rng.gen::<f64>() >= rho_pc {
        return particle.k;
    }
    let step = k_step as i64;
    let mut k = particle.k as i64;
    if feasible {
        if particle.pbest.k >= gbest_k {
            k -= step;
        } else {
            k = gbest_k as i64;
        }
        if k <= 1 {
            k += step;
        }
    } else {
        if particle.pbest.k <= gbest_k {
            k += step;
        } else {
            k = gbest_k as i64;
        }
        if k >= n as i64 {
            k -= step;
        }
    }
    k.clamp(2, n as i64) as usize
}

/// Pads every particle (coordinates, velocity, personal best) to the
/// swarm-wide maximum dimension: 2·k_max, or the longest existing vector if
/// an earlier, larger k left one behind (vectors never shrink). New
/// coordinate entries are drawn uniformly from the region and do not affect
/// any objective value; new velocity entries are zero. Idempotent while
/// k_max is unchanged.
pub fn pad_dimensions(population: &mut [FlexParticle], region: &Region, rng: &mut impl Rng) {
    let k_max = population.iter().map(|p| p.k).max().unwrap_or(0);
    let dim = population
        .iter()
        .map(|p| p.coords.len())
        .fold(2 * k_max, usize::max);
    for particle in population.iter_mut() {
        pad_coords(&mut particle.coords, dim, region, rng);
        particle.velocity.resize(dim, 0.0);
        pad_coords(&mut particle.pbest.coords, dim, region, rng);
    }
}

fn pad_coords(coords: &mut Vec<f64>, dim: usize, region: &Region, rng: &mut impl Rng) {
    debug_assert!(coords.len() % 2 == 0);
    while coords.len() < dim {
        coords.push(rng.gen_range(0.0..=region.width));
        coords.push(rng.gen_range(0.0..=region.height));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CsopTracePoint {
    pub iter: usize,
    pub best_value: f64,
    pub best_k: usize,
    pub feasible: bool,
}

#[derive(Debug, Clone)]
pub struct PsofkpOutcome {
    pub plan: HoverPlan,
    pub objective: ObjectiveValue,
    pub trace: Vec<CsopTracePoint>,
}

/// Runs the cover swarm on `scenario`. Deterministic for a fixed seed; the
/// traced best objective never worsens under the feasibility-first order.
pub fn run(scenario: &Scenario, params: &PsofkpParams, seed: u64) -> Result<PsofkpOutcome> {
    params.validate()?;
    let n = scenario.nodes.len();
    if n < 2 {
        return Err(Error::Contract(format!(
            "cover optimization needs at least 2 nodes (k ranges over [2, n]), got {n}"
        )));
    }
    let eval = CoverageEval::new(scenario);
    let weights = CsopWeights::default();
    let region = scenario.region;
    let step = k_step(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Seed every particle from a k-means clustering at a random k.
    let mut swarm: Vec<FlexParticle> = (0..params.population)
        .map(|_| {
            let k = rng.gen_range(2..=n);
            let coords = flatten(&kmeans_hover_rng(scenario, k, &mut rng));
            let objective = eval.csop_value_xy(&coords, &weights);
            FlexParticle {
                k,
                velocity: vec![0.0; coords.len()],
                pbest: BestSnapshot { k, coords: coords.clone(), objective },
                coords,
                objective,
            }
        })
        .collect();
    pad_dimensions(&mut swarm, &region, &mut rng);

    let mut gbest = swarm
        .iter()
        .map(|p| &p.pbest)
        .min_by(|a, b| compare_feasibility_first(&a.objective, &b.objective))
        .expect("population is non-empty")
        .clone();

    let mut trace = Vec::with_capacity(params.iters);
    for it in 1..=params.iters {
        let refresh = it % params.kmeans_period == 0;

        for m in 0..swarm.len() {
            let new_k = punish_compensate(
                &swarm[m],
                gbest.k,
                swarm[m].objective.feasible,
                n,
                step,
                params.rho_pc,
                &mut rng,
            );
            swarm[m].k = new_k;
        }
        pad_dimensions(&mut swarm, &region, &mut rng);
        let dim = swarm[0].coords.len();
        pad_coords(&mut gbest.coords, dim, &region, &mut rng);

        for particle in swarm.iter_mut() {
            // Fresh cluster-center candidate at the particle's current k.
            let injected = if refresh {
                let coords = flatten(&kmeans_hover_rng(scenario, particle.k, &mut rng));
                let objective = eval.csop_value_xy(&coords, &weights);
                Some((coords, objective))
            } else {
                None
            };

            let (r1_fixed, r2_fixed) = if params.scalar_r {
                (rng.gen::<f64>(), rng.gen::<f64>())
            } else {
                (0.0, 0.0)
            };
            for d in 0..dim {
                let (r1, r2) = if params.scalar_r {
                    (r1_fixed, r2_fixed)
                } else {
                    (rng.gen::<f64>(), rng.gen::<f64>())
                };
                let v = params.w * particle.velocity[d]
                    + params.c1 * r1 * (particle.pbest.coords[d] - particle.coords[d])
                    + params.c2 * r2 * (gbest.coords[d] - particle.coords[d]);
                particle.velocity[d] = v;
                let bound = if d % 2 == 0 { region.width } else { region.height };
                particle.coords[d] = (particle.coords[d] + v).clamp(0.0, bound);
            }
            particle.objective = eval.csop_value_xy(&particle.coords[..2 * particle.k], &weights);

            // Keep the better of the moved particle and the injected
            // candidate, so the population size stays fixed.
            if let Some((coords, objective)) = injected {
                if compare_feasibility_first(&objective, &particle.objective) == Ordering::Less {
                    particle.coords[..coords.len()].copy_from_slice(&coords);
                    particle.objective = objective;
                }
            }
        }

        // Synchronous memory update after the whole swarm has moved.
        for particle in swarm.iter_mut() {
            if compare_feasibility_first(&particle.objective, &particle.pbest.objective)
                == Ordering::Less
            {
                particle.pbest = BestSnapshot {
                    k: particle.k,
                    coords: particle.coords.clone(),
                    objective: particle.objective,
                };
            }
            if compare_feasibility_first(&particle.pbest.objective, &gbest.objective)
                == Ordering::Less
            {
                gbest = particle.pbest.clone();
            }
        }

        trace.push(CsopTracePoint {
            iter: it,
            best_value: gbest.objective.value,
            best_k: gbest.k,
            feasible: gbest.objective.feasible,
        });
    }

    let points: Vec<HoverPoint> = gbest.coords[..2 * gbest.k]
        .chunks_exact(2)
        .map(|c| HoverPoint::new(c[0], c[1]))
        .collect();
    let plan = HoverPlan::new(points)?;
    debug_assert!(plan.validate_in_region(scenario).is_ok());
    Ok(PsofkpOutcome { plan, objective: gbest.objective, trace })
}

fn flatten(points: &[HoverPoint]) -> Vec<f64> {
    let mut coords = Vec::with_capacity(points.len() * 2);
    for p in points {
        coords.push(p.x);
        coords.push(p.y);
    }
    coords
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{test_rng, SensorNode};

    fn particle(k: usize, pbest_k: usize) -> FlexParticle {
        let obj = ObjectiveValue::new(true, k as f64);
        FlexParticle {
            k,
            coords: vec![0.0; 2 * k],
            velocity: vec![0.0; 2 * k],
            objective: obj,
            pbest: BestSnapshot { k: pbest_k, coords: vec![0.0; 2 * pbest_k], objective: obj },
        }
    }

    #[test]
    fn k_step_rounds_and_floors_at_one() {
        assert_eq!(k_step(100), 1);
        assert_eq!(k_step(500), 5);
        assert_eq!(k_step(1000), 10);
        assert_eq!(k_step(5), 1);
        assert_eq!(k_step(249), 2);
    }

    #[test]
    fn punishment_shrinks_k_when_feasible() {
        let mut rng = test_rng(1);
        let p = particle(90, 90);
        // rho = 1 so the gate always passes.
        let k = punish_compensate(&p, 87, true, 100, 1, 1.0, &mut rng);
        assert_eq!(k, 89);
    }

    #[test]
    fn feasible_below_gbest_adopts_gbest_k() {
        let mut rng = test_rng(2);
        let p = particle(50, 50);
        let k = punish_compensate(&p, 60, true, 100, 1, 1.0, &mut rng);
        assert_eq!(k, 60);
    }

    #[test]
    fn compensation_grows_k_when_infeasible() {
        let mut rng = test_rng(3);
        let p = particle(50, 50);
        let k = punish_compensate(&p, 60, false, 100, 1, 1.0, &mut rng);
        assert_eq!(k, 51);
        // Infeasible with a personal best above the global best adopts it.
        let p = particle(70, 70);
        let k = punish_compensate(&p, 60, false, 100, 1, 1.0, &mut rng);
        assert_eq!(k, 60);
    }

    #[test]
    fn probability_gate_leaves_k_unchanged() {
        let mut rng = test_rng(4);
        let p = particle(42, 42);
        for _ in 0..50 {
            assert_eq!(punish_compensate(&p, 10, true, 100, 1, 0.0, &mut rng), 42);
        }
    }

    #[test]
    fn boundary_guards_bounce() {
        let mut rng = test_rng(5);
        // Shrinking k=2 by 1 hits the k <= 1 guard and bounces back.
        let p = particle(2, 5);
        assert_eq!(punish_compensate(&p, 2, true, 100, 1, 1.0, &mut rng), 2);
        // Growing to n hits the k >= n guard and bounces back.
        let p = particle(99, 50);
        assert_eq!(punish_compensate(&p, 99, false, 100, 1, 1.0, &mut rng), 99);
        // Large steps may cross zero; result stays in [2, n].
        let p = particle(3, 10);
        let k = punish_compensate(&p, 3, true, 500, 5, 1.0, &mut rng);
        assert!((2..=500).contains(&k), "k={k}");
    }

    #[test]
    fn padding_reaches_common_dimension_and_is_idempotent() {
        let mut rng = test_rng(6);
        let region = Region { width: 100.0, height: 50.0 };
        let mut pop = vec![particle(3, 3), particle(5, 5)];
        pad_dimensions(&mut pop, &region, &mut rng);
        assert_eq!(pop[0].coords.len(), 10);
        assert_eq!(pop[0].velocity.len(), 10);
        assert_eq!(pop[1].coords.len(), 10);
        for (d, &c) in pop[0].coords.iter().enumerate() {
            let bound = if d % 2 == 0 { 100.0 } else { 50.0 };
            assert!((0.0..=bound).contains(&c));
        }
        let before = pop[0].coords.clone();
        pad_dimensions(&mut pop, &region, &mut rng);
        assert_eq!(pop[0].coords, before);
    }

    #[test]
    fn padding_does_not_change_objectives() {
        let sc = Scenario::generate_random(30, (200.0, 200.0), 10.0, 10.0 * 2f64.sqrt(), 9)
            .unwrap();
        let eval = CoverageEval::new(&sc);
        let weights = CsopWeights::default();
        let mut rng = test_rng(7);
        let mut pop: Vec<FlexParticle> = [3usize, 7]
            .iter()
            .map(|&k| {
                let coords = flatten(&kmeans_hover_rng(&sc, k, &mut rng));
                let objective = eval.csop_value_xy(&coords, &weights);
                FlexParticle {
                    k,
                    velocity: vec![0.0; coords.len()],
                    pbest: BestSnapshot { k, coords: coords.clone(), objective },
                    coords,
                    objective,
                }
            })
            .collect();
        let before: Vec<ObjectiveValue> = pop.iter().map(|p| p.objective).collect();
        pad_dimensions(&mut pop, &sc.region, &mut rng);
        for (p, old) in pop.iter().zip(before) {
            let fresh = eval.csop_value_xy(&p.coords[..2 * p.k], &weights);
            assert_eq!(fresh, old);
        }
    }

    fn two_node_scenario() -> Scenario {
        let nodes = vec![
            SensorNode { id: 0, x: 50.0, y: 50.0 },
            SensorNode { id: 1, x: 56.0, y: 50.0 },
        ];
        Scenario::new(nodes, (100.0, 100.0), 10.0, 10.0 * 2f64.sqrt(), 0).unwrap()
    }

    #[test]
    fn two_nodes_need_exactly_two_points() {
        let sc = two_node_scenario();
        let params = PsofkpParams { iters: 20, ..Default::default() };
        let out = run(&sc, &params, 3).unwrap();
        assert!(out.objective.feasible);
        assert_eq!(out.plan.k(), 2);
    }

    #[test]
    fn single_node_scenario_is_rejected() {
        let nodes = vec![SensorNode { id: 0, x: 5.0, y: 5.0 }];
        let sc = Scenario::new(nodes, (10.0, 10.0), 1.0, 2.0, 0).unwrap();
        assert!(matches!(
            run(&sc, &PsofkpParams::default(), 0),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn run_is_deterministic() {
        let sc = Scenario::generate_random(40, (300.0, 300.0), 10.0, 10.0 * 2f64.sqrt(), 21)
            .unwrap();
        let params = PsofkpParams { iters: 40, ..Default::default() };
        let a = run(&sc, &params, 11).unwrap();
        let b = run(&sc, &params, 11).unwrap();
        assert_eq!(a.plan, b.plan);
        assert_eq!(a.objective, b.objective);
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn gbest_trace_is_monotone_under_feasibility_first() {
        let sc = Scenario::generate_random(50, (400.0, 400.0), 10.0, 10.0 * 2f64.sqrt(), 33)
            .unwrap();
        let params = PsofkpParams { iters: 60, ..Default::default() };
        let out = run(&sc, &params, 5).unwrap();
        assert_eq!(out.trace.len(), 60);
        for w in out.trace.windows(2) {
            let a = ObjectiveValue::new(w[0].feasible, w[0].best_value);
            let b = ObjectiveValue::new(w[1].feasible, w[1].best_value);
            assert_ne!(
                compare_feasibility_first(&b, &a),
                Ordering::Greater,
                "trace worsened: {:?} -> {:?}",
                w[0],
                w[1]
            );
        }
    }

    #[test]
    fn emitted_plans_respect_bounds_and_k_range() {
        for seed in 0..3 {
            let sc =
                Scenario::generate_random(25, (200.0, 150.0), 10.0, 10.0 * 2f64.sqrt(), seed)
                    .unwrap();
            let params = PsofkpParams { iters: 30, ..Default::default() };
            let out = run(&sc, &params, seed).unwrap();
            assert!(out.plan.k() >= 2 && out.plan.k() <= sc.nodes.len());
            out.plan.validate_in_region(&sc).unwrap();
        }
    }

    #[test]
    fn tiny_instance_reaches_two_disk_cover() {
        // Two tight groups, each inside a single ground-radius disk; the
        // exact-cover oracle confirms 2 disks suffice and the swarm should
        // find a feasible k=2 plan.
        let nodes = vec![
            SensorNode { id: 0, x: 50.0, y: 50.0 },
            SensorNode { id: 1, x: 55.0, y: 52.0 },
            SensorNode { id: 2, x: 52.0, y: 46.0 },
            SensorNode { id: 3, x: 400.0, y: 400.0 },
            SensorNode { id: 4, x: 404.0, y: 396.0 },
        ];
        let sc = Scenario::new(nodes, (500.0, 500.0), 10.0, 10.0 * 2f64.sqrt(), 0).unwrap();
        let (coverable, witness) = crate::baselines::brute_cover(&sc, 2).unwrap();
        assert!(coverable);
        assert!(witness.is_some());
        let params = PsofkpParams { iters: 100, ..Default::default() };
        let out = run(&sc, &params, 17).unwrap();
        assert!(out.objective.feasible);
        assert_eq!(out.plan.k(), 2, "objective {:?}", out.objective);
    }
}
