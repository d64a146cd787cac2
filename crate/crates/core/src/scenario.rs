//! Problem instances: sensor layouts, the deployment region, and the UAV's
//! flight/charging parameters, with reproducible generation and JSON
//! persistence.

use std::fs;
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A ground sensor node. Nodes sit on the ground plane (z = 0); ids are
/// contiguous from 0 in deployment order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorNode {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

/// The rectangular deployment region, anchored at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub width: f64,
    pub height: f64,
}

impl Region {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= 0.0 && x <= self.width && y >= 0.0 && y <= self.height
    }

    pub fn clamp(&self, x: f64, y: f64) -> (f64, f64) {
        (x.clamp(0.0, self.width), y.clamp(0.0, self.height))
    }
}

/// One problem instance: node layout plus the UAV parameters that determine
/// coverage. Immutable after construction; share freely across solver runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub nodes: Vec<SensorNode>,
    pub region: Region,
    /// Fixed flight altitude of the UAV, m.
    pub altitude: f64,
    /// Maximum slant charging range between UAV and node, m.
    pub d_max: f64,
    /// Seed the instance was generated from (0 for hand-built instances).
    pub seed: u64,
}

impl Scenario {
    pub fn new(
        nodes: Vec<SensorNode>,
        region: (f64, f64),
        altitude: f64,
        d_max: f64,
        seed: u64,
    ) -> Result<Self> {
        let region = Region {
            width: region.0,
            height: region.1,
        };
        if !(region.width > 0.0 && region.height > 0.0) {
            return Err(Error::Config(format!(
                "region dimensions must be positive, got {} x {}",
                region.width, region.height
            )));
        }
        if !(altitude > 0.0) {
            return Err(Error::Config(format!(
                "altitude must be positive, got {altitude}"
            )));
        }
        if !(d_max > altitude) {
            return Err(Error::Config(format!(
                "charging range d_max ({d_max}) must exceed the flight altitude ({altitude}), \
                 otherwise no node is ever within range"
            )));
        }
        if nodes.is_empty() {
            return Err(Error::Validation("scenario needs at least one node".into()));
        }
        for (i, n) in nodes.iter().enumerate() {
            if n.id != i {
                return Err(Error::Validation(format!(
                    "node ids must be contiguous from 0: slot {i} holds id {}",
                    n.id
                )));
            }
            if !region.contains(n.x, n.y) {
                return Err(Error::Validation(format!(
                    "node {} at ({}, {}) lies outside the {} x {} region",
                    n.id, n.x, n.y, region.width, region.height
                )));
            }
        }
        Ok(Scenario {
            nodes,
            region,
            altitude,
            d_max,
            seed,
        })
    }

    /// Deploy `n` nodes i.i.d. uniformly over the region. Identical inputs
    /// (including the seed) produce identical scenarios.
    pub fn generate_random(
        n: usize,
        region: (f64, f64),
        altitude: f64,
        d_max: f64,
        seed: u64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("node count must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nodes = (0..n)
            .map(|id| SensorNode {
                id,
                x: rng.gen_range(0.0..=region.0),
                y: rng.gen_range(0.0..=region.1),
            })
            .collect();
        Scenario::new(nodes, region, altitude, d_max, seed)
    }

    /// Planar radius of the coverage disk a hover point induces on the
    /// ground: sqrt(d_max² − h²).
    pub fn ground_radius(&self) -> f64 {
        (self.d_max * self.d_max - self.altitude * self.altitude).sqrt()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = ScenarioFile {
            region: [self.region.width, self.region.height],
            altitude: self.altitude,
            d_max: self.d_max,
            seed: self.seed,
            nodes: self.nodes.iter().map(|n| [n.x, n.y]).collect(),
        };
        let json = serde_json::to_string_pretty(&file).expect("scenario serialization");
        fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        let file: ScenarioFile =
            serde_json::from_str(&text).map_err(|e| Error::Parse {
                path: path.display().to_string(),
                detail: e.to_string(),
            })?;
        let nodes = file
            .nodes
            .iter()
            .enumerate()
            .map(|(id, &[x, y])| SensorNode { id, x, y })
            .collect();
        Scenario::new(
            nodes,
            (file.region[0], file.region[1]),
            file.altitude,
            file.d_max,
            file.seed,
        )
    }
}

/// On-disk schema: `{region: [w, h], altitude, d_max, seed, nodes: [[x, y], ...]}`.
#[derive(Serialize, Deserialize)]
struct ScenarioFile {
    region: [f64; 2],
    altitude: f64,
    d_max: f64,
    seed: u64,
    nodes: Vec<[f64; 2]>,
}

/// The three benchmark instances: 100 / 500 / 1000 nodes on a 500 m x 500 m
/// field, flight altitude 10 m, charging range 10√2 m. Seeds are fixed so
/// the instances are reproducible everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Case1,
    Case2,
    Case3,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Case1, Preset::Case2, Preset::Case3];

    pub fn node_count(&self) -> usize {
        match self {
            Preset::Case1 => 100,
            Preset::Case2 => 500,
            Preset::Case3 => 1000,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Preset::Case1 => 101,
            Preset::Case2 => 102,
            Preset::Case3 => 103,
        }
    }

    pub fn scenario(&self) -> Scenario {
        Scenario::generate_random(
            self.node_count(),
            (500.0, 500.0),
            10.0,
            10.0 * 2f64.sqrt(),
            self.seed(),
        )
        .expect("preset parameters are valid")
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "case1" => Ok(Preset::Case1),
            "case2" => Ok(Preset::Case2),
            "case3" => Ok(Preset::Case3),
            other => Err(Error::Config(format!(
                "unknown preset '{other}' (expected case1, case2 or case3)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Case1 => "case1",
            Preset::Case2 => "case2",
            Preset::Case3 => "case3",
        }
    }
}

#[cfg(test)]
pub(crate) fn test_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
