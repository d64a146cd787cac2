//! Wireless charging efficiency and rotary-wing propulsion energy models.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::HoverPlan;
use crate::psod2p::Tour;

/// Constants of the resonant charging-efficiency curve η(d) = a / (b·d⁶ + c).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct ChargingParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Default for ChargingParams {
    fn default() -> Self {
        ChargingParams { a: 1.0, b: 1.0, c: 1.0 }
    }
}

impl ChargingParams {
    pub fn validate(&self) -> Result<()> {
        if self.b < 0.0 || self.c <= 0.0 {
            return Err(Error::Config(format!(
                "charging params need b >= 0 and c > 0, got b={} c={}",
                self.b, self.c
            )));
        }
        Ok(())
    }
}

/// Transfer efficiency of resonant charging over slant distance `d` (m).
/// Strictly decreasing in `d` whenever b > 0.
pub fn charging_efficiency(d: f64, params: &ChargingParams) -> f64 {
    params.a / (params.b * d.powi(6) + params.c)
}

/// Rotary-wing propulsion model constants plus the charging transmitter
/// power and cruise speed. The defaults are the commonly used reference
/// values for a small multi-rotor platform; they only affect energy
/// reports, never the optimization itself.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct PropulsionParams {
    /// Blade profile power at hover, W.
    pub p0: f64,
    /// Induced power at hover, W.
    pub pi: f64,
    /// Rotor blade tip speed, m/s.
    pub u_tip: f64,
    /// Mean rotor induced velocity at hover, m/s.
    pub v0: f64,
    /// Fuselage drag ratio.
    pub d0: f64,
    /// Rotor solidity.
    pub s: f64,
    /// Air density, kg/m³.
    pub rho_air: f64,
    /// Rotor disc area, m².
    pub rotor_area: f64,
    /// Charging transmission power while hovering, W.
    pub ps: f64,
    /// Cruise speed between hover points, m/s.
    pub v_move: f64,
}

impl Default for PropulsionParams {
    fn default() -> Self {
        PropulsionParams {
            p0: 79.8563,
            pi: 88.6279,
            u_tip: 120.0,
            v0: 4.03,
            d0: 0.6,
            s: 0.05,
            rho_air: 1.225,
            rotor_area: 0.503,
            ps: 10.0,
            v_move: 10.0,
        }
    }
}

impl PropulsionParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("p0", self.p0),
            ("pi", self.pi),
            ("u_tip", self.u_tip),
            ("v0", self.v0),
            ("d0", self.d0),
            ("s", self.s),
            ("rho_air", self.rho_air),
            ("rotor_area", self.rotor_area),
            ("ps", self.ps),
            ("v_move", self.v_move),
        ];
        for (name, v) in fields {
            if !(v > 0.0) {
                return Err(Error::Config(format!(
                    "propulsion parameter {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Propulsion power at horizontal speed `v` (m/s): blade profile term,
/// induced term and parasite (fuselage drag) term. The induced radicand is
/// clamped at zero; it only goes negative through floating-point noise far
/// outside physical speeds.
pub fn propulsion_power(v: f64, p: &PropulsionParams) -> f64 {
    let profile = p.p0 * (1.0 + 3.0 * v * v / (p.u_tip * p.u_tip));
    let v4 = v.powi(4);
    let v0_4 = p.v0.powi(4);
    let inner = (1.0 + 4.0 * v4 / (4.0 * v0_4)).sqrt() - v * v / (2.0 * p.v0 * p.v0);
    let induced = p.pi * inner.max(0.0).sqrt();
    let parasite = 0.5 * p.d0 * p.rho_air * p.s * p.rotor_area * v.powi(3);
    profile + induced + parasite
}

/// How hover time accumulates: one charging dwell per hover stop, or one
/// dwell per sensor node (the plan's coverage structure shares dwells).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HoverTimeMode {
    PerStop,
    PerNode,
}

impl HoverTimeMode {
    pub fn name(&self) -> &'static str {
        match self {
            HoverTimeMode::PerStop => "per_stop",
            HoverTimeMode::PerNode => "per_node",
        }
    }
}

/// Energy budget of one mission. Movement energy is propulsion at cruise
/// speed; hover energy is propulsion at zero speed; charging energy is the
/// transmitter output over the hover time.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnergyBreakdown {
    pub t_move: f64,
    pub t_hover: f64,
    pub e_move: f64,
    pub e_hover: f64,
    pub e_charge: f64,
    pub e_total: f64,
    pub hover_mode: HoverTimeMode,
}

/// Energy budget for visiting the plan's hover points along `tour`,
/// dwelling `charge_time` seconds per hover stop.
pub fn mission_energy(
    plan: &HoverPlan,
    tour: &Tour,
    charge_time: f64,
    params: &PropulsionParams,
) -> Result<EnergyBreakdown> {
    mission_energy_with_mode(plan, tour, charge_time, params, HoverTimeMode::PerStop, 0)
}

/// Same as [`mission_energy`] but with selectable hover-time accounting.
/// `n_nodes` is only used by [`HoverTimeMode::PerNode`].
pub fn mission_energy_with_mode(
    plan: &HoverPlan,
    tour: &Tour,
    charge_time: f64,
    params: &PropulsionParams,
    mode: HoverTimeMode,
    n_nodes: usize,
) -> Result<EnergyBreakdown> {
    if tour.order.len() != plan.points.len() {
        return Err(Error::Contract(format!(
            "tour visits {} points but the plan has {}",
            tour.order.len(),
            plan.points.len()
        )));
    }
    if charge_time < 0.0 {
        return Err(Error::Config(format!(
            "charge time must be non-negative, got {charge_time}"
        )));
    }
    params.validate()?;
    let length = crate::objective::f_ctop(tour, &plan.points)?;
    let t_move = length / params.v_move;
    let dwells = match mode {
        HoverTimeMode::PerStop => plan.k(),
        HoverTimeMode::PerNode => n_nodes,
    };
    let t_hover = dwells as f64 * charge_time;
    let p_move = propulsion_power(params.v_move, params);
    let p_hover = propulsion_power(0.0, params);
    let e_move = p_move * t_move;
    let e_hover = p_hover * t_hover;
    let e_charge = params.ps * t_hover;
    Ok(EnergyBreakdown {
        t_move,
        t_hover,
        e_move,
        e_hover,
        e_charge,
        e_total: e_move + e_hover + e_charge,
        hover_mode: mode,
    })
}
