//! PEM fuel cell stack design problem.
//!
//! A stack is `n_s` cells in series per group and `n_p` groups in parallel,
//! each cell with area `a_cell` (cm²). The cost trades the number of cells, the
//! distance between the rated voltage and the voltage at the maximum power
//! point, and cell area, plus a penalty when the stack cannot deliver the rated
//! power.
//!
//! Units: current densities in mA/cm², area-specific resistance in kΩ·cm², so
//! their product is in volts. Load current in amperes is `i_d * a_cell / 1000`.

use std::path::Path;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{Bounds, Problem, SuccessTarget};

pub const N_S_RANGE: (f64, f64) = (1.0, 50.0);
pub const N_P_RANGE: (f64, f64) = (1.0, 50.0);
pub const A_CELL_RANGE: (f64, f64) = (10.0, 400.0);

/// A run succeeds once it finds a design costing this much or less.
pub const SUCCESS_COST: f64 = 13.62;

/// Coarse grid size for [`max_power_point`].
pub const MPP_GRID_POINTS: usize = 10_000;
/// Golden-section iterations after the coarse grid.
pub const MPP_REFINE_ITERS: usize = 60;
/// Fraction of the singular current density the sweep may reach.
pub const MPP_SWEEP_LIMIT: f64 = 0.9999;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellParams {
    /// Nernst e.m.f. (V)
    pub e_nernst: f64,
    /// Activation coefficient (V)
    pub a: f64,
    /// Concentration coefficient (V)
    pub b: f64,
    /// Area-specific resistance (kΩ·cm²)
    pub r_a: f64,
    /// Limiting current density (mA/cm²)
    pub i_limit_d: f64,
    /// Exchange current density (mA/cm²)
    pub i_0_d: f64,
    /// Internal current density (mA/cm²)
    pub i_n_d: f64,
    /// Rated load voltage (V)
    pub v_load_rated: f64,
    /// Rated load power (W)
    pub p_load_rated: f64,
    pub k_n: f64,
    pub k_diff: f64,
    pub k_a: f64,
    /// Penalty weight per watt of missing power.
    pub c: f64,
}

impl Default for CellParams {
    fn default() -> Self {
        Self {
            e_nernst: 1.04,
            a: 0.05,
            b: 0.08,
            r_a: 98.0e-6,
            i_limit_d: 129.0,
            i_0_d: 0.21,
            i_n_d: 1.26,
            v_load_rated: 12.0,
            p_load_rated: 200.0,
            k_n: 0.5,
            k_diff: 10.0,
            k_a: 0.001,
            c: 200.0,
        }
    }
}

impl CellParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("e_nernst", self.e_nernst),
            ("a", self.a),
            ("b", self.b),
            ("r_a", self.r_a),
            ("i_limit_d", self.i_limit_d),
            ("i_0_d", self.i_0_d),
            ("i_n_d", self.i_n_d),
            ("v_load_rated", self.v_load_rated),
            ("p_load_rated", self.p_load_rated),
            ("k_n", self.k_n),
            ("k_diff", self.k_diff),
            ("k_a", self.k_a),
            ("c", self.c),
        ];
        if let Some((name, v)) = all.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Config(format!(
                "cell parameter {name} must be positive, got {v}"
            )));
        }
        if self.i_n_d >= self.i_limit_d {
            return Err(Error::Config("i_n_d must be below i_limit_d".into()));
        }
        Ok(())
    }

    /// Reads a TOML or JSON parameter block; missing keys keep their defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let params = if is_json {
            Self::from_json(&text)?
        } else {
            Self::from_toml(&text)?
        };
        Ok(params)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let p: PartialParams = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let p = p.merge(Self::default());
        p.validate()?;
        Ok(p)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: PartialParams = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let p = p.merge(Self::default());
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialParams {
    e_nernst: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    r_a: Option<f64>,
    i_limit_d: Option<f64>,
    i_0_d: Option<f64>,
    i_n_d: Option<f64>,
    v_load_rated: Option<f64>,
    p_load_rated: Option<f64>,
    k_n: Option<f64>,
    k_diff: Option<f64>,
    k_a: Option<f64>,
    c: Option<f64>,
}

impl PartialParams {
    fn merge(self, d: CellParams) -> CellParams {
        CellParams {
            e_nernst: self.e_nernst.unwrap_or(d.e_nernst),
            a: self.a.unwrap_or(d.a),
            b: self.b.unwrap_or(d.b),
            r_a: self.r_a.unwrap_or(d.r_a),
            i_limit_d: self.i_limit_d.unwrap_or(d.i_limit_d),
            i_0_d: self.i_0_d.unwrap_or(d.i_0_d),
            i_n_d: self.i_n_d.unwrap_or(d.i_n_d),
            v_load_rated: self.v_load_rated.unwrap_or(d.v_load_rated),
            p_load_rated: self.p_load_rated.unwrap_or(d.p_load_rated),
            k_n: self.k_n.unwrap_or(d.k_n),
            k_diff: self.k_diff.unwrap_or(d.k_diff),
            k_a: self.k_a.unwrap_or(d.k_a),
            c: self.c.unwrap_or(d.c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StackDesign {
    pub n_s: f64,
    pub n_p: f64,
    /// Cell area (cm²)
    pub a_cell: f64,
}

impl StackDesign {
    pub fn new(n_s: f64, n_p: f64, a_cell: f64) -> Self {
        Self { n_s, n_p, a_cell }
    }

    /// Interprets an optimizer vector `[n_s, n_p, a_cell]`.
    pub fn from_slice(x: &[f64]) -> Result<Self> {
        match x {
            [n_s, n_p, a_cell] => Ok(Self::new(*n_s, *n_p, *a_cell)),
            _ => Err(Error::Dimension {
                expected: 3,
                actual: x.len(),
            }),
        }
    }

    pub fn in_bounds(&self) -> bool {
        let within = |v: f64, (lo, hi): (f64, f64)| lo <= v && v <= hi;
        within(self.n_s, N_S_RANGE) && within(self.n_p, N_P_RANGE) && within(self.a_cell, A_CELL_RANGE)
    }

    /// Cell counts rounded to the nearest integer, half away from zero.
    pub fn rounded(&self) -> Self {
        Self::new(self.n_s.round(), self.n_p.round(), self.a_cell)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerPoint {
    /// Maximum stack power (W)
    pub p_load_max: f64,
    /// Stack voltage at that point (V)
    pub v_load_mpp: f64,
    /// Load current density at that point (mA/cm²)
    pub i_at_mpp: f64,
}

/// How the maximum power point is located inside the cost function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum MppMode {
    /// Continuous maximum: [`max_power_point`].
    Refined,
    /// Maximum over load currents `k * step_amps`, k = 0, 1, 2, ...:
    /// [`max_power_point_on_current_grid`].
    CurrentGrid { step_amps: f64 },
}

impl Default for MppMode {
    fn default() -> Self {
        MppMode::CurrentGrid { step_amps: 0.001 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FuelCellOptions {
    pub integer_rounding: bool,
    pub mpp: MppMode,
}

impl Default for FuelCellOptions {
    fn default() -> Self {
        Self {
            integer_rounding: true,
            mpp: MppMode::default(),
        }
    }
}

/// Total cell-level current density seen by the electrochemistry.
fn cell_density(i_load_d: f64, n_p: f64, params: &CellParams) -> f64 {
    i_load_d / n_p + params.i_n_d
}

fn voltage_unchecked(i_load_d: f64, design: &StackDesign, params: &CellParams) -> f64 {
    let j = cell_density(i_load_d, design.n_p, params);
    design.n_s
        * (params.e_nernst - params.a * (j / params.i_0_d).ln() + params.b * (1.0 - j / params.i_limit_d).ln()
            - j * params.r_a)
}

/// Stack voltage at load current density `i_load_d` (mA/cm²).
pub fn stack_voltage(i_load_d: f64, design: &StackDesign, params: &CellParams) -> Result<f64> {
    let j = cell_density(i_load_d, design.n_p, params);
    if !(i_load_d >= 0.0 && j > 0.0 && j < params.i_limit_d) {
        return Err(Error::Domain(format!(
            "current density {i_load_d} mA/cm² puts the cell at {j} mA/cm², outside (0, {})",
            params.i_limit_d
        )));
    }
    Ok(voltage_unchecked(i_load_d, design, params))
}

fn power(i_load_d: f64, design: &StackDesign, params: &CellParams) -> f64 {
    voltage_unchecked(i_load_d, design, params) * i_load_d * design.a_cell / 1000.0
}

/// Upper end of the load density sweep.
pub fn sweep_limit(design: &StackDesign, params: &CellParams) -> f64 {
    MPP_SWEEP_LIMIT * design.n_p * (params.i_limit_d - params.i_n_d)
}

/// Maximum power point: a uniform grid over the admissible load densities
/// followed by golden-section refinement on the bracket around the grid peak.
pub fn max_power_point(design: &StackDesign, params: &CellParams) -> PowerPoint {
    let hi = sweep_limit(design, params);
    let h = hi / MPP_GRID_POINTS as f64;
    let mut k_best = 0;
    let mut p_best = power(0.0, design, params);
    for k in 1..MPP_GRID_POINTS {
        let p = power(k as f64 * h, design, params);
        if p > p_best {
            p_best = p;
            k_best = k;
        }
    }
    let grid_i = k_best as f64 * h;

    let mut a = grid_i - h;
    let mut b = (grid_i + h).min(hi);
    a = a.max(0.0);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut pc = power(c, design, params);
    let mut pd = power(d, design, params);
    for _ in 0..MPP_REFINE_ITERS {
        if pc >= pd {
            b = d;
            d = c;
            pd = pc;
            c = b - inv_phi * (b - a);
            pc = power(c, design, params);
        } else {
            a = c;
            c = d;
            pc = pd;
            d = a + inv_phi * (b - a);
            pd = power(d, design, params);
        }
    }
    let (mut i_best, mut p_ref) = if pc >= pd { (c, pc) } else { (d, pd) };
    if p_ref < p_best {
        i_best = grid_i;
        p_ref = p_best;
    }
    PowerPoint {
        p_load_max: p_ref,
        v_load_mpp: voltage_unchecked(i_best, design, params),
        i_at_mpp: i_best,
    }
}

/// Maximum power over load currents `0, step, 2 step, ...` amperes.
///
/// Power is single-peaked in the load current, so the discrete maximum is one
/// of the grid points adjacent to the continuous one.
pub fn max_power_point_on_current_grid(
    design: &StackDesign,
    params: &CellParams,
    step_amps: f64,
) -> Result<PowerPoint> {
    grid_peak(design, params, step_amps, &max_power_point(design, params))
}

fn grid_peak(design: &StackDesign, params: &CellParams, step_amps: f64, peak: &PowerPoint) -> Result<PowerPoint> {
    if !(step_amps.is_finite() && step_amps > 0.0) {
        return Err(Error::Config(format!("current step must be positive, got {step_amps}")));
    }
    let to_density = |k: u64| k as f64 * step_amps * 1000.0 / design.a_cell;
    let admissible = |i: f64| cell_density(i, design.n_p, params) < params.i_limit_d;
    let centre = (peak.i_at_mpp * design.a_cell / 1000.0 / step_amps).floor() as u64;
    let mut best: Option<(f64, f64)> = None;
    for k in centre.saturating_sub(2)..=centre + 2 {
        let i = to_density(k);
        if !admissible(i) {
            break;
        }
        let p = power(i, design, params);
        if best.is_none_or(|(_, bp)| p > bp) {
            best = Some((i, p));
        }
    }
    let (i, p) = best.unwrap_or((0.0, 0.0));
    Ok(PowerPoint {
        p_load_max: p,
        v_load_mpp: voltage_unchecked(i, design, params),
        i_at_mpp: i,
    })
}

/// Penalty for falling short of the rated power.
pub fn power_penalty(p_load_max: f64, params: &CellParams) -> f64 {
    if p_load_max >= params.p_load_rated {
        0.0
    } else {
        params.c * (params.p_load_rated - p_load_max)
    }
}

/// Cost of a stack design with the default options.
pub fn stack_cost(design: &StackDesign, params: &CellParams) -> Result<f64> {
    stack_cost_with(design, params, &FuelCellOptions::default())
}

pub fn stack_cost_with(design: &StackDesign, params: &CellParams, opts: &FuelCellOptions) -> Result<f64> {
    cost_from(design, params, opts, max_power_point)
}

fn cost_from(
    design: &StackDesign,
    params: &CellParams,
    opts: &FuelCellOptions,
    refined: impl Fn(&StackDesign, &CellParams) -> PowerPoint,
) -> Result<f64> {
    if !design.in_bounds() {
        return Err(Error::Config(format!("design {design:?} is outside the design bounds")));
    }
    let design = if opts.integer_rounding {
        design.rounded()
    } else {
        *design
    };
    let mpp = match opts.mpp {
        MppMode::Refined => refined(&design, params),
        MppMode::CurrentGrid { step_amps } => grid_peak(&design, params, step_amps, &refined(&design, params))?,
    };
    Ok(params.k_n * design.n_p * design.n_s
        + params.k_diff * (params.v_load_rated - mpp.v_load_mpp).abs()
        + params.k_a * design.a_cell
        + power_penalty(mpp.p_load_max, params))
}

/// Cost evaluator that reuses maximum power points across designs.
///
/// Power is `n_s * a_cell` times a curve that depends only on `n_p`, so the
/// refined peak is computed once per integral `n_p` on the reference design
/// `(1, n_p, 1000 cm²)` and rescaled. Results do not depend on call order. In
/// [`MppMode::Refined`] the cost agrees with [`stack_cost_with`] to the
/// precision of the golden-section search.
#[derive(Debug)]
pub struct StackModel {
    params: CellParams,
    opts: FuelCellOptions,
    peaks: Vec<OnceLock<PowerPoint>>,
}

const REFERENCE_AREA: f64 = 1000.0;

impl StackModel {
    pub fn new(params: CellParams, opts: FuelCellOptions) -> Result<Self> {
        params.validate()?;
        if let MppMode::CurrentGrid { step_amps } = opts.mpp {
            if !(step_amps.is_finite() && step_amps > 0.0) {
                return Err(Error::Config(format!("current step must be positive, got {step_amps}")));
            }
        }
        let slots = N_P_RANGE.1 as usize + 1;
        Ok(Self {
            params,
            opts,
            peaks: (0..slots).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn params(&self) -> &CellParams {
        &self.params
    }

    pub fn options(&self) -> &FuelCellOptions {
        &self.opts
    }

    /// Refined maximum power point of `design`.
    pub fn peak(&self, design: &StackDesign) -> PowerPoint {
        let slot = (design.n_p.fract() == 0.0)
            .then(|| self.peaks.get(design.n_p as usize))
            .flatten();
        let Some(slot) = slot else {
            return max_power_point(design, &self.params);
        };
        let reference =
            *slot.get_or_init(|| max_power_point(&StackDesign::new(1.0, design.n_p, REFERENCE_AREA), &self.params));
        PowerPoint {
            p_load_max: reference.p_load_max * design.n_s * (design.a_cell / REFERENCE_AREA),
            v_load_mpp: reference.v_load_mpp * design.n_s,
            i_at_mpp: reference.i_at_mpp,
        }
    }

    pub fn cost(&self, design: &StackDesign) -> Result<f64> {
        cost_from(design, &self.params, &self.opts, |d, _| self.peak(d))
    }
}

pub fn design_bounds() -> Bounds {
    Bounds::new(
        vec![N_S_RANGE.0, N_P_RANGE.0, A_CELL_RANGE.0],
        vec![N_S_RANGE.1, N_P_RANGE.1, A_CELL_RANGE.1],
    )
    .expect("static bounds are valid")
}

/// The design problem over `[n_s, n_p, a_cell]`.
pub fn problem(params: CellParams, opts: FuelCellOptions) -> Result<Problem> {
    let model = Arc::new(StackModel::new(params, opts)?);
    Ok(Problem::new(
        "fuelcell",
        design_bounds(),
        SuccessTarget::AtMost(SUCCESS_COST),
        move |x: &[f64]| {
            StackDesign::from_slice(x)
                .and_then(|d| model.cost(&d))
                .unwrap_or(f64::NAN)
        },
    ))
}
