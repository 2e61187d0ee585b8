//! Line-oriented `key value` configuration.
//!
//! ```text
//! # comment
//! step 0.005
//! track_width 0.25
//! wheel_speed_max 0.8
//! tangential_accel -1.2 1.0
//! range 100 200 wheel_speed_max 0.3
//! ```

use std::fmt;

use trajkit::{
    ConstraintSet, FitOptions, InterpolateOptions, Override, PairwiseConstraint, PointwiseConstraint, SmoothingMode,
    DEFAULT_END_STRAIGHT, DEFAULT_JUNCTION_FACTOR,
};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "config: {}", self.message)
        } else {
            write!(f, "config line {}: {}", self.line, self.message)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    Pointwise(PointwiseConstraint),
    Pairwise(PairwiseConstraint),
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub target_step: Option<f64>,
    pub junction_factor: f64,
    pub track_width: Option<f64>,
    pub z0: f64,
    pub z_final_max: f64,
    pub fit: FitOptions,
    pub arc_fallback: bool,
    /// Smallest chamfer accepted when splitting acute corners.
    pub min_chamfer: f64,
    pub end_straight: f64,
    pub constraints: Vec<Constraint>,
    pub overrides: Vec<(usize, usize, Constraint)>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            target_step: None,
            junction_factor: DEFAULT_JUNCTION_FACTOR,
            track_width: None,
            z0: 0.0,
            z_final_max: 0.0,
            fit: FitOptions::default(),
            arc_fallback: true,
            min_chamfer: 1e-3,
            end_straight: DEFAULT_END_STRAIGHT,
            constraints: Vec::new(),
            overrides: Vec::new(),
        }
    }
}

fn number(tok: &str) -> Result<f64, String> {
    tok.parse::<f64>().map_err(|_| format!("`{tok}` is not a number"))
}

fn positive(key: &str, v: f64) -> Result<f64, String> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{key} must be positive, got {v}"))
    }
}

/// `a` alone means the symmetric bound `[-a, a]`.
fn accel_bounds(key: &str, vals: &[f64]) -> Result<(f64, f64), String> {
    match *vals {
        [a] => Ok((-positive(key, a)?, a)),
        [lo, hi] if lo < 0.0 && hi > 0.0 => Ok((lo, hi)),
        [_, _] => Err(format!("{key} needs min < 0 < max")),
        _ => Err(format!("{key} takes one or two values")),
    }
}

fn constraint(key: &str, vals: &[f64]) -> Result<Option<Constraint>, String> {
    let single = || match *vals {
        [v] => positive(key, v),
        _ => Err(format!("{key} takes one value")),
    };
    use PointwiseConstraint as P;
    Ok(Some(match key {
        "wheel_speed_max" => Constraint::Pointwise(P::WheelSpeedMax(single()?)),
        "center_speed_max" => Constraint::Pointwise(P::CenterSpeedMax(single()?)),
        "angular_speed_max" => Constraint::Pointwise(P::AngularSpeedMax(single()?)),
        "radial_accel_max" => Constraint::Pointwise(P::RadialAccelMax(single()?)),
        "tangential_accel" => {
            let (min, max) = accel_bounds(key, vals)?;
            Constraint::Pairwise(PairwiseConstraint::TangentialAccel { min, max })
        }
        "wheel_accel" => {
            let (min, max) = accel_bounds(key, vals)?;
            Constraint::Pairwise(PairwiseConstraint::WheelAccel { min, max })
        }
        _ => return Ok(None),
    }))
}

impl PipelineConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            cfg.apply(content).map_err(|message| ConfigError { line: n + 1, message })?;
        }
        cfg.check().map_err(|message| ConfigError { line: 0, message })?;
        Ok(cfg)
    }

    fn apply(&mut self, content: &str) -> Result<(), String> {
        let toks: Vec<&str> = content.split_whitespace().collect();
        let key = toks[0];
        if key == "range" {
            if toks.len() < 5 {
                return Err("expected `range <i0> <i1> <key> <value>...`".into());
            }
            let index = |t: &str| t.parse::<usize>().map_err(|_| format!("`{t}` is not an index"));
            let (i0, i1) = (index(toks[1])?, index(toks[2])?);
            if i0 > i1 {
                return Err(format!("empty range {i0}..{i1}"));
            }
            let vals = toks[4..].iter().map(|t| number(t)).collect::<Result<Vec<_>, _>>()?;
            let c = constraint(toks[3], &vals)?.ok_or_else(|| format!("`{}` cannot be overridden", toks[3]))?;
            self.overrides.push((i0, i1, c));
            return Ok(());
        }
        let vals = toks[1..].iter().map(|t| number(t)).collect::<Result<Vec<_>, _>>();
        if key == "arc_fallback" {
            self.arc_fallback = match toks.get(1..) {
                Some(["true"]) => true,
                Some(["false"]) => false,
                _ => return Err("arc_fallback takes true or false".into()),
            };
            return Ok(());
        }
        let vals = vals?;
        if let Some(c) = constraint(key, &vals)? {
            self.constraints.push(c);
            return Ok(());
        }
        let [v] = vals[..] else {
            return Err(format!("{key} takes one value"));
        };
        match key {
            "step" | "target_step" => self.target_step = Some(positive(key, v)?),
            "junction_factor" => self.junction_factor = v,
            "track_width" => self.track_width = Some(positive(key, v)?),
            "z0" => self.z0 = v,
            "z_final_max" => self.z_final_max = v,
            "newton_max_iter" if v >= 1.0 && v.fract() == 0.0 => self.fit.max_iter = v as usize,
            "newton_max_iter" => return Err("newton_max_iter must be a positive integer".into()),
            "position_tol" => self.fit.position_tol = positive(key, v)?,
            "heading_tol" => self.fit.heading_tol = positive(key, v)?,
            "min_chamfer" => self.min_chamfer = positive(key, v)?,
            "end_straight" if (0.0..1.0).contains(&v) => self.end_straight = v,
            "end_straight" => return Err(format!("end_straight must lie in [0, 1), got {v}")),
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    fn check(&self) -> Result<(), String> {
        if !(self.junction_factor > 0.0 && self.junction_factor < 1.0) {
            return Err(format!("junction_factor must lie in (0, 1), got {}", self.junction_factor));
        }
        if !(self.z0 >= 0.0 && self.z0.is_finite()) {
            return Err(format!("z0 must be non-negative, got {}", self.z0));
        }
        if !(self.z_final_max >= 0.0) {
            return Err(format!("z_final_max must be non-negative, got {}", self.z_final_max));
        }
        Ok(())
    }

    pub fn interpolate_options(&self, arc_only: bool) -> InterpolateOptions {
        InterpolateOptions {
            mode: if arc_only { SmoothingMode::ArcOnly } else { SmoothingMode::Clothoid },
            junction_factor: self.junction_factor,
            fit: self.fit,
            arc_fallback: self.arc_fallback,
            end_straight: self.end_straight,
        }
    }

    pub fn constraint_set(&self) -> Result<ConstraintSet, String> {
        let e = self.track_width.ok_or("track_width is required to compute a speed profile")?;
        let mut cs = ConstraintSet::new(e);
        for c in &self.constraints {
            cs = match c.clone() {
                Constraint::Pointwise(p) => cs.with_pointwise(p),
                Constraint::Pairwise(p) => cs.with_pairwise(p),
            };
        }
        for (i0, i1, c) in &self.overrides {
            cs = cs.with_override(match c.clone() {
                Constraint::Pointwise(p) => Override::pointwise(*i0..=*i1, p),
                Constraint::Pairwise(p) => Override::pairwise(*i0..=*i1, p),
            });
        }
        Ok(cs)
    }
}
