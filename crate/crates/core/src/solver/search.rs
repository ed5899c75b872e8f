//! Stochastic hill climbing for flat embedded tori.
//!
//! Vertices live on an ellipsoid `x_k = c + S u_k` with `|u_k| = 1` and `S`
//! symmetric positive definite, so every vertex stays on the hull boundary.
//! A move either slides points along the ellipsoid or reshapes it. A move is
//! kept only if the torus stays embedded, the face number stays at or below
//! the target, every dihedral and face angle stays above its floor, and the
//! flatness key `(max deviation, sum of squared deviations)` strictly drops.
//! A chain that stagnates restarts from a fresh random configuration; the
//! best configuration seen is returned.

use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, UnitSphere};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{Triangulation, PUP_TENT_SYMMETRY};
use crate::error::{Error, Result};
use crate::geometry::angles::{cone_angles, cone_angles_f64, min_dihedral_f64, min_face_angle_f64};
use crate::geometry::hull::convex_hull_f64;
use crate::geometry::intersect::is_embedded_points;
use crate::geometry::{Configuration, FlatnessReport};
use crate::numeric::Precision;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepSchedule {
    pub initial_step: f64,
    /// Step multiplier applied after `rejection_streak` consecutive rejections.
    pub cooling_factor: f64,
    pub rejection_streak: usize,
    /// Iterations without a 1% drop in deviation before the chain restarts
    /// from a fresh random configuration.
    pub stagnation_restart: usize,
    pub min_step: f64,
}

impl Default for StepSchedule {
    fn default() -> Self {
        StepSchedule {
            initial_step: 0.05,
            cooling_factor: 0.95,
            rejection_streak: 50,
            stagnation_restart: 5000,
            min_step: 1e-13,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchSpec {
    pub triangulation: Triangulation,
    /// Vertex involution realized by the half-turn `(x, y, z) -> (-x, -y, z)`.
    pub symmetry: Option<Vec<usize>>,
    /// Upper bound on the number of torus faces that are hull facets.
    pub face_number_target: usize,
    pub dihedral_floor: f64,
    pub min_angle_floor: f64,
    pub seed: u64,
    pub max_iterations: usize,
    pub step_schedule: StepSchedule,
    pub chains: usize,
    pub max_sampling_attempts: usize,
}

impl Default for SearchSpec {
    fn default() -> Self {
        SearchSpec {
            triangulation: Triangulation::best8(),
            symmetry: Some(PUP_TENT_SYMMETRY.to_vec()),
            face_number_target: 6,
            dihedral_floor: 1e-5,
            min_angle_floor: 1e-5,
            seed: 0,
            max_iterations: 100_000,
            step_schedule: StepSchedule::default(),
            chains: 8,
            max_sampling_attempts: 1_000_000,
        }
    }
}

impl SearchSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSearchSpec(m));
        if !(self.dihedral_floor > 0.0) {
            return bad(format!(
                "dihedral_floor must be positive, got {}",
                self.dihedral_floor
            ));
        }
        if !(self.min_angle_floor >= 0.0) {
            return bad(format!(
                "min_angle_floor must be non-negative, got {}",
                self.min_angle_floor
            ));
        }
        if self.face_number_target > 12 {
            return bad(format!(
                "face_number_target must lie in [0, 12], got {}",
                self.face_number_target
            ));
        }
        let s = &self.step_schedule;
        if !(s.initial_step > 0.0
            && s.min_step > 0.0
            && s.cooling_factor > 0.0
            && s.cooling_factor < 1.0)
        {
            return bad("step schedule needs positive steps and a cooling factor in (0, 1)".into());
        }
        if s.rejection_streak == 0 || s.stagnation_restart == 0 {
            return bad("rejection_streak and stagnation_restart must be positive".into());
        }
        if self.chains == 0 {
            return bad("chains must be positive".into());
        }
        if let Some(sigma) = &self.symmetry {
            let n = self.triangulation.vertex_count();
            if sigma.len() != n
                || (0..n).any(|v| sigma[v] >= n || sigma[sigma[v]] != v || sigma[v] == v)
            {
                return bad(
                    "symmetry must be a fixed-point-free involution of the vertices".into(),
                );
            }
            if !self.triangulation.is_automorphism(sigma) {
                return bad("symmetry is not an automorphism of the triangulation".into());
            }
        }
        Ok(())
    }

    /// Parse a flat `key = value` file; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = SearchSpec::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidSearchSpec(format!("line {}: expected key = value", n + 1))
            })?;
            spec.set(key.trim(), value.trim())
                .map_err(|m| Error::InvalidSearchSpec(format!("line {}: {m}", n + 1)))?;
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
            value
                .parse()
                .map_err(|_| format!("bad value for {key}: {value:?}"))
        }
        match key {
            "triangulation" => {
                self.triangulation = match value {
                    "best8" => Triangulation::best8(),
                    "moebius" => Triangulation::moebius(),
                    _ => return Err(format!("unknown triangulation {value:?}")),
                }
            }
            "symmetry" => {
                self.symmetry = if value == "none" {
                    None
                } else {
                    Some(
                        value
                            .split(',')
                            .map(|s| num("symmetry", s.trim()))
                            .collect::<std::result::Result<_, _>>()?,
                    )
                }
            }
            "face_number_target" => self.face_number_target = num(key, value)?,
            "dihedral_floor" => self.dihedral_floor = num(key, value)?,
            "min_angle_floor" => self.min_angle_floor = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "max_iterations" => self.max_iterations = num(key, value)?,
            "chains" => self.chains = num(key, value)?,
            "max_sampling_attempts" => self.max_sampling_attempts = num(key, value)?,
            "initial_step" => self.step_schedule.initial_step = num(key, value)?,
            "cooling_factor" => self.step_schedule.cooling_factor = num(key, value)?,
            "rejection_streak" => self.step_schedule.rejection_streak = num(key, value)?,
            "stagnation_restart" => self.step_schedule.stagnation_restart = num(key, value)?,
            "min_step" => self.step_schedule.min_step = num(key, value)?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    /// Canonical `key = value` rendering; parses back to an equal spec.
    pub fn to_key_values(&self) -> String {
        let tri = if self.triangulation == Triangulation::moebius() {
            "moebius"
        } else {
            "best8"
        };
        let sym = match &self.symmetry {
            Some(s) => s
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(","),
            None => "none".into(),
        };
        let s = &self.step_schedule;
        format!(
            "triangulation = {tri}\nsymmetry = {sym}\nface_number_target = {}\ndihedral_floor = {:e}\nmin_angle_floor = {:e}\nseed = {}\nmax_iterations = {}\nchains = {}\nmax_sampling_attempts = {}\ninitial_step = {:e}\ncooling_factor = {}\nrejection_streak = {}\nstagnation_restart = {}\nmin_step = {:e}\n",
            self.face_number_target,
            self.dihedral_floor,
            self.min_angle_floor,
            self.seed,
            self.max_iterations,
            self.chains,
            self.max_sampling_attempts,
            s.initial_step,
            s.cooling_factor,
            s.rejection_streak,
            s.stagnation_restart,
            s.min_step
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub max_deviation: f64,
    pub face_number: usize,
    pub min_dihedral: f64,
}

pub fn trace_csv(trace: &[TraceRow]) -> String {
    let mut out = String::from("iteration,max_deviation,face_number,min_dihedral\n");
    for r in trace {
        let _ = writeln!(
            out,
            "{},{:e},{},{:e}",
            r.iteration, r.max_deviation, r.face_number, r.min_dihedral
        );
    }
    out
}

#[derive(Clone, Debug)]
pub struct HillClimbResult {
    pub seed: u64,
    pub configuration: Configuration,
    pub report: FlatnessReport,
    pub max_deviation: f64,
    pub face_number: usize,
    /// One row per accepted move, starting with the initial configuration.
    pub trace: Vec<TraceRow>,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub best: usize,
    pub chains: Vec<HillClimbResult>,
}

impl SearchOutcome {
    pub fn best(&self) -> &HillClimbResult {
        &self.chains[self.best]
    }
}

const HALF_TURN: [f64; 3] = [-1.0, -1.0, 1.0];

#[derive(Clone, Debug)]
struct State {
    u: Vec<[f64; 3]>,
    /// Matrix logarithm of the ellipsoid shape.
    log_shape: [[f64; 3]; 3],
    center: [f64; 3],
}

impl State {
    fn points(&self) -> Vec<[f64; 3]> {
        let s = sym_exp(&self.log_shape);
        self.u
            .iter()
            .map(|u| {
                std::array::from_fn(|i| {
                    self.center[i] + (0..3).map(|j| s[i][j] * u[j]).sum::<f64>()
                })
            })
            .collect()
    }
}

#[derive(Clone)]
struct Evaluation {
    key: (f64, f64),
    face_number: usize,
    min_dihedral: f64,
}

struct Climber<'a> {
    spec: &'a SearchSpec,
    rng: ChaCha8Rng,
    /// Orbit representatives: the vertices whose `u` is sampled directly.
    reps: Vec<usize>,
}

impl<'a> Climber<'a> {
    fn new(spec: &'a SearchSpec, seed: u64) -> Self {
        let n = spec.triangulation.vertex_count();
        let reps = match &spec.symmetry {
            Some(s) => (0..n).filter(|&v| v < s[v]).collect(),
            None => (0..n).collect(),
        };
        Climber {
            spec,
            rng: ChaCha8Rng::seed_from_u64(seed),
            reps,
        }
    }

    fn symmetrize(&self, u: &mut [[f64; 3]]) {
        if let Some(s) = &self.spec.symmetry {
            for &r in &self.reps {
                u[s[r]] = std::array::from_fn(|k| HALF_TURN[k] * u[r][k]);
            }
        }
    }

    fn random_state(&mut self) -> State {
        let n = self.spec.triangulation.vertex_count();
        let mut u = vec![[0.0; 3]; n];
        for &r in &self.reps.clone() {
            u[r] = UnitSphere.sample(&mut self.rng);
        }
        self.symmetrize(&mut u);
        State {
            u,
            log_shape: [[0.0; 3]; 3],
            center: [0.0; 3],
        }
    }

    fn gauss(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    fn propose(&mut self, s: &State, step: f64) -> State {
        let mut next = s.clone();
        let roll: f64 = self.rng.random();
        if roll < 0.75 {
            let movers: Vec<usize> = if roll < 0.5 {
                vec![self.reps[self.rng.random_range(0..self.reps.len())]]
            } else {
                self.reps.clone()
            };
            for r in movers {
                let g: [f64; 3] = std::array::from_fn(|_| self.gauss());
                let v: [f64; 3] = std::array::from_fn(|k| next.u[r][k] + step * g[k]);
                let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                next.u[r] = v.map(|x| x / len);
            }
            self.symmetrize(&mut next.u);
        } else {
            let symmetric = self.spec.symmetry.is_some();
            for i in 0..3 {
                for j in i..3 {
                    // the half-turn commutes with S only if the xz and yz entries vanish
                    if symmetric && i < 2 && j == 2 && i != j {
                        continue;
                    }
                    let d = step * self.gauss();
                    next.log_shape[i][j] += d;
                    if i != j {
                        next.log_shape[j][i] += d;
                    }
                }
            }
            for k in 0..3 {
                if symmetric && k < 2 {
                    continue;
                }
                next.center[k] += step * self.gauss();
            }
        }
        next
    }

    fn embedded(&self, pts: &[[f64; 3]]) -> bool {
        let t = &self.spec.triangulation;
        min_face_angle_f64(t, pts) >= self.spec.min_angle_floor && is_embedded_points(t, pts)
    }

    fn evaluate(&self, pts: &[[f64; 3]]) -> Option<Evaluation> {
        let t = &self.spec.triangulation;
        if !pts.iter().flatten().all(|x| x.is_finite()) || !self.embedded(pts) {
            return None;
        }
        let min_dihedral = min_dihedral_f64(t, pts);
        if !(min_dihedral >= self.spec.dihedral_floor) {
            return None;
        }
        let hull = convex_hull_f64(pts, Some(t))?;
        if !hull.all_on_hull() || hull.face_number > self.spec.face_number_target {
            return None;
        }
        let two_pi = 2.0 * std::f64::consts::PI;
        let devs: Vec<f64> = cone_angles_f64(t, pts)
            .iter()
            .map(|th| th - two_pi)
            .collect();
        let max = devs.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        let sumsq = devs.iter().map(|d| d * d).sum();
        Some(Evaluation {
            key: (max, sumsq),
            face_number: hull.face_number,
            min_dihedral,
        })
    }
}

fn to_configuration(t: &Triangulation, pts: &[[f64; 3]]) -> Result<Configuration> {
    Configuration::from_f64(t.clone(), pts, Precision::DEFAULT)
}

/// Seeded rejection sampling on the unit sphere until the torus is embedded.
pub fn random_embedded_config(spec: &SearchSpec) -> Result<Configuration> {
    spec.validate()?;
    let mut climber = Climber::new(spec, spec.seed);
    for _ in 0..spec.max_sampling_attempts {
        let pts = climber.random_state().points();
        if climber.embedded(&pts) {
            return to_configuration(&spec.triangulation, &pts);
        }
    }
    Err(Error::SamplingExhausted {
        attempts: spec.max_sampling_attempts,
    })
}

/// A chain whose deviation has not dropped below this fraction of its value
/// at the start of the window restarts from a fresh random configuration.
const STAGNATION_FACTOR: f64 = 0.99;

fn fresh_start(climber: &mut Climber, attempts: usize) -> Option<(State, Evaluation)> {
    (0..attempts).find_map(|_| {
        let s = climber.random_state();
        climber.evaluate(&s.points()).map(|e| (s, e))
    })
}

/// One seeded chain; the seed is `spec.seed`.
pub fn hill_climb(spec: &SearchSpec) -> Result<HillClimbResult> {
    spec.validate()?;
    climb(spec, spec.seed)
}

fn climb(spec: &SearchSpec, seed: u64) -> Result<HillClimbResult> {
    let mut climber = Climber::new(spec, seed);
    let (mut state, mut eval) =
        fresh_start(&mut climber, spec.max_sampling_attempts).ok_or(Error::SamplingExhausted {
            attempts: spec.max_sampling_attempts,
        })?;

    let sched = &spec.step_schedule;
    let mut trace = vec![TraceRow {
        iteration: 0,
        max_deviation: eval.key.0,
        face_number: eval.face_number,
        min_dihedral: eval.min_dihedral,
    }];
    let mut best = (state.clone(), eval.clone());
    let mut step = sched.initial_step;
    let mut streak = 0usize;
    // deviation at the start of the current stagnation window
    let mut window = (0usize, eval.key.0);
    for iteration in 1..=spec.max_iterations {
        let candidate = climber.propose(&state, step);
        match climber.evaluate(&candidate.points()) {
            Some(e) if e.key < eval.key => {
                state = candidate;
                eval = e;
                streak = 0;
                if eval.key < best.1.key {
                    best = (state.clone(), eval.clone());
                    trace.push(TraceRow {
                        iteration,
                        max_deviation: eval.key.0,
                        face_number: eval.face_number,
                        min_dihedral: eval.min_dihedral,
                    });
                }
            }
            _ => {
                streak += 1;
                if streak >= sched.rejection_streak {
                    step = (step * sched.cooling_factor).max(sched.min_step);
                    streak = 0;
                }
            }
        }
        if eval.key.0 < STAGNATION_FACTOR * window.1 {
            window = (iteration, eval.key.0);
        } else if iteration - window.0 >= sched.stagnation_restart {
            if let Some((s, e)) = fresh_start(&mut climber, spec.max_sampling_attempts) {
                state = s;
                eval = e;
            }
            step = sched.initial_step;
            streak = 0;
            window = (iteration, eval.key.0);
        }
    }
    let (state, eval) = best;
    let configuration = to_configuration(&spec.triangulation, &state.points())?;
    let report = cone_angles(&configuration)?;
    Ok(HillClimbResult {
        seed,
        max_deviation: eval.key.0,
        face_number: eval.face_number,
        configuration,
        report,
        trace,
    })
}

/// `spec.chains` independent chains seeded `spec.seed, spec.seed + 1, ...`,
/// run in parallel; the best is chosen by `(max deviation, seed)`.
pub fn run_chains(spec: &SearchSpec) -> Result<SearchOutcome> {
    spec.validate()?;
    let chains: Vec<HillClimbResult> = (0..spec.chains as u64)
        .into_par_iter()
        .map(|i| climb(spec, spec.seed.wrapping_add(i)))
        .collect::<Result<_>>()?;
    let best = (0..chains.len())
        .min_by(|&a, &b| {
            (chains[a].max_deviation, chains[a].seed)
                .partial_cmp(&(chains[b].max_deviation, chains[b].seed))
                .expect("finite deviations")
        })
        .expect("at least one chain");
    Ok(SearchOutcome { best, chains })
}

/// Exponential of a symmetric matrix by scaling and squaring.
fn sym_exp(a: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let norm = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = 0.5f64.powi(squarings as i32);
    let b: [[f64; 3]; 3] = a.map(|r| r.map(|x| x * scale));
    let mut result = [[0.0; 3]; 3];
    let mut term = [[0.0; 3]; 3];
    for i in 0..3 {
        result[i][i] = 1.0;
        term[i][i] = 1.0;
    }
    for k in 1..=16 {
        term = mul(&term, &b).map(|r| r.map(|x| x / k as f64));
        for i in 0..3 {
            for j in 0..3 {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = mul(&result, &result);
    }
    result
}

fn mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}
