//! ForceAtlas2 force-directed layout.
//!
//! Forces, per node `i` with mass `deg_i + 1`:
//! - repulsion from every other node: `k_r * mass_i * mass_j / d`, pushing apart
//! - attraction along each incident edge: `w^delta * d`, pulling together
//! - gravity: `k_g * mass_i` toward the origin, independent of distance
//!
//! Each step evaluates all forces from the current positions, then moves every
//! node by `s_i * F_i`, where the per-node speed `s_i` shrinks with the node's
//! swinging and the global speed follows the traction/swinging ratio.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::network::WeightedGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutConfig {
    pub iterations: usize,
    pub seed: u64,
    /// repulsion scaling
    pub k_r: f64,
    /// gravity scaling
    pub k_g: f64,
    /// edge-weight exponent in the attraction force
    pub delta: f64,
    /// jitter tolerance
    pub tolerance: f64,
    pub k_s: f64,
    pub k_smax: f64,
    /// pairs closer than this are separated along a jitter direction
    pub epsilon_d: f64,
    /// early stop when every displacement is below this; 0 disables
    pub convergence_eps: f64,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            iterations: 600,
            seed: 42,
            k_r: 2.0,
            k_g: 1.0,
            delta: 1.0,
            tolerance: 1.0,
            k_s: 0.1,
            k_smax: 10.0,
            epsilon_d: 1e-9,
            convergence_eps: 1e-4,
        }
    }
}

impl LayoutConfig {
    pub fn validate(&self) -> Result<(), String> {
        let checks = [
            (self.k_r >= 0.0, "k_r must be >= 0"),
            (self.k_g >= 0.0, "k_g must be >= 0"),
            (self.delta >= 0.0, "delta must be >= 0"),
            (self.tolerance > 0.0, "tolerance must be > 0"),
            (self.k_s > 0.0, "k_s must be > 0"),
            (self.k_smax > 0.0, "k_smax must be > 0"),
            (self.epsilon_d > 0.0, "epsilon_d must be > 0"),
            (self.convergence_eps >= 0.0, "convergence_eps must be >= 0"),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(msg.to_string()),
            None => Ok(()),
        }
    }
}

pub type Point = [f64; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    /// Indexed by node id.
    pub positions: Vec<Point>,
    pub iterations_run: usize,
    pub converged: bool,
}

/// Forces and global speed carried from one step to the next.
#[derive(Debug, Clone, PartialEq)]
pub struct StepState {
    pub forces: Vec<Point>,
    pub speed: Option<f64>,
    pub iteration: u64,
}

impl StepState {
    pub fn new(n: usize) -> Self {
        StepState { forces: vec![[0.0; 2]; n], speed: None, iteration: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub layout: Layout,
    pub state: StepState,
    pub displacements: Vec<Point>,
    pub speed: f64,
}

impl Step {
    pub fn max_displacement(&self) -> f64 {
        self.displacements.iter().map(|d| norm(*d)).fold(0.0, f64::max)
    }
}

fn norm(p: Point) -> f64 {
    p[0].hypot(p[1])
}

/// Uniform positions in `[-sqrt(N), sqrt(N)]^2`, fixed by `seed`.
pub fn init_positions(graph: &WeightedGraph, seed: u64) -> Layout {
    let n = graph.node_count();
    let half = (n as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions = (0..n).map(|_| [rng.random_range(-half..=half), rng.random_range(-half..=half)]).collect();
    Layout { positions, iterations_run: 0, converged: false }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Unit vector for separating the coincident pair `(i, j)`, `i < j`, pointing
/// from `j` toward `i`.
fn jitter(seed: u64, iteration: u64, i: usize, j: usize) -> Point {
    let h = splitmix64(seed ^ splitmix64(iteration ^ splitmix64((i as u64) << 32 | j as u64)));
    let angle = (h >> 11) as f64 / (1u64 << 53) as f64 * std::f64::consts::TAU;
    [angle.cos(), angle.sin()]
}

/// Net force on every node at the given positions.
pub fn forces(graph: &WeightedGraph, positions: &[Point], config: &LayoutConfig, iteration: u64) -> Vec<Point> {
    let n = graph.node_count();
    let mass: Vec<f64> = graph.nodes.iter().map(|v| v.degree as f64 + 1.0).collect();
    let mut incident: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for e in &graph.edges {
        let w = e.weight.powf(config.delta);
        incident[e.source].push((e.target, w));
        incident[e.target].push((e.source, w));
    }

    // Unit vector from j toward i, and their distance (floored at epsilon_d).
    let separation = |i: usize, j: usize| -> (Point, f64) {
        let dx = positions[i][0] - positions[j][0];
        let dy = positions[i][1] - positions[j][1];
        let d = dx.hypot(dy);
        if d < config.epsilon_d {
            let u = if i < j {
                jitter(config.seed, iteration, i, j)
            } else {
                let u = jitter(config.seed, iteration, j, i);
                [-u[0], -u[1]]
            };
            (u, config.epsilon_d)
        } else {
            ([dx / d, dy / d], d)
        }
    };

    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut f = [0.0, 0.0];
            for j in 0..n {
                if j == i {
                    continue;
                }
                let (u, d) = separation(i, j);
                let push = config.k_r * mass[i] * mass[j] / d;
                f[0] += u[0] * push;
                f[1] += u[1] * push;
            }
            for &(j, w) in &incident[i] {
                let (u, d) = separation(i, j);
                let pull = w * d;
                f[0] -= u[0] * pull;
                f[1] -= u[1] * pull;
            }
            let r = norm(positions[i]);
            if r > 0.0 && config.k_g > 0.0 {
                let g = config.k_g * mass[i] / r;
                f[0] -= positions[i][0] * g;
                f[1] -= positions[i][1] * g;
            }
            f
        })
        .collect()
}

/// One synchronous ForceAtlas2 update.
pub fn fa2_step(graph: &WeightedGraph, layout: &Layout, state: &StepState, config: &LayoutConfig) -> Step {
    let n = graph.node_count();
    let f = forces(graph, &layout.positions, config, state.iteration);
    let mass = graph.nodes.iter().map(|v| v.degree as f64 + 1.0);

    let swinging: Vec<f64> = f.iter().zip(&state.forces).map(|(a, b)| norm([a[0] - b[0], a[1] - b[1]])).collect();
    let traction = f.iter().zip(&state.forces).map(|(a, b)| norm([a[0] + b[0], a[1] + b[1]]) / 2.0);
    let (total_swing, total_traction) =
        mass.zip(&swinging).zip(traction).fold((0.0, 0.0), |(s, t), ((m, sw), tr)| (s + m * sw, t + m * tr));

    let mut speed = config.tolerance * total_traction / total_swing.max(config.epsilon_d);
    if let Some(prev) = state.speed {
        speed = speed.min(1.5 * prev);
    }

    let mut positions = layout.positions.clone();
    let mut displacements = vec![[0.0; 2]; n];
    for i in 0..n {
        let magnitude = norm(f[i]);
        let mut s = config.k_s * speed / (1.0 + speed * swinging[i].sqrt());
        if magnitude > 0.0 {
            s = s.min(config.k_smax * speed / magnitude);
        }
        let d = [s * f[i][0], s * f[i][1]];
        positions[i][0] += d[0];
        positions[i][1] += d[1];
        displacements[i] = d;
    }

    Step {
        layout: Layout { positions, iterations_run: layout.iterations_run + 1, converged: false },
        state: StepState { forces: f, speed: Some(speed), iteration: state.iteration + 1 },
        displacements,
        speed,
    }
}

/// Random initial placement followed by up to `config.iterations` steps.
pub fn layout_graph(graph: &WeightedGraph, config: &LayoutConfig) -> Layout {
    run(graph, config, |_| {})
}

/// As [`layout_graph`], calling `observe` after every step.
pub fn run(graph: &WeightedGraph, config: &LayoutConfig, mut observe: impl FnMut(&Step)) -> Layout {
    let mut layout = init_positions(graph, config.seed);
    let mut state = StepState::new(graph.node_count());
    for _ in 0..config.iterations {
        let step = fa2_step(graph, &layout, &state, config);
        observe(&step);
        let converged = config.convergence_eps > 0.0 && step.max_displacement() < config.convergence_eps;
        layout = step.layout;
        state = step.state;
        if converged {
            layout.converged = true;
            break;
        }
    }
    layout
}
