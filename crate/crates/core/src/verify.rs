//! Seeded numeric sweeps over a chart atlas: residual of the `p_λ`
//! factorization, inverse consistency, transition invertibility and cover.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arrangement::{Layer, LayerPoset};
use crate::charts::{eval_character, transition, Chart, DEFAULT_TOLERANCE};
use crate::decomposition::BuildingSet;
use crate::nested::s_core;

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Sample points per chart for residual and inverse checks, and random
    /// torus points for the cover check.
    pub samples: usize,
    /// Overlap samples per ordered chart pair.
    pub pair_samples: usize,
    pub tolerance: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 100,
            pair_samples: 20,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChartCheck {
    /// Whether the adapted basis passes the adaptedness invariant.
    pub adapted: bool,
    /// Whether `p_S` maps the adapted basis bijectively onto the members.
    pub bijective: bool,
    /// Whether every building-set layer through the center has a character
    /// whose `p_S` image is its core.
    pub cores_reached: bool,
    pub origin_in_chart: bool,
    pub max_residual: f64,
    pub max_inverse_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub charts: Vec<ChartCheck>,
    pub max_residual: f64,
    pub max_inverse_error: f64,
    pub transition_pairs: usize,
    pub transition_samples: usize,
    pub short_pairs: usize,
    pub min_transition_magnitude: f64,
    pub max_transition_magnitude: f64,
    pub max_transition_error: f64,
    pub cover_samples: usize,
    pub uncovered: usize,
    pub passed: bool,
}

fn random_unit(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..TAU))
}

/// `|z_C| ∈ [0.1, 0.5]` with uniform phases.
pub fn sample_small(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| random_unit(rng) * rng.gen_range(0.1..0.5))
        .collect()
}

/// A torus point with `|t_j| ∈ [0.5, 2]` and uniform phases.
pub fn sample_torus(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| random_unit(rng) * rng.gen_range(0.5..2.0))
        .collect()
}

/// A torus point at logarithmic distance `≤ radius` from `p`.
pub fn sample_near(rng: &mut ChaCha8Rng, p: &Layer, radius: f64) -> Vec<Complex64> {
    p.values()
        .iter()
        .map(|v| {
            let w = Complex64::new(rng.gen_range(-radius..radius), rng.gen_range(-radius..radius));
            (Complex64::new(0.0, TAU) * (Complex64::new(v.to_f64(), 0.0) + w)).exp()
        })
        .collect()
}

/// Whether `t` stays at distance `margin` from every hypersurface.
pub fn in_complement(poset: &LayerPoset, t: &[Complex64], margin: f64) -> bool {
    poset.arrangement().characters().iter().all(|ch| {
        (eval_character(&ch.lambda, t) - ch.constant.to_unit_complex()).norm() > margin
    })
}

fn check_chart(
    poset: &LayerPoset,
    g: &BuildingSet,
    chart: &Chart,
    rng: &mut ChaCha8Rng,
    opts: &VerifyOptions,
) -> ChartCheck {
    let s = chart.nested_set();
    let adapted = chart.basis().is_adapted_to(s);
    let mut hit: Vec<usize> = chart
        .basis()
        .vectors()
        .iter()
        .filter_map(|v| chart.p_s_index(v).ok())
        .collect();
    hit.sort_unstable();
    let bijective = hit == (0..chart.dim()).collect::<Vec<_>>()
        && (0..chart.dim()).all(|i| chart.p_s_index(&chart.basis().vectors()[i]) == Ok(i));
    let arr = poset.arrangement();
    let cores_reached = g
        .members()
        .iter()
        .filter(|c| c.contains(chart.center()))
        .all(|c| {
            let Ok(core) = s_core(s, c) else {
                return false;
            };
            c.support()
                .iter()
                .any(|&i| chart.p_s_map(&arr.characters()[i].lambda).as_ref() == Ok(&core))
        });
    let origin_in_chart = chart.in_chart(&vec![Complex64::new(0.0, 0.0); chart.dim()]);

    let mut max_residual: f64 = 0.0;
    let mut max_inverse_error: f64 = 0.0;
    for _ in 0..opts.samples {
        let z = sample_small(rng, chart.dim());
        let Ok(t) = chart.chart_to_torus(&z) else {
            max_residual = f64::INFINITY;
            continue;
        };
        for ch in chart.local_characters() {
            let value = eval_character(&ch.lambda, &t);
            let direct = value - ch.constant.to_unit_complex();
            let residual = match (chart.p_lambda_eval(ch, &z), chart.p_s_index(&ch.lambda)) {
                (Ok(p), Ok(c)) => {
                    let monomial: Complex64 = chart.members_below(c).iter().map(|&e| z[e]).product();
                    (p * monomial - direct).norm() / (1.0 + value.norm())
                }
                _ => f64::INFINITY,
            };
            max_residual = max_residual.max(residual);
        }
        match chart.torus_to_chart(&t) {
            Ok(back) => {
                for (a, b) in back.iter().zip(&z) {
                    max_inverse_error = max_inverse_error.max((a - b).norm() / (1.0 + b.norm()));
                }
            }
            Err(_) => max_inverse_error = f64::INFINITY,
        }
    }
    ChartCheck {
        adapted,
        bijective,
        cores_reached,
        origin_in_chart,
        max_residual,
        max_inverse_error,
    }
}

/// Index of a chart whose `V_S⁰` contains the torus point `t`.
pub fn covering_chart(charts: &[Chart], t: &[Complex64]) -> Option<usize> {
    charts.iter().position(|chart| {
        chart.torus_to_chart(t).is_ok_and(|z| {
            z.iter().all(|x| x.norm() > chart.tolerance()) && chart.in_chart(&z)
        })
    })
}

/// Runs every sweep with a single seeded generator, in a fixed order.
pub fn verify_atlas(
    poset: &LayerPoset,
    g: &BuildingSet,
    charts: &[Chart],
    opts: &VerifyOptions,
) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let checks: Vec<ChartCheck> = charts
        .iter()
        .map(|chart| check_chart(poset, g, chart, &mut rng, opts))
        .collect();
    let max_residual = checks.iter().map(|c| c.max_residual).fold(0.0, f64::max);
    let max_inverse_error = checks.iter().map(|c| c.max_inverse_error).fold(0.0, f64::max);

    let n = poset.rank();
    let mut transition_pairs = 0;
    let mut transition_samples = 0;
    let mut short_pairs = 0;
    let mut min_mag = f64::INFINITY;
    let mut max_mag: f64 = 0.0;
    let mut max_transition_error: f64 = 0.0;
    for (i, s) in charts.iter().enumerate() {
        for (j, q) in charts.iter().enumerate() {
            if i == j {
                continue;
            }
            transition_pairs += 1;
            let mut found = 0;
            let mut attempts = 0;
            while found < opts.pair_samples && attempts < 50 * opts.pair_samples.max(1) {
                attempts += 1;
                let t = sample_torus(&mut rng, n);
                if !in_complement(poset, &t, 1e-3) {
                    continue;
                }
                let Ok(z) = s.torus_to_chart(&t) else {
                    continue;
                };
                let Ok(direct) = q.torus_to_chart(&t) else {
                    continue;
                };
                let Ok((image, report)) = transition(s, q, &z) else {
                    continue;
                };
                found += 1;
                for (a, b) in image.iter().zip(&direct) {
                    max_transition_error = max_transition_error.max((a - b).norm() / (1.0 + b.norm()));
                }
                for entry in &report.entries {
                    min_mag = min_mag.min(entry.magnitude);
                    max_mag = max_mag.max(entry.magnitude);
                }
            }
            transition_samples += found;
            if found < opts.pair_samples {
                short_pairs += 1;
            }
        }
    }
    if transition_samples == 0 {
        min_mag = 1.0;
        max_mag = 1.0;
    }

    let points: Vec<&Layer> = poset.points();
    let mut uncovered = 0;
    let mut cover_samples = 0;
    while cover_samples < opts.samples {
        let t = if cover_samples % 2 == 0 || points.is_empty() {
            sample_torus(&mut rng, n)
        } else {
            let p = points[rng.gen_range(0..points.len())];
            sample_near(&mut rng, p, 1e-2)
        };
        if !in_complement(poset, &t, 1e-6) {
            continue;
        }
        cover_samples += 1;
        if covering_chart(charts, &t).is_none() {
            uncovered += 1;
        }
    }

    let tol = opts.tolerance;
    let passed = checks
        .iter()
        .all(|c| c.adapted && c.bijective && c.cores_reached && c.origin_in_chart)
        && max_residual < tol
        && max_inverse_error < tol
        && short_pairs == 0
        && min_mag >= 1e-9
        && max_mag <= 1e9
        && max_transition_error < tol
        && uncovered == 0;
    VerifyReport {
        seed: opts.seed,
        charts: checks,
        max_residual,
        max_inverse_error,
        transition_pairs,
        transition_samples,
        short_pairs,
        min_transition_magnitude: min_mag,
        max_transition_magnitude: max_mag,
        max_transition_error,
        cover_samples,
        uncovered,
        passed,
    }
}
