//! Recover canonical data (f1, d1, discrete ν) from point samples of a
//! function claimed to lie in the cone.
//!
//! The model is the canonical representation evaluated on a fixed λ-grid;
//! fitting is non-negative least squares (Lawson–Hanson active set) with d1
//! split into a difference of non-negative parts. The inverse problem is
//! ill-posed in the measure — only function-level accuracy is promised.

use crate::error::{Error, Result};
use crate::measure::{kernel, FiniteMeasure};
use crate::ocfun::OcFunction;
use crate::param::ExtendedParam;

/// Iteration cap of the active-set solver.
pub const MAX_ITERATIONS: usize = 100_000;

/// Point samples (x, y) with x > 0 distinct and y ≥ 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    points: Vec<(f64, f64)>,
}

impl SampleSet {
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 8 {
            return Err(Error::InvalidSamples(format!(
                "need at least 8 samples, got {}",
                points.len()
            )));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in points.windows(2) {
            if (w[0].0 - w[1].0).abs() <= 1e-12 * w[1].0.abs() {
                return Err(Error::InvalidSamples(format!(
                    "duplicate sample abscissa {}",
                    w[0].0
                )));
            }
        }
        for &(x, y) in &points {
            if !(x > 0.0) || !x.is_finite() {
                return Err(Error::InvalidSamples(format!("abscissa {x} not in (0, inf)")));
            }
            if !(y >= 0.0) || !y.is_finite() {
                return Err(Error::InvalidSamples(format!("value {y} negative or non-finite")));
            }
        }
        Ok(SampleSet { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Samples of f on an n-point log grid over [lo, hi].
    pub fn from_function(f: &OcFunction, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo > 0.0) {
            return Err(Error::NonPositive {
                name: "lo",
                value: lo,
            });
        }
        let mut points = Vec::with_capacity(n);
        for i in 0..n {
            let t = i as f64 / (n - 1) as f64;
            let x = lo * (hi / lo).powf(t);
            points.push((x, f.evaluate(x)?));
        }
        SampleSet::new(points)
    }
}

/// Outcome of a measure fit.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub f: OcFunction,
    pub rms_residual: f64,
    pub kkt_residual: f64,
}

/// The default λ-grid: 201 log-spaced nodes in [1e−3, 1e3] plus {0, ∞}.
pub fn default_lambda_grid() -> Vec<ExtendedParam> {
    lambda_grid(201)
}

/// n log-spaced nodes in [1e−3, 1e3] plus {0, ∞}.
pub fn lambda_grid(n: usize) -> Vec<ExtendedParam> {
    let mut grid = vec![ExtendedParam::Finite(0.0)];
    for i in 0..n {
        let t = i as f64 / (n - 1) as f64;
        grid.push(ExtendedParam::Finite(10f64.powf(-3.0 + 6.0 * t)));
    }
    grid.push(ExtendedParam::Infinity);
    grid
}

/// Fit canonical data to the samples: non-negative least squares over the
/// λ-grid masses, f1 ≥ 0, and d1 split as a difference of non-negative parts.
///
/// The inverse problem is solved in two phases. A first NNLS pass runs on the
/// caller's grid; because positivity forbids the signed combinations that
/// would interpolate between nodes, an atom falling off the grid is then
/// localized by deterministic refinement — active nodes are bracketed by
/// geometrically closer candidates and the fit repeated while it improves.
pub fn fit_measure(
    samples: &SampleSet,
    grid: &[ExtendedParam],
    tol: f64,
) -> Result<FitResult> {
    if grid.is_empty() {
        return Err(Error::InvalidSamples("empty lambda grid".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::NonPositive {
            name: "tol",
            value: tol,
        });
    }
    let scale = samples
        .points
        .iter()
        .fold(0.0f64, |s, &(_, v)| s.max(v.abs()))
        .max(1.0);

    let mut nodes: Vec<ExtendedParam> = grid.to_vec();
    nodes.sort_by(|a, b| a.total_cmp(b));
    nodes.dedup_by(|a, b| a.approx_eq(b, 1e-14));
    let mut best = solve_on_nodes(samples, &nodes, tol * scale)?;

    // half the initial log-spacing of the finite grid, shrunk each round
    let mut ratio = initial_refinement_ratio(&nodes);
    for _ in 0..48 {
        if best.rms <= 1e-13 * scale || ratio <= 1.0 + 1e-14 {
            break;
        }
        let mut candidates = nodes.clone();
        for (pos, _) in best.active.iter() {
            if let Some(l) = pos.as_finite() {
                if l > 0.0 {
                    candidates.push(ExtendedParam::Finite(l * ratio));
                    candidates.push(ExtendedParam::Finite(l / ratio));
                }
            }
        }
        candidates.sort_by(|a, b| a.total_cmp(b));
        candidates.dedup_by(|a, b| a.approx_eq(b, 1e-14 * 1.0f64.max(a.as_finite().unwrap_or(0.0))));
        let trial = solve_on_nodes(samples, &candidates, tol * scale)?;
        if trial.rms < best.rms {
            best = trial;
            nodes = candidates;
        }
        ratio = ratio.sqrt();
    }

    best = polish_positions(samples, best, tol * scale)?;

    let f = OcFunction::new(
        best.f1,
        best.d1,
        FiniteMeasure::from_atoms(best.active.clone())?,
    )?;
    let mut ss = 0.0;
    for &(x, fx) in &samples.points {
        let r = f.evaluate(x)? - fx;
        ss += r * r;
    }
    Ok(FitResult {
        f,
        rms_residual: (ss / samples.points.len() as f64).sqrt(),
        kkt_residual: best.kkt,
    })
}

/// Per-atom position polish: with the support fixed except for one finite
/// position, the residual is a smooth function of that position, so a
/// golden-section search in log λ localizes it to near machine precision;
/// masses are re-solved by NNLS at every probe (variable projection).
fn polish_positions(samples: &SampleSet, mut best: GridFit, tol: f64) -> Result<GridFit> {
    const GOLD: f64 = 0.618_033_988_749_894_9;
    let mut halfwidth = 0.05f64; // in ln λ, about the finest grid spacing
    for _pass in 0..3 {
        let positions: Vec<ExtendedParam> = best.active.iter().map(|(p, _)| *p).collect();
        for (i, pos) in positions.iter().enumerate() {
            let Some(center) = pos.as_finite().filter(|&l| l > 0.0) else {
                continue;
            };
            let rms_at = |logl: f64| -> Result<f64> {
                let mut nodes = positions.clone();
                nodes[i] = ExtendedParam::Finite(logl.exp());
                Ok(solve_on_nodes(samples, &nodes, tol)?.rms)
            };
            let (mut a, mut b) = (center.ln() - halfwidth, center.ln() + halfwidth);
            let (mut x1, mut x2) = (b - GOLD * (b - a), a + GOLD * (b - a));
            let (mut f1, mut f2) = (rms_at(x1)?, rms_at(x2)?);
            for _ in 0..60 {
                if f1 <= f2 {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - GOLD * (b - a);
                    f1 = rms_at(x1)?;
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + GOLD * (b - a);
                    f2 = rms_at(x2)?;
                }
            }
            let logl = if f1 <= f2 { x1 } else { x2 };
            let mut nodes = positions.clone();
            nodes[i] = ExtendedParam::Finite(logl.exp());
            let trial = solve_on_nodes(samples, &nodes, tol)?;
            if trial.rms < best.rms {
                best = trial;
            }
        }
        halfwidth *= 0.1;
    }
    Ok(best)
}

/// Geometric mean of adjacent-node ratios of the positive finite grid part.
fn initial_refinement_ratio(nodes: &[ExtendedParam]) -> f64 {
    let finite: Vec<f64> = nodes
        .iter()
        .filter_map(|p| p.as_finite())
        .filter(|&v| v > 0.0)
        .collect();
    let mut worst: f64 = 1.0;
    for w in finite.windows(2) {
        worst = worst.max(w[1] / w[0]);
    }
    worst.sqrt().max(1.0 + 1e-12)
}

struct GridFit {
    f1: f64,
    d1: f64,
    active: Vec<(ExtendedParam, f64)>,
    rms: f64,
    kkt: f64,
}

/// One NNLS solve over a fixed node set.
fn solve_on_nodes(samples: &SampleSet, nodes: &[ExtendedParam], tol: f64) -> Result<GridFit> {
    let m = samples.points.len();
    // columns: f1, d1+, d1−, then one kernel per node
    let ncols = 3 + nodes.len();
    let mut a = vec![0.0; m * ncols];
    let mut y = vec![0.0; m];
    for (row, &(x, fx)) in samples.points.iter().enumerate() {
        y[row] = fx;
        a[row * ncols] = 1.0;
        a[row * ncols + 1] = x - 1.0;
        a[row * ncols + 2] = 1.0 - x;
        for (k, &pos) in nodes.iter().enumerate() {
            a[row * ncols + 3 + k] = kernel(pos, x);
        }
    }
    let sol = nnls(&a, &y, m, ncols, tol)?;
    let mut active = Vec::new();
    for (k, &pos) in nodes.iter().enumerate() {
        let mass = sol.x[3 + k];
        if mass > 0.0 {
            active.push((pos, mass));
        }
    }
    let mut ss = 0.0;
    for i in 0..m {
        let mut model = 0.0;
        for j in 0..ncols {
            if sol.x[j] != 0.0 {
                model += a[i * ncols + j] * sol.x[j];
            }
        }
        let r = model - y[i];
        ss += r * r;
    }
    Ok(GridFit {
        f1: sol.x[0],
        d1: sol.x[1] - sol.x[2],
        active,
        rms: (ss / m as f64).sqrt(),
        kkt: sol.kkt,
    })
}

struct NnlsSolution {
    x: Vec<f64>,
    kkt: f64,
}

/// Lawson–Hanson non-negative least squares on a dense row-major matrix.
fn nnls(a: &[f64], y: &[f64], m: usize, n: usize, tol: f64) -> Result<NnlsSolution> {
    let col = |j: usize, i: usize| a[i * n + j];
    let mut x = vec![0.0; n];
    let mut passive = vec![false; n];
    // entering variables that brought no objective progress; re-admitting
    // them would cycle on near-collinear columns
    let mut banned = vec![false; n];
    let mut iterations = 0usize;
    let mut kkt;
    let mut last_obj = f64::INFINITY;
    let mut last_entry: Option<usize> = None;

    loop {
        // gradient w = A\u1d40(y \u2212 Ax)
        let mut resid = y.to_vec();
        for i in 0..m {
            let mut ax = 0.0;
            for j in 0..n {
                if x[j] != 0.0 {
                    ax += col(j, i) * x[j];
                }
            }
            resid[i] -= ax;
        }
        let obj: f64 = resid.iter().map(|r| r * r).sum();
        if let Some(prev) = last_entry {
            if obj >= last_obj {
                passive[prev] = false;
                banned[prev] = true;
                x[prev] = 0.0;
            }
        }
        last_obj = obj;
        let w: Vec<f64> = (0..n)
            .map(|j| (0..m).map(|i| col(j, i) * resid[i]).sum())
            .collect();
        kkt = (0..n)
            .map(|j| if passive[j] { w[j].abs() } else { w[j].max(0.0) })
            .fold(0.0f64, f64::max);
        let candidate = (0..n)
            .filter(|&j| !passive[j] && !banned[j])
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let j_in = match candidate {
            Some(j) if w[j] > tol => j,
            _ => break,
        };
        passive[j_in] = true;
        last_entry = Some(j_in);

        // inner loop: least squares on the passive set, stepping back when a
        // passive coordinate would turn negative
        loop {
            iterations += 1;
            if iterations > MAX_ITERATIONS {
                return Err(Error::FitDidNotConverge {
                    tol,
                    iterations: MAX_ITERATIONS,
                    reached: kkt,
                });
            }
            let cols: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let z = least_squares(a, y, m, n, &cols);
            if z.iter().all(|&v| v > 0.0) {
                for (idx, &j) in cols.iter().enumerate() {
                    x[j] = z[idx];
                }
                for j in 0..n {
                    if !passive[j] {
                        x[j] = 0.0;
                    }
                }
                break;
            }
            // step from x toward z, stopping at the first boundary
            let mut alpha = f64::INFINITY;
            for (idx, &j) in cols.iter().enumerate() {
                if z[idx] <= 0.0 {
                    let step = x[j] / (x[j] - z[idx]);
                    alpha = alpha.min(step);
                }
            }
            if !(alpha.is_finite()) {
                alpha = 0.0;
            }
            for (idx, &j) in cols.iter().enumerate() {
                x[j] += alpha * (z[idx] - x[j]);
            }
            let mut removed = false;
            for &j in &cols {
                if x[j] <= 1e-14 {
                    x[j] = 0.0;
                    passive[j] = false;
                    removed = true;
                }
            }
            if !removed {
                // a zero step that frees nothing would loop forever
                break;
            }
        }
    }
    Ok(NnlsSolution { x, kkt })
}

/// Unconstrained least squares over the selected columns via Householder QR.
fn least_squares(a: &[f64], y: &[f64], m: usize, n: usize, cols: &[usize]) -> Vec<f64> {
    let k = cols.len();
    // working copy, column-major k columns of length m
    let mut r = vec![0.0; m * k];
    for (cj, &j) in cols.iter().enumerate() {
        for i in 0..m {
            r[cj * m + i] = a[i * n + j];
        }
    }
    let mut b = y.to_vec();
    for p in 0..k.min(m) {
        // Householder vector for column p below row p
        let norm: f64 = (p..m).map(|i| r[p * m + i] * r[p * m + i]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let sign = if r[p * m + p] >= 0.0 { 1.0 } else { -1.0 };
        let mut v: Vec<f64> = (p..m).map(|i| r[p * m + i]).collect();
        v[0] += sign * norm;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for c in p..k {
            let dot: f64 = (p..m).map(|i| v[i - p] * r[c * m + i]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in p..m {
                r[c * m + i] -= f * v[i - p];
            }
        }
        let dot: f64 = (p..m).map(|i| v[i - p] * b[i]).sum();
        let f = 2.0 * dot / vnorm2;
        for i in p..m {
            b[i] -= f * v[i - p];
        }
    }
    // back substitution on the upper-triangular factor
    let mut z = vec![0.0; k];
    for p in (0..k.min(m)).rev() {
        let mut s = b[p];
        for c in p + 1..k {
            s -= r[c * m + p] * z[c];
        }
        let diag = r[p * m + p];
        z[p] = if diag.abs() > 1e-300 { s / diag } else { 0.0 };
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(v: f64) -> ExtendedParam {
        ExtendedParam::Finite(v)
    }

    const INF: ExtendedParam = ExtendedParam::Infinity;

    #[test]
    fn sample_set_validation() {
        assert!(SampleSet::new(vec![(1.0, 1.0); 8]).is_err());
        assert!(SampleSet::new((0..7).map(|i| (i as f64 + 1.0, 1.0)).collect()).is_err());
        assert!(SampleSet::new((0..8).map(|i| (i as f64 + 1.0, -1.0)).collect()).is_err());
        let s = SampleSet::new((0..8).rev().map(|i| (i as f64 + 1.0, 1.0)).collect()).unwrap();
        assert!(s.points().windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn fits_atomic_ground_truth() {
        // 2·g_{∞,1} + 0.5
        let truth = OcFunction::make_extreme(INF, fin(1.0))
            .scale(2.0)
            .unwrap()
            .add(
                &OcFunction::make_extreme(INF, INF)
                    .scale(0.5)
                    .unwrap(),
            );
        let samples = SampleSet::from_function(&truth, 1e-2, 1e2, 50).unwrap();
        let fit = fit_measure(&samples, &default_lambda_grid(), 1e-10).unwrap();
        assert!(fit.rms_residual <= 1e-8, "rms = {}", fit.rms_residual);
    }

    #[test]
    fn fits_affine_targets_with_empty_measure() {
        let truth = OcFunction::affine(0.7, 0.3).unwrap();
        let samples = SampleSet::from_function(&truth, 1e-2, 1e2, 40).unwrap();
        let fit = fit_measure(&samples, &default_lambda_grid(), 1e-10).unwrap();
        assert!(fit.f.nu().total_mass() <= 1e-10);
        assert!((fit.f.f1() - 1.0).abs() <= 1e-8);
        assert!((fit.f.d1() - 0.3).abs() <= 1e-8);
    }

    #[test]
    fn round_trip_with_held_out_points() {
        let truth = OcFunction::affine(0.0, 1.0)
            .unwrap()
            .add(&OcFunction::make_extreme(INF, fin(1.0)));
        let samples = SampleSet::from_function(&truth, 1e-2, 1e2, 60).unwrap();
        let fit = fit_measure(&samples, &default_lambda_grid(), 1e-10).unwrap();
        // held-out grid offset from the training abscissas
        for i in 0..50 {
            let x = 1.7e-2 * (1e2 / 1.7e-2_f64).powf(i as f64 / 49.0);
            let want = truth.evaluate(x).unwrap();
            let got = fit.f.evaluate(x).unwrap();
            assert!((got - want).abs() <= 1e-7 * want.abs().max(1.0), "x={x}");
        }
    }

    #[test]
    fn sparse_atom_round_trip() {
        let truth = OcFunction::make_extreme(fin(2.0), fin(0.3))
            .scale(0.8)
            .unwrap()
            .add(&OcFunction::make_extreme(fin(0.5), fin(7.0)).scale(0.1).unwrap())
            .add(&OcFunction::make_extreme(INF, INF).scale(0.4).unwrap());
        let samples = SampleSet::from_function(&truth, 1e-2, 1e2, 60).unwrap();
        let fit = fit_measure(&samples, &default_lambda_grid(), 1e-12).unwrap();
        let mut ss = 0.0;
        for i in 0..50 {
            let x = 2.3e-2 * (9e1 / 2.3e-2_f64).powf(i as f64 / 49.0);
            let want = truth.evaluate(x).unwrap();
            let d = (fit.f.evaluate(x).unwrap() - want) / want.abs().max(1.0);
            ss += d * d;
        }
        let rms = (ss / 50.0).sqrt();
        assert!(rms <= 1e-7, "held-out relative rms = {rms}");
    }

    #[test]
    fn doubling_the_grid_never_hurts() {
        let truth = OcFunction::make_extreme(INF, fin(1.0))
            .scale(1.5)
            .unwrap()
            .add(&OcFunction::affine(0.2, 0.6).unwrap());
        let samples = SampleSet::from_function(&truth, 1e-2, 1e2, 50).unwrap();
        let coarse = fit_measure(&samples, &lambda_grid(101), 1e-10).unwrap();
        let fine = fit_measure(&samples, &lambda_grid(201), 1e-10).unwrap();
        assert!(fine.rms_residual <= coarse.rms_residual + 1e-12);
    }

    #[test]
    fn fit_reports_kkt_and_respects_cone_checks() {
        let truth = OcFunction::make_extreme(fin(1.0), fin(1.0));
        let samples = SampleSet::from_function(&truth, 1e-2, 1e2, 40).unwrap();
        let fit = fit_measure(&samples, &default_lambda_grid(), 1e-8).unwrap();
        assert!(fit.kkt_residual.is_finite());
        // fitted function passes construction, so it evaluates anywhere
        assert!(fit.f.evaluate(123.0).unwrap().is_finite());
        assert!(fit_measure(&samples, &[], 1e-8).is_err());
        assert!(fit_measure(&samples, &default_lambda_grid(), 0.0).is_err());
    }
}
