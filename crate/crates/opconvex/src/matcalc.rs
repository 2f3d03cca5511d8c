//! Desk-scale matrix verification: symmetric eigendecomposition, functional
//! calculus, randomized witness searches for matrix convexity and
//! monotonicity, Loewner-matrix PSD tests, and geometric-mean log-convexity
//! spot checks.
//!
//! Matrices are real symmetric of order 2..=16; that is enough to falsify
//! operator statements, never to certify them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::ocfun::OcFunction;

/// Smallest admissible order.
pub const MIN_ORDER: usize = 2;

/// Largest admissible order of the Jacobi solver.
pub const MAX_ORDER: usize = 16;

/// Eigenvalues below this count as outside (0, ∞).
pub const SPECTRUM_FLOOR: f64 = 1e-8;

/// Relative PSD margin of the witness searches.
pub const PSD_MARGIN: f64 = 1e-8;

/// Per-trial seed stride (golden-ratio multiplier).
const SEED_STRIDE: u64 = 0x9E3779B97F4A7C15;

/// A real symmetric matrix, stored dense row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Build from an entry generator; the strict lower triangle mirrors the
    /// upper one, so the result is symmetric by construction.
    pub fn from_fn(n: usize, mut entry: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        if !(MIN_ORDER..=MAX_ORDER).contains(&n) {
            return Err(Error::Matrix(format!(
                "order {n} outside {MIN_ORDER}..={MAX_ORDER}"
            )));
        }
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = entry(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Ok(SymMatrix { n, data })
    }

    pub fn diag(entries: &[f64]) -> Result<Self> {
        Self::from_fn(entries.len(), |i, j| if i == j { entries[i] } else { 0.0 })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn max_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    fn zip(&self, other: &SymMatrix, op: impl Fn(f64, f64) -> f64) -> SymMatrix {
        assert_eq!(self.n, other.n, "order mismatch");
        SymMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| op(*a, *b))
                .collect(),
        }
    }

    /// Q · diag(vals) · Qᵀ for an orthogonal Q given row-major.
    fn from_spectral(q: &[f64], vals: &[f64]) -> SymMatrix {
        let n = vals.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let mut v = 0.0;
                for k in 0..n {
                    v += q[i * n + k] * vals[k] * q[j * n + k];
                }
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        SymMatrix { n, data }
    }
}

/// Eigendecomposition A = Q·diag(eigvals)·Qᵀ; eigenvalues ascending, columns
/// of Q are the matching eigenvectors.
#[derive(Debug, Clone)]
pub struct SpectralDecomp {
    pub q: Vec<f64>,
    pub eigvals: Vec<f64>,
}

impl SpectralDecomp {
    pub fn reconstruct(&self) -> SymMatrix {
        SymMatrix::from_spectral(&self.q, &self.eigvals)
    }
}

/// Cyclic Jacobi eigendecomposition; always converges for symmetric input.
pub fn eig_sym(a: &SymMatrix) -> SpectralDecomp {
    let n = a.n;
    let mut m = a.data.clone();
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        q[i * n + i] = 1.0;
    }
    let norm: f64 = a.data.iter().map(|v| v * v).sum::<f64>().sqrt();
    let target = 1e-14 * norm.max(f64::MIN_POSITIVE);
    for _sweep in 0..64 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |j| *j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= target {
            break;
        }
        for p in 0..n - 1 {
            for r in p + 1..n {
                let apq = m[p * n + r];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[r * n + r];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkr = m[k * n + r];
                    m[k * n + p] = c * mkp - s * mkr;
                    m[k * n + r] = s * mkp + c * mkr;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mrk = m[r * n + k];
                    m[p * n + k] = c * mpk - s * mrk;
                    m[r * n + k] = s * mpk + c * mrk;
                }
                for k in 0..n {
                    let qkp = q[k * n + p];
                    let qkr = q[k * n + r];
                    q[k * n + p] = c * qkp - s * qkr;
                    q[k * n + r] = s * qkp + c * qkr;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));
    let eigvals: Vec<f64> = order.iter().map(|&i| m[i * n + i]).collect();
    let mut q_sorted = vec![0.0; n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for k in 0..n {
            q_sorted[k * n + new_col] = q[k * n + old_col];
        }
    }
    SpectralDecomp {
        q: q_sorted,
        eigvals,
    }
}

/// Minimum eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(a: &SymMatrix) -> f64 {
    eig_sym(a).eigvals[0]
}

/// A scalar function usable in the functional calculus. Implemented by
/// `OcFunction` and by raw callables serving as negative controls.
pub trait ScalarFunction {
    fn value(&self, x: f64) -> f64;
    fn slope(&self, x: f64) -> f64;
}

impl ScalarFunction for OcFunction {
    fn value(&self, x: f64) -> f64 {
        self.evaluate(x).expect("spectrum checked positive")
    }

    fn slope(&self, x: f64) -> f64 {
        self.derivative(x).expect("spectrum checked positive")
    }
}

/// A raw scalar function with its derivative, for non-cone negative controls
/// such as x² and x³.
pub struct RawScalarFn {
    pub f: fn(f64) -> f64,
    pub df: fn(f64) -> f64,
}

impl RawScalarFn {
    pub fn cube() -> Self {
        RawScalarFn {
            f: |x| x * x * x,
            df: |x| 3.0 * x * x,
        }
    }

    pub fn square() -> Self {
        RawScalarFn {
            f: |x| x * x,
            df: |x| 2.0 * x,
        }
    }
}

impl ScalarFunction for RawScalarFn {
    fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    fn slope(&self, x: f64) -> f64 {
        (self.df)(x)
    }
}

/// f(A) by the usual functional calculus; the spectrum must lie in (0, ∞).
pub fn matrix_apply(f: &impl ScalarFunction, a: &SymMatrix) -> Result<SymMatrix> {
    let d = eig_sym(a);
    if d.eigvals[0] <= SPECTRUM_FLOOR {
        return Err(Error::SpectrumOutOfDomain(d.eigvals[0]));
    }
    let vals: Vec<f64> = d.eigvals.iter().map(|&x| f.value(x)).collect();
    Ok(SymMatrix::from_spectral(&d.q, &vals))
}

fn rng_for_trial(seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial.wrapping_mul(SEED_STRIDE)))
}

/// Random orthogonal matrix from the QR factorization of a Gaussian matrix.
fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    // Gram-Schmidt on Gaussian columns
    let mut cols: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect())
        .collect();
    for j in 0..n {
        for k in 0..j {
            let dot: f64 = (0..n).map(|i| cols[j][i] * cols[k][i]).sum();
            for i in 0..n {
                cols[j][i] -= dot * cols[k][i];
            }
        }
        let norm: f64 = cols[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    let mut q = vec![0.0; n * n];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            q[i * n + j] = col[i];
        }
    }
    q
}

/// Random SPD matrix: log-uniform eigenvalues in [1e−2, 1e2] conjugated by a
/// random orthogonal factor.
pub fn random_spd(n: usize, rng: &mut ChaCha8Rng) -> SymMatrix {
    let vals: Vec<f64> = (0..n)
        .map(|_| 10f64.powf(rng.gen_range(-2.0..2.0)))
        .collect();
    let q = random_orthogonal(n, rng);
    SymMatrix::from_spectral(&q, &vals)
}

/// A matrix-convexity violation: the defect (1−t)f(A)+t·f(B) − f((1−t)A+tB)
/// fails to be PSD.
#[derive(Debug, Clone)]
pub struct ConvexityWitness {
    pub trial: u64,
    pub a: SymMatrix,
    pub b: SymMatrix,
    pub t: f64,
    pub min_eig: f64,
}

fn order_ok(n: usize) -> Result<()> {
    if !(MIN_ORDER..=MAX_ORDER).contains(&n) {
        return Err(Error::Matrix(format!(
            "order {n} outside {MIN_ORDER}..={MAX_ORDER}"
        )));
    }
    Ok(())
}

/// Randomized search for a matrix-convexity violation of f at order n.
/// Deterministic for a fixed seed; `None` means no violation was found.
pub fn convexity_witness_search(
    f: &impl ScalarFunction,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<Option<ConvexityWitness>> {
    order_ok(n)?;
    for trial in 0..trials {
        let mut rng = rng_for_trial(seed, trial);
        let a = random_spd(n, &mut rng);
        let b = random_spd(n, &mut rng);
        let t: f64 = rng.gen_range(0.0..1.0);
        let mix = a.scale(1.0 - t).add(&b.scale(t));
        let defect = matrix_apply(f, &a)?
            .scale(1.0 - t)
            .add(&matrix_apply(f, &b)?.scale(t))
            .sub(&matrix_apply(f, &mix)?);
        let scale = defect.max_norm().max(1.0);
        let min_eig = min_eigenvalue(&defect);
        if min_eig < -PSD_MARGIN * scale {
            return Ok(Some(ConvexityWitness {
                trial,
                a,
                b,
                t,
                min_eig,
            }));
        }
    }
    Ok(None)
}

/// A monotonicity violation: A ≥ B but f(B) − f(A) is not PSD.
#[derive(Debug, Clone)]
pub struct MonotoneWitness {
    pub trial: u64,
    pub a: SymMatrix,
    pub b: SymMatrix,
    pub min_eig: f64,
}

/// Randomized check that f is operator monotone decreasing: samples pairs
/// with A − B PSD and looks for f(B) − f(A) failing to be PSD.
pub fn monotone_decreasing_check(
    f: &impl ScalarFunction,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<Option<MonotoneWitness>> {
    order_ok(n)?;
    for trial in 0..trials {
        let mut rng = rng_for_trial(seed, trial);
        let b = random_spd(n, &mut rng);
        let bump = random_spd(n, &mut rng).scale(10f64.powf(rng.gen_range(-2.0..0.0)));
        let a = b.add(&bump);
        let defect = matrix_apply(f, &b)?.sub(&matrix_apply(f, &a)?);
        let scale = defect.max_norm().max(1.0);
        let min_eig = min_eigenvalue(&defect);
        if min_eig < -PSD_MARGIN * scale {
            return Ok(Some(MonotoneWitness {
                trial,
                a,
                b,
                min_eig,
            }));
        }
    }
    Ok(None)
}

/// The Loewner (divided-difference) matrix of a scalar function at the given
/// points; the diagonal holds the derivative.
pub fn loewner_matrix(g: &impl ScalarFunction, points: &[f64]) -> Result<SymMatrix> {
    if !(MIN_ORDER..=12).contains(&points.len()) {
        return Err(Error::Matrix(format!(
            "need 2..=12 points, got {}",
            points.len()
        )));
    }
    for (i, &x) in points.iter().enumerate() {
        if !(x > 0.0) {
            return Err(Error::NonPositive {
                name: "point",
                value: x,
            });
        }
        for &y in &points[i + 1..] {
            if (x - y).abs() <= 1e-12 * x.abs().max(1.0) {
                return Err(Error::Matrix(format!("duplicate points at {x}")));
            }
        }
    }
    SymMatrix::from_fn(points.len(), |i, j| {
        if i == j {
            g.slope(points[i])
        } else {
            (g.value(points[i]) - g.value(points[j])) / (points[i] - points[j])
        }
    })
}

/// PSD test of the Loewner matrix of h(x) = (f(x)−f(α))/(x−α), the slope
/// function of f at α. For operator convex f this h is operator monotone and
/// the matrix is PSD.
pub fn loewner_psd_check(f: &OcFunction, alpha: f64, points: &[f64]) -> Result<(f64, bool)> {
    if !(alpha > 0.0) {
        return Err(Error::NonPositive {
            name: "alpha",
            value: alpha,
        });
    }
    for &x in points {
        if (x - alpha).abs() <= 1e-12 * alpha.max(1.0) {
            return Err(Error::Matrix(format!("point {x} coincides with alpha")));
        }
    }
    let f_alpha = f.evaluate(alpha)?;
    let h = SlopeFunction {
        f,
        alpha,
        f_alpha,
    };
    loewner_psd_check_raw(&h, points)
}

/// PSD test of the Loewner matrix of an arbitrary scalar function.
pub fn loewner_psd_check_raw(
    g: &impl ScalarFunction,
    points: &[f64],
) -> Result<(f64, bool)> {
    let l = loewner_matrix(g, points)?;
    let scale = l.max_norm().max(1.0);
    let min_eig = min_eigenvalue(&l);
    Ok((min_eig, min_eig >= -1e-10 * scale))
}

/// h(x) = (f(x) − f(α))/(x − α) with its closed-form derivative.
struct SlopeFunction<'a> {
    f: &'a OcFunction,
    alpha: f64,
    f_alpha: f64,
}

impl ScalarFunction for SlopeFunction<'_> {
    fn value(&self, x: f64) -> f64 {
        (self.f.value(x) - self.f_alpha) / (x - self.alpha)
    }

    fn slope(&self, x: f64) -> f64 {
        let dx = x - self.alpha;
        (self.f.slope(x) * dx - (self.f.value(x) - self.f_alpha)) / (dx * dx)
    }
}

/// The matrix geometric mean A # B = A^{1/2}(A^{−1/2} B A^{−1/2})^{1/2} A^{1/2}.
pub fn geometric_mean(a: &SymMatrix, b: &SymMatrix) -> Result<SymMatrix> {
    let da = eig_sym(a);
    if da.eigvals[0] <= SPECTRUM_FLOOR {
        return Err(Error::SpectrumOutOfDomain(da.eigvals[0]));
    }
    let db = eig_sym(b);
    if db.eigvals[0] <= SPECTRUM_FLOOR {
        return Err(Error::SpectrumOutOfDomain(db.eigvals[0]));
    }
    let sqrt_vals: Vec<f64> = da.eigvals.iter().map(|v| v.sqrt()).collect();
    let inv_sqrt_vals: Vec<f64> = da.eigvals.iter().map(|v| 1.0 / v.sqrt()).collect();
    let a_half = SymMatrix::from_spectral(&da.q, &sqrt_vals);
    let a_inv_half = SymMatrix::from_spectral(&da.q, &inv_sqrt_vals);
    let inner = sandwich(&a_inv_half, b);
    let di = eig_sym(&inner);
    let inner_sqrt = SymMatrix::from_spectral(
        &di.q,
        &di.eigvals.iter().map(|v| v.max(0.0).sqrt()).collect::<Vec<_>>(),
    );
    Ok(sandwich(&a_half, &inner_sqrt))
}

/// M · X · M for symmetric M, X.
fn sandwich(m: &SymMatrix, x: &SymMatrix) -> SymMatrix {
    let n = m.n;
    let mut mx = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut v = 0.0;
            for k in 0..n {
                v += m.get(i, k) * x.get(k, j);
            }
            mx[i * n + j] = v;
        }
    }
    SymMatrix::from_fn(n, |i, j| {
        let mut v = 0.0;
        for k in 0..n {
            v += mx[i * n + k] * m.get(k, j);
        }
        v
    })
    .expect("order already validated")
}

/// A log-convexity violation: f((A+B)/2) ≤ f(A) # f(B) fails.
#[derive(Debug, Clone)]
pub struct LogConvexityWitness {
    pub trial: u64,
    pub a: SymMatrix,
    pub b: SymMatrix,
    pub min_eig: f64,
}

/// Spot check of operator log-convexity, f((A+B)/2) ≤ f(A) # f(B), expected
/// to hold for operator monotone decreasing f.
pub fn log_convexity_spot_check(
    f: &OcFunction,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<Option<LogConvexityWitness>> {
    order_ok(n)?;
    for trial in 0..trials {
        let mut rng = rng_for_trial(seed, trial);
        let a = random_spd(n, &mut rng);
        let b = random_spd(n, &mut rng);
        let mid = a.add(&b).scale(0.5);
        let defect = geometric_mean(&matrix_apply(f, &a)?, &matrix_apply(f, &b)?)?
            .sub(&matrix_apply(f, &mid)?);
        let scale = defect.max_norm().max(1.0);
        let min_eig = min_eigenvalue(&defect);
        if min_eig < -PSD_MARGIN * scale {
            return Ok(Some(LogConvexityWitness {
                trial,
                a,
                b,
                min_eig,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param::ExtendedParam;

    fn fin(v: f64) -> ExtendedParam {
        ExtendedParam::Finite(v)
    }

    #[test]
    fn eig_diagonal_and_exchange() {
        let d = eig_sym(&SymMatrix::diag(&[3.0, 1.0, 2.0]).unwrap());
        assert_eq!(d.eigvals, vec![1.0, 2.0, 3.0]);

        let x = SymMatrix::from_fn(2, |i, j| if i != j { 1.0 } else { 0.0 }).unwrap();
        let d = eig_sym(&x);
        assert!((d.eigvals[0] + 1.0).abs() < 1e-14);
        assert!((d.eigvals[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_reconstructs_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 5, 16] {
            let a = random_spd(n, &mut rng);
            let d = eig_sym(&a);
            let r = d.reconstruct();
            let norm = a.max_norm();
            for i in 0..n {
                for j in 0..n {
                    assert!((r.get(i, j) - a.get(i, j)).abs() <= 1e-10 * norm);
                }
            }
            // orthogonality of Q
            for i in 0..n {
                for j in 0..n {
                    let dot: f64 = (0..n).map(|k| d.q[k * n + i] * d.q[k * n + j]).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - want).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn matrix_apply_examples() {
        let sq = OcFunction::make_extreme(fin(0.0), ExtendedParam::Infinity);
        let r = matrix_apply(&sq, &SymMatrix::diag(&[1.0, 2.0]).unwrap()).unwrap();
        assert!((r.get(0, 0) - 1.0).abs() < 1e-12 && (r.get(1, 1) - 4.0).abs() < 1e-12);
        assert!(r.get(0, 1).abs() < 1e-12);

        let one = OcFunction::make_extreme(ExtendedParam::Infinity, ExtendedParam::Infinity);
        let a = SymMatrix::from_fn(3, |i, j| if i == j { 2.0 } else { 0.5 }).unwrap();
        let r = matrix_apply(&one, &a).unwrap();
        let id = SymMatrix::identity(3).unwrap();
        assert!(r.sub(&id).max_norm() < 1e-12);

        let g = OcFunction::make_extreme(fin(1.0), fin(0.0));
        let r = matrix_apply(&g, &SymMatrix::diag(&[1.0, 4.0]).unwrap()).unwrap();
        assert!(r.get(0, 0).abs() < 1e-12);
        assert!((r.get(1, 1) - 9.0 / 4.0).abs() < 1e-12);

        assert!(matrix_apply(&g, &SymMatrix::diag(&[1.0, -1.0]).unwrap()).is_err());
    }

    #[test]
    fn convexity_search_passes_extreme_elements() {
        let g = OcFunction::make_extreme(fin(2.0), fin(3.0));
        assert!(convexity_witness_search(&g, 8, 200, 42).unwrap().is_none());
    }

    #[test]
    fn convexity_search_finds_cube_witness() {
        let w = convexity_witness_search(&RawScalarFn::cube(), 2, 1000, 42)
            .unwrap()
            .expect("x^3 is not operator convex");
        assert!(w.min_eig < 0.0);
        // reproducibility
        let w2 = convexity_witness_search(&RawScalarFn::cube(), 2, 1000, 42)
            .unwrap()
            .unwrap();
        assert_eq!(w.trial, w2.trial);
        assert!((w.min_eig - w2.min_eig).abs() < 1e-15);
    }

    #[test]
    fn affine_defect_is_exactly_zero() {
        let f = OcFunction::affine(1.0, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_spd(4, &mut rng);
        let b = random_spd(4, &mut rng);
        let t = 0.3;
        let mix = a.scale(1.0 - t).add(&b.scale(t));
        let defect = matrix_apply(&f, &a)
            .unwrap()
            .scale(1.0 - t)
            .add(&matrix_apply(&f, &b).unwrap().scale(t))
            .sub(&matrix_apply(&f, &mix).unwrap());
        assert!(defect.max_norm() <= 1e-12 * a.max_norm().max(b.max_norm()));
        assert!(convexity_witness_search(&f, 4, 50, 9).unwrap().is_none());
    }

    #[test]
    fn monotone_check_examples() {
        // 1/(x+1) = ½·φ₁ is operator monotone decreasing
        let f = crate::ocfun::phi(fin(1.0)).scale(0.5).unwrap();
        assert!(monotone_decreasing_check(&f, 6, 200, 11).unwrap().is_none());

        // x is increasing: a witness must appear
        let x = OcFunction::make_extreme(fin(0.0), fin(0.0));
        let w = monotone_decreasing_check(&x, 4, 200, 11).unwrap().unwrap();
        assert!(w.min_eig < 0.0);

        // constants give an exactly zero defect
        let one = OcFunction::make_extreme(ExtendedParam::Infinity, ExtendedParam::Infinity);
        assert!(monotone_decreasing_check(&one, 4, 100, 5).unwrap().is_none());
    }

    #[test]
    fn loewner_examples() {
        // operator convex f ⇒ slope function h operator monotone ⇒ PSD
        let f = OcFunction::make_extreme(ExtendedParam::Infinity, fin(1.0))
            .add(&OcFunction::affine(0.5, 1.0).unwrap());
        for points in [vec![0.5, 1.5, 4.0], vec![0.1, 0.2, 3.0, 7.0, 50.0]] {
            let (min_eig, psd) = loewner_psd_check(&f, 2.0, &points).unwrap();
            assert!(psd, "min_eig = {min_eig}");
        }

        // x² at {1,2,3}: divided differences [[2,3,4],[3,4,5],[4,5,6]]
        let l = loewner_matrix(&RawScalarFn::square(), &[1.0, 2.0, 3.0]).unwrap();
        for (i, row) in [[2.0, 3.0, 4.0], [3.0, 4.0, 5.0], [4.0, 5.0, 6.0]]
            .iter()
            .enumerate()
        {
            for (j, want) in row.iter().enumerate() {
                assert!((l.get(i, j) - want).abs() < 1e-14);
            }
        }
        let (min_eig, psd) = loewner_psd_check_raw(&RawScalarFn::square(), &[1.0, 2.0, 3.0])
            .unwrap();
        assert!(!psd && min_eig < 0.0);

        assert!(loewner_matrix(&RawScalarFn::square(), &[1.0, 1.0]).is_err());
        assert!(loewner_psd_check(&f, 2.0, &[2.0, 3.0]).is_err());
    }

    #[test]
    fn geometric_mean_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let a = random_spd(4, &mut rng);
        let g = geometric_mean(&a, &a).unwrap();
        assert!(g.sub(&a).max_norm() <= 1e-10 * a.max_norm());

        let a = SymMatrix::diag(&[1.0, 4.0]).unwrap();
        let b = SymMatrix::diag(&[4.0, 1.0]).unwrap();
        let g = geometric_mean(&a, &b).unwrap();
        assert!(g.sub(&SymMatrix::diag(&[2.0, 2.0]).unwrap()).max_norm() < 1e-10);

        assert!(geometric_mean(&a, &SymMatrix::diag(&[1.0, -2.0]).unwrap()).is_err());
    }

    #[test]
    fn log_convexity_spot_check_examples() {
        // 1/x is operator monotone decreasing, hence operator log-convex
        let inv = OcFunction::make_extreme(ExtendedParam::Infinity, fin(0.0));
        assert!(log_convexity_spot_check(&inv, 4, 100, 17).unwrap().is_none());
    }

    #[test]
    fn diagonal_apply_matches_scalar_evaluation() {
        let f = OcFunction::make_extreme(fin(1.0), fin(2.0))
            .add(&OcFunction::affine(0.2, 0.1).unwrap());
        let entries = [0.5, 1.0, 7.0];
        let r = matrix_apply(&f, &SymMatrix::diag(&entries).unwrap()).unwrap();
        for (i, &x) in entries.iter().enumerate() {
            assert!((r.get(i, i) - f.evaluate(x).unwrap()).abs() <= 1e-12);
        }
    }
}
