//! Extremal decompositions of strictly positive cone members.
//!
//! For f outside every face F_α there is a one-parameter family of extremal
//! decompositions f = a_α + c_α·x + (rest in F_α), indexed by the anchors α
//! between the argmin of f and the point whose tangent passes the origin.

use crate::error::{Error, Result};
use crate::faces::{face_rep, FaceRep};
use crate::ocfun::{OcFunction, NONNEG_TOL};
use crate::param::ExtendedParam;
use crate::roots::{bisect_decreasing, bisect_increasing};

/// Threshold (relative to f(1)) below which g(α) = f(α) − α·f'(α) counts as
/// having reached zero at the bracket ceiling, declaring α₁ = ∞.
const TANGENT_AT_INFINITY_TOL: f64 = 1e-14;

/// The admissible anchor interval [α₀, α₁] of the tangent family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionRange {
    /// argmin of f (0 when f is increasing from the boundary).
    pub alpha0: f64,
    /// Anchor whose tangent line passes through the origin; ∞ when none does.
    pub alpha1: ExtendedParam,
}

/// One member of the tangent family: f = a + c·x + remainder with the
/// remainder in F_α.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalDecomposition {
    pub a: f64,
    pub c: f64,
    pub remainder: FaceRep,
}

impl ExtremalDecomposition {
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        Ok(self.a + self.c * x + self.remainder.evaluate(x)?)
    }
}

/// Check that f is strictly positive with strictly increasing tail — i.e. f
/// lies in no face F_α and the tangent family applies.
fn require_outside_faces(f: &OcFunction) -> Result<()> {
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let scale = f.scale_hint();
    let b = f.boundary();
    if b.in_f_zero(scale) {
        return Err(Error::OutOfRange(
            "f vanishes at 0; it has the unique F_0 decomposition instead".into(),
        ));
    }
    if b.slope_at_inf.is_finite() && b.slope_at_inf.abs() <= NONNEG_TOL * scale {
        return Err(Error::OutOfRange(
            "f'(infinity) = 0; f has the unique F_infinity decomposition instead".into(),
        ));
    }
    let argmin = interior_argmin(f);
    if !(f.evaluate(argmin.max(1e-9))? > VANISH_GUARD * scale) {
        return Err(Error::OutOfRange(format!(
            "f vanishes near {argmin}; it has the unique F_alpha decomposition instead"
        )));
    }
    Ok(())
}

const VANISH_GUARD: f64 = 1e-10;

/// argmin of the convex f; 0 when f is non-decreasing from the left edge.
fn interior_argmin(f: &OcFunction) -> f64 {
    let deriv = |x: f64| f.derivative(x).unwrap_or(f64::NEG_INFINITY);
    if deriv(1e-9) >= 0.0 {
        return 0.0;
    }
    bisect_increasing(deriv, 1e-9, 1.0).unwrap_or(0.0)
}

/// The anchor range [α₀, α₁] of the tangent family of f.
pub fn decomposition_range(f: &OcFunction) -> Result<DecompositionRange> {
    require_outside_faces(f)?;
    let alpha0 = interior_argmin(f);
    // g(α) = f(α) − α·f'(α) is decreasing; its zero is where the tangent
    // passes the origin. When even the α → ∞ limit of g stays non-negative,
    // the tangent meets the origin only at infinity.
    if f.tangent_intercept_at_infinity() >= -TANGENT_AT_INFINITY_TOL * f.evaluate(1.0)? {
        return Ok(DecompositionRange {
            alpha0,
            alpha1: ExtendedParam::Infinity,
        });
    }
    let g = |x: f64| f.tangent_intercept(x).unwrap_or(f64::INFINITY);
    let lo = alpha0.max(1e-9);
    let alpha1 = match bisect_decreasing(g, lo, lo.max(1.0)) {
        Some(root) => ExtendedParam::Finite(root),
        None => ExtendedParam::Infinity,
    };
    Ok(DecompositionRange { alpha0, alpha1 })
}

/// Tangent line a + c·x of f at α; both coefficients are non-negative exactly
/// when α lies in the admissible range.
pub fn tangent_line(f: &OcFunction, alpha: f64) -> Result<(f64, f64)> {
    require_outside_faces(f)?;
    if alpha < 0.0 {
        return Err(Error::Negative {
            name: "alpha",
            value: alpha,
        });
    }
    let (value, slope) = if alpha == 0.0 {
        let b = f.boundary();
        let s = f.slope_at_zero().ok_or_else(|| {
            Error::OutOfRange("f'(0+) diverges; alpha = 0 is outside the range".into())
        })?;
        if !b.f_at_0.is_finite() {
            return Err(Error::OutOfRange(
                "f(+0) diverges; alpha = 0 is outside the range".into(),
            ));
        }
        (b.f_at_0, s)
    } else {
        (f.evaluate(alpha)?, f.derivative(alpha)?)
    };
    let a = value - alpha * slope;
    let c = slope;
    let tol = NONNEG_TOL * f.scale_hint();
    if a < -tol {
        return Err(Error::OutOfRange(format!(
            "alpha = {alpha} lies beyond alpha1: intercept {a} < 0"
        )));
    }
    if c < -tol {
        return Err(Error::OutOfRange(format!(
            "alpha = {alpha} lies below alpha0: slope {c} < 0"
        )));
    }
    Ok((a.max(0.0), c.max(0.0)))
}

/// The extremal decomposition of f at anchor α: tangent line plus the F_α
/// representation of the remainder.
pub fn extremal_decomposition(f: &OcFunction, alpha: f64) -> Result<ExtremalDecomposition> {
    let (a, c) = tangent_line(f, alpha)?;
    // remainder f − a − c·x in canonical data
    let rest = OcFunction::new(f.f1() - a - c, f.d1() - c, f.nu().clone())?;
    let anchor = ExtendedParam::Finite(alpha);
    let remainder = if rest.scale_hint() <= 1.0 && rest.f1().abs() < 1e-13 * f.scale_hint()
        && rest.d1().abs() < 1e-13 * f.scale_hint()
        && rest.nu().is_empty()
    {
        // affine f leaves nothing behind the tangent
        FaceRep {
            alpha: anchor,
            weights: crate::measure::FiniteMeasure::empty(),
        }
    } else {
        face_rep(&rest, anchor)?
    };
    Ok(ExtremalDecomposition { a, c, remainder })
}

/// Transport of the extreme element g_{α,λ} to anchor β: subtracting its
/// tangent at β leaves scale·g_{β,λ}.
pub fn ray_transport(
    alpha: ExtendedParam,
    lambda: ExtendedParam,
    beta: f64,
) -> Result<(f64, OcFunction)> {
    if !(beta > 0.0) {
        return Err(Error::NonPositive {
            name: "beta",
            value: beta,
        });
    }
    if alpha.approx_eq(&ExtendedParam::Finite(beta), 0.0) {
        return Err(Error::OutOfRange(
            "beta must differ from the vanishing point alpha".into(),
        ));
    }
    let scale = match (alpha, lambda) {
        (_, ExtendedParam::Infinity) => 1.0,
        (ExtendedParam::Finite(a), ExtendedParam::Finite(l)) => {
            ((a + l) / (beta + l)).powi(2)
        }
        (ExtendedParam::Infinity, ExtendedParam::Finite(l)) => (1.0 / (beta + l)).powi(2),
    };
    Ok((scale, OcFunction::make_extreme(ExtendedParam::Finite(beta), lambda)))
}
