//! The closed-face lattice of the cone: descriptors, membership, per-face
//! simplicial representations, smallest containing face, simpliciality and
//! maximality.
//!
//! Faces come in two families: F(α, Λ) — members vanishing at α (or with the
//! matching boundary behaviour for α ∈ {0, ∞}) whose generator set lies in Λ —
//! and E(Λ), cut out by the support of the canonical measure alone.

use std::fmt;

use crate::closed_set::ClosedSet;
use crate::error::{Error, Result};
use crate::measure::FiniteMeasure;
use crate::ocfun::{OcFunction, NONNEG_TOL};
use crate::param::ExtendedParam;
use crate::roots::bisect_increasing;

/// Relative tolerance of the vanishing test f(α) = 0, scaled by f(α+1).
pub const VANISH_TOL: f64 = 1e-10;

/// Tolerance for matching two anchors α when comparing faces.
const ALPHA_TOL: f64 = 1e-12;

/// A closed face of the cone.
#[derive(Debug, Clone, PartialEq)]
pub enum FaceDescriptor {
    /// F(α, Λ): the members of F_α generated by the α-family over Λ. Λ ≠ ∅.
    F {
        alpha: ExtendedParam,
        lambda_set: ClosedSet,
    },
    /// E(Λ): members whose canonical measure is supported in Λ. Λ may be ∅.
    E { lambda_set: ClosedSet },
}

impl FaceDescriptor {
    pub fn f(alpha: ExtendedParam, lambda_set: ClosedSet) -> Result<Self> {
        if lambda_set.is_empty() {
            return Err(Error::InvalidInterval(
                "F-faces require a nonempty parameter set".into(),
            ));
        }
        Ok(FaceDescriptor::F { alpha, lambda_set })
    }

    pub fn e(lambda_set: ClosedSet) -> Self {
        FaceDescriptor::E { lambda_set }
    }

    pub fn lambda_set(&self) -> &ClosedSet {
        match self {
            FaceDescriptor::F { lambda_set, .. } | FaceDescriptor::E { lambda_set } => {
                lambda_set
            }
        }
    }
}

impl fmt::Display for FaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaceDescriptor::F { alpha, lambda_set } => write!(f, "F({alpha},{lambda_set})"),
            FaceDescriptor::E { lambda_set } => write!(f, "E({lambda_set})"),
        }
    }
}

/// Weights of a cone member over the extreme family of a face F_α.
///
/// Positions are the λ of the family; the mass at ∞ carries the quadratic
/// coefficient (finite α), the pure-quadratic coefficient (α = 0), or the
/// constant term (α = ∞).
#[derive(Debug, Clone, PartialEq)]
pub struct FaceRep {
    pub alpha: ExtendedParam,
    pub weights: FiniteMeasure,
}

impl FaceRep {
    /// Reconstruct f(x) from the face weights.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::NonPositive {
                name: "x",
                value: x,
            });
        }
        let mut v = 0.0;
        match self.alpha {
            ExtendedParam::Finite(a) => {
                let sq = (x - a) * (x - a);
                for (pos, w) in self.weights.atoms() {
                    match pos {
                        ExtendedParam::Finite(l) => v += w * sq * (1.0 + a + l) / (x + l),
                        ExtendedParam::Infinity => v += w * sq,
                    }
                }
                for s in self.weights.segments() {
                    // ∫ (1+α+λ)/(x+λ) dλ = Δλ + (1+α−x)·ln((x+hi)/(x+lo))
                    let log_term = ((x + s.hi) / (x + s.lo)).ln();
                    v += s.density * sq * ((s.hi - s.lo) + (1.0 + a - x) * log_term);
                }
            }
            ExtendedParam::Infinity => {
                for (pos, w) in self.weights.atoms() {
                    match pos {
                        ExtendedParam::Finite(l) => v += w * (1.0 + l) / (x + l),
                        ExtendedParam::Infinity => v += w,
                    }
                }
                for s in self.weights.segments() {
                    let log_term = ((x + s.hi) / (x + s.lo)).ln();
                    v += s.density * ((s.hi - s.lo) + (1.0 - x) * log_term);
                }
            }
        }
        Ok(v)
    }
}

/// Whether f(α) vanishes, relative to the positive reference value f(α+1).
fn vanishes_at(f: &OcFunction, alpha: f64) -> bool {
    let value = f.evaluate(alpha).unwrap_or(f64::INFINITY);
    // the canonical evaluation at α carries absolute rounding noise of order
    // eps·scale·(1+α)², so the reference never drops below that magnitude
    let reference = f
        .evaluate(alpha + 1.0)
        .unwrap_or(f64::INFINITY)
        .max(1e-4 * f.scale_hint() * (1.0 + alpha) * (1.0 + alpha));
    value.abs() <= VANISH_TOL * reference
}

/// Whether f lies in the face F_α (vanishing at α, or the boundary condition
/// for α ∈ {0, ∞}).
pub fn in_face(f: &OcFunction, alpha: ExtendedParam) -> bool {
    if f.is_zero() {
        return true;
    }
    let scale = f.scale_hint();
    match alpha {
        ExtendedParam::Finite(a) if a == 0.0 => f.boundary().in_f_zero(scale),
        ExtendedParam::Finite(a) => vanishes_at(f, a),
        ExtendedParam::Infinity => {
            let s = f.boundary().slope_at_inf;
            s.is_finite() && s.abs() <= NONNEG_TOL * scale
        }
    }
}

/// The unique representation of f ∈ F_α over the extreme family of the face.
pub fn face_rep(f: &OcFunction, alpha: ExtendedParam) -> Result<FaceRep> {
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    if !in_face(f, alpha) {
        let detail = match alpha {
            ExtendedParam::Finite(a) if a == 0.0 => {
                format!("f(+0) = {}", f.boundary().f_at_0)
            }
            ExtendedParam::Finite(a) => format!("f({a}) = {}", f.evaluate(a)?),
            ExtendedParam::Infinity => {
                format!("f'(infinity) = {}", f.boundary().slope_at_inf)
            }
        };
        return Err(Error::NotInFace {
            alpha: alpha.to_string(),
            detail,
        });
    }

    let nu = f.nu();
    let weights = match alpha {
        ExtendedParam::Finite(a) if a == 0.0 => {
            let b = f.boundary();
            // λ-weights m·(1+λ)(2+λ)/λ²; the linear and pure-quadratic parts
            // sit at positions 0 and ∞.
            let weight = |l: f64| (1.0 + l) * (2.0 + l) / (l * l);
            // (1+λ)(2+λ)/λ² = 1 + 3/λ + 2/λ²
            let anti = |l: f64| l + 3.0 * l.ln() - 2.0 / l;
            let mut w = nu.weighted_finite_part(weight, anti);
            let mut extra = vec![(ExtendedParam::Infinity, b.quad_inf)];
            if let Some(lin) = b.lin0 {
                extra.push((ExtendedParam::Finite(0.0), lin));
            }
            w = w.add(&FiniteMeasure::from_atoms(extra)?);
            w
        }
        ExtendedParam::Finite(a) => {
            // dν_face(λ) = (1+λ)²(2+λ)/((α+λ)²(1+α+λ)) dν(λ); partial-fraction
            // antiderivative λ + A·ln(α+λ) − B/(α+λ) + C·ln(1+α+λ)
            let cap_b = (1.0 - a) * (1.0 - a) * (2.0 - a);
            let cap_c = a * a * (1.0 - a);
            let cap_a = 3.0 * (1.0 - a) - cap_c;
            let weight = move |l: f64| {
                (1.0 + l) * (1.0 + l) * (2.0 + l)
                    / ((a + l) * (a + l) * (1.0 + a + l))
            };
            let anti = move |l: f64| {
                l + cap_a * (a + l).ln() - cap_b / (a + l) + cap_c * (1.0 + a + l).ln()
            };
            let mut w = nu.weighted_finite_part(weight, anti);
            let gamma = nu.mass_at_infinity();
            if gamma > 0.0 {
                w = w.add(&FiniteMeasure::single_atom(ExtendedParam::Infinity, gamma)?);
            }
            w
        }
        ExtendedParam::Infinity => {
            // λ-weights m·(1+λ)(2+λ); the constant term is what remains of f(1).
            let weight = |l: f64| (1.0 + l) * (2.0 + l);
            // (1+λ)(2+λ) = λ² + 3λ + 2
            let anti = |l: f64| l * l * l / 3.0 + 1.5 * l * l + 2.0 * l;
            let w = nu.weighted_finite_part(weight, anti);
            let constant = (f.f1() - w.total_mass()).max(0.0);
            if constant > 0.0 {
                w.add(&FiniteMeasure::single_atom(ExtendedParam::Infinity, constant)?)
            } else {
                w
            }
        }
    };
    Ok(FaceRep { alpha, weights })
}

/// Scale f to the Bauer-simplex base of F_α: value 1 at α+1 (finite α) or at 1
/// (α = ∞).
pub fn base_normalize(f: &OcFunction, alpha: ExtendedParam) -> Result<OcFunction> {
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    if !in_face(f, alpha) {
        return Err(Error::NotInFace {
            alpha: alpha.to_string(),
            detail: "base_normalize requires membership in the face".into(),
        });
    }
    let reference = match alpha {
        ExtendedParam::Finite(a) => f.evaluate(a + 1.0)?,
        ExtendedParam::Infinity => f.f1(),
    };
    if reference <= 0.0 {
        return Err(Error::ZeroFunction);
    }
    f.scale(1.0 / reference)
}

/// Membership of f in a closed face.
pub fn member(f: &OcFunction, d: &FaceDescriptor) -> bool {
    if f.is_zero() {
        return true;
    }
    match d {
        FaceDescriptor::E { lambda_set } => f.sigma_support().is_subset_of(lambda_set),
        FaceDescriptor::F { alpha, lambda_set } => match alpha {
            ExtendedParam::Finite(a) if *a > 0.0 => {
                vanishes_at(f, *a) && f.sigma_support().is_subset_of(lambda_set)
            }
            _ => match face_rep(f, *alpha) {
                Ok(rep) => rep.weights.support().is_subset_of(lambda_set),
                Err(_) => false,
            },
        },
    }
}

/// The smallest closed face containing f.
pub fn smallest_closed_face(f: &OcFunction) -> Result<FaceDescriptor> {
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let scale = f.scale_hint();
    let b = f.boundary();
    if b.in_f_zero(scale) {
        let rep = face_rep(f, ExtendedParam::Finite(0.0))?;
        return FaceDescriptor::f(ExtendedParam::Finite(0.0), rep.weights.support());
    }
    if b.slope_at_inf.is_finite() && b.slope_at_inf.abs() <= NONNEG_TOL * scale {
        let rep = face_rep(f, ExtendedParam::Infinity)?;
        return FaceDescriptor::f(ExtendedParam::Infinity, rep.weights.support());
    }
    // interior vanishing point: the argmin of the convex f, if f is zero there
    let deriv = |x: f64| f.derivative(x).unwrap_or(f64::NEG_INFINITY);
    if deriv(1e-9) < 0.0 {
        if let Some(argmin) = bisect_increasing(deriv, 1e-9, 1.0) {
            if vanishes_at(f, argmin) {
                let rep = face_rep(f, ExtendedParam::Finite(argmin))?;
                return FaceDescriptor::f(
                    ExtendedParam::Finite(argmin),
                    rep.weights.support(),
                );
            }
        }
    }
    Ok(FaceDescriptor::e(f.sigma_support()))
}

/// The non-simpliciality witness g_{1,λ} + g_{2,λ} = 2·g_{3/2,λ} + ½·g_{∞,λ}:
/// two distinct extremal decompositions of the same function.
#[derive(Debug, Clone, PartialEq)]
pub struct NonSimplicialWitness {
    pub lambda: ExtendedParam,
    pub lhs: OcFunction,
    pub rhs: OcFunction,
}

/// Simpliciality verdict; non-simplicial faces carry a concrete witness.
#[derive(Debug, Clone, PartialEq)]
pub struct Simpliciality {
    pub simplicial: bool,
    pub witness: Option<NonSimplicialWitness>,
}

/// Whether the face has unique extremal decompositions.
///
/// F(α, Λ) faces are simplicial (each is generated by a Bauer simplex). E(Λ)
/// with nonempty Λ is not, witnessed explicitly. E(∅) — the affine members —
/// is reported simplicial.
pub fn is_simplicial(d: &FaceDescriptor) -> Simpliciality {
    match d {
        FaceDescriptor::F { .. } => Simpliciality {
            simplicial: true,
            witness: None,
        },
        FaceDescriptor::E { lambda_set } => {
            if lambda_set.is_empty() {
                return Simpliciality {
                    simplicial: true,
                    witness: None,
                };
            }
            let lambda = lambda_set.components()[0].0;
            let g = |a: ExtendedParam| OcFunction::make_extreme(a, lambda);
            let lhs = g(ExtendedParam::Finite(1.0)).add(&g(ExtendedParam::Finite(2.0)));
            let rhs = g(ExtendedParam::Finite(1.5))
                .scale(2.0)
                .expect("positive scale")
                .add(
                    &g(ExtendedParam::Infinity)
                        .scale(0.5)
                        .expect("positive scale"),
                );
            Simpliciality {
                simplicial: false,
                witness: Some(NonSimplicialWitness { lambda, lhs, rhs }),
            }
        }
    }
}

/// Whether the face is maximal among proper closed faces: exactly F(α, [0,∞]).
pub fn is_maximal(d: &FaceDescriptor) -> bool {
    matches!(d, FaceDescriptor::F { lambda_set, .. } if lambda_set.is_full())
}

/// Remove a point from a closed set (used for the boundary generator rules).
fn set_minus_point(set: &ClosedSet, p: &ExtendedParam) -> ClosedSet {
    let mut intervals = Vec::new();
    for (lo, hi) in set.components() {
        if lo == hi && lo.approx_eq(p, ALPHA_TOL) {
            continue;
        }
        intervals.push((*lo, *hi));
    }
    ClosedSet::from_intervals(intervals).expect("intervals stay valid")
}

/// Whether D1 ⊆ D2 in the face lattice.
pub fn face_contains(d1: &FaceDescriptor, d2: &FaceDescriptor) -> bool {
    match (d1, d2) {
        (
            FaceDescriptor::F {
                alpha: a1,
                lambda_set: l1,
            },
            FaceDescriptor::F {
                alpha: a2,
                lambda_set: l2,
            },
        ) => a1.approx_eq(a2, ALPHA_TOL) && l1.is_subset_of(l2),
        (
            FaceDescriptor::F {
                alpha,
                lambda_set: l1,
            },
            FaceDescriptor::E { lambda_set: l2 },
        ) => {
            // generators of F(α, Λ) carry Σ = Λ, except that the linear and
            // constant generators at the boundary anchors have Σ = ∅
            let effective = match alpha {
                ExtendedParam::Finite(a) if *a == 0.0 => {
                    set_minus_point(l1, &ExtendedParam::Finite(0.0))
                }
                ExtendedParam::Finite(_) => l1.clone(),
                ExtendedParam::Infinity => set_minus_point(l1, &ExtendedParam::Infinity),
            };
            effective.is_subset_of(l2)
        }
        (FaceDescriptor::E { lambda_set: l1 }, FaceDescriptor::E { lambda_set: l2 }) => {
            l1.is_subset_of(l2)
        }
        // every E(Λ) contains both 1 and x, and no F_α contains both
        (FaceDescriptor::E { .. }, FaceDescriptor::F { .. }) => false,
    }
}
