//! The (−1, 1) variant of the cone: canonical representations anchored at 0,
//! extreme elements (x−α)²/(1−λx), boundary representations at ±1, closed
//! faces over parameter sets Λ ⊆ [−1, 1], and affine transport from an
//! arbitrary bounded interval (a, b).

use crate::closed_set::ClosedSet;
use crate::error::{Error, Result};
use crate::param::ExtendedParam;

/// Kernel denominators 1 − λx below this magnitude are treated as singular.
pub const KERNEL_GUARD: f64 = 1e-14;

/// Evaluation points are clipped into [−1 + EVAL_MARGIN, 1 − EVAL_MARGIN].
pub const EVAL_MARGIN: f64 = 1e-6;

/// Relative tolerance of the non-negativity grid check on construction.
const NONNEG_TOL: f64 = 1e-10;

/// Atoms closer than this are merged on construction.
const ATOM_MERGE_TOL: f64 = 1e-12;

/// Sub-pieces used when a weighted density transform is re-approximated as
/// piecewise-constant; sub-piece masses stay exact.
const SEGMENT_REFINE: usize = 64;

/// Relative tolerance for "f vanishes at α" checks in membership tests.
const VANISH_TOL: f64 = 1e-10;

/// A constant-density piece on [lo, hi) ⊆ [−1, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentI {
    pub lo: f64,
    pub hi: f64,
    pub density: f64,
}

impl SegmentI {
    pub fn mass(&self) -> f64 {
        self.density * (self.hi - self.lo)
    }
}

/// Finite positive measure on the compact parameter interval [−1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureI {
    /// Sorted by position.
    atoms: Vec<(f64, f64)>,
    /// Sorted, pairwise non-overlapping.
    segments: Vec<SegmentI>,
}

impl MeasureI {
    pub fn empty() -> Self {
        MeasureI {
            atoms: vec![],
            segments: vec![],
        }
    }

    pub fn single_atom(position: f64, mass: f64) -> Result<Self> {
        Self::new(vec![(position, mass)], vec![])
    }

    pub fn from_atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(atoms, vec![])
    }

    pub fn new(atoms: Vec<(f64, f64)>, segments: Vec<SegmentI>) -> Result<Self> {
        let mut clean_atoms: Vec<(f64, f64)> = Vec::new();
        let mut sorted = atoms;
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (pos, mass) in sorted {
            if !(pos.is_finite() && (-1.0..=1.0).contains(&pos)) {
                return Err(Error::InvalidMeasure(format!(
                    "atom position {pos} outside [-1, 1]"
                )));
            }
            if !mass.is_finite() || mass < 0.0 {
                return Err(Error::InvalidMeasure(format!(
                    "invalid atom mass {mass} at {pos}"
                )));
            }
            if mass == 0.0 {
                continue;
            }
            match clean_atoms.last_mut() {
                Some(last) if (last.0 - pos).abs() <= ATOM_MERGE_TOL => last.1 += mass,
                _ => clean_atoms.push((pos, mass)),
            }
        }

        let mut clean_segments: Vec<SegmentI> = Vec::new();
        let mut segs = segments;
        segs.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for s in segs {
            if !(s.lo.is_finite() && s.hi.is_finite() && s.density.is_finite()) {
                return Err(Error::InvalidMeasure("non-finite segment data".into()));
            }
            if s.lo < -1.0 || s.hi > 1.0 || s.lo >= s.hi {
                return Err(Error::InvalidMeasure(format!(
                    "segment bounds must satisfy -1 <= lo < hi <= 1, got [{}, {}]",
                    s.lo, s.hi
                )));
            }
            if s.density < 0.0 {
                return Err(Error::InvalidMeasure(format!(
                    "negative segment density {}",
                    s.density
                )));
            }
            if s.density == 0.0 {
                continue;
            }
            if let Some(last) = clean_segments.last() {
                if s.lo < last.hi - ATOM_MERGE_TOL {
                    return Err(Error::InvalidMeasure(format!(
                        "overlapping segments at [{}, {}]",
                        s.lo, s.hi
                    )));
                }
            }
            clean_segments.push(s);
        }

        Ok(MeasureI {
            atoms: clean_atoms,
            segments: clean_segments,
        })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn segments(&self) -> &[SegmentI] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.segments.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        let atom_mass: f64 = self.atoms.iter().map(|(_, m)| m).sum();
        let segment_mass: f64 = self.segments.iter().map(SegmentI::mass).sum();
        atom_mass + segment_mass
    }

    /// Mass of the atom at `position`, within the merge tolerance.
    pub fn mass_at(&self, position: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|(p, _)| (p - position).abs() <= ATOM_MERGE_TOL)
            .map(|(_, m)| m)
            .sum()
    }

    /// Support: atom positions plus closures of positive-density segments.
    pub fn support(&self) -> ClosedSet {
        let mut intervals: Vec<(ExtendedParam, ExtendedParam)> = self
            .atoms
            .iter()
            .map(|(p, _)| (ExtendedParam::Finite(*p), ExtendedParam::Finite(*p)))
            .collect();
        intervals.extend(self.segments.iter().map(|s| {
            (ExtendedParam::Finite(s.lo), ExtendedParam::Finite(s.hi))
        }));
        ClosedSet::from_intervals(intervals).expect("support intervals are valid")
    }

    pub fn add(&self, other: &MeasureI) -> MeasureI {
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        let mut segments = self.segments.clone();
        segments.extend(other.segments.iter().cloned());
        // re-split overlaps at all breakpoints
        let merged = merge_segment_lists(&self.segments, &other.segments);
        MeasureI::new(atoms, merged).expect("sum of valid measures is valid")
    }

    pub fn scale(&self, factor: f64) -> Result<MeasureI> {
        if factor < 0.0 {
            return Err(Error::Negative {
                name: "factor",
                value: factor,
            });
        }
        let atoms = self.atoms.iter().map(|(p, m)| (*p, m * factor)).collect();
        let segments = self
            .segments
            .iter()
            .map(|s| SegmentI {
                density: s.density * factor,
                ..*s
            })
            .collect();
        MeasureI::new(atoms, segments)
    }

    /// ∫ x²/(1−λx) dμ(λ) in closed form.
    pub fn integrate_kernel(&self, x: f64) -> Result<f64> {
        let mut total = 0.0;
        for (lambda, mass) in &self.atoms {
            total += mass * kernel_i(*lambda, x)?;
        }
        for s in &self.segments {
            // antiderivative in λ of x²/(1−λx) is −x·ln(1−λx)
            let lo_den = 1.0 - s.lo * x;
            let hi_den = 1.0 - s.hi * x;
            if lo_den < KERNEL_GUARD || hi_den < KERNEL_GUARD {
                return Err(Error::OutOfRange(format!(
                    "kernel singular on segment [{}, {}] at x = {x}",
                    s.lo, s.hi
                )));
            }
            total += s.density * x * (lo_den / hi_den).ln();
        }
        Ok(total)
    }

    /// ∫ ∂/∂x [x²/(1−λx)] dμ(λ) = ∫ x(2−λx)/(1−λx)² dμ(λ) in closed form.
    pub fn integrate_kernel_dx(&self, x: f64) -> Result<f64> {
        let mut total = 0.0;
        for (lambda, mass) in &self.atoms {
            let den = 1.0 - lambda * x;
            if den < KERNEL_GUARD {
                return Err(Error::OutOfRange(format!(
                    "kernel singular at lambda = {lambda}, x = {x}"
                )));
            }
            total += mass * x * (2.0 - lambda * x) / (den * den);
        }
        for s in &self.segments {
            // antiderivative in λ: 1/(1−λx) − ln(1−λx)
            let anti = |l: f64| -> Result<f64> {
                let den = 1.0 - l * x;
                if den < KERNEL_GUARD {
                    return Err(Error::OutOfRange(format!(
                        "kernel singular at lambda = {l}, x = {x}"
                    )));
                }
                Ok(1.0 / den - den.ln())
            };
            total += s.density * (anti(s.hi)? - anti(s.lo)?);
        }
        Ok(total)
    }

    /// Transform every mass element by a weight function of λ. Segment images
    /// use exact sub-piece masses via the weight's antiderivative.
    fn weighted(
        &self,
        weight: impl Fn(f64) -> f64,
        weight_antiderivative: impl Fn(f64) -> f64,
    ) -> MeasureI {
        let atoms: Vec<(f64, f64)> = self
            .atoms
            .iter()
            .map(|(p, m)| (*p, m * weight(*p)))
            .collect();
        let mut segments = Vec::new();
        for s in &self.segments {
            let width = (s.hi - s.lo) / SEGMENT_REFINE as f64;
            for i in 0..SEGMENT_REFINE {
                let a = s.lo + i as f64 * width;
                let b = if i + 1 == SEGMENT_REFINE { s.hi } else { a + width };
                let mass = s.density * (weight_antiderivative(b) - weight_antiderivative(a));
                if mass > 0.0 && b > a {
                    segments.push(SegmentI {
                        lo: a,
                        hi: b,
                        density: mass / (b - a),
                    });
                }
            }
        }
        MeasureI::new(atoms, segments).expect("weighted measure is valid")
    }
}

/// Union-refinement sum of two sorted segment lists.
fn merge_segment_lists(a: &[SegmentI], b: &[SegmentI]) -> Vec<SegmentI> {
    let mut cuts: Vec<f64> = Vec::new();
    for s in a.iter().chain(b.iter()) {
        cuts.push(s.lo);
        cuts.push(s.hi);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() <= ATOM_MERGE_TOL);

    let density_at = |list: &[SegmentI], mid: f64| -> f64 {
        list.iter()
            .find(|s| s.lo <= mid && mid < s.hi)
            .map_or(0.0, |s| s.density)
    };

    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mid = 0.5 * (lo + hi);
        let d = density_at(a, mid) + density_at(b, mid);
        if d > 0.0 {
            out.push(SegmentI { lo, hi, density: d });
        }
    }
    out
}

/// The canonical kernel x²/(1−λx) on (−1, 1), guarded near the singularity.
pub fn kernel_i(lambda: f64, x: f64) -> Result<f64> {
    let den = 1.0 - lambda * x;
    if den < KERNEL_GUARD {
        return Err(Error::OutOfRange(format!(
            "kernel singular at lambda = {lambda}, x = {x}"
        )));
    }
    Ok(x * x / den)
}

/// The α-anchored kernel (x−α)² / ((1−λx)(1−λα)²); the representing measure
/// is the same for every anchor α ∈ (−1, 1).
pub fn anchored_kernel_i(alpha: f64, lambda: f64, x: f64) -> Result<f64> {
    let den_x = 1.0 - lambda * x;
    let den_a = 1.0 - lambda * alpha;
    if den_x < KERNEL_GUARD || den_a.abs() < KERNEL_GUARD {
        return Err(Error::OutOfRange(format!(
            "anchored kernel singular at lambda = {lambda}, x = {x}, alpha = {alpha}"
        )));
    }
    Ok((x - alpha) * (x - alpha) / (den_x * den_a * den_a))
}

/// A non-negative operator convex function on (−1, 1) in canonical form at
/// anchor 0: f(x) = f(0) + f′(0)·x + ∫ x²/(1−λx) dμ(λ) with μ ≥ 0 on [−1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct OcFunctionI {
    f0: f64,
    d0: f64,
    mu: MeasureI,
}

impl OcFunctionI {
    /// Validates finiteness, f(0) ≥ 0, and non-negativity on a grid in (−1, 1).
    pub fn new(f0: f64, d0: f64, mu: MeasureI) -> Result<Self> {
        if !f0.is_finite() {
            return Err(Error::NotFinite {
                name: "f0",
                value: f0,
            });
        }
        if !d0.is_finite() {
            return Err(Error::NotFinite {
                name: "d0",
                value: d0,
            });
        }
        if f0 < 0.0 {
            return Err(Error::Negative {
                name: "f0",
                value: f0,
            });
        }
        let f = OcFunctionI { f0, d0, mu };
        let scale = f.scale_hint();
        let n = 256;
        for i in 0..n {
            let x = -1.0 + EVAL_MARGIN + (2.0 - 2.0 * EVAL_MARGIN) * (i as f64 + 0.5) / n as f64;
            let v = f.evaluate(x)?;
            // values near the ends can legitimately be huge; the slack grows
            // with the kernel magnitude there
            let slack = NONNEG_TOL * scale * (1.0 + 1.0 / (1.0 - x.abs()));
            if v < -slack {
                return Err(Error::OutsideCone(format!("f({x}) = {v} < 0")));
            }
        }
        Ok(f)
    }

    pub fn zero() -> Self {
        OcFunctionI {
            f0: 0.0,
            d0: 0.0,
            mu: MeasureI::empty(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.f0 == 0.0 && self.d0 == 0.0 && self.mu.is_empty()
    }

    pub fn f0(&self) -> f64 {
        self.f0
    }

    pub fn d0(&self) -> f64 {
        self.d0
    }

    pub fn mu(&self) -> &MeasureI {
        &self.mu
    }

    /// A magnitude reference for relative tolerances.
    pub fn scale_hint(&self) -> f64 {
        (self.f0.abs() + self.d0.abs() + self.mu.total_mass()).max(1.0)
    }

    /// The affine member p + q·x; requires p ± q ≥ 0 (non-negativity at ±1).
    pub fn affine(p: f64, q: f64) -> Result<Self> {
        OcFunctionI::new(p, q, MeasureI::empty())
    }

    pub fn add(&self, other: &OcFunctionI) -> OcFunctionI {
        OcFunctionI {
            f0: self.f0 + other.f0,
            d0: self.d0 + other.d0,
            mu: self.mu.add(&other.mu),
        }
    }

    pub fn scale(&self, c: f64) -> Result<OcFunctionI> {
        if c < 0.0 {
            return Err(Error::Negative {
                name: "factor",
                value: c,
            });
        }
        Ok(OcFunctionI {
            f0: self.f0 * c,
            d0: self.d0 * c,
            mu: self.mu.scale(c)?,
        })
    }

    /// Evaluate at x; points are clipped into [−1 + margin, 1 − margin].
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::NotFinite { name: "x", value: x });
        }
        let x = x.clamp(-1.0 + EVAL_MARGIN, 1.0 - EVAL_MARGIN);
        Ok(self.f0 + self.d0 * x + self.mu.integrate_kernel(x)?)
    }

    /// Derivative at x (clipped like `evaluate`).
    pub fn derivative(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::NotFinite { name: "x", value: x });
        }
        let x = x.clamp(-1.0 + EVAL_MARGIN, 1.0 - EVAL_MARGIN);
        Ok(self.d0 + self.mu.integrate_kernel_dx(x)?)
    }

    /// Boundary limit f(−1) or f(+1); +∞ when the measure touches the
    /// singular parameter (λ = −1 at x = −1, λ = +1 at x = +1).
    pub fn boundary_value(&self, at_plus_one: bool) -> f64 {
        let sign = if at_plus_one { 1.0 } else { -1.0 };
        let mut total = self.f0 + sign * self.d0;
        for (lambda, mass) in self.mu.atoms() {
            // kernel at x = ±1 is 1/(1 ∓ λ)
            let den = 1.0 - sign * lambda;
            if den < KERNEL_GUARD {
                return f64::INFINITY;
            }
            total += mass / den;
        }
        for s in self.mu.segments() {
            let lo_den = 1.0 - sign * s.lo;
            let hi_den = 1.0 - sign * s.hi;
            if lo_den < KERNEL_GUARD || hi_den < KERNEL_GUARD {
                return f64::INFINITY;
            }
            // ∫ dλ/(1∓λ) = ∓ln(1∓λ)
            total += s.density * sign * (lo_den / hi_den).ln();
        }
        total
    }

    /// Reconstruct f(x) from its data re-anchored at α ∈ (−1, 1):
    /// f(α) + f′(α)(x−α) + ∫ (x−α)²/((1−λx)(1−λα)²) dμ(λ).
    /// The measure is anchor-free, so this must agree with `evaluate`.
    pub fn evaluate_via_anchor(&self, alpha: f64, x: f64) -> Result<f64> {
        if !(alpha.abs() < 1.0) {
            return Err(Error::OutOfRange(format!(
                "anchor {alpha} outside (-1, 1)"
            )));
        }
        let x = x.clamp(-1.0 + EVAL_MARGIN, 1.0 - EVAL_MARGIN);
        let mut total = self.evaluate(alpha)? + self.derivative(alpha)? * (x - alpha);
        for (lambda, mass) in self.mu.atoms() {
            total += mass * anchored_kernel_i(alpha, *lambda, x)?;
        }
        for s in self.mu.segments() {
            total += anchored_segment_integral(alpha, s, x)?;
        }
        Ok(total)
    }
}

/// Closed form for ∫ (x−α)²/((1−λx)(1−λα)²) dλ over a constant-density piece.
fn anchored_segment_integral(alpha: f64, s: &SegmentI, x: f64) -> Result<f64> {
    let d = x - alpha;
    if d.abs() <= 1e-7 * (1.0 + alpha.abs()) {
        // near the anchor the kernel is (x−α)²/(1−λα)³ + O((x−α)³);
        // ∫ dλ/(1−λα)³ = 1/(2α(1−λα)²), or λ for α = 0
        let anti = |l: f64| -> f64 {
            if alpha.abs() < 1e-14 {
                l
            } else {
                let den = 1.0 - l * alpha;
                1.0 / (2.0 * alpha * den * den)
            }
        };
        return Ok(s.density * d * d * (anti(s.hi) - anti(s.lo)));
    }
    // partial fractions of 1/((1−λx)(1−λα)²) integrate to
    // (x/(x−α)²)·ln((1−λα)/(1−λx)) − 1/((x−α)(1−λα))
    let anti = |l: f64| -> Result<f64> {
        let den_x = 1.0 - l * x;
        let den_a = 1.0 - l * alpha;
        if den_x < KERNEL_GUARD || den_a.abs() < KERNEL_GUARD {
            return Err(Error::OutOfRange(format!(
                "anchored kernel singular at lambda = {l}, x = {x}"
            )));
        }
        Ok((x / (d * d)) * (den_a / den_x).ln() - 1.0 / (d * den_a))
    };
    Ok(s.density * d * d * (anti(s.hi)? - anti(s.lo)?))
}

/// The extreme element (x−α)² / (1−λx) in canonical form:
/// f(0) = α², f′(0) = −2α + λα², μ = (1−αλ)²·δ_λ.
pub fn make_extreme_i(alpha: f64, lambda: f64) -> Result<OcFunctionI> {
    for (name, v) in [("alpha", alpha), ("lambda", lambda)] {
        if !(v.is_finite() && (-1.0..=1.0).contains(&v)) {
            return Err(Error::OutOfRange(format!("{name} = {v} outside [-1, 1]")));
        }
    }
    let w = (1.0 - alpha * lambda) * (1.0 - alpha * lambda);
    let mu = if w > 0.0 {
        MeasureI::single_atom(lambda, w)?
    } else {
        MeasureI::empty()
    };
    OcFunctionI::new(alpha * alpha, -2.0 * alpha + lambda * alpha * alpha, mu)
}

/// A closed face of the cone on (−1, 1): either the vanishing-plus-support
/// face F(α, Λ) with α ∈ [−1, 1] and Λ ⊆ [−1, 1] closed and non-empty, or the
/// pure support face E(Λ).
#[derive(Debug, Clone, PartialEq)]
pub enum FaceDescriptorI {
    F { alpha: f64, lambda_set: ClosedSet },
    E { lambda_set: ClosedSet },
}

/// Checks every component of Λ lies inside [−1, 1] with finite endpoints.
fn validate_lambda_set_i(set: &ClosedSet) -> Result<()> {
    for (lo, hi) in set.components() {
        let ok = matches!(
            (lo, hi),
            (ExtendedParam::Finite(a), ExtendedParam::Finite(b))
                if (-1.0 - ATOM_MERGE_TOL..=1.0 + ATOM_MERGE_TOL).contains(a)
                    && (-1.0 - ATOM_MERGE_TOL..=1.0 + ATOM_MERGE_TOL).contains(b)
        );
        if !ok {
            return Err(Error::OutOfRange(format!(
                "face parameter component [{lo}, {hi}] outside [-1, 1]"
            )));
        }
    }
    Ok(())
}

impl FaceDescriptorI {
    pub fn f_face(alpha: f64, lambda_set: ClosedSet) -> Result<Self> {
        if !(alpha.is_finite() && (-1.0..=1.0).contains(&alpha)) {
            return Err(Error::OutOfRange(format!("alpha = {alpha} outside [-1, 1]")));
        }
        if lambda_set.is_empty() {
            return Err(Error::OutOfRange(
                "F-face requires a non-empty parameter set".into(),
            ));
        }
        validate_lambda_set_i(&lambda_set)?;
        Ok(FaceDescriptorI::F { alpha, lambda_set })
    }

    pub fn e_face(lambda_set: ClosedSet) -> Result<Self> {
        validate_lambda_set_i(&lambda_set)?;
        Ok(FaceDescriptorI::E { lambda_set })
    }
}

/// Face membership on (−1, 1). The support rule uses the canonical measure;
/// α = ±1 delegates to the boundary representation.
pub fn membership_i(f: &OcFunctionI, descriptor: &FaceDescriptorI) -> bool {
    if f.is_zero() {
        return true;
    }
    match descriptor {
        FaceDescriptorI::E { lambda_set } => f.mu.support().is_subset_of(lambda_set),
        FaceDescriptorI::F { alpha, lambda_set } => {
            if (alpha.abs() - 1.0).abs() <= ATOM_MERGE_TOL {
                match boundary_rep_i(f, *alpha) {
                    Ok(nu) => nu.support().is_subset_of(lambda_set),
                    Err(_) => false,
                }
            } else {
                let vanishes = match f.evaluate(*alpha) {
                    Ok(v) => v.abs() <= VANISH_TOL * f.scale_hint(),
                    Err(_) => false,
                };
                vanishes && f.mu.support().is_subset_of(lambda_set)
            }
        }
    }
}

/// The unique boundary representation at α = ±1: the measure ν on [−1, 1]
/// with f(x) = ∫ (x∓1)²/(1−λx) dν(λ), defined when f(α) = 0.
///
/// Each canonical atom m·δ_λ pulls back with weight 1/(1∓λ)²; the affine
/// remainder is carried by an atom at λ = α, whose kernel degenerates to the
/// linear function 1 ± x.
pub fn boundary_rep_i(f: &OcFunctionI, alpha: f64) -> Result<MeasureI> {
    let at_plus_one = if (alpha - 1.0).abs() <= ATOM_MERGE_TOL {
        true
    } else if (alpha + 1.0).abs() <= ATOM_MERGE_TOL {
        false
    } else {
        return Err(Error::OutOfRange(format!(
            "boundary representation requires alpha = ±1, got {alpha}"
        )));
    };
    let sign = if at_plus_one { 1.0 } else { -1.0 };
    let value = f.boundary_value(at_plus_one);
    let tol = VANISH_TOL * f.scale_hint();
    if !(value.abs() <= tol) {
        return Err(Error::NotInFace {
            alpha: format!("{}", sign),
            detail: format!("boundary value f({sign}) = {value} is not 0"),
        });
    }
    // weight 1/(1∓λ)², antiderivative ±1/(1∓λ)
    let weight = |l: f64| {
        let den = 1.0 - sign * l;
        1.0 / (den * den)
    };
    let anti = |l: f64| sign / (1.0 - sign * l);
    let mut nu = f.mu.weighted(weight, anti);
    // kernel contributions carry canonical value α² = 1 each at the anchor 0;
    // what is left of f(0) rides on the boundary atom
    let b = f.f0 - nu.total_mass();
    if b < -tol {
        return Err(Error::NotInFace {
            alpha: format!("{}", sign),
            detail: format!("negative boundary mass {b}"),
        });
    }
    if b > 0.0 {
        nu = nu.add(&MeasureI::single_atom(sign, b)?);
    }
    Ok(nu)
}

/// Evaluate a boundary representation: Σ ν(λ)·(x∓1)²/(1−λx).
pub fn boundary_rep_evaluate(nu: &MeasureI, at_plus_one: bool, x: f64) -> Result<f64> {
    let sign = if at_plus_one { 1.0 } else { -1.0 };
    let x = x.clamp(-1.0 + EVAL_MARGIN, 1.0 - EVAL_MARGIN);
    let sq = (x - sign) * (x - sign);
    let mut total = 0.0;
    for (lambda, mass) in nu.atoms() {
        let den = 1.0 - lambda * x;
        if den < KERNEL_GUARD {
            return Err(Error::OutOfRange(format!(
                "kernel singular at lambda = {lambda}, x = {x}"
            )));
        }
        total += mass * sq / den;
    }
    for s in nu.segments() {
        let lo_den = 1.0 - s.lo * x;
        let hi_den = 1.0 - s.hi * x;
        if lo_den < KERNEL_GUARD || hi_den < KERNEL_GUARD {
            return Err(Error::OutOfRange(format!(
                "kernel singular on segment [{}, {}] at x = {x}",
                s.lo, s.hi
            )));
        }
        // ∫ dλ/(1−λx) = −(1/x)ln(1−λx); guard the removable x = 0 case
        if x.abs() < 1e-14 {
            total += s.density * sq * (s.hi - s.lo);
        } else {
            total += s.density * sq / x * (lo_den / hi_den).ln();
        }
    }
    Ok(total)
}

/// A source function on an arbitrary bounded interval (a, b), restricted to
/// the closed forms the transport keeps inside the representable class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceFunction {
    /// c0 + c1·y + c2·y²
    Poly2 { c0: f64, c1: f64, c2: f64 },
    /// (y − alpha)² / (1 − lambda·y)
    Extreme { alpha: f64, lambda: f64 },
}

/// Pull a function on (a, b) back to (−1, 1) along y = ((b−a)/2)x + (b+a)/2.
pub fn affine_transport(source: &SourceFunction, a: f64, b: f64) -> Result<OcFunctionI> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidInterval(format!(
            "need finite a < b, got ({a}, {b})"
        )));
    }
    let s = 0.5 * (b - a);
    let c = 0.5 * (b + a);
    match *source {
        SourceFunction::Poly2 { c0, c1, c2 } => {
            if c2 < 0.0 {
                return Err(Error::OutsideCone(format!(
                    "quadratic coefficient {c2} < 0"
                )));
            }
            let f0 = c0 + c1 * c + c2 * c * c;
            let d0 = c1 * s + 2.0 * c2 * c * s;
            let mass = c2 * s * s;
            let mu = if mass > 0.0 {
                MeasureI::single_atom(0.0, mass)?
            } else {
                MeasureI::empty()
            };
            OcFunctionI::new(f0, d0, mu)
        }
        SourceFunction::Extreme { alpha, lambda } => {
            let den = 1.0 - lambda * c;
            if den.abs() < KERNEL_GUARD {
                return Err(Error::OutOfRange(format!(
                    "pole of 1/(1−{lambda}·y) sits at the interval midpoint"
                )));
            }
            let alpha_t = (alpha - c) / s;
            let lambda_t = lambda * s / den;
            let factor = s * s / den;
            if factor <= 0.0 {
                return Err(Error::OutsideCone(format!(
                    "transported coefficient {factor} is not positive"
                )));
            }
            make_extreme_i(alpha_t, lambda_t)?.scale(factor)
        }
    }
}

/// Max absolute gap, over a 128-point grid in (−0.99, 0.99), of the extreme
/// element identity
/// g_{−1,λ} + g_{1,λ} + 6·g_{0,λ} = 4·(g_{−1/2,λ} + g_{1/2,λ}),
/// which follows from (x+1)² + (x−1)² + 6x² = 4[(x+½)² + (x−½)²].
pub fn identity_check_i(lambda: f64) -> Result<f64> {
    let lhs = make_extreme_i(-1.0, lambda)?
        .add(&make_extreme_i(1.0, lambda)?)
        .add(&make_extreme_i(0.0, lambda)?.scale(6.0)?);
    let rhs = make_extreme_i(-0.5, lambda)?
        .add(&make_extreme_i(0.5, lambda)?)
        .scale(4.0)?;
    let mut gap = 0.0f64;
    let n = 128;
    for i in 0..n {
        let x = -0.99 + 1.98 * (i as f64 + 0.5) / n as f64;
        gap = gap.max((lhs.evaluate(x)? - rhs.evaluate(x)?).abs());
    }
    Ok(gap)
}
