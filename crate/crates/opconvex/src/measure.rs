//! Finite positive measures on [0, ∞] with closed-form kernel integration.
//!
//! A measure is a finite list of atoms (possibly one at ∞) together with
//! piecewise-constant density segments on [0, ∞). The canonical kernel is
//! (x−1)²(2+λ)/(x+λ), read as (x−1)² at λ = ∞.

use crate::closed_set::ClosedSet;
use crate::error::{Error, Result};
use crate::param::ExtendedParam;

/// Atoms closer than this are merged (masses summed) on construction.
pub const ATOM_MERGE_TOL: f64 = 1e-12;

/// Sub-pieces used when a density transform with non-constant weight is
/// re-approximated as piecewise-constant. Sub-piece masses stay exact.
pub const SEGMENT_REFINE: usize = 64;

/// Ceiling for unbounded images of segments under λ ↦ 1/λ.
const PUSHFORWARD_CEILING: f64 = 1e9;

/// A constant-density piece on [lo, hi) ⊂ [0, ∞).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub density: f64,
}

impl Segment {
    pub fn mass(&self) -> f64 {
        self.density * (self.hi - self.lo)
    }
}

/// Finite positive measure on [0, ∞].
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMeasure {
    /// Sorted by position; at most one atom sits at ∞ (kept last).
    atoms: Vec<(ExtendedParam, f64)>,
    /// Sorted, pairwise non-overlapping.
    segments: Vec<Segment>,
}

impl FiniteMeasure {
    pub fn empty() -> Self {
        FiniteMeasure {
            atoms: vec![],
            segments: vec![],
        }
    }

    pub fn from_atoms(atoms: Vec<(ExtendedParam, f64)>) -> Result<Self> {
        Self::new(atoms, vec![])
    }

    pub fn single_atom(position: ExtendedParam, mass: f64) -> Result<Self> {
        Self::from_atoms(vec![(position, mass)])
    }

    pub fn new(atoms: Vec<(ExtendedParam, f64)>, segments: Vec<Segment>) -> Result<Self> {
        let mut clean_atoms: Vec<(ExtendedParam, f64)> = Vec::new();
        let mut sorted = atoms;
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (pos, mass) in sorted {
            if mass < 0.0 {
                return Err(Error::InvalidMeasure(format!(
                    "negative atom mass {mass} at {pos}"
                )));
            }
            if !mass.is_finite() {
                return Err(Error::InvalidMeasure(format!(
                    "non-finite atom mass at {pos}"
                )));
            }
            if mass == 0.0 {
                continue;
            }
            if let ExtendedParam::Finite(v) = pos {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidMeasure(format!("invalid atom position {v}")));
                }
            }
            match clean_atoms.last_mut() {
                Some(last) if last.0.approx_eq(&pos, ATOM_MERGE_TOL) => last.1 += mass,
                _ => clean_atoms.push((pos, mass)),
            }
        }

        let mut clean_segments: Vec<Segment> = Vec::new();
        let mut segs = segments;
        segs.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for s in segs {
            if !(s.lo.is_finite() && s.hi.is_finite() && s.density.is_finite()) {
                return Err(Error::InvalidMeasure("non-finite segment data".into()));
            }
            if s.lo < 0.0 || s.lo >= s.hi {
                return Err(Error::InvalidMeasure(format!(
                    "segment bounds must satisfy 0 <= lo < hi, got [{}, {}]",
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

        Ok(FiniteMeasure {
            atoms: clean_atoms,
            segments: clean_segments,
        })
    }

    pub fn atoms(&self) -> &[(ExtendedParam, f64)] {
        &self.atoms
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.segments.is_empty()
    }

    pub fn is_atomic(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        let atom_mass: f64 = self.atoms.iter().map(|(_, m)| m).sum();
        let segment_mass: f64 = self.segments.iter().map(Segment::mass).sum();
        atom_mass + segment_mass
    }

    pub fn mass_at_infinity(&self) -> f64 {
        self.atoms
            .iter()
            .rev()
            .take_while(|(p, _)| p.is_infinite())
            .map(|(_, m)| m)
            .sum()
    }

    /// Mass of the atom at `position`, within the merge tolerance.
    pub fn mass_at(&self, position: &ExtendedParam) -> f64 {
        self.atoms
            .iter()
            .filter(|(p, _)| p.approx_eq(position, ATOM_MERGE_TOL))
            .map(|(_, m)| m)
            .sum()
    }

    /// Support: atom positions plus closures of positive-density segments.
    pub fn support(&self) -> ClosedSet {
        let mut intervals: Vec<(ExtendedParam, ExtendedParam)> = self
            .atoms
            .iter()
            .map(|(p, _)| (*p, *p))
            .collect();
        intervals.extend(self.segments.iter().map(|s| {
            (
                ExtendedParam::Finite(s.lo),
                ExtendedParam::Finite(s.hi),
            )
        }));
        ClosedSet::from_intervals(intervals).expect("support intervals are valid")
    }

    /// Sum of two measures. Overlapping segments are split at all breakpoints
    /// and densities added.
    pub fn add(&self, other: &FiniteMeasure) -> FiniteMeasure {
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        let segments = merge_segment_lists(&self.segments, &other.segments);
        FiniteMeasure::new(atoms, segments).expect("sum of valid measures is valid")
    }

    pub fn scale(&self, factor: f64) -> Result<FiniteMeasure> {
        if factor < 0.0 {
            return Err(Error::Negative {
                name: "factor",
                value: factor,
            });
        }
        let atoms = self
            .atoms
            .iter()
            .map(|(p, m)| (*p, m * factor))
            .collect();
        let segments = self
            .segments
            .iter()
            .map(|s| Segment {
                density: s.density * factor,
                ..*s
            })
            .collect();
        FiniteMeasure::new(atoms, segments)
    }

    /// Pushforward under λ ↦ 1/λ with 0 ↔ ∞; masses are preserved.
    ///
    /// Atoms move exactly. A segment (lo, hi) maps onto (1/hi, 1/lo) with
    /// density 1/s² in the image coordinate, re-approximated as
    /// piecewise-constant on a refinement grid with exact sub-piece masses.
    /// A segment touching 0 has an unbounded image; its tail beyond a large
    /// ceiling is carried by a single atom so total mass is still preserved.
    pub fn pushforward_reciprocal(&self) -> FiniteMeasure {
        let mut atoms: Vec<(ExtendedParam, f64)> = self
            .atoms
            .iter()
            .map(|(p, m)| (p.reciprocal(), *m))
            .collect();
        let mut segments: Vec<Segment> = Vec::new();
        for s in &self.segments {
            // Image mass over [s1, s2] is density * (1/s1 - 1/s2).
            let image_hi = if s.lo == 0.0 {
                PUSHFORWARD_CEILING
            } else {
                1.0 / s.lo
            };
            let image_lo = 1.0 / s.hi;
            if s.lo == 0.0 {
                let tail = s.density / PUSHFORWARD_CEILING;
                if tail > 0.0 {
                    atoms.push((ExtendedParam::Finite(PUSHFORWARD_CEILING), tail));
                }
            }
            refine_by_mass(
                image_lo,
                image_hi,
                |a, b| s.density * (1.0 / a - 1.0 / b),
                SEGMENT_REFINE,
                &mut segments,
            );
        }
        FiniteMeasure::new(atoms, segments).expect("pushforward of valid measure is valid")
    }

    /// ∫ (x−1)²(2+λ)/(x+λ) dν(λ), the λ = ∞ part contributing mass·(x−1)².
    pub fn integrate_kernel(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::NonPositive {
                name: "x",
                value: x,
            });
        }
        let mut total = 0.0;
        for (pos, mass) in &self.atoms {
            total += mass * kernel(*pos, x);
        }
        for s in &self.segments {
            total += segment_kernel_integral(s, x);
        }
        Ok(total)
    }

    /// ∫ ∂/∂x [(x−1)²(2+λ)/(x+λ)] dν(λ) in closed form.
    pub fn integrate_kernel_dx(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::NonPositive {
                name: "x",
                value: x,
            });
        }
        let mut total = 0.0;
        for (pos, mass) in &self.atoms {
            total += mass * kernel_dx(*pos, x);
        }
        for s in &self.segments {
            total += segment_kernel_dx(s, x);
        }
        Ok(total)
    }

    /// Transform every finite-λ mass element by a weight function, keeping the
    /// ∞-atom subject to `weight_at_infinity`. Segment images use exact
    /// sub-piece masses via the weight's antiderivative.
    pub(crate) fn weighted_finite_part(
        &self,
        weight: impl Fn(f64) -> f64,
        weight_antiderivative: impl Fn(f64) -> f64,
    ) -> FiniteMeasure {
        let atoms: Vec<(ExtendedParam, f64)> = self
            .atoms
            .iter()
            .filter_map(|(p, m)| {
                p.as_finite()
                    .map(|v| (ExtendedParam::Finite(v), m * weight(v)))
            })
            .collect();
        let mut segments = Vec::new();
        for s in &self.segments {
            refine_by_mass(
                s.lo,
                s.hi,
                |a, b| s.density * (weight_antiderivative(b) - weight_antiderivative(a)),
                SEGMENT_REFINE,
                &mut segments,
            );
        }
        FiniteMeasure::new(atoms, segments).expect("weighted measure is valid")
    }
}

/// The canonical kernel (x−1)²(2+λ)/(x+λ), read as (x−1)² at λ = ∞.
pub fn kernel(lambda: ExtendedParam, x: f64) -> f64 {
    let sq = (x - 1.0) * (x - 1.0);
    match lambda {
        ExtendedParam::Finite(l) => sq * (2.0 + l) / (x + l),
        ExtendedParam::Infinity => sq,
    }
}

/// ∂/∂x of the canonical kernel: (2+λ)(x−1)(x+2λ+1)/(x+λ)², or 2(x−1) at ∞.
pub fn kernel_dx(lambda: ExtendedParam, x: f64) -> f64 {
    match lambda {
        ExtendedParam::Finite(l) => {
            (2.0 + l) * (x - 1.0) * (x + 2.0 * l + 1.0) / ((x + l) * (x + l))
        }
        ExtendedParam::Infinity => 2.0 * (x - 1.0),
    }
}

/// Closed form for a constant-density segment, via
/// (x−1)²(2+λ)/(x+λ) = (x−1)²[1 + (2−x)/(x+λ)].
pub fn segment_kernel_integral(s: &Segment, x: f64) -> f64 {
    let sq = (x - 1.0) * (x - 1.0);
    let log_term = ((x + s.hi) / (x + s.lo)).ln();
    sq * ((s.hi - s.lo) + (2.0 - x) * log_term) * s.density
}

/// x-derivative of `segment_kernel_integral` in closed form.
pub fn segment_kernel_dx(s: &Segment, x: f64) -> f64 {
    let log_term = ((x + s.hi) / (x + s.lo)).ln();
    let inner = (s.hi - s.lo) + (2.0 - x) * log_term;
    let d_inner = -log_term + (2.0 - x) * (1.0 / (x + s.hi) - 1.0 / (x + s.lo));
    (2.0 * (x - 1.0) * inner + (x - 1.0) * (x - 1.0) * d_inner) * s.density
}

/// Split [lo, hi] into `pieces` equal sub-pieces, each with density chosen so
/// its mass equals `mass_between(a, b)` exactly.
fn refine_by_mass(
    lo: f64,
    hi: f64,
    mass_between: impl Fn(f64, f64) -> f64,
    pieces: usize,
    out: &mut Vec<Segment>,
) {
    let width = (hi - lo) / pieces as f64;
    for i in 0..pieces {
        let a = lo + i as f64 * width;
        let b = if i + 1 == pieces { hi } else { a + width };
        let mass = mass_between(a, b);
        if mass > 0.0 && b > a {
            out.push(Segment {
                lo: a,
                hi: b,
                density: mass / (b - a),
            });
        }
    }
}

/// Union-refinement sum of two sorted segment lists.
fn merge_segment_lists(a: &[Segment], b: &[Segment]) -> Vec<Segment> {
    let mut cuts: Vec<f64> = Vec::new();
    for s in a.iter().chain(b.iter()) {
        cuts.push(s.lo);
        cuts.push(s.hi);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() <= ATOM_MERGE_TOL);

    let density_at = |list: &[Segment], mid: f64| -> f64 {
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
            out.push(Segment {
                lo,
                hi,
                density: d,
            });
        }
    }
    out
}
