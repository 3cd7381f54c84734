//! Winding numbers of planar maps along closed loops.
//!
//! The winding number is the sum of principal-value angle increments
//! between consecutive samples divided by `2π`. The difference
//! `F = (u₁ − u₂, v₁ − v₂)` of two solutions is holomorphic in suitable
//! coordinates, so its winding around an isolated zero is that zero's
//! multiplicity.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pde::ScalarField2D;
use crate::scalar::{count, lit, to_f64, Real};

pub const MIN_LOOP_SAMPLES: usize = 8;
/// `|F| <= ZERO_FRACTION · max|F|` on the loop counts as a zero.
pub const ZERO_FRACTION: f64 = 1e-12;
pub const INTEGER_TOLERANCE: f64 = 1e-6;

/// Samples of a planar map along a closed polyline (closure implicit).
#[derive(Debug, Clone, PartialEq)]
pub struct LoopTrace<T> {
    points: Vec<(T, T)>,
    values: Vec<(T, T)>,
}

impl<T: Real> LoopTrace<T> {
    pub fn new(points: Vec<(T, T)>, values: Vec<(T, T)>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::InvalidInput("points and values differ in length".into()));
        }
        if points.len() < MIN_LOOP_SAMPLES {
            return Err(Error::InvalidInput(format!(
                "a loop needs at least {MIN_LOOP_SAMPLES} samples, got {}",
                points.len()
            )));
        }
        let scale = values.iter().fold(T::zero(), |m, &(a, b)| m.max(a.hypot(b)));
        let floor = lit::<T>(ZERO_FRACTION) * scale;
        if let Some(k) = values.iter().position(|&(a, b)| !(a.hypot(b) > floor)) {
            return Err(Error::ZeroOnLoop(k));
        }
        Ok(Self { points, values })
    }

    pub fn points(&self) -> &[(T, T)] {
        &self.points
    }

    pub fn values(&self) -> &[(T, T)] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The same loop traversed backwards from the same start point.
    pub fn reversed(&self) -> Self {
        let flip = |v: &[(T, T)]| {
            let mut out = vec![v[0]];
            out.extend(v[1..].iter().rev());
            out
        };
        Self {
            points: flip(&self.points),
            values: flip(&self.values),
        }
    }

    /// Signed angle from sample `k` to sample `k + 1` (cyclically).
    pub fn increments(&self) -> Result<Vec<T>> {
        let n = self.values.len();
        let limit = T::PI() - lit(1e-9);
        (0..n)
            .map(|k| {
                let (a1, b1) = self.values[k];
                let (a2, b2) = self.values[(k + 1) % n];
                let inc = (a1 * b2 - b1 * a2).atan2(a1 * a2 + b1 * b2);
                if inc.abs() >= limit {
                    Err(Error::UnderSampled {
                        index: k,
                        increment: to_f64(inc),
                    })
                } else {
                    Ok(inc)
                }
            })
            .collect()
    }

    /// Lifted angle at each sample, starting from `atan2` of the first value.
    pub fn cumulative_angles(&self) -> Result<Vec<T>> {
        let inc = self.increments()?;
        let (a0, b0) = self.values[0];
        let mut acc = b0.atan2(a0);
        let mut out = Vec::with_capacity(inc.len());
        out.push(acc);
        for d in &inc[..inc.len() - 1] {
            acc = acc + *d;
            out.push(acc);
        }
        Ok(out)
    }

    /// `(1/2π) Σ Δθ` before rounding.
    pub fn winding_sum(&self) -> Result<T> {
        let total = self.increments()?.into_iter().fold(T::zero(), |a, b| a + b);
        Ok(total / T::TAU())
    }
}

/// Integer winding number of the trace around the origin.
pub fn winding_number<T: Real>(trace: &LoopTrace<T>) -> Result<i64> {
    let sum = trace.winding_sum()?;
    let nearest = sum.round();
    if (sum - nearest).abs() > lit(INTEGER_TOLERANCE) {
        return Err(Error::NonIntegerWinding(to_f64(sum)));
    }
    Ok(nearest.to_i64().expect("winding number fits in i64"))
}

/// Samples `map` counterclockwise on a circle starting at angle 0.
pub fn circle_trace<T: Real>(
    center: (T, T),
    radius: T,
    samples: usize,
    map: impl Fn(T, T) -> Result<(T, T)>,
) -> Result<LoopTrace<T>> {
    if !(radius > T::zero()) {
        return Err(Error::InvalidInput("loop radius must be positive".into()));
    }
    let mut points = Vec::with_capacity(samples);
    let mut values = Vec::with_capacity(samples);
    for k in 0..samples {
        let t = T::TAU() * count::<T>(k) / count(samples);
        let p = (center.0 + radius * t.cos(), center.1 + radius * t.sin());
        values.push(map(p.0, p.1)?);
        points.push(p);
    }
    LoopTrace::new(points, values)
}

/// One row of an exported trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub x: f64,
    pub y: f64,
    pub f1: f64,
    pub f2: f64,
    pub angle: f64,
}

pub fn trace_rows<T: Real>(trace: &LoopTrace<T>) -> Result<Vec<TraceRow>> {
    let angles = trace.cumulative_angles()?;
    Ok(trace
        .points
        .iter()
        .zip(&trace.values)
        .zip(angles)
        .map(|((&(x, y), &(f1, f2)), angle)| TraceRow {
            x: to_f64(x),
            y: to_f64(y),
            f1: to_f64(f1),
            f2: to_f64(f2),
            angle: to_f64(angle),
        })
        .collect())
}

/// Loop trace of `(u₁ − u₂, v₁ − v₂)` on a circle, by bilinear interpolation.
pub fn difference_trace<T: Real>(
    u1: &ScalarField2D<T>,
    v1: &ScalarField2D<T>,
    u2: &ScalarField2D<T>,
    v2: &ScalarField2D<T>,
    center: (T, T),
    radius: T,
    samples: usize,
) -> Result<LoopTrace<T>> {
    let d = u1.domain();
    if v1.domain() != d || u2.domain() != d || v2.domain() != d {
        return Err(Error::DomainMismatch);
    }
    let (cx, cy) = center;
    if !(cx - radius >= d.x0() && cx + radius <= d.x1() && cy - radius >= d.y0() && cy + radius <= d.y1()) {
        return Err(Error::OutOfDomain);
    }
    circle_trace(center, radius, samples, |x, y| {
        // Round-off can push a point of the circle a hair past the edge.
        let x = x.max(d.x0()).min(d.x1());
        let y = y.max(d.y0()).min(d.y1());
        Ok((
            u1.interpolate(x, y)? - u2.interpolate(x, y)?,
            v1.interpolate(x, y)? - v2.interpolate(x, y)?,
        ))
    })
}

/// Multiplicity of the zero of `(u₁ − u₂, v₁ − v₂)` enclosed by the circle.
pub fn multiplicity_at_zero<T: Real>(
    u1: &ScalarField2D<T>,
    v1: &ScalarField2D<T>,
    u2: &ScalarField2D<T>,
    v2: &ScalarField2D<T>,
    center: (T, T),
    radius: T,
    samples: usize,
) -> Result<i64> {
    winding_number(&difference_trace(u1, v1, u2, v2, center, radius, samples)?)
}
