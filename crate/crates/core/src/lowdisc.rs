//! Deterministic low-discrepancy sequences (Halton) and QMC rejection
//! sampling against a density on a rectangular parameter domain.
//!
//! All generation is a pure function of `(index, bases)`: two streams with
//! the same configuration produce bit-identical output, which keeps every
//! downstream sampling step reproducible.

use crate::error::{Error, Result};
use crate::surface::ParamDomain;

/// A point of the open unit square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSquarePoint {
    pub u: f64,
    pub v: f64,
}

/// Base-`base` digit reversal of `i` into [0, 1).
///
/// For `i = sum d_j base^j` this returns `sum d_j base^(-j-1)`.
pub fn radical_inverse(i: u64, base: u64) -> f64 {
    assert!(i >= 1, "radical inverse is defined for indices >= 1");
    assert!(base >= 2, "radical inverse base must be >= 2");
    let b = base as f64;
    let mut n = i;
    let mut f = 1.0 / b;
    let mut x = 0.0;
    while n > 0 {
        x += (n % base) as f64 * f;
        n /= base;
        f /= b;
    }
    x
}

/// `count` consecutive 2D Halton points starting at `start_index`.
pub fn halton_2d(count: usize, start_index: u64, bases: (u64, u64)) -> Vec<UnitSquarePoint> {
    assert!(count > 0);
    (0..count as u64)
        .map(|k| UnitSquarePoint {
            u: radical_inverse(start_index + k, bases.0),
            v: radical_inverse(start_index + k, bases.1),
        })
        .collect()
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Halton generator producing (u, v, w) triples: two position coordinates
/// plus an acceptance coordinate in a third coprime base, so that accept
/// decisions stay jointly equidistributed with position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HaltonStream {
    bases: (u64, u64, u64),
    next_index: u64,
}

impl HaltonStream {
    /// Stream with the canonical bases (2, 3, 5), starting at index 1.
    pub fn new() -> Self {
        HaltonStream {
            bases: (2, 3, 5),
            next_index: 1,
        }
    }

    /// Stream starting at `start_index >= 1` with the canonical bases.
    pub fn starting_at(start_index: u64) -> Self {
        assert!(start_index >= 1, "Halton indices start at 1");
        HaltonStream {
            bases: (2, 3, 5),
            next_index: start_index,
        }
    }

    /// Stream with custom bases, which must be pairwise distinct primes.
    pub fn with_bases(bases: (u64, u64, u64), start_index: u64) -> Result<Self> {
        let (a, b, c) = bases;
        if !(is_prime(a) && is_prime(b) && is_prime(c)) || a == b || b == c || a == c {
            return Err(Error::InvalidParameter(format!(
                "Halton bases must be pairwise distinct primes, got ({a}, {b}, {c})"
            )));
        }
        if start_index == 0 {
            return Err(Error::InvalidParameter(
                "Halton indices start at 1".into(),
            ));
        }
        Ok(HaltonStream {
            bases,
            next_index: start_index,
        })
    }

    pub fn bases(&self) -> (u64, u64, u64) {
        self.bases
    }

    pub fn next_index(&self) -> u64 {
        self.next_index
    }

    /// Next (u, v, w) triple, advancing the stream.
    pub fn next_triple(&mut self) -> (f64, f64, f64) {
        let i = self.next_index;
        self.next_index += 1;
        (
            radical_inverse(i, self.bases.0),
            radical_inverse(i, self.bases.1),
            radical_inverse(i, self.bases.2),
        )
    }
}

impl Default for HaltonStream {
    fn default() -> Self {
        Self::new()
    }
}

/// Parameter points accepted by one rejection-sampling pass.
#[derive(Debug, Clone)]
pub struct RejectionSample {
    /// Accepted (u, v) parameter points, in stream order.
    pub accepted: Vec<(f64, f64)>,
    /// Number of stream triples consumed (
    /// the requested raw count).
    pub attempted: usize,
}

/// Draws `want_raw` stream triples, maps the position coordinates affinely
/// into `domain`, and keeps a point iff `w <= density(u, v) / density_bound`.
///
/// `density_bound` must dominate the density on the whole domain; the caller
/// supplies it (analytically where possible).
pub fn rejection_sample<F>(
    stream: &mut HaltonStream,
    domain: &ParamDomain,
    density: F,
    density_bound: f64,
    want_raw: usize,
) -> Result<RejectionSample>
where
    F: Fn(f64, f64) -> f64,
{
    if !density_bound.is_finite() || density_bound <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "density bound must be positive and finite, got {density_bound}"
        )));
    }
    if want_raw == 0 {
        return Err(Error::InvalidParameter(
            "rejection sampling needs at least one attempt".into(),
        ));
    }
    let mut accepted = Vec::new();
    for _ in 0..want_raw {
        let (s, t, w) = stream.next_triple();
        let (u, v) = domain.from_unit(s, t);
        let rho = density(u, v);
        if !rho.is_finite() || rho < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "density must be finite and nonnegative, got {rho} at ({u}, {v})"
            )));
        }
        if w <= rho / density_bound {
            accepted.push((u, v));
        }
    }
    Ok(RejectionSample {
        accepted,
        attempted: want_raw,
    })
}
