//! Shared fixtures for the pipeline benchmarks.

use qsurf_core::surface::{sample_region, sphere_cap, torus, SampleSet};
use qsurf_core::{HaltonStream, Region};

/// Uniform sample of the full torus (R = 3, r = 2).
pub fn torus_sample(m0: usize) -> SampleSet {
    let t = torus(3.0, 2.0).unwrap();
    let mut stream = HaltonStream::new();
    sample_region(&t, &Region::Full, m0, &mut stream, None).unwrap()
}

/// Acceptance-free sample of a unit-sphere cap: exactly `count` points.
pub fn cap_sample(count: usize) -> SampleSet {
    let cap = sphere_cap(1.0, 0.2).unwrap();
    let mut stream = HaltonStream::new();
    sample_region(&cap, &Region::Full, count, &mut stream, None).unwrap()
}
