//! Shared fixtures for the kernel benchmarks.

use longtail_core::{InnovationSpec, ProcessSpec, TailTreatment};

/// Stable (alpha = 1.5, d = 0.2) process with an aggregated far past of horizon 4n.
pub fn stable_spec(n: usize) -> ProcessSpec {
    ProcessSpec::new(0.2, 1.0, InnovationSpec::symmetric_stable(1.5, 1.0), 4 * n)
        .and_then(|s| s.with_tail(TailTreatment::Aggregate))
        .expect("valid fixture")
}

/// Gaussian (d = 0.25) process truncated at horizon 4n.
pub fn gaussian_spec(n: usize) -> ProcessSpec {
    ProcessSpec::new(0.25, 1.0, InnovationSpec::gaussian(1.0), 4 * n).expect("valid fixture")
}
