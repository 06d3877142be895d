// SPDX-License-Identifier: Apache-2.0

//! Inputs shared by the benchmarks.

use bgpmv_core::gen::{full_mesh, Mesh};
use bgpmv_core::{parse_network, parse_spec, Network, Spec};

pub fn mesh(n: usize) -> Mesh {
    full_mesh(n, n as u64).expect("n >= 2")
}

/// The three-router running example shipped with the core crate.
pub fn running_example() -> (Network, Spec) {
    let net =
        parse_network(include_str!("../../core/fixtures/running_example.json")).expect("fixture");
    let spec = parse_spec(
        include_str!("../../core/fixtures/running_example_spec.json"),
        &net,
    )
    .expect("fixture");
    (net, spec)
}
