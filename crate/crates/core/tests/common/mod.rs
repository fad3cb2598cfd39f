#![allow(dead_code)]

use proptest::prelude::*;
use suffdiv::{Kernel, ProbVec};

fn normalize(w: Vec<f64>) -> ProbVec {
    let total: f64 = w.iter().sum();
    ProbVec::new(w.into_iter().map(|x| x / total).collect()).unwrap()
}

/// Interior point with every coordinate at least about `1e-3 / dim`.
pub fn interior(dim: usize) -> impl Strategy<Value = ProbVec> {
    prop::collection::vec(1e-3f64..1.0, dim).prop_map(normalize)
}

pub fn interior_pair(dim: usize) -> impl Strategy<Value = (ProbVec, ProbVec)> {
    (interior(dim), interior(dim))
}

pub fn kernel(dim: usize) -> impl Strategy<Value = Kernel> {
    prop::collection::vec(prop::collection::vec(0.0f64..1.0, dim), dim).prop_map(|cols| {
        let cols = cols
            .into_iter()
            .map(|mut c| {
                c[0] += 1e-3;
                let t: f64 = c.iter().sum();
                c.into_iter().map(|x| x / t).collect()
            })
            .collect();
        Kernel::from_columns(cols).unwrap()
    })
}

/// Dimension paired with a value built from it.
pub fn with_dim<S, F>(dims: std::ops::RangeInclusive<usize>, make: F) -> impl Strategy<Value = S::Value>
where
    S: Strategy,
    F: Fn(usize) -> S + Clone + 'static,
{
    dims.prop_flat_map(make)
}
