//! Tensors over a metric vector space and the action of `so(V)` on them.

pub mod dense;
pub mod metric;

pub use dense::Tensor;
pub use metric::MetricSpace;
