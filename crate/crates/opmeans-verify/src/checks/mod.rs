//! Property checkers, grouped by the structure they exercise. Each checker
//! is a pure pair: a sampler that draws a serializable trial input, and a
//! margin function that maps the input to one normalized slack value.

pub mod barycenter;
pub mod functional;
pub mod powermaps;
pub mod spectral_order;
pub mod traceforms;
pub mod util;
