//! Convex functions and bodies: evaluation, derivatives, subdifferentials,
//! conjugates and JSON specifications.

pub mod body;
mod conjugate;
pub mod discrete;
mod function;
pub mod hull;
mod spec;
mod subdiff;

pub use body::ConvexBody;
pub use discrete::discrete_conjugate;
pub use function::{ConvexFunction, GradientLevels, RadiusLaw};
pub use spec::{BodySpec, FunctionSpec};
pub use subdiff::Subdifferential;
