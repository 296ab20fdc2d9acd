/*! Core data structures: finite categories, double categories, and maps.

All structures store explicit finite tables over ordered maps, so iteration
order, serialization, and derived identifiers are deterministic. Validation
is separated from construction: builders accept anything, and `validate`
reports every violation at once.
*/

pub mod category;
pub mod double;
pub mod enumerate;
pub mod functor;
pub mod hom;
pub mod ids;
pub mod iso;
pub mod ops;
pub mod transf;

pub use category::{FinCategory, FinFunctor, Hom, InvalidCategory, InvalidFunctor};
pub use double::{
    DoubleCategory, DoubleDerivationScheme, DoubleGraph1Id, InvalidDouble, SquareBoundary,
};
pub use functor::{DoubleFunctor, InvalidDoubleFunctor};
pub use ids::{MorId, ObId, SqId};
pub use transf::{HNatTransf, Modification, VNatTransf};
