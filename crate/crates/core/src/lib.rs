pub mod catalog;
pub mod count;
pub mod error;
pub mod export;
pub mod genericity;
pub mod lattice;
pub mod lifting;
pub mod line;
pub mod linsys;
pub mod placement;
pub mod rat;
pub mod subdivision;
pub mod surface;
pub mod survey;

pub use error::{Error, Result};
pub use lattice::{Dir, LatticePoint, Perm, Simplex3};
pub use rat::Rat;
