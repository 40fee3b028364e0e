pub mod bifactor;
pub mod counting;
pub mod curves;
pub mod error;
pub mod exceptional;
pub mod field;
pub mod poly;
pub mod report;
pub mod zeta;

pub use error::{Error, ErrorKind, Result};
pub use field::{embed, Elem, Embedding, Field, FieldElem};
pub use poly::{BiPoly, UniPoly};
