//! Free-group toolkit for cusped spaces, subgroup height, peripheral
//! structures and Dehn fillings.

pub mod cusped;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod filling;
pub mod horoball;
pub mod peripheral;
pub mod stallings;
pub mod words;

pub use error::{Error, Result};
pub use stallings::{Exactness, Index, SubgroupGraph};
pub use words::{Alphabet, Letter, Word};
