//! Colored operads over small linear categories, computed exactly.

pub mod cli;
pub mod collection;
pub mod endalg;
pub mod fincat;
pub mod freeop;
pub mod hyperop;
pub mod linalg;
pub mod operad;
pub mod perm;
pub mod report;
pub mod tensor;
