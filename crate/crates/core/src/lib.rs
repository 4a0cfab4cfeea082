pub mod corpus;
pub mod error;
pub mod exec;
pub mod expansion;
pub mod genus;
pub mod lemmas;
pub mod ncpoly;
pub mod perms;
pub mod rmt;
pub mod scalars;
pub mod selftest;

pub use error::{Error, Result};
