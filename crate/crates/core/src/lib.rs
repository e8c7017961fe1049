pub mod expr;
pub mod fieldspec;
pub mod fields;
pub mod holo;
pub mod jets;
pub mod jordan;
pub mod operators;
pub mod poly;
pub mod verify;
