// index loops mirror the matrix formulas they implement
#![allow(clippy::needless_range_loop)]

pub mod bgg;
pub mod chevalley;
pub mod context;
pub mod error;
pub mod linalg;
pub mod monoid;
pub mod poly;
pub mod rational;
pub mod rootsys;
pub mod upoly;
pub mod verify;
pub mod zhelobenko;
