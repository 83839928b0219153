//! Exact computations with bar constructions of rational DG algebras.

pub mod complexes;
pub mod dga;
pub mod exactlin;
pub mod twisted;
pub mod bar;
pub mod comod;
pub mod connect;
