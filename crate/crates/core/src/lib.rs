pub mod field;
pub mod combinatorics;
pub mod polyrep;
pub mod schur;
pub mod yoneda;
pub mod resolution;
pub mod hom;
pub mod ell;
pub mod products;
pub mod cache;
