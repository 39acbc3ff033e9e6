pub mod analysis;
pub mod cli;
pub mod exactla;
pub mod metric;
pub mod momentum;
pub mod pde;
pub mod prolongation;
pub mod ratexpr;
