pub mod cli;
pub mod coeff;
pub mod coideal;
pub mod dsl;
pub mod qalgebra;
pub mod repmat;
pub mod ring;
pub mod verify;
