pub mod exp1;
pub mod population;
pub mod sweep;
