pub mod acu;
pub mod cli;
pub mod corpus;
pub mod correlate;
pub mod judge;
pub mod lexmetrics;
pub mod resample;
