pub mod curve;
pub mod hopf;
pub mod models;
