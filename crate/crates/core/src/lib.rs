pub mod calo;
pub mod cvnn;
pub mod engine;
pub mod experiment;
pub mod fock;
