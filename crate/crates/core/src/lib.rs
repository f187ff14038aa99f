pub mod ann;
pub mod cli;
pub mod cones;
pub mod dktt;
pub mod eps;
pub mod forest;
pub mod kinetic;
pub mod motion;
pub mod oracle;
pub mod rbrt;
pub mod scenario;
pub mod sim;
pub mod sygraph;
