pub mod local;
pub mod shapes;
pub mod synth;
pub mod train;
