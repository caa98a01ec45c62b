//! Calculus of energy distributions on the integer ladder: convolution
//! algebra and reciprocal sequences, the shift-mixture preorder, quantum
//! Fisher information brackets, covariant channels, smoothed rates, and the
//! entanglement-theory counterpart of the same conversion questions.

pub mod amajor;
pub mod channels;
pub mod dists;
pub mod entbridge;
pub mod qfi;
pub mod scalar;
pub mod seq;
pub mod spectra;
