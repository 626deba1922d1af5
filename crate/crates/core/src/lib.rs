//! Multi-agent epistemic logic over weakly directed frames.

pub mod broadcast;
pub mod decide;
pub mod error;
pub mod filtration;
pub mod formula;
pub mod gen;
pub mod kripke;
pub mod systems;
pub mod unpack;

pub use error::{Error, Result};
pub use formula::{parse, print, Formula};
pub use kripke::{Frame, Model, WorldMap};
