//! Built-in systems.

pub mod lr1;
pub mod normal_forms;
