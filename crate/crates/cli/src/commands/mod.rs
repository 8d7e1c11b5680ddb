pub mod coherent;
pub mod rtfc;
pub mod sweep;
pub mod universal;
pub mod validate;
