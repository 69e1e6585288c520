pub mod error;
pub mod field;
pub mod graded;
pub mod io;
pub mod linsys;
pub mod matrix;
pub mod poset;
pub mod block;
pub mod braid;
pub mod cli;
pub mod connection;
pub mod directional;
pub mod fastslow;
pub mod transition;
