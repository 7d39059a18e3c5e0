pub mod cli;
pub mod extract;
pub mod forge;
pub mod kb;
pub mod layout;
pub mod network;
pub mod render;
