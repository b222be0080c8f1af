//! Poisson-Kitaev models on doubly ciliated ribbon graphs, Fock-Rosly spaces and
//! the decoupling isomorphism between them, over a concrete global double.

pub mod decoupling_iso;
pub mod double_group;
pub mod fock_rosly;
pub mod graph_moves;
pub mod kitaev_space;
pub mod poisson_lab;
pub mod ribbon_graph;
