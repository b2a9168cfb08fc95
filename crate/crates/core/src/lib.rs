pub mod adversary;
pub mod color;
pub mod config;
pub mod construction;
pub mod folkman;
pub mod graph;
pub mod graph6;
pub mod ledger;
pub mod presentation;
pub mod trace;
pub mod verify;
