//! Alternative-path computation for networks with single-arc failures.
//!
//! Given a capacitated, cost-weighted directed network, a source, a
//! destination and a budget `k`, choose `k` simple paths so that the worst
//! max-flow left after any single arc of their union fails is as large as
//! possible, and among those the cheapest.

pub mod apcp;
pub mod bench;
pub mod cli;
pub mod flow;
pub mod io;
pub mod kpi;
pub mod network;
pub mod rapcp;
pub mod solve;
