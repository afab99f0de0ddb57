//! Minimum free energy of multistranded nucleic acid systems, corrected for
//! rotational symmetry.
//!
//! The pipeline per circular ordering: [`dp::fill`] computes the
//! symmetry-naive optimum, then [`backtrack::true_mfe`] scans structures in
//! order of naive energy until the symmetry-corrected optimum is certain.

pub mod backtrack;
pub mod bench;
pub mod cli;
pub mod dp;
pub mod energy;
pub mod oracle;
pub mod pipeline;
pub mod strands;
pub mod structure;
pub mod symmetry;
