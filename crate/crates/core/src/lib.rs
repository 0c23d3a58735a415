//! Synthesis and verification of skeletons: three-valued transition systems
//! that show which outputs an LTL specification forces and which it leaves
//! open.

pub mod automata;
pub mod ltl;
pub mod threeval;
pub mod oracle;
pub mod minlang;
pub mod gen;
pub mod membership;
pub mod skeleton;
pub mod learning;
