pub mod cross_check;
pub mod finder;
pub mod generators;
pub mod graph;
pub mod harness;
pub mod io;
pub mod matching;
pub mod oracle;
pub mod packer;
pub mod partition;
pub mod path_cover;
pub mod pattern;
pub mod rng;
pub mod witness;
