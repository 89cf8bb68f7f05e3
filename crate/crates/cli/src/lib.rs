//! Library side of the `listlab` binary: text formats for codes, words and
//! grids, plus the named experiments behind `experiment run` and the
//! acceptance suite.

pub mod experiments;
pub mod io;
