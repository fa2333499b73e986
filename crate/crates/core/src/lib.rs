//! Test amplification for MiniLang programs.
//!
//! The pipeline takes a project of application code (`src/*.mini`) and
//! hand-written tests (`tests/*.mini`). It derives new tests from the
//! existing ones and keeps those that kill mutants the original suite
//! missed.

pub mod syntax;
pub mod interp;
pub mod program;
pub mod mutation;
pub mod amplify;
pub mod project;
pub mod seed;
pub mod orchestrator;
pub mod report;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/minilang.md")]
    mod minilang {}
    #[doc = include_str!("../../../book/src/mutation.md")]
    mod mutation {}
    #[doc = include_str!("../../../book/src/amplification.md")]
    mod amplification {}
    #[doc = include_str!("../../../book/src/selection.md")]
    mod selection {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/report-format.md")]
    mod report_format {}
}
