//! Symbolic-numeric construction and verification of Noether triples
//! `(τ, ξ, f)` for regular Lagrangian ODEs. The guide in `book/` walks
//! through each module.

pub mod expr;
pub mod mechanics;
pub mod noether;
pub mod dynamics;
pub mod corpus;
pub mod sysfile;

// keep the guide's snippets compiling and passing
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/expressions.md")]
    mod expressions {}
    #[doc = include_str!("../../../book/src/systems.md")]
    mod systems {}
    #[doc = include_str!("../../../book/src/killing.md")]
    mod killing {}
    #[doc = include_str!("../../../book/src/solving.md")]
    mod solving {}
    #[doc = include_str!("../../../book/src/corpus.md")]
    mod corpus {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/file-format.md")]
    mod file_format {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
