//! Muller context-free languages of scattered and well-ordered words:
//! grammars, fixed-point expressions, bounded semantics, and a decision
//! procedure for well-orderedness.

pub mod cli;
pub mod compile;
pub mod decide;
pub mod eval;
pub mod expr;
pub mod grammar;
pub mod word;
