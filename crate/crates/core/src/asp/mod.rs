//! Non-ground ASP: syntax, text I/O, grounding and answer-set search.

mod error;
mod ground;
mod parse;
mod program;
mod solve;
mod syntax;

pub use error::AspError;
pub use ground::{ground, GroundBudget};
pub use parse::parse_asp;
pub use program::{GroundProgram, GroundRule};
pub use solve::{
    answer_sets, has_answer_set, has_answer_set_with, project_answer_sets, solve, AnswerSet, SolveOptions,
};
pub use syntax::{render_asp, NonGroundAtom, NonGroundProgram, NonGroundRule, Signature, Term};
