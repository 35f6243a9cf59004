//! Interval-valued answer set programming with a removed-set belief base
//! revision operator.
//!
//! * [`interval`] is the truth space of sub-intervals of `[0,1]`.
//! * [`program`] holds the rule syntax, parser and grounder.
//! * [`transform`] turns a program into one equation per head literal.
//! * [`semantics`] computes answer sets on the equation system.
//! * [`revision`] implements the modified union and the revision operator.
//! * [`harness`] checks revision postulates and generates random programs.

pub mod harness;
pub mod interval;
pub mod program;
pub mod revision;
pub mod semantics;
pub mod transform;

pub use interval::{Algebra, DistanceVariant, TruthInterval};
pub use program::{parse_program, Atom, Literal, Program, Rule, RuleId};
pub use semantics::{answer_set, AnswerSet, Interpretation};
