//! The straight-line program language: tokens, typed expressions, programs,
//! prefix and infix front ends, size limits and the finite-field evaluator.

pub mod encode;
pub mod eval;
pub mod expr;
pub mod infix;
pub mod limits;
pub mod path;
pub mod prefix;
pub mod program;
pub mod token;

pub use encode::{encode_rename, EncodeError, Renaming};
pub use eval::{evaluate, spot_check, EvalEnv, EvalError, SpotCheck, Value};
pub use expr::{Expr, TypeError};
pub use infix::{parse_normalized_source, InfixError};
pub use limits::{check_limits, LimitKind, LimitViolation, Limits};
pub use path::{Dir, NodePath};
pub use prefix::{parse_pair, parse_prefix, parse_prefix_with, print_pair, print_prefix, ParseError};
pub use program::{Program, ProgramError, Role, RoleMap, Stmt};
pub use token::{BinOp, Const, Func, FuncFamily, TypeTag, UnOp, VarId};
