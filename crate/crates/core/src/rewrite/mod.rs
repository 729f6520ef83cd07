//! Rewrite rules: their textual form, legality checks and application.

pub mod apply;
pub mod axioms;
pub mod rule;

pub use apply::{apply, candidates, enumerate_legal, ApplyError, Rewriter};
pub use rule::{parse_rule, print_rule, RewriteRule, RuleName, RuleParseError, MAX_STM};
