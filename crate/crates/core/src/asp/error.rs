use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AspError {
    #[error("rule {rule} is unsafe: variable(s) {} do not occur in a positive body atom", vars.join(", "))]
    Unsafe { rule: usize, vars: Vec<String> },
    #[error("cannot order the positive body of rule {0} so that every arithmetic term is evaluable")]
    JoinOrder(usize),
    #[error("grounding budget exceeded: more than {limit} {what}")]
    GroundBudget { what: &'static str, limit: usize },
    #[error("search budget exceeded after {0} decisions")]
    SearchBudget(u64),
    #[error("{line}:{column}: {message}")]
    Parse { line: usize, column: usize, message: String },
}
