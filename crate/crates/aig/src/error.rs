use thiserror::Error;

#[derive(Debug, Error)]
pub enum AigError {
    #[error("pattern matrix has {got} rows but the graph has {expected} inputs")]
    PatternRows { expected: usize, got: usize },

    #[error("pattern rows have unequal widths ({0} vs {1})")]
    PatternWidth(usize, usize),

    #[error("input names differ: {0}")]
    InputMismatch(String),

    #[error("output names differ: {0}")]
    OutputMismatch(String),
}
