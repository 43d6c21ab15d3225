//! Query answering over ELHO knowledge bases by materialising a datalog
//! approximation of the canonical model and filtering spurious matches.

pub mod engine;
pub mod kb;
pub mod oracle;
pub mod query;
pub mod rewrite;
pub mod workbench;

/// Any error raised by the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Kb(#[from] kb::KbError),
    #[error(transparent)]
    Engine(#[from] engine::EngineError),
    #[error(transparent)]
    Query(#[from] query::QueryError),
    #[error(transparent)]
    Expansion(#[from] oracle::ExpansionError),
}

impl Error {
    /// True if a fact budget ran out.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::Engine(engine::EngineError::BudgetExceeded { .. })
                | Error::Query(query::QueryError::Engine(
                    engine::EngineError::BudgetExceeded { .. }
                ))
                | Error::Expansion(oracle::ExpansionError::BudgetExceeded { .. })
        )
    }
}
