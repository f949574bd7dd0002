use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("duplicate document id `{0}`")]
    DuplicateDocId(String),
    #[error("smoothed probability undefined for an empty text with mu = 0")]
    UndefinedSmoothing,
    #[error("similarity is undefined for two empty queries")]
    EmptyQueries,
    #[error("query is empty after analysis")]
    EmptyQuery,
    #[error("feedback set is empty")]
    EmptyFeedback,
    #[error("unknown document `{0}`")]
    UnknownDoc(String),
    #[error("no relevance judgments for topic `{0}`")]
    UnknownTopic(String),
    #[error("empty parameter grid")]
    EmptyGrid,
    #[error("invalid session: {0}")]
    InvalidSession(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}
