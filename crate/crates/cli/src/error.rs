use std::fmt;

/// Diagnostic category; also decides the exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Config,
    Io,
    Dataset,
    Params,
    Runtime,
}

impl Kind {
    pub fn exit_code(self) -> i32 {
        match self {
            Kind::Config => 2,
            Kind::Io => 3,
            Kind::Dataset => 4,
            Kind::Params => 5,
            Kind::Runtime => 6,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Kind::Config => "config",
            Kind::Io => "io",
            Kind::Dataset => "dataset",
            Kind::Params => "params",
            Kind::Runtime => "runtime",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct Failure {
    pub kind: Kind,
    pub message: String,
}

impl Failure {
    pub fn new(kind: Kind, message: impl Into<String>) -> Self {
        Failure {
            kind,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}]: {}", self.kind.label(), self.message.replace('\n', " "))
    }
}

impl From<spikegnn::Error> for Failure {
    fn from(e: spikegnn::Error) -> Self {
        use spikegnn::Error as E;
        let kind = match &e {
            E::Io { .. } => Kind::Io,
            E::Parse { .. }
            | E::EmptyFile { .. }
            | E::DuplicateId(_)
            | E::UnknownNode { .. }
            | E::TopicTooSmall { .. }
            | E::ValidationQuotaUnreachable { .. } => Kind::Dataset,
            E::InvalidParam { .. } | E::Build { .. } | E::TargetOutOfRange { .. } => Kind::Params,
            _ => Kind::Runtime,
        };
        Failure::new(kind, e.to_string())
    }
}
