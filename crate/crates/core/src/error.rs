use std::fmt;

/// Pipeline stage an error is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Segmentation,
    Enhancement,
    Sizing,
    Counting,
}

impl Stage {
    /// 1-based position in the counting pipeline.
    pub fn number(self) -> u8 {
        match self {
            Stage::Segmentation => 1,
            Stage::Enhancement => 2,
            Stage::Sizing => 3,
            Stage::Counting => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Stage::Segmentation => "segmentation",
            Stage::Enhancement => "enhancement",
            Stage::Sizing => "sizing",
            Stage::Counting => "counting",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage {} ({})", self.number(), self.name())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed image: {0}")]
    Malformed(String),

    #[error("unsupported bit depth: {0}")]
    UnsupportedBitDepth(String),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("invalid image dimensions {width}x{height} (each side must be in 1..=65535)")]
    InvalidDimensions { width: u64, height: u64 },

    #[error("{0}")]
    InvalidParameter(String),

    #[error("degenerate histogram")]
    DegenerateHistogram,

    #[error("empty histogram")]
    EmptyHistogram,

    #[error("chord density unbounded at length {length} for diameter {diameter}")]
    UnboundedDensity { diameter: f64, length: f64 },

    #[error("{stage}: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn at(self, stage: Stage) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Innermost error, with any stage attribution stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
