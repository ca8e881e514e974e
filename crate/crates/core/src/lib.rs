//! Part-of-speech tagging for source code identifiers: an ensemble of
//! decision trees or random forests over the outputs of three constituent
//! taggers plus positional and contextual features.
//!
//! ```
//! use idpos::splitter::split;
//! assert_eq!(split("GetUserToken").unwrap().words, ["Get", "User", "Token"]);
//! ```

pub mod analysis;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod features;
pub mod learners;
pub mod metrics;
pub mod splitter;
pub mod taggers;
pub mod tagset;

pub use error::{Error, Result};
