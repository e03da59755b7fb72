//! Singular hyperbolic metrics on the unit disc built from meromorphic
//! character forms: developing maps, numerical monodromy, classification of
//! monodromy groups against the proper Lie subgroups of PSL(2,R), and audits
//! of the residue and order identities these metrics satisfy.

pub mod audits;
pub mod charform;
pub mod cli;
pub mod developing;
pub mod error;
pub mod metriclab;
pub mod moebius;
pub mod poly;
pub mod subgroup;

pub use error::{Error, Result};
