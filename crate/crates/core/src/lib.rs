//! Exact computations around the splitting of torus normalizers in finite
//! groups of Lie type: root systems and Weyl groups of G2 and D4, the Tits
//! extended Weyl group, torus structure by Smith normal form, complement
//! certification, spinor norms for the twisted orthogonal groups, and the
//! splitting classifier.

#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod chevtits;
pub mod classify;
pub mod error;
pub mod linmod;
pub mod matrix;
pub mod normlift;
pub mod par;
pub mod rootsys;
pub mod selftest;
pub mod signedperm;
pub mod torus;
pub mod weyl;

pub use chevtits::{StructureConstants, TitsElement, TitsGroup};
pub use classify::{classify, Epsilon, GroupFamily, Outcome, SplitVerdict, TorusLabel, TorusSpec};
pub use error::{Error, Result};
pub use matrix::IntMatrix;
pub use par::Exec;
pub use rootsys::{LengthClass, Root, RootSystem, RootSystemType};
pub use signedperm::{cycle_type, CycleType, SignedPerm};
pub use torus::{Family, FrobConfig, TorusStructure, TorusVector};
pub use weyl::{WeylElement, WeylGroup, WeylTwist};
