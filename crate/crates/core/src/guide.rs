//! The book chapters, compiled as doc-tests.

#[doc = include_str!("../../../book/src/intro.md")]
pub mod intro {}
#[doc = include_str!("../../../book/src/origamis.md")]
pub mod origamis {}
#[doc = include_str!("../../../book/src/veech.md")]
pub mod veech {}
#[doc = include_str!("../../../book/src/cylinders.md")]
pub mod cylinders {}
#[doc = include_str!("../../../book/src/dessins.md")]
pub mod dessins {}
#[doc = include_str!("../../../book/src/families.md")]
pub mod families {}
#[doc = include_str!("../../../book/src/ledger.md")]
pub mod ledger {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
