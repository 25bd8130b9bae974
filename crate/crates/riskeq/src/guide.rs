//! The user guide, one module per chapter of the rendered book under
//! `book/`. Each chapter is included verbatim so its code blocks run as
//! doc-tests and the book can never drift from the library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/games-and-profiles.md")]
pub mod games_and_profiles {}

#[doc = include_str!("../../../book/src/valuations.md")]
pub mod valuations {}

#[doc = include_str!("../../../book/src/concavity-and-wee.md")]
pub mod concavity_and_wee {}

#[doc = include_str!("../../../book/src/scheduling-games.md")]
pub mod scheduling_games {}

#[doc = include_str!("../../../book/src/equilibria.md")]
pub mod equilibria {}

#[doc = include_str!("../../../book/src/gadgets.md")]
pub mod gadgets {}

#[doc = include_str!("../../../book/src/property-suites.md")]
pub mod property_suites {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
