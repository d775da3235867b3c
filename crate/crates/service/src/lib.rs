//! Deployable surface of the prototype engine: the pipeline behind the
//! `hyval` command, the catalog store and the HTTP API.

pub mod api;
pub mod pipeline;
pub mod store;
