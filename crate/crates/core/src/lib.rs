pub mod api;
pub mod bench;
pub mod corpus;
pub mod pipeline;
pub mod repair;
pub mod splice;
pub mod testkit;
