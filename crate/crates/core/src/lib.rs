pub mod bridge;
pub mod curate;
pub mod datagen;
pub mod lang;
pub mod rewrite;
pub mod search;
pub mod verify;
