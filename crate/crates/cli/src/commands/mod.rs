pub mod bench;
pub mod enumerate;
pub mod phantom;
pub mod project;
pub mod reconstruct;
