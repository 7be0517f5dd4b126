pub mod bench;
pub mod fold;
pub mod gap;
pub mod inspect;
pub mod shared;
pub mod surrogate;
