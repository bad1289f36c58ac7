pub mod arith;
pub mod error;
pub mod ideal;
pub mod serde_poly;
pub mod ring;
pub mod smooth;
pub mod neron;
pub mod resolve;
