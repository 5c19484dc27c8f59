pub mod finite_field;
pub mod partition;
pub mod polynomial;
pub mod plane;
pub mod curves;
pub mod analysis;
pub mod bitmap;
pub mod monodromy;
pub mod genus;
pub mod codes;
pub mod verify;
