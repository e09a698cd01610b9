pub mod algebra;
pub mod anomaly;
pub mod harness;
pub mod oracle;
pub mod symbol;
