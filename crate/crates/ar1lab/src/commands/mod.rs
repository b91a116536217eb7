pub mod compare;
pub mod fv;
pub mod mc;
pub mod oracle;
pub mod renewal;
pub mod spectrum;
