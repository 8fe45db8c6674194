pub mod bench;
pub mod grounding;
pub mod oracle;
pub mod program;
pub mod solving;
