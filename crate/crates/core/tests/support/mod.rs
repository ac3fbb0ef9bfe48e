// Shared across integration-test targets; not every target uses every
// helper.
#![allow(dead_code)]

pub mod oracle;
