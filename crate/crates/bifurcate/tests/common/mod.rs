#![allow(dead_code)]

pub mod sweep;
