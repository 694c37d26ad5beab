pub mod boolfun;
pub mod counting;
pub mod gf2;
pub mod mmf;
pub mod oracle;
