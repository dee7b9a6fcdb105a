pub mod coeff;
pub mod contractions;
pub mod fedosov;
pub mod graded;
pub mod groupoid;
pub mod hopf;
pub mod hpl;
pub mod model;
pub mod oracle;
pub mod poly;
pub mod report;
pub mod sample;
pub mod suites;
