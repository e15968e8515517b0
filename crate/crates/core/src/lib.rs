pub mod colouring;
pub mod distinguisher;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod generate;
pub mod graph;
pub mod io;
pub mod ordering;
pub mod params;
pub mod verify;
