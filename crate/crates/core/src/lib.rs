pub mod densela;
pub mod model;
pub mod igc;
pub mod walk;
pub mod analysis;
pub mod liouville;
