//! Nothing here: this package exists for the criterion targets in benches/.
