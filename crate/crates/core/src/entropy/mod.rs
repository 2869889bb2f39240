//! Entropy and Orlicz functionals, the entropy pair, and run monitors.

mod functionals;
mod monitors;

pub use functionals::{
    dissipation, entropy_density, entropy_flux, entropy_total, flux, orlicz_functional, sigma0, sigma0_prime,
    OrliczCalibration,
};
pub use monitors::{
    build_monitors, EntropyMonitor, FluxBalance, MassMonitor, MinPrinciple, MomentTracker, Monitor, MonitorContext,
    MonitorSpec, SobolevMonitor, Verdict, ENTROPY_RATE_TOL, FLUX_BALANCE_TOL, MASS_TOL,
};
