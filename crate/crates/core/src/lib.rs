//! Grand-canonical thermodynamics of ideal quantum gases, chemical engine
//! cycles built from isothermal strokes, and perturbative estimates of
//! finite-time (irreversible) cycle performance.
//!
//! The crate is organised in layers:
//!
//! * [`specfun`] - polylogarithms, Riemann zeta, incomplete gamma, and the
//!   inverse polylogarithm of order 3/2; everything above is built on these.
//! * [`oracles`] - slow, independent reference implementations (quadrature,
//!   ODE integration) used by the test suite to validate the fast paths.
//!   They share no code with the routines they check.
//! * [`ideal_gas`] - equation of state for Bose and Fermi gases in a box,
//!   including condensed phases where one or more directions stay discrete.
//! * [`vdw`] - a mean-field (van der Waals) extension of the Bose gas.
//! * [`cycle`] - reversible isothermal chemical cycles (Carnot- and
//!   Otto-like), stroke work/heat ledgers, and closed-form efficiencies.
//! * [`irr`] - weak-coupling corrections for cycles driven at finite speed:
//!   particle/energy current traces, optimal stroke times, power at the
//!   optimum, and finite-size scaling reports.
//!
//! Units: `hbar = m = k_B = 1` unless stated otherwise on a parameter.

pub mod error;
pub mod specfun;
pub mod oracles;

pub use error::{Error, Result};
