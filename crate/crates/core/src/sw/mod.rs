//! Schrieffer-Wolff machinery: block splits, the order 1..4 series, the exact
//! direct-rotation effective Hamiltonian, gadget assembly, cross-gadget
//! interference and Δ sweeps.

pub mod exact;
pub mod gadget;
pub mod interference;
pub mod series;
pub mod split;
pub mod sweep;

pub use exact::{exact_schrieffer_wolff, exact_sw_polar, ExactEffective};
pub use gadget::{assemble_simulator, check_gadget_conditions, ConditionReport, GadgetInstance};
pub use interference::{cross_gadget_interference, InterferenceGadget, InterferenceReport};
pub use series::{effective_series, EffectiveSeries, Perturbations};
pub use split::{block_split, BlockSplit};
pub use sweep::{convergence_sweep, SweepReport, SweepRow};
