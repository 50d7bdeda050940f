//! Exact-arithmetic toolkit for digit statistics of continued-fraction and
//! base-b expansions.
//!
//! The crate revolves around a few structural facts about finite blocks of
//! CF digits: the convergent recurrence and its determinant, reversal
//! symmetry of denominators, cylinder intervals and their Lebesgue/Gauss
//! measures, and the prefix/suffix split of a fixed-denominator block at a
//! denominator threshold. On top of those it provides finite-word normality
//! statistics for both digit systems, Farey-sequence machinery, exhaustive
//! desk-scale censuses, and a toy-scale iterative constructor that emits CF
//! digit streams whose base-b windows contain long forced constant runs.
//!
//! Everything user-facing is exact: fractions are arbitrary-precision
//! rationals, digit windows are computed by integer comparison, and
//! comparisons against transcendental constants (Gauss measures of
//! cylinders, the Khinchin-Levy constant) run through certified rational
//! enclosures that are tightened until the comparison is decided.
//!
//! Entry points:
//! - [`cf`]: blocks, convergents, cylinders, digit windows.
//! - [`farey`]: Farey enumeration, neighbor forms, residue gap counts.
//! - [`splitter`]: the prefix/suffix split with certified defect bounds.
//! - [`normality`]: finite-word normality specs, verdicts, concatenation
//!   calculus.
//! - [`census`]: exhaustive counting experiments.
//! - [`constructor`]: the staged block construction.
//! - [`cli`]: the `cfnorm` command-line front end.
//!
//! The `examples/` directory has one runnable example per capability; see
//! the README for the map.

pub mod cf;
pub mod census;
pub mod cli;
pub mod constructor;
pub mod enclosure;
pub mod error;
pub mod farey;
pub mod normality;
pub mod rational;
pub mod splitter;
pub mod workers;

pub use cf::{
    base_digit_window, cf_eval, cf_expand, convergents, cylinder, last_convergent_at_most,
    reversal_numerator, CfBlock, ConvergentTable, CylinderInterval, DigitWindow, Variant,
};
pub use error::{Error, Result};
pub use rational::Rational;
