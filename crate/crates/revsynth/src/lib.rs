//! Synthesis of reversible circuits from Reed-Muller expansions.
//!
//! A Boolean function given as a Positive Polarity Reed-Muller (PPRM)
//! expansion — an XOR of AND-products of uncomplemented variables — is
//! compiled into a reversible circuit of multi-control-NOT gates over the
//! `n` input wires plus one ancilla wire that accumulates the result.
//! Two synthesis routes are provided:
//!
//! * the **direct** method: one gate per product term;
//! * the **factorization** method: common factors are extracted and
//!   realized once on temporarily repurposed input wires, which can cut
//!   the quantum cost substantially on functions with shared structure
//!   (homogeneous functions of degree at most 3 in particular).
//!
//! The crate also contains an exhaustive bit-parallel simulator, an
//! equivalence and input-preservation checker, a quantum-cost model with
//! the Toffoli/Feynman pair reduction, a plain-text netlist format, and a
//! benchmark harness. The `revsynth` binary exposes all of it on the
//! command line (`synth`, `transform`, `verify`, `bench`).

pub mod circuit;
pub mod cli;
pub mod pprm;
pub mod synthesis;
pub mod verify;

pub use circuit::{Circuit, CircuitError, CostModel, Gate, NetlistError, DEFAULT_GUARD};
pub use pprm::{builtin, Minterm, PprmError, PprmExpr, TruthTable, MAX_VARS};
pub use synthesis::{
    build_factor_table, direct_synthesize, emit, factorize, synthesize, Chain, ChainLink,
    FactorTable, FactoredForm, Method, SynthesisError, SynthesisResult,
};
pub use verify::{check_equivalence, run_benchmarks, BenchReport, BenchRow, Verdict, VerifyError};
