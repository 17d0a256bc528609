//! Equivalence checking and the benchmark harness.
//!
//! The oracle compares a circuit's ancilla function against a PPRM
//! expression over every assignment (or a fixed-seed random sample when
//! the input count exceeds the enumeration guard) and reports the least
//! failing assignment on a mismatch. The harness synthesizes each
//! benchmark with both methods, audits gate counts and costs, and refuses
//! to emit a report unless every row verifies.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError};
use crate::pprm::PprmExpr;
use crate::synthesis::{synthesize, Method};

/// Seed for sampled verification, fixed so identical invocations produce
/// identical output.
const SAMPLE_SEED: u64 = 0x7265_7673_796e_7468;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("circuit has {circuit_inputs} inputs but the function has {expr_vars} variables")]
    WidthMismatch {
        circuit_inputs: usize,
        expr_vars: usize,
    },
    #[error(
        "{name} ({method}): synthesized circuit differs from the function at \
         assignment {assignment} (expected {expected}, got {actual})"
    )]
    NotEquivalent {
        name: String,
        method: Method,
        assignment: u64,
        expected: bool,
        actual: bool,
    },
    #[error("{name} ({method}): inputs are not preserved despite restore")]
    InputsNotPreserved { name: String, method: Method },
}

/// A failing assignment: the least one in exhaustive mode, the first
/// sampled one otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub assignment: u64,
    pub expected: bool,
    pub actual: bool,
}

/// How the comparison was performed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive,
    Sampled { count: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub equivalent: bool,
    pub counterexample: Option<Counterexample>,
    pub mode: CheckMode,
}

/// Compare the circuit's ancilla function against the expression.
/// Exhaustive when the input count is within `guard`; otherwise falls
/// back to `samples` random assignments, and errors when no sample count
/// was provided.
pub fn check_equivalence(
    circuit: &Circuit,
    e: &PprmExpr,
    guard: usize,
    samples: Option<usize>,
) -> Result<Verdict, VerifyError> {
    if circuit.inputs() != e.n() {
        return Err(VerifyError::WidthMismatch {
            circuit_inputs: circuit.inputs(),
            expr_vars: e.n(),
        });
    }
    let n = e.n();
    if n <= guard {
        let actual = circuit.function(guard)?;
        let expected = e.truth_table();
        for x in 0..actual.len() {
            if actual.get(x) != expected.get(x) {
                return Ok(Verdict {
                    equivalent: false,
                    counterexample: Some(Counterexample {
                        assignment: x as u64,
                        expected: expected.get(x),
                        actual: actual.get(x),
                    }),
                    mode: CheckMode::Exhaustive,
                });
            }
        }
        return Ok(Verdict {
            equivalent: true,
            counterexample: None,
            mode: CheckMode::Exhaustive,
        });
    }
    let count = samples.ok_or(CircuitError::GuardExceeded { inputs: n, guard })?;
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    for _ in 0..count {
        let x = rng.random_range(0..(1u64 << n));
        let actual = circuit.simulate_mask(x) >> circuit.ancilla() & 1 != 0;
        let expected = e.evaluate(x);
        if actual != expected {
            return Ok(Verdict {
                equivalent: false,
                counterexample: Some(Counterexample {
                    assignment: x,
                    expected,
                    actual,
                }),
                mode: CheckMode::Sampled { count },
            });
        }
    }
    Ok(Verdict {
        equivalent: true,
        counterexample: None,
        mode: CheckMode::Sampled { count },
    })
}

/// Input preservation, exhaustively within the guard and sampled beyond.
pub fn check_preservation(
    circuit: &Circuit,
    guard: usize,
    samples: Option<usize>,
) -> Result<bool, VerifyError> {
    let n = circuit.inputs();
    if n <= guard {
        return Ok(circuit.preserves_inputs(guard)?);
    }
    let count = samples.ok_or(CircuitError::GuardExceeded { inputs: n, guard })?;
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED ^ 1);
    let input_mask = (1u64 << n) - 1;
    for _ in 0..count {
        let x = rng.random_range(0..(1u64 << n));
        if circuit.simulate_mask(x) & input_mask != x {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One benchmark row: a function synthesized with one method.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRow {
    pub name: String,
    pub inputs: usize,
    pub method: Method,
    pub gates: usize,
    pub naive_cost: u64,
    pub reduced_cost: u64,
    pub equivalent: bool,
    pub preserves_inputs: bool,
}

/// Benchmark results; only constructed when every row verified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchReport {
    pub restore: bool,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    /// Aligned plain-text table.
    pub fn render_text(&self) -> String {
        let headers = [
            "benchmark",
            "inputs",
            "method",
            "gates",
            "cost_naive",
            "cost_reduced",
            "equivalent",
            "preserves",
        ];
        let cells: Vec<[String; 8]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.name.clone(),
                    r.inputs.to_string(),
                    r.method.to_string(),
                    r.gates.to_string(),
                    r.naive_cost.to_string(),
                    r.reduced_cost.to_string(),
                    yes_no(r.equivalent).into(),
                    yes_no(r.preserves_inputs).into(),
                ]
            })
            .collect();
        let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
        for row in &cells {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let _ = writeln!(out, "restore: {}", self.restore);
        for (i, h) in headers.iter().enumerate() {
            if i + 1 == headers.len() {
                let _ = writeln!(out, "{h}");
            } else {
                let _ = write!(out, "{:<width$}  ", h, width = widths[i]);
            }
        }
        for row in &cells {
            for (i, cell) in row.iter().enumerate() {
                if i + 1 == row.len() {
                    let _ = writeln!(out, "{cell}");
                } else {
                    let _ = write!(out, "{:<width$}  ", cell, width = widths[i]);
                }
            }
        }
        out
    }

    /// Comma-separated output with a header line.
    pub fn render_csv(&self) -> String {
        let mut out = String::from(
            "benchmark,inputs,method,gates,cost_naive,cost_reduced,equivalent,preserves\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.name,
                r.inputs,
                r.method,
                r.gates,
                r.naive_cost,
                r.reduced_cost,
                r.equivalent,
                r.preserves_inputs
            );
        }
        out
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Synthesize every benchmark with both methods, verify each circuit
/// exhaustively and collect size and cost figures. Rows keep the input
/// order regardless of how many worker threads run. Fails loudly on the
/// first non-equivalent circuit, and on a restore violation when
/// `restore` is set.
pub fn run_benchmarks(
    benches: &[(String, PprmExpr)],
    restore: bool,
    guard: usize,
    jobs: usize,
) -> Result<BenchReport, VerifyError> {
    let one = |(name, e): &(String, PprmExpr)| -> Result<Vec<BenchRow>, VerifyError> {
        let mut rows = Vec::with_capacity(2);
        for method in [Method::Direct, Method::Factor] {
            let result = synthesize(e, method, restore);
            let verdict = check_equivalence(&result.circuit, e, guard, None)?;
            if !verdict.equivalent {
                let cx = verdict.counterexample.unwrap();
                return Err(VerifyError::NotEquivalent {
                    name: name.clone(),
                    method,
                    assignment: cx.assignment,
                    expected: cx.expected,
                    actual: cx.actual,
                });
            }
            let preserves = result.circuit.preserves_inputs(guard)?;
            if restore && !preserves {
                return Err(VerifyError::InputsNotPreserved {
                    name: name.clone(),
                    method,
                });
            }
            rows.push(BenchRow {
                name: name.clone(),
                inputs: e.n(),
                method,
                gates: result.gates,
                naive_cost: result.naive_cost,
                reduced_cost: result.reduced_cost,
                equivalent: true,
                preserves_inputs: preserves,
            });
        }
        Ok(rows)
    };

    let results: Vec<Result<Vec<BenchRow>, VerifyError>> = if jobs <= 1 || benches.len() <= 1 {
        benches.iter().map(one).collect()
    } else {
        let mut slots: Vec<Option<Result<Vec<BenchRow>, VerifyError>>> =
            (0..benches.len()).map(|_| None).collect();
        let next = std::sync::atomic::AtomicUsize::new(0);
        let slots_mutex = std::sync::Mutex::new(&mut slots);
        std::thread::scope(|scope| {
            for _ in 0..jobs.min(benches.len()) {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                    if i >= benches.len() {
                        break;
                    }
                    let r = one(&benches[i]);
                    slots_mutex.lock().unwrap()[i] = Some(r);
                });
            }
        });
        slots.into_iter().map(|s| s.unwrap()).collect()
    };

    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(BenchReport { restore, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Gate, DEFAULT_GUARD};
    use crate::pprm::builtin;
    use crate::synthesis::direct_synthesize;

    #[test]
    fn equivalence_by_construction() {
        let e = builtin("hbfr6").unwrap();
        let c = direct_synthesize(&e);
        let v = check_equivalence(&c, &e, DEFAULT_GUARD, None).unwrap();
        assert!(v.equivalent);
        assert_eq!(v.mode, CheckMode::Exhaustive);
    }

    #[test]
    fn deleted_gate_least_counterexample() {
        // removing one term's gate flips the function exactly on the
        // supersets of that term, so the least counterexample is the
        // term's own assignment
        let e =
            PprmExpr::parse("x2*x1*x0 + x4*x3*x0 + x4*x3*x1 + x4*x3*x2 + x3*x1*x0", None).unwrap();
        let full = direct_synthesize(&e);
        for drop in 0..full.gate_count() {
            let gates: Vec<Gate> = full
                .gates()
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != drop)
                .map(|(_, g)| *g)
                .collect();
            let dropped_mask = full.gates()[drop].controls_mask();
            let tampered = Circuit::with_gates(full.width(), gates);
            let v = check_equivalence(&tampered, &e, DEFAULT_GUARD, None).unwrap();
            assert!(!v.equivalent);
            assert_eq!(v.counterexample.unwrap().assignment, dropped_mask);
        }
    }

    #[test]
    fn empty_circuit_matches_zero_expression() {
        let v =
            check_equivalence(&Circuit::new(4), &PprmExpr::zero(3), DEFAULT_GUARD, None).unwrap();
        assert!(v.equivalent);
    }

    #[test]
    fn guard_exceeded_without_samples() {
        let e = PprmExpr::zero(25);
        let c = Circuit::new(26);
        assert!(matches!(
            check_equivalence(&c, &e, 20, None),
            Err(VerifyError::Circuit(CircuitError::GuardExceeded { .. }))
        ));
        let v = check_equivalence(&c, &e, 20, Some(64)).unwrap();
        assert!(v.equivalent);
        assert_eq!(v.mode, CheckMode::Sampled { count: 64 });
    }

    #[test]
    fn sampled_mode_finds_gross_mismatch() {
        let e = PprmExpr::zero(25);
        let mut c = Circuit::new(26);
        c.push(Gate::not(25));
        let v = check_equivalence(&c, &e, 20, Some(16)).unwrap();
        assert!(!v.equivalent);
    }

    #[test]
    fn width_mismatch_is_an_error() {
        let e = PprmExpr::zero(3);
        let c = Circuit::new(3);
        assert!(matches!(
            check_equivalence(&c, &e, DEFAULT_GUARD, None),
            Err(VerifyError::WidthMismatch { .. })
        ));
    }

    fn default_benches() -> Vec<(String, PprmExpr)> {
        ["4mod5", "2of5", "hbfr6"]
            .iter()
            .map(|n| (n.to_string(), builtin(n).unwrap()))
            .collect()
    }

    #[test]
    fn benchmark_report_reproduces_published_rows() {
        let report = run_benchmarks(&default_benches(), false, DEFAULT_GUARD, 1).unwrap();
        assert_eq!(report.rows.len(), 6);
        let find = |name: &str, method: Method| {
            report
                .rows
                .iter()
                .find(|r| r.name == name && r.method == method)
                .unwrap()
        };
        let r = find("4mod5", Method::Direct);
        assert_eq!((r.gates, r.naive_cost), (9, 25));
        let r = find("4mod5", Method::Factor);
        assert_eq!((r.gates, r.reduced_cost), (6, 8));
        let r = find("2of5", Method::Direct);
        assert_eq!((r.gates, r.naive_cost), (20, 180));
        let r = find("hbfr6", Method::Direct);
        assert_eq!((r.gates, r.naive_cost), (16, 208));
        let r = find("hbfr6", Method::Factor);
        assert_eq!((r.gates, r.naive_cost), (13, 85));
    }

    #[test]
    fn benchmark_rows_keep_input_order_in_parallel() {
        let sequential = run_benchmarks(&default_benches(), true, DEFAULT_GUARD, 1).unwrap();
        let parallel = run_benchmarks(&default_benches(), true, DEFAULT_GUARD, 4).unwrap();
        assert_eq!(sequential, parallel);
        for r in &sequential.rows {
            assert!(r.preserves_inputs);
        }
    }

    #[test]
    fn report_rendering_is_stable() {
        let report = run_benchmarks(&default_benches(), false, DEFAULT_GUARD, 1).unwrap();
        let text = report.render_text();
        assert!(text.contains("benchmark"));
        assert!(text.lines().count() >= 8);
        let csv = report.render_csv();
        assert!(csv.starts_with("benchmark,inputs,method"));
        assert_eq!(csv.lines().count(), 7);
        assert!(csv.contains("4mod5,4,factor,6,10,8,true,false"));
    }
}
