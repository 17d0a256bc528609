//! Reversible circuit model: multi-control-NOT gates over `n` input wires
//! plus one ancilla wire (wire `n`), bulk simulation, input-preservation
//! checking, quantum-cost accounting and a plain-text netlist format.
//!
//! Every gate flips its target wire iff all of its control wires are 1 and
//! leaves every other wire unchanged, so every gate is self-inverse and a
//! circuit is inverted by reversing its gate list.

use std::fmt;

use thiserror::Error;

use crate::pprm::TruthTable;

/// Default cap on the number of input wires enumerated exhaustively.
pub const DEFAULT_GUARD: usize = 20;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("state length {found} does not match circuit width {width}")]
    StateLength { width: usize, found: usize },
    #[error("{inputs} inputs exceed the exhaustive enumeration guard of {guard}")]
    GuardExceeded { inputs: usize, guard: usize },
}

/// Errors from parsing the netlist format.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum NetlistError {
    #[error("line {line}: malformed header `{text}`")]
    MalformedHeader { line: usize, text: String },
    #[error("line {line}: unknown directive `{word}`")]
    UnknownDirective { word: String, line: usize },
    #[error("line {line}: unknown wire name `{name}`")]
    UnknownWire { name: String, line: usize },
    #[error("line {line}: target `{name}` is listed among the controls")]
    TargetAmongControls { name: String, line: usize },
    #[error("line {line}: duplicate wire name `{name}`")]
    DuplicateWire { name: String, line: usize },
    #[error("line {line}: gate arity `{word}` does not match its wire list")]
    BadArity { word: String, line: usize },
    #[error("expected {expected} wire names, found {found}")]
    WireCount { expected: usize, found: usize },
    #[error("netlist width {width} out of range (1..=64)")]
    BadWidth { width: usize },
    #[error("missing `{section}` section")]
    MissingSection { section: &'static str },
    #[error("line {line}: content after `.end`")]
    TrailingContent { line: usize },
}

/// One multi-control-NOT gate: a set of control wires and a target wire.
/// With zero controls it is a NOT, with one a Feynman gate, with two a
/// Toffoli gate.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gate {
    controls: u64,
    target: u32,
}

impl Gate {
    /// Panics if the target is listed among the controls or any wire
    /// index is 64 or more.
    pub fn new<I: IntoIterator<Item = usize>>(controls: I, target: usize) -> Self {
        let mut mask = 0u64;
        for c in controls {
            assert!(c < 64, "wire index {c} out of range");
            mask |= 1 << c;
        }
        Gate::from_mask(mask, target)
    }

    pub fn from_mask(controls: u64, target: usize) -> Self {
        assert!(target < 64, "wire index {target} out of range");
        assert!(
            controls & (1 << target) == 0,
            "target wire {target} is among the controls"
        );
        Gate {
            controls,
            target: target as u32,
        }
    }

    /// Unconditional NOT on `target`.
    pub fn not(target: usize) -> Self {
        Gate::from_mask(0, target)
    }

    pub const fn controls_mask(&self) -> u64 {
        self.controls
    }

    pub fn controls(&self) -> impl Iterator<Item = usize> + '_ {
        let mask = self.controls;
        (0..64).filter(move |w| mask & (1 << w) != 0)
    }

    pub const fn control_count(&self) -> usize {
        self.controls.count_ones() as usize
    }

    pub const fn target(&self) -> usize {
        self.target as usize
    }

    /// All wires the gate acts on (controls and target).
    pub const fn wire_mask(&self) -> u64 {
        self.controls | 1 << self.target
    }

    /// Apply to a packed state: bit `w` of `state` is the value of wire `w`.
    pub const fn apply(&self, state: u64) -> u64 {
        if state & self.controls == self.controls {
            state ^ (1 << self.target)
        } else {
            state
        }
    }

    /// Highest wire index used.
    pub fn max_wire(&self) -> usize {
        let m = self.wire_mask();
        63 - m.leading_zeros() as usize
    }
}

impl fmt::Debug for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t(")?;
        for c in self.controls() {
            write!(f, "{c},")?;
        }
        write!(f, ";{})", self.target)
    }
}

/// An ordered list of gates over `width` wires. By convention wires
/// `0..width-1` are the function inputs and wire `width-1` is the ancilla
/// that accumulates the result from an initial 0.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    /// Panics unless `1 <= width <= 64`.
    pub fn new(width: usize) -> Self {
        assert!((1..=64).contains(&width), "width {width} out of range");
        Circuit {
            width,
            gates: Vec::new(),
        }
    }

    pub fn with_gates(width: usize, gates: Vec<Gate>) -> Self {
        let mut c = Circuit::new(width);
        for g in gates {
            c.push(g);
        }
        c
    }

    /// Panics if the gate uses wires outside the circuit.
    pub fn push(&mut self, gate: Gate) {
        assert!(
            gate.max_wire() < self.width,
            "gate {gate:?} exceeds circuit width {}",
            self.width
        );
        self.gates.push(gate);
    }

    pub const fn width(&self) -> usize {
        self.width
    }

    /// Number of input wires (the ancilla excluded).
    pub const fn inputs(&self) -> usize {
        self.width - 1
    }

    /// Index of the ancilla wire.
    pub const fn ancilla(&self) -> usize {
        self.width - 1
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// Apply all gates left to right to a packed state.
    pub fn simulate_mask(&self, mut state: u64) -> u64 {
        for g in &self.gates {
            state = g.apply(state);
        }
        state
    }

    /// Apply all gates left to right to a state given wire by wire.
    pub fn simulate(&self, state: &[bool]) -> Result<Vec<bool>, CircuitError> {
        if state.len() != self.width {
            return Err(CircuitError::StateLength {
                width: self.width,
                found: state.len(),
            });
        }
        let mut packed = 0u64;
        for (w, &b) in state.iter().enumerate() {
            if b {
                packed |= 1 << w;
            }
        }
        let out = self.simulate_mask(packed);
        Ok((0..self.width).map(|w| out >> w & 1 != 0).collect())
    }

    /// Run all `2^inputs` assignments at once, one bit-vector per wire.
    /// Returns the final vectors; index `x` of vector `w` is the value of
    /// wire `w` after running on the assignment `x` with ancilla 0.
    fn simulate_all(&self, guard: usize) -> Result<Vec<TruthTable>, CircuitError> {
        let inputs = self.inputs();
        if inputs > guard {
            return Err(CircuitError::GuardExceeded { inputs, guard });
        }
        let mut wires: Vec<TruthTable> = (0..self.width)
            .map(|w| {
                if w < inputs {
                    TruthTable::from_fn(inputs, |x| x >> w & 1 != 0)
                } else {
                    TruthTable::zero(inputs)
                }
            })
            .collect();
        let words = 1usize.max((1usize << inputs) / 64);
        let mut conj = vec![0u64; words];
        for g in &self.gates {
            conj.fill(u64::MAX);
            for c in g.controls() {
                for (acc, w) in conj.iter_mut().zip(wires[c].words()) {
                    *acc &= w;
                }
            }
            wires[g.target()].xor_words(&conj);
        }
        Ok(wires)
    }

    /// The Boolean function computed on the ancilla: for every input
    /// assignment, run with the ancilla initialized to 0 and record the
    /// final ancilla bit.
    pub fn function(&self, guard: usize) -> Result<TruthTable, CircuitError> {
        let wires = self.simulate_all(guard)?;
        Ok(wires.into_iter().last().unwrap())
    }

    /// True iff every input wire returns to its initial value on every
    /// assignment (ancilla initialized to 0).
    pub fn preserves_inputs(&self, guard: usize) -> Result<bool, CircuitError> {
        let inputs = self.inputs();
        let wires = self.simulate_all(guard)?;
        for (w, table) in wires.iter().enumerate().take(inputs) {
            let initial = TruthTable::from_fn(inputs, |x| x >> w & 1 != 0);
            if *table != initial {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Reversed gate list. Every gate is self-inverse, so this undoes the
    /// circuit exactly.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            width: self.width,
            gates: self.gates.iter().rev().copied().collect(),
        }
    }

    /// Total quantum cost under the given model.
    pub fn quantum_cost(&self, model: &CostModel) -> u64 {
        if !model.pair_reduction {
            return self
                .gates
                .iter()
                .map(|g| model.gate_cost(g.control_count()))
                .sum();
        }
        // Greedy left-to-right scan pairing each Toffoli with an adjacent
        // Feynman whose control is one Toffoli control and whose target is
        // the other; a pair costs 4 in place of 6. A gate is adjacent when
        // no gate between the two touches any wire of the Toffoli.
        let n = self.gates.len();
        let mut paired = vec![false; n];
        for i in 0..n {
            if paired[i] || self.gates[i].control_count() != 2 {
                continue;
            }
            let g1 = self.gates[i];
            let eligible = |g2: &Gate| {
                g2.control_count() == 1
                    && g1.controls_mask() & g2.controls_mask() != 0
                    && g1.controls_mask() & (1 << g2.target()) != 0
            };
            let mut partner = None;
            for j in (0..i).rev() {
                if self.gates[j].wire_mask() & g1.wire_mask() != 0 {
                    if !paired[j] && eligible(&self.gates[j]) {
                        partner = Some(j);
                    }
                    break;
                }
            }
            if partner.is_none() {
                for (j, g2) in self.gates.iter().enumerate().skip(i + 1) {
                    if g2.wire_mask() & g1.wire_mask() != 0 {
                        if !paired[j] && eligible(g2) {
                            partner = Some(j);
                        }
                        break;
                    }
                }
            }
            if let Some(j) = partner {
                paired[i] = true;
                paired[j] = true;
            }
        }
        let mut total = 0u64;
        for (g, &p) in self.gates.iter().zip(&paired) {
            total += if p {
                // count the pair at its Toffoli
                if g.control_count() == 2 {
                    4
                } else {
                    0
                }
            } else {
                model.gate_cost(g.control_count())
            };
        }
        total
    }

    /// Serialize to the netlist text format. One line per gate,
    /// `t<k> w1 .. w{k-1} wt`, where `k` counts controls plus target and
    /// the last name is the target. Input wires are named `x0..x{n-1}`,
    /// the ancilla `f`.
    pub fn to_netlist(&self) -> String {
        let names = wire_names(self.width);
        let mut out = String::new();
        out.push_str(&format!(".numvars {}\n", self.width));
        out.push_str(".variables");
        for name in &names {
            out.push(' ');
            out.push_str(name);
        }
        out.push_str("\n.begin\n");
        for g in &self.gates {
            out.push_str(&format!("t{}", g.control_count() + 1));
            for c in g.controls() {
                out.push(' ');
                out.push_str(&names[c]);
            }
            out.push(' ');
            out.push_str(&names[g.target()]);
            out.push('\n');
        }
        out.push_str(".end\n");
        out
    }

    /// Parse the netlist text format. `#` starts a comment; directives
    /// other than `.numvars`, `.variables`, `.begin`, `.end` are rejected.
    pub fn from_netlist(text: &str) -> Result<Circuit, NetlistError> {
        enum State {
            ExpectNumvars,
            ExpectVariables,
            ExpectBegin,
            Gates,
            Done,
        }
        let mut state = State::ExpectNumvars;
        let mut width = 0usize;
        let mut names: Vec<String> = Vec::new();
        let mut gates: Vec<Gate> = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = lineno + 1;
            let mut words = line.split_whitespace();
            let head = words.next().unwrap();
            match state {
                State::ExpectNumvars => {
                    if head != ".numvars" {
                        return Err(NetlistError::UnknownDirective {
                            word: head.into(),
                            line: lineno,
                        });
                    }
                    let arg = words.next().ok_or(NetlistError::MalformedHeader {
                        line: lineno,
                        text: line.into(),
                    })?;
                    width = arg.parse().map_err(|_| NetlistError::MalformedHeader {
                        line: lineno,
                        text: line.into(),
                    })?;
                    if !(1..=64).contains(&width) {
                        return Err(NetlistError::BadWidth { width });
                    }
                    if words.next().is_some() {
                        return Err(NetlistError::MalformedHeader {
                            line: lineno,
                            text: line.into(),
                        });
                    }
                    state = State::ExpectVariables;
                }
                State::ExpectVariables => {
                    if head != ".variables" {
                        return Err(NetlistError::UnknownDirective {
                            word: head.into(),
                            line: lineno,
                        });
                    }
                    for w in words {
                        if names.iter().any(|n| n == w) {
                            return Err(NetlistError::DuplicateWire {
                                name: w.into(),
                                line: lineno,
                            });
                        }
                        names.push(w.into());
                    }
                    if names.len() != width {
                        return Err(NetlistError::WireCount {
                            expected: width,
                            found: names.len(),
                        });
                    }
                    state = State::ExpectBegin;
                }
                State::ExpectBegin => {
                    if head != ".begin" {
                        return Err(NetlistError::UnknownDirective {
                            word: head.into(),
                            line: lineno,
                        });
                    }
                    state = State::Gates;
                }
                State::Gates => {
                    if head == ".end" {
                        state = State::Done;
                        continue;
                    }
                    if head.starts_with('.') {
                        return Err(NetlistError::UnknownDirective {
                            word: head.into(),
                            line: lineno,
                        });
                    }
                    let arity: usize = head
                        .strip_prefix('t')
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| NetlistError::UnknownDirective {
                            word: head.into(),
                            line: lineno,
                        })?;
                    let wires: Vec<&str> = words.collect();
                    if wires.len() != arity || arity == 0 {
                        return Err(NetlistError::BadArity {
                            word: head.into(),
                            line: lineno,
                        });
                    }
                    let resolve = |name: &str| -> Result<usize, NetlistError> {
                        names
                            .iter()
                            .position(|n| n == name)
                            .ok_or(NetlistError::UnknownWire {
                                name: name.into(),
                                line: lineno,
                            })
                    };
                    let target = resolve(wires[wires.len() - 1])?;
                    let mut mask = 0u64;
                    for w in &wires[..wires.len() - 1] {
                        let idx = resolve(w)?;
                        if idx == target {
                            return Err(NetlistError::TargetAmongControls {
                                name: (*w).into(),
                                line: lineno,
                            });
                        }
                        mask |= 1 << idx;
                    }
                    gates.push(Gate::from_mask(mask, target));
                }
                State::Done => {
                    return Err(NetlistError::TrailingContent { line: lineno });
                }
            }
        }
        match state {
            State::ExpectNumvars => Err(NetlistError::MissingSection {
                section: ".numvars",
            }),
            State::ExpectVariables => Err(NetlistError::MissingSection {
                section: ".variables",
            }),
            State::ExpectBegin => Err(NetlistError::MissingSection { section: ".begin" }),
            State::Gates => Err(NetlistError::MissingSection { section: ".end" }),
            State::Done => Ok(Circuit { width, gates }),
        }
    }
}

/// Canonical wire names: `x0..x{n-1}` plus `f` for the ancilla.
pub fn wire_names(width: usize) -> Vec<String> {
    let mut names: Vec<String> = (0..width - 1).map(|i| format!("x{i}")).collect();
    names.push("f".into());
    names
}

/// Per-gate quantum cost: 1 for zero or one control, 5 for two, 13 for
/// three, extended as `c(k) = 2^(k+1) - 3` beyond (consistent with the
/// first values; the extension past three controls is an extrapolation).
/// With `pair_reduction` on, an adjacent Toffoli/Feynman pair in the Peres
/// shape is charged 4 in total instead of 6.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CostModel {
    pub pair_reduction: bool,
}

impl CostModel {
    /// Plain per-gate sum.
    pub const fn naive() -> Self {
        CostModel {
            pair_reduction: false,
        }
    }

    /// Per-gate sum with the Toffoli/Feynman pair reduction.
    pub const fn reduced() -> Self {
        CostModel {
            pair_reduction: true,
        }
    }

    /// Cost of one gate with `k` controls.
    pub fn gate_cost(&self, k: usize) -> u64 {
        match k {
            0 | 1 => 1,
            _ => (1u64 << (k + 1)) - 3,
        }
    }
}
