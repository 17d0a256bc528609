//! Compilation of PPRM expressions into reversible circuits.
//!
//! Two routes are provided. The **direct** method emits one
//! multi-control-NOT per product term, controls on the term's variables
//! and target on the ancilla. The **factorization** method first rewrites
//! the expression into a [`FactoredForm`] — products of XOR-groups of
//! variables with recursively factored coefficients, plus unfactorable
//! remainder terms — and then realizes each XOR-group once on a
//! temporarily repurposed input wire, firing one gate per coefficient
//! term instead of one gate per expanded minterm.
//!
//! Factoring never changes the computed function; with `restore` enabled
//! the emitted circuit also returns every input wire to its initial value.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::circuit::{Circuit, CostModel, Gate};
use crate::pprm::{Minterm, PprmExpr};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SynthesisError {
    #[error("factor table requires a homogeneous expression")]
    NonHomogeneous,
    #[error("factor table requires degree at least 2, found {degree}")]
    DegreeBelowTwo { degree: usize },
}

/// Synthesis method selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Direct,
    Factor,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Direct => write!(f, "direct"),
            Method::Factor => write!(f, "factor"),
        }
    }
}

/// Occurrence table for one homogeneous bucket: one row per minterm, one
/// column per variable, and per-column occurrence counts. The variable
/// with the highest count (lowest index on ties) is the next factor to
/// extract.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorTable {
    n: usize,
    rows: Vec<Minterm>,
    counts: Vec<usize>,
}

impl FactorTable {
    /// Build from a homogeneous expression of degree at least 2.
    pub fn new(bucket: &PprmExpr) -> Result<Self, SynthesisError> {
        let degree = bucket.max_degree().unwrap_or_default();
        if !bucket.is_homogeneous(degree) {
            return Err(SynthesisError::NonHomogeneous);
        }
        if degree < 2 {
            return Err(SynthesisError::DegreeBelowTwo { degree });
        }
        Ok(FactorTable::from_rows(
            bucket.n(),
            bucket.terms().copied().collect(),
        ))
    }

    pub(crate) fn from_rows(n: usize, rows: Vec<Minterm>) -> Self {
        let mut counts = vec![0usize; n];
        for r in &rows {
            for v in r.vars() {
                counts[v] += 1;
            }
        }
        FactorTable { n, rows, counts }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Minterm] {
        &self.rows
    }

    /// 1 iff variable `v` occurs in row `r`.
    pub fn cell(&self, r: usize, v: usize) -> bool {
        self.rows[r].contains(v)
    }

    /// Number of rows containing variable `v`.
    pub fn column_count(&self, v: usize) -> usize {
        self.counts[v]
    }

    /// The variable with the maximum occurrence count and that count;
    /// ties break to the lowest index. `None` when the table is empty.
    pub fn max_occurrence(&self) -> Option<(usize, usize)> {
        let (mut best_v, mut best_c) = (None, 0usize);
        for (v, &c) in self.counts.iter().enumerate() {
            if c > best_c {
                best_v = Some(v);
                best_c = c;
            }
        }
        best_v.map(|v| (v, best_c))
    }
}

/// Result of factorization: an XOR of
///
/// * an optional constant 1,
/// * degree-1 variables (`linear`),
/// * chains of nested XOR-groups, each group multiplied by a recursively
///   factored coefficient,
/// * remainder minterms realized as direct gates.
///
/// Within a chain the groups are strictly nested ascending, so one
/// accumulator wire can be extended from group to group. Expanding the
/// form reproduces the source expression exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredForm {
    pub n: usize,
    pub constant: bool,
    pub linear: Vec<usize>,
    pub chains: Vec<Chain>,
    pub remainder: Vec<Minterm>,
}

/// A maximal run of chain links whose groups are strictly nested.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub links: Vec<ChainLink>,
}

/// One XOR-group of variables times a coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainLink {
    /// Variable indices, ascending; realized as the XOR of the variables.
    pub group: Vec<usize>,
    /// The sub-expression multiplying the group sum.
    pub coefficient: FactoredForm,
}

impl FactoredForm {
    fn zero(n: usize) -> Self {
        FactoredForm {
            n,
            constant: false,
            linear: Vec::new(),
            chains: Vec::new(),
            remainder: Vec::new(),
        }
    }

    fn from_remainder(n: usize, terms: Vec<Minterm>) -> Self {
        let mut f = FactoredForm::zero(n);
        f.remainder = terms;
        f.remainder.sort();
        f
    }

    /// Multiply out every product over XOR and collect the minterms.
    /// For forms produced by [`factorize`] this is the source expression.
    pub fn expansion(&self) -> PprmExpr {
        let mut e = PprmExpr::zero(self.n);
        if self.constant {
            e.toggle(Minterm::constant());
        }
        for &v in &self.linear {
            e.toggle(Minterm::from_vars([v]));
        }
        for chain in &self.chains {
            for link in &chain.links {
                let coeff = link.coefficient.expansion();
                for &g in &link.group {
                    for t in coeff.terms() {
                        e.toggle(Minterm::from_mask(t.mask() | 1 << g));
                    }
                }
            }
        }
        for t in &self.remainder {
            e.toggle(*t);
        }
        e
    }

    /// True when nothing is present.
    pub fn is_zero(&self) -> bool {
        !self.constant
            && self.linear.is_empty()
            && self.chains.is_empty()
            && self.remainder.is_empty()
    }
}

impl Chain {
    /// Groups are nested ascending, so the last link has the largest group.
    fn largest_group(&self) -> &[usize] {
        &self
            .links
            .last()
            .expect("chain has at least one link")
            .group
    }

    /// Canonical emission order: fewer links first, then by the largest
    /// group (size, then lexicographic). Chains with many links carry the
    /// most accumulator state, so they go last, where dropping the final
    /// restores saves the most.
    fn sort_key(&self) -> (usize, usize, Vec<usize>) {
        (
            self.links.len(),
            self.largest_group().len(),
            self.largest_group().to_vec(),
        )
    }
}

/// One gate per minterm: controls on the term's variables, target on the
/// ancilla; the constant term becomes an unconditional NOT. Gates follow
/// the canonical term order. The result computes the expression and
/// trivially preserves all inputs.
pub fn direct_synthesize(e: &PprmExpr) -> Circuit {
    let n = e.n();
    let mut c = Circuit::new(n + 1);
    for t in e.terms() {
        c.push(Gate::from_mask(t.mask(), n));
    }
    c
}

/// Public entry for inspecting one bucket's occurrence table.
pub fn build_factor_table(bucket: &PprmExpr) -> Result<FactorTable, SynthesisError> {
    FactorTable::new(bucket)
}

/// Factorize an expression:
///
/// 1. split by degree — the constant and degree-1 terms go to dedicated
///    slots; degree-2 and degree-3 buckets are processed independently;
///    anything of degree 4 or more stays as remainder;
/// 2. within a bucket, repeatedly extract the variable with the maximum
///    occurrence count (lowest index on ties) together with its factor
///    group, until no variable occurs twice; unconsumed rows are
///    remainder;
/// 3. sub-terms shared by two or more factor variables are grouped by
///    their full owner set, one link per distinct owner set; sub-terms
///    owned by a single factor variable stay with it;
/// 4. every owner set's term set and every per-variable leftover is
///    factorized recursively, the factor variable multiplied back into
///    the coefficients;
/// 5. links whose groups are related by strict inclusion are arranged
///    into chains.
pub fn factorize(e: &PprmExpr) -> FactoredForm {
    let n = e.n();
    let mut form = FactoredForm::zero(n);
    let mut remainder: BTreeSet<Minterm> = BTreeSet::new();
    for (degree, bucket) in e.degree_partition() {
        match degree {
            0 => form.constant = true,
            1 => {
                form.linear = bucket.terms().map(|t| t.max_var().unwrap()).collect();
                form.linear.sort_unstable();
            }
            2 | 3 => {
                let (links, rem) = factor_bucket(n, bucket.terms().copied().collect());
                form.chains.extend(build_chains(links));
                remainder.extend(rem);
            }
            _ => remainder.extend(bucket.terms().copied()),
        }
    }
    form.remainder = remainder.into_iter().collect();
    form.chains.sort_by_key(|c| c.sort_key());
    form
}

/// Factor one homogeneous bucket into chain links plus remainder minterms.
fn factor_bucket(n: usize, rows: Vec<Minterm>) -> (Vec<ChainLink>, Vec<Minterm>) {
    // Step 1: extract factor variables until no variable occurs twice.
    let mut factors: Vec<(usize, Vec<Minterm>)> = Vec::new();
    let mut remaining = rows;
    loop {
        let table = FactorTable::from_rows(n, remaining);
        remaining = table.rows().to_vec();
        match table.max_occurrence() {
            Some((v, count)) if count >= 2 => {
                let mut group = Vec::new();
                let mut rest = Vec::new();
                for row in remaining {
                    if row.contains(v) {
                        group.push(Minterm::from_mask(row.mask() & !(1 << v)));
                    } else {
                        rest.push(row);
                    }
                }
                factors.push((v, group));
                remaining = rest;
            }
            _ => break,
        }
    }
    let mut remainder = remaining;

    // Step 2: group shared sub-terms by their full owner set.
    let mut owners: BTreeMap<Minterm, Vec<usize>> = BTreeMap::new();
    for (v, group) in &factors {
        for t in group {
            owners.entry(*t).or_default().push(*v);
        }
    }
    let mut pairs: BTreeMap<Vec<usize>, BTreeSet<Minterm>> = BTreeMap::new();
    let mut leftover: BTreeMap<usize, BTreeSet<Minterm>> = BTreeMap::new();
    for (t, mut owner_set) in owners {
        owner_set.sort_unstable();
        if owner_set.len() >= 2 {
            pairs.entry(owner_set).or_default().insert(t);
        } else {
            leftover.entry(owner_set[0]).or_default().insert(t);
        }
    }

    // Step 3: links from owner sets and from lifted per-variable leftovers.
    let mut links: Vec<ChainLink> = Vec::new();
    for (owner_set, terms) in pairs {
        links.push(ChainLink {
            group: owner_set,
            coefficient: factorize_set(n, terms),
        });
    }
    for (v, terms) in leftover {
        let sub = factorize_set(n, terms);
        let (lifted, minterms) = lift(v, sub);
        links.extend(lifted);
        remainder.extend(minterms);
    }
    (links, remainder)
}

/// Recursively factorize a homogeneous term set of any degree.
fn factorize_set(n: usize, terms: BTreeSet<Minterm>) -> FactoredForm {
    let Some(first) = terms.iter().next() else {
        return FactoredForm::zero(n);
    };
    match first.degree() {
        0 => {
            debug_assert_eq!(terms.len(), 1);
            let mut f = FactoredForm::zero(n);
            f.constant = true;
            f
        }
        1 => {
            let mut f = FactoredForm::zero(n);
            f.linear = terms.iter().map(|t| t.max_var().unwrap()).collect();
            f
        }
        2 | 3 => {
            let (links, remainder) = factor_bucket(n, terms.into_iter().collect());
            let mut f = FactoredForm::from_remainder(n, remainder);
            f.chains = build_chains(links);
            f.chains.sort_by_key(|c| c.sort_key());
            f
        }
        _ => FactoredForm::from_remainder(n, terms.into_iter().collect()),
    }
}

/// Multiply factor variable `v` into a factored form, turning it into
/// chain links and full minterms at the enclosing level.
fn lift(v: usize, form: FactoredForm) -> (Vec<ChainLink>, Vec<Minterm>) {
    let n = form.n;
    let mut links = Vec::new();
    let mut minterms = Vec::new();
    if form.constant {
        minterms.push(Minterm::from_vars([v]));
    }
    match form.linear.len() {
        0 => {}
        1 => minterms.push(Minterm::from_vars([v, form.linear[0]])),
        _ => links.push(ChainLink {
            group: form.linear,
            coefficient: FactoredForm::from_remainder(n, vec![Minterm::from_vars([v])]),
        }),
    }
    for chain in form.chains {
        for link in chain.links {
            links.push(ChainLink {
                group: link.group,
                coefficient: coeff_mul(v, link.coefficient),
            });
        }
    }
    for t in form.remainder {
        minterms.push(Minterm::from_mask(t.mask() | 1 << v));
    }
    (links, minterms)
}

/// Multiply `v` into a coefficient form in place of expansion.
fn coeff_mul(v: usize, form: FactoredForm) -> FactoredForm {
    let n = form.n;
    let mut out = FactoredForm::zero(n);
    if form.constant {
        out.remainder.push(Minterm::from_vars([v]));
    }
    match form.linear.len() {
        0 => {}
        1 => out.remainder.push(Minterm::from_vars([v, form.linear[0]])),
        _ => out.chains.push(Chain {
            links: vec![ChainLink {
                group: form.linear,
                coefficient: FactoredForm::from_remainder(n, vec![Minterm::from_vars([v])]),
            }],
        }),
    }
    for chain in form.chains {
        let links = chain
            .links
            .into_iter()
            .map(|link| ChainLink {
                group: link.group,
                coefficient: coeff_mul(v, link.coefficient),
            })
            .collect();
        out.chains.push(Chain { links });
    }
    for t in form.remainder {
        out.remainder.push(Minterm::from_mask(t.mask() | 1 << v));
    }
    out.remainder.sort();
    out
}

/// Merge links with identical groups, then arrange groups related by
/// strict inclusion into chains. A link attaches to the chain whose last
/// group is the largest strict subset of its own group; otherwise it
/// starts a new chain.
fn build_chains(mut links: Vec<ChainLink>) -> Vec<Chain> {
    links.sort_by(|a, b| (a.group.len(), &a.group).cmp(&(b.group.len(), &b.group)));
    let mut merged: Vec<ChainLink> = Vec::new();
    for link in links {
        match merged.last_mut() {
            Some(prev) if prev.group == link.group => {
                merge_forms(&mut prev.coefficient, link.coefficient);
            }
            _ => merged.push(link),
        }
    }
    let mut chains: Vec<Chain> = Vec::new();
    for link in merged {
        let group_set: BTreeSet<usize> = link.group.iter().copied().collect();
        let mut best: Option<usize> = None;
        for (ci, chain) in chains.iter().enumerate() {
            let last = chain.largest_group();
            let nested =
                last.len() < link.group.len() && last.iter().all(|v| group_set.contains(v));
            if nested {
                let better = match best {
                    None => true,
                    Some(b) => chains[b].largest_group().len() < last.len(),
                };
                if better {
                    best = Some(ci);
                }
            }
        }
        match best {
            Some(ci) => chains[ci].links.push(link),
            None => chains.push(Chain { links: vec![link] }),
        }
    }
    chains
}

/// XOR two factored forms (used when two links share a group).
fn merge_forms(a: &mut FactoredForm, b: FactoredForm) {
    a.constant ^= b.constant;
    let mut lin: BTreeSet<usize> = a.linear.iter().copied().collect();
    for v in b.linear {
        if !lin.remove(&v) {
            lin.insert(v);
        }
    }
    a.linear = lin.into_iter().collect();
    a.chains.extend(b.chains);
    let mut rem: BTreeSet<Minterm> = a.remainder.iter().copied().collect();
    for t in b.remainder {
        if !rem.remove(&t) {
            rem.insert(t);
        }
    }
    a.remainder = rem.into_iter().collect();
}

/// Gate emission with restore bookkeeping.
struct Emitter {
    circuit: Circuit,
    ancilla: usize,
    /// Input-wire CNOTs applied and not yet undone, in application order.
    stack: Vec<(usize, usize)>,
    /// For each input wire, the set of original variables whose XOR it
    /// currently holds.
    masks: Vec<u64>,
}

impl Emitter {
    fn new(n: usize) -> Self {
        Emitter {
            circuit: Circuit::new(n + 1),
            ancilla: n,
            stack: Vec::new(),
            masks: (0..n).map(|w| 1u64 << w).collect(),
        }
    }

    fn push_cnot(&mut self, control: usize, target: usize) {
        self.circuit.push(Gate::new([control], target));
        self.masks[target] ^= self.masks[control];
        self.stack.push((control, target));
    }

    fn pop_to(&mut self, depth: usize) {
        while self.stack.len() > depth {
            let (control, target) = self.stack.pop().unwrap();
            self.circuit.push(Gate::new([control], target));
            self.masks[target] ^= self.masks[control];
        }
    }

    fn fire(&mut self, controls: &[usize]) {
        let mut mask = 0u64;
        for &c in controls {
            mask |= 1 << c;
        }
        self.circuit.push(Gate::from_mask(mask, self.ancilla));
    }

    /// Emit one chain. `terminal` marks the final chain of the whole
    /// emission: its accumulators stay live for the degree-1 pass and are
    /// only undone by the trailing restore block.
    fn emit_chain(&mut self, chain: &Chain, outer: &mut Vec<usize>, terminal: bool) {
        let depth = self.stack.len();
        let mut acc: Option<usize> = None;
        let mut prev_mask = 0u64;
        let last = chain.links.len() - 1;
        for (li, link) in chain.links.iter().enumerate() {
            let group_mask: u64 = link.group.iter().map(|v| 1u64 << v).sum();
            let top = *link.group.last().expect("group is never empty");
            match acc {
                None => {
                    for &v in &link.group {
                        if v != top {
                            self.push_cnot(v, top);
                        }
                    }
                    acc = Some(top);
                }
                Some(prev_acc) => {
                    // extend the accumulator with the new variables
                    let new_mask = group_mask & !prev_mask;
                    if top != prev_acc {
                        self.push_cnot(prev_acc, top);
                    }
                    for v in 0..self.masks.len() {
                        if new_mask & (1 << v) != 0 && v != top {
                            self.push_cnot(v, top);
                        }
                    }
                    acc = Some(top);
                }
            }
            prev_mask = group_mask;
            outer.push(acc.unwrap());
            self.emit_coeff(&link.coefficient, outer, terminal && li == last);
            outer.pop();
        }
        if !terminal {
            self.pop_to(depth);
        }
    }

    /// Emit a coefficient form under an outer product context: every unit
    /// of the form fires one gate whose controls are the outer wires plus
    /// the unit's own wires. Order: constant, remainder terms, the linear
    /// set as one accumulated XOR factor, then sub-chains.
    fn emit_coeff(&mut self, form: &FactoredForm, outer: &mut Vec<usize>, terminal: bool) {
        if form.constant {
            let controls = outer.clone();
            self.fire(&controls);
        }
        for t in &form.remainder {
            let mut controls = outer.clone();
            controls.extend(t.vars());
            self.fire(&controls);
        }
        let chain_order = sorted_chain_indices(&form.chains);
        match form.linear.len() {
            0 => {}
            1 => {
                let mut controls = outer.clone();
                controls.push(form.linear[0]);
                self.fire(&controls);
            }
            _ => {
                let depth = self.stack.len();
                let top = *form.linear.last().unwrap();
                for &v in &form.linear {
                    if v != top {
                        self.push_cnot(v, top);
                    }
                }
                let mut controls = outer.clone();
                controls.push(top);
                self.fire(&controls);
                if !(terminal && chain_order.is_empty()) {
                    self.pop_to(depth);
                }
            }
        }
        let last = chain_order.len().saturating_sub(1);
        for (pos, ci) in chain_order.iter().enumerate() {
            self.emit_chain(&form.chains[*ci], outer, terminal && pos == last);
        }
    }
}

fn sorted_chain_indices(chains: &[Chain]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..chains.len()).collect();
    order.sort_by_key(|&i| chains[i].sort_key());
    order
}

/// Express `target` as an XOR of current wire values. `masks[w]` is the
/// variable set wire `w` holds; the masks always form a basis, so the
/// solution exists and is unique. Returns the set of wires to combine.
fn solve_linear(masks: &[u64], target: u64) -> u64 {
    let mut pivots: [Option<(u64, u64)>; 64] = [None; 64];
    for (w, &m0) in masks.iter().enumerate() {
        let mut m = m0;
        let mut wires = 1u64 << w;
        while m != 0 {
            let high = 63 - m.leading_zeros() as usize;
            match pivots[high] {
                Some((pm, pw)) => {
                    m ^= pm;
                    wires ^= pw;
                }
                None => {
                    pivots[high] = Some((m, wires));
                    break;
                }
            }
        }
    }
    let mut t = target;
    let mut wires = 0u64;
    while t != 0 {
        let high = 63 - t.leading_zeros() as usize;
        let (pm, pw) = pivots[high].expect("wire masks span the variable space");
        t ^= pm;
        wires ^= pw;
    }
    wires
}

/// Emit a circuit for a factored form.
///
/// Order of emission: the constant as an unconditional NOT on the
/// ancilla; remainder minterms as direct gates; the chains in canonical
/// order, every chain's accumulation undone before the next chain starts;
/// then the degree-1 terms, expressed exactly over the current wire
/// values — the final chain's live accumulators merge into one block
/// (largest sets first) firing a single gate, untouched wires fire one
/// gate each. With `restore` every modified input wire is then returned
/// to its initial value in reverse order; without it those trailing gates
/// are omitted and only the final chain's state stays dirty.
pub fn emit(form: &FactoredForm, restore: bool) -> Circuit {
    let mut em = Emitter::new(form.n);
    if form.constant {
        em.fire(&[]);
    }
    let mut remainder = form.remainder.clone();
    remainder.sort();
    for t in &remainder {
        let controls: Vec<usize> = t.vars().collect();
        em.fire(&controls);
    }
    let order = sorted_chain_indices(&form.chains);
    let last = order.len().saturating_sub(1);
    for (pos, ci) in order.iter().enumerate() {
        let mut outer = Vec::new();
        em.emit_chain(&form.chains[*ci], &mut outer, pos == last);
    }

    // Degree-1 terms. The current wire values are an invertible linear
    // image of the original variables, so the needed XOR has a unique
    // representation over them; this reuses the final chain's live
    // accumulators whenever they cover linear variables exactly. Live
    // accumulator wires merge into one block (largest set first, lowest
    // wire on ties) firing a single gate; untouched wires fire one gate
    // each.
    let mut linear_mask = 0u64;
    for &v in &form.linear {
        linear_mask |= 1 << v;
    }
    if linear_mask != 0 {
        let wire_set = solve_linear(&em.masks, linear_mask);
        let mut accs: Vec<usize> = (0..form.n)
            .filter(|&w| wire_set & (1 << w) != 0 && em.masks[w] != 1 << w)
            .collect();
        accs.sort_by(|&a, &b| {
            em.masks[b]
                .count_ones()
                .cmp(&em.masks[a].count_ones())
                .then(a.cmp(&b))
        });
        for j in 1..accs.len() {
            em.push_cnot(accs[j - 1], accs[j]);
        }
        if let Some(&block) = accs.last() {
            em.fire(&[block]);
        }
        for w in 0..form.n {
            if wire_set & (1 << w) != 0 && em.masks[w] == 1 << w {
                em.fire(&[w]);
            }
        }
    }

    if restore {
        em.pop_to(0);
    }
    em.circuit
}

/// Synthesis output: the circuit together with its size and cost figures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthesisResult {
    pub circuit: Circuit,
    pub gates: usize,
    pub naive_cost: u64,
    pub reduced_cost: u64,
}

/// Dispatch on the method and compute the report. `restore` has no effect
/// on the direct method, which never modifies an input wire.
pub fn synthesize(e: &PprmExpr, method: Method, restore: bool) -> SynthesisResult {
    let circuit = match method {
        Method::Direct => direct_synthesize(e),
        Method::Factor => emit(&factorize(e), restore),
    };
    let gates = circuit.gate_count();
    let naive_cost = circuit.quantum_cost(&CostModel::naive());
    let reduced_cost = circuit.quantum_cost(&CostModel::reduced());
    SynthesisResult {
        circuit,
        gates,
        naive_cost,
        reduced_cost,
    }
}
