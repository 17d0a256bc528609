//! Algebra of Positive Polarity Reed-Muller (PPRM) expansions.
//!
//! A Boolean function `f : {0,1}^n -> {0,1}` is represented as an XOR of
//! product terms (minterms) over uncomplemented variables `x0..x{n-1}`.
//! This representation is unique, and conversion to and from truth tables
//! is the subset-XOR (Möbius) transform over GF(2), which is its own
//! inverse.
//!
//! The module provides parsing and canonical formatting of expressions,
//! point evaluation, truth-table conversion, degree analysis, the built-in
//! benchmark functions (`hbfr6`, `4mod5`, `2of5`) and the `.pprm` /
//! truth-table text file formats.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Highest supported variable index is 62: expressions are limited to 63
/// variables so that a synthesized circuit (inputs plus one ancilla wire)
/// still fits in a 64-bit wire mask.
pub const MAX_VARS: usize = 63;

/// Errors produced by expression parsing, file parsing and builtin lookup.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PprmError {
    #[error("empty input: expected an expression")]
    Empty,
    #[error("line {line}, column {col}: malformed token `{token}`")]
    MalformedToken {
        line: usize,
        col: usize,
        token: String,
    },
    #[error("variable x{var} out of range: expression has {n} variables")]
    IndexOutOfRange { var: usize, n: usize },
    #[error("too many variables: {n} (at most {MAX_VARS} supported)")]
    TooManyVariables { n: usize },
    #[error("line {line}: malformed header `{text}`")]
    MalformedHeader { line: usize, text: String },
    #[error("truth table length mismatch: expected {expected} bits, found {found}")]
    TableLength { expected: usize, found: usize },
    #[error("line {line}, column {col}: invalid truth table character `{ch}`")]
    BadTableChar { line: usize, col: usize, ch: char },
    #[error("truth table too large: {n} variables (at most {max} supported here)")]
    TableTooLarge { n: usize, max: usize },
    #[error("line {line}: unexpected content after the table row")]
    TrailingContent { line: usize },
    #[error("unknown builtin benchmark `{name}`")]
    UnknownBuiltin { name: String },
}

/// One product term: the set of variable indices that are ANDed together.
/// The empty set is the constant-1 term.
///
/// Minterms order by (degree, then lexicographic ascending variable
/// indices); this ordering is the canonical term order used everywhere.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Minterm {
    mask: u64,
}

impl Minterm {
    /// The constant-1 term (empty variable set).
    pub const fn constant() -> Self {
        Minterm { mask: 0 }
    }

    /// Build a term from variable indices. Repeated indices collapse
    /// (x AND x = x).
    pub fn from_vars<I: IntoIterator<Item = usize>>(vars: I) -> Self {
        let mut mask = 0u64;
        for v in vars {
            assert!(v < MAX_VARS, "variable index {v} exceeds {MAX_VARS}");
            mask |= 1 << v;
        }
        Minterm { mask }
    }

    pub const fn from_mask(mask: u64) -> Self {
        Minterm { mask }
    }

    pub const fn mask(&self) -> u64 {
        self.mask
    }

    /// Number of variables in the term.
    pub const fn degree(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub const fn is_constant(&self) -> bool {
        self.mask == 0
    }

    pub const fn contains(&self, var: usize) -> bool {
        self.mask & (1 << var) != 0
    }

    /// Variable indices in ascending order.
    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        let mask = self.mask;
        (0..64).filter(move |v| mask & (1 << v) != 0)
    }

    /// Highest variable index, or `None` for the constant term.
    pub fn max_var(&self) -> Option<usize> {
        if self.mask == 0 {
            None
        } else {
            Some(63 - self.mask.leading_zeros() as usize)
        }
    }

    /// True on an assignment iff every variable of the term is set.
    /// Bit `k` of `assignment` is the value of `x_k`.
    pub const fn evaluate(&self, assignment: u64) -> bool {
        assignment & self.mask == self.mask
    }
}

impl Ord for Minterm {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        if self.mask == other.mask {
            return Ordering::Equal;
        }
        // Same degree: lexicographic on the ascending variable lists.
        // The term containing the lowest differing variable comes first.
        let diff = self.mask ^ other.mask;
        let low = diff & diff.wrapping_neg();
        if self.mask & low != 0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl PartialOrd for Minterm {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Minterm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_constant() {
            return write!(f, "1");
        }
        let mut first = true;
        for v in self.vars() {
            if !first {
                write!(f, "*")?;
            }
            write!(f, "x{v}")?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Minterm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A PPRM expression: a duplicate-free set of minterms over `n` variables,
/// combined by XOR. The term set is kept in canonical order and XOR
/// cancellation is applied on every insertion, so equal functions always
/// compare equal.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct PprmExpr {
    n: usize,
    terms: BTreeSet<Minterm>,
}

impl PprmExpr {
    /// The constant-0 expression over `n` variables.
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_VARS, "at most {MAX_VARS} variables supported");
        PprmExpr {
            n,
            terms: BTreeSet::new(),
        }
    }

    /// Build from terms, XOR-cancelling duplicates pairwise.
    pub fn from_terms<I: IntoIterator<Item = Minterm>>(
        n: usize,
        terms: I,
    ) -> Result<Self, PprmError> {
        if n > MAX_VARS {
            return Err(PprmError::TooManyVariables { n });
        }
        let mut e = PprmExpr::zero(n);
        for t in terms {
            if let Some(v) = t.max_var() {
                if v >= n {
                    return Err(PprmError::IndexOutOfRange { var: v, n });
                }
            }
            e.toggle(t);
        }
        Ok(e)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical (degree, lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = &Minterm> {
        self.terms.iter()
    }

    pub fn contains(&self, t: &Minterm) -> bool {
        self.terms.contains(t)
    }

    /// XOR a single term in: present terms cancel, absent terms appear.
    pub fn toggle(&mut self, t: Minterm) {
        if !self.terms.remove(&t) {
            self.terms.insert(t);
        }
    }

    /// XOR of two expressions (symmetric difference of term sets). The
    /// result ranges over the larger variable count.
    pub fn xor(&self, other: &PprmExpr) -> PprmExpr {
        let mut out = self.clone();
        out.n = self.n.max(other.n);
        for t in &other.terms {
            out.toggle(*t);
        }
        out
    }

    /// Evaluate at one assignment; bit `k` of `assignment` is `x_k`.
    pub fn evaluate(&self, assignment: u64) -> bool {
        self.terms
            .iter()
            .fold(false, |acc, t| acc ^ t.evaluate(assignment))
    }

    /// Highest term degree (0 for the constant, `None` when zero).
    pub fn max_degree(&self) -> Option<usize> {
        self.terms.iter().map(|t| t.degree()).max()
    }

    /// Split into per-degree sub-expressions. Bucket `d` holds exactly the
    /// degree-`d` terms; the constant term goes to bucket 0 on its own.
    /// XOR of all buckets reproduces the expression. Empty buckets are
    /// omitted.
    pub fn degree_partition(&self) -> std::collections::BTreeMap<usize, PprmExpr> {
        let mut map = std::collections::BTreeMap::new();
        for t in &self.terms {
            map.entry(t.degree())
                .or_insert_with(|| PprmExpr::zero(self.n))
                .toggle(*t);
        }
        map
    }

    /// True iff every term is a product of exactly `k` variables.
    /// Vacuously true for the zero expression.
    pub fn is_homogeneous(&self, k: usize) -> bool {
        self.terms.iter().all(|t| t.degree() == k)
    }

    /// Evaluate over all `2^n` assignments.
    pub fn truth_table(&self) -> TruthTable {
        let mut t = TruthTable::zero(self.n);
        for term in &self.terms {
            t.set(term.mask() as usize, true);
        }
        t.subset_xor_in_place();
        t
    }

    /// Recover the unique PPRM expansion of a truth table (the GF(2)
    /// Möbius transform of the output column).
    pub fn from_truth_table(t: &TruthTable) -> PprmExpr {
        let mut coeffs = t.clone();
        coeffs.subset_xor_in_place();
        let mut e = PprmExpr::zero(t.n());
        for idx in 0..coeffs.len() {
            if coeffs.get(idx) {
                e.toggle(Minterm::from_mask(idx as u64));
            }
        }
        e
    }

    /// Parse an expression string: terms separated by `+` (meaning XOR),
    /// each term `1`, `0` or a `*`-separated product of variables `x<k>`.
    /// Whitespace is ignored; a repeated variable within a term collapses;
    /// duplicate terms cancel pairwise. When `n` is `None` the variable
    /// count is inferred as the highest index used plus one.
    pub fn parse(text: &str, n: Option<usize>) -> Result<Self, PprmError> {
        let terms = parse_terms(text, 1)?;
        let mut max_var = None;
        for (t, _) in &terms {
            max_var = max_var.max(t.max_var());
        }
        let inferred = max_var.map_or(0, |v| v + 1);
        let n = match n {
            Some(n) => {
                if n > MAX_VARS {
                    return Err(PprmError::TooManyVariables { n });
                }
                if inferred > n {
                    return Err(PprmError::IndexOutOfRange {
                        var: max_var.unwrap(),
                        n,
                    });
                }
                n
            }
            None => inferred,
        };
        let mut e = PprmExpr::zero(n);
        for (t, keep) in terms {
            if keep {
                e.toggle(t);
            }
        }
        Ok(e)
    }
}

/// Canonical formatting: terms in (degree, lexicographic) order, variables
/// ascending within a term, joined by ` + `. The zero expression prints
/// as `0`.
impl fmt::Display for PprmExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for t in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "{t}")?;
            first = false;
        }
        Ok(())
    }
}

/// Parse the terms of one expression string. Returns each term paired with
/// a `keep` flag; a bare `0` parses as a discarded term so that the
/// canonical form of the zero expression round-trips.
fn parse_terms(text: &str, line: usize) -> Result<Vec<(Minterm, bool)>, PprmError> {
    let mut terms = Vec::new();
    let mut col = 0usize;
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0usize;

    let skip_ws = |i: &mut usize, col: &mut usize| {
        while *i < chars.len() && chars[*i].is_whitespace() {
            *i += 1;
            *col += 1;
        }
    };

    loop {
        skip_ws(&mut i, &mut col);
        if i >= chars.len() {
            if terms.is_empty() {
                return Err(PprmError::Empty);
            }
            return Err(PprmError::MalformedToken {
                line,
                col: col + 1,
                token: "<end of input>".into(),
            });
        }
        // One term: `1`, `0`, or x<k> (* x<k>)*
        let term_col = col + 1;
        match chars[i] {
            '1' | '0' => {
                let keep = chars[i] == '1';
                i += 1;
                col += 1;
                terms.push((Minterm::constant(), keep));
            }
            'x' | 'X' => {
                let mut mask = 0u64;
                loop {
                    // variable
                    if i >= chars.len() || (chars[i] != 'x' && chars[i] != 'X') {
                        return Err(PprmError::MalformedToken {
                            line,
                            col: col + 1,
                            token: chars
                                .get(i)
                                .map_or("<end of input>".into(), |c| c.to_string()),
                        });
                    }
                    i += 1;
                    col += 1;
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                        col += 1;
                    }
                    if start == i {
                        return Err(PprmError::MalformedToken {
                            line,
                            col,
                            token: "x".into(),
                        });
                    }
                    let digits: String = chars[start..i].iter().collect();
                    let var: usize = digits.parse().map_err(|_| PprmError::MalformedToken {
                        line,
                        col: start,
                        token: format!("x{digits}"),
                    })?;
                    if var >= MAX_VARS {
                        return Err(PprmError::TooManyVariables { n: var + 1 });
                    }
                    mask |= 1 << var;
                    skip_ws(&mut i, &mut col);
                    if i < chars.len() && chars[i] == '*' {
                        i += 1;
                        col += 1;
                        skip_ws(&mut i, &mut col);
                    } else {
                        break;
                    }
                }
                terms.push((Minterm::from_mask(mask), true));
            }
            c => {
                return Err(PprmError::MalformedToken {
                    line,
                    col: term_col,
                    token: c.to_string(),
                });
            }
        }
        skip_ws(&mut i, &mut col);
        if i >= chars.len() {
            return Ok(terms);
        }
        if chars[i] != '+' {
            return Err(PprmError::MalformedToken {
                line,
                col: col + 1,
                token: chars[i].to_string(),
            });
        }
        i += 1;
        col += 1;
    }
}

/// A complete truth table over `n` variables: `2^n` output bits packed in
/// 64-bit words. Bit `x` is the output at the assignment whose binary
/// digits are `(x_{n-1} ... x_1 x_0)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruthTable {
    n: usize,
    words: Vec<u64>,
}

impl TruthTable {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_VARS, "at most {MAX_VARS} variables supported");
        let len = 1usize << n;
        TruthTable {
            n,
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// Tabulate a predicate over all assignments.
    pub fn from_fn(n: usize, mut f: impl FnMut(u64) -> bool) -> Self {
        let mut t = TruthTable::zero(n);
        for x in 0..t.len() {
            if f(x as u64) {
                t.set(x, true);
            }
        }
        t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of rows, `2^n`.
    pub fn len(&self) -> usize {
        1usize << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, idx: usize) -> bool {
        debug_assert!(idx < self.len());
        self.words[idx / 64] >> (idx % 64) & 1 != 0
    }

    pub fn set(&mut self, idx: usize, bit: bool) {
        debug_assert!(idx < self.len());
        if bit {
            self.words[idx / 64] |= 1 << (idx % 64);
        } else {
            self.words[idx / 64] &= !(1 << (idx % 64));
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Bitwise XOR with another table of the same width.
    pub fn xor(&self, other: &TruthTable) -> TruthTable {
        assert_eq!(self.n, other.n, "table widths differ");
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a ^ b)
            .collect();
        TruthTable { n: self.n, words }
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn xor_words(&mut self, other: &[u64]) {
        for (w, o) in self.words.iter_mut().zip(other) {
            *w ^= o;
        }
        self.mask_tail();
    }

    fn mask_tail(&mut self) {
        let len = self.len();
        if !len.is_multiple_of(64) {
            let last = self.words.len() - 1;
            self.words[last] &= (1u64 << (len % 64)) - 1;
        }
    }

    /// In-place subset-XOR (Möbius) transform over GF(2):
    /// `bits[x] ^= bits[x without bit k]` for every variable `k` and every
    /// `x` containing `k`. Applying it twice restores the input; applied to
    /// a truth table it yields the PPRM coefficients and vice versa.
    pub fn subset_xor_in_place(&mut self) {
        // Strides inside one word.
        const MASKS: [u64; 6] = [
            0x5555_5555_5555_5555,
            0x3333_3333_3333_3333,
            0x0f0f_0f0f_0f0f_0f0f,
            0x00ff_00ff_00ff_00ff,
            0x0000_ffff_0000_ffff,
            0x0000_0000_ffff_ffff,
        ];
        for (k, mask) in MASKS.iter().enumerate().take(self.n.min(6)) {
            for w in &mut self.words {
                *w ^= (*w & mask) << (1 << k);
            }
        }
        // Strides across words.
        for k in 6..self.n {
            let stride = 1usize << (k - 6);
            let mut j = 0;
            while j < self.words.len() {
                for offset in 0..stride {
                    self.words[j + stride + offset] ^= self.words[j + offset];
                }
                j += 2 * stride;
            }
        }
        self.mask_tail();
    }
}

impl fmt::Display for TruthTable {
    /// The `2^n` output bits as a `0`/`1` string in index order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for idx in 0..self.len() {
            write!(f, "{}", if self.get(idx) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// Built-in benchmark functions.
///
/// * `hbfr6` — a homogeneous bent function of degree 3 on six variables
///   (16 minterms).
/// * `4mod5` — the 4mod5 benchmark on four variables, 9 minterms of
///   degrees 0 to 2.
/// * `2of5` — 1 iff exactly two of five inputs are 1; derived from that
///   predicate by the Möbius transform (20 minterms).
pub fn builtin(name: &str) -> Result<PprmExpr, PprmError> {
    match name {
        "hbfr6" => {
            let triples: [[usize; 3]; 16] = [
                [0, 1, 2],
                [0, 1, 3],
                [0, 1, 4],
                [0, 1, 5],
                [0, 2, 3],
                [0, 2, 5],
                [0, 3, 4],
                [0, 4, 5],
                [1, 2, 3],
                [1, 2, 4],
                [1, 3, 5],
                [1, 4, 5],
                [2, 3, 4],
                [2, 3, 5],
                [2, 4, 5],
                [3, 4, 5],
            ];
            PprmExpr::from_terms(
                6,
                triples
                    .iter()
                    .map(|t| Minterm::from_vars(t.iter().copied())),
            )
        }
        "4mod5" => PprmExpr::parse(
            "1 + x0 + x1 + x2 + x3 + x0*x1 + x1*x2 + x0*x3 + x2*x3",
            Some(4),
        ),
        "2of5" => {
            let t = TruthTable::from_fn(5, |x| x.count_ones() == 2);
            Ok(PprmExpr::from_truth_table(&t))
        }
        _ => Err(PprmError::UnknownBuiltin { name: name.into() }),
    }
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 3] = ["hbfr6", "4mod5", "2of5"];

/// Parse a `.pprm` text file: an optional header line `vars: <n>`, then
/// non-comment lines joined by XOR. `#` starts a comment.
pub fn read_pprm_file(text: &str) -> Result<PprmExpr, PprmError> {
    let mut header_n: Option<usize> = None;
    let mut line_terms: Vec<(Minterm, bool)> = Vec::new();
    let mut saw_expr = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("vars:") {
            if saw_expr || header_n.is_some() {
                return Err(PprmError::MalformedHeader {
                    line: lineno + 1,
                    text: trimmed.into(),
                });
            }
            header_n = Some(
                rest.trim()
                    .parse()
                    .map_err(|_| PprmError::MalformedHeader {
                        line: lineno + 1,
                        text: trimmed.into(),
                    })?,
            );
            continue;
        }
        saw_expr = true;
        line_terms.extend(parse_terms(line, lineno + 1)?);
    }
    if !saw_expr {
        return Err(PprmError::Empty);
    }

    let mut max_var = None;
    for (t, _) in &line_terms {
        max_var = max_var.max(t.max_var());
    }
    let inferred = max_var.map_or(0, |v| v + 1);
    let n = match header_n {
        Some(n) => {
            if n > MAX_VARS {
                return Err(PprmError::TooManyVariables { n });
            }
            if inferred > n {
                return Err(PprmError::IndexOutOfRange {
                    var: max_var.unwrap(),
                    n,
                });
            }
            n
        }
        None => inferred,
    };
    let mut e = PprmExpr::zero(n);
    for (t, keep) in line_terms {
        if keep {
            e.toggle(t);
        }
    }
    Ok(e)
}

/// Canonical `.pprm` file contents: explicit header plus the canonical
/// expression line. Parsing the output reproduces the expression exactly.
pub fn write_pprm_file(e: &PprmExpr) -> String {
    format!("vars: {}\n{}\n", e.n(), e)
}

/// Cap on `vars:` in truth-table files, keeping them to a few MiB.
pub const MAX_TABLE_VARS: usize = 24;

/// Parse a truth-table text file: header `vars: <n>`, then one line of
/// `2^n` characters in `{0,1}`. `#` comments and blank lines are allowed.
pub fn read_table_file(text: &str) -> Result<TruthTable, PprmError> {
    let mut n: Option<usize> = None;
    let mut table: Option<TruthTable> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if n.is_none() {
            let rest = trimmed
                .strip_prefix("vars:")
                .ok_or_else(|| PprmError::MalformedHeader {
                    line: lineno + 1,
                    text: trimmed.into(),
                })?;
            let parsed: usize = rest
                .trim()
                .parse()
                .map_err(|_| PprmError::MalformedHeader {
                    line: lineno + 1,
                    text: trimmed.into(),
                })?;
            if parsed > MAX_TABLE_VARS {
                return Err(PprmError::TableTooLarge {
                    n: parsed,
                    max: MAX_TABLE_VARS,
                });
            }
            n = Some(parsed);
            continue;
        }
        if table.is_some() {
            return Err(PprmError::TrailingContent { line: lineno + 1 });
        }
        let n = n.unwrap();
        let expected = 1usize << n;
        let mut t = TruthTable::zero(n);
        let mut count = 0usize;
        for (col, ch) in trimmed.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => {
                    if count < expected {
                        t.set(count, true);
                    }
                }
                _ => {
                    return Err(PprmError::BadTableChar {
                        line: lineno + 1,
                        col: col + 1,
                        ch,
                    });
                }
            }
            count += 1;
        }
        if count != expected {
            return Err(PprmError::TableLength {
                expected,
                found: count,
            });
        }
        table = Some(t);
    }
    match (n, table) {
        (Some(n), None) => Err(PprmError::TableLength {
            expected: 1 << n,
            found: 0,
        }),
        (None, _) => Err(PprmError::Empty),
        (_, Some(t)) => Ok(t),
    }
}

/// Canonical truth-table file contents.
pub fn write_table_file(t: &TruthTable) -> String {
    format!("vars: {}\n{}\n", t.n(), t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn expr(text: &str) -> PprmExpr {
        PprmExpr::parse(text, None).unwrap()
    }

    #[test]
    fn parse_five_minterm_expression() {
        let e =
            PprmExpr::parse("x2*x1*x0 + x4*x3*x0 + x4*x3*x1 + x4*x3*x2 + x3*x1*x0", None).unwrap();
        assert_eq!(e.n(), 5);
        assert_eq!(e.term_count(), 5);
        assert!(e.is_homogeneous(3));
    }

    #[test]
    fn parse_constant_and_cancellation() {
        let one = expr("1");
        assert_eq!(one.n(), 0);
        assert_eq!(one.term_count(), 1);
        assert!(one.contains(&Minterm::constant()));

        let zero = expr("x0 + x0");
        assert_eq!(zero.n(), 1);
        assert!(zero.is_zero());
    }

    #[test]
    fn parse_repeated_variable_collapses() {
        assert_eq!(expr("x3*x3"), expr("x3"));
        assert_eq!(expr("x1*x2*x1"), expr("x1*x2"));
    }

    #[test]
    fn parse_errors() {
        assert_eq!(PprmExpr::parse("", None), Err(PprmError::Empty));
        assert_eq!(PprmExpr::parse("   ", None), Err(PprmError::Empty));
        assert!(matches!(
            PprmExpr::parse("x0 + y1", None),
            Err(PprmError::MalformedToken { .. })
        ));
        assert!(matches!(
            PprmExpr::parse("x", None),
            Err(PprmError::MalformedToken { .. })
        ));
        assert!(matches!(
            PprmExpr::parse("1*x0", None),
            Err(PprmError::MalformedToken { .. })
        ));
        assert!(matches!(
            PprmExpr::parse("x0 + + x1", None),
            Err(PprmError::MalformedToken { .. })
        ));
        assert!(matches!(
            PprmExpr::parse("x0 +", None),
            Err(PprmError::MalformedToken { .. })
        ));
        assert_eq!(
            PprmExpr::parse("x5", Some(3)),
            Err(PprmError::IndexOutOfRange { var: 5, n: 3 })
        );
    }

    #[test]
    fn format_canonical() {
        assert_eq!(PprmExpr::zero(3).to_string(), "0");
        assert_eq!(expr("1").to_string(), "1");
        assert_eq!(expr("x2*x0*x1").to_string(), "x0*x1*x2");
        // degree before lexicographic order
        assert_eq!(
            expr("x1*x2 + x0 + 1 + x0*x3").to_string(),
            "1 + x0 + x0*x3 + x1*x2"
        );
        // parse(format(e)) = e, including the zero expression
        let z = PprmExpr::parse(&PprmExpr::zero(2).to_string(), None).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn evaluate_matches_definition() {
        let f = builtin("hbfr6").unwrap();
        assert!(!f.evaluate(0)); // no constant term
        assert!(!f.evaluate(0b111111)); // 16 terms, all 1: even parity
        let g = expr("1 + x0");
        assert!(!g.evaluate(0b1));
        assert!(g.evaluate(0b0));
    }

    #[test]
    fn truth_table_round_trip_small() {
        for text in ["1", "x0", "1 + x0*x1", "x0*x1*x2 + x1 + x2"] {
            let e = expr(text);
            let back = PprmExpr::from_truth_table(&e.truth_table());
            assert_eq!(back, e, "round trip failed for {text}");
        }
    }

    #[test]
    fn truth_table_of_and_is_single_minterm() {
        for n in 1..=7 {
            let t = TruthTable::from_fn(n, |x| x == (1 << n) - 1);
            let e = PprmExpr::from_truth_table(&t);
            assert_eq!(e.term_count(), 1);
            assert!(e.contains(&Minterm::from_mask((1 << n) - 1)));
        }
    }

    #[test]
    fn all_zero_table_gives_zero_expression() {
        let e = PprmExpr::from_truth_table(&TruthTable::zero(4));
        assert!(e.is_zero());
    }

    /// Independent Möbius oracle: direct subset enumeration, O(4^n).
    fn naive_subset_xor(t: &TruthTable) -> TruthTable {
        let mut out = TruthTable::zero(t.n());
        for s in 0..t.len() {
            let mut acc = false;
            // enumerate subsets of s
            let mut sub = s;
            loop {
                acc ^= t.get(sub);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & s;
            }
            out.set(s, acc);
        }
        out
    }

    #[test]
    fn fast_transform_matches_naive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 0..=8 {
            let t = TruthTable::from_fn(n, |_| rng.random());
            let mut fast = t.clone();
            fast.subset_xor_in_place();
            assert_eq!(fast, naive_subset_xor(&t), "n={n}");
        }
    }

    #[test]
    fn transform_is_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in 0..=10 {
            for _ in 0..20 {
                let t = TruthTable::from_fn(n, |_| rng.random());
                let mut twice = t.clone();
                twice.subset_xor_in_place();
                twice.subset_xor_in_place();
                assert_eq!(twice, t, "n={n}");
            }
        }
    }

    #[test]
    fn two_of_five_has_expected_minterms() {
        let e = builtin("2of5").unwrap();
        assert_eq!(e.term_count(), 20);
        // all C(5,2) degree-2 and C(5,3) degree-3 products, nothing else
        for t in e.terms() {
            assert!(t.degree() == 2 || t.degree() == 3);
        }
        for a in 0..5 {
            for b in a + 1..5 {
                assert!(e.contains(&Minterm::from_vars([a, b])));
                for c in b + 1..5 {
                    assert!(e.contains(&Minterm::from_vars([a, b, c])));
                }
            }
        }
    }

    #[test]
    fn degree_partition_examples() {
        let m = builtin("4mod5").unwrap().degree_partition();
        assert_eq!(m.len(), 3);
        assert_eq!(m[&0].to_string(), "1");
        assert_eq!(m[&1].term_count(), 4);
        assert_eq!(m[&2].term_count(), 4);

        let h = builtin("hbfr6").unwrap().degree_partition();
        assert_eq!(h.len(), 1);
        assert_eq!(h[&3].term_count(), 16);

        assert!(PprmExpr::zero(4).degree_partition().is_empty());
    }

    #[test]
    fn homogeneity() {
        assert!(builtin("hbfr6").unwrap().is_homogeneous(3));
        assert!(!builtin("4mod5").unwrap().is_homogeneous(2));
        for k in 0..5 {
            assert!(PprmExpr::zero(3).is_homogeneous(k));
        }
    }

    #[test]
    fn builtin_names() {
        assert_eq!(builtin("hbfr6").unwrap().term_count(), 16);
        assert_eq!(builtin("4mod5").unwrap().term_count(), 9);
        assert_eq!(builtin("2of5").unwrap().term_count(), 20);
        assert!(matches!(
            builtin("nope"),
            Err(PprmError::UnknownBuiltin { .. })
        ));
    }

    #[test]
    fn xor_linearity_on_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let n = rng.random_range(1..=7);
            let e1 = random_expr(&mut rng, n);
            let e2 = random_expr(&mut rng, n);
            let lhs = e1.xor(&e2).truth_table();
            let rhs = e1.truth_table().xor(&e2.truth_table());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn evaluate_agrees_with_truth_table() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..30 {
            let n = rng.random_range(0..=8);
            let e = random_expr(&mut rng, n);
            let t = e.truth_table();
            for x in 0..t.len() {
                assert_eq!(e.evaluate(x as u64), t.get(x));
            }
        }
    }

    #[test]
    fn parse_format_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..100 {
            let n = rng.random_range(0..=9);
            let e = random_expr(&mut rng, n);
            let back = PprmExpr::parse(&e.to_string(), Some(e.n())).unwrap();
            assert_eq!(back, e);
        }
    }

    pub(crate) fn random_expr(rng: &mut ChaCha8Rng, n: usize) -> PprmExpr {
        let mut e = PprmExpr::zero(n);
        let terms = rng.random_range(0..=(1usize << n).min(12));
        for _ in 0..terms {
            let mask = rng.random_range(0..(1u64 << n));
            e.toggle(Minterm::from_mask(mask));
        }
        e
    }

    #[test]
    fn pprm_file_round_trip() {
        let text = "# comment\nvars: 5\nx0*x1 + x2 # trailing comment\n\nx3*x4\n";
        let e = read_pprm_file(text).unwrap();
        assert_eq!(e.n(), 5);
        assert_eq!(e.to_string(), "x2 + x0*x1 + x3*x4");
        let canon = write_pprm_file(&e);
        assert_eq!(read_pprm_file(&canon).unwrap(), e);
        // byte-identical on a second pass
        assert_eq!(write_pprm_file(&read_pprm_file(&canon).unwrap()), canon);
    }

    #[test]
    fn pprm_file_repeated_line_cancels() {
        let e = read_pprm_file("x0*x1\nx0*x1\n").unwrap();
        assert!(e.is_zero());
    }

    #[test]
    fn pprm_file_errors() {
        assert_eq!(read_pprm_file("# only comments\n"), Err(PprmError::Empty));
        assert!(matches!(
            read_pprm_file("vars: abc\nx0\n"),
            Err(PprmError::MalformedHeader { .. })
        ));
        assert!(matches!(
            read_pprm_file("vars: 2\nx5\n"),
            Err(PprmError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn table_file_round_trip() {
        let t = builtin("2of5").unwrap().truth_table();
        let text = write_table_file(&t);
        assert_eq!(read_table_file(&text).unwrap(), t);
    }

    #[test]
    fn table_file_errors() {
        assert!(matches!(
            read_table_file("vars: 2\n101\n"),
            Err(PprmError::TableLength {
                expected: 4,
                found: 3
            })
        ));
        assert!(matches!(
            read_table_file("vars: 1\n1x\n"),
            Err(PprmError::BadTableChar { .. })
        ));
        assert!(matches!(
            read_table_file("0101\n"),
            Err(PprmError::MalformedHeader { .. })
        ));
        assert!(matches!(
            read_table_file("vars: 30\n"),
            Err(PprmError::TableTooLarge { .. })
        ));
        assert!(matches!(
            read_table_file("vars: 1\n10\n01\n"),
            Err(PprmError::TrailingContent { line: 3 })
        ));
    }

    #[test]
    fn minterm_order_is_degree_then_lex() {
        let mut terms = [
            Minterm::from_vars([1, 2]),
            Minterm::from_vars([0, 3]),
            Minterm::from_vars([2]),
            Minterm::constant(),
            Minterm::from_vars([0, 1, 2]),
        ];
        terms.sort();
        let shown: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
        assert_eq!(shown, ["1", "x2", "x0*x3", "x1*x2", "x0*x1*x2"]);
    }
}
