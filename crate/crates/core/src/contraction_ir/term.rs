//! Core IR types: indices, operator factors, noncommutative words and terms.

use std::collections::{BTreeMap, HashMap};

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

/// A tensor index; every index of a complete term is summed over `0..d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndexVar(pub u16);

/// Functional parts of a Laplace type h-differential operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OpFunction {
    P2,
    P1,
    P01,
    P02,
}

impl OpFunction {
    pub fn arity(self) -> usize {
        match self {
            OpFunction::P2 => 1,
            OpFunction::P1 | OpFunction::P01 => 2,
            OpFunction::P02 => 3,
        }
    }

    /// `P2` is a quadratic form, so its indices commute.
    pub fn symmetric(self) -> bool {
        self == OpFunction::P2
    }

    pub fn name(self) -> &'static str {
        match self {
            OpFunction::P2 => "P2",
            OpFunction::P1 => "P1",
            OpFunction::P01 => "P01",
            OpFunction::P02 => "P02",
        }
    }
}

/// An operator part, possibly wrapped in partial divided differences.
///
/// Argument `r` of the base function is replaced by a divided difference over
/// `blocks[r]` consecutive nodes; `slots` lists the t-slot of every node and is
/// strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Factor {
    pub func: OpFunction,
    pub indices: [IndexVar; 2],
    pub blocks: Vec<u8>,
    pub slots: Vec<usize>,
    /// Independent of `h`; divided differences of it vanish.
    pub constant: bool,
}

impl Factor {
    pub fn new(func: OpFunction, a: IndexVar, b: IndexVar, slots: Vec<usize>) -> Self {
        assert_eq!(slots.len(), func.arity(), "slot count must match the arity of {}", func.name());
        Factor { func, indices: [a, b], blocks: vec![1; func.arity()], slots, constant: false }
    }

    pub fn depends_on(&self, slot: usize) -> bool {
        self.slots.contains(&slot)
    }

    /// Block containing node position `pos`.
    pub fn block_of(&self, pos: usize) -> usize {
        let mut acc = 0;
        for (r, &b) in self.blocks.iter().enumerate() {
            acc += b as usize;
            if pos < acc {
                return r;
            }
        }
        panic!("node position {pos} out of range");
    }

    /// Block boundaries as `(start, len)` pairs into `slots`.
    pub fn block_ranges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.blocks.len());
        let mut acc = 0;
        for &b in &self.blocks {
            out.push((acc, b as usize));
            acc += b as usize;
        }
        out
    }

    /// Structural key that ignores index names.
    pub(crate) fn shape(&self) -> (OpFunction, &[u8], &[usize], bool) {
        (self.func, &self.blocks, &self.slots, self.constant)
    }
}

/// One letter of the noncommutative word: `delta_{dirs}(h)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NcEntry {
    /// Directions, kept sorted since the derivations commute.
    pub dirs: Vec<IndexVar>,
}

impl NcEntry {
    pub fn new(mut dirs: Vec<IndexVar>) -> Self {
        dirs.sort();
        NcEntry { dirs }
    }
}

/// `coeff * xi_{xi} * prod_s B0(t_s)^{b0[s]} * prod factors (word)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContractionTerm {
    pub coeff: Rational64,
    pub b0: Vec<u32>,
    pub xi: Vec<IndexVar>,
    pub factors: Vec<Factor>,
    pub word: Vec<NcEntry>,
}

impl ContractionTerm {
    /// The constant `c` on a single slot.
    pub fn scalar(c: Rational64) -> Self {
        ContractionTerm { coeff: c, b0: vec![0], xi: vec![], factors: vec![], word: vec![] }
    }

    /// `B0(t0)`.
    pub fn b0() -> Self {
        ContractionTerm { coeff: Rational64::from_integer(1), b0: vec![1], xi: vec![], factors: vec![], word: vec![] }
    }

    pub fn slot_count(&self) -> usize {
        self.word.len() + 1
    }

    pub fn b0_total(&self) -> u32 {
        self.b0.iter().sum()
    }

    /// Homogeneity degree in `xi` (with `lambda` of degree two).
    pub fn degree(&self) -> i32 {
        self.xi.len() as i32 - 2 * self.b0_total() as i32
    }

    /// Every index occurrence, in the order word, factors, xi.
    pub fn index_occurrences(&self) -> Vec<IndexVar> {
        let mut v: Vec<IndexVar> = self.word.iter().flat_map(|e| e.dirs.iter().copied()).collect();
        for f in &self.factors {
            v.extend_from_slice(&f.indices);
        }
        v.extend_from_slice(&self.xi);
        v
    }

    pub fn max_index(&self) -> Option<IndexVar> {
        self.index_occurrences().into_iter().max()
    }

    /// Occurrence count of every index.
    pub fn index_counts(&self) -> BTreeMap<IndexVar, usize> {
        let mut m = BTreeMap::new();
        for i in self.index_occurrences() {
            *m.entry(i).or_insert(0) += 1;
        }
        m
    }

    /// True when every index is summed, that is, appears exactly twice.
    pub fn is_closed(&self) -> bool {
        self.index_counts().values().all(|&c| c == 2)
    }

    /// Structural invariants: slot bookkeeping and factor shapes.
    pub fn check_shape(&self) -> bool {
        let n = self.slot_count();
        self.b0.len() == n
            && self.word.iter().all(|e| !e.dirs.is_empty())
            && self.factors.iter().all(|f| {
                f.blocks.len() == f.func.arity()
                    && f.blocks.iter().all(|&b| b >= 1)
                    && f.blocks.iter().map(|&b| b as usize).sum::<usize>() == f.slots.len()
                    && f.slots.windows(2).all(|w| w[0] < w[1])
                    && f.slots.iter().all(|&s| s < n)
            })
    }

    pub fn rename(&mut self, map: &HashMap<IndexVar, IndexVar>) {
        let r = |i: &mut IndexVar| {
            if let Some(&j) = map.get(i) {
                *i = j;
            }
        };
        for e in &mut self.word {
            e.dirs.iter_mut().for_each(r);
            e.dirs.sort();
        }
        for f in &mut self.factors {
            f.indices.iter_mut().for_each(r);
        }
        self.xi.iter_mut().for_each(r);
    }

    /// Adds `offset` to every index.
    pub fn shift_indices(&mut self, offset: u16) {
        let map: HashMap<IndexVar, IndexVar> =
            self.index_occurrences().into_iter().map(|i| (i, IndexVar(i.0 + offset))).collect();
        self.rename(&map);
    }
}

/// A symbol: terms grouped by homogeneity degree.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SymbolExpr {
    pub parts: BTreeMap<i32, Vec<ContractionTerm>>,
}

impl SymbolExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ContractionTerm>) -> Self {
        let mut s = Self::new();
        for t in terms {
            s.push(t);
        }
        s
    }

    pub fn push(&mut self, t: ContractionTerm) {
        self.parts.entry(t.degree()).or_default().push(t);
    }

    pub fn extend(&mut self, other: SymbolExpr) {
        for t in other.into_terms() {
            self.push(t);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = &ContractionTerm> {
        self.parts.values().flatten()
    }

    pub fn into_terms(self) -> impl Iterator<Item = ContractionTerm> {
        self.parts.into_values().flatten()
    }

    pub fn degree(&self, deg: i32) -> &[ContractionTerm] {
        self.parts.get(&deg).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.parts.values().map(|v| v.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn scale(&self, c: Rational64) -> SymbolExpr {
        SymbolExpr::from_terms(self.terms().cloned().map(|mut t| {
            t.coeff *= c;
            t
        }))
    }
}
