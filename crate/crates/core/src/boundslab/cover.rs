//! Exact minimum covers by 1-monochromatic rectangles.
//!
//! Only maximal rectangles need to be considered: every 1-monochromatic
//! rectangle extends to a maximal one that covers at least as much. Maximal
//! rectangles are the closed pairs `(A, B)` where `B` is the set of columns
//! that are 1 on every row of `A` and vice versa, so their column sets are
//! exactly the nonempty intersections of row supports.

use std::collections::BTreeSet;
use std::io::Write;

use serde::Serialize;

use super::bits::Bits;
use crate::error::{Error, Result};
use crate::heqfun::{heq, HeqParams};

/// Upper limit on enumerated maximal rectangles.
const MAX_RECTANGLES: usize = 1 << 20;

/// A two-party boolean function tabulated on `rows x cols`.
#[derive(Debug, Clone)]
pub struct FunctionTable {
    rows: usize,
    cols: usize,
    ones: Vec<bool>,
}

impl FunctionTable {
    pub fn from_fn(
        rows: usize,
        cols: usize,
        budget: u64,
        mut f: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self> {
        let cells = (rows as u64)
            .checked_mul(cols as u64)
            .filter(|&c| c <= budget);
        if cells.is_none() {
            return Err(Error::BudgetExceeded {
                what: "function table",
                needed: format!("{rows} x {cols} cells"),
                budget: budget.to_string(),
            });
        }
        let mut ones = Vec::with_capacity(rows * cols);
        for x in 0..rows {
            for y in 0..cols {
                ones.push(f(x, y));
            }
        }
        Ok(FunctionTable { rows, cols, ones })
    }

    /// `HEQ_{k,k'}` with inputs in [`HeqParams::input_at`] order.
    pub fn heq(params: HeqParams, budget: u64) -> Result<Self> {
        let n = params
            .input_count()
            .filter(|&n| n <= budget)
            .ok_or_else(|| Error::BudgetExceeded {
                what: "function table",
                needed: format!(
                    "(2^{})^{} inputs per side",
                    params.kprime,
                    params.input_len()
                ),
                budget: budget.to_string(),
            })? as usize;
        let inputs: Vec<_> = (0..n as u64).map(|i| params.input_at(i)).collect();
        Self::from_fn(n, n, budget, |x, y| {
            heq(&inputs[x], &inputs[y]).expect("same parameters")
        })
    }

    pub fn neq(n: u32, budget: u64) -> Result<Self> {
        if n == 0 || n > 31 {
            return Err(Error::Unsupported(format!("n = {n}")));
        }
        let side = 1usize << n;
        Self::from_fn(side, side, budget, |x, y| x != y)
    }

    pub fn constant(rows: usize, cols: usize, value: bool, budget: u64) -> Result<Self> {
        Self::from_fn(rows, cols, budget, |_, _| value)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn value(&self, x: usize, y: usize) -> bool {
        self.ones[x * self.cols + y]
    }

    fn row_support(&self, x: usize) -> Bits {
        let mut b = Bits::new(self.cols);
        for y in 0..self.cols {
            if self.value(x, y) {
                b.insert(y);
            }
        }
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverTarget {
    /// Only the cells `(x, x)`; requires a square table whose diagonal is all ones.
    Diagonal,
    /// Every cell with value 1.
    AllOnes,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Rectangle {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl Rectangle {
    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.rows.binary_search(&x).is_ok() && self.cols.binary_search(&y).is_ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RectCover {
    pub rectangles: Vec<Rectangle>,
    pub target: Vec<(usize, usize)>,
}

impl RectCover {
    /// Re-checks every rectangle against the table and that the union covers the target.
    pub fn verify(&self, f: &FunctionTable) -> std::result::Result<(), String> {
        for (id, r) in self.rectangles.iter().enumerate() {
            for &x in &r.rows {
                for &y in &r.cols {
                    if x >= f.rows || y >= f.cols || !f.value(x, y) {
                        return Err(format!("rectangle {id} contains 0-cell ({x}, {y})"));
                    }
                }
            }
        }
        match self
            .target
            .iter()
            .find(|&&(x, y)| !self.rectangles.iter().any(|r| r.contains(x, y)))
        {
            Some(&(x, y)) => Err(format!("target cell ({x}, {y}) is uncovered")),
            None => Ok(()),
        }
    }

    /// CSV with columns `id,alice,bob`; members are `;`-separated.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["id", "alice", "bob"])?;
        let join = |v: &[usize]| {
            v.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(";")
        };
        for (id, r) in self.rectangles.iter().enumerate() {
            w.write_record([id.to_string(), join(&r.rows), join(&r.cols)])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverResult {
    pub size: usize,
    /// `ceil(log2 size)`, the nondeterministic complexity implied by the cover.
    pub communication_bound: u32,
    pub maximal_rectangles: usize,
    pub search_nodes: u64,
    pub witness: RectCover,
}

pub fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// Every maximal 1-monochromatic rectangle, sorted.
pub fn maximal_rectangles(f: &FunctionTable) -> Result<Vec<Rectangle>> {
    let supports: Vec<Bits> = (0..f.rows).map(|x| f.row_support(x)).collect();
    let mut intents: BTreeSet<Bits> = BTreeSet::new();
    for s in &supports {
        if s.is_empty() {
            continue;
        }
        let fresh: Vec<Bits> = intents
            .iter()
            .map(|i| i.and(s))
            .filter(|i| !i.is_empty())
            .collect();
        intents.insert(s.clone());
        intents.extend(fresh);
        if intents.len() > MAX_RECTANGLES {
            return Err(Error::BudgetExceeded {
                what: "maximal rectangle enumeration",
                needed: format!("more than {MAX_RECTANGLES} rectangles"),
                budget: MAX_RECTANGLES.to_string(),
            });
        }
    }
    let mut rects: Vec<Rectangle> = intents
        .into_iter()
        .map(|cols| Rectangle {
            rows: (0..f.rows)
                .filter(|&x| cols.is_subset(&supports[x]))
                .collect(),
            cols: cols.iter().collect(),
        })
        .collect();
    rects.sort();
    Ok(rects)
}

/// Exact `C^1`-style cover: the fewest 1-monochromatic rectangles whose union contains the target.
pub fn min_one_cover(f: &FunctionTable, target: CoverTarget) -> Result<CoverResult> {
    let cells: Vec<(usize, usize)> = match target {
        CoverTarget::Diagonal => {
            if f.rows != f.cols {
                return Err(Error::InvalidInput(
                    "diagonal target needs a square table".into(),
                ));
            }
            if let Some(x) = (0..f.rows).find(|&x| !f.value(x, x)) {
                return Err(Error::InvalidInput(format!(
                    "diagonal cell ({x}, {x}) is a 0-cell"
                )));
            }
            (0..f.rows).map(|x| (x, x)).collect()
        }
        CoverTarget::AllOnes => (0..f.rows)
            .flat_map(|x| (0..f.cols).map(move |y| (x, y)))
            .filter(|&(x, y)| f.value(x, y))
            .collect(),
    };
    let rects = maximal_rectangles(f)?;
    let maximal = rects.len();

    // Coverage of each rectangle over target indices; drop rectangles that cover nothing.
    let mut candidates: Vec<(Rectangle, Bits)> = rects
        .into_iter()
        .map(|r| {
            let mut cov = Bits::new(cells.len());
            for (t, &(x, y)) in cells.iter().enumerate() {
                if r.contains(x, y) {
                    cov.insert(t);
                }
            }
            (r, cov)
        })
        .filter(|(_, cov)| !cov.is_empty())
        .collect();
    // Dominance: a rectangle whose coverage is inside another's is never needed.
    let keep: Vec<bool> = (0..candidates.len())
        .map(|i| {
            !candidates.iter().enumerate().any(|(j, (_, cj))| {
                let ci = &candidates[i].1;
                j != i && ci.is_subset(cj) && (ci != cj || j < i)
            })
        })
        .collect();
    let mut idx = 0;
    candidates.retain(|_| {
        idx += 1;
        keep[idx - 1]
    });

    let coverage: Vec<Bits> = candidates.iter().map(|(_, c)| c.clone()).collect();
    let (chosen, nodes) = SetCover::new(cells.len(), &coverage).solve();
    let rectangles: Vec<Rectangle> = chosen.iter().map(|&i| candidates[i].0.clone()).collect();
    let witness = RectCover {
        rectangles,
        target: cells,
    };
    witness
        .verify(f)
        .map_err(|e| Error::InvalidInput(format!("internal cover check failed: {e}")))?;
    Ok(CoverResult {
        size: chosen.len(),
        communication_bound: ceil_log2(chosen.len()),
        maximal_rectangles: maximal,
        search_nodes: nodes,
        witness,
    })
}

/// Branch and bound for exact set cover. Children are explored best-first
/// (largest new coverage), ties by set index.
struct SetCover<'a> {
    universe: usize,
    sets: &'a [Bits],
    best: Vec<usize>,
    nodes: u64,
}

impl<'a> SetCover<'a> {
    fn new(universe: usize, sets: &'a [Bits]) -> Self {
        SetCover {
            universe,
            sets,
            best: Vec::new(),
            nodes: 0,
        }
    }

    fn greedy(&self) -> Vec<usize> {
        let mut left = Bits::full(self.universe);
        let mut picked = Vec::new();
        while !left.is_empty() {
            let (i, _) = self
                .sets
                .iter()
                .enumerate()
                .map(|(i, s)| (i, s.and_count(&left)))
                .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
                .expect("target is coverable");
            left = left.and_not(&self.sets[i]);
            picked.push(i);
        }
        picked.sort_unstable();
        picked
    }

    fn solve(mut self) -> (Vec<usize>, u64) {
        if self.universe == 0 {
            return (Vec::new(), 0);
        }
        self.best = self.greedy();
        let mut chosen = Vec::new();
        self.search(Bits::full(self.universe), &mut chosen);
        let mut best = self.best;
        best.sort_unstable();
        (best, self.nodes)
    }

    fn search(&mut self, left: Bits, chosen: &mut Vec<usize>) {
        self.nodes += 1;
        if left.is_empty() {
            if chosen.len() < self.best.len() {
                self.best = chosen.clone();
            }
            return;
        }
        let widest = self
            .sets
            .iter()
            .map(|s| s.and_count(&left))
            .max()
            .unwrap_or(0);
        let remaining = left.count();
        if widest == 0 || chosen.len() + remaining.div_ceil(widest) >= self.best.len() {
            return;
        }
        // Branch on the uncovered element with the fewest covering sets.
        let pivot = left
            .iter()
            .min_by_key(|&e| self.sets.iter().filter(|s| s.contains(e)).count())
            .expect("nonempty");
        let mut children: Vec<(usize, usize)> = self
            .sets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.contains(pivot))
            .map(|(i, s)| (i, s.and_count(&left)))
            .collect();
        children.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        for (i, _) in children {
            chosen.push(i);
            self.search(left.and_not(&self.sets[i]), chosen);
            chosen.pop();
        }
    }
}
