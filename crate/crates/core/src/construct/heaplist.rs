//! Heap of merge losses over an LR-sorted list of transition-matrix columns.
//!
//! The list holds `L` columns in ascending likelihood-ratio order; the heap
//! holds the `L - 1` capacity losses of merging each column with its
//! successor. Columns live in an arena; a merge keeps the left column's slot
//! and unlinks the right one, so slot order always equals list order. A
//! Fenwick tree over live slots converts between slots and list positions
//! in `O(log L)`.

use std::cmp::Ordering;

use crate::channel::{same_llr, Column, Tpm};
use crate::error::{domain, Error, Result};

const NONE: usize = usize::MAX;

/// Symmetric-capacity contribution lost by merging two columns.
#[inline]
pub(crate) fn merge_loss(a: &Column, b: &Column) -> f64 {
    a.capacity() + b.capacity() - a.add(*b).capacity()
}

#[derive(Debug, Clone)]
pub struct HeapList {
    cols: Vec<Column>,
    llr: Vec<f64>,
    next: Vec<usize>,
    prev: Vec<usize>,
    head: usize,
    len: usize,
    // loss[s] = loss of merging slot s with next[s]; heap of slots
    loss: Vec<f64>,
    heap: Vec<usize>,
    heap_pos: Vec<usize>,
    live: Fenwick,
    duplicate_pairs: usize,
}

impl HeapList {
    /// Builds from a canonical transition matrix.
    pub fn initialize(tpm: &Tpm) -> Result<Self> {
        Self::from_columns(tpm.columns().to_vec())
    }

    /// Builds from arbitrary non-negative columns: each is oriented to
    /// `p0 >= p1` and the list sorted by likelihood ratio. Equal-ratio
    /// columns are kept apart and reported by [`HeapList::has_duplicates`].
    pub fn from_columns(cols: Vec<Column>) -> Result<Self> {
        if cols.is_empty() {
            return domain("cannot build a heaplist from an empty matrix");
        }
        if let Some(c) = cols.iter().find(|c| !(c.p0 >= 0.0 && c.p1 >= 0.0)) {
            return domain(format!("column ({}, {}) has a negative entry", c.p0, c.p1));
        }
        let mut keyed: Vec<(f64, Column)> = cols
            .into_iter()
            .map(|c| {
                let c = c.oriented();
                (c.llr(), c)
            })
            .collect();
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
        let len = keyed.len();
        let (llr, cols): (Vec<f64>, Vec<Column>) = keyed.into_iter().unzip();
        let mut h = Self {
            cols,
            llr,
            next: (1..=len).map(|s| if s == len { NONE } else { s }).collect(),
            prev: (0..len)
                .map(|s| if s == 0 { NONE } else { s - 1 })
                .collect(),
            head: 0,
            len,
            loss: vec![0.0; len],
            heap: Vec::with_capacity(len),
            heap_pos: vec![NONE; len],
            live: Fenwick::full(len),
            duplicate_pairs: 0,
        };
        for s in 0..len.saturating_sub(1) {
            h.loss[s] = merge_loss(&h.cols[s], &h.cols[s + 1]);
            h.heap_pos[s] = h.heap.len();
            h.heap.push(s);
            if same_llr(h.llr[s], h.llr[s + 1]) {
                h.duplicate_pairs += 1;
            }
        }
        for i in (0..h.heap.len() / 2).rev() {
            h.sift_down(i);
        }
        Ok(h)
    }

    pub fn size(&self) -> usize {
        self.len
    }

    /// Number of merge losses held in the heap; always `size() - 1`.
    pub fn heap_size(&self) -> usize {
        self.heap.len()
    }

    pub fn has_duplicates(&self) -> bool {
        self.duplicate_pairs > 0
    }

    /// Loss values in list order.
    pub fn losses(&self) -> Vec<f64> {
        self.slots()
            .filter(|&s| self.next[s] != NONE)
            .map(|s| self.loss[s])
            .collect()
    }

    /// List position `t` whose merge with `t + 1` loses the least capacity.
    /// Ties resolve to the smallest position.
    pub fn minloss_index(&self) -> Result<usize> {
        match self.heap.first() {
            Some(&s) => Ok(self.live.rank(s)),
            None => Err(Error::State("heaplist has fewer than two columns".into())),
        }
    }

    /// Replaces columns `t` and `t + 1` by their sum.
    pub fn merge_at_index(&mut self, t: usize) -> Result<()> {
        if self.len < 2 || t >= self.len - 1 {
            return domain(format!(
                "merge position {t} out of range for size {}",
                self.len
            ));
        }
        let s = self.live.select(t);
        self.merge_slot(s);
        Ok(())
    }

    fn merge_slot(&mut self, s: usize) {
        let r = self.next[s];
        let p = self.prev[s];
        let rr = self.next[r];
        let dup = |h: &Self, a: usize, b: usize| {
            usize::from(a != NONE && b != NONE && same_llr(h.llr[a], h.llr[b]))
        };
        self.duplicate_pairs -= dup(self, p, s) + dup(self, s, r) + dup(self, r, rr);

        self.cols[s] = self.cols[s].add(self.cols[r]);
        self.llr[s] = self.cols[s].llr();
        self.next[s] = rr;
        if rr != NONE {
            self.prev[rr] = s;
        }
        self.live.add(r, -1);
        self.len -= 1;

        self.heap_remove(r);
        if rr != NONE {
            self.loss[s] = merge_loss(&self.cols[s], &self.cols[rr]);
            self.heap_fix(s);
        } else {
            self.heap_remove(s);
        }
        if p != NONE {
            self.loss[p] = merge_loss(&self.cols[p], &self.cols[s]);
            self.heap_fix(p);
        }
        self.duplicate_pairs += dup(self, p, s) + dup(self, s, rr);
    }

    /// Greedy minimum-loss merging until at most `mu` columns remain and no
    /// two share a likelihood ratio.
    pub fn reduce_to(&mut self, mu: usize) {
        while self.len > mu || self.has_duplicates() {
            let Some(&s) = self.heap.first() else { break };
            self.merge_slot(s);
        }
    }

    /// Columns in list order.
    pub fn columns(&self) -> Vec<Column> {
        self.slots().map(|s| self.cols[s]).collect()
    }

    /// The current list as a canonical transition matrix.
    pub fn tpm(&self) -> Result<Tpm> {
        if self.has_duplicates() {
            return Tpm::from_columns(self.columns());
        }
        let cols: Vec<Column> = self
            .columns()
            .into_iter()
            .filter(|c| c.mass() > 0.0)
            .collect();
        Ok(Tpm::from_canonical(cols))
    }

    fn slots(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::successors((self.head != NONE).then_some(self.head), |&s| {
            let n = self.next[s];
            (n != NONE).then_some(n)
        })
    }

    #[inline]
    fn less(&self, a: usize, b: usize) -> bool {
        match self.loss[a].total_cmp(&self.loss[b]) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => a < b,
        }
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if !self.less(self.heap[i], self.heap[parent]) {
                break;
            }
            self.swap(i, parent);
            i = parent;
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut m = i;
            if l < self.heap.len() && self.less(self.heap[l], self.heap[m]) {
                m = l;
            }
            if r < self.heap.len() && self.less(self.heap[r], self.heap[m]) {
                m = r;
            }
            if m == i {
                break;
            }
            self.swap(i, m);
            i = m;
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.heap.swap(i, j);
        self.heap_pos[self.heap[i]] = i;
        self.heap_pos[self.heap[j]] = j;
    }

    fn heap_fix(&mut self, s: usize) {
        let i = self.heap_pos[s];
        debug_assert!(i != NONE);
        self.sift_up(i);
        self.sift_down(self.heap_pos[s]);
    }

    fn heap_remove(&mut self, s: usize) {
        let i = self.heap_pos[s];
        if i == NONE {
            return;
        }
        let last = self.heap.len() - 1;
        self.swap(i, last);
        self.heap.pop();
        self.heap_pos[s] = NONE;
        if i < self.heap.len() {
            let moved = self.heap[i];
            self.sift_up(i);
            self.sift_down(self.heap_pos[moved]);
        }
    }
}

/// Binary indexed tree over slot liveness.
#[derive(Debug, Clone)]
struct Fenwick {
    tree: Vec<i32>,
}

impl Fenwick {
    fn full(n: usize) -> Self {
        let mut tree = vec![0i32; n + 1];
        for i in 1..=n {
            tree[i] += 1;
            let parent = i + (i & i.wrapping_neg());
            if parent <= n {
                tree[parent] += tree[i];
            }
        }
        Self { tree }
    }

    fn add(&mut self, slot: usize, delta: i32) {
        let mut i = slot + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Number of live slots strictly before `slot`.
    fn rank(&self, slot: usize) -> usize {
        let mut i = slot;
        let mut sum = 0i32;
        while i > 0 {
            sum += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        sum as usize
    }

    /// Slot of the live entry at position `t`.
    fn select(&self, t: usize) -> usize {
        let n = self.tree.len() - 1;
        let mut pos = 0usize;
        let mut remaining = t as i32 + 1;
        let mut step = if n == 0 {
            0
        } else {
            1usize << (usize::BITS - 1 - n.leading_zeros())
        };
        while step > 0 {
            let nxt = pos + step;
            if nxt <= n && self.tree[nxt] < remaining {
                pos = nxt;
                remaining -= self.tree[nxt];
            }
            step >>= 1;
        }
        pos
    }
}
