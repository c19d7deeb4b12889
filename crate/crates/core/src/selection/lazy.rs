use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Heap entry ordered by value (descending), then by element id (ascending).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Entry {
    pub value: f64,
    pub id: u32,
    pub stamp: u64,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.total_cmp(&other.value).then_with(|| other.id.cmp(&self.id))
    }
}

/// Max-heap of stale upper bounds for lazy (CELF-style) argmax selection.
///
/// An entry is accepted when its value was computed at the current stamp; otherwise
/// it is re-evaluated and pushed back. With valid upper bounds this returns the exact
/// argmax, ties going to the smaller id.
pub(crate) struct LazyHeap {
    heap: BinaryHeap<Entry>,
}

impl LazyHeap {
    pub fn new(entries: impl IntoIterator<Item = Entry>) -> Self {
        LazyHeap { heap: entries.into_iter().collect() }
    }

    /// Pops the best element for which `feasible` holds.
    ///
    /// `feasible` may permanently drop elements; `eval` returns the fresh value.
    pub fn pop_best(
        &mut self,
        now: u64,
        mut feasible: impl FnMut(usize) -> bool,
        mut eval: impl FnMut(usize) -> f64,
    ) -> Option<Entry> {
        while let Some(top) = self.heap.pop() {
            let id = top.id as usize;
            if !feasible(id) {
                continue;
            }
            if top.stamp == now {
                return Some(top);
            }
            self.heap.push(Entry { value: eval(id), id: top.id, stamp: now });
        }
        None
    }
}
