use core::cmp::Ordering;

/// Max-heap entry keyed on a float priority; ties pop the lower index first.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Prioritized {
    pub(crate) priority: f64,
    pub(crate) index: usize,
}

impl PartialEq for Prioritized {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Prioritized {}

impl PartialOrd for Prioritized {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Prioritized {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority.total_cmp(&other.priority).then_with(|| other.index.cmp(&self.index))
    }
}
