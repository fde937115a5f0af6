//! Finite private-heap domains and their assignment enumeration.

use lang_core::{Component, Heap, HeapDecl, WholeProgram};

/// A finite secrecy domain: which private cells vary and over which
/// values. The full assignment space is `values^locations`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrivDomain {
    /// Private (negative) addresses, ascending.
    pub locations: Vec<i64>,
    /// Candidate values, ascending and deduplicated.
    pub values: Vec<u64>,
}

impl PrivDomain {
    pub fn new(mut locations: Vec<i64>, mut values: Vec<u64>) -> PrivDomain {
        locations.sort_unstable();
        locations.dedup();
        values.sort_unstable();
        values.dedup();
        PrivDomain { locations, values }
    }

    /// The component's declared private footprint over the given values.
    pub fn declared(c: &Component, values: impl IntoIterator<Item = u64>) -> PrivDomain {
        PrivDomain::new(
            c.privates.iter().map(|d| d.addr).collect(),
            values.into_iter().collect(),
        )
    }

    /// Number of assignments, or `None` on overflow.
    pub fn assignment_count(&self) -> Option<u64> {
        let mut count: u64 = 1;
        for _ in &self.locations {
            count = count.checked_mul(self.values.len() as u64)?;
        }
        Some(count)
    }

    /// The `idx`-th assignment in lexicographic order (first location is
    /// the most significant digit). Random access keeps parallel scans
    /// deterministic: the first counterexample is the one with the lowest
    /// index regardless of evaluation order.
    pub fn assignment(&self, idx: u64) -> Vec<(i64, u64)> {
        let radix = self.values.len() as u64;
        let mut digits = vec![0u64; self.locations.len()];
        let mut rest = idx;
        for slot in digits.iter_mut().rev() {
            *slot = rest % radix;
            rest /= radix;
        }
        self.locations
            .iter()
            .zip(digits)
            .map(|(&addr, d)| (addr, self.values[d as usize]))
            .collect()
    }
}

/// Render an assignment for witness notes, e.g. `-10=0, -2=1`.
pub fn format_assignment(assignment: &[(i64, u64)]) -> String {
    assignment
        .iter()
        .map(|(a, v)| format!("{a}={v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// The program with every domain location explicitly declared, keeping the
/// values (and taints) it already has. Enumerated variants are built from
/// this base so that all of them share one explicit private domain and are
/// therefore low-equivalent by construction.
pub fn base_with_domain(w: &WholeProgram, dom: &PrivDomain) -> WholeProgram {
    let mut out = w.clone();
    let heap = w.initial_heap();
    for &addr in &dom.locations {
        if !out.component.privates.iter().any(|d| d.addr == addr) {
            let (value, taint) = heap.get(addr);
            out.component.privates.push(HeapDecl { addr, value, taint });
        }
    }
    out
}

/// The program with the private values of `assignment` substituted.
/// Addresses not already declared get fresh declarations with the default
/// private taint.
pub fn with_private_values(w: &WholeProgram, assignment: &[(i64, u64)]) -> WholeProgram {
    let mut out = w.clone();
    for &(addr, value) in assignment {
        match out.component.privates.iter_mut().find(|d| d.addr == addr) {
            Some(decl) => decl.value = value,
            None => {
                let (_, taint) = Heap::default_cell(addr);
                out.component.privates.push(HeapDecl { addr, value, taint });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assignments_enumerate_lexicographically() {
        let dom = PrivDomain::new(vec![-2, -1], vec![0, 1, 2]);
        assert_eq!(dom.assignment_count(), Some(9));
        assert_eq!(dom.assignment(0), vec![(-2, 0), (-1, 0)]);
        assert_eq!(dom.assignment(1), vec![(-2, 0), (-1, 1)]);
        assert_eq!(dom.assignment(3), vec![(-2, 1), (-1, 0)]);
        assert_eq!(dom.assignment(8), vec![(-2, 2), (-1, 2)]);
    }

    #[test]
    fn empty_locations_have_one_empty_assignment() {
        let dom = PrivDomain::new(vec![], vec![0, 1]);
        assert_eq!(dom.assignment_count(), Some(1));
        assert_eq!(dom.assignment(0), vec![]);
    }

    #[test]
    fn count_overflow_is_detected() {
        let dom = PrivDomain::new((1..=64).map(|i| -i).collect(), (0..=3).collect());
        assert_eq!(dom.assignment_count(), None);
    }
}
