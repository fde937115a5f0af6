//! Tainted heaps.
//!
//! Addresses are signed: non-negative addresses form the public heap,
//! negative addresses the private heap. Undeclared cells read as `0`,
//! tainted `S` on the public side and `U` on the private side.

use crate::ast::HeapDecl;
use crate::Taint;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Heap {
    cells: BTreeMap<i64, (u64, Taint)>,
}

impl Heap {
    pub fn new() -> Heap {
        Heap::default()
    }

    pub fn from_decls<'a>(decls: impl IntoIterator<Item = &'a HeapDecl>) -> Heap {
        let mut heap = Heap::new();
        for d in decls {
            heap.set(d.addr, d.value, d.taint);
        }
        heap
    }

    /// Default contents of an undeclared cell.
    pub fn default_cell(addr: i64) -> (u64, Taint) {
        if addr >= 0 {
            (0, Taint::S)
        } else {
            (0, Taint::U)
        }
    }

    pub fn get(&self, addr: i64) -> (u64, Taint) {
        self.cells
            .get(&addr)
            .copied()
            .unwrap_or_else(|| Heap::default_cell(addr))
    }

    pub fn set(&mut self, addr: i64, value: u64, taint: Taint) {
        self.cells.insert(addr, (value, taint));
    }

    /// Explicitly stored cells in ascending address order.
    pub fn entries(&self) -> impl Iterator<Item = (i64, u64, Taint)> + '_ {
        self.cells.iter().map(|(&a, &(v, t))| (a, v, t))
    }

    /// Explicitly stored private (negative-address) cells.
    pub fn private_entries(&self) -> impl Iterator<Item = (i64, u64, Taint)> + '_ {
        self.entries().filter(|&(a, _, _)| a < 0)
    }

    /// Explicitly stored public (non-negative-address) cells.
    pub fn public_entries(&self) -> impl Iterator<Item = (i64, u64, Taint)> + '_ {
        self.entries().filter(|&(a, _, _)| a >= 0)
    }
}
