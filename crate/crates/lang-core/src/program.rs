//! Components, attackers, whole programs, and linking.

use crate::ast::{FnDef, HeapDecl, Ident, Stmt};
use crate::heap::Heap;
use crate::Taint;
use std::collections::BTreeSet;

/// Pseudo function name for the machine's entry frame. Contains characters
/// no parsed identifier can contain, so it never collides with program
/// functions. The entry frame counts as attacker-side code.
pub const ENTRY_SENTINEL: &str = "<entry>";

/// The protected code: private heap declarations, imports it may call on
/// the attacker, and its function definitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub privates: Vec<HeapDecl>,
    pub imports: Vec<Ident>,
    pub fns: Vec<FnDef>,
}

/// The context/attacker: public heap declarations and function definitions,
/// one of which must be `main`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attacker {
    pub publics: Vec<HeapDecl>,
    pub fns: Vec<FnDef>,
}

/// A linked program. Build one with [`plug`] (validating) or
/// [`WholeProgram::new`] (unchecked; validate via [`WholeProgram::validate`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WholeProgram {
    pub attacker: Attacker,
    pub component: Component,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidityError {
    #[error("duplicate heap address {0}")]
    DuplicateHeapAddr(i64),
    #[error("heap address {addr} not allowed here: {reason}")]
    HeapAddrOutOfRange { addr: i64, reason: String },
    #[error("public heap entry at {0} must be tainted S")]
    PublicEntryNotSafe(i64),
    #[error("duplicate function name {0:?}")]
    DuplicateFn(String),
    #[error("attacker function {0:?} uses the private heap (readp/writep)")]
    AttackerTouchesPrivateHeap(String),
    #[error("attacker does not define main")]
    NoMain,
    #[error("duplicate import {0:?}")]
    DuplicateImport(String),
    #[error("import {0:?} collides with a component function of the same name")]
    ImportShadowsFn(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlugError {
    #[error("invalid attacker: {0}")]
    InvalidAttacker(ValidityError),
    #[error("invalid component: {0}")]
    InvalidComponent(ValidityError),
    #[error("not a whole program: {0}")]
    NotWhole(String),
    #[error("attacker and component both declare heap address {0}")]
    HeapOverlap(i64),
}

impl Component {
    pub fn fn_names(&self) -> BTreeSet<Ident> {
        self.fns.iter().map(|f| f.name.clone()).collect()
    }

    pub fn lookup_fn(&self, name: &str) -> Option<&FnDef> {
        self.fns.iter().find(|f| f.name == name)
    }

    pub fn validate(&self) -> Result<(), ValidityError> {
        let mut addrs = BTreeSet::new();
        for d in &self.privates {
            if d.addr >= 0 {
                return Err(ValidityError::HeapAddrOutOfRange {
                    addr: d.addr,
                    reason: "component heap declarations must be private (negative)".into(),
                });
            }
            if !addrs.insert(d.addr) {
                return Err(ValidityError::DuplicateHeapAddr(d.addr));
            }
        }
        let mut names = BTreeSet::new();
        for f in &self.fns {
            if !names.insert(f.name.clone()) {
                return Err(ValidityError::DuplicateFn(f.name.clone()));
            }
        }
        let mut imports = BTreeSet::new();
        for i in &self.imports {
            if !imports.insert(i.clone()) {
                return Err(ValidityError::DuplicateImport(i.clone()));
            }
            if names.contains(i) {
                return Err(ValidityError::ImportShadowsFn(i.clone()));
            }
        }
        Ok(())
    }
}

impl Attacker {
    pub fn fn_names(&self) -> BTreeSet<Ident> {
        self.fns.iter().map(|f| f.name.clone()).collect()
    }

    pub fn lookup_fn(&self, name: &str) -> Option<&FnDef> {
        self.fns.iter().find(|f| f.name == name)
    }

    pub fn validate(&self) -> Result<(), ValidityError> {
        let mut addrs = BTreeSet::new();
        for d in &self.publics {
            if d.addr < 0 {
                return Err(ValidityError::HeapAddrOutOfRange {
                    addr: d.addr,
                    reason: "attacker heap declarations must be public (non-negative)".into(),
                });
            }
            if d.taint != Taint::S {
                return Err(ValidityError::PublicEntryNotSafe(d.addr));
            }
            if !addrs.insert(d.addr) {
                return Err(ValidityError::DuplicateHeapAddr(d.addr));
            }
        }
        let mut names = BTreeSet::new();
        for f in &self.fns {
            if !names.insert(f.name.clone()) {
                return Err(ValidityError::DuplicateFn(f.name.clone()));
            }
            if f.body.mentions_private_heap() {
                return Err(ValidityError::AttackerTouchesPrivateHeap(f.name.clone()));
            }
        }
        if !names.contains("main") {
            return Err(ValidityError::NoMain);
        }
        Ok(())
    }
}

/// Whether `a` is a valid attacker: public heap only, no private-heap
/// accesses in any body, and a `main` function.
pub fn is_valid_attacker(a: &Attacker) -> bool {
    a.validate().is_ok()
}

impl WholeProgram {
    pub fn new(attacker: Attacker, component: Component) -> WholeProgram {
        WholeProgram {
            attacker,
            component,
        }
    }

    /// Re-run the linking checks (useful for programs parsed from a single
    /// whole-program file, which are constructed unchecked).
    pub fn validate(&self) -> Result<(), PlugError> {
        plug_checks(&self.attacker, &self.component)
    }

    /// The initial heap: attacker public declarations plus component
    /// private declarations.
    pub fn initial_heap(&self) -> Heap {
        Heap::from_decls(self.attacker.publics.iter().chain(&self.component.privates))
    }

    /// Whether `name` runs attacker-side (attacker functions and the entry
    /// sentinel) as opposed to component-side.
    pub fn is_attacker_side(&self, name: &str) -> bool {
        name == ENTRY_SENTINEL || self.attacker.fns.iter().any(|f| f.name == name)
    }

    pub fn lookup_fn(&self, name: &str) -> Option<&FnDef> {
        self.attacker
            .lookup_fn(name)
            .or_else(|| self.component.lookup_fn(name))
    }
}

fn plug_checks(attacker: &Attacker, component: &Component) -> Result<(), PlugError> {
    attacker.validate().map_err(PlugError::InvalidAttacker)?;
    component.validate().map_err(PlugError::InvalidComponent)?;

    let attacker_fns = attacker.fn_names();
    let component_fns = component.fn_names();
    if let Some(clash) = attacker_fns.intersection(&component_fns).next() {
        return Err(PlugError::NotWhole(format!(
            "function {clash:?} is defined by both attacker and component"
        )));
    }
    for import in &component.imports {
        if !attacker_fns.contains(import) {
            return Err(PlugError::NotWhole(format!(
                "component import {import:?} is not defined by the attacker"
            )));
        }
    }
    let mut addrs = BTreeSet::new();
    for d in attacker.publics.iter().chain(&component.privates) {
        if !addrs.insert(d.addr) {
            return Err(PlugError::HeapOverlap(d.addr));
        }
    }
    Ok(())
}

/// Link an attacker around a component, checking attacker validity,
/// component validity, import satisfaction, function-name disjointness,
/// and heap disjointness.
pub fn plug(attacker: Attacker, component: Component) -> Result<WholeProgram, PlugError> {
    plug_checks(&attacker, &component)?;
    Ok(WholeProgram {
        attacker,
        component,
    })
}

/// The initial statement executed by the entry frame: call `main` with the
/// entry binding, then stop.
pub fn entry_stmt() -> Stmt {
    Stmt::seq(
        Stmt::Call("main".into(), crate::ast::Expr::var(ENTRY_PARAM)),
        Stmt::Skip,
    )
}

/// Name of the single binding in the entry frame (value `0`, taint `S`).
pub const ENTRY_PARAM: &str = "x";
