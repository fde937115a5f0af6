//! Executable trace-based security checks.
//!
//! Two properties over one program or pairs of low-equivalent programs:
//!
//! - *Speculative safety* ([`check_ss_trace`], [`check_ss_program`]): the
//!   trace contains only `S`-labelled actions. A sound, easily checkable
//!   over-approximation — one run decides it.
//! - *Non-interference* ([`check_sni_pair`], [`check_sni_bounded`]): the
//!   trace may depend on private values only as much as its
//!   non-speculative projection already does. The bounded check finitizes
//!   the quantification over private heaps by enumerating a [`PrivDomain`].
//!
//! Both come in robust variants quantified over a supplied attacker set
//! ([`check_robust`]); full attacker quantification is undecidable, so
//! callers supply attackers or synthesize simple ones ([`synth_attackers`]).
//!
//! Enumeration is embarrassingly parallel: with the default `parallel`
//! feature the bounded checks fan out over a thread pool while keeping
//! verdicts bit-identical to the sequential scan (witnesses are settled by
//! assignment index, not completion order). The `*_seq`/`*_par` pairs stay
//! individually callable for benchmarking.

mod domain;
mod loweq;
mod robust;
mod sni;
mod ss;
mod synth;
mod verdict;

pub use domain::{base_with_domain, format_assignment, with_private_values, PrivDomain};
pub use loweq::low_equivalent;
#[cfg(feature = "parallel")]
pub use robust::check_robust_detailed_par;
pub use robust::{
    check_robust, check_robust_detailed, check_robust_detailed_seq, AttackerVerdict, RobustError,
    RobustProperty,
};
#[cfg(feature = "parallel")]
pub use sni::check_sni_bounded_par;
pub use sni::{
    check_sni_bounded, check_sni_bounded_seq, check_sni_pair, SniBoundedError, SniError,
    ENUMERATION_CAP,
};
pub use ss::{check_ss_program, check_ss_trace, run_with, Semantics};
pub use synth::synth_attackers;
pub use verdict::{Status, Verdict, Witness};
