//! Operation counters for pairings and exponentiations.
//!
//! Counting is scoped: nothing is recorded unless a counter scope is
//! active on the current thread, so production paths only pay a
//! thread-local emptiness check. Scopes nest; an increment is applied to
//! every frame on the stack, so an outer scope sees the totals of its
//! inner scopes.

use std::cell::RefCell;

use thiserror::Error;

/// Per-scope operation counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounters {
    pub pairings: u64,
    pub exp_g1: u64,
    pub exp_g2: u64,
    pub exp_gt: u64,
}

impl OpCounters {
    pub fn total_exps(&self) -> u64 {
        self.exp_g1 + self.exp_g2 + self.exp_gt
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CounterError {
    #[error("counter scope `{0}` is already active on this thread")]
    DuplicateLabel(String),
}

struct Frame {
    label: String,
    counts: OpCounters,
}

thread_local! {
    static STACK: RefCell<Vec<Frame>> = const { RefCell::new(Vec::new()) };
}

#[inline]
fn bump(apply: impl Fn(&mut OpCounters)) {
    STACK.with(|stack| {
        let mut stack = stack.borrow_mut();
        if stack.is_empty() {
            return;
        }
        for frame in stack.iter_mut() {
            apply(&mut frame.counts);
        }
    });
}

#[inline]
pub(crate) fn record_pairings(n: u64) {
    bump(|c| c.pairings += n);
}

#[inline]
pub(crate) fn record_exp_g1() {
    bump(|c| c.exp_g1 += 1);
}

#[inline]
pub(crate) fn record_exp_g2() {
    bump(|c| c.exp_g2 += 1);
}

#[inline]
pub(crate) fn record_exp_gt() {
    bump(|c| c.exp_gt += 1);
}

/// Runs `f` inside a named counter scope and returns its result together
/// with the operations recorded while it ran.
pub fn counted<T>(label: &str, f: impl FnOnce() -> T) -> Result<(T, OpCounters), CounterError> {
    STACK.with(|stack| {
        let mut stack = stack.borrow_mut();
        if stack.iter().any(|fr| fr.label == label) {
            return Err(CounterError::DuplicateLabel(label.to_string()));
        }
        stack.push(Frame {
            label: label.to_string(),
            counts: OpCounters::default(),
        });
        Ok(())
    })?;
    let out = f();
    let counts = STACK.with(|stack| stack.borrow_mut().pop().expect("scope frame present").counts);
    Ok((out, counts))
}
