//! Bijection from a pair of injections by chasing preimage chains.
//!
//! For `x`, walk backwards `x <- g(y) <- f(x') <- ...`. A chain that stops
//! at a point of `Y` without an `f`-preimage sends `x` to `g^-1(x)`; every
//! other chain (stopping in `X`, or cyclic) sends `x` to `f(x)`. Chains
//! longer than the step budget are reported as undecided.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CbError<X: Debug, Y: Debug> {
    #[error("carriers differ in size ({x} vs {y}); no pair of injections exists")]
    SizeMismatch { x: usize, y: usize },
    #[error("f maps {0:?} outside Y")]
    ForwardOutOfRange(X),
    #[error("g maps {0:?} outside X")]
    BackwardOutOfRange(Y),
    #[error("f is not injective: {0:?} and {1:?} collide")]
    ForwardCollision(X, X),
    #[error("g is not injective: {0:?} and {1:?} collide")]
    BackwardCollision(Y, Y),
    #[error("chain undecided after {steps} steps")]
    ChainUndecided { steps: usize },
}

/// Where `x` goes under the combined bijection, given preimage oracles.
/// Gives up after `budget` backward steps.
pub fn chase<X, Y, E>(
    x: &X,
    f: impl Fn(&X) -> Y,
    f_inv: impl Fn(&Y) -> Option<X>,
    g_inv: impl Fn(&X) -> Option<Y>,
    budget: usize,
) -> Result<Y, CbError<X, E>>
where
    X: Clone + PartialEq + Debug,
    E: Debug,
{
    let mut cur = x.clone();
    for _ in 0..budget {
        let Some(y) = g_inv(&cur) else {
            return Ok(f(x));
        };
        let Some(prev) = f_inv(&y) else {
            return Ok(g_inv(x).expect("chain starts with a g-preimage"));
        };
        if prev == *x {
            return Ok(f(x));
        }
        cur = prev;
    }
    Err(CbError::ChainUndecided { steps: budget })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bijection<X: Hash + Eq, Y: Hash + Eq> {
    pub forward: HashMap<X, Y>,
    pub backward: HashMap<Y, X>,
}

/// Bijection between finite carriers from injections `f: X -> Y` and
/// `g: Y -> X`.
pub fn cantor_bernstein<X, Y>(
    xs: &[X],
    ys: &[Y],
    f: impl Fn(&X) -> Y,
    g: impl Fn(&Y) -> X,
) -> Result<Bijection<X, Y>, CbError<X, Y>>
where
    X: Clone + Hash + Eq + Debug,
    Y: Clone + Hash + Eq + Debug,
{
    if xs.len() != ys.len() {
        return Err(CbError::SizeMismatch {
            x: xs.len(),
            y: ys.len(),
        });
    }
    let x_set: HashMap<&X, ()> = xs.iter().map(|x| (x, ())).collect();
    let y_set: HashMap<&Y, ()> = ys.iter().map(|y| (y, ())).collect();

    let mut f_inv: HashMap<Y, X> = HashMap::new();
    for x in xs {
        let y = f(x);
        if !y_set.contains_key(&y) {
            return Err(CbError::ForwardOutOfRange(x.clone()));
        }
        if let Some(other) = f_inv.insert(y, x.clone()) {
            return Err(CbError::ForwardCollision(other, x.clone()));
        }
    }
    let mut g_inv: HashMap<X, Y> = HashMap::new();
    for y in ys {
        let x = g(y);
        if !x_set.contains_key(&x) {
            return Err(CbError::BackwardOutOfRange(y.clone()));
        }
        if let Some(other) = g_inv.insert(x, y.clone()) {
            return Err(CbError::BackwardCollision(other, y.clone()));
        }
    }

    let budget = 2 * xs.len() + 2;
    let mut forward = HashMap::with_capacity(xs.len());
    let mut backward = HashMap::with_capacity(xs.len());
    for x in xs {
        let y = chase::<X, Y, Y>(
            x,
            &f,
            |y| f_inv.get(y).cloned(),
            |x| g_inv.get(x).cloned(),
            budget,
        )?;
        backward.insert(y.clone(), x.clone());
        forward.insert(x.clone(), y);
    }
    Ok(Bijection { forward, backward })
}
