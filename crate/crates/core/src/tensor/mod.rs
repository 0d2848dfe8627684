//! Minimal reverse-mode automatic differentiation engine.
//!
//! A [`Tensor`] owns its values and, when produced by an operation, a
//! record of its parents plus a closure that propagates the output
//! gradient to them. Calling [`Tensor::backward`] on a scalar walks the
//! graph in reverse creation order and accumulates `d loss / d parameter`
//! into every tensor that requires a gradient.
//!
//! Graph recording can be switched off for inference via [`no_grad`].

mod ops;

pub use ops::{batchnorm2d, conv2d, global_avg_pool, max_pool2, relu, softmax_rows, BnBatchStats};

use std::cell::{Cell, Ref, RefCell};
use std::rc::Rc;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::Scalar;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TensorError {
    #[error("backward requires a scalar, got shape {0:?}")]
    NonScalarBackward(Vec<usize>),
    #[error("backward already ran on this tensor; reset gradients first")]
    BackwardTwice,
}

static NEXT_ID: AtomicUsize = AtomicUsize::new(0);

thread_local! {
    static GRAD_ENABLED: Cell<bool> = const { Cell::new(true) };
}

/// Runs `f` without recording the differentiation graph.
pub fn no_grad<R>(f: impl FnOnce() -> R) -> R {
    GRAD_ENABLED.with(|g| {
        let prev = g.get();
        g.set(false);
        let out = f();
        g.set(prev);
        out
    })
}

pub fn grad_enabled() -> bool {
    GRAD_ENABLED.with(|g| g.get())
}

type BackwardFn<S> = Box<dyn Fn(&[S])>;

struct TensorInner<S: Scalar> {
    id: usize,
    shape: Vec<usize>,
    data: RefCell<Vec<S>>,
    grad: RefCell<Option<Vec<S>>>,
    requires_grad: bool,
    parents: Vec<Tensor<S>>,
    backward: Option<BackwardFn<S>>,
    backward_ran: Cell<bool>,
}

/// An n-dimensional array participating in the differentiation graph.
/// Cloning is cheap: clones share the same storage and graph node.
#[derive(Clone)]
pub struct Tensor<S: Scalar> {
    inner: Rc<TensorInner<S>>,
}

impl<S: Scalar> std::fmt::Debug for Tensor<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Tensor")
            .field("shape", &self.inner.shape)
            .field("requires_grad", &self.inner.requires_grad)
            .finish()
    }
}

impl<S: Scalar> Tensor<S> {
    fn make(
        data: Vec<S>,
        shape: Vec<usize>,
        requires_grad: bool,
        parents: Vec<Tensor<S>>,
        backward: Option<BackwardFn<S>>,
    ) -> Self {
        assert_eq!(
            data.len(),
            shape.iter().product::<usize>(),
            "data length must match shape"
        );
        Tensor {
            inner: Rc::new(TensorInner {
                id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
                shape,
                data: RefCell::new(data),
                grad: RefCell::new(None),
                requires_grad,
                parents,
                backward,
                backward_ran: Cell::new(false),
            }),
        }
    }

    /// Constant leaf; no gradient is tracked.
    pub fn from_vec(data: Vec<S>, shape: &[usize]) -> Self {
        Self::make(data, shape.to_vec(), false, Vec::new(), None)
    }

    /// Trainable leaf; gradients accumulate here.
    pub fn param(data: Vec<S>, shape: &[usize]) -> Self {
        Self::make(data, shape.to_vec(), true, Vec::new(), None)
    }

    pub fn zeros(shape: &[usize]) -> Self {
        Self::from_vec(vec![S::zero(); shape.iter().product()], shape)
    }

    pub fn scalar(v: S) -> Self {
        Self::from_vec(vec![v], &[])
    }

    /// Output of an operation. When grad recording is off or no parent
    /// needs gradients, the result degenerates to a constant leaf.
    pub fn from_op(
        data: Vec<S>,
        shape: &[usize],
        parents: Vec<Tensor<S>>,
        backward: impl Fn(&[S]) + 'static,
    ) -> Self {
        let track = grad_enabled() && parents.iter().any(|p| p.requires_grad());
        if track {
            Self::make(
                data,
                shape.to_vec(),
                true,
                parents,
                Some(Box::new(backward)),
            )
        } else {
            Self::from_vec(data, shape)
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.inner.shape
    }

    pub fn len(&self) -> usize {
        self.inner.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn requires_grad(&self) -> bool {
        self.inner.requires_grad
    }

    pub fn data(&self) -> Ref<'_, Vec<S>> {
        self.inner.data.borrow()
    }

    /// Direct mutation of the values; only sensible for leaves (the
    /// optimizer updates parameters this way).
    pub fn set_data(&self, f: impl FnOnce(&mut Vec<S>)) {
        f(&mut self.inner.data.borrow_mut());
    }

    pub fn item(&self) -> S {
        assert_eq!(self.len(), 1, "item() requires a single-element tensor");
        self.inner.data.borrow()[0]
    }

    pub fn grad(&self) -> Option<Vec<S>> {
        self.inner.grad.borrow().clone()
    }

    pub fn zero_grad(&self) {
        *self.inner.grad.borrow_mut() = None;
        self.inner.backward_ran.set(false);
    }

    /// Adds a gradient contribution, allocating the buffer on first use.
    pub fn accumulate_grad(&self, contribution: &[S]) {
        if !self.inner.requires_grad {
            return;
        }
        let mut slot = self.inner.grad.borrow_mut();
        match slot.as_mut() {
            Some(g) => {
                for (gi, &c) in g.iter_mut().zip(contribution) {
                    *gi += c;
                }
            }
            None => *slot = Some(contribution.to_vec()),
        }
    }

    /// Backpropagates from this scalar through the recorded graph.
    pub fn backward(&self) -> Result<(), TensorError> {
        if self.len() != 1 {
            return Err(TensorError::NonScalarBackward(self.inner.shape.clone()));
        }
        if self.inner.backward_ran.get() {
            return Err(TensorError::BackwardTwice);
        }
        self.inner.backward_ran.set(true);

        // topological order via depth-first search, then replay newest-first
        let mut order: Vec<Tensor<S>> = Vec::new();
        let mut visited: std::collections::HashSet<usize> = std::collections::HashSet::new();
        let mut stack: Vec<(Tensor<S>, bool)> = vec![(self.clone(), false)];
        while let Some((node, expanded)) = stack.pop() {
            if expanded {
                order.push(node);
                continue;
            }
            if !visited.insert(node.inner.id) {
                continue;
            }
            stack.push((node.clone(), true));
            for p in &node.inner.parents {
                if !visited.contains(&p.inner.id) {
                    stack.push((p.clone(), false));
                }
            }
        }

        self.accumulate_grad(&[S::one()]);
        for node in order.iter().rev() {
            if let Some(backward) = &node.inner.backward {
                let grad = node.inner.grad.borrow().clone();
                if let Some(g) = grad {
                    backward(&g);
                }
            }
        }
        Ok(())
    }

    // ---- elementwise and linear-algebra operations ----

    pub fn add(&self, other: &Tensor<S>) -> Tensor<S> {
        assert_eq!(self.shape(), other.shape(), "add: shape mismatch");
        let data: Vec<S> = self
            .data()
            .iter()
            .zip(other.data().iter())
            .map(|(&a, &b)| a + b)
            .collect();
        let (pa, pb) = (self.clone(), other.clone());
        Tensor::from_op(
            data,
            self.shape(),
            vec![self.clone(), other.clone()],
            move |g| {
                pa.accumulate_grad(g);
                pb.accumulate_grad(g);
            },
        )
    }

    pub fn mul(&self, other: &Tensor<S>) -> Tensor<S> {
        assert_eq!(self.shape(), other.shape(), "mul: shape mismatch");
        let data: Vec<S> = self
            .data()
            .iter()
            .zip(other.data().iter())
            .map(|(&a, &b)| a * b)
            .collect();
        let (pa, pb) = (self.clone(), other.clone());
        let (da, db) = (self.data().clone(), other.data().clone());
        Tensor::from_op(
            data,
            self.shape(),
            vec![self.clone(), other.clone()],
            move |g| {
                let ga: Vec<S> = g.iter().zip(&db).map(|(&go, &b)| go * b).collect();
                let gb: Vec<S> = g.iter().zip(&da).map(|(&go, &a)| go * a).collect();
                pa.accumulate_grad(&ga);
                pb.accumulate_grad(&gb);
            },
        )
    }

    pub fn scale(&self, c: S) -> Tensor<S> {
        let data: Vec<S> = self.data().iter().map(|&a| a * c).collect();
        let pa = self.clone();
        Tensor::from_op(data, self.shape(), vec![self.clone()], move |g| {
            let ga: Vec<S> = g.iter().map(|&go| go * c).collect();
            pa.accumulate_grad(&ga);
        })
    }

    pub fn sum(&self) -> Tensor<S> {
        let total: S = self.data().iter().copied().sum();
        let pa = self.clone();
        let n = self.len();
        Tensor::from_op(vec![total], &[], vec![self.clone()], move |g| {
            pa.accumulate_grad(&vec![g[0]; n]);
        })
    }

    pub fn mean(&self) -> Tensor<S> {
        let inv = S::one() / S::from_f64_c(self.len() as f64);
        self.sum().scale(inv)
    }

    /// `[B, I] x [I, O] -> [B, O]`
    pub fn matmul(&self, w: &Tensor<S>) -> Tensor<S> {
        let (b, i) = (self.shape()[0], self.shape()[1]);
        let (wi, o) = (w.shape()[0], w.shape()[1]);
        assert_eq!(i, wi, "matmul: inner dimensions differ");
        let a = self.data();
        let wd = w.data();
        let mut out = vec![S::zero(); b * o];
        for bi in 0..b {
            for ii in 0..i {
                let av = a[bi * i + ii];
                for oi in 0..o {
                    out[bi * o + oi] += av * wd[ii * o + oi];
                }
            }
        }
        let (pa, pw) = (self.clone(), w.clone());
        let (a_saved, w_saved) = (a.clone(), wd.clone());
        drop(a);
        drop(wd);
        Tensor::from_op(
            out,
            &[b, o],
            vec![self.clone(), w.clone()],
            move |g| {
                let mut ga = vec![S::zero(); b * i];
                let mut gw = vec![S::zero(); i * o];
                for bi in 0..b {
                    for ii in 0..i {
                        let mut acc = S::zero();
                        for oi in 0..o {
                            let go = g[bi * o + oi];
                            acc += go * w_saved[ii * o + oi];
                            gw[ii * o + oi] += a_saved[bi * i + ii] * go;
                        }
                        ga[bi * i + ii] = acc;
                    }
                }
                pa.accumulate_grad(&ga);
                pw.accumulate_grad(&gw);
            },
        )
    }

    /// Adds a per-column bias to a `[B, O]` tensor.
    pub fn add_row_bias(&self, bias: &Tensor<S>) -> Tensor<S> {
        let (b, o) = (self.shape()[0], self.shape()[1]);
        assert_eq!(bias.shape(), &[o], "bias length must match columns");
        let bd = bias.data();
        let data: Vec<S> = self
            .data()
            .iter()
            .enumerate()
            .map(|(idx, &v)| v + bd[idx % o])
            .collect();
        drop(bd);
        let (pa, pb) = (self.clone(), bias.clone());
        Tensor::from_op(
            data,
            self.shape(),
            vec![self.clone(), bias.clone()],
            move |g| {
                pa.accumulate_grad(g);
                let mut gb = vec![S::zero(); o];
                for bi in 0..b {
                    for oi in 0..o {
                        gb[oi] += g[bi * o + oi];
                    }
                }
                pb.accumulate_grad(&gb);
            },
        )
    }
}

#[cfg(test)]
mod tests;
