//! The negative-sampling objective for one training example.
//!
//! For a center row `v`, a context row `u_0` and noise rows `u_1..u_k`:
//!
//! ```text
//! L = -ln σ(u_0·v) - Σ_n ln σ(-u_n·v)
//! ∂L/∂v   = Σ_t g_t u_t        with g_0 = σ(u_0·v) - 1, g_n = σ(u_n·v)
//! ∂L/∂u_t = g_t v
//! ```
//!
//! Everything is evaluated at the pre-update values, so repeated noise
//! rows simply accumulate their gradients.

use num_traits::Float;

fn sigmoid<F: Float>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

/// ln σ(x), stable for large |x|.
fn ln_sigmoid<F: Float>(x: F) -> F {
    if x >= F::zero() {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

fn dot<F: Float>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Core of the objective over flat buffers.
///
/// `targets` holds `coeffs.len()` rows of `center.len()` values, context
/// first. Fills `coeffs` with the `g_t` and `grad_center` with ∂L/∂v, and
/// returns the loss.
pub(crate) fn neg_terms<F: Float>(
    center: &[F],
    targets: &[F],
    coeffs: &mut [F],
    grad_center: &mut [F],
) -> F {
    let dim = center.len();
    debug_assert_eq!(targets.len(), coeffs.len() * dim);
    debug_assert_eq!(grad_center.len(), dim);
    grad_center.iter_mut().for_each(|g| *g = F::zero());
    let mut loss = F::zero();
    for (t, (row, g)) in targets.chunks_exact(dim).zip(coeffs.iter_mut()).enumerate() {
        let score = dot(row, center);
        if t == 0 {
            loss = loss - ln_sigmoid(score);
            *g = sigmoid(score) - F::one();
        } else {
            loss = loss - ln_sigmoid(-score);
            *g = sigmoid(score);
        }
        for (acc, &u) in grad_center.iter_mut().zip(row) {
            *acc = *acc + *g * u;
        }
    }
    loss
}

/// Loss and exact gradients for one example.
#[derive(Clone, Debug, PartialEq)]
pub struct NegGradient<F> {
    pub loss: F,
    /// ∂L/∂v for the center row.
    pub center: Vec<F>,
    /// ∂L/∂u_t, context first.
    pub targets: Vec<Vec<F>>,
}

/// Evaluates the objective; `targets[0]` is the context row and the rest
/// are noise rows. All rows must have the length of `center`.
pub fn neg_gradient<F: Float>(center: &[F], targets: &[&[F]]) -> NegGradient<F> {
    let dim = center.len();
    let flat: Vec<F> = targets
        .iter()
        .flat_map(|row| {
            assert_eq!(row.len(), dim, "row length mismatch");
            row.iter().copied()
        })
        .collect();
    let mut coeffs = vec![F::zero(); targets.len()];
    let mut grad_center = vec![F::zero(); dim];
    let loss = neg_terms(center, &flat, &mut coeffs, &mut grad_center);
    let targets = coeffs
        .iter()
        .map(|&g| center.iter().map(|&v| g * v).collect())
        .collect();
    NegGradient {
        loss,
        center: grad_center,
        targets,
    }
}
