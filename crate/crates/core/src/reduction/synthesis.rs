//! Transformation-based synthesis of reversible functions into
//! multi-controlled NOT gates.
//!
//! Basis values are visited in ascending order. For value `i`, gates are
//! appended on the output side until the function maps `i` to itself:
//! first the bits set in `i` but clear in the current image are raised
//! (controlled on the image's set bits), then the extra bits of the image
//! are cleared (controlled on `i`'s set bits). Neither step disturbs a value
//! below `i`. The collected gates, reversed, realize the function.

use crate::ir::{Circuit, Control, Gate};

use super::ReductionError;

/// Applies a positive multi-controlled NOT to the output side of `f`,
/// keeping `inv` as its inverse.
fn apply_output_gate(f: &mut [usize], inv: &mut [usize], controls: usize, target: usize) {
    let tbit = 1usize << target;
    let full = f.len() - 1;
    let rest = full & !controls & !tbit;
    // every y ⊇ controls with the target bit clear, via submask enumeration of `rest`
    let mut sub = rest;
    loop {
        let y = controls | sub;
        let z = y | tbit;
        let (a, b) = (inv[y], inv[z]);
        inv[y] = b;
        inv[z] = a;
        f[a] = z;
        f[b] = y;
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & rest;
    }
}

fn gate(controls: usize, target: usize) -> Gate {
    let mut g = Gate::x(target);
    let mut rest = controls;
    while rest != 0 {
        let q = rest.trailing_zeros() as usize;
        g = g.with_control(Control::pos(q));
        rest &= rest - 1;
    }
    g
}

/// Builds an m-qubit circuit whose action on basis state `v` is
/// `perm[v]`. The table length must be a power of two.
pub fn synthesize_from_permutation(perm: &[usize]) -> Result<Circuit, ReductionError> {
    let len = perm.len();
    if !len.is_power_of_two() {
        return Err(ReductionError::NotAPermutation(format!(
            "table length {len} is not a power of two"
        )));
    }
    let m = len.trailing_zeros() as usize;
    let mut inv = vec![usize::MAX; len];
    for (x, &y) in perm.iter().enumerate() {
        if y >= len {
            return Err(ReductionError::NotAPermutation(format!(
                "image {y} of {x} is out of range"
            )));
        }
        if inv[y] != usize::MAX {
            return Err(ReductionError::NotAPermutation(format!(
                "{y} is the image of both {} and {x}",
                inv[y]
            )));
        }
        inv[y] = x;
    }
    let mut f = perm.to_vec();
    let mut collected = Vec::new();
    for i in 0..len {
        let mut p = f[i];
        if p == i {
            continue;
        }
        let raise = i & !p;
        for j in (0..m).filter(|j| raise >> j & 1 == 1) {
            apply_output_gate(&mut f, &mut inv, p, j);
            collected.push((p, j));
            p |= 1 << j;
        }
        let lower = p & !i;
        for j in (0..m).filter(|j| lower >> j & 1 == 1) {
            apply_output_gate(&mut f, &mut inv, i, j);
            collected.push((i, j));
        }
        debug_assert_eq!(f[i], i);
    }
    let mut c = Circuit::anonymous(m);
    for (controls, target) in collected.into_iter().rev() {
        c.push(gate(controls, target));
    }
    Ok(c)
}
