//! Reference circuits: Cuccaro ripple-carry adders and constant-increment
//! kernels, plus the golden `.fqt` fixtures they are checked against.

use thiserror::Error;

use crate::ir::{interleave, ladder, Circuit, Control, Gate, IrError, QubitRef};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LibraryError {
    #[error("operands must be distinct, {0} appears twice")]
    DuplicateOperand(QubitRef),
    #[error("width must be at least 1")]
    ZeroWidth,
    #[error("increment {k} does not fit in {width} bits")]
    KOutOfRange { k: u64, width: usize },
    #[error(transparent)]
    Ir(#[from] IrError),
}

fn distinct(x: &QubitRef, y: &QubitRef, z: &QubitRef) -> Result<(), LibraryError> {
    if x == y || x == z {
        return Err(LibraryError::DuplicateOperand(x.clone()));
    }
    if y == z {
        return Err(LibraryError::DuplicateOperand(y.clone()));
    }
    Ok(())
}

/// Majority block: `CX(z→y) CX(z→x) CCX(x,y→z)`.
pub fn maj(x: &QubitRef, y: &QubitRef, z: &QubitRef) -> Result<Circuit, LibraryError> {
    distinct(x, y, z)?;
    Ok(Circuit::from_gates(vec![
        Gate::cx(z.clone(), y.clone()),
        Gate::cx(z.clone(), x.clone()),
        Gate::ccx(x.clone(), y.clone(), z.clone()),
    ]))
}

/// Un-majority block: `CCX(x,y→z) CX(z→x) CX(x→y)`.
pub fn unmaj(x: &QubitRef, y: &QubitRef, z: &QubitRef) -> Result<Circuit, LibraryError> {
    distinct(x, y, z)?;
    Ok(Circuit::from_gates(vec![
        Gate::ccx(x.clone(), y.clone(), z.clone()),
        Gate::cx(z.clone(), x.clone()),
        Gate::cx(x.clone(), y.clone()),
    ]))
}

fn window<F>(f: F) -> impl FnMut(&[QubitRef]) -> Result<Circuit, LibraryError>
where
    F: Fn(&QubitRef, &QubitRef, &QubitRef) -> Result<Circuit, LibraryError>,
{
    move |w| f(&w[0], &w[1], &w[2])
}

/// Ripple-carry adder fragment: `in2 := in1 + in2`, carry-out into `z`,
/// `in1` and `c` restored.
pub fn full_add(
    in1: &[QubitRef],
    in2: &[QubitRef],
    c: &QubitRef,
    z: &QubitRef,
) -> Result<Circuit, LibraryError> {
    if in1.is_empty() {
        return Err(LibraryError::ZeroWidth);
    }
    let mut combined = vec![c.clone()];
    combined.extend(interleave(in2, in1)?);
    let mut out = ladder(2, 3, &combined, false, window(maj))?;
    out.push(Gate::cx(in1[in1.len() - 1].clone(), z.clone()));
    out.extend(&ladder(2, 3, &combined, true, window(unmaj))?)?;
    Ok(out)
}

/// `full_add` over registers `a(w) b(w) c(1) z(1)`.
pub fn cuccaro_full_adder(width: usize) -> Result<Circuit, LibraryError> {
    if width == 0 {
        return Err(LibraryError::ZeroWidth);
    }
    let mut c = Circuit::new();
    let a = c.add_register("a", width)?;
    let b = c.add_register("b", width)?;
    let cin = c.add_register("c", 1)?;
    let z = c.add_register("z", 1)?;
    c.extend(&full_add(&a, &b, &cin[0], &z[0])?)?;
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AdderLayout {
    /// One register `q(2w+1)` in ripple order: `c, b0, a0, b1, a1, ...`.
    Interleaved,
    /// Registers `a(w) b(w) c(1)`.
    ARegisterFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AdderSpec {
    pub width: usize,
    pub layout: AdderLayout,
}

/// Flat indices of a modulo adder's operands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdderQubits {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub c: usize,
}

impl AdderQubits {
    pub fn n_qubits(&self) -> usize {
        2 * self.a.len() + 1
    }

    pub fn encode(&self, a: u64, b: u64, c: bool) -> u64 {
        let mut bits = (c as u64) << self.c;
        for (k, (&qa, &qb)) in self.a.iter().zip(&self.b).enumerate() {
            bits |= ((a >> k) & 1) << qa;
            bits |= ((b >> k) & 1) << qb;
        }
        bits
    }

    /// `(a, b, c)` from a basis index.
    pub fn decode(&self, bits: u64) -> (u64, u64, bool) {
        let field = |qs: &[usize]| {
            qs.iter()
                .enumerate()
                .fold(0u64, |acc, (k, &q)| acc | (((bits >> q) & 1) << k))
        };
        (field(&self.a), field(&self.b), (bits >> self.c) & 1 == 1)
    }
}

impl AdderSpec {
    pub fn new(width: usize, layout: AdderLayout) -> Result<AdderSpec, LibraryError> {
        if width == 0 {
            return Err(LibraryError::ZeroWidth);
        }
        Ok(AdderSpec { width, layout })
    }

    pub fn qubits(&self) -> AdderQubits {
        let w = self.width;
        match self.layout {
            AdderLayout::Interleaved => AdderQubits {
                a: (0..w).map(|k| 2 * k + 2).collect(),
                b: (0..w).map(|k| 2 * k + 1).collect(),
                c: 0,
            },
            AdderLayout::ARegisterFirst => AdderQubits {
                a: (0..w).collect(),
                b: (w..2 * w).collect(),
                c: 2 * w,
            },
        }
    }

    /// Modulo adder `b := (a + b) mod 2^w`, `a` and `c` restored.
    pub fn circuit(&self) -> Circuit {
        let w = self.width;
        let mut c = Circuit::new();
        let (a, b, cin) = match self.layout {
            AdderLayout::Interleaved => {
                let q = c.add_register("q", 2 * w + 1).expect("fresh register");
                let a: Vec<QubitRef> = (0..w).map(|k| q[2 * k + 2].clone()).collect();
                let b: Vec<QubitRef> = (0..w).map(|k| q[2 * k + 1].clone()).collect();
                (a, b, q[0].clone())
            }
            AdderLayout::ARegisterFirst => {
                let a = c.add_register("a", w).expect("fresh register");
                let b = c.add_register("b", w).expect("fresh register");
                let cin = c.add_register("c", 1).expect("fresh register");
                (a, b, cin[0].clone())
            }
        };
        let mut combined = vec![cin];
        combined.extend(interleave(&b, &a).expect("equal widths"));
        // The top bit needs no MAJ/UNMAJ: its sum is a ⊕ b ⊕ carry-in.
        let lower = &combined[..2 * w - 1];
        let carry = combined[2 * w - 2].clone();
        let mut body = Circuit::new();
        if w > 1 {
            body = ladder(2, 3, lower, false, window(maj)).expect("valid geometry");
        }
        body.push(Gate::cx(a[w - 1].clone(), b[w - 1].clone()));
        body.push(Gate::cx(carry, b[w - 1].clone()));
        if w > 1 {
            body.extend(&ladder(2, 3, lower, true, window(unmaj)).expect("valid geometry"))
                .expect("no registers");
        }
        c.extend(&body).expect("no registers");
        c
    }
}

pub fn mod_add(width: usize, layout: AdderLayout) -> Result<Circuit, LibraryError> {
    Ok(AdderSpec::new(width, layout)?.circuit())
}

/// `b := (b + k) mod 2^w` over register `b(w)`: one ripple increment per
/// set bit of `k`, each adding `2^i` by incrementing `b[i..]`.
pub fn increment_kernel(width: usize, k: u64) -> Result<Circuit, LibraryError> {
    if width == 0 {
        return Err(LibraryError::ZeroWidth);
    }
    if width < 64 && k >> width != 0 {
        return Err(LibraryError::KOutOfRange { k, width });
    }
    let mut c = Circuit::new();
    let b = c.add_register("b", width)?;
    for i in (0..width).filter(|&i| (k >> i) & 1 == 1) {
        for j in (i + 1..width).rev() {
            let mut g = Gate::x(b[j].clone());
            for q in &b[i..j] {
                g = g.with_control(Control::pos(q.clone()));
            }
            c.push(g);
        }
        c.push(Gate::x(b[i].clone()));
    }
    Ok(c)
}

/// Golden circuit sources.
pub mod fixtures {
    use crate::ir::Circuit;
    use crate::source::{parse_source, ParseError};

    pub const CUCCARO_FULLADD4: &str = include_str!("../fixtures/cuccaro_fulladd4.fqt");
    pub const CUCCARO_MODADD4_ORIGINAL: &str =
        include_str!("../fixtures/cuccaro_modadd4_original.fqt");
    pub const CUCCARO_MODADD4_REARRANGED: &str =
        include_str!("../fixtures/cuccaro_modadd4_rearranged.fqt");
    pub const INC4_K1: &str = include_str!("../fixtures/inc4_k1.fqt");
    pub const INC4_K2: &str = include_str!("../fixtures/inc4_k2.fqt");
    pub const INC4_K3: &str = include_str!("../fixtures/inc4_k3.fqt");

    pub const ALL: [(&str, &str); 6] = [
        ("cuccaro_fulladd4", CUCCARO_FULLADD4),
        ("cuccaro_modadd4_original", CUCCARO_MODADD4_ORIGINAL),
        ("cuccaro_modadd4_rearranged", CUCCARO_MODADD4_REARRANGED),
        ("inc4_k1", INC4_K1),
        ("inc4_k2", INC4_K2),
        ("inc4_k3", INC4_K3),
    ];

    /// Parses a fixture by name (without extension).
    pub fn load(name: &str) -> Option<Result<Circuit, ParseError>> {
        ALL.iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| parse_source(text))
    }

    /// The hand-written `+k` kernel for `k` in 1..=3.
    pub fn increment4(k: u64) -> Option<Circuit> {
        let text = match k {
            1 => INC4_K1,
            2 => INC4_K2,
            3 => INC4_K3,
            _ => return None,
        };
        Some(parse_source(text).expect("fixture parses"))
    }
}
