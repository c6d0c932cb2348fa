//! Orientation and incircle predicates.
//!
//! Both predicates first evaluate in `f64` and fall back to exact big-integer
//! arithmetic when the result is within `1e-12` of the matrix scale. Vertices
//! can also be *symbolic*: points `M · d` at distance `M → ∞` along a fixed
//! integer direction `d`. Determinants involving them are polynomials in `M`
//! and their sign is the sign of the highest-order nonzero coefficient.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Relative threshold on `|det| / permanent` below which the float result is
/// not trusted.
const FILTER: f64 = 1e-12;

/// A predicate operand: a finite point or a vertex at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Vertex {
    Finite(f64, f64),
    /// `M · (dx, dy)` with `M → ∞`.
    Infinite(i64, i64),
}

/// Sign of the orientation of `(a, b, c)`: `Greater` for counter-clockwise.
pub fn orient(a: Vertex, b: Vertex, c: Vertex) -> Ordering {
    if let (Vertex::Finite(ax, ay), Vertex::Finite(bx, by), Vertex::Finite(cx, cy)) = (a, b, c) {
        let left = (bx - ax) * (cy - ay);
        let right = (by - ay) * (cx - ax);
        let det = left - right;
        let scale = left.abs() + right.abs();
        if det.abs() > FILTER * scale {
            return det.partial_cmp(&0.0).unwrap_or(Ordering::Equal);
        }
    }
    let [a, b, c] = exact_operands([a, b, c]);
    let abx = b.0.sub(&a.0);
    let aby = b.1.sub(&a.1);
    let acx = c.0.sub(&a.0);
    let acy = c.1.sub(&a.1);
    abx.mul(&acy).sub(&aby.mul(&acx)).sign_at_infinity()
}

/// `Greater` when `d` lies strictly inside the circle through the
/// counter-clockwise triangle `(a, b, c)`.
pub fn incircle(a: Vertex, b: Vertex, c: Vertex, d: Vertex) -> Ordering {
    if let (
        Vertex::Finite(ax, ay),
        Vertex::Finite(bx, by),
        Vertex::Finite(cx, cy),
        Vertex::Finite(dx, dy),
    ) = (a, b, c, d)
    {
        let (adx, ady) = (ax - dx, ay - dy);
        let (bdx, bdy) = (bx - dx, by - dy);
        let (cdx, cdy) = (cx - dx, cy - dy);
        let alift = adx * adx + ady * ady;
        let blift = bdx * bdx + bdy * bdy;
        let clift = cdx * cdx + cdy * cdy;
        let (bc1, bc2) = (bdx * cdy, bdy * cdx);
        let (ca1, ca2) = (cdx * ady, cdy * adx);
        let (ab1, ab2) = (adx * bdy, ady * bdx);
        let det = alift * (bc1 - bc2) + blift * (ca1 - ca2) + clift * (ab1 - ab2);
        let scale = alift * (bc1.abs() + bc2.abs())
            + blift * (ca1.abs() + ca2.abs())
            + clift * (ab1.abs() + ab2.abs());
        if det.abs() > FILTER * scale {
            return det.partial_cmp(&0.0).unwrap_or(Ordering::Equal);
        }
    }
    let [a, b, c, d] = exact_operands([a, b, c, d]);
    let row = |p: &(Poly, Poly)| {
        let x = p.0.sub(&d.0);
        let y = p.1.sub(&d.1);
        let lift = x.mul(&x).add(&y.mul(&y));
        (x, y, lift)
    };
    let (adx, ady, alift) = row(&a);
    let (bdx, bdy, blift) = row(&b);
    let (cdx, cdy, clift) = row(&c);
    let bc = bdx.mul(&cdy).sub(&bdy.mul(&cdx));
    let ca = cdx.mul(&ady).sub(&cdy.mul(&adx));
    let ab = adx.mul(&bdy).sub(&ady.mul(&bdx));
    alift
        .mul(&bc)
        .add(&blift.mul(&ca))
        .add(&clift.mul(&ab))
        .sign_at_infinity()
}

/// Polynomial in the symbolic distance `M`, coefficients lowest degree first.
#[derive(Debug, Clone)]
struct Poly(Vec<BigInt>);

impl Poly {
    fn constant(c: BigInt) -> Self {
        Poly(vec![c])
    }

    fn linear(c: i64) -> Self {
        Poly(vec![BigInt::zero(), BigInt::from(c)])
    }

    fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly(
            (0..n)
                .map(|i| {
                    let a = self.0.get(i).cloned().unwrap_or_default();
                    let b = other.0.get(i).cloned().unwrap_or_default();
                    a + b
                })
                .collect(),
        )
    }

    fn sub(&self, other: &Poly) -> Poly {
        let neg = Poly(other.0.iter().map(|c| -c).collect());
        self.add(&neg)
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    fn sign_at_infinity(&self) -> Ordering {
        match self.0.iter().rev().find(|c| !c.is_zero()) {
            Some(c) if c.is_positive() => Ordering::Greater,
            Some(_) => Ordering::Less,
            None => Ordering::Equal,
        }
    }
}

/// Splits a finite, nonzero `f64` into `(signed mantissa, binary exponent)`.
fn decompose(v: f64) -> (i64, i32) {
    let bits = v.to_bits();
    let sign = if bits >> 63 == 0 { 1 } else { -1 };
    let exponent = ((bits >> 52) & 0x7ff) as i32;
    let fraction = (bits & 0x000f_ffff_ffff_ffff) as i64;
    let (mantissa, exp) = if exponent == 0 {
        (fraction, -1074)
    } else {
        (fraction | (1 << 52), exponent - 1075)
    };
    (sign * mantissa, exp)
}

/// Converts operands to exact polynomials, scaling every finite coordinate by
/// a common power of two so they become integers. Signs of both predicates are
/// invariant under uniform positive scaling.
fn exact_operands<const N: usize>(vertices: [Vertex; N]) -> [(Poly, Poly); N] {
    let parts: Vec<(i64, i32)> = vertices
        .iter()
        .flat_map(|v| match *v {
            Vertex::Finite(x, y) => vec![x, y],
            Vertex::Infinite(..) => vec![],
        })
        .filter(|c| *c != 0.0)
        .map(decompose)
        .collect();
    let min_exp = parts.iter().map(|p| p.1).min().unwrap_or(0);
    let to_int = |c: f64| -> BigInt {
        if c == 0.0 {
            return BigInt::zero();
        }
        let (m, e) = decompose(c);
        BigInt::from(m) << ((e - min_exp) as usize)
    };
    vertices.map(|v| match v {
        Vertex::Finite(x, y) => (Poly::constant(to_int(x)), Poly::constant(to_int(y))),
        Vertex::Infinite(dx, dy) => (Poly::linear(dx), Poly::linear(dy)),
    })
}
