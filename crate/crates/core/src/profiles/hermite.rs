//! Quintic Hermite pieces: each piece matches value, first and second
//! derivative at both ends, so a chain of pieces is C² exactly.

/// Monomial coefficients (in the local variable `t ∈ [0, 1]`) of the six
/// basis polynomials, ordered f(0), h f'(0), h² f''(0), f(1), h f'(1), h² f''(1).
const BASIS: [[f64; 6]; 6] = [
    [1.0, 0.0, 0.0, -10.0, 15.0, -6.0],
    [0.0, 1.0, 0.0, -6.0, 8.0, -3.0],
    [0.0, 0.0, 0.5, -1.5, 1.5, -0.5],
    [0.0, 0.0, 0.0, 10.0, -15.0, 6.0],
    [0.0, 0.0, 0.0, -4.0, 7.0, -3.0],
    [0.0, 0.0, 0.0, 0.5, -1.0, 0.5],
];

/// Endpoint data `(f, f', f'')`.
pub type Jet = (f64, f64, f64);

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Piece {
    pub x0: f64,
    pub h: f64,
    pub coef: [f64; 6],
}

impl Piece {
    pub fn new(x0: f64, x1: f64, left: Jet, right: Jet) -> Self {
        let h = x1 - x0;
        let data = [
            left.0,
            left.1 * h,
            left.2 * h * h,
            right.0,
            right.1 * h,
            right.2 * h * h,
        ];
        let mut coef = [0.0; 6];
        for (w, basis) in data.iter().zip(BASIS.iter()) {
            for (c, b) in coef.iter_mut().zip(basis) {
                *c += w * b;
            }
        }
        Self { x0, h, coef }
    }

    pub fn x1(&self) -> f64 {
        self.x0 + self.h
    }

    pub fn local(&self, x: f64) -> f64 {
        (x - self.x0) / self.h
    }

    /// `k`-th derivative with respect to `t` of the local polynomial.
    pub fn poly_deriv(&self, t: f64, k: usize) -> f64 {
        let c = &self.coef;
        match k {
            0 => c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5])))),
            1 => c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * (4.0 * c[4] + t * 5.0 * c[5]))),
            2 => 2.0 * c[2] + t * (6.0 * c[3] + t * (12.0 * c[4] + t * 20.0 * c[5])),
            3 => 6.0 * c[3] + t * (24.0 * c[4] + t * 60.0 * c[5]),
            _ => 0.0,
        }
    }

    /// `k`-th derivative with respect to `x`, at local coordinate `t`.
    pub fn deriv_at(&self, t: f64, k: usize) -> f64 {
        self.poly_deriv(t, k) / self.h.powi(k as i32)
    }

    /// Coefficients of `h f'(x(t))` as a quartic in `t`.
    pub fn slope_coefficients(&self) -> [f64; 5] {
        let c = &self.coef;
        [c[1], 2.0 * c[2], 3.0 * c[3], 4.0 * c[4], 5.0 * c[5]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_data_is_reproduced() {
        let p = Piece::new(0.5, 0.75, (1.0, -2.0, 3.0), (-0.5, 4.0, -6.0));
        let close = |a: f64, b: f64| (a - b).abs() < 1e-11 * (1.0 + b.abs());
        assert!(close(p.deriv_at(0.0, 0), 1.0));
        assert!(close(p.deriv_at(0.0, 1), -2.0));
        assert!(close(p.deriv_at(0.0, 2), 3.0));
        assert!(close(p.deriv_at(1.0, 0), -0.5));
        assert!(close(p.deriv_at(1.0, 1), 4.0));
        assert!(close(p.deriv_at(1.0, 2), -6.0));
    }

    #[test]
    fn reproduces_quintic_polynomials() {
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x.powi(3) - x.powi(5);
        let df = |x: f64| -2.0 + 1.5 * x * x - 5.0 * x.powi(4);
        let d2f = |x: f64| 3.0 * x - 20.0 * x.powi(3);
        let (a, b) = (-0.3, 1.1);
        let p = Piece::new(a, b, (f(a), df(a), d2f(a)), (f(b), df(b), d2f(b)));
        for k in 0..=20 {
            let x = a + (b - a) * k as f64 / 20.0;
            let t = p.local(x);
            assert!((p.deriv_at(t, 0) - f(x)).abs() < 1e-12);
            assert!((p.deriv_at(t, 1) - df(x)).abs() < 1e-11);
        }
    }
}
