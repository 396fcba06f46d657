use std::ops::{Add, AddAssign, Mul};

/// Symmetric 2x2 matrix `[[a11, a12], [a12, a22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sym2 {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl Sym2 {
    pub const ZERO: Sym2 = Sym2 {
        a11: 0.0,
        a12: 0.0,
        a22: 0.0,
    };
    pub const IDENTITY: Sym2 = Sym2 {
        a11: 1.0,
        a12: 0.0,
        a22: 1.0,
    };

    pub const fn new(a11: f64, a12: f64, a22: f64) -> Self {
        Sym2 { a11, a12, a22 }
    }

    /// `v ⊗ v`
    #[inline]
    pub fn outer(v: [f64; 2]) -> Self {
        Sym2 {
            a11: v[0] * v[0],
            a12: v[0] * v[1],
            a22: v[1] * v[1],
        }
    }

    /// `l1 e1⊗e1 + l2 e2⊗e2`
    pub fn from_eigen(l1: f64, e1: [f64; 2], l2: f64, e2: [f64; 2]) -> Self {
        Sym2::outer(e1) * l1 + Sym2::outer(e2) * l2
    }

    #[inline]
    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    #[inline]
    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a12
    }

    /// `<u, A v>`
    #[inline]
    pub fn inner(&self, u: [f64; 2], v: [f64; 2]) -> f64 {
        u[0] * (self.a11 * v[0] + self.a12 * v[1]) + u[1] * (self.a12 * v[0] + self.a22 * v[1])
    }

    /// Entrywise max-abs norm.
    pub fn max_abs(&self) -> f64 {
        self.a11.abs().max(self.a12.abs()).max(self.a22.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a22.is_finite()
    }
}

impl Add for Sym2 {
    type Output = Sym2;
    fn add(self, o: Sym2) -> Sym2 {
        Sym2::new(self.a11 + o.a11, self.a12 + o.a12, self.a22 + o.a22)
    }
}

impl AddAssign for Sym2 {
    fn add_assign(&mut self, o: Sym2) {
        self.a11 += o.a11;
        self.a12 += o.a12;
        self.a22 += o.a22;
    }
}

impl Mul<f64> for Sym2 {
    type Output = Sym2;
    fn mul(self, s: f64) -> Sym2 {
        Sym2::new(self.a11 * s, self.a12 * s, self.a22 * s)
    }
}

/// Eigen-system of a symmetric 2x2 matrix with `l1 >= l2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen2 {
    pub l1: f64,
    pub l2: f64,
    pub e1: [f64; 2],
    pub e2: [f64; 2],
}

impl Eigen2 {
    pub fn to_tensor(&self) -> Sym2 {
        Sym2::from_eigen(self.l1, self.e1, self.l2, self.e2)
    }
}

/// Closed-form eigen-decomposition.
///
/// Nearly isotropic tensors (`l1 - l2 < 1e-12 (|l1| + |l2| + 1e-300)`) get the
/// fixed axes `e1 = (1, 0)`, `e2 = (0, 1)`.
pub fn eigen_decompose_2x2(t: Sym2) -> Eigen2 {
    let mean = 0.5 * t.trace();
    let half_diff = 0.5 * (t.a11 - t.a22);
    let r = half_diff.hypot(t.a12);
    let (l1, l2) = (mean + r, mean - r);
    if l1 - l2 < 1e-12 * (l1.abs() + l2.abs() + 1e-300) {
        return Eigen2 {
            l1,
            l2,
            e1: [1.0, 0.0],
            e2: [0.0, 1.0],
        };
    }
    let phi = 0.5 * t.a12.atan2(half_diff);
    let (s, c) = phi.sin_cos();
    Eigen2 {
        l1,
        l2,
        e1: [c, s],
        e2: [-s, c],
    }
}
