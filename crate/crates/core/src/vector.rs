use std::ops::{Add, AddAssign, Index, Mul, Sub};

/// Real vector of runtime dimension `m`, used for positions (m),
/// velocities (m/s) and accelerations (m/s^2).
#[derive(Debug, Clone, PartialEq)]
pub struct VectorM(Vec<f64>);

impl VectorM {
    pub fn new(components: Vec<f64>) -> Self {
        Self(components)
    }

    pub fn zeros(m: usize) -> Self {
        Self(vec![0.0; m])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, other: &VectorM) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn distance_squared(&self, other: &VectorM) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| {
                let d = a - b;
                d * d
            })
            .sum()
    }

    pub fn distance(&self, other: &VectorM) -> f64 {
        self.distance_squared(other).sqrt()
    }

    /// `self += scale * other`
    pub fn add_scaled(&mut self, scale: f64, other: &VectorM) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += scale * b;
        }
    }

    pub fn scaled(&self, scale: f64) -> VectorM {
        VectorM(self.0.iter().map(|a| a * scale).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl From<Vec<f64>> for VectorM {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl<const N: usize> From<[f64; N]> for VectorM {
    fn from(v: [f64; N]) -> Self {
        Self(v.to_vec())
    }
}

impl Index<usize> for VectorM {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Sub for &VectorM {
    type Output = VectorM;

    fn sub(self, rhs: &VectorM) -> VectorM {
        debug_assert_eq!(self.dim(), rhs.dim());
        VectorM(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Add for &VectorM {
    type Output = VectorM;

    fn add(self, rhs: &VectorM) -> VectorM {
        debug_assert_eq!(self.dim(), rhs.dim());
        VectorM(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl AddAssign<&VectorM> for VectorM {
    fn add_assign(&mut self, rhs: &VectorM) {
        self.add_scaled(1.0, rhs);
    }
}

impl Mul<f64> for &VectorM {
    type Output = VectorM;

    fn mul(self, rhs: f64) -> VectorM {
        self.scaled(rhs)
    }
}
