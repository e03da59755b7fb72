//! Dense complex polynomials with an Aberth–Ehrlich root finder.

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Default tolerance for merging approximate roots into one multiple root.
/// Double roots are only resolved to about `sqrt(ε)` in double precision.
pub const ROOT_CLUSTER_TOL: f64 = 1e-6;

/// Coefficients in ascending order of degree.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoly {
    coeffs: Vec<Complex64>,
}

impl ComplexPoly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == ZERO) {
            coeffs.pop();
        }
        ComplexPoly { coeffs }
    }

    pub fn zero() -> Self {
        ComplexPoly { coeffs: vec![] }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// `z − r`
    pub fn linear_root(r: Complex64) -> Self {
        Self::new(vec![-r, ONE])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    /// Antiderivative vanishing at 0.
    pub fn integral(&self) -> Self {
        let mut out = vec![ZERO];
        out.extend(self.coeffs.iter().enumerate().map(|(k, c)| c / (k + 1) as f64));
        Self::new(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..n)
                .map(|k| self.coeffs.get(k).copied().unwrap_or(ZERO) + other.coeffs.get(k).copied().unwrap_or(ZERO))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-ONE))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// All roots with multiplicity, unclustered. The zero polynomial and
    /// nonzero constants have no roots.
    pub fn roots(&self) -> Vec<Complex64> {
        let mut roots = Vec::new();
        // Exact zero trailing coefficients give exact roots at the origin.
        let shift = self.coeffs.iter().take_while(|c| **c == ZERO).count();
        roots.extend(std::iter::repeat_n(ZERO, shift));
        let rest = Self::new(self.coeffs[shift.min(self.coeffs.len())..].to_vec());
        if let Some(n) = rest.degree() {
            if n > 0 {
                roots.extend(aberth(&rest));
            }
        }
        roots
    }

    /// Roots grouped into clusters of coincident approximations, each cluster
    /// reported by its centroid and size. Sorted by real part, then imaginary part.
    pub fn roots_with_multiplicity(&self, cluster_tol: f64) -> Vec<(Complex64, usize)> {
        let roots = self.roots();
        let n = roots.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for i in 0..n {
            for j in i + 1..n {
                let scale = roots[i].norm().max(roots[j].norm()).max(1.0);
                if (roots[i] - roots[j]).norm() <= cluster_tol * scale {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[rj] = ri;
                    }
                }
            }
        }
        let mut groups: Vec<(usize, Complex64, usize)> = Vec::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            match groups.iter_mut().find(|g| g.0 == r) {
                Some(g) => {
                    g.1 += roots[i];
                    g.2 += 1;
                }
                None => groups.push((r, roots[i], 1)),
            }
        }
        let mut out: Vec<(Complex64, usize)> = groups
            .into_iter()
            .map(|(_, s, m)| {
                let centroid = s / m as f64;
                (self.polish(centroid, m, cluster_tol), m)
            })
            .collect();
        out.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
        out
    }
}

impl ComplexPoly {
    /// Newton steps on the `(m−1)`-th derivative, where a root of multiplicity
    /// `m` is simple. Falls back to `z` if the iteration wanders off.
    fn polish(&self, z: Complex64, m: usize, max_shift: f64) -> Complex64 {
        if m < 2 {
            return z;
        }
        let mut g = self.clone();
        for _ in 1..m {
            g = g.derivative();
        }
        let dg = g.derivative();
        let mut w = z;
        for _ in 0..8 {
            let step = g.eval(w) / dg.eval(w);
            if !step.is_finite() {
                break;
            }
            w -= step;
            if step.norm() <= 1e-16 * w.norm().max(1.0) {
                break;
            }
        }
        if (w - z).norm() <= max_shift * z.norm().max(1.0) {
            w
        } else {
            z
        }
    }
}

fn aberth(p: &ComplexPoly) -> Vec<Complex64> {
    let n = p.degree().unwrap_or(0);
    let dp = p.derivative();
    let lead = p.coeffs[n];
    // Fujiwara-type radius for the initial circle.
    let radius = (0..n)
        .map(|k| (p.coeffs[k] / lead).norm().powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let pv = p.eval(z[k]);
            if pv == ZERO {
                continue;
            }
            let ratio = pv / dp.eval(z[k]);
            let repulsion: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let w = ratio / (ONE - ratio * repulsion);
            if w.is_finite() {
                z[k] -= w;
                moved = moved.max(w.norm() / z[k].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn quadratic_roots() {
        // 3z² − 1/4
        let p = ComplexPoly::new(vec![c(-0.25, 0.0), ZERO, c(3.0, 0.0)]);
        let r = p.roots_with_multiplicity(ROOT_CLUSTER_TOL);
        let s = 1.0 / (2.0 * 3f64.sqrt());
        assert_eq!(r.len(), 2);
        assert!((r[0].0 - c(-s, 0.0)).norm() < 1e-14);
        assert!((r[1].0 - c(s, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn double_root_is_clustered() {
        // (z − 0.3)² (z + 0.5i)
        let p = ComplexPoly::linear_root(c(0.3, 0.0))
            .mul(&ComplexPoly::linear_root(c(0.3, 0.0)))
            .mul(&ComplexPoly::linear_root(c(0.0, -0.5)));
        let r = p.roots_with_multiplicity(ROOT_CLUSTER_TOL);
        assert_eq!(r.len(), 2);
        let double = r.iter().find(|x| x.1 == 2).unwrap();
        assert!((double.0 - c(0.3, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn origin_roots_are_exact() {
        let p = ComplexPoly::new(vec![ZERO, ZERO, c(2.0, 0.0)]);
        assert_eq!(p.roots_with_multiplicity(ROOT_CLUSTER_TOL), vec![(ZERO, 2)]);
    }

    #[test]
    fn integral_and_derivative() {
        let p = ComplexPoly::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        assert_eq!(p.integral().derivative(), p);
        assert_eq!(p.eval(c(2.0, 0.0)), c(17.0, 0.0));
    }
}
