//! Dense univariate polynomials over `f64` and real root isolation.
//!
//! Roots come from the eigenvalues of the companion matrix. Eigenvalues that
//! cluster together are treated as one candidate multiple root and polished by
//! Newton's method on the derivative of matching order, which restores full
//! precision at the double and triple roots that the slice polynomials of the
//! homogeneous classes exhibit.

use nalgebra::linalg::{balancing, Schur};
use nalgebra::{Complex, DMatrix};

/// A polynomial `a_0 + a_1 t + ... + a_n t^n`, coefficients stored in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<f64>,
}

/// A real root together with the multiplicity detected for it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: usize,
}

const CLUSTER_RADIUS: f64 = 1e-3;
const ACCEPT_REL: f64 = 1e-12;

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let coeffs = if coeffs.is_empty() { vec![0.0] } else { coeffs };
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::new(vec![0.0])
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// The linear polynomial `a + b t`.
    pub fn linear(a: f64, b: f64) -> Self {
        Self::new(vec![a, b])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `t^i`, zero beyond the stored length.
    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    /// Degree after discarding coefficients that are negligible relative to the largest one.
    pub fn degree(&self) -> usize {
        self.effective_len().saturating_sub(1)
    }

    fn effective_len(&self) -> usize {
        let max = self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        if max == 0.0 {
            return 0;
        }
        let cut = 1e-15 * max;
        let mut n = self.coeffs.len();
        while n > 0 && self.coeffs[n - 1].abs() <= cut {
            n -= 1;
        }
        n
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    /// Sum of `|a_i| |t|^i`, the natural scale for rounding errors in `eval`.
    pub fn magnitude(&self, t: f64) -> f64 {
        let at = t.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * at + c.abs())
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| i as f64 * c)
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> Poly {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Poly::constant(1.0), |acc, _| acc.mul(self))
    }

    /// All real roots, sorted ascending, each reported once with its multiplicity.
    pub fn real_roots(&self) -> Vec<RealRoot> {
        let n = self.effective_len();
        if n <= 1 {
            return Vec::new();
        }
        let zeros = self.coeffs[..n].iter().take_while(|&&c| c == 0.0).count();
        if zeros > 0 {
            let mut roots = Poly::new(self.coeffs[zeros..n].to_vec()).real_roots();
            roots.push(RealRoot { value: 0.0, multiplicity: zeros });
            roots.sort_by(|a, b| a.value.total_cmp(&b.value));
            return roots;
        }
        let deg = n - 1;
        let lead = self.coeffs[deg];
        let mut roots: Vec<RealRoot> = Vec::new();
        if deg == 1 {
            roots.push(RealRoot { value: -self.coeffs[0] / lead, multiplicity: 1 });
            return roots;
        }

        let mut companion = DMatrix::<f64>::zeros(deg, deg);
        for i in 1..deg {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..deg {
            companion[(i, deg - 1)] = -self.coeffs[i] / lead;
        }
        let eig = companion_eigenvalues(companion).unwrap_or_else(|| self.aberth(deg));

        for cluster in clusters(&eig) {
            let members: Vec<Complex<f64>> = cluster.iter().map(|&i| eig[i]).collect();
            let m = members.len();
            let mean = members.iter().fold(Complex::new(0.0, 0.0), |a, z| a + z) / m as f64;
            let mut accepted = false;
            if m >= 2 && mean.im.abs() <= 1e-7 * (1.0 + mean.re.abs()) {
                let dp = self.nth_derivative(m - 1);
                let t = newton(&dp, mean.re);
                if self.is_root_normwise(t) {
                    roots.push(RealRoot { value: t, multiplicity: m });
                    accepted = true;
                }
            }
            if !accepted {
                for z in members {
                    let real_enough = if m == 1 {
                        z.im.abs() <= 1e-9 * (1.0 + z.re.abs())
                    } else {
                        z.im.abs() <= 1e-6 * (1.0 + z.re.abs())
                    };
                    if !real_enough {
                        continue;
                    }
                    let t = newton(self, z.re);
                    if self.is_root(t) {
                        roots.push(RealRoot { value: t, multiplicity: 1 });
                    }
                }
            }
        }

        roots.sort_by(|a, b| a.value.total_cmp(&b.value));
        let mut merged: Vec<RealRoot> = Vec::with_capacity(roots.len());
        for r in roots {
            match merged.last_mut() {
                Some(last) if (r.value - last.value).abs() <= 1e-12 * (1.0 + r.value.abs()) => {
                    last.multiplicity += r.multiplicity;
                }
                _ => merged.push(r),
            }
        }
        merged
    }

    /// Real root values without multiplicities.
    pub fn real_root_values(&self) -> Vec<f64> {
        self.real_roots().into_iter().map(|r| r.value).collect()
    }

    fn is_root(&self, t: f64) -> bool {
        t.is_finite() && self.eval(t).abs() <= ACCEPT_REL * self.magnitude(t).max(f64::MIN_POSITIVE)
    }

    /// Residual against the whole coefficient vector rather than term by term. Small
    /// coefficients produced by cancellation keep the absolute rounding of their inputs, so a
    /// multiple root is judged by the backward error of the polynomial as a whole.
    fn is_root_normwise(&self, t: f64) -> bool {
        let n = self.effective_len();
        let norm: f64 = self.coeffs[..n].iter().map(|c| c.abs()).sum();
        let scale = t.abs().max(1.0).powi(n as i32 - 1);
        t.is_finite() && self.eval(t).abs() <= ACCEPT_REL * norm * scale
    }
}

fn companion_eigenvalues(mut m: DMatrix<f64>) -> Option<Vec<Complex<f64>>> {
    balancing::balance_parlett_reinsch(&mut m);
    let schur = Schur::try_new(m, f64::EPSILON, 10_000)?;
    let eig: Vec<Complex<f64>> = schur.complex_eigenvalues().iter().copied().collect();
    eig.iter().all(|z| z.re.is_finite() && z.im.is_finite()).then_some(eig)
}

impl Poly {
    /// Simultaneous Aberth-Ehrlich iteration, used only if the QR iteration stalls.
    fn aberth(&self, deg: usize) -> Vec<Complex<f64>> {
        let a: Vec<f64> = self.coeffs[..=deg].to_vec();
        let evalc = |z: Complex<f64>| -> (Complex<f64>, Complex<f64>) {
            let mut p = Complex::new(a[deg], 0.0);
            let mut dp = Complex::new(0.0, 0.0);
            for i in (0..deg).rev() {
                dp = dp * z + p;
                p = p * z + a[i];
            }
            (p, dp)
        };
        let radius = 1.0 + a[..deg].iter().fold(0.0_f64, |m, c| m.max((c / a[deg]).abs()));
        let mut z: Vec<Complex<f64>> = (0..deg)
            .map(|k| Complex::from_polar(0.5 * radius, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / deg as f64))
            .collect();
        for _ in 0..500 {
            let mut moved = 0.0_f64;
            for i in 0..deg {
                let (p, dp) = evalc(z[i]);
                if p.norm() == 0.0 {
                    continue;
                }
                let ratio = p / dp;
                let repulsion: Complex<f64> = (0..deg)
                    .filter(|&j| j != i)
                    .map(|j| Complex::new(1.0, 0.0) / (z[i] - z[j]))
                    .sum();
                let w = ratio / (Complex::new(1.0, 0.0) - ratio * repulsion);
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
            if moved < 1e-15 {
                break;
            }
        }
        z
    }
}

fn clusters(eig: &[Complex<f64>]) -> Vec<Vec<usize>> {
    let n = eig.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let scale = 1.0 + eig[i].norm().max(eig[j].norm());
            if (eig[i] - eig[j]).norm() <= CLUSTER_RADIUS * scale {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut roots_seen: Vec<usize> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match roots_seen.iter().position(|&x| x == r) {
            Some(k) => groups[k].push(i),
            None => {
                roots_seen.push(r);
                groups.push(vec![i]);
            }
        }
    }
    groups
}

/// Newton iteration with a step guard; returns the best iterate found.
pub fn newton(p: &Poly, t0: f64) -> f64 {
    let dp = p.derivative();
    let mut t = t0;
    let mut best = (p.eval(t).abs(), t);
    for _ in 0..60 {
        let v = p.eval(t);
        let d = dp.eval(t);
        if v == 0.0 || d == 0.0 || !d.is_finite() {
            break;
        }
        let step = v / d;
        let limit = 0.5 * (1.0 + t.abs());
        let step = step.clamp(-limit, limit);
        t -= step;
        let r = p.eval(t).abs();
        if r < best.0 {
            best = (r, t);
        }
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + t.abs()) {
            break;
        }
    }
    best.1
}
