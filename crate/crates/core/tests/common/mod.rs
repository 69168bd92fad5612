//! Independent oracles shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            ((x + 1.0) / 2.0, 1.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Collapsed tensor rule on a physical triangle.
pub fn triangle_rule(c: &[[f64; 2]; 3], n: usize) -> Vec<([f64; 2], f64)> {
    let g = gauss_legendre(n);
    let area2 = ((c[1][0] - c[0][0]) * (c[2][1] - c[0][1]) - (c[2][0] - c[0][0]) * (c[1][1] - c[0][1])).abs();
    let mut out = Vec::new();
    for &(u, wu) in &g {
        for &(v, wv) in &g {
            let (s, t) = (u, v * (1.0 - u));
            let x = [
                c[0][0] + s * (c[1][0] - c[0][0]) + t * (c[2][0] - c[0][0]),
                c[0][1] + s * (c[1][1] - c[0][1]) + t * (c[2][1] - c[0][1]),
            ];
            out.push((x, wu * wv * (1.0 - u) * area2));
        }
    }
    out
}

/// P2 basis on a physical triangle from explicit barycentric formulas.
pub struct P2Basis {
    c: [[f64; 2]; 3],
    grad_l: [[f64; 2]; 3],
}

impl P2Basis {
    pub fn new(c: [[f64; 2]; 3]) -> Self {
        let det = (c[1][0] - c[0][0]) * (c[2][1] - c[0][1]) - (c[2][0] - c[0][0]) * (c[1][1] - c[0][1]);
        let mut grad_l = [[0.0; 2]; 3];
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            grad_l[i] = [(c[j][1] - c[k][1]) / det, (c[k][0] - c[j][0]) / det];
        }
        Self { c, grad_l }
    }

    fn bary(&self, x: [f64; 2]) -> [f64; 3] {
        let l1 = self.grad_l[1][0] * (x[0] - self.c[0][0]) + self.grad_l[1][1] * (x[1] - self.c[0][1]);
        let l2 = self.grad_l[2][0] * (x[0] - self.c[0][0]) + self.grad_l[2][1] * (x[1] - self.c[0][1]);
        [1.0 - l1 - l2, l1, l2]
    }

    pub fn values(&self, x: [f64; 2]) -> [f64; 6] {
        let l = self.bary(x);
        [
            l[0] * (2.0 * l[0] - 1.0),
            l[1] * (2.0 * l[1] - 1.0),
            l[2] * (2.0 * l[2] - 1.0),
            4.0 * l[0] * l[1],
            4.0 * l[1] * l[2],
            4.0 * l[2] * l[0],
        ]
    }

    pub fn grads(&self, x: [f64; 2]) -> [[f64; 2]; 6] {
        let l = self.bary(x);
        let g = self.grad_l;
        let mut out = [[0.0; 2]; 6];
        for i in 0..3 {
            for d in 0..2 {
                out[i][d] = (4.0 * l[i] - 1.0) * g[i][d];
            }
        }
        for (k, (i, j)) in [(0, 1), (1, 2), (2, 0)].into_iter().enumerate() {
            for d in 0..2 {
                out[3 + k][d] = 4.0 * (l[i] * g[j][d] + l[j] * g[i][d]);
            }
        }
        out
    }
}

/// Dense Gaussian elimination with partial pivoting.
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    x
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}
