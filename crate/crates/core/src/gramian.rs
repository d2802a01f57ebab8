//! Controllability Gramian and energy metrics.
//!
//! For `x' = A x + B u` the Gramian over `[0, t_f]` is
//! `W = ∫ e^{Aτ} B Bᵀ e^{Aᵀτ} dτ`. Its trace is the energy score used
//! throughout the crate (larger trace, cheaper control), its smallest
//! eigenvalue decides controllability, and `Trace(W⁻¹)` is the classical
//! average-energy metric, available on request.
//!
//! The production path exponentiates the block matrix
//! `[[-A, B Bᵀ], [0, Aᵀ]] t_f` once; with the result partitioned as
//! `[[F1, G1], [0, F2]]`, `W = F2ᵀ G1`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expm::{matrix_exponential, spectral_radius_bounded};
use crate::network::StructuralNetwork;

/// `e^{700}` is close to the largest double; the Gramian squares `e^{ρ t_f}`.
pub const MAX_SPECTRAL_HORIZON: f64 = 350.0;

/// Below this `λ_min / trace` ratio the Gramian is flagged near-singular.
pub const NEAR_SINGULAR_RATIO: f64 = 1e-13;

/// Default relative tolerance of [`controllability_check`].
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Linear dynamics `x' = A x + B u` with one input column per driven node.
#[derive(Debug, Clone)]
pub struct ControlSystem {
    a: DMatrix<f64>,
    inputs: Vec<usize>,
    t_f: f64,
}

impl ControlSystem {
    pub fn new(a: DMatrix<f64>, inputs: Vec<usize>, t_f: f64) -> Result<Self> {
        assert!(a.is_square(), "system matrix must be square");
        let n = a.nrows();
        if inputs.is_empty() {
            return Err(Error::EmptyInputSet);
        }
        let mut seen = vec![false; n];
        for &i in &inputs {
            if i >= n {
                return Err(Error::NodeOutOfRange { id: i + 1, n });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::DuplicateInput { id: i + 1 });
            }
        }
        if !t_f.is_finite() || t_f <= 0.0 {
            return Err(Error::invalid("t_f", format!("{t_f} must be positive")));
        }
        Ok(Self { a, inputs, t_f })
    }

    /// Uses the network's binary dynamics matrix.
    pub fn from_network(g: &StructuralNetwork, inputs: Vec<usize>, t_f: f64) -> Result<Self> {
        Self::new(g.dynamics_matrix(), inputs, t_f)
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn t_f(&self) -> f64 {
        self.t_f
    }

    /// Input matrix with a single 1 per column at the driven node.
    pub fn b(&self) -> DMatrix<f64> {
        let mut b = DMatrix::zeros(self.n(), self.inputs.len());
        for (col, &node) in self.inputs.iter().enumerate() {
            b[(node, col)] = 1.0;
        }
        b
    }

    /// `B Bᵀ`: diagonal with ones at the input nodes.
    pub fn input_gram(&self) -> DMatrix<f64> {
        let mut q = DMatrix::zeros(self.n(), self.n());
        for &node in &self.inputs {
            q[(node, node)] = 1.0;
        }
        q
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    WellConditioned,
    NearSingular,
}

#[derive(Debug, Clone)]
pub struct GramianResult {
    pub w: DMatrix<f64>,
    pub trace: f64,
    pub lambda_min: f64,
    pub trace_inverse: Option<f64>,
    pub condition: Condition,
}

impl GramianResult {
    pub fn n(&self) -> usize {
        self.w.nrows()
    }
}

/// `W_B(t_f)` by the block-exponential method, without `Trace(W⁻¹)`.
pub fn gramian(sys: &ControlSystem) -> Result<GramianResult> {
    gramian_with(sys, false)
}

/// `W_B(t_f)`; `trace_inverse` requests `Trace(W⁻¹)` as well.
///
/// `Trace(W⁻¹)` is left empty when `W` has a nonpositive eigenvalue.
pub fn gramian_with(sys: &ControlSystem, trace_inverse: bool) -> Result<GramianResult> {
    let w = block_gramian(sys)?;
    let trace = w.trace();
    let eig = SymmetricEigen::new(w.clone());
    let lambda_min = eig.eigenvalues.min();
    let condition = if trace > 0.0 && lambda_min / trace >= NEAR_SINGULAR_RATIO {
        Condition::WellConditioned
    } else {
        Condition::NearSingular
    };
    let trace_inverse = (trace_inverse && lambda_min > 0.0)
        .then(|| eig.eigenvalues.iter().map(|l| 1.0 / l).sum());
    Ok(GramianResult {
        w,
        trace,
        lambda_min,
        trace_inverse,
        condition,
    })
}

fn block_gramian(sys: &ControlSystem) -> Result<DMatrix<f64>> {
    let n = sys.n();
    let t_f = sys.t_f;
    let rho = spectral_radius_bounded(&sys.a, MAX_SPECTRAL_HORIZON / t_f);
    if rho * t_f > MAX_SPECTRAL_HORIZON {
        return Err(Error::Overflow {
            spectral_radius: rho,
            horizon: t_f,
        });
    }

    let mut block = DMatrix::zeros(2 * n, 2 * n);
    block.view_mut((0, 0), (n, n)).copy_from(&(-&sys.a));
    block.view_mut((0, n), (n, n)).copy_from(&sys.input_gram());
    block.view_mut((n, n), (n, n)).copy_from(&sys.a.transpose());
    block *= t_f;

    let e = matrix_exponential(&block).map_err(|err| match err {
        Error::Overflow { .. } => Error::Overflow {
            spectral_radius: rho,
            horizon: t_f,
        },
        other => other,
    })?;
    let g1 = e.view((0, n), (n, n));
    let f2 = e.view((n, n), (n, n));
    let w = f2.transpose() * g1;
    Ok((&w + w.transpose()) * 0.5)
}

/// True iff `λ_min > tol · max(1, trace / N)`.
pub fn controllability_check(res: &GramianResult, tol: f64) -> bool {
    let scale = (res.trace / res.n() as f64).max(1.0);
    res.lambda_min > tol * scale
}

/// Independent Gramian routes used to validate the block method.
pub mod oracle {
    use nalgebra::{DMatrix, SymmetricEigen};

    use super::ControlSystem;
    use crate::expm::one_norm;

    /// Composite Gauss-Legendre quadrature of the Gramian integral with
    /// `nodes` points per panel; `e^{Aτ}` comes from nalgebra's own
    /// exponential, not from this crate.
    pub fn gramian_quadrature(sys: &ControlSystem, nodes: usize) -> DMatrix<f64> {
        assert!(nodes >= 16, "quadrature oracle needs at least 16 nodes");
        let (x, wq) = gauss_legendre(nodes);
        let n = sys.n();
        let t_f = sys.t_f();
        let panels = (one_norm(sys.a()) * t_f).ceil().max(1.0) as usize;
        let h = t_f / panels as f64;
        let b = sys.b();
        let mut w = DMatrix::zeros(n, n);
        for p in 0..panels {
            let lo = p as f64 * h;
            for (xi, wi) in x.iter().zip(&wq) {
                let tau = lo + 0.5 * h * (xi + 1.0);
                let eb = (sys.a() * tau).exp() * &b;
                w += (&eb * eb.transpose()) * (0.5 * h * wi);
            }
        }
        w
    }

    /// Closed form for symmetric `A = V Λ Vᵀ`:
    /// `W = V (M ∘ Vᵀ B Bᵀ V) Vᵀ` with
    /// `M_kl = (e^{(λ_k+λ_l) t_f} - 1) / (λ_k + λ_l)`, and `t_f` in the limit
    /// `λ_k + λ_l → 0`.
    pub fn gramian_spectral(sys: &ControlSystem) -> DMatrix<f64> {
        let eig = SymmetricEigen::new(sys.a().clone());
        let v = &eig.eigenvectors;
        let lam = &eig.eigenvalues;
        let t_f = sys.t_f();
        let q = v.transpose() * sys.input_gram() * v;
        let n = sys.n();
        let m = DMatrix::from_fn(n, n, |k, l| {
            let s = lam[k] + lam[l];
            if (s * t_f).abs() < 1e-8 {
                // series of (e^{s t} - 1)/s
                t_f * (1.0 + s * t_f / 2.0 + (s * t_f).powi(2) / 6.0)
            } else {
                (s * t_f).exp_m1() / s
            }
        });
        v * m.component_mul(&q) * v.transpose()
    }

    /// Nodes and weights on `[-1, 1]` by Newton iteration on Legendre
    /// polynomials.
    pub fn gauss_legendre(count: usize) -> (Vec<f64>, Vec<f64>) {
        let mut nodes = vec![0.0; count];
        let mut weights = vec![0.0; count];
        let nf = count as f64;
        for i in 0..count.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=count {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = nf * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[count - 1 - i] = x;
            weights[i] = w;
            weights[count - 1 - i] = w;
        }
        (nodes, weights)
    }
}

#[cfg(test)]
mod tests {
    use super::oracle::*;
    use super::*;

    fn sys(a: DMatrix<f64>, inputs: Vec<usize>, t_f: f64) -> ControlSystem {
        ControlSystem::new(a, inputs, t_f).unwrap()
    }

    fn chain5() -> StructuralNetwork {
        StructuralNetwork::from_arcs(5, [(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap()
    }

    #[test]
    fn scalar_zero_dynamics() {
        let r = gramian(&sys(DMatrix::zeros(1, 1), vec![0], 1.0)).unwrap();
        assert!((r.w[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((r.trace - 1.0).abs() < 1e-15);
        assert!((r.lambda_min - 1.0).abs() < 1e-15);
    }

    #[test]
    fn decoupled_node_is_unreachable() {
        let r = gramian(&sys(DMatrix::zeros(2, 2), vec![0], 1.0)).unwrap();
        assert!((r.w[(0, 0)] - 1.0).abs() < 1e-15);
        assert_eq!(r.w[(1, 1)], 0.0);
        assert_eq!(r.lambda_min, 0.0);
        assert!(!controllability_check(&r, DEFAULT_TOLERANCE));
        assert_eq!(r.condition, Condition::NearSingular);
    }

    #[test]
    fn scalar_growth() {
        let r = gramian(&sys(DMatrix::from_element(1, 1, 1.0), vec![0], 1.0)).unwrap();
        let (x, w) = gauss_legendre(20);
        // ∫₀¹ e^{2τ} dτ by quadrature, independent of the closed form
        let quad: f64 = x.iter().zip(&w).map(|(x, w)| 0.5 * w * (x + 1.0).exp()).sum();
        let exact = (std::f64::consts::E.powi(2) - 1.0) / 2.0;
        assert!((quad - exact).abs() < 1e-13);
        assert!((r.trace - exact).abs() < 1e-12);
        assert!((r.trace - 3.194_528_05).abs() < 1e-8);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(16);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // exact up to degree 31
        let moment: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((moment - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn matches_quadrature_on_chain5() {
        for inputs in [vec![0, 2], vec![0, 3], vec![4]] {
            let s = ControlSystem::from_network(&chain5(), inputs, 1.0).unwrap();
            let w = gramian(&s).unwrap().w;
            let q = gramian_quadrature(&s, 24);
            assert!((&w - &q).norm() / q.norm() < 1e-8);
        }
    }

    #[test]
    fn matches_spectral_on_symmetric() {
        let g = StructuralNetwork::from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 2)]).unwrap();
        let s = ControlSystem::from_network(&g, vec![3], 1.0).unwrap();
        let w = gramian(&s).unwrap().w;
        let sp = gramian_spectral(&s);
        assert!((&w - &sp).norm() / sp.norm() < 1e-10);
    }

    #[test]
    fn spectral_handles_zero_eigenvalue_sum() {
        // A = 0: every λ_k + λ_l is zero, W = t_f B Bᵀ
        let s = sys(DMatrix::zeros(2, 2), vec![1], 2.5);
        let sp = gramian_spectral(&s);
        assert!((sp[(1, 1)] - 2.5).abs() < 1e-14);
        assert!(sp[(0, 0)].abs() < 1e-14);
    }

    #[test]
    fn tiny_horizon_gives_tiny_gramian() {
        let s = ControlSystem::from_network(&chain5(), vec![0], 1e-9).unwrap();
        let r = gramian(&s).unwrap();
        assert!(r.w.norm() < 1e-8);
    }

    #[test]
    fn chain5_controllability() {
        let g = chain5();
        let both = gramian(&ControlSystem::from_network(&g, vec![0, 3], 1.0).unwrap()).unwrap();
        assert!(controllability_check(&both, DEFAULT_TOLERANCE));
        let five = gramian(&ControlSystem::from_network(&g, vec![4], 1.0).unwrap()).unwrap();
        assert!(!controllability_check(&five, DEFAULT_TOLERANCE));
    }

    #[test]
    fn trace_inverse_opt_in() {
        let s = ControlSystem::from_network(&chain5(), vec![0, 3], 1.0).unwrap();
        assert!(gramian(&s).unwrap().trace_inverse.is_none());
        let r = gramian_with(&s, true).unwrap();
        let direct = r.w.clone().try_inverse().unwrap().trace();
        assert!((r.trace_inverse.unwrap() - direct).abs() / direct < 1e-8);
    }

    #[test]
    fn validation() {
        let a = DMatrix::zeros(3, 3);
        assert!(matches!(
            ControlSystem::new(a.clone(), vec![], 1.0),
            Err(Error::EmptyInputSet)
        ));
        assert!(matches!(
            ControlSystem::new(a.clone(), vec![3], 1.0),
            Err(Error::NodeOutOfRange { id: 4, n: 3 })
        ));
        assert!(matches!(
            ControlSystem::new(a.clone(), vec![1, 1], 1.0),
            Err(Error::DuplicateInput { id: 2 })
        ));
        assert!(ControlSystem::new(a, vec![0], 0.0).is_err());
    }

    #[test]
    fn overflow_guard() {
        let s = sys(DMatrix::from_element(1, 1, 400.0), vec![0], 1.0);
        assert!(matches!(gramian(&s), Err(Error::Overflow { .. })));
    }
}
