//! Operator-string models: a density matrix, then per time step a unitary
//! followed by one projector from an orthogonal family.
//!
//! The class operator of a fine-grained history (one projector choice per
//! step) is the time-ordered product `P_m U_m ... P_1 U_1`; taking step
//! unitaries equal to the identity recovers bare projector strings.

use num::complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::{Backend, ExactScalar, RingScalar, Scalar};
use crate::space::{HistorySpace, MAX_HISTORIES};

use super::psd;
use super::Cells;

/// One evolution step: a unitary, then a complete family of mutually
/// orthogonal projectors with one outcome label per projector.
pub struct OperatorStepSpec {
    pub unitary: Vec<Vec<Scalar>>,
    pub projectors: Vec<Vec<Vec<Scalar>>>,
    pub outcome_labels: Option<Vec<String>>,
}

pub(crate) struct OperatorStep {
    pub(crate) unitary: Cells,
    pub(crate) projectors: Vec<Cells>,
    pub(crate) labels: Vec<String>,
}

/// Validated operator model over a d-dimensional Hilbert space.
pub struct OperatorModel {
    dim: usize,
    rho: Cells,
    steps: Vec<OperatorStep>,
    epsilon: f64,
}

impl OperatorModel {
    pub fn new(
        dim: usize,
        rho: Vec<Vec<Scalar>>,
        steps: Vec<OperatorStepSpec>,
        epsilon: f64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidModel("Hilbert dimension must be positive".into()));
        }
        if steps.is_empty() {
            return Err(Error::InvalidModel("at least one step is required".into()));
        }
        let rho = square_cells(dim, rho, "rho")?;
        let mut backend = rho.backend();
        let mut built = Vec::with_capacity(steps.len());
        for (t, step) in steps.into_iter().enumerate() {
            let unitary = square_cells(dim, step.unitary, &format!("step {t} unitary"))?;
            if unitary.backend() != backend {
                return Err(Error::BackendMismatch);
            }
            if step.projectors.is_empty() {
                return Err(Error::InvalidModel(format!("step {t} has no projectors")));
            }
            let mut projectors = Vec::with_capacity(step.projectors.len());
            for (j, p) in step.projectors.into_iter().enumerate() {
                let p = square_cells(dim, p, &format!("step {t} projector {j}"))?;
                if p.backend() != backend {
                    return Err(Error::BackendMismatch);
                }
                projectors.push(p);
            }
            let labels = match step.outcome_labels {
                Some(ls) => {
                    if ls.len() != projectors.len() {
                        return Err(Error::InvalidModel(format!(
                            "step {t}: {} labels for {} projectors",
                            ls.len(),
                            projectors.len()
                        )));
                    }
                    if ls.iter().any(|l| l.is_empty() || l.contains(',')) {
                        return Err(Error::InvalidModel(format!(
                            "step {t}: outcome labels must be non-empty and comma-free"
                        )));
                    }
                    ls
                }
                None => (0..projectors.len()).map(|j| j.to_string()).collect(),
            };
            backend = unitary.backend();
            built.push(OperatorStep {
                unitary,
                projectors,
                labels,
            });
        }
        let model = OperatorModel {
            dim,
            rho,
            steps: built,
            epsilon,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn backend(&self) -> Backend {
        self.rho.backend()
    }

    pub fn num_histories(&self) -> usize {
        self.steps.iter().map(|s| s.projectors.len()).product()
    }

    /// Checks rho (Hermitian, PSD, unit trace), each unitary and each
    /// projector family (Hermitian idempotents, mutually orthogonal,
    /// summing to the identity).
    fn validate(&self) -> Result<()> {
        match self.backend() {
            Backend::Exact => self.validate_kernel::<ExactScalar>(&ExactOps),
            Backend::Float => self.validate_kernel::<Complex64>(&FloatOps {
                eps: self.epsilon,
            }),
        }
    }

    fn validate_kernel<R: RingScalar>(&self, ops: &dyn MatOps<R>) -> Result<()>
    where
        Cells: AsSlice<R>,
    {
        let d = self.dim;
        let rho: &[R] = self.rho.as_slice();
        if !ops.is_hermitian(rho, d) {
            return Err(Error::InvalidModel("rho is not Hermitian".into()));
        }
        if !ops.is_psd(rho, d) {
            return Err(Error::InvalidModel("rho is not positive semidefinite".into()));
        }
        if !ops.has_unit_trace(rho, d) {
            return Err(Error::InvalidModel("rho does not have unit trace".into()));
        }
        for (t, step) in self.steps.iter().enumerate() {
            let u: &[R] = step.unitary.as_slice();
            if !ops.is_unitary(u, d) {
                return Err(Error::InvalidModel(format!("step {t} matrix is not unitary")));
            }
            let ps: Vec<&[R]> = step.projectors.iter().map(|p| p.as_slice()).collect();
            for (j, p) in ps.iter().enumerate() {
                if !ops.is_hermitian(p, d) {
                    return Err(Error::InvalidModel(format!(
                        "step {t} projector {j} is not Hermitian"
                    )));
                }
                let pp = mat_mul(p, p, d);
                if !ops.mats_equal(&pp, p, d) {
                    return Err(Error::InvalidModel(format!(
                        "step {t} projector {j} is not idempotent"
                    )));
                }
                for (k, q) in ps.iter().enumerate().skip(j + 1) {
                    let pq = mat_mul(p, q, d);
                    if !ops.is_zero_mat(&pq, d) {
                        return Err(Error::InvalidModel(format!(
                            "step {t} projectors {j} and {k} are not orthogonal"
                        )));
                    }
                }
            }
            let mut sum = vec![R::ring_zero(); d * d];
            for p in &ps {
                for (s, x) in sum.iter_mut().zip(p.iter()) {
                    s.ring_add_assign(x);
                }
            }
            if !ops.is_identity(&sum, d) {
                return Err(Error::InvalidModel(format!(
                    "step {t} projectors do not sum to the identity"
                )));
            }
        }
        Ok(())
    }

    /// Fine-grained history space: one projector choice per step, the first
    /// step varying fastest. Labels concatenate outcome labels with the last
    /// step leftmost (single-character outcomes join bare, otherwise with
    /// commas).
    pub fn history_space(&self) -> Result<HistorySpace> {
        let n = self.num_histories();
        if n > MAX_HISTORIES {
            return Err(Error::InvalidModel(format!(
                "{n} fine-grained histories exceed the representable maximum {MAX_HISTORIES}"
            )));
        }
        let single_char = self
            .steps
            .iter()
            .all(|s| s.labels.iter().all(|l| l.chars().count() == 1));
        let mut labels = Vec::with_capacity(n);
        for idx in 0..n {
            let digits = self.decode(idx);
            let parts: Vec<&str> = digits
                .iter()
                .enumerate()
                .rev()
                .map(|(t, &j)| self.steps[t].labels[j].as_str())
                .collect();
            labels.push(parts.join(if single_char { "" } else { "," }));
        }
        HistorySpace::new(labels)
    }

    /// Per-step projector choices of history `idx`, step 1 first.
    fn decode(&self, mut idx: usize) -> Vec<usize> {
        let mut digits = Vec::with_capacity(self.steps.len());
        for step in &self.steps {
            let m = step.projectors.len();
            digits.push(idx % m);
            idx /= m;
        }
        digits
    }

    /// Final-class id of a history: its last-step projector choice.
    pub fn final_class(&self, idx: usize) -> usize {
        *self.decode(idx).last().expect("at least one step")
    }

    /// Decoherence-functional entries over the fine-grained histories:
    /// `D(h, h') = Tr(C_{h'} rho C_h^dagger)`, conjugate-linear in the first
    /// argument, so entries form the Gram matrix of the branches.
    pub(crate) fn functional_entries(&self) -> Cells {
        match self.backend() {
            Backend::Exact => Cells::Exact(self.entries_kernel::<ExactScalar>()),
            Backend::Float => Cells::Float(self.entries_kernel::<Complex64>()),
        }
    }

    fn entries_kernel<R: RingScalar>(&self) -> Vec<R>
    where
        Cells: AsSlice<R>,
    {
        let d = self.dim;
        let n = self.num_histories();
        let rho: &[R] = self.rho.as_slice();

        // class operators C_h = P_m U_m ... P_1 U_1
        let mut class_ops: Vec<Vec<R>> = Vec::with_capacity(n);
        for idx in 0..n {
            let mut x = identity_mat::<R>(d);
            for (t, &j) in self.decode(idx).iter().enumerate() {
                let step = &self.steps[t];
                x = mat_mul(step.unitary.as_slice(), &x, d);
                x = mat_mul(step.projectors[j].as_slice(), &x, d);
            }
            class_ops.push(x);
        }
        let branched: Vec<Vec<R>> = class_ops.iter().map(|c| mat_mul(c, rho, d)).collect();

        let mut entries = vec![R::ring_zero(); n * n];
        for h in 0..n {
            for hp in 0..n {
                let mut s = R::ring_zero();
                for (x, y) in class_ops[h].iter().zip(branched[hp].iter()) {
                    s.ring_add_assign(&x.ring_conj().ring_mul(y));
                }
                entries[h * n + hp] = s;
            }
        }
        entries
    }
}

pub(crate) fn square_cells(dim: usize, rows: Vec<Vec<Scalar>>, what: &str) -> Result<Cells> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::InvalidModel(format!("{what} is not {dim}x{dim}")));
    }
    Cells::from_scalars(rows.into_iter().flatten().collect())
}

/// Unitarity check shared with model constructors outside this module.
pub(crate) fn unitary_check(cells: &Cells, d: usize, eps: f64) -> bool {
    match cells {
        Cells::Exact(m) => ExactOps.is_unitary(m, d),
        Cells::Float(m) => FloatOps { eps }.is_unitary(m, d),
    }
}

// small generic matrix kernels, row-major d x d

fn identity_mat<R: RingScalar>(d: usize) -> Vec<R> {
    let mut m = vec![R::ring_zero(); d * d];
    for k in 0..d {
        m[k * d + k] = R::ring_one();
    }
    m
}

fn mat_mul<R: RingScalar>(a: &[R], b: &[R], d: usize) -> Vec<R> {
    let mut out = vec![R::ring_zero(); d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = &a[i * d + k];
            for j in 0..d {
                let t = aik.ring_mul(&b[k * d + j]);
                out[i * d + j].ring_add_assign(&t);
            }
        }
    }
    out
}

/// Backend-specific predicates used by model validation.
trait MatOps<R> {
    fn is_hermitian(&self, m: &[R], d: usize) -> bool;
    fn is_psd(&self, m: &[R], d: usize) -> bool;
    fn has_unit_trace(&self, m: &[R], d: usize) -> bool;
    fn is_unitary(&self, m: &[R], d: usize) -> bool;
    fn mats_equal(&self, a: &[R], b: &[R], d: usize) -> bool;
    fn is_zero_mat(&self, m: &[R], d: usize) -> bool;
    fn is_identity(&self, m: &[R], d: usize) -> bool;
}

struct ExactOps;

impl MatOps<ExactScalar> for ExactOps {
    fn is_hermitian(&self, m: &[ExactScalar], d: usize) -> bool {
        (0..d).all(|i| (i..d).all(|j| m[i * d + j] == m[j * d + i].conj()))
    }
    fn is_psd(&self, m: &[ExactScalar], d: usize) -> bool {
        psd::exact_psd(m, d)
    }
    fn has_unit_trace(&self, m: &[ExactScalar], d: usize) -> bool {
        let mut tr = ExactScalar::zero();
        for k in 0..d {
            tr = &tr + &m[k * d + k];
        }
        tr.is_one()
    }
    fn is_unitary(&self, m: &[ExactScalar], d: usize) -> bool {
        // U^dagger U = I
        let mut adj = vec![ExactScalar::zero(); d * d];
        for i in 0..d {
            for j in 0..d {
                adj[i * d + j] = m[j * d + i].conj();
            }
        }
        let prod = mat_mul(&adj, m, d);
        self.is_identity(&prod, d)
    }
    fn mats_equal(&self, a: &[ExactScalar], b: &[ExactScalar], _d: usize) -> bool {
        a == b
    }
    fn is_zero_mat(&self, m: &[ExactScalar], _d: usize) -> bool {
        m.iter().all(|x| x.is_zero())
    }
    fn is_identity(&self, m: &[ExactScalar], d: usize) -> bool {
        (0..d).all(|i| {
            (0..d).all(|j| {
                if i == j {
                    m[i * d + j].is_one()
                } else {
                    m[i * d + j].is_zero()
                }
            })
        })
    }
}

struct FloatOps {
    eps: f64,
}

impl FloatOps {
    fn close(&self, a: Complex64, b: Complex64) -> bool {
        (a - b).norm() <= self.eps
    }
}

impl MatOps<Complex64> for FloatOps {
    fn is_hermitian(&self, m: &[Complex64], d: usize) -> bool {
        (0..d).all(|i| (i..d).all(|j| self.close(m[i * d + j], m[j * d + i].conj())))
    }
    fn is_psd(&self, m: &[Complex64], d: usize) -> bool {
        psd::float_psd(m, d, self.eps)
    }
    fn has_unit_trace(&self, m: &[Complex64], d: usize) -> bool {
        let tr: Complex64 = (0..d).map(|k| m[k * d + k]).sum();
        self.close(tr, Complex64::new(1.0, 0.0))
    }
    fn is_unitary(&self, m: &[Complex64], d: usize) -> bool {
        let mut adj = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                adj[i * d + j] = m[j * d + i].conj();
            }
        }
        let prod = mat_mul(&adj, m, d);
        self.is_identity(&prod, d)
    }
    fn mats_equal(&self, a: &[Complex64], b: &[Complex64], _d: usize) -> bool {
        a.iter().zip(b.iter()).all(|(x, y)| self.close(*x, *y))
    }
    fn is_zero_mat(&self, m: &[Complex64], _d: usize) -> bool {
        m.iter().all(|x| x.norm() <= self.eps)
    }
    fn is_identity(&self, m: &[Complex64], d: usize) -> bool {
        (0..d).all(|i| {
            (0..d).all(|j| {
                let want = if i == j { 1.0 } else { 0.0 };
                self.close(m[i * d + j], Complex64::new(want, 0.0))
            })
        })
    }
}

/// View of `Cells` as a typed slice; the backend is checked by construction.
pub(crate) trait AsSlice<R> {
    fn as_slice(&self) -> &[R];
}

impl AsSlice<ExactScalar> for Cells {
    fn as_slice(&self) -> &[ExactScalar] {
        match self {
            Cells::Exact(v) => v,
            Cells::Float(_) => panic!("backend mismatch: expected exact cells"),
        }
    }
}

impl AsSlice<Complex64> for Cells {
    fn as_slice(&self) -> &[Complex64] {
        match self {
            Cells::Float(v) => v,
            Cells::Exact(_) => panic!("backend mismatch: expected float cells"),
        }
    }
}
