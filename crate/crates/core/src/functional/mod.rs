//! Decoherence functionals on finite history spaces: construction from
//! branch amplitudes, operator strings or raw matrices, measure queries,
//! validation and composition.

mod operators;
mod psd;
pub(crate) mod scan;

pub use operators::{OperatorModel, OperatorStepSpec};
pub(crate) use operators::{square_cells, unitary_check};

use num::complex::Complex64;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::scalar::{Backend, ExactScalar, Scalar, Sign};
use crate::space::{Event, HistorySpace};

/// Homogeneous scalar storage for vectors and row-major matrices.
#[derive(Clone, Debug)]
pub(crate) enum Cells {
    Exact(Vec<ExactScalar>),
    Float(Vec<Complex64>),
}

impl Cells {
    pub(crate) fn from_scalars(scalars: Vec<Scalar>) -> Result<Cells> {
        let mut it = scalars.into_iter();
        match it.next() {
            None => Ok(Cells::Exact(Vec::new())),
            Some(Scalar::Exact(first)) => {
                let mut v = vec![first];
                for s in it {
                    match s {
                        Scalar::Exact(x) => v.push(x),
                        Scalar::Float(_) => return Err(Error::BackendMismatch),
                    }
                }
                Ok(Cells::Exact(v))
            }
            Some(Scalar::Float(first)) => {
                let mut v = vec![first];
                for s in it {
                    match s {
                        Scalar::Float(z) => v.push(z),
                        Scalar::Exact(_) => return Err(Error::BackendMismatch),
                    }
                }
                Ok(Cells::Float(v))
            }
        }
    }

    pub(crate) fn backend(&self) -> Backend {
        match self {
            Cells::Exact(_) => Backend::Exact,
            Cells::Float(_) => Backend::Float,
        }
    }

    pub(crate) fn len(&self) -> usize {
        match self {
            Cells::Exact(v) => v.len(),
            Cells::Float(v) => v.len(),
        }
    }

    pub(crate) fn scalar_at(&self, i: usize) -> Scalar {
        match self {
            Cells::Exact(v) => Scalar::Exact(v[i].clone()),
            Cells::Float(v) => Scalar::Float(v[i]),
        }
    }
}

/// Zero test applied to off-diagonal terms: the full complex value (medium)
/// or only its real part (weak).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecoherenceMode {
    Medium,
    Weak,
}

/// Outcome of checking conditions on a functional. `weakly_positive` is only
/// filled by [`DecoherenceFunctional::validate`], and only when the space is
/// small enough for the brute-force subset scan.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub hermitian: bool,
    pub normalized: bool,
    pub strongly_positive: bool,
    pub weakly_positive: Option<bool>,
    pub diagnostics: Vec<String>,
}

impl ValidationReport {
    /// The three structural conditions checked at build time.
    pub fn passes(&self) -> bool {
        self.hermitian && self.normalized && self.strongly_positive
    }
}

/// Branch-vector model: one amplitude and one final-class id per
/// fine-grained history, for a pure initial state folded into the
/// amplitudes. Histories in different final classes do not interfere.
pub struct BranchVectorModel {
    space: HistorySpace,
    amplitudes: Cells,
    final_classes: Vec<usize>,
}

impl BranchVectorModel {
    pub fn new(
        space: HistorySpace,
        amplitudes: Vec<Scalar>,
        final_classes: Vec<usize>,
    ) -> Result<Self> {
        if amplitudes.len() != space.n() || final_classes.len() != space.n() {
            return Err(Error::InvalidModel(format!(
                "expected {} amplitudes and final classes",
                space.n()
            )));
        }
        let amplitudes = Cells::from_scalars(amplitudes)?;
        Ok(BranchVectorModel {
            space,
            amplitudes,
            final_classes,
        })
    }

    pub fn space(&self) -> &HistorySpace {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn backend(&self) -> Backend {
        self.amplitudes.backend()
    }

    pub fn amplitude(&self, i: usize) -> Scalar {
        self.amplitudes.scalar_at(i)
    }

    pub fn final_class(&self, i: usize) -> usize {
        self.final_classes[i]
    }
}

/// The decoherence functional: a Hermitian, normalized, strongly positive
/// matrix over the fine-grained histories. Bilinear extension to events is
/// realized by [`DecoherenceFunctional::evaluate`] summing matrix blocks.
///
/// Immutable after construction; queries are pure and safe to share across
/// threads.
#[derive(Clone, Debug)]
pub struct DecoherenceFunctional {
    space: HistorySpace,
    data: Cells,
    epsilon: f64,
    eps_abs: f64,
    report: ValidationReport,
}

impl DecoherenceFunctional {
    /// Builds from branch amplitudes: `D(i, j) = conj(a_i) * a_j` when `i`
    /// and `j` share a final class, zero otherwise.
    ///
    /// Normalization is diagnosed, never repaired: a model whose entries do
    /// not sum to one is rejected with the actual sum.
    pub fn from_amplitudes(model: &BranchVectorModel, epsilon: f64) -> Result<Self> {
        let n = model.n();
        let data = match &model.amplitudes {
            Cells::Exact(amps) => {
                let mut m = vec![ExactScalar::zero(); n * n];
                for i in 0..n {
                    for j in 0..n {
                        if model.final_classes[i] == model.final_classes[j] {
                            m[i * n + j] = &amps[i].conj() * &amps[j];
                        }
                    }
                }
                Cells::Exact(m)
            }
            Cells::Float(amps) => {
                let mut m = vec![Complex64::new(0.0, 0.0); n * n];
                for i in 0..n {
                    for j in 0..n {
                        if model.final_classes[i] == model.final_classes[j] {
                            m[i * n + j] = amps[i].conj() * amps[j];
                        }
                    }
                }
                Cells::Float(m)
            }
        };
        let f = Self::assemble(model.space.clone(), data, epsilon);
        if !f.report.normalized {
            return Err(Error::NotNormalized {
                sum: f.sum_entries().render(),
            });
        }
        Ok(f)
    }

    /// Builds from an operator model and verifies the functional conditions
    /// rather than assuming them.
    pub fn from_operators(model: &OperatorModel, epsilon: f64) -> Result<Self> {
        let space = model.history_space()?;
        let data = model.functional_entries();
        let f = Self::assemble(space, data, epsilon);
        if !f.report.passes() {
            return Err(Error::InvalidModel(format!(
                "operator-built functional failed verification: {}",
                f.report.diagnostics.join("; ")
            )));
        }
        Ok(f)
    }

    /// Builds from a raw square matrix. Violations of Hermiticity,
    /// normalization or strong positivity are rejected with diagnostics
    /// unless `allow_invalid` stores the flagged functional for study.
    pub fn from_matrix(
        space: HistorySpace,
        rows: Vec<Vec<Scalar>>,
        epsilon: f64,
        allow_invalid: bool,
    ) -> Result<Self> {
        let n = space.n();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidModel(format!("matrix is not {n}x{n}")));
        }
        let data = Cells::from_scalars(rows.into_iter().flatten().collect())?;
        let f = Self::assemble(space, data, epsilon);
        if !allow_invalid && !f.report.passes() {
            return Err(Error::InvalidFunctional {
                diagnostics: f.report.diagnostics.clone(),
            });
        }
        Ok(f)
    }

    fn assemble(space: HistorySpace, data: Cells, epsilon: f64) -> Self {
        let n = space.n();
        debug_assert_eq!(data.len(), n * n);
        let eps_abs = match &data {
            Cells::Exact(_) => 0.0,
            Cells::Float(m) => {
                let max = m.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
                epsilon * if max > 0.0 { max } else { 1.0 }
            }
        };
        let report = Self::check_conditions(&data, n, eps_abs);
        DecoherenceFunctional {
            space,
            data,
            epsilon,
            eps_abs,
            report,
        }
    }

    fn check_conditions(data: &Cells, n: usize, eps_abs: f64) -> ValidationReport {
        let mut diagnostics = Vec::new();

        let hermitian = match data {
            Cells::Exact(m) => {
                let mut ok = true;
                'outer_e: for i in 0..n {
                    for j in i..n {
                        if m[i * n + j] != m[j * n + i].conj() {
                            diagnostics.push(format!("not Hermitian at ({i}, {j})"));
                            ok = false;
                            break 'outer_e;
                        }
                    }
                }
                ok
            }
            Cells::Float(m) => {
                let mut ok = true;
                'outer_f: for i in 0..n {
                    for j in i..n {
                        if (m[i * n + j] - m[j * n + i].conj()).norm() > eps_abs {
                            diagnostics.push(format!("not Hermitian at ({i}, {j})"));
                            ok = false;
                            break 'outer_f;
                        }
                    }
                }
                ok
            }
        };

        let normalized = match data {
            Cells::Exact(m) => {
                let mut sum = ExactScalar::zero();
                for x in m {
                    sum = &sum + x;
                }
                let ok = sum.is_one();
                if !ok {
                    diagnostics.push(format!(
                        "sum of entries is {} (expected 1)",
                        crate::scalar::render_exact(&sum)
                    ));
                }
                ok
            }
            Cells::Float(m) => {
                let sum: Complex64 = m.iter().sum();
                let ok = (sum - Complex64::new(1.0, 0.0)).norm() <= eps_abs;
                if !ok {
                    diagnostics.push(format!(
                        "sum of entries is {} (expected 1)",
                        Scalar::Float(sum).render()
                    ));
                }
                ok
            }
        };

        let strongly_positive = if !hermitian {
            diagnostics.push("strong positivity not evaluated: matrix is not Hermitian".into());
            false
        } else {
            let ok = match data {
                Cells::Exact(m) => psd::exact_psd(m, n),
                Cells::Float(m) => psd::float_psd(m, n, eps_abs),
            };
            if !ok {
                diagnostics.push("fine-grained matrix is not positive semidefinite".into());
            }
            ok
        };

        ValidationReport {
            hermitian,
            normalized,
            strongly_positive,
            weakly_positive: None,
            diagnostics,
        }
    }

    pub fn space(&self) -> &HistorySpace {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn backend(&self) -> Backend {
        self.data.backend()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Absolute zero threshold for the float backend (relative tolerance
    /// scaled by the largest entry magnitude); zero on the exact backend.
    pub fn zero_threshold(&self) -> f64 {
        self.eps_abs
    }

    /// Flags computed at build time (weak positivity not included).
    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    pub fn entry(&self, i: usize, j: usize) -> Scalar {
        self.data.scalar_at(i * self.n() + j)
    }

    pub fn sum_entries(&self) -> Scalar {
        match &self.data {
            Cells::Exact(m) => {
                let mut s = ExactScalar::zero();
                for x in m {
                    s = &s + x;
                }
                Scalar::Exact(s)
            }
            Cells::Float(m) => Scalar::Float(m.iter().sum()),
        }
    }

    /// Bilinear extension: the sum of entries over `a x b`. The empty event
    /// evaluates to zero against anything.
    pub fn evaluate(&self, a: Event, b: Event) -> Result<Scalar> {
        self.space.check_event(a)?;
        self.space.check_event(b)?;
        let n = self.n();
        Ok(match &self.data {
            Cells::Exact(m) => {
                let mut s = ExactScalar::zero();
                for i in a.iter() {
                    for j in b.iter() {
                        s = &s + &m[i * n + j];
                    }
                }
                Scalar::Exact(s)
            }
            Cells::Float(m) => {
                let mut s = Complex64::new(0.0, 0.0);
                for i in a.iter() {
                    for j in b.iter() {
                        s += m[i * n + j];
                    }
                }
                Scalar::Float(s)
            }
        })
    }

    /// Quantum measure `mu(a) = D(a, a)`; real and non-negative for any
    /// functional whose flags pass.
    pub fn mu(&self, a: Event) -> Result<Scalar> {
        self.evaluate(a, a)
    }

    /// Backend zero test on a scalar produced by this functional.
    pub fn scalar_is_zero(&self, s: &Scalar) -> bool {
        match s {
            Scalar::Exact(x) => x.is_zero(),
            Scalar::Float(z) => z.norm() <= self.eps_abs,
        }
    }

    /// Zero test honoring the decoherence mode (weak looks only at the real
    /// part).
    pub fn scalar_decoheres(&self, s: &Scalar, mode: DecoherenceMode) -> bool {
        match mode {
            DecoherenceMode::Medium => self.scalar_is_zero(s),
            DecoherenceMode::Weak => match s {
                Scalar::Exact(x) => x.re().is_zero(),
                Scalar::Float(z) => z.re.abs() <= self.eps_abs,
            },
        }
    }

    pub fn evaluate_is_zero(&self, a: Event, b: Event, mode: DecoherenceMode) -> Result<bool> {
        let v = self.evaluate(a, b)?;
        Ok(self.scalar_decoheres(&v, mode))
    }

    pub fn mu_is_zero(&self, a: Event) -> Result<bool> {
        let v = self.mu(a)?;
        Ok(self.scalar_is_zero(&v))
    }

    pub fn mu_is_one(&self, a: Event) -> Result<bool> {
        let one = Scalar::one(self.backend());
        let v = self.mu(a)?;
        Ok(self.measure_cmp(&v, &one)? == std::cmp::Ordering::Equal)
    }

    /// Orders two real scalars; on the float backend values within the zero
    /// threshold compare equal.
    pub fn measure_cmp(&self, x: &Scalar, y: &Scalar) -> Result<std::cmp::Ordering> {
        use std::cmp::Ordering;
        match (x, y) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.real_cmp(b),
            (Scalar::Float(a), Scalar::Float(b)) => {
                if a.im.abs() > self.eps_abs || b.im.abs() > self.eps_abs {
                    return Err(Error::NotReal);
                }
                let d = a.re - b.re;
                Ok(if d.abs() <= self.eps_abs {
                    Ordering::Equal
                } else if d < 0.0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                })
            }
            _ => Err(Error::BackendMismatch),
        }
    }

    /// Recomputes all condition flags; weak positivity is brute-forced over
    /// all events when `n` is within the configured cap, and skipped (None)
    /// otherwise.
    pub fn validate(&self, config: &RunConfig) -> ValidationReport {
        let n = self.n();
        let mut report = Self::check_conditions(&self.data, n, self.eps_abs);
        if n <= config.weak_positivity_cap {
            report.weakly_positive = Some(self.weak_positivity(config));
        }
        report
    }

    fn weak_positivity(&self, config: &RunConfig) -> bool {
        let n = self.n();
        let violations: Vec<u64> = match &self.data {
            Cells::Exact(m) => scan::collect_over_subsets(m, n, config.workers, |bits, mu, _| {
                let ok = mu.is_real() && mu.real_sign().expect("real") != Sign::Negative;
                (!ok).then_some(bits)
            }),
            Cells::Float(m) => {
                let eps = self.eps_abs;
                scan::collect_over_subsets(m, n, config.workers, |bits, mu, _| {
                    let ok = mu.im.abs() <= eps && mu.re >= -eps;
                    (!ok).then_some(bits)
                })
            }
        };
        violations.is_empty()
    }

    /// All non-empty events with zero measure, plus (on the float backend)
    /// the borderline events whose measure lands in `(eps, 10*eps)`.
    pub(crate) fn null_scan(&self, config: &RunConfig) -> Result<(Vec<Event>, Vec<Event>)> {
        let n = self.n();
        if n > config.subset_cap {
            return Err(Error::CapExceeded {
                task: "null-event scan",
                n,
                cap: config.subset_cap,
                estimate: 1u128 << n,
            });
        }
        let mut nulls;
        let mut borderline = Vec::new();
        match &self.data {
            Cells::Exact(m) => {
                nulls = scan::collect_over_subsets(m, n, config.workers, |bits, mu, _| {
                    (bits != 0 && mu.is_zero()).then(|| Event::from_bits(bits))
                });
            }
            Cells::Float(m) => {
                let eps = self.eps_abs;
                let rows = scan::collect_over_subsets(m, n, config.workers, |bits, mu, _| {
                    if bits == 0 {
                        return None;
                    }
                    let mag = mu.norm();
                    if mag <= eps {
                        Some((Event::from_bits(bits), false))
                    } else if mag <= 10.0 * eps {
                        Some((Event::from_bits(bits), true))
                    } else {
                        None
                    }
                });
                nulls = Vec::new();
                for (e, is_borderline) in rows {
                    if is_borderline {
                        borderline.push(e);
                    } else {
                        nulls.push(e);
                    }
                }
            }
        }
        nulls.sort_by_key(|e| e.rank_key());
        borderline.sort_by_key(|e| e.rank_key());
        Ok((nulls, borderline))
    }

    /// All events that decohere with their complement, in canonical subset
    /// order (by cardinality, then bit pattern). Includes the empty event
    /// and the whole space.
    pub(crate) fn consistent_history_scan(
        &self,
        mode: DecoherenceMode,
        config: &RunConfig,
    ) -> Result<Vec<Event>> {
        let n = self.n();
        if n > config.subset_cap {
            return Err(Error::CapExceeded {
                task: "consistent-history scan",
                n,
                cap: config.subset_cap,
                estimate: 1u128 << n,
            });
        }
        let mut events = match &self.data {
            Cells::Exact(m) => scan::collect_over_subsets(m, n, config.workers, |bits, mu, racc| {
                let cross = racc - mu;
                let ok = match mode {
                    DecoherenceMode::Medium => cross.is_zero(),
                    DecoherenceMode::Weak => cross.re().is_zero(),
                };
                ok.then(|| Event::from_bits(bits))
            }),
            Cells::Float(m) => {
                let eps = self.eps_abs;
                scan::collect_over_subsets(m, n, config.workers, |bits, mu, racc| {
                    let cross = racc - mu;
                    let ok = match mode {
                        DecoherenceMode::Medium => cross.norm() <= eps,
                        DecoherenceMode::Weak => cross.re.abs() <= eps,
                    };
                    ok.then(|| Event::from_bits(bits))
                })
            }
        };
        events.sort_by_key(|e| e.rank_key());
        Ok(events)
    }

    /// Entrywise product functional on the product history space; the
    /// composite of strongly positive functionals stays strongly positive.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.backend() != other.backend() {
            return Err(Error::BackendMismatch);
        }
        let (n1, n2) = (self.n(), other.n());
        let labels = self
            .space
            .labels()
            .iter()
            .flat_map(|l1| other.space.labels().iter().map(move |l2| format!("{l1}|{l2}")))
            .collect();
        let space = HistorySpace::new(labels)?;
        let n = n1 * n2;
        let data = match (&self.data, &other.data) {
            (Cells::Exact(m1), Cells::Exact(m2)) => {
                let mut m = vec![ExactScalar::zero(); n * n];
                for i1 in 0..n1 {
                    for i2 in 0..n2 {
                        for j1 in 0..n1 {
                            for j2 in 0..n2 {
                                let row = i1 * n2 + i2;
                                let col = j1 * n2 + j2;
                                m[row * n + col] = &m1[i1 * n1 + j1] * &m2[i2 * n2 + j2];
                            }
                        }
                    }
                }
                Cells::Exact(m)
            }
            (Cells::Float(m1), Cells::Float(m2)) => {
                let mut m = vec![Complex64::new(0.0, 0.0); n * n];
                for i1 in 0..n1 {
                    for i2 in 0..n2 {
                        for j1 in 0..n1 {
                            for j2 in 0..n2 {
                                let row = i1 * n2 + i2;
                                let col = j1 * n2 + j2;
                                m[row * n + col] = m1[i1 * n1 + j1] * m2[i2 * n2 + j2];
                            }
                        }
                    }
                }
                Cells::Float(m)
            }
            _ => unreachable!("backend equality checked above"),
        };
        Ok(Self::assemble(space, data, self.epsilon.max(other.epsilon)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{RunConfig, DEFAULT_EPSILON};
    use crate::models;
    use crate::scalar::parse_amplitude;

    fn exact(n: i64, d: i64) -> Scalar {
        Scalar::Exact(ExactScalar::from_ratio(n, d))
    }

    fn three_slit() -> DecoherenceFunctional {
        DecoherenceFunctional::from_amplitudes(&models::make_three_slit(), DEFAULT_EPSILON)
            .unwrap()
    }

    fn hopper() -> DecoherenceFunctional {
        let model = models::make_hopper(&models::HopperSpec::two_site_default()).unwrap();
        DecoherenceFunctional::from_amplitudes(&model, DEFAULT_EPSILON).unwrap()
    }

    #[test]
    fn three_slit_matrix_entries() {
        let d = three_slit();
        assert_eq!(d.n(), 3);
        let signs = [[1, -1, 1], [-1, 1, -1], [1, -1, 1]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(d.entry(i, j), exact(signs[i][j], 1));
            }
        }
        assert_eq!(d.sum_entries(), exact(1, 1));
        assert!(d.report().passes());
    }

    #[test]
    fn single_history_amplitude_model() {
        let space = HistorySpace::with_default_labels(1).unwrap();
        let model = BranchVectorModel::new(space, vec![exact(1, 1)], vec![0]).unwrap();
        let d = DecoherenceFunctional::from_amplitudes(&model, DEFAULT_EPSILON).unwrap();
        assert_eq!(d.n(), 1);
        assert_eq!(d.entry(0, 0), exact(1, 1));
    }

    #[test]
    fn hopper_cross_entry() {
        let d = hopper();
        // histories 000 and 001 share final class 0
        let expected = parse_amplitude("-1/8").unwrap();
        assert_eq!(d.entry(0, 1), Scalar::Exact(expected));
        // different final classes do not interfere
        assert_eq!(d.entry(0, 4), exact(0, 1));
    }

    #[test]
    fn evaluate_examples() {
        let d = three_slit();
        let e = |bits: u64| Event::from_bits(bits);
        assert_eq!(d.evaluate(e(0b100), e(0b011)).unwrap(), exact(0, 1));
        assert_eq!(
            d.evaluate(Event::EMPTY, d.space().omega()).unwrap(),
            exact(0, 1)
        );
        let ab = models::make_appendix_b();
        assert_eq!(ab.evaluate(e(0b001), e(0b110)).unwrap(), exact(0, 1));
        // out-of-space events are rejected
        assert!(d.evaluate(e(0b1000), e(0b001)).is_err());
    }

    #[test]
    fn measure_examples() {
        let d = three_slit();
        let e = |bits: u64| Event::from_bits(bits);
        assert_eq!(d.mu(e(0b011)).unwrap(), exact(0, 1));
        assert_eq!(d.mu(Event::EMPTY).unwrap(), exact(0, 1));
        assert_eq!(d.mu(d.space().omega()).unwrap(), exact(1, 1));
        // additivity fails: mu({AP} + {BP}) = 0 while the parts give 1 + 1
        assert_eq!(d.mu(e(0b001)).unwrap(), exact(1, 1));
        assert_eq!(d.mu(e(0b010)).unwrap(), exact(1, 1));

        let h = hopper();
        assert_eq!(h.mu(Event::from_bits(0b0000_1111)).unwrap(), exact(1, 2));
    }

    #[test]
    fn bilinearity_identity_on_examples() {
        for d in [three_slit(), hopper(), models::make_appendix_b()] {
            let n = d.n();
            for bits in 0..(1u64 << n) {
                let a = Event::from_bits(bits);
                let c = a.complement(n);
                let mu_a = d.mu(a).unwrap();
                let mu_c = d.mu(c).unwrap();
                let cross = d.evaluate(a, c).unwrap();
                let (Scalar::Exact(x), Scalar::Exact(y), Scalar::Exact(t)) =
                    (mu_a, mu_c, cross)
                else {
                    panic!("exact backend expected")
                };
                let total = &(&x + &y) + &(&t.re() + &t.re());
                assert!(total.is_one());
            }
        }
    }

    #[test]
    fn matrix_builder_diagnostics() {
        let space = HistorySpace::with_default_labels(2).unwrap();
        // sum of entries 2: normalization diagnostic
        let rows = vec![
            vec![exact(1, 1), exact(0, 1)],
            vec![exact(0, 1), exact(1, 1)],
        ];
        match DecoherenceFunctional::from_matrix(space.clone(), rows, DEFAULT_EPSILON, false) {
            Err(Error::InvalidFunctional { diagnostics }) => {
                assert!(diagnostics.iter().any(|m| m.contains("sum of entries is 2")));
            }
            other => panic!("expected rejection, got {other:?}"),
        }
        // identity/n is a valid classical functional
        let rows = vec![
            vec![exact(1, 2), exact(0, 1)],
            vec![exact(0, 1), exact(1, 2)],
        ];
        let d = DecoherenceFunctional::from_matrix(space, rows, DEFAULT_EPSILON, false).unwrap();
        assert!(d.report().passes());
    }

    #[test]
    fn override_flag_stores_invalid_functionals() {
        let space = HistorySpace::with_default_labels(2).unwrap();
        let rows = vec![
            vec![exact(2, 1), exact(0, 1)],
            vec![exact(0, 1), exact(-1, 1)],
        ];
        assert!(DecoherenceFunctional::from_matrix(
            space.clone(),
            rows.clone(),
            DEFAULT_EPSILON,
            false
        )
        .is_err());
        let d = DecoherenceFunctional::from_matrix(space, rows, DEFAULT_EPSILON, true).unwrap();
        let report = d.validate(&RunConfig::default());
        assert!(report.hermitian);
        assert!(report.normalized);
        assert!(!report.strongly_positive);
        assert_eq!(report.weakly_positive, Some(false));
    }

    #[test]
    fn validate_passes_on_paper_functionals() {
        for d in [three_slit(), hopper(), models::make_appendix_b()] {
            let report = d.validate(&RunConfig::default());
            assert!(report.hermitian);
            assert!(report.normalized);
            assert!(report.strongly_positive);
            assert_eq!(report.weakly_positive, Some(true));
        }
    }

    #[test]
    fn weak_positivity_cap_skips_scan() {
        let d = three_slit();
        let cfg = RunConfig {
            weak_positivity_cap: 2,
            ..RunConfig::default()
        };
        assert_eq!(d.validate(&cfg).weakly_positive, None);
    }

    #[test]
    fn operator_route_trivial_cases() {
        // one step, identity unitary, single identity projector
        let id1 = vec![vec![exact(1, 1)]];
        let model = OperatorModel::new(
            1,
            id1.clone(),
            vec![OperatorStepSpec {
                unitary: id1.clone(),
                projectors: vec![id1.clone()],
                outcome_labels: None,
            }],
            DEFAULT_EPSILON,
        )
        .unwrap();
        let d = DecoherenceFunctional::from_operators(&model, DEFAULT_EPSILON).unwrap();
        assert_eq!(d.n(), 1);
        assert_eq!(d.entry(0, 0), exact(1, 1));

        // maximally mixed initial state, identity step, position readout
        let id2 = vec![
            vec![exact(1, 1), exact(0, 1)],
            vec![exact(0, 1), exact(1, 1)],
        ];
        let rho = vec![
            vec![exact(1, 2), exact(0, 1)],
            vec![exact(0, 1), exact(1, 2)],
        ];
        let p0 = vec![
            vec![exact(1, 1), exact(0, 1)],
            vec![exact(0, 1), exact(0, 1)],
        ];
        let p1 = vec![
            vec![exact(0, 1), exact(0, 1)],
            vec![exact(0, 1), exact(1, 1)],
        ];
        let model = OperatorModel::new(
            2,
            rho,
            vec![OperatorStepSpec {
                unitary: id2,
                projectors: vec![p0, p1],
                outcome_labels: None,
            }],
            DEFAULT_EPSILON,
        )
        .unwrap();
        let d = DecoherenceFunctional::from_operators(&model, DEFAULT_EPSILON).unwrap();
        assert_eq!(d.n(), 2);
        assert_eq!(d.entry(0, 0), exact(1, 2));
        assert_eq!(d.entry(1, 1), exact(1, 2));
        assert_eq!(d.entry(0, 1), exact(0, 1));
    }

    #[test]
    fn operator_model_rejects_bad_projector_families() {
        let id2 = vec![
            vec![exact(1, 1), exact(0, 1)],
            vec![exact(0, 1), exact(1, 1)],
        ];
        let rho = vec![
            vec![exact(1, 1), exact(0, 1)],
            vec![exact(0, 1), exact(0, 1)],
        ];
        // family that does not sum to the identity
        let p0 = vec![
            vec![exact(1, 1), exact(0, 1)],
            vec![exact(0, 1), exact(0, 1)],
        ];
        let r = OperatorModel::new(
            2,
            rho.clone(),
            vec![OperatorStepSpec {
                unitary: id2.clone(),
                projectors: vec![p0],
                outcome_labels: None,
            }],
            DEFAULT_EPSILON,
        );
        assert!(matches!(r, Err(Error::InvalidModel(_))));
        // non-unitary step
        let skew = vec![
            vec![exact(1, 1), exact(1, 1)],
            vec![exact(0, 1), exact(1, 1)],
        ];
        let p0 = vec![
            vec![exact(1, 1), exact(0, 1)],
            vec![exact(0, 1), exact(0, 1)],
        ];
        let p1 = vec![
            vec![exact(0, 1), exact(0, 1)],
            vec![exact(0, 1), exact(1, 1)],
        ];
        let r = OperatorModel::new(
            2,
            rho,
            vec![OperatorStepSpec {
                unitary: skew,
                projectors: vec![p0, p1],
                outcome_labels: None,
            }],
            DEFAULT_EPSILON,
        );
        assert!(matches!(r, Err(Error::InvalidModel(_))));
    }

    #[test]
    fn hopper_operator_route_equals_amplitude_route() {
        let spec = models::HopperSpec::two_site_default();
        let via_amplitudes = hopper();
        let op = models::hopper_operator_model(&spec, DEFAULT_EPSILON).unwrap();
        let via_operators = DecoherenceFunctional::from_operators(&op, DEFAULT_EPSILON).unwrap();
        assert_eq!(via_operators.n(), 8);
        assert_eq!(via_operators.space().labels(), via_amplitudes.space().labels());
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(via_amplitudes.entry(i, j), via_operators.entry(i, j));
            }
        }
    }

    #[test]
    fn compose_with_trivial_is_identity() {
        let d = three_slit();
        let space = HistorySpace::new(vec!["x".into()]).unwrap();
        let trivial =
            DecoherenceFunctional::from_matrix(space, vec![vec![exact(1, 1)]], DEFAULT_EPSILON, false)
                .unwrap();
        let c = d.compose(&trivial).unwrap();
        assert_eq!(c.n(), 3);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(c.entry(i, j), d.entry(i, j));
            }
        }
        assert!(c.report().passes());
    }

    #[test]
    fn compose_three_slit_squared() {
        let d = three_slit();
        let c = d.compose(&d).unwrap();
        assert_eq!(c.n(), 9);
        assert!(c.report().passes());
        // product of the two null cells {AP,BP} x {BP,CP}
        let mut bits = 0u64;
        for i in [0usize, 1] {
            for j in [1usize, 2] {
                bits |= 1 << (i * 3 + j);
            }
        }
        assert_eq!(c.mu(Event::from_bits(bits)).unwrap(), exact(0, 1));
    }

    #[test]
    fn compose_requires_matching_backends() {
        let d = three_slit();
        let f = models::random_strongly_positive(2, 2, 1, DEFAULT_EPSILON).unwrap();
        assert!(matches!(d.compose(&f), Err(Error::BackendMismatch)));
    }

    #[test]
    fn final_class_partitions_decohere() {
        let d = hopper();
        let class0 = Event::from_bits(0b0000_1111);
        let class1 = Event::from_bits(0b1111_0000);
        assert!(d
            .evaluate_is_zero(class0, class1, DecoherenceMode::Medium)
            .unwrap());
    }
}
