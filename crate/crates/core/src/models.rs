//! Construction of the worked example systems and seeded random test
//! instances.

use num::complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::config::DEFAULT_EPSILON;
use crate::error::{Error, Result};
use crate::functional::{BranchVectorModel, DecoherenceFunctional, OperatorModel, OperatorStepSpec};
use crate::scalar::{ExactScalar, Scalar};
use crate::space::HistorySpace;

/// A one-plate slit experiment post-selected on a single screen point: one
/// amplitude per slit, every history in the same final class.
pub struct SlitSpec {
    pub amplitudes: Vec<Scalar>,
    pub labels: Option<Vec<String>>,
}

/// The three-slit system with amplitudes `(1, -1, 1)`.
pub fn make_three_slit() -> BranchVectorModel {
    let spec = SlitSpec {
        amplitudes: vec![
            Scalar::Exact(ExactScalar::one()),
            Scalar::Exact(ExactScalar::from_integer(-1)),
            Scalar::Exact(ExactScalar::one()),
        ],
        labels: Some(vec!["h_AP".into(), "h_BP".into(), "h_CP".into()]),
    };
    make_slits(&spec).expect("three-slit spec is well formed")
}

pub fn make_slits(spec: &SlitSpec) -> Result<BranchVectorModel> {
    let n = spec.amplitudes.len();
    if n < 2 {
        return Err(Error::InvalidModel("a slit model needs at least 2 slits".into()));
    }
    let space = match &spec.labels {
        Some(labels) => HistorySpace::new(labels.clone())?,
        None => HistorySpace::with_default_labels(n)?,
    };
    BranchVectorModel::new(space, spec.amplitudes.clone(), vec![0; n])
}

/// A site hopper: a single system jumping between `num_sites` sites under a
/// fixed one-step unitary, observed for `num_steps` steps.
pub struct HopperSpec {
    pub num_sites: usize,
    pub num_steps: usize,
    pub unitary: Vec<Vec<Scalar>>,
    pub initial_site: usize,
}

impl HopperSpec {
    /// Two sites, three steps, start at site 0, with the step unitary
    /// `(1/sqrt2) [[1, i], [i, 1]]` held exactly.
    pub fn two_site_default() -> Self {
        let stay = Scalar::Exact(
            ExactScalar::sqrt2()
                .checked_inv()
                .expect("sqrt2 is invertible"),
        );
        let hop = Scalar::Exact(
            &ExactScalar::i()
                * &ExactScalar::sqrt2()
                    .checked_inv()
                    .expect("sqrt2 is invertible"),
        );
        HopperSpec {
            num_sites: 2,
            num_steps: 3,
            unitary: vec![vec![stay.clone(), hop.clone()], vec![hop, stay]],
            initial_site: 0,
        }
    }
}

fn site_char(site: usize) -> char {
    std::char::from_digit(site as u32, 36).expect("site index below 36")
}

/// Branch-vector model of the hopper. History labels are outcome digit
/// strings read with time increasing right to left, so the leftmost digit
/// is the final site and doubles as the final class. The amplitude of a
/// path is the ordered product of one-step transition amplitudes from the
/// initial site.
pub fn make_hopper(spec: &HopperSpec) -> Result<BranchVectorModel> {
    let s = spec.num_sites;
    let t = spec.num_steps;
    if s < 1 || s > 35 {
        return Err(Error::InvalidModel("site count must be between 1 and 35".into()));
    }
    if t < 1 {
        return Err(Error::InvalidModel("at least one time step is required".into()));
    }
    if spec.initial_site >= s {
        return Err(Error::InvalidModel("initial site outside the lattice".into()));
    }
    let u = crate::functional::square_cells(s, spec.unitary.clone(), "hopper unitary")?;
    if !crate::functional::unitary_check(&u, s, DEFAULT_EPSILON) {
        return Err(Error::InvalidModel("step matrix is not unitary".into()));
    }

    let n = s.checked_pow(t as u32).ok_or_else(|| {
        Error::InvalidModel("history count overflows".into())
    })?;
    // paths decoded with the first step in the lowest digit
    let digits_of = |idx: usize| {
        let mut digits = Vec::with_capacity(t);
        let mut rest = idx;
        for _ in 0..t {
            digits.push(rest % s);
            rest /= s;
        }
        digits
    };

    let mut labels = Vec::with_capacity(n);
    let mut classes = Vec::with_capacity(n);
    for idx in 0..n {
        let digits = digits_of(idx);
        labels.push(digits.iter().rev().map(|&x| site_char(x)).collect::<String>());
        classes.push(*digits.last().expect("at least one step"));
    }
    let space = HistorySpace::new(labels)?;

    let amplitudes: Vec<Scalar> = match &u {
        crate::functional::Cells::Exact(m) => (0..n)
            .map(|idx| {
                let mut amp = ExactScalar::one();
                let mut prev = spec.initial_site;
                for x in digits_of(idx) {
                    amp = &amp * &m[x * s + prev];
                    prev = x;
                }
                Scalar::Exact(amp)
            })
            .collect(),
        crate::functional::Cells::Float(m) => (0..n)
            .map(|idx| {
                let mut amp = Complex64::new(1.0, 0.0);
                let mut prev = spec.initial_site;
                for x in digits_of(idx) {
                    amp *= m[x * s + prev];
                    prev = x;
                }
                Scalar::Float(amp)
            })
            .collect(),
    };
    BranchVectorModel::new(space, amplitudes, classes)
}

/// Operator-string model of the same hopper: the initial projector state,
/// then `num_steps` copies of (step unitary, site projectors).
pub fn hopper_operator_model(spec: &HopperSpec, epsilon: f64) -> Result<OperatorModel> {
    let s = spec.num_sites;
    if spec.unitary.is_empty() || spec.unitary[0].is_empty() {
        return Err(Error::InvalidModel("empty unitary".into()));
    }
    let backend = spec.unitary[0][0].backend();
    let zero = Scalar::zero(backend);
    let one = Scalar::one(backend);
    let basis_matrix = |k: usize| -> Vec<Vec<Scalar>> {
        (0..s)
            .map(|i| {
                (0..s)
                    .map(|j| if i == k && j == k { one.clone() } else { zero.clone() })
                    .collect()
            })
            .collect()
    };
    let rho = basis_matrix(spec.initial_site);
    let projectors: Vec<Vec<Vec<Scalar>>> = (0..s).map(basis_matrix).collect();
    let labels: Vec<String> = (0..s).map(|k| site_char(k).to_string()).collect();
    let steps = (0..spec.num_steps)
        .map(|_| OperatorStepSpec {
            unitary: spec.unitary.clone(),
            projectors: projectors.clone(),
            outcome_labels: Some(labels.clone()),
        })
        .collect();
    OperatorModel::new(s, rho, steps, epsilon)
}

/// The worked 3x3 rational functional used for the selection-criteria
/// comparison.
pub fn make_appendix_b() -> DecoherenceFunctional {
    let space = HistorySpace::with_default_labels(3).expect("3 labels");
    let e = |n: i64, d: i64| Scalar::Exact(ExactScalar::from_ratio(n, d));
    let rows = vec![
        vec![e(1, 3), e(-7, 24), e(7, 24)],
        vec![e(-7, 24), e(1, 2), e(-7, 24)],
        vec![e(7, 24), e(-7, 24), e(3, 4)],
    ];
    DecoherenceFunctional::from_matrix(space, rows, DEFAULT_EPSILON, false)
        .expect("the worked matrix satisfies every condition")
}

/// Seeded random strongly positive functional on the float backend: `n`
/// complex branch vectors of dimension `rank` are drawn from the standard
/// normal, their Gram matrix is rescaled so all entries sum to one.
///
/// Draws whose entry sum degenerates are rejected and retried a bounded
/// number of times.
pub fn random_strongly_positive(
    n: usize,
    rank: usize,
    seed: u64,
    epsilon: f64,
) -> Result<DecoherenceFunctional> {
    if n < 1 || rank < 1 {
        return Err(Error::InvalidArgument(
            "need at least one history and rank one".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..64 {
        let vectors: Vec<Vec<Complex64>> = (0..n)
            .map(|_| {
                (0..rank)
                    .map(|_| {
                        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                    })
                    .collect()
            })
            .collect();
        let mut resultant = vec![Complex64::new(0.0, 0.0); rank];
        for v in &vectors {
            for (acc, x) in resultant.iter_mut().zip(v.iter()) {
                *acc += x;
            }
        }
        let total: f64 = resultant.iter().map(|z| z.norm_sqr()).sum();
        if total <= 1e-9 {
            continue;
        }
        let rows: Vec<Vec<Scalar>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut g = Complex64::new(0.0, 0.0);
                        for l in 0..rank {
                            g += vectors[i][l].conj() * vectors[j][l];
                        }
                        Scalar::Float(g / total)
                    })
                    .collect()
            })
            .collect();
        let space = HistorySpace::with_default_labels(n)?;
        return DecoherenceFunctional::from_matrix(space, rows, epsilon, false);
    }
    Err(Error::DegenerateDraw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;
    use crate::scalar::parse_amplitude;

    #[test]
    fn three_slit_measures() {
        let model = make_three_slit();
        let d = DecoherenceFunctional::from_amplitudes(&model, DEFAULT_EPSILON).unwrap();
        for i in 0..3 {
            let mu = d.mu(crate::space::Event::singleton(i)).unwrap();
            assert_eq!(mu, Scalar::Exact(ExactScalar::one()));
        }
        assert_eq!(
            d.mu(d.space().omega()).unwrap(),
            Scalar::Exact(ExactScalar::one())
        );
    }

    #[test]
    fn degenerate_slit_model_is_rejected_at_build() {
        let spec = SlitSpec {
            amplitudes: vec![
                Scalar::Exact(ExactScalar::one()),
                Scalar::Exact(ExactScalar::from_integer(-1)),
            ],
            labels: None,
        };
        let model = make_slits(&spec).unwrap();
        match DecoherenceFunctional::from_amplitudes(&model, DEFAULT_EPSILON) {
            Err(Error::NotNormalized { sum }) => assert_eq!(sum, "0"),
            other => panic!("expected normalization rejection, got {other:?}"),
        }
        let too_few = SlitSpec {
            amplitudes: vec![Scalar::Exact(ExactScalar::one())],
            labels: None,
        };
        assert!(make_slits(&too_few).is_err());
    }

    #[test]
    fn hopper_amplitudes_match_published_values() {
        let model = make_hopper(&HopperSpec::two_site_default()).unwrap();
        let a = |text: &str| parse_amplitude(text).unwrap();
        let expected = [
            ("000", a("1/(2*sqrt2)")),
            ("001", a("-1/(2*sqrt2)")),
            ("010", a("-1/(2*sqrt2)")),
            ("011", a("-1/(2*sqrt2)")),
            ("100", a("i/(2*sqrt2)")),
            ("101", a("-i/(2*sqrt2)")),
            ("110", a("i/(2*sqrt2)")),
            ("111", a("i/(2*sqrt2)")),
        ];
        assert_eq!(model.n(), 8);
        for (idx, (label, amp)) in expected.iter().enumerate() {
            assert_eq!(model.space().label(idx), *label);
            assert_eq!(model.amplitude(idx), Scalar::Exact(amp.clone()));
            assert_eq!(model.final_class(idx), idx >> 2);
        }
    }

    #[test]
    fn single_step_hopper() {
        let spec = HopperSpec {
            num_steps: 1,
            ..HopperSpec::two_site_default()
        };
        let model = make_hopper(&spec).unwrap();
        assert_eq!(model.n(), 2);
        let d = DecoherenceFunctional::from_amplitudes(&model, DEFAULT_EPSILON).unwrap();
        let half = Scalar::Exact(ExactScalar::from_ratio(1, 2));
        assert_eq!(d.mu(crate::space::Event::singleton(0)).unwrap(), half);
        assert_eq!(d.mu(crate::space::Event::singleton(1)).unwrap(), half);
        // against the operator route
        let op = hopper_operator_model(&spec, DEFAULT_EPSILON).unwrap();
        let d2 = DecoherenceFunctional::from_operators(&op, DEFAULT_EPSILON).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(d.entry(i, j), d2.entry(i, j));
            }
        }
    }

    #[test]
    fn hopper_rejects_bad_specs() {
        let mut spec = HopperSpec::two_site_default();
        spec.initial_site = 5;
        assert!(make_hopper(&spec).is_err());
        let mut bad_u = HopperSpec::two_site_default();
        bad_u.unitary[0][1] = Scalar::Exact(ExactScalar::one());
        assert!(make_hopper(&bad_u).is_err());
    }

    #[test]
    fn appendix_b_matrix() {
        let d = make_appendix_b();
        assert_eq!(
            d.entry(0, 0),
            Scalar::Exact(ExactScalar::from_ratio(1, 3))
        );
        assert_eq!(
            d.entry(1, 1),
            Scalar::Exact(ExactScalar::from_ratio(1, 2))
        );
        assert_eq!(
            d.entry(2, 2),
            Scalar::Exact(ExactScalar::from_ratio(3, 4))
        );
        assert_eq!(d.sum_entries(), Scalar::Exact(ExactScalar::one()));
        assert!(d.report().passes());
    }

    #[test]
    fn random_generator_is_valid_and_deterministic() {
        let a = random_strongly_positive(4, 2, 42, DEFAULT_EPSILON).unwrap();
        let b = random_strongly_positive(4, 2, 42, DEFAULT_EPSILON).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(a.entry(i, j), b.entry(i, j));
            }
        }
        let report = a.validate(&RunConfig::default());
        assert!(report.hermitian && report.normalized && report.strongly_positive);
        assert_eq!(report.weakly_positive, Some(true));

        let c = random_strongly_positive(4, 2, 43, DEFAULT_EPSILON).unwrap();
        let differs = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .any(|(i, j)| a.entry(i, j) != c.entry(i, j));
        assert!(differs);
    }
}
